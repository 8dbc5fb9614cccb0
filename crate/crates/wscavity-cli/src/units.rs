//! Quantities written as "<number> <unit>" and converted to SI.

use std::f64::consts::TAU;

use wscavity::constants::ATOMIC_MASS_UNIT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Temperature,
    /// Angular frequency or rate in rad/s; Hz-type suffixes are multiplied by 2π.
    Frequency,
    /// Lattice depth in recoil energies.
    Recoil,
    Acceleration,
    Mass,
    /// Ratio expressed in decibels.
    Decibel,
}

impl Dimension {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Self::Length => &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("µm", 1e-6), ("nm", 1e-9)],
            Self::Time => &[("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("µs", 1e-6), ("ns", 1e-9)],
            Self::Temperature => &[("K", 1.0), ("mK", 1e-3), ("uK", 1e-6), ("µK", 1e-6), ("nK", 1e-9)],
            Self::Frequency => &[
                ("rad/s", 1.0),
                ("1/s", 1.0),
                ("/s", 1.0),
                ("Hz", TAU),
                ("kHz", TAU * 1e3),
                ("MHz", TAU * 1e6),
                ("GHz", TAU * 1e9),
            ],
            Self::Recoil => &[("E_R", 1.0), ("Er", 1.0)],
            Self::Acceleration => &[("m/s^2", 1.0), ("m/s2", 1.0)],
            Self::Mass => &[("kg", 1.0), ("u", ATOMIC_MASS_UNIT)],
            Self::Decibel => &[("dB", 1.0)],
        }
    }

    pub fn suffixes(self) -> String {
        self.units().iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ")
    }
}

/// Parses `text` as a quantity of dimension `dim`; `field` names the config
/// key in diagnostics.
pub fn parse_quantity(field: &str, text: &str, dim: Dimension) -> Result<f64, String> {
    let text = text.trim();
    let split = text.find(char::is_whitespace);
    let (number, unit) = match split {
        Some(i) => (&text[..i], text[i..].trim()),
        None => {
            return Err(format!(
                "field `{field}`: {text:?} has no unit suffix (expected one of {})",
                dim.suffixes()
            ))
        }
    };
    let value: f64 = number
        .parse()
        .map_err(|_| format!("field `{field}`: {number:?} is not a number"))?;
    if !value.is_finite() {
        return Err(format!("field `{field}`: value must be finite"));
    }
    let factor = dim
        .units()
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, f)| *f)
        .ok_or_else(|| format!("field `{field}`: unknown unit {unit:?} (expected one of {})", dim.suffixes()))?;
    Ok(value * factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(parse_quantity("a", "532 nm", Dimension::Length).unwrap(), 532e-9);
        assert_eq!(parse_quantity("a", " 1 uK ", Dimension::Temperature).unwrap(), 1e-6);
        assert!((parse_quantity("a", "1 kHz", Dimension::Frequency).unwrap() - TAU * 1e3).abs() < 1e-9);
        assert_eq!(parse_quantity("a", "0.01 1/s", Dimension::Frequency).unwrap(), 0.01);
        assert_eq!(parse_quantity("a", "6 E_R", Dimension::Recoil).unwrap(), 6.0);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = parse_quantity("lattice.depth", "6", Dimension::Recoil).unwrap_err();
        assert!(e.contains("lattice.depth") && e.contains("E_R"));
        assert!(parse_quantity("x", "6 nm", Dimension::Time).unwrap_err().contains("unknown unit"));
        assert!(parse_quantity("x", "six s", Dimension::Time).is_err());
        assert!(parse_quantity("x", "inf s", Dimension::Time).is_err());
    }
}
