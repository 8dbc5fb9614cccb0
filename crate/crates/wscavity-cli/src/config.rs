//! Run configuration: a TOML document whose physical fields carry unit
//! suffixes. Every section and field is optional; omitted values fall back to
//! the rb87 operating point used throughout the library tests.

use serde::{Deserialize, Serialize};
use wscavity::constants::{self, STANDARD_GRAVITY};
use wscavity::echo::Route;
use wscavity::thermal::{LatticeColor, RadialSpectrum};

use crate::units::{parse_quantity, Dimension};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    format: Option<Format>,
    seed: Option<u64>,
    #[serde(default)]
    species: RawSpecies,
    #[serde(default)]
    lattice: RawLattice,
    #[serde(default)]
    cavity: RawCavity,
    thermal: Option<RawThermal>,
    #[serde(default)]
    protocol: RawProtocol,
    #[serde(default)]
    echo: RawEcho,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpecies {
    preset: Option<String>,
    mass: Option<String>,
    linewidth: Option<String>,
    lattice_wavelength: Option<String>,
    cavity_wavelength: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    depth: Option<String>,
    gravity: Option<String>,
    depth_min: Option<String>,
    depth_max: Option<String>,
    depth_step: Option<String>,
    sites: Option<u32>,
    stark_shift_ratio: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCavity {
    coupling_up: Option<String>,
    coupling_down: Option<String>,
    detuning_up: Option<String>,
    detuning_down: Option<String>,
    cavity_detuning: Option<String>,
    linewidth: Option<String>,
    pump: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThermal {
    temperatures: Option<Vec<String>>,
    radial_frequencies: Option<Vec<String>>,
    lattice_waist: Option<String>,
    cavity_waist: Option<String>,
    color: Option<LatticeColorName>,
    spectrum: Option<SpectrumName>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    transfer_sites: Option<u32>,
    pulse_pairs: Option<u32>,
    interrogation: Option<String>,
    averaging: Option<String>,
    interrogation_dephasing: Option<String>,
    tau_min: Option<String>,
    tau_max: Option<String>,
    tau_points: Option<usize>,
    squeezing: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEcho {
    atoms: Option<usize>,
    cooperativity: Option<f64>,
    flip_probability: Option<f64>,
    dephasing_ratio: Option<f64>,
    route: Option<RouteName>,
    atoms_min: Option<usize>,
    atoms_max: Option<usize>,
    points_per_decade: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeColorName {
    Red,
    Blue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumName {
    Halved,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteName {
    Exact,
    Approximate,
}

/// Resolved configuration in SI units (frequencies in rad/s, depths in E_R).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub format: Format,
    pub seed: u64,
    pub species: Species,
    pub lattice: Lattice,
    pub cavity: Cavity,
    pub thermal: Option<Thermal>,
    pub protocol: Protocol,
    pub echo: Echo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Species {
    pub label: String,
    pub mass: f64,
    pub linewidth: f64,
    pub lattice_wavelength: f64,
    pub cavity_wavelength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lattice {
    pub depth: f64,
    pub gravity: f64,
    pub depth_min: f64,
    pub depth_max: f64,
    pub depth_step: f64,
    pub sites: u32,
    pub stark_shift_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cavity {
    pub coupling_up: f64,
    pub coupling_down: f64,
    pub detuning_up: f64,
    pub detuning_down: f64,
    pub cavity_detuning: f64,
    pub linewidth: f64,
    pub pump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thermal {
    pub temperatures: Vec<f64>,
    pub radial_frequencies: Vec<f64>,
    pub lattice_waist: f64,
    pub cavity_waist: f64,
    pub color: LatticeColorName,
    pub spectrum: SpectrumName,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Protocol {
    pub transfer_sites: u32,
    pub pulse_pairs: u32,
    pub interrogation: f64,
    pub averaging: f64,
    pub interrogation_dephasing: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_points: usize,
    /// Input squeezing in dB below the SQL.
    pub squeezing_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Echo {
    pub atoms: usize,
    pub cooperativity: f64,
    pub flip_probability: f64,
    pub dephasing_ratio: Option<f64>,
    pub route: RouteName,
    pub atoms_min: usize,
    pub atoms_max: usize,
    pub points_per_decade: usize,
}

fn quantity(field: &str, raw: &Option<String>, default: &str, dim: Dimension) -> Result<f64, CliError> {
    parse_quantity(field, raw.as_deref().unwrap_or(default), dim).map_err(CliError::Config)
}

fn check(ok: bool, msg: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg.to_string()))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::resolve(raw)
    }

    pub fn defaults() -> Self {
        Self::resolve(RawConfig::default()).expect("built-in defaults are valid")
    }

    fn resolve(raw: RawConfig) -> Result<Self, CliError> {
        use Dimension::*;
        let s = &raw.species;
        let label = s.preset.clone().unwrap_or_else(|| "rb87".into());
        let preset = constants::preset(&label)
            .ok_or_else(|| CliError::Config(format!("field `species.preset`: unknown species {label:?} (rb87, yb171)")))?;
        let species = Species {
            label: preset.label.to_string(),
            mass: match &s.mass {
                Some(_) => quantity("species.mass", &s.mass, "", Mass)?,
                None => preset.mass_kg(),
            },
            linewidth: match &s.linewidth {
                Some(_) => quantity("species.linewidth", &s.linewidth, "", Frequency)?,
                None => preset.linewidth,
            },
            lattice_wavelength: match &s.lattice_wavelength {
                Some(_) => quantity("species.lattice_wavelength", &s.lattice_wavelength, "", Length)?,
                None => preset.lattice_wavelength,
            },
            cavity_wavelength: match &s.cavity_wavelength {
                Some(_) => quantity("species.cavity_wavelength", &s.cavity_wavelength, "", Length)?,
                None => preset.cavity_wavelength,
            },
        };

        let l = &raw.lattice;
        let gravity = match &l.gravity {
            Some(_) => quantity("lattice.gravity", &l.gravity, "", Acceleration)?,
            None => STANDARD_GRAVITY,
        };
        let lattice = Lattice {
            depth: quantity("lattice.depth", &l.depth, "6 E_R", Recoil)?,
            gravity,
            depth_min: quantity("lattice.depth_min", &l.depth_min, "1 E_R", Recoil)?,
            depth_max: quantity("lattice.depth_max", &l.depth_max, "10 E_R", Recoil)?,
            depth_step: quantity("lattice.depth_step", &l.depth_step, "0.05 E_R", Recoil)?,
            sites: l.sites.unwrap_or(40),
            stark_shift_ratio: l.stark_shift_ratio.unwrap_or(0.2),
        };
        check(lattice.depth_step > 0.0, "lattice.depth_step must be positive")?;
        check(lattice.sites >= 1, "lattice.sites must be at least 1")?;

        let c = &raw.cavity;
        let cavity = Cavity {
            coupling_up: quantity("cavity.coupling_up", &c.coupling_up, "2e6 rad/s", Frequency)?,
            coupling_down: quantity("cavity.coupling_down", &c.coupling_down, "2e6 rad/s", Frequency)?,
            detuning_up: quantity("cavity.detuning_up", &c.detuning_up, "1e9 rad/s", Frequency)?,
            detuning_down: quantity("cavity.detuning_down", &c.detuning_down, "-1e9 rad/s", Frequency)?,
            cavity_detuning: quantity("cavity.cavity_detuning", &c.cavity_detuning, "5e6 rad/s", Frequency)?,
            linewidth: quantity("cavity.linewidth", &c.linewidth, "1e5 rad/s", Frequency)?,
            pump: quantity("cavity.pump", &c.pump, "3e5 1/s", Frequency)?,
        };

        let thermal = raw
            .thermal
            .as_ref()
            .map(|t| -> Result<Thermal, CliError> {
                let list = |field: &str, v: &Option<Vec<String>>, default: &[&str], dim| -> Result<Vec<f64>, CliError> {
                    let items: Vec<String> = v.clone().unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect());
                    items
                        .iter()
                        .enumerate()
                        .map(|(i, q)| parse_quantity(&format!("{field}[{i}]"), q, dim).map_err(CliError::Config))
                        .collect()
                };
                Ok(Thermal {
                    temperatures: list("thermal.temperatures", &t.temperatures, &["0.1 uK", "1 uK", "10 uK"], Temperature)?,
                    radial_frequencies: list(
                        "thermal.radial_frequencies",
                        &t.radial_frequencies,
                        &["0.5 kHz", "1 kHz", "2 kHz", "4 kHz", "10 kHz"],
                        Frequency,
                    )?,
                    lattice_waist: quantity("thermal.lattice_waist", &t.lattice_waist, "50 um", Length)?,
                    cavity_waist: quantity("thermal.cavity_waist", &t.cavity_waist, "50 um", Length)?,
                    color: t.color.unwrap_or(LatticeColorName::Red),
                    spectrum: t.spectrum.unwrap_or(SpectrumName::Halved),
                })
            })
            .transpose()?;

        let p = &raw.protocol;
        let protocol = Protocol {
            transfer_sites: p.transfer_sites.unwrap_or(5),
            pulse_pairs: p.pulse_pairs.unwrap_or(2),
            interrogation: quantity("protocol.interrogation", &p.interrogation, "1 s", Time)?,
            averaging: quantity("protocol.averaging", &p.averaging, "1 s", Time)?,
            interrogation_dephasing: quantity(
                "protocol.interrogation_dephasing",
                &p.interrogation_dephasing,
                "0.01 1/s",
                Frequency,
            )?,
            tau_min: quantity("protocol.tau_min", &p.tau_min, "0.1 s", Time)?,
            tau_max: quantity("protocol.tau_max", &p.tau_max, "100 s", Time)?,
            tau_points: p.tau_points.unwrap_or(31),
            squeezing_db: quantity("protocol.squeezing", &p.squeezing, "20 dB", Decibel)?,
        };
        check(protocol.transfer_sites >= 1, "protocol.transfer_sites must be at least 1")?;
        check(
            protocol.tau_min > 0.0 && protocol.tau_min <= protocol.tau_max,
            "protocol.tau_min must be positive and not above protocol.tau_max",
        )?;
        check(protocol.tau_points >= 1, "protocol.tau_points must be at least 1")?;

        let e = &raw.echo;
        let echo = Echo {
            atoms: e.atoms.unwrap_or(50_000),
            cooperativity: e.cooperativity.unwrap_or(2.0),
            flip_probability: e.flip_probability.unwrap_or(0.5),
            dephasing_ratio: e.dephasing_ratio,
            route: e.route.unwrap_or(RouteName::Exact),
            atoms_min: e.atoms_min.unwrap_or(1_000),
            atoms_max: e.atoms_max.unwrap_or(1_000_000),
            points_per_decade: e.points_per_decade.unwrap_or(10),
        };
        check(echo.atoms >= 2, "echo.atoms must be at least 2")?;
        check(echo.cooperativity > 0.0, "echo.cooperativity must be positive")?;
        check((0.0..=1.0).contains(&echo.flip_probability), "echo.flip_probability must lie in [0, 1]")?;
        check(
            echo.atoms_min >= 2 && echo.atoms_min <= echo.atoms_max,
            "echo.atoms_min must be at least 2 and not above echo.atoms_max",
        )?;
        check(echo.points_per_decade >= 1, "echo.points_per_decade must be at least 1")?;

        Ok(Self {
            format: raw.format.unwrap_or(Format::Csv),
            seed: raw.seed.unwrap_or(0),
            species,
            lattice,
            cavity,
            thermal,
            protocol,
            echo,
        })
    }

    /// Lowercase hex SHA-256 of the resolved configuration.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_vec(self).expect("config serialises");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn lattice_config(&self) -> Result<wscavity::LatticeConfig, CliError> {
        let s = &self.species;
        let species = wscavity::AtomSpecies::new(s.label.clone(), s.mass, s.linewidth)?;
        Ok(wscavity::LatticeConfig::new(
            species,
            s.lattice_wavelength,
            s.cavity_wavelength,
            self.lattice.depth,
            self.lattice.gravity,
        )?)
    }

    pub fn cavity_config(&self) -> Result<wscavity::CavityConfig, CliError> {
        let c = &self.cavity;
        Ok(wscavity::CavityConfig::new(
            c.coupling_up,
            c.coupling_down,
            c.detuning_up,
            c.detuning_down,
            c.cavity_detuning,
            c.linewidth,
            num_complex::Complex::new(c.pump, 0.0),
        )?)
    }

    pub fn route(&self) -> Route {
        match self.echo.route {
            RouteName::Exact => Route::Exact,
            RouteName::Approximate => Route::Approximate,
        }
    }
}

impl Thermal {
    pub fn color(&self) -> LatticeColor {
        match self.color {
            LatticeColorName::Red => LatticeColor::Red,
            LatticeColorName::Blue => LatticeColor::Blue,
        }
    }

    pub fn spectrum(&self) -> RadialSpectrum {
        match self.spectrum {
            SpectrumName::Halved => RadialSpectrum::Halved,
            SpectrumName::Standard => RadialSpectrum::Standard,
        }
    }

    /// Thermal-grid defaults: T ∈ {0.1, 1, 10} µK, ω_r/2π ∈ {0.5, …, 10} kHz, 50 µm waists.
    pub fn figure_defaults() -> Self {
        let raw = RawConfig {
            thermal: Some(RawThermal::default()),
            ..RawConfig::default()
        };
        RunConfig::resolve(raw).expect("defaults valid").thermal.expect("thermal section present")
    }
}
