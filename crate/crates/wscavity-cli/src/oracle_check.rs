//! Random-draw comparison of the closed-form echo expressions against the
//! brute-force simulators.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use wscavity::cavity::DecoherenceRates;
use wscavity::echo::{dephasing_gain, dephasing_noise, inhomogeneous_gain, spont_gain, spont_noise, GainRoute, Route};
use wscavity::oracle::{dicke_echo_probe, lindblad_echo_probe, pure_inhomogeneous_slope};

use crate::output::Table;
use crate::CliError;

pub const TOLERANCE: f64 = 1e-5;
const MAX_CHI_T0: f64 = 0.3;
const MAX_RATE_T0: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Dephasing,
    Spontaneous,
    Inhomogeneous,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Dephasing, Family::Spontaneous, Family::Inhomogeneous];

    fn label(self) -> &'static str {
        match self {
            Self::Dephasing => "collective_dephasing",
            Self::Spontaneous => "spontaneous_emission",
            Self::Inhomogeneous => "inhomogeneous_gain",
        }
    }

    fn oracle(self) -> &'static str {
        match self {
            Self::Dephasing => "dicke",
            Self::Spontaneous => "lindblad_full",
            Self::Inhomogeneous => "state_vector",
        }
    }

    fn max_atoms(self, quick: bool) -> usize {
        match (self, quick) {
            (_, true) => 6,
            (Self::Dephasing, false) => 40,
            (Self::Spontaneous, false) => 6,
            (Self::Inhomogeneous, false) => 14,
        }
    }
}

/// One random parameter draw.
#[derive(Debug, Clone)]
struct Draw {
    atoms: usize,
    chi_t0: f64,
    rate_a: f64,
    rate_b: f64,
    matrix: Vec<f64>,
}

/// Largest relative deviations of the noise and of the slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyResult {
    pub family: Family,
    pub atoms_max: usize,
    pub draws: usize,
    pub noise: Option<f64>,
    pub slope: f64,
}

impl FamilyResult {
    pub fn passed(&self) -> bool {
        self.slope <= TOLERANCE && self.noise.is_none_or(|n| n <= TOLERANCE)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(f64::MIN_POSITIVE)
}

fn evaluate(family: Family, d: &Draw) -> Result<(Option<f64>, f64), CliError> {
    // Times in units of 1/χ with χ = 1.
    let t0 = d.chi_t0;
    match family {
        Family::Dephasing => {
            let gz = d.rate_a / t0;
            let probe = dicke_echo_probe(d.atoms, 1.0, gz, t0)?;
            let noise = dephasing_noise(d.atoms, gz, t0, Route::Exact)?;
            let gain = dephasing_gain(d.atoms, 1.0, gz, t0)?;
            Ok((Some(rel(noise, probe.variance_y)), rel(gain, probe.slope)))
        }
        Family::Spontaneous => {
            let rates = DecoherenceRates::balanced(d.rate_a / t0, d.rate_b / t0)?;
            let chi = DMatrix::from_element(d.atoms, d.atoms, 1.0);
            let probe = lindblad_echo_probe(d.atoms, &chi, &rates, 0.0, t0)?;
            let noise = spont_noise(d.atoms, 1.0, &rates, t0, Route::Exact)?;
            let gain = spont_gain(d.atoms, 1.0, &rates, t0, GainRoute::Exact)?;
            Ok((Some(rel(noise, probe.variance_y)), rel(gain, probe.slope)))
        }
        Family::Inhomogeneous => {
            let chi = DMatrix::from_row_slice(d.atoms, d.atoms, &d.matrix);
            let gain = inhomogeneous_gain(&chi, 1.0)?;
            let slope = pure_inhomogeneous_slope(&chi, 1.0)?;
            Ok((None, rel(gain, slope)))
        }
    }
}

fn draw(family: Family, rng: &mut ChaCha8Rng, max_atoms: usize) -> Draw {
    let atoms = rng.gen_range(2..=max_atoms);
    let chi_t0 = rng.gen_range(0.01..=MAX_CHI_T0);
    let rate_a = rng.gen_range(0.0..=MAX_RATE_T0);
    let rate_b = rng.gen_range(0.0..=MAX_RATE_T0);
    let mut matrix = Vec::new();
    if family == Family::Inhomogeneous {
        // Symmetric χ_nm t with every entry at most MAX_CHI_T0.
        let mut m = vec![0.0; atoms * atoms];
        for j in 0..atoms {
            for k in 0..=j {
                let v = chi_t0 * rng.gen_range(0.5..=1.0);
                m[j * atoms + k] = v;
                m[k * atoms + j] = v;
            }
        }
        matrix = m;
    }
    Draw {
        atoms,
        chi_t0,
        rate_a,
        rate_b,
        matrix,
    }
}

/// Runs `draws` random comparisons per family. Draws are generated serially
/// from `seed` and evaluated in parallel, so results do not depend on the
/// thread count.
pub fn run(seed: u64, draws: usize, quick: bool) -> Result<Vec<FamilyResult>, CliError> {
    Family::ALL
        .iter()
        .enumerate()
        .map(|(i, &family)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let max_atoms = family.max_atoms(quick);
            let mut params: Vec<Draw> = (0..draws).map(|_| draw(family, &mut rng, max_atoms)).collect();
            // Always include the largest size once.
            if let Some(first) = params.first_mut() {
                if first.atoms != max_atoms {
                    *first = draw_at(family, &mut rng, max_atoms);
                }
            }
            let devs = params
                .par_iter()
                .map(|d| evaluate(family, d))
                .collect::<Result<Vec<_>, _>>()?;
            let slope = devs.iter().map(|d| d.1).fold(0.0, f64::max);
            let noise = devs.iter().filter_map(|d| d.0).reduce(f64::max);
            Ok(FamilyResult {
                family,
                atoms_max: params.iter().map(|d| d.atoms).max().unwrap_or(0),
                draws,
                noise,
                slope,
            })
        })
        .collect()
}

fn draw_at(family: Family, rng: &mut ChaCha8Rng, atoms: usize) -> Draw {
    let mut d;
    loop {
        d = draw(family, rng, atoms);
        if d.atoms == atoms {
            return d;
        }
    }
}

pub fn table(results: &[FamilyResult]) -> Table {
    let mut t = Table::new(&[
        "family",
        "oracle",
        "atoms_max",
        "draws",
        "max_rel_dev_noise",
        "max_rel_dev_slope",
        "tolerance",
        "pass",
    ]);
    for r in results {
        t.push(vec![
            r.family.label().into(),
            r.family.oracle().into(),
            r.atoms_max.into(),
            r.draws.into(),
            r.noise.into(),
            r.slope.into(),
            TOLERANCE.into(),
            r.passed().into(),
        ]);
    }
    t.note(format!("random draws with chi*t0 <= {MAX_CHI_T0} and rate*t0 <= {MAX_RATE_T0}"));
    t
}
