//! One function per subcommand, each returning a finished table.

use rayon::prelude::*;
use wscavity::cavity::{regime_check, steady_alpha, twisting_params, DEFAULT_DOMINANCE};
use wscavity::echo::{interrogation_sensitivity, optimize_gain, Route};
use wscavity::lattice::{delta_chi, eta_profile, hopping_validity, magic_depths, tunneling, WsLattice};
use wscavity::protocol::{sensitivity_curve_parallel, ProtocolParams, Scenario};
use wscavity::thermal::{thermal_spreads, ThermalConfig};
use wscavity::LatticeConfig;

use crate::config::{RunConfig, Thermal};
use crate::oracle_check;
use crate::output::{Cell, Table};
use crate::CliError;

/// Depth limits accepted by the magic-depth search.
const MAGIC_RANGE: (f64, f64) = (0.5, 20.0);

pub fn magic_depth(cfg: &RunConfig) -> Result<Table, CliError> {
    let lat = cfg.lattice_config()?;
    let lo = cfg.lattice.depth_min.max(MAGIC_RANGE.0);
    let hi = cfg.lattice.depth_max.min(MAGIC_RANGE.1);
    let mut t = Table::new(&["depth_E_R", "bessel_argument", "tunneling_E_R"]);
    if (lat.phase_mismatch() / 2.0).sin().abs() < 1e-12 {
        t.note("no magic depth required: couplings homogeneous");
        return Ok(t);
    }
    if lo > hi {
        t.note("empty depth range");
        return Ok(t);
    }
    for v0 in magic_depths(&lat, lo, hi)? {
        let ws = WsLattice::new(&lat.with_depth(v0))?;
        t.push(vec![v0.into(), ws.bessel_argument().into(), tunneling(v0, 1)?.into()]);
    }
    t.note(format!("searched depths {lo} to {hi} E_R"));
    Ok(t)
}

fn depth_grid(cfg: &RunConfig, quick: bool) -> Vec<f64> {
    let l = &cfg.lattice;
    let step = if quick { l.depth_step * 4.0 } else { l.depth_step };
    let count = ((l.depth_max - l.depth_min) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| l.depth_min + i as f64 * step).collect()
}

fn thermal_config(th: &Thermal, lat: &LatticeConfig, temperature: f64, radial: f64) -> Result<ThermalConfig<f64>, CliError> {
    Ok(ThermalConfig::new(temperature, 0.0, th.lattice_waist, th.cavity_waist, th.color())?
        .with_spectrum(th.spectrum())
        .with_total_radial(lat, radial)?)
}

/// Relative Δχ/χ against depth; the thermal column uses the first
/// temperature and radial frequency of the thermal section.
pub fn delta_chi_sweep(cfg: &RunConfig, quick: bool) -> Result<Table, CliError> {
    let base = cfg.lattice_config()?;
    let cav = cfg.cavity_config()?;
    let sites = 0..i64::from(cfg.lattice.sites);
    let thermal = cfg.thermal.as_ref();
    let mut cols = vec!["depth_E_R", "delta_chi_ideal"];
    if thermal.is_some() {
        cols.push("delta_chi_thermal");
    }
    let mut t = Table::new(&cols);
    let grid = if cfg.lattice.depth_min > cfg.lattice.depth_max { Vec::new() } else { depth_grid(cfg, quick) };
    let rows = grid
        .par_iter()
        .map(|&v0| -> Result<Vec<Cell>, CliError> {
            let lat = base.with_depth(v0);
            let profile = eta_profile(&lat, &cav, sites.clone())?;
            let alpha = steady_alpha(&cav, cav.cavity_detuning)?;
            let tw = twisting_params(&profile, alpha, cav.cavity_detuning, cav.linewidth)?;
            let mut row = vec![v0.into(), (delta_chi(&tw, None)? / tw.chi).into()];
            if let Some(th) = thermal {
                let (temp, radial) = first_point(th)?;
                let spreads = thermal_spreads(&lat, &thermal_config(th, &lat, temp, radial)?)?;
                row.push((delta_chi(&tw, Some(spreads.interaction))? / tw.chi).into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.into_iter().for_each(|r| t.push(r));
    t.note(format!("Δχ/χ over {} sites", cfg.lattice.sites));
    Ok(t)
}

fn first_point(th: &Thermal) -> Result<(f64, f64), CliError> {
    match (th.temperatures.first(), th.radial_frequencies.first()) {
        (Some(&a), Some(&b)) => Ok((a, b)),
        _ => Err(CliError::Config("thermal section needs at least one temperature and radial frequency".into())),
    }
}

pub fn gain(cfg: &RunConfig) -> Result<Table, CliError> {
    let e = &cfg.echo;
    let mut t = Table::new(&[
        "route",
        "atoms",
        "cooperativity",
        "flip_probability",
        "xi2",
        "xi2_dB",
        "chi_t0",
        "d",
        "analytic_xi2",
        "analytic_chi_t0",
        "analytic_d",
    ]);
    for (name, route) in [("exact", Route::Exact), ("approximate", Route::Approximate)] {
        let g = optimize_gain(e.atoms, e.cooperativity, e.flip_probability, e.dephasing_ratio, route)?;
        t.push(vec![
            name.into(),
            e.atoms.into(),
            e.cooperativity.into(),
            e.flip_probability.into(),
            g.xi2.into(),
            (-10.0 * g.xi2.log10()).into(),
            g.chi_t0.into(),
            g.d.into(),
            g.analytic_xi2.into(),
            g.analytic_chi_t0.into(),
            g.analytic_d.into(),
        ]);
    }
    t.note(if e.flip_probability > 0.0 {
        format!("d fixed at {}", e.dephasing_ratio.unwrap_or(wscavity::echo::DEFAULT_FLIP_BRANCH_RATIO))
    } else {
        e.dephasing_ratio.map_or("d optimised".to_string(), |d| format!("d fixed at {d}"))
    });
    Ok(t)
}

fn protocol_params(cfg: &RunConfig, lat: &LatticeConfig) -> Result<ProtocolParams, CliError> {
    let p = &cfg.protocol;
    let mut params = ProtocolParams::new(lat, p.transfer_sites, p.pulse_pairs, p.interrogation)?;
    params.averaging = p.averaging;
    params.interrogation_dephasing = p.interrogation_dephasing;
    params.validate()?;
    Ok(params)
}

fn atom_grid(cfg: &RunConfig, quick: bool) -> Vec<usize> {
    let e = &cfg.echo;
    let per = if quick { e.points_per_decade.min(3) } else { e.points_per_decade } as f64;
    let (lo, hi) = ((e.atoms_min as f64).log10(), (e.atoms_max as f64).log10());
    let steps = ((hi - lo) * per + 1e-9).floor() as usize;
    let mut grid: Vec<usize> = (0..=steps)
        .map(|k| 10f64.powf(lo + k as f64 / per).round() as usize)
        .collect();
    grid.dedup();
    grid
}

pub fn sensitivity(cfg: &RunConfig, quick: bool, threads: usize) -> Result<Table, CliError> {
    let lat = cfg.lattice_config()?;
    let params = protocol_params(cfg, &lat)?;
    let grid = atom_grid(cfg, quick);
    let route = cfg.route();
    let c = cfg.echo.cooperativity;
    let curves = Scenario::ALL
        .iter()
        .map(|&s| sensitivity_curve_parallel(&grid, s, c, route, &params, &lat, threads))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&[
        "atoms",
        "dg_over_g_ideal",
        "dg_over_g_pf_half",
        "dg_over_g_pf_zero",
        "xi2_ideal",
        "xi2_pf_half",
        "xi2_pf_zero",
    ]);
    for (i, &n) in grid.iter().enumerate() {
        let mut row: Vec<Cell> = vec![n.into()];
        row.extend(curves.iter().map(|c| Cell::from(c[i].sensitivity)));
        row.extend(curves.iter().map(|c| Cell::from(c[i].xi2)));
        t.push(row);
    }
    t.note(format!("C' = {c}, tau = {} s, T = {} s", params.interrogation, params.averaging));
    for s in Scenario::ALL {
        t.note(format!("{}: d {}", s.label(), s.dephasing_rule()));
    }
    Ok(t)
}

pub fn thermal(cfg: &RunConfig, quick: bool) -> Result<Table, CliError> {
    let lat = cfg.lattice_config()?;
    let th = cfg.thermal.clone().unwrap_or_else(Thermal::figure_defaults);
    let (temps, radials) = if quick {
        (
            th.temperatures.iter().take(2).copied().collect::<Vec<_>>(),
            th.radial_frequencies.iter().rev().take(2).rev().copied().collect::<Vec<_>>(),
        )
    } else {
        (th.temperatures.clone(), th.radial_frequencies.clone())
    };
    let points: Vec<(f64, f64)> = temps.iter().flat_map(|&a| radials.iter().map(move |&b| (a, b))).collect();
    let rows = points
        .par_iter()
        .map(|&(temp, radial)| -> Result<Vec<Cell>, CliError> {
            let s = thermal_spreads(&lat, &thermal_config(&th, &lat, temp, radial)?)?;
            Ok(vec![
                (temp * 1e6).into(),
                (radial / std::f64::consts::TAU / 1e3).into(),
                s.cutoff.into(),
                s.tunneling.into(),
                s.stark_shift.into(),
                s.interaction.into(),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&["temperature_uK", "radial_kHz", "cutoff", "sigma_J", "sigma_eta", "sigma_chi"]);
    rows.into_iter().for_each(|r| t.push(r));
    t.note(format!("depth {} E_R, waists {} m / {} m", cfg.lattice.depth, th.lattice_waist, th.cavity_waist));
    Ok(t)
}

pub fn validity(cfg: &RunConfig) -> Result<Table, CliError> {
    let lat = cfg.lattice_config()?;
    let cav = cfg.cavity_config()?;
    let r = hopping_validity(&lat, cfg.lattice.stark_shift_ratio)?;
    let mut t = Table::new(&["quantity", "value", "required", "satisfied"]);
    let info = |name: &str, v: f64| vec![name.into(), v.into(), Cell::Empty, Cell::Empty];
    t.push(info("tunneling_ratio_J2_over_J1", r.tunneling_ratio));
    t.push(info("hopping_probability_P1", r.hopping_probability));
    t.push(info("hopping_probability_estimate", r.hopping_probability_estimate));
    t.push(info("hopping_ratio", r.hopping_ratio));
    t.push(info("stark_shift_ratio", r.stark_shift_ratio));
    let alpha = steady_alpha(&cav, cav.cavity_detuning)?;
    for c in regime_check(&cav, &lat, alpha, cav.cavity_detuning, cfg.echo.atoms, DEFAULT_DOMINANCE)? {
        t.push(vec![c.inequality.into(), c.margin.into(), c.required.into(), c.satisfied.into()]);
    }
    t.note(format!("depth {} E_R", cfg.lattice.depth));
    Ok(t)
}

pub fn interrogation(cfg: &RunConfig, quick: bool) -> Result<Table, CliError> {
    let lat = cfg.lattice_config()?;
    let params = protocol_params(cfg, &lat)?;
    let p = &cfg.protocol;
    let omega_g = params.gravity_frequency(&lat);
    if !(omega_g > 0.0) {
        return Err(CliError::Config("protocol.pulse_pairs must be at least 1 for an interrogation sweep".into()));
    }
    let xi2 = 10f64.powf(-p.squeezing_db / 10.0);
    let points = if quick { p.tau_points.min(11) } else { p.tau_points };
    let taus: Vec<f64> = if points == 1 {
        vec![p.tau_min]
    } else {
        let ratio = (p.tau_max / p.tau_min).ln();
        (0..points)
            .map(|k| p.tau_min * (ratio * k as f64 / (points - 1) as f64).exp())
            .collect()
    };
    let mut t = Table::new(&["tau_s", "dg_over_g_coherent", "dg_over_g_squeezed"]);
    for tau in taus {
        let s = interrogation_sensitivity(cfg.echo.atoms, xi2, p.interrogation_dephasing, tau, p.averaging, omega_g)?;
        t.push(vec![tau.into(), s.coherent.into(), s.squeezed.into()]);
    }
    t.note(format!(
        "N = {}, input xi2 = {xi2}, dephasing {} 1/s, T = {} s",
        cfg.echo.atoms, p.interrogation_dephasing, p.averaging
    ));
    Ok(t)
}

pub fn oracle_check(cfg: &RunConfig, quick: bool) -> Result<Table, CliError> {
    let draws = if quick { 10 } else { 50 };
    let results = oracle_check::run(cfg.seed, draws, quick)?;
    let t = oracle_check::table(&results);
    for r in results.iter().filter(|r| !r.passed()) {
        eprintln!("warning: {:?} exceeds the oracle tolerance", r.family);
    }
    Ok(t)
}
