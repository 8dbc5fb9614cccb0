//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p wscavity-cli --test acceptance -- --nocapture --test-threads=1`.

#[path = "../../wscavity/tests/common/mod.rs"]
mod common;

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wscavity::cavity::DecoherenceRates;
use wscavity::constants::{RB87, YB171};
use wscavity::echo::{
    dephasing_gain, dephasing_noise, ideal_optimum, inhomogeneous_gain, interrogation_sensitivity, optimize_gain,
    spont_gain, spont_noise, GainRoute, Route,
};
use wscavity::lattice::{hopping_validity, magic_depths, tunneling, WsLattice};
use wscavity::numerics::band_energy;
use wscavity::oracle::{
    dicke_echo_probe, lindblad_echo_probe, lindblad_full, pure_inhomogeneous_slope, ws_hopping_squeezing, DickeState,
    HoppingModel, Pulse, Statistics,
};
use wscavity::protocol::{log_log_slope, sensitivity, sensitivity_curve, ProtocolParams, Scenario};
use wscavity::thermal::{thermal_spreads, LatticeColor, ThermalConfig};
use wscavity::LatticeConfig;

use common::{bessel_j1_series, real_space_band_energy, real_space_tunneling, rel, report};

fn rb(depth: f64) -> LatticeConfig {
    LatticeConfig::preset(&RB87, depth)
}

fn rb_magic_near_six() -> f64 {
    magic_depths(&rb(6.0), 5.0, 7.0).unwrap()[0]
}

#[test]
fn magic_depths_for_both_species() {
    let start = Instant::now();
    let rb_roots = magic_depths(&rb(6.0), 1.0, 10.0).unwrap();
    let yb_roots = magic_depths(&LatticeConfig::preset(&YB171, 3.0), 1.0, 10.0).unwrap();
    let elapsed = start.elapsed();
    let near = |roots: &[f64], target: f64| roots.iter().any(|r| (r - target).abs() <= 0.15);
    let ok = near(&rb_roots, 2.9) && near(&rb_roots, 6.0) && near(&yb_roots, 3.2) && elapsed < Duration::from_secs(5);
    assert!(report(
        1,
        "magic depths",
        ok,
        &format!("rb87 {rb_roots:.4?}, yb171 {yb_roots:.4?}, {elapsed:.2?}")
    ));
}

#[test]
fn tunneling_ratios() {
    let start = Instant::now();
    let lib = |v0: f64| (tunneling(v0, 2).unwrap() / tunneling(v0, 1).unwrap()).abs();
    let (r6, r29) = (lib(6.0), lib(2.9));
    let elapsed = start.elapsed();
    let indep = |v0: f64| real_space_tunneling(v0, 2, 64, 41) / real_space_tunneling(v0, 1, 64, 41);
    let (s6, s29) = (indep(6.0), indep(2.9));
    let ok = (r6 - 0.038).abs() <= 0.002
        && (r29 - 0.105).abs() <= 0.005
        && (s6 - 0.038).abs() <= 0.002
        && (s29 - 0.105).abs() <= 0.005
        && elapsed < Duration::from_secs(1);
    assert!(report(
        2,
        "tunneling ratios",
        ok,
        &format!("6.0: {r6:.5} (real space {s6:.5}), 2.9: {r29:.5} (real space {s29:.5}), {elapsed:.2?}")
    ));
}

#[test]
fn hopping_validity_at_magic_depth() {
    let cfg = rb(rb_magic_near_six());
    let r = hopping_validity(&cfg, 0.2).unwrap();
    // Independent average of J₁(4h|sin θ/2|)² over one Bloch period.
    let lat = WsLattice::new(&cfg).unwrap();
    let x = (4.0 * lat.tunneling / lat.stark_ratio) * (lat.phase / 2.0).sin().abs();
    let h = 0.1 * lat.contrast * bessel_j1_series(x).abs();
    let m = 4096;
    let mean = (0..m)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k as f64 + 0.5) / m as f64;
            bessel_j1_series(4.0 * h * (theta / 2.0).sin().abs()).powi(2)
        })
        .sum::<f64>()
        / m as f64;
    let ok = (r.hopping_probability - 0.005).abs() <= 0.002 && rel(mean, r.hopping_probability) < 1e-6;
    assert!(report(
        3,
        "hopping probability",
        ok,
        &format!(
            "depth {:.4}: P1 = {:.4}% (independent {:.4}%)",
            cfg.depth,
            100.0 * r.hopping_probability,
            100.0 * mean
        )
    ));
}

const DRAWS: usize = 50;
const ORACLE_TOL: f64 = 1e-5;

/// Largest relative deviation over the draws, for one family.
fn oracle_family(seed: u64, max_atoms: usize, eval: impl Fn(usize, f64, f64, f64, &mut ChaCha8Rng) -> f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..DRAWS)
        .map(|i| {
            let atoms = if i == 0 { max_atoms } else { rng.gen_range(2..=max_atoms) };
            let chi_t0 = rng.gen_range(0.01..=0.3);
            let a = rng.gen_range(0.0..=0.1);
            let b = rng.gen_range(0.0..=0.1);
            eval(atoms, chi_t0, a, b, &mut rng)
        })
        .fold(0.0, f64::max)
}

#[test]
fn closed_forms_match_simulators() {
    let start = Instant::now();
    // Time unit 1/χ.
    let dephasing = oracle_family(11, 40, |n, t0, a, _, _| {
        let gz = a / t0;
        let probe = dicke_echo_probe(n, 1.0, gz, t0).unwrap();
        let noise = dephasing_noise(n, gz, t0, Route::Exact).unwrap();
        let gain = dephasing_gain(n, 1.0, gz, t0).unwrap();
        rel(noise, probe.variance_y).max(rel(gain, probe.slope))
    });
    let spontaneous = oracle_family(12, 6, |n, t0, a, b, _| {
        let rates = DecoherenceRates::balanced(a / t0, b / t0).unwrap();
        let chi = DMatrix::from_element(n, n, 1.0);
        let probe = lindblad_echo_probe(n, &chi, &rates, 0.0, t0).unwrap();
        let noise = spont_noise(n, 1.0, &rates, t0, Route::Exact).unwrap();
        let gain = spont_gain(n, 1.0, &rates, t0, GainRoute::Exact).unwrap();
        rel(noise, probe.variance_y).max(rel(gain, probe.slope))
    });
    let inhomogeneous = oracle_family(13, 14, |n, t0, _, _, rng| {
        let mut chi = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..=j {
                let v = t0 * rng.gen_range(0.5..=1.0);
                chi[(j, k)] = v;
                chi[(k, j)] = v;
            }
        }
        rel(inhomogeneous_gain(&chi, 1.0).unwrap(), pure_inhomogeneous_slope(&chi, 1.0).unwrap())
    });
    let elapsed = start.elapsed();
    let ok = dephasing <= ORACLE_TOL
        && spontaneous <= ORACLE_TOL
        && inhomogeneous <= ORACLE_TOL
        && elapsed < Duration::from_secs(600);
    assert!(report(
        4,
        "oracle equivalence",
        ok,
        &format!(
            "{DRAWS} draws each: dicke {dephasing:.2e}, lindblad {spontaneous:.2e}, state vector {inhomogeneous:.2e}, {elapsed:.2?}"
        )
    ));
}

#[test]
fn optimal_gain_formulas() {
    let mut worst = [(0.0f64, String::new()), (0.0f64, String::new())];
    for (r, route) in [Route::Exact, Route::Approximate].into_iter().enumerate() {
        for n in [1_000usize, 10_000, 100_000] {
            for c in [1.0, 2.0, 10.0] {
                for flip in [0.5, 0.0] {
                    let g = optimize_gain(n, c, flip, None, route).unwrap();
                    let formula = if flip > 0.0 {
                        (64.0 * flip / (3.0 * n as f64 * c)).sqrt()
                    } else {
                        (1.0 + 3.0 * (6.0 / c).cbrt()) / n as f64
                    };
                    let dev = rel(g.xi2, formula);
                    if dev > worst[r].0 {
                        worst[r] = (dev, format!("N={n} C'={c} P_f={flip}"));
                    }
                }
            }
        }
    }
    let n = 10_000usize;
    let ideal = ideal_optimum::<f64>(n).unwrap().value * n as f64;
    let ideal_dev = rel(ideal, std::f64::consts::E);
    // The formulas are the optima of the leading-order expressions; the exact
    // route is reported alongside.
    let ok = worst[1].0 <= 0.10 && ideal_dev <= 0.03;
    assert!(report(
        5,
        "optimal gain formulas",
        ok,
        &format!(
            "max deviation exact {:.3} ({}), approximate {:.3} ({}); N*xi2 ideal = {ideal:.4}",
            worst[0].0, worst[0].1, worst[1].0, worst[1].1
        )
    ));
}

#[test]
fn headline_sensitivity() {
    let lat = rb(6.0);
    let params = ProtocolParams::new(&lat, 5, 2, 1.0).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for route in [Route::Exact, Route::Approximate] {
        let xi2 = optimize_gain(50_000, 2.0, 0.5, None, route).unwrap().xi2;
        let s = sensitivity(50_000, xi2, &params, &lat).unwrap();
        let db = -10.0 * xi2.log10();
        ok &= rel(s, 6e-9) <= 0.30 && (db - 20.0).abs() <= 1.0;
        detail.push(format!("{route:?}: dg/g = {s:.3e}/sqrt(Hz), {db:.2} dB"));
    }
    assert!(report(6, "headline sensitivity", ok, &detail.join("; ")));
}

#[test]
fn sensitivity_scaling_laws() {
    let lat = rb(6.0);
    let params = ProtocolParams::new(&lat, 5, 2, 1.0).unwrap();
    let grid: Vec<usize> = (0..=30).map(|k| 10f64.powf(3.0 + k as f64 / 10.0).round() as usize).collect();
    let x: Vec<f64> = grid.iter().map(|&n| n as f64).collect();
    let slope = |scenario: Scenario, route: Route, from: usize| {
        let c = sensitivity_curve(&grid, scenario, 2.0, route, &params, &lat).unwrap();
        let y: Vec<f64> = c.iter().map(|p| p.sensitivity).collect();
        log_log_slope(&x[from..], &y[from..]).unwrap()
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for route in [Route::Exact, Route::Approximate] {
        let ideal = slope(Scenario::Ideal, route, 0);
        let half = slope(Scenario::FlipHalf, route, 0);
        // Asymptotic: the last decade.
        let zero = slope(Scenario::NoFlip, route, 20);
        ok &= (ideal + 1.0).abs() <= 0.02 && (half + 0.75).abs() <= 0.02 && (zero + 1.0).abs() <= 0.03;
        detail.push(format!("{route:?}: {ideal:.4}, {half:.4}, {zero:.4}"));
    }
    assert!(report(7, "scaling laws", ok, &detail.join("; ")));
}

#[test]
fn thermal_trends() {
    let lat = rb(6.0);
    let temps = [0.1e-6, 1e-6, 10e-6];
    let radials: Vec<f64> = [0.5e3, 1e3, 2e3, 4e3, 10e3].iter().map(|f| std::f64::consts::TAU * f).collect();
    let spreads: Vec<Vec<[f64; 3]>> = temps
        .iter()
        .map(|&t| {
            radials
                .iter()
                .map(|&w| {
                    let th = ThermalConfig::new(t, 0.0, 50e-6, 50e-6, LatticeColor::Red)
                        .unwrap()
                        .with_total_radial(&lat, w)
                        .unwrap();
                    let s = thermal_spreads(&lat, &th).unwrap();
                    [s.tunneling, s.stark_shift, s.interaction]
                })
                .collect()
        })
        .collect();
    let mut violations = 0;
    for q in 0..3 {
        for i in 0..temps.len() {
            for j in 0..radials.len() {
                if j + 1 < radials.len() && !(spreads[i][j + 1][q] < spreads[i][j][q]) {
                    violations += 1;
                }
                if i + 1 < temps.len() && !(spreads[i + 1][j][q] > spreads[i][j][q]) {
                    violations += 1;
                }
            }
        }
    }
    let at = |i: usize, j: usize| spreads[i][j];
    assert!(report(
        8,
        "thermal trends",
        violations == 0,
        &format!(
            "{violations} monotonicity violations; 1 uK, 1 kHz: {:.4e} {:.4e} {:.4e}",
            at(1, 1)[0],
            at(1, 1)[1],
            at(1, 1)[2]
        )
    ));
}

#[test]
fn hopping_corrections_below_dephasing() {
    let cfg = rb(rb_magic_near_six());
    let model = HoppingModel::from_lattice(&cfg, 0.2, 2e-3).unwrap();
    let times: Vec<f64> = (0..=60).map(|i| i as f64 * 0.01 / model.chi).collect();
    let mut ok = true;
    let mut detail = Vec::new();
    for stats in [Statistics::HardcoreModes, Statistics::Bosons] {
        let traj = ws_hopping_squeezing(4, &model, stats, 0.1, &times).unwrap();
        let (corr, deph) = traj.max_deviations();
        ok &= traj.window_end() > 1 && corr < deph;
        detail.push(format!("{stats:?}: hopping {corr:.3e} vs dephasing {deph:.3e}"));
    }
    assert!(report(9, "hopping corrections", ok, &detail.join("; ")));
}

#[test]
fn interrogation_trade_off() {
    let xi2 = 10f64.powf(-2.0);
    let gamma = 1.0 / 100.0;
    let lat = rb(6.0);
    let omega_g = ProtocolParams::new(&lat, 5, 2, 1.0).unwrap().gravity_frequency(&lat);
    let en = interrogation_sensitivity(50_000, xi2, gamma, 1.0, 1.0, omega_g).unwrap().squeezed;
    let un = interrogation_sensitivity(50_000, xi2, gamma, 10.0, 1.0, omega_g).unwrap().coherent;
    // Averaging time to reach a fixed Δg/g scales as the square.
    let factor = (un / en).powi(2);
    let closed = (0.1f64.exp() / 10.0) / (0.01f64.exp_m1() + xi2);
    let ok = (factor - 10.0).abs() <= 2.0 && rel(factor, closed) < 1e-12;
    assert!(report(
        10,
        "interrogation trade-off",
        ok,
        &format!("averaging-time factor {factor:.3} (closed form {closed:.3})")
    ));
}

#[test]
fn numerical_hygiene() {
    let mut overlap = 0.0f64;
    for v0 in [2.9, 6.0] {
        let lat = WsLattice::new(&rb(v0)).unwrap();
        for n in 0..3 {
            for m in n..n + 3 {
                overlap = overlap.max((lat.overlap(n, m).unwrap() - lat.overlap_quadrature(n, m).unwrap()).abs());
            }
        }
    }
    let mut band = 0.0f64;
    for v0 in [0.5, 2.9, 6.0, 10.0] {
        for q in [0.0, 0.3, 0.75, 1.0] {
            band = band.max((band_energy(q, v0).unwrap() - real_space_band_energy(q, v0, 41)).abs());
        }
    }
    let invariants = density_matrix_invariants();
    let ok = overlap < 1e-3 && band < 1e-8 && invariants.is_ok();
    assert!(report(
        11,
        "numerical hygiene",
        ok,
        &format!("overlap residual {overlap:.3e}, band residual {band:.3e}, density matrices {invariants:?}")
    ));
}

/// Twist, rotate and untwist under every dissipator; the Lindblad integrator
/// also checks after each accepted step.
fn density_matrix_invariants() -> wscavity::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..6 {
        let n = rng.gen_range(2..=6);
        let t = rng.gen_range(0.05..0.3);
        let rates = DecoherenceRates::new(rng.gen_range(0.0..0.3), rng.gen_range(0.0..0.3), rng.gen_range(0.0..0.3))?;
        let chi = DMatrix::from_fn(n, n, |j, k| 1.0 + 0.1 * ((j + k) % 3) as f64);
        let seq = [
            Pulse::Evolve { sign: 1.0, duration: t },
            Pulse::RotateY(0.2),
            Pulse::RotateX(0.1),
            Pulse::Evolve { sign: -1.0, duration: t },
        ];
        lindblad_full(n, &chi, &rates, rng.gen_range(0.0..0.3), &seq)?.check(1e-9)?;
        let mut d = DickeState::<f64>::coherent_x(5 * n)?;
        d.evolve(1.0, rng.gen_range(0.0..0.5), t);
        d.rotate_y(0.3)?;
        d.evolve(-1.0, 0.1, t);
        d.check(1e-9)?;
    }
    Ok(())
}

/// Stated validity region of the leading-order noise: relative error below
/// 10% whenever γ_r t₀ ≤ 0.05 and (Nχ)²γ_r t₀³ ≤ 0.5.
#[test]
fn spontaneous_noise_approximation_region() {
    let mut worst = (0.0f64, String::new());
    for n in [100usize, 1000, 10_000] {
        for i in 1..=10 {
            let gt = 0.005 * i as f64;
            for j in 1..=10 {
                let t0 = 0.3 * j as f64 / n as f64;
                let gamma_r = gt / t0;
                if (n as f64).powi(2) * gamma_r * t0.powi(3) > 0.5 {
                    continue;
                }
                let rates = DecoherenceRates::balanced(gamma_r, 0.0).unwrap();
                let exact = spont_noise(n, 1.0, &rates, t0, Route::Exact).unwrap();
                let approx = spont_noise(n, 1.0, &rates, t0, Route::Approximate).unwrap();
                let dev = rel(approx, exact);
                if dev > worst.0 {
                    worst = (dev, format!("N={n}, gamma_r t0={gt:.3}, chi t0={:.2e}", t0));
                }
            }
        }
    }
    println!("spontaneous noise approximation: max relative error {:.3} at {}", worst.0, worst.1);
    assert!(worst.0 < 0.1);
}
