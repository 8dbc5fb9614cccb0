mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use wscavity::cavity::DecoherenceRates;
use wscavity::echo::{dephasing_gain, dephasing_noise, inhomogeneous_gain, spont_gain, spont_noise, GainRoute, Route};
use wscavity::lattice::tunneling;
use wscavity::numerics::band_energy;
use wscavity::oracle::{dicke_echo_probe, lindblad_echo_probe, pure_inhomogeneous_slope};

use common::{real_space_band_energy, real_space_tunneling, rel};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn band_matches_real_space(q in -1.0f64..1.0, v0 in 0.0f64..12.0) {
        let a = band_energy(q, v0).unwrap();
        let b = real_space_band_energy(q, v0, 41);
        prop_assert!((a - b).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn band_is_even_and_rises_to_the_zone_edge(q in 0.0f64..0.95, v0 in 0.5f64..10.0) {
        let e = band_energy(q, v0).unwrap();
        prop_assert!((band_energy(-q, v0).unwrap() - e).abs() < 1e-10);
        prop_assert!(band_energy(q + 0.05, v0).unwrap() > e);
    }

    #[test]
    fn dephasing_echo_matches_dicke(n in 2usize..=24, chi_t0 in 0.01f64..0.3, rate in 0.0f64..0.1) {
        let gz = rate / chi_t0;
        let probe = dicke_echo_probe(n, 1.0, gz, chi_t0).unwrap();
        prop_assert!(rel(dephasing_noise(n, gz, chi_t0, Route::Exact).unwrap(), probe.variance_y) < 1e-5);
        prop_assert!(rel(dephasing_gain(n, 1.0, gz, chi_t0).unwrap(), probe.slope) < 1e-5);
    }

    #[test]
    fn inhomogeneous_gain_matches_state_vector(n in 2usize..=8, chi_t0 in 0.01f64..0.3, seed in 0u64..1000) {
        let chi = DMatrix::from_fn(n, n, |j, k| {
            let (a, b) = (j.min(k) as u64, j.max(k) as u64);
            let h = (seed * 31 + a * 7 + b * 13) % 97;
            chi_t0 * (0.5 + h as f64 / 194.0)
        });
        prop_assert!(rel(inhomogeneous_gain(&chi, 1.0).unwrap(), pure_inhomogeneous_slope(&chi, 1.0).unwrap()) < 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn spontaneous_echo_matches_lindblad(n in 2usize..=4, chi_t0 in 0.01f64..0.3, a in 0.0f64..0.1, b in 0.0f64..0.1) {
        let rates = DecoherenceRates::balanced(a / chi_t0, b / chi_t0).unwrap();
        let chi = DMatrix::from_element(n, n, 1.0);
        let probe = lindblad_echo_probe(n, &chi, &rates, 0.0, chi_t0).unwrap();
        prop_assert!(rel(spont_noise(n, 1.0, &rates, chi_t0, Route::Exact).unwrap(), probe.variance_y) < 1e-5);
        prop_assert!(rel(spont_gain(n, 1.0, &rates, chi_t0, GainRoute::Exact).unwrap(), probe.slope) < 1e-5);
    }

    #[test]
    fn tunneling_matches_real_space_band(v0 in 1.0f64..10.0) {
        let lib = tunneling(v0, 1).unwrap().abs();
        prop_assert!(rel(lib, real_space_tunneling(v0, 1, 48, 31)) < 1e-8);
    }
}
