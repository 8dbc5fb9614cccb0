use std::ops::Range;

use super::{contrast, tunneling, LatticeConfig, WannierFunction};
use crate::cavity::{CavityConfig, TwistingParams};
use crate::numerics::{bessel_j, bessel_j_range, bracketed_roots, trapezoid, NeumaierSum};
use crate::{Error, Real, Result};

/// Largest supported |m − n| in the coefficient table.
const MAX_TAIL: usize = 200;
/// Tail used by the overlap quadrature, in sites beyond the Wannier support.
const QUADRATURE_WANNIER_HALF_WIDTH: usize = 16;
const QUADRATURE_POINTS_PER_SITE: usize = 64;

/// Wannier-Stark orbital φ_n(z) = Σ_m J_{m−n}(s) w(z − m).
#[derive(Debug, Clone, PartialEq)]
pub struct WannierStarkState<T> {
    center: i64,
    spread: T,
    /// J_k(s) for k = −tail..=tail.
    amplitudes: Vec<T>,
}

impl<T: Real> WannierStarkState<T> {
    /// `spread` is s = 2J₀/Mga_l. The table keeps |m − n| ≤ max(40, 8s).
    pub fn new(center: i64, spread: T) -> Result<Self> {
        if !(spread >= T::zero()) || !spread.is_finite() {
            return Err(Error::domain("spread parameter must be finite and non-negative"));
        }
        let wanted = (T::lit(8.0) * spread).ceil().lossy_f64() as usize;
        let tail = wanted.max(40);
        if tail > MAX_TAIL {
            return Err(Error::domain(format!(
                "spread parameter {spread} needs more than {MAX_TAIL} sites"
            )));
        }
        let right = bessel_j_range(tail, spread)?;
        let mut amplitudes = Vec::with_capacity(2 * tail + 1);
        for k in (1..=tail).rev() {
            let sign = if k % 2 == 1 { -T::one() } else { T::one() };
            amplitudes.push(sign * right[k]);
        }
        amplitudes.extend_from_slice(&right);
        Ok(Self {
            center,
            spread,
            amplitudes,
        })
    }

    pub fn center(&self) -> i64 {
        self.center
    }

    pub fn spread(&self) -> T {
        self.spread
    }

    pub fn tail(&self) -> i64 {
        (self.amplitudes.len() / 2) as i64
    }

    /// Amplitude on site m; zero outside the table.
    pub fn coefficient(&self, site: i64) -> T {
        let k = site - self.center + self.tail();
        if k < 0 || k as usize >= self.amplitudes.len() {
            T::zero()
        } else {
            self.amplitudes[k as usize]
        }
    }

    /// Occupied sites as (site, amplitude).
    pub fn coefficients(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        let first = self.center - self.tail();
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(i, &c)| (first + i as i64, c))
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .map(|c| *c * *c)
            .collect::<NeumaierSum<T>>()
            .total()
    }
}

/// Site-independent lattice quantities at one depth.
#[derive(Debug, Clone)]
pub struct WsLattice<T> {
    pub depth: T,
    /// Nearest-neighbour tunnelling J₀/E_R.
    pub tunneling: T,
    pub stark_ratio: T,
    pub phase: T,
    pub contrast: T,
}

impl<T: Real> WsLattice<T> {
    pub fn new(cfg: &LatticeConfig<T>) -> Result<Self> {
        Ok(Self {
            depth: cfg.depth,
            tunneling: tunneling(cfg.depth, 1)?,
            stark_ratio: cfg.stark_ratio(),
            phase: cfg.phase_mismatch(),
            contrast: contrast(cfg.depth, cfg.cavity_wavenumber_per_site())?,
        })
    }

    /// s = 2J₀/Mga_l.
    pub fn spread(&self) -> T {
        T::lit(2.0) * self.tunneling / self.stark_ratio
    }

    /// (4J₀/Mga_l)·sin(φ/2).
    pub fn bessel_argument(&self) -> T {
        bessel_argument(self.tunneling, self.stark_ratio, self.phase)
    }

    pub fn bessel_factor(&self) -> Result<T> {
        bessel_j(0, self.bessel_argument())
    }

    pub fn state(&self, center: i64) -> Result<WannierStarkState<T>> {
        WannierStarkState::new(center, self.spread())
    }

    /// ½[δ_nm + 𝒞 J_{n−m}(X) cos((n+m)φ/2 + (n−m)π/2)].
    pub fn overlap(&self, n: i64, m: i64) -> Result<T> {
        let diff = n - m;
        let bj = bessel_j(diff as i32, self.bessel_argument())?;
        let angle = T::int(n + m) * self.phase / T::lit(2.0) + T::int(diff) * T::FRAC_PI_2();
        let delta = if diff == 0 { T::one() } else { T::zero() };
        Ok((delta + self.contrast * bj * angle.cos()) / T::lit(2.0))
    }

    /// ∫ cos²(k_c z) φ_n φ_m dz on a site-aligned trapezoid grid with the WS
    /// orbitals summed explicitly over sites.
    pub fn overlap_quadrature(&self, n: i64, m: i64) -> Result<T> {
        let wf = WannierFunction::new(self.depth)?;
        self.overlap_quadrature_with(&wf, n, m)
    }

    pub fn overlap_quadrature_with(&self, wf: &WannierFunction<T>, n: i64, m: i64) -> Result<T> {
        let p = QUADRATURE_POINTS_PER_SITE as i64;
        let half = QUADRATURE_WANNIER_HALF_WIDTH as i64;
        let w = wf.sample(QUADRATURE_WANNIER_HALF_WIDTH, QUADRATURE_POINTS_PER_SITE);
        let sn = self.state(n)?;
        let sm = self.state(m)?;
        let lo = n.min(m) - sn.tail() - half;
        let hi = n.max(m) + sn.tail() + half;
        let orbital = |st: &WannierStarkState<T>, i: i64| {
            // z = i/p; sites j with |z − j| ≤ half contribute.
            let zsite = i.div_euclid(p);
            let mut acc = NeumaierSum::new();
            for j in (zsite - half)..=(zsite + half + 1) {
                let offset = i - j * p;
                if offset.abs() > half * p {
                    continue;
                }
                let c = st.coefficient(j);
                if c != T::zero() {
                    acc.add(c * w[(offset + half * p) as usize]);
                }
            }
            acc.total()
        };
        let h = T::one() / T::count(p as usize);
        let kc = self.phase / T::lit(2.0);
        let samples: Vec<T> = (lo * p..=hi * p)
            .map(|i| {
                let z = T::int(i) * h;
                let c = (kc * z).cos();
                c * c * orbital(&sn, i) * orbital(&sm, i)
            })
            .collect();
        Ok(trapezoid(&samples, h))
    }
}

fn bessel_argument<T: Real>(tunneling: T, stark_ratio: T, phase: T) -> T {
    T::lit(4.0) * tunneling / stark_ratio * (phase / T::lit(2.0)).sin()
}

/// How [`overlap_integral`] evaluates ∫cos²(k_c z)φ_nφ_m dz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapMethod {
    /// Single-site-localised closed form.
    #[default]
    Analytic,
    /// Real-space quadrature over explicitly summed orbitals.
    Quadrature,
}

pub fn overlap_integral<T: Real>(
    n: i64,
    m: i64,
    cfg: &LatticeConfig<T>,
    method: OverlapMethod,
) -> Result<T> {
    if (n - m).abs() > 10 {
        return Err(Error::domain("overlap needs |n − m| ≤ 10"));
    }
    let lat = WsLattice::new(cfg)?;
    match method {
        OverlapMethod::Analytic => lat.overlap(n, m),
        OverlapMethod::Quadrature => lat.overlap_quadrature(n, m),
    }
}

/// Site-resolved dispersive couplings η_n = η[1 + 𝒞J₀(X)cos(nφ)].
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile<T> {
    pub eta_mean: T,
    pub contrast: T,
    pub bessel_argument: T,
    pub phase: T,
    pub first_site: i64,
    pub site_values: Vec<T>,
}

impl<T: Real> CouplingProfile<T> {
    pub fn site(&self, n: i64) -> Option<T> {
        let k = n - self.first_site;
        if k < 0 {
            return None;
        }
        self.site_values.get(k as usize).copied()
    }

    pub fn sites(&self) -> Range<i64> {
        self.first_site..self.first_site + self.site_values.len() as i64
    }

    /// The analytic value at site n, independent of the stored table.
    pub fn formula(&self, n: i64) -> Result<T> {
        let j0 = bessel_j(0, self.bessel_argument)?;
        Ok(self.eta_mean * (T::one() + self.contrast * j0 * (T::int(n) * self.phase).cos()))
    }
}

pub fn eta_profile<T: Real>(
    cfg: &LatticeConfig<T>,
    cavity: &CavityConfig<T>,
    sites: Range<i64>,
) -> Result<CouplingProfile<T>> {
    let eta = cavity.differential_shift()?;
    let lat = WsLattice::new(cfg)?;
    let mut profile = CouplingProfile {
        eta_mean: eta,
        contrast: lat.contrast,
        bessel_argument: lat.bessel_argument(),
        phase: lat.phase,
        first_site: sites.start,
        site_values: Vec::new(),
    };
    profile.site_values = sites.map(|n| profile.formula(n)).collect::<Result<_>>()?;
    Ok(profile)
}

/// Depths in `[lo, hi]` where J₀((4J₀(v0)/Mga_l)sin(φ/2)) = 0.
pub fn magic_depths<T: Real>(cfg: &LatticeConfig<T>, lo: T, hi: T) -> Result<Vec<T>> {
    if !(lo >= T::lit(0.5) && hi <= T::lit(20.0) && lo <= hi) {
        return Err(Error::domain("depth range must lie within [0.5, 20] E_R"));
    }
    let ratio = cfg.stark_ratio();
    let phase = cfg.phase_mismatch();
    if (phase / T::lit(2.0)).sin().abs() < T::lit(1e3) * T::epsilon() {
        return Ok(Vec::new());
    }
    let step = T::lit(0.1);
    let count = ((hi - lo) / step).ceil().lossy_f64() as usize;
    let grid: Vec<T> = (0..=count)
        .map(|i| (lo + T::count(i) * step).min(hi))
        .collect();
    let xtol = T::lit(4.0) * T::epsilon() * hi;
    bracketed_roots(
        |v0| bessel_j(0, bessel_argument(tunneling(v0, 1)?, ratio, phase)),
        &grid,
        xtol,
    )
}

/// Δχ = (Σ_nm (χ_nm − χ)²/N)^{1/2} over the N×N site matrix. A relative
/// thermal spread σ adds an independent fluctuation σχ_nm to every entry,
/// contributing σ²χ_nm² to each squared deviation.
pub fn delta_chi<T: Real>(twisting: &TwistingParams<T>, thermal_spread: Option<T>) -> Result<T> {
    let m = twisting
        .site_matrix
        .as_ref()
        .ok_or_else(|| Error::domain("site-resolved couplings required"))?;
    let n = m.nrows();
    if n < 2 {
        return Ok(T::zero());
    }
    let sigma2 = thermal_spread.map_or(T::zero(), |s| s * s);
    let mut acc = NeumaierSum::new();
    for v in m.iter() {
        let d = *v - twisting.chi;
        acc.add(d * d + sigma2 * *v * *v);
    }
    Ok((acc.total() / T::count(n)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{steady_alpha, twisting_params};
    use crate::constants::{RB87, YB171};
    use num_complex::Complex;

    fn cavity() -> CavityConfig<f64> {
        CavityConfig::new(2e6, 2e6, 1e9, -1e9, 5e6, 1e5, Complex::new(3e5, 0.0)).unwrap()
    }

    #[test]
    fn ws_coefficients() {
        for &s in &[0.0f64, 0.3, 1.4, 3.3, 5.0] {
            let st = WannierStarkState::new(3, s).unwrap();
            assert!((st.norm_sqr() - 1.0).abs() < 1e-10);
            let next = WannierStarkState::new(4, s).unwrap();
            for m in -50..50 {
                assert_eq!(st.coefficient(m), next.coefficient(m + 1));
            }
            assert!((st.coefficient(1) - bessel_j(-2, s).unwrap()).abs() < 1e-15);
        }
        assert!(WannierStarkState::new(0, -1.0f64).is_err());
        assert!(WannierStarkState::new(0, 30.0f64).is_err());
    }

    #[test]
    fn commensurate_overlap_is_normalisation() {
        // λ_c = λ_l/2 gives φ = 4π, so cos²(k_c z) = 1 on every site centre.
        let mut cfg = LatticeConfig::<f64>::preset(&RB87, 6.0);
        cfg.cavity_wavelength = cfg.lattice_wavelength / 2.0;
        let lat = WsLattice::new(&cfg).unwrap();
        assert!(lat.bessel_argument().abs() < 1e-12);
        assert!(magic_depths(&cfg, 0.5, 20.0).unwrap().is_empty());
        // k_c → 0.
        let mut far = cfg.clone();
        far.cavity_wavelength = 1.0;
        let v = overlap_integral(0, 0, &far, OverlapMethod::Analytic).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn magic_roots() {
        let rb = LatticeConfig::<f64>::preset(&RB87, 6.0);
        let roots = magic_depths(&rb, 0.5, 20.0).unwrap();
        assert!(roots.iter().any(|r| (r - 2.9).abs() < 0.15), "{roots:?}");
        assert!(roots.iter().any(|r| (r - 6.0).abs() < 0.15), "{roots:?}");
        let yb = LatticeConfig::<f64>::preset(&YB171, 3.0);
        let roots = magic_depths(&yb, 0.5, 20.0).unwrap();
        assert!(roots.iter().any(|r| (r - 3.2).abs() < 0.15), "{roots:?}");
        assert!(magic_depths(&yb, 0.1, 3.0).is_err());
    }

    #[test]
    fn magic_profile_is_flat() {
        let rb = LatticeConfig::<f64>::preset(&RB87, 6.0);
        let root = magic_depths(&rb, 5.0, 7.0).unwrap()[0];
        let cfg = rb.with_depth(root);
        let p = eta_profile(&cfg, &cavity(), -20..20).unwrap();
        for v in &p.site_values {
            assert!((v / p.eta_mean - 1.0).abs() < 1e-9);
        }
        let lat = WsLattice::new(&cfg).unwrap();
        let diag: Vec<f64> = (-10..10).map(|n| lat.overlap(n, n).unwrap()).collect();
        let spread = diag.iter().cloned().fold(f64::MIN, f64::max)
            - diag.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-6);
    }

    #[test]
    fn deep_profile_has_full_contrast() {
        let cfg = LatticeConfig::<f64>::preset(&RB87, 6.0);
        let mut p = eta_profile(&cfg, &cavity(), 0..8).unwrap();
        p.bessel_argument = 0.0;
        for n in 0..8 {
            let expect = p.eta_mean * (1.0 + p.contrast * (n as f64 * p.phase).cos());
            assert!((p.formula(n).unwrap() - expect).abs() < 1e-12 * p.eta_mean);
        }
        let mut c = cavity();
        c.detuning_down = 1e9;
        assert_eq!(eta_profile(&cfg, &c, 0..3).unwrap().eta_mean, 0.0);
        c.detuning_up = 0.0;
        assert!(eta_profile(&cfg, &c, 0..3).is_err());
    }

    #[test]
    fn profile_mean_over_beat() {
        // φ/2π = 133/195, so the beat period is 195 sites.
        let cfg = LatticeConfig::<f64>::preset(&RB87, 4.0);
        let p = eta_profile(&cfg, &cavity(), 0..195).unwrap();
        let mean: f64 = p.site_values.iter().sum::<f64>() / 195.0;
        assert!((mean / p.eta_mean - 1.0).abs() < 1e-10);
    }

    #[test]
    fn delta_chi_cases() {
        let rb = LatticeConfig::<f64>::preset(&RB87, 6.0);
        let c = cavity();
        let a = steady_alpha(&c, 5e6).unwrap();
        let root = magic_depths(&rb, 5.0, 7.0).unwrap()[0];
        let magic = eta_profile(&rb.with_depth(root), &c, 0..30).unwrap();
        let t = twisting_params(&magic, a, 5e6, c.linewidth).unwrap();
        assert!(delta_chi(&t, None).unwrap() < 1e-12 * t.chi.abs());
        assert!(delta_chi(&t, Some(0.01)).unwrap() > 0.0);

        let one = eta_profile(&rb, &c, 0..1).unwrap();
        let t1 = twisting_params(&one, a, 5e6, c.linewidth).unwrap();
        assert_eq!(delta_chi(&t1, None).unwrap(), 0.0);

        // Fully inhomogeneous couplings: compare with a direct double sum of
        // (1+c_n)(1+c_m) − 1, c_n = 𝒞cos(nφ).
        let mut deep = eta_profile(&rb, &c, 0..39).unwrap();
        deep.bessel_argument = 0.0;
        deep.site_values = (0..39).map(|n| deep.formula(n).unwrap()).collect();
        let t = twisting_params(&deep, a, 5e6, c.linewidth).unwrap();
        let cn: Vec<f64> = (0..39).map(|n| deep.contrast * (n as f64 * deep.phase).cos()).collect();
        let mut s = 0.0;
        for x in &cn {
            for y in &cn {
                s += ((1.0 + x) * (1.0 + y) - 1.0).powi(2);
            }
        }
        let expect = (s / 39.0).sqrt();
        let got = delta_chi(&t, None).unwrap() / t.chi;
        assert!((got - expect).abs() < 1e-9 * expect);
        // Per-entry rms is of order 𝒞.
        let rms = got / 39f64.sqrt();
        assert!(rms > 0.5 * deep.contrast && rms < 1.5 * deep.contrast);
    }

    #[test]
    fn analytic_overlap_symmetry() {
        let cfg = LatticeConfig::<f64>::preset(&RB87, 6.0);
        let lat = WsLattice::new(&cfg).unwrap();
        for (n, m) in [(0, 1), (2, 5), (-3, 4)] {
            assert!((lat.overlap(n, m).unwrap() - lat.overlap(m, n).unwrap()).abs() < 1e-14);
        }
        assert!(overlap_integral(0, 11, &cfg, OverlapMethod::Analytic).is_err());
    }
}
