use crate::numerics::{ground_band, BandState};
use crate::{Error, Real, Result};

/// Number of quasimomenta in the Brillouin-zone sum; the function is
/// periodic over this many sites.
const DEFAULT_ZONE_POINTS: usize = 64;
/// Half-width (sites) and resolution (points per site) of the real-space
/// quadrature grid used for moments of |w|².
const MOMENT_HALF_WIDTH: usize = 16;
const MOMENT_POINTS_PER_SITE: usize = 64;

/// Ground-band Wannier function centred on site 0.
///
/// w(z) = (1/M) Σ_q Σ_j c_j(q) cos(π(q+2j)z) over a symmetric midpoint grid
/// of M quasimomenta. Every Bloch function is gauged with Σ_j c_j(q) > 0,
/// which makes it real and positive at the site centre; the resulting w is
/// real, even and exponentially localised.
#[derive(Debug, Clone)]
pub struct WannierFunction<T> {
    depth: T,
    states: Vec<BandState<T>>,
}

impl<T: Real> WannierFunction<T> {
    pub fn new(v0: T) -> Result<Self> {
        Self::with_zone_points(v0, DEFAULT_ZONE_POINTS)
    }

    pub fn with_zone_points(v0: T, zone_points: usize) -> Result<Self> {
        if zone_points < 8 {
            return Err(Error::domain("need at least 8 quasimomenta"));
        }
        let m = T::count(zone_points);
        let states = (0..zone_points)
            .map(|k| ground_band(-T::one() + T::count(2 * k + 1) / m, v0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { depth: v0, states })
    }

    pub fn depth(&self) -> T {
        self.depth
    }

    /// w(z), z in lattice spacings.
    pub fn eval(&self, z: T) -> T {
        let l = self.states[0].cutoff as i64;
        // e^{i2πjz} for j = 0..L, shared by every quasimomentum.
        let step = (T::TAU() * z).sin_cos();
        let mut powers = Vec::with_capacity(l as usize + 1);
        let (mut s, mut c) = (T::zero(), T::one());
        for _ in 0..=l {
            powers.push((c, s));
            let nc = c * step.1 - s * step.0;
            let ns = s * step.1 + c * step.0;
            c = nc;
            s = ns;
        }
        let mut total = T::zero();
        for st in &self.states {
            // Σ_j c_j e^{i2πjz}; the real part of e^{iπqz} times this sum.
            let (mut re, mut im) = (T::zero(), T::zero());
            for j in -l..=l {
                let cj = st.coefficient(j);
                let (pc, ps) = powers[j.unsigned_abs() as usize];
                re += cj * pc;
                im += if j < 0 { -cj * ps } else { cj * ps };
            }
            let (qs, qc) = (T::PI() * st.quasimomentum * z).sin_cos();
            total += qc * re - qs * im;
        }
        total / T::count(self.states.len())
    }

    /// Samples on `half_width` sites either side of 0 with `per_site`
    /// points per site (site-aligned, 2·half_width·per_site + 1 points).
    pub fn sample(&self, half_width: usize, per_site: usize) -> Vec<T> {
        let n = (half_width * per_site) as i64;
        (-n..=n)
            .map(|i| self.eval(T::int(i) / T::count(per_site)))
            .collect()
    }

    /// ∫ cos(κz)|w|² dz and ∫ sin(κz)|w|² dz by the trapezoid rule.
    pub fn fourier_moment(&self, kappa: T) -> (T, T) {
        let per_site = MOMENT_POINTS_PER_SITE;
        let samples = self.sample(MOMENT_HALF_WIDTH, per_site);
        let h = T::one() / T::count(per_site);
        let n = (MOMENT_HALF_WIDTH * per_site) as i64;
        let (mut c, mut s) = (T::zero(), T::zero());
        for (i, w) in samples.iter().enumerate() {
            let z = T::int(i as i64 - n) * h;
            let weight = if i == 0 || i == samples.len() - 1 {
                T::lit(0.5)
            } else {
                T::one()
            };
            let (sz, cz) = (kappa * z).sin_cos();
            c += weight * cz * *w * *w;
            s += weight * sz * *w * *w;
        }
        (c * h, s * h)
    }
}

/// w evaluated on an arbitrary grid (units of a_l) that covers at least
/// eight sites around the origin.
pub fn wannier_function<T: Real>(v0: T, z_grid: &[T]) -> Result<Vec<T>> {
    let lo = z_grid.iter().copied().fold(T::infinity(), T::min);
    let hi = z_grid.iter().copied().fold(T::neg_infinity(), T::max);
    if z_grid.len() < 16 || lo > -T::lit(4.0) || hi < T::lit(4.0) {
        return Err(Error::domain(
            "grid must cover at least 8 lattice sites centred on site 0",
        ));
    }
    let w = WannierFunction::new(v0)?;
    Ok(z_grid.iter().map(|&z| w.eval(z)).collect())
}

/// Contrast 𝒞 = ∫ e^{2ik_c z}|w(z)|² dz with k_c in units of 1/a_l.
pub fn contrast<T: Real>(v0: T, k_c: T) -> Result<T> {
    let w = WannierFunction::new(v0)?;
    let (c, s) = w.fourier_moment(T::lit(2.0) * k_c);
    let tol = T::lit(1e-12).max(T::lit(1e3) * T::epsilon());
    if s.abs() > tol {
        return Err(Error::numeric("contrast imaginary part", s.lossy_f64()));
    }
    Ok(c)
}
