//! Wannier-Stark lattice physics and photon-mediated one-axis twisting for
//! cavity-QED gravimetry.
//!
//! Internal units: lengths in lattice spacings a_l, energies in recoil units
//! E_R, ħ = 1. SI quantities only appear at the `protocol`, `thermal` and
//! `cavity` boundaries, where the conversion is explicit.
//!
//! The closed-form kernels (`numerics`, `lattice`, `cavity`, `echo`) are
//! generic over [`Real`], which is implemented for `f32` and `f64`. The
//! brute-force `oracle`, the `thermal` mode sums and the `protocol` layer are
//! double precision only. Aliases for the usual `f64` instantiations live at
//! the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub mod cavity;
pub mod constants;
pub mod echo;
pub mod error;
pub mod lattice;
pub mod numerics;
pub mod oracle;
pub mod protocol;
pub mod thermal;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Floating-point scalar accepted by the generic kernels.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Exact for `f64`, rounded for `f32`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn lossy_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    fn int(n: i64) -> Self {
        Self::lit(n as f64)
    }

    /// Relative tolerance a converged iteration can be expected to reach.
    fn solver_tol() -> Self {
        Self::epsilon() * Self::lit(64.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Complex64 = num_complex::Complex<f64>;

pub type AtomSpecies = lattice::AtomSpecies<f64>;
pub type LatticeConfig = lattice::LatticeConfig<f64>;
pub type WannierStarkState = lattice::WannierStarkState<f64>;
pub type CouplingProfile = lattice::CouplingProfile<f64>;
pub type ValidityReport = lattice::ValidityReport<f64>;
pub type CavityConfig = cavity::CavityConfig<f64>;
pub type TwistingParams = cavity::TwistingParams<f64>;
pub type DecoherenceRates = cavity::DecoherenceRates<f64>;
pub type EchoInput = echo::EchoInput<f64>;
pub type EchoResult = echo::EchoResult<f64>;
pub type GainOptimum = echo::GainOptimum<f64>;
pub type BandState = numerics::BandState<f64>;

pub type AtomSpeciesF32 = lattice::AtomSpecies<f32>;
pub type LatticeConfigF32 = lattice::LatticeConfig<f32>;
pub type EchoInputF32 = echo::EchoInput<f32>;
pub type DecoherenceRatesF32 = cavity::DecoherenceRates<f32>;
