//! Scalar abstraction for the numerical core.
//!
//! Everything downstream is generic over [`Real`], which bundles the float
//! capabilities we need (elementary functions, FFT support, conversions).
//! `f64` is the working precision of the shipped binaries; `f32` is kept
//! viable for experiments.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign};
use rustfft::FftNum;

/// Floating-point scalar usable by every module in this crate.
pub trait Real:
    Float + FloatConst + FftNum + NumAssign + Sum<Self> + Display + LowerExp + Debug
{
    /// The error function, accurate to within a few ulp.
    fn erf(self) -> Self;

    /// Lossy conversion from `f64` (exact for `f64` itself).
    fn of(x: f64) -> Self;

    /// Conversion from a lattice index or count.
    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }
}

impl Real for f64 {
    fn erf(self) -> Self {
        libm::erf(self)
    }

    fn of(x: f64) -> Self {
        x
    }
}

impl Real for f32 {
    fn erf(self) -> Self {
        libm::erff(self)
    }

    fn of(x: f64) -> Self {
        x as f32
    }
}
