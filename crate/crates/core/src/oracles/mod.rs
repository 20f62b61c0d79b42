//! Independent brute-force verifiers for every closed-form kernel and
//! estimate: Fourier quadrature, finite differences, scan-based bounds,
//! manufactured solutions, and the exact Stokes flow.

mod decay;
mod finite_diff;
mod j12;
mod mms;
mod quadrature;
mod residual;
pub mod suite;

pub use decay::{
    grad_g_mass, grad_g_mass_exact, kernel_decay_scan, kernel_gradient_mass, weighted_value_sup,
    DecayScan, DecayScanEntry,
};
pub use finite_diff::{finite_difference_j, finite_difference_j_checked, StepSizeCheck};
pub use j12::{j11, j12, j12_bound_scan, J12Scan};
pub use mms::{manufactured_case, stokes_exact, ManufacturedCase, MmsParams};
pub use quadrature::{
    erf_identity_sides, i2_radial_potential, numeric_g_quadrature, numeric_i2, QuadratureSpec,
};
pub use residual::{pde_residual, ResidualReport};

use thiserror::Error;

use crate::fields::FieldError;
use crate::kernels::KernelPoint;

#[derive(Debug, Error)]
pub enum OracleError {
    /// A quadrature truncation check failed after widening.
    #[error("tail check failed: {0}")]
    TailCheck(String),
    #[error("unknown manufactured case: {0}")]
    UnknownCase(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The pinned sample-point set shipped with the repository; every
/// closed-form-vs-oracle agreement check runs on (a prefix of) these.
pub fn pinned_kernel_points() -> Vec<KernelPoint<f64>> {
    const RAW: &str = include_str!("kernel_points.csv");
    RAW.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let v: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse().expect("pinned point table is well-formed"))
                .collect();
            KernelPoint::new([v[0], v[1], v[2]], v[3], v[4])
        })
        .collect()
}
