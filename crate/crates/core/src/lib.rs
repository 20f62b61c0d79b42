//! Pseudo-spectral solver for the 3D incompressible Navier-Stokes equations,
//! formulated as a Volterra-type integral equation: the velocity is the fixed
//! point of `v = F - B[(v . grad) v]`, where `F` collects the heat-propagated
//! initial data and the forcing history, and `B` is time convolution against
//! the divergence-free Stokes kernel (a heat semigroup composed with the
//! Leray projector in Fourier space).
//!
//! Modules:
//! - [`grid`] / [`fields`]: the truncated periodic box, transforms, spectral
//!   operators;
//! - [`kernels`]: closed-form evaluation of the heat kernel, the Oseen-type
//!   tensor and its Fourier symbol;
//! - [`solver`]: known-term assembly, Duhamel quadrature, Picard iteration in
//!   contraction windows, pressure recovery;
//! - [`diagnostics`]: sup-norms, energy budget, spectral a-priori bound,
//!   decay-profile fit;
//! - [`oracles`]: independent brute-force verifiers (Fourier quadrature,
//!   finite differences, manufactured solutions, scan-based estimate checks).

pub mod diagnostics;
pub mod fields;
pub mod grid;
pub mod kernels;
pub mod oracles;
pub mod solver;

mod real;

pub use real::Real;

/// Concrete double-precision aliases; the CLI and the verification suite use
/// these exclusively.
pub type GridSpec64 = grid::GridSpec<f64>;
pub type VectorField64 = fields::VectorField<f64>;
pub type SpectralField64 = fields::SpectralField<f64>;
pub type ScalarField64 = fields::ScalarField<f64>;
pub type Tensor3_64 = kernels::Tensor3<f64>;
pub type Scenario64 = solver::Scenario<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type SolutionTrajectory64 = solver::SolutionTrajectory<f64>;
