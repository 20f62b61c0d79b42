//! Integral-equation solver: known-term assembly, the Duhamel convolution
//! operator, Picard iteration on contraction windows, and time marching.

mod duhamel;
mod march;
mod pressure;
mod scenario;

pub use duhamel::duhamel_apply;
pub use march::{
    assemble_known_term, estimate_window, march, picard_probe, ConvergenceTrace, MarchOutput,
    SolutionTrajectory, SolverConfig, WindowPolicy, WindowTrace,
};
pub use pressure::recover_pressure;
pub use scenario::{Forcing, InitialCondition, Scenario};

use thiserror::Error;

use crate::fields::FieldError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Field(#[from] FieldError),
    /// Picard iteration failed to contract: the window is too long for the
    /// data, or the grid under-resolves the nonlinearity.
    #[error("contraction failure: measured ratio {ratio:.3e} after {iters} iterations on a window of length {window:.3e}")]
    ContractionFailure {
        ratio: f64,
        window: f64,
        iters: usize,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
}
