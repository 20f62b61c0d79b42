//! Duhamel convolution against the divergence-free heat kernel.
//!
//! The integral `int_0^t P(xi) exp(-nu |xi|^2 (t-s)) s-hat(xi, s) ds` is
//! discretized by product integration: the source is linear on each
//! subinterval while the semigroup factor is kept exact, so the rule is
//! second order in the step and exact for time-constant sources mode-wise.
//! On a uniform node grid the update
//!
//! ```text
//! I(t_{i+1}) = decay . I(t_i) + w_prev . s_i + w_next . s_{i+1}
//! ```
//!
//! marches the running integral with per-mode weights built once per window.

use ndarray::Array3;

use crate::fields::{leray_project, SpectralField};
use crate::grid::GridSpec;
use crate::solver::SolverError;
use crate::Real;

/// `(1 - e^{-z})/z`, continuous at zero.
pub(crate) fn phi1<T: Real>(z: T) -> T {
    if z == T::zero() {
        T::one()
    } else {
        -(-z).exp_m1() / z
    }
}

/// `(1 - e^{-z}(1+z))/z^2`, with a series branch against cancellation.
pub(crate) fn psi<T: Real>(z: T) -> T {
    if z < T::of(1e-4) {
        // 1/2 - z/3 + z^2/8 - z^3/30 + z^4/144
        T::of(0.5)
            + z * (T::of(-1.0 / 3.0)
                + z * (T::of(1.0 / 8.0) + z * (T::of(-1.0 / 30.0) + z * T::of(1.0 / 144.0))))
    } else {
        (T::one() - (-z).exp() * (T::one() + z)) / (z * z)
    }
}

/// Per-mode update weights for one uniform substep of length `delta`.
pub(crate) struct StepWeights<T> {
    pub decay: Array3<T>,
    pub w_prev: Array3<T>,
    pub w_next: Array3<T>,
}

impl<T: Real> StepWeights<T> {
    pub fn new(grid: &GridSpec<T>, nu: T, delta: T) -> Self {
        let n = grid.points_per_axis();
        let mut decay = Array3::zeros((n, n, n));
        let mut w_prev = Array3::zeros((n, n, n));
        let mut w_next = Array3::zeros((n, n, n));
        for k0 in 0..n {
            let xi0 = grid.wavenumber(k0);
            for k1 in 0..n {
                let xi1 = grid.wavenumber(k1);
                for k2 in 0..n {
                    let xi2 = grid.wavenumber(k2);
                    let lambda = nu * (xi0 * xi0 + xi1 * xi1 + xi2 * xi2);
                    let z = lambda * delta;
                    decay[[k0, k1, k2]] = (-z).exp();
                    w_prev[[k0, k1, k2]] = delta * psi(z);
                    w_next[[k0, k1, k2]] = delta * (phi1(z) - psi(z));
                }
            }
        }
        StepWeights {
            decay,
            w_prev,
            w_next,
        }
    }

    /// `acc = decay .* acc + w_prev .* prev + w_next .* next` componentwise.
    pub fn advance(
        &self,
        acc: &mut SpectralField<T>,
        prev: Option<&SpectralField<T>>,
        next: Option<&SpectralField<T>>,
    ) {
        for c in 0..3 {
            ndarray::Zip::from(&mut acc.components[c])
                .and(&self.decay)
                .for_each(|a, &d| *a = *a * d);
            if let Some(p) = prev {
                ndarray::Zip::from(&mut acc.components[c])
                    .and(&p.components[c])
                    .and(&self.w_prev)
                    .for_each(|a, &s, &w| *a = *a + s * w);
            }
            if let Some(nx) = next {
                ndarray::Zip::from(&mut acc.components[c])
                    .and(&nx.components[c])
                    .and(&self.w_next)
                    .for_each(|a, &s, &w| *a = *a + s * w);
            }
        }
    }
}

/// Duhamel operator applied to a sampled source: returns
/// `int_0^t P exp(-nu |xi|^2 (t-s)) source(s) ds` for `t` equal to one of the
/// sample times. Subinterval lengths may vary; each carries exact semigroup
/// weights.
pub fn duhamel_apply<T: Real>(
    source: &[SpectralField<T>],
    times: &[T],
    t: T,
    nu: T,
) -> Result<SpectralField<T>, SolverError> {
    if source.len() != times.len() {
        return Err(SolverError::Config(
            "source samples and times must align".into(),
        ));
    }
    if times.len() < 2 && t != T::zero() {
        return Err(SolverError::Config(
            "insufficient quadrature nodes to cover [0, t]".into(),
        ));
    }
    if times.first().map(|&t0| t0 != T::zero()).unwrap_or(true) && t != T::zero() {
        return Err(SolverError::Config("quadrature nodes must start at 0".into()));
    }
    let grid = source
        .first()
        .map(|s| s.grid)
        .ok_or_else(|| SolverError::Config("empty source".into()))?;
    if t == T::zero() {
        return Ok(SpectralField::zeros(grid));
    }
    let t_tol = T::of(1e-9) * t.abs().max(T::one());
    let end = times
        .iter()
        .position(|&ti| (ti - t).abs() <= t_tol)
        .ok_or_else(|| SolverError::Config("t must coincide with a quadrature node".into()))?;
    let mut acc = SpectralField::zeros(grid);
    for i in 1..=end {
        let delta = times[i] - times[i - 1];
        if delta <= T::zero() {
            return Err(SolverError::Config("times must be strictly increasing".into()));
        }
        let w = StepWeights::new(&grid, nu, delta);
        w.advance(&mut acc, Some(&source[i - 1]), Some(&source[i]));
    }
    Ok(leray_project(&acc))
}
