//! Pressure recovery from a divergence-free velocity snapshot.
//!
//! Taking the divergence of the momentum equation leaves the spectral
//! Poisson problem `p-hat = -i xi . (f-hat - w-hat) / |xi|^2` with
//! `w = (v . grad) v`; the mean of `p` is fixed to zero.

use num_complex::Complex;

use crate::fields::{
    forward_transform, inverse_scalar, nonlinear_term_spectral, ScalarField, SpectralField,
    VectorField,
};
use crate::solver::SolverError;
use crate::Real;

pub fn recover_pressure<T: Real>(
    v: &VectorField<T>,
    f: Option<&VectorField<T>>,
) -> Result<ScalarField<T>, SolverError> {
    let grid = v.grid;
    let vhat = forward_transform(v)?;
    let what = nonlinear_term_spectral(&vhat);
    let mut rhs = match f {
        Some(f) => forward_transform(f)?,
        None => SpectralField::zeros(grid),
    };
    rhs.axpy(-T::one(), &what);

    let n = grid.points_per_axis();
    let mut phat = ndarray::Array3::<Complex<T>>::zeros((n, n, n));
    for k0 in 0..n {
        let xi0 = grid.wavenumber(k0);
        for k1 in 0..n {
            let xi1 = grid.wavenumber(k1);
            for k2 in 0..n {
                if k0 == 0 && k1 == 0 && k2 == 0 {
                    continue;
                }
                let xi2 = grid.wavenumber(k2);
                let norm2 = xi0 * xi0 + xi1 * xi1 + xi2 * xi2;
                let idx = [k0, k1, k2];
                let dot = rhs.components[0][idx] * xi0
                    + rhs.components[1][idx] * xi1
                    + rhs.components[2][idx] * xi2;
                // -i (xi . rhs) / |xi|^2
                phat[idx] = Complex::new(T::zero(), -T::one()) * dot / norm2;
            }
        }
    }
    let samples = inverse_scalar(&grid, &phat);
    let p = ScalarField { grid, samples };
    p.validate()?;
    Ok(p)
}
