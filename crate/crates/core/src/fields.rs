//! Discrete vector fields on the periodic box and their spectral toolbox.
//!
//! Transform convention: a real field is represented by Fourier-series
//! coefficients with respect to the centered coordinates,
//!
//! ```text
//! v(x) = sum_k c_k exp(i xi_k . x),   xi_k = (pi/L) k_signed,
//! ```
//!
//! so that convolution against the free-space Stokes kernel becomes the
//! coefficient-wise multiplication `c_k -> P(xi_k) exp(-nu |xi_k|^2 t) c_k`.
//! In terms of the raw DFT this normalization is `c_k = (-1)^{k1+k2+k3}
//! DFT_k / N^3` (the sign realigns the series to the box centered at the
//! origin; parity of the raw index equals parity of the signed frequency
//! because N is even).

use ndarray::{Array3, Zip};
use num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::grid::GridSpec;
use crate::Real;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("conjugate symmetry violated: imaginary residue {residue:e} against scale {scale:e}")]
    SymmetryViolation { residue: f64, scale: f64 },
    #[error("grids of operands do not match")]
    GridMismatch,
    #[error("domain error: {0}")]
    Domain(&'static str),
}

/// Relative imaginary residue that still counts as a real field.
const SYMMETRY_TOL: f64 = 1e-8;

/// Three-component real field sampled on the grid.
#[derive(Debug, Clone)]
pub struct VectorField<T> {
    pub grid: GridSpec<T>,
    pub components: [Array3<T>; 3],
    /// Optional annotation: the time this snapshot belongs to.
    pub time_tag: Option<T>,
}

/// Three-component field of Fourier coefficients indexed by wavevector.
#[derive(Debug, Clone)]
pub struct SpectralField<T> {
    pub grid: GridSpec<T>,
    pub components: [Array3<Complex<T>>; 3],
}

/// Single real scalar field on the grid.
#[derive(Debug, Clone)]
pub struct ScalarField<T> {
    pub grid: GridSpec<T>,
    pub samples: Array3<T>,
}

fn cube<T: Real>(grid: &GridSpec<T>) -> (usize, usize, usize) {
    let n = grid.points_per_axis();
    (n, n, n)
}

impl<T: Real> VectorField<T> {
    pub fn zeros(grid: GridSpec<T>) -> Self {
        let dim = cube(&grid);
        Self {
            grid,
            components: [
                Array3::zeros(dim),
                Array3::zeros(dim),
                Array3::zeros(dim),
            ],
            time_tag: None,
        }
    }

    /// Sample three closed-form component functions on the grid.
    pub fn from_fn(grid: GridSpec<T>, f: impl Fn(T, T, T) -> [T; 3]) -> Self {
        let mut out = Self::zeros(grid);
        let n = grid.points_per_axis();
        for i0 in 0..n {
            let x0 = grid.coord(i0);
            for i1 in 0..n {
                let x1 = grid.coord(i1);
                for i2 in 0..n {
                    let v = f(x0, x1, grid.coord(i2));
                    for c in 0..3 {
                        out.components[c][[i0, i1, i2]] = v[c];
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        for comp in &self.components {
            if comp.iter().any(|v| !v.is_finite()) {
                return Err(FieldError::NonFinite("vector field samples"));
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for comp in &self.components {
            for &v in comp.iter() {
                m = m.max(v.abs());
            }
        }
        m
    }

    /// Pointwise Euclidean magnitude at a grid index.
    pub fn magnitude_at(&self, idx: [usize; 3]) -> T {
        let mut s = T::zero();
        for c in 0..3 {
            let v = self.components[c][idx];
            s += v * v;
        }
        s.sqrt()
    }
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: GridSpec<T>) -> Self {
        let dim = cube(&grid);
        Self {
            grid,
            components: [
                Array3::zeros(dim),
                Array3::zeros(dim),
                Array3::zeros(dim),
            ],
        }
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for comp in &self.components {
            for v in comp.iter() {
                m = m.max(v.norm_sqr().sqrt());
            }
        }
        m
    }

    /// Largest violation of `xi . v(xi) = 0`, measured against the field
    /// scale `max_xi |xi| |v(xi)|`. The scale floor keeps roundoff-level
    /// modes (which carry no meaningful direction) from dominating the ratio.
    pub fn max_relative_divergence(&self) -> T {
        let n = self.grid.points_per_axis();
        let mut worst = T::zero();
        let mut scale = T::zero();
        for k0 in 0..n {
            let xi0 = self.grid.wavenumber(k0);
            for k1 in 0..n {
                let xi1 = self.grid.wavenumber(k1);
                for k2 in 0..n {
                    if k0 == 0 && k1 == 0 && k2 == 0 {
                        continue;
                    }
                    let xi2 = self.grid.wavenumber(k2);
                    let c0 = self.components[0][[k0, k1, k2]];
                    let c1 = self.components[1][[k0, k1, k2]];
                    let c2 = self.components[2][[k0, k1, k2]];
                    let div = c0 * xi0 + c1 * xi1 + c2 * xi2;
                    let xi_norm = (xi0 * xi0 + xi1 * xi1 + xi2 * xi2).sqrt();
                    let v_norm = (c0.norm_sqr() + c1.norm_sqr() + c2.norm_sqr()).sqrt();
                    worst = worst.max(div.norm_sqr().sqrt());
                    scale = scale.max(xi_norm * v_norm);
                }
            }
        }
        worst / (scale + T::of(f64::MIN_POSITIVE))
    }

    /// Linear combination `self + w * other`, used by iteration updates.
    pub fn axpy(&mut self, w: T, other: &SpectralField<T>) {
        for c in 0..3 {
            Zip::from(&mut self.components[c])
                .and(&other.components[c])
                .for_each(|a, &b| *a = *a + b * w);
        }
    }

    pub fn scale(&mut self, w: T) {
        for c in 0..3 {
            self.components[c].mapv_inplace(|v| v * w);
        }
    }
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(grid: GridSpec<T>) -> Self {
        ScalarField {
            grid,
            samples: Array3::zeros(cube(&grid)),
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if self.samples.iter().any(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite("scalar field samples"));
        }
        Ok(())
    }
}

/// In-place complex 3D FFT along all axes. `forward` selects the sign.
fn fft3_inplace<T: Real>(data: &mut [Array3<Complex<T>>], n: usize, forward: bool) {
    let mut planner = FftPlanner::<T>::new();
    let fft = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    let mut lane = vec![Complex::new(T::zero(), T::zero()); n];
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    for arr in data.iter_mut() {
        // axis 2 lanes are contiguous in the standard layout; axes 0 and 1 are strided,
        // so every lane goes through the copy buffer uniformly.
        for axis in 0..3 {
            for a in 0..n {
                for b in 0..n {
                    for (i, slot) in lane.iter_mut().enumerate() {
                        let idx = match axis {
                            0 => [i, a, b],
                            1 => [a, i, b],
                            _ => [a, b, i],
                        };
                        *slot = arr[idx];
                    }
                    fft.process_with_scratch(&mut lane, &mut scratch);
                    for (i, slot) in lane.iter().enumerate() {
                        let idx = match axis {
                            0 => [i, a, b],
                            1 => [a, i, b],
                            _ => [a, b, i],
                        };
                        arr[idx] = *slot;
                    }
                }
            }
        }
    }
}

/// Apply the centering sign `(-1)^{k1+k2+k3}` in place.
fn apply_center_sign<T: Real>(arr: &mut Array3<Complex<T>>) {
    for ((k0, k1, k2), v) in arr.indexed_iter_mut() {
        if (k0 + k1 + k2) % 2 == 1 {
            *v = -*v;
        }
    }
}

/// Forward transform of a real vector field into centered Fourier coefficients.
pub fn forward_transform<T: Real>(v: &VectorField<T>) -> Result<SpectralField<T>, FieldError> {
    v.validate()?;
    let n = v.grid.points_per_axis();
    let mut out = SpectralField::zeros(v.grid);
    for c in 0..3 {
        Zip::from(&mut out.components[c])
            .and(&v.components[c])
            .for_each(|dst, &src| *dst = Complex::new(src, T::zero()));
    }
    fft3_inplace(&mut out.components, n, true);
    let norm = T::of_usize(n * n * n).recip();
    for c in 0..3 {
        apply_center_sign(&mut out.components[c]);
        out.components[c].mapv_inplace(|z| z * norm);
    }
    Ok(out)
}

/// Inverse transform back to physical samples.
///
/// The anti-symmetric part of the coefficients shows up as an imaginary
/// residue after the inverse FFT; exceeding [`SYMMETRY_TOL`] relative to the
/// field scale is reported as a symmetry violation.
pub fn inverse_transform<T: Real>(vhat: &SpectralField<T>) -> Result<VectorField<T>, FieldError> {
    let (out, residue, scale) = inverse_transform_raw(vhat);
    let scale_f = scale.to_f64().unwrap_or(0.0);
    let residue_f = residue.to_f64().unwrap_or(f64::INFINITY);
    if residue_f > SYMMETRY_TOL * scale_f.max(f64::MIN_POSITIVE) && scale_f > 0.0 {
        return Err(FieldError::SymmetryViolation {
            residue: residue_f,
            scale: scale_f,
        });
    }
    out.validate()?;
    Ok(out)
}

/// Inverse transform that returns the imaginary residue instead of policing it.
pub(crate) fn inverse_transform_raw<T: Real>(
    vhat: &SpectralField<T>,
) -> (VectorField<T>, T, T) {
    let n = vhat.grid.points_per_axis();
    let mut work = [
        vhat.components[0].clone(),
        vhat.components[1].clone(),
        vhat.components[2].clone(),
    ];
    for arr in work.iter_mut() {
        apply_center_sign(arr);
    }
    fft3_inplace(&mut work, n, false);
    let mut out = VectorField::zeros(vhat.grid);
    let mut residue = T::zero();
    let mut scale = T::zero();
    for c in 0..3 {
        Zip::from(&mut out.components[c])
            .and(&work[c])
            .for_each(|dst, z| {
                *dst = z.re;
            });
        for z in work[c].iter() {
            residue = residue.max(z.im.abs());
            scale = scale.max(z.re.abs());
        }
    }
    (out, residue, scale)
}

/// Leray projection `c -> (I - xi xi^T/|xi|^2) c`; the mean mode passes through.
pub fn leray_project<T: Real>(vhat: &SpectralField<T>) -> SpectralField<T> {
    let n = vhat.grid.points_per_axis();
    let mut out = vhat.clone();
    for k0 in 0..n {
        let xi0 = vhat.grid.wavenumber(k0);
        for k1 in 0..n {
            let xi1 = vhat.grid.wavenumber(k1);
            for k2 in 0..n {
                if k0 == 0 && k1 == 0 && k2 == 0 {
                    continue;
                }
                let xi2 = vhat.grid.wavenumber(k2);
                let norm2 = xi0 * xi0 + xi1 * xi1 + xi2 * xi2;
                let idx = [k0, k1, k2];
                let dot = out.components[0][idx] * xi0
                    + out.components[1][idx] * xi1
                    + out.components[2][idx] * xi2;
                let f = dot / norm2;
                out.components[0][idx] -= f * xi0;
                out.components[1][idx] -= f * xi1;
                out.components[2][idx] -= f * xi2;
            }
        }
    }
    out
}

/// Spectral derivative along `axis` (0-based): multiply by `i xi_axis`.
///
/// The self-conjugate Nyquist plane is zeroed; a first derivative has no
/// real-valued representation there.
pub fn derivative<T: Real>(vhat: &SpectralField<T>, axis: usize) -> SpectralField<T> {
    assert!(axis < 3, "axis must be 0, 1, or 2");
    let n = vhat.grid.points_per_axis();
    let mut out = vhat.clone();
    for k0 in 0..n {
        for k1 in 0..n {
            for k2 in 0..n {
                let k = [k0, k1, k2][axis];
                let idx = [k0, k1, k2];
                if vhat.grid.signed_freq(k) == -(n as i64) / 2 {
                    for c in 0..3 {
                        out.components[c][idx] = Complex::new(T::zero(), T::zero());
                    }
                    continue;
                }
                let xi = vhat.grid.wavenumber(k);
                let factor = Complex::new(T::zero(), xi);
                for c in 0..3 {
                    out.components[c][idx] = vhat.components[c][idx] * factor;
                }
            }
        }
    }
    out
}

/// Derivative of a single spectral component (gradient building block).
pub(crate) fn derivative_scalar<T: Real>(
    grid: &GridSpec<T>,
    chat: &Array3<Complex<T>>,
    axis: usize,
) -> Array3<Complex<T>> {
    let n = grid.points_per_axis();
    let mut out = chat.clone();
    for k0 in 0..n {
        for k1 in 0..n {
            for k2 in 0..n {
                let k = [k0, k1, k2][axis];
                let idx = [k0, k1, k2];
                if grid.signed_freq(k) == -(n as i64) / 2 {
                    out[idx] = Complex::new(T::zero(), T::zero());
                } else {
                    out[idx] = chat[idx] * Complex::new(T::zero(), grid.wavenumber(k));
                }
            }
        }
    }
    out
}

/// Heat semigroup: multiply each coefficient by `exp(-nu |xi|^2 dt)`.
pub fn heat_propagate<T: Real>(
    vhat: &SpectralField<T>,
    dt: T,
    nu: T,
) -> Result<SpectralField<T>, FieldError> {
    if dt < T::zero() {
        return Err(FieldError::Domain("heat propagation requires dt >= 0"));
    }
    if nu <= T::zero() {
        return Err(FieldError::Domain("viscosity must be positive"));
    }
    let n = vhat.grid.points_per_axis();
    let mut out = vhat.clone();
    for k0 in 0..n {
        let xi0 = vhat.grid.wavenumber(k0);
        for k1 in 0..n {
            let xi1 = vhat.grid.wavenumber(k1);
            for k2 in 0..n {
                let xi2 = vhat.grid.wavenumber(k2);
                let decay = (-nu * (xi0 * xi0 + xi1 * xi1 + xi2 * xi2) * dt).exp();
                let idx = [k0, k1, k2];
                for c in 0..3 {
                    out.components[c][idx] = vhat.components[c][idx] * decay;
                }
            }
        }
    }
    Ok(out)
}

/// Zero every mode outside the spherical 2/3-rule ball.
pub fn apply_dealias<T: Real>(vhat: &mut SpectralField<T>) {
    let n = vhat.grid.points_per_axis();
    let zero = Complex::new(T::zero(), T::zero());
    for k0 in 0..n {
        let f0 = vhat.grid.signed_freq(k0);
        for k1 in 0..n {
            let f1 = vhat.grid.signed_freq(k1);
            for k2 in 0..n {
                let f2 = vhat.grid.signed_freq(k2);
                if !vhat.grid.dealias_keep(f0, f1, f2) {
                    let idx = [k0, k1, k2];
                    for c in 0..3 {
                        vhat.components[c][idx] = zero;
                    }
                }
            }
        }
    }
}

/// Convective term `(v . grad) v`, computed pseudo-spectrally with the
/// 2/3-rule applied to the inputs and to the product.
pub fn nonlinear_term<T: Real>(v: &VectorField<T>) -> Result<VectorField<T>, FieldError> {
    let vhat = forward_transform(v)?;
    let what = nonlinear_term_spectral(&vhat);
    let (out, _, _) = inverse_transform_raw(&what);
    Ok(out)
}

/// Spectral-in, spectral-out convective term; the solver's hot path.
pub(crate) fn nonlinear_term_spectral<T: Real>(vhat: &SpectralField<T>) -> SpectralField<T> {
    let mut vhat_d = vhat.clone();
    apply_dealias(&mut vhat_d);
    let (v_phys, _, _) = inverse_transform_raw(&vhat_d);

    let grid = vhat.grid;
    let mut product = VectorField::zeros(grid);
    // accumulate w_m = sum_j v_j d_j v_m one derivative at a time
    for m in 0..3 {
        for j in 0..3 {
            let dhat = derivative_scalar(&grid, &vhat_d.components[m], j);
            let deriv_phys = inverse_scalar(&grid, &dhat);
            Zip::from(&mut product.components[m])
                .and(&v_phys.components[j])
                .and(&deriv_phys)
                .for_each(|acc, &vj, &dv| *acc += vj * dv);
        }
    }
    let mut what = forward_transform(&product).expect("products of finite fields are finite");
    apply_dealias(&mut what);
    what
}

/// Inverse FFT of a single spectral component, real part.
pub(crate) fn inverse_scalar<T: Real>(
    grid: &GridSpec<T>,
    chat: &Array3<Complex<T>>,
) -> Array3<T> {
    let n = grid.points_per_axis();
    let mut work = [chat.clone()];
    apply_center_sign(&mut work[0]);
    fft3_inplace(&mut work, n, false);
    work[0].mapv(|z| z.re)
}

/// Forward FFT of a single real component.
pub(crate) fn forward_scalar<T: Real>(grid: &GridSpec<T>, samples: &Array3<T>) -> Array3<Complex<T>> {
    let n = grid.points_per_axis();
    let mut work = [samples.mapv(|v| Complex::new(v, T::zero()))];
    fft3_inplace(&mut work, n, true);
    apply_center_sign(&mut work[0]);
    let norm = T::of_usize(n * n * n).recip();
    work[0].mapv_inplace(|z| z * norm);
    let [arr] = work;
    arr
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid8() -> GridSpec<f64> {
        GridSpec::new(1.5, 8).unwrap()
    }

    #[test]
    fn constant_field_transforms_to_mean_mode() {
        let v = VectorField::from_fn(grid8(), |_, _, _| [1.0, 0.0, 0.0]);
        let vhat = forward_transform(&v).unwrap();
        assert!((vhat.components[0][[0, 0, 0]].re - 1.0).abs() < 1e-14);
        assert!(vhat.components[0][[0, 0, 0]].im.abs() < 1e-15);
        let mut off_mean = 0.0f64;
        for (k, z) in vhat.components[0].indexed_iter() {
            if k != (0, 0, 0) {
                off_mean = off_mean.max(z.norm());
            }
        }
        assert!(off_mean < 1e-14);
        assert!(vhat.components[1].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn single_sine_gives_one_conjugate_pair() {
        let g = grid8();
        let l = g.half_width();
        let v = VectorField::from_fn(g, |x, _, _| [(std::f64::consts::PI * x / l).sin(), 0.0, 0.0]);
        let vhat = forward_transform(&v).unwrap();
        let plus = vhat.components[0][[1, 0, 0]];
        let minus = vhat.components[0][[7, 0, 0]];
        // sin = (e^{i xi x} - e^{-i xi x})/(2i): coefficients -/+ i/2
        assert!((plus - Complex::new(0.0, -0.5)).norm() < 1e-14);
        assert!((minus - Complex::new(0.0, 0.5)).norm() < 1e-14);
        assert!((plus - minus.conj()).norm() < 1e-14);
        let mut others = 0.0f64;
        for (k, z) in vhat.components[0].indexed_iter() {
            if k != (1, 0, 0) && k != (7, 0, 0) {
                others = others.max(z.norm());
            }
        }
        assert!(others < 1e-14);
    }

    #[test]
    fn zero_spectrum_inverts_to_zero() {
        let vhat = SpectralField::<f64>::zeros(grid8());
        let v = inverse_transform(&vhat).unwrap();
        assert_eq!(v.max_abs(), 0.0);
    }

    #[test]
    fn conjugate_pair_inverts_to_cosine() {
        let g = grid8();
        let mut vhat = SpectralField::<f64>::zeros(g);
        vhat.components[2][[0, 2, 0]] = Complex::new(0.5, 0.0);
        vhat.components[2][[0, 6, 0]] = Complex::new(0.5, 0.0);
        let v = inverse_transform(&vhat).unwrap();
        let l = g.half_width();
        for i in 0..8 {
            let x1 = g.coord(i);
            let want = (2.0 * std::f64::consts::PI * x1 / l).cos();
            assert!((v.components[2][[0, i, 0]] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let mut vhat = SpectralField::<f64>::zeros(grid8());
        vhat.components[0][[1, 0, 0]] = Complex::new(1.0, 0.3);
        // no conjugate partner at [7,0,0]
        match inverse_transform(&vhat) {
            Err(FieldError::SymmetryViolation { .. }) => {}
            other => panic!("expected symmetry violation, got {other:?}"),
        }
    }

    #[test]
    fn nonfinite_input_is_rejected() {
        let mut v = VectorField::zeros(grid8());
        v.components[1][[2, 3, 4]] = f64::NAN;
        assert_eq!(
            forward_transform(&v).unwrap_err(),
            FieldError::NonFinite("vector field samples")
        );
    }

    #[test]
    fn leray_annihilates_gradients() {
        // v-hat(xi) = i xi phi-hat(xi) for a random-ish scalar spectrum
        let g = grid8();
        let mut vhat = SpectralField::<f64>::zeros(g);
        let n = 8;
        for k0 in 0..n {
            for k1 in 0..n {
                for k2 in 0..n {
                    if (k0, k1, k2) == (0, 0, 0) {
                        continue;
                    }
                    let phi = Complex::new(
                        ((k0 * 31 + k1 * 17 + k2 * 7) % 13) as f64 / 13.0 - 0.5,
                        ((k0 * 5 + k1 * 3 + k2 * 11) % 7) as f64 / 7.0 - 0.5,
                    );
                    let xi = [g.wavenumber(k0), g.wavenumber(k1), g.wavenumber(k2)];
                    for c in 0..3 {
                        vhat.components[c][[k0, k1, k2]] = Complex::new(0.0, xi[c]) * phi;
                    }
                }
            }
        }
        let projected = leray_project(&vhat);
        assert!(projected.max_abs() < 1e-14);
    }

    #[test]
    fn leray_axis_example_and_idempotence() {
        let g = grid8();
        let mut vhat = SpectralField::<f64>::zeros(g);
        // mode with signed frequency (1,0,0): xi parallel to axis 1
        vhat.components[0][[1, 0, 0]] = Complex::new(3.0, 0.0);
        vhat.components[1][[1, 0, 0]] = Complex::new(-2.0, 1.0);
        vhat.components[2][[1, 0, 0]] = Complex::new(0.5, 0.5);
        let p = leray_project(&vhat);
        assert!(p.components[0][[1, 0, 0]].norm() < 1e-15);
        assert!((p.components[1][[1, 0, 0]] - Complex::new(-2.0, 1.0)).norm() < 1e-15);
        assert!((p.components[2][[1, 0, 0]] - Complex::new(0.5, 0.5)).norm() < 1e-15);
        let pp = leray_project(&p);
        for c in 0..3 {
            let d = &pp.components[c] - &p.components[c];
            assert!(d.iter().all(|z| z.norm() < 1e-15));
        }
        assert!(p.max_relative_divergence() < 1e-12);
    }

    #[test]
    fn mean_mode_passes_through_projection() {
        let g = grid8();
        let mut vhat = SpectralField::<f64>::zeros(g);
        vhat.components[0][[0, 0, 0]] = Complex::new(4.0, 0.0);
        let p = leray_project(&vhat);
        assert_eq!(p.components[0][[0, 0, 0]], Complex::new(4.0, 0.0));
    }

    #[test]
    fn derivative_of_resolved_harmonic_is_exact() {
        let g = grid8();
        let l = g.half_width();
        let v = VectorField::from_fn(g, |x, _, _| [(std::f64::consts::PI * x / l).sin(), 0.0, 0.0]);
        let vhat = forward_transform(&v).unwrap();
        let dv = inverse_transform(&derivative(&vhat, 0)).unwrap();
        let k = std::f64::consts::PI / l;
        for i in 0..8 {
            let x = g.coord(i);
            let want = k * (k * x).cos();
            assert!((dv.components[0][[i, 0, 0]] - want).abs() < 1e-13);
        }
        // derivative of constant field is zero
        let c = VectorField::from_fn(g, |_, _, _| [2.0, -1.0, 0.5]);
        let dc = inverse_transform(&derivative(&forward_transform(&c).unwrap(), 1)).unwrap();
        assert!(dc.max_abs() < 1e-14);
    }

    #[test]
    fn heat_propagate_halving_and_identity() {
        let g = grid8();
        let l = g.half_width();
        let mut vhat = SpectralField::<f64>::zeros(g);
        // single mode with |xi|^2 = 1: pick xi = (pi/L) k with k chosen so (pi/L)^2 k^2 = 1
        // here instead scale time: xi = pi/1.5, dt chosen so nu xi^2 dt = ln 2
        vhat.components[0][[1, 0, 0]] = Complex::new(1.0, 0.0);
        vhat.components[0][[7, 0, 0]] = Complex::new(1.0, 0.0);
        let xi = std::f64::consts::PI / l;
        let dt = (2.0f64).ln() / (xi * xi);
        let out = heat_propagate(&vhat, dt, 1.0).unwrap();
        assert!((out.components[0][[1, 0, 0]].re - 0.5).abs() < 1e-14);

        let id = heat_propagate(&vhat, 0.0, 1.0).unwrap();
        assert_eq!(id.components[0][[1, 0, 0]], Complex::new(1.0, 0.0));

        assert!(heat_propagate(&vhat, -0.1, 1.0).is_err());
    }

    #[test]
    fn nonlinear_term_of_constant_and_shear() {
        let g = grid8();
        let c = VectorField::from_fn(g, |_, _, _| [0.7, -0.3, 0.1]);
        let w = nonlinear_term(&c).unwrap();
        assert!(w.max_abs() < 1e-13);

        // v = (sin(pi x2 / L), 0, 0): v1 depends only on x2 but only d1 is
        // contracted against v1, so the convective term vanishes
        let l = g.half_width();
        let shear =
            VectorField::from_fn(g, |_, y, _| [(std::f64::consts::PI * y / l).sin(), 0.0, 0.0]);
        let w = nonlinear_term(&shear).unwrap();
        assert!(w.max_abs() < 1e-13);
    }

    #[test]
    fn nonlinear_term_closed_form_two_harmonics() {
        // v = (A sin(k x2), A sin(k x1), 0), k = pi/L:
        // (v.grad)v = (A^2 k sin(k x1) cos(k x2), A^2 k sin(k x2) cos(k x1), 0)
        let g = GridSpec::new(std::f64::consts::PI, 16).unwrap();
        let a = 0.8;
        let k = 1.0;
        let v = VectorField::from_fn(g, |x, y, _| {
            [a * (k * y).sin(), a * (k * x).sin(), 0.0]
        });
        let w = nonlinear_term(&v).unwrap();
        let mut worst = 0.0f64;
        for i0 in 0..16 {
            let x = g.coord(i0);
            for i1 in 0..16 {
                let y = g.coord(i1);
                let want0 = a * a * k * (k * x).sin() * (k * y).cos();
                let want1 = a * a * k * (k * y).sin() * (k * x).cos();
                worst = worst.max((w.components[0][[i0, i1, 3]] - want0).abs());
                worst = worst.max((w.components[1][[i0, i1, 3]] - want1).abs());
                worst = worst.max(w.components[2][[i0, i1, 3]].abs());
            }
        }
        assert!(worst < 1e-13, "closed-form mismatch {worst:e}");
    }

    #[test]
    fn divergence_of_projected_field_vanishes() {
        let g = grid8();
        let v = VectorField::from_fn(g, |x, y, z| {
            [
                (x * 1.1).sin() + 0.3 * (y * 2.0).cos(),
                (y - z).cos(),
                (0.5 * x * z).sin(),
            ]
        });
        let mut vhat = forward_transform(&v).unwrap();
        // keep the check away from the Nyquist planes, which the derivative
        // operator zeroes while the projector keeps
        apply_dealias(&mut vhat);
        let p = leray_project(&vhat);
        // divergence via spectral derivatives of the projected field
        let mut div_max = 0.0f64;
        let d0 = derivative(&p, 0);
        let d1 = derivative(&p, 1);
        let d2 = derivative(&p, 2);
        for (idx, z0) in d0.components[0].indexed_iter() {
            let z = *z0 + d1.components[1][[idx.0, idx.1, idx.2]]
                + d2.components[2][[idx.0, idx.1, idx.2]];
            div_max = div_max.max(z.norm());
        }
        let scale = p.max_abs();
        assert!(div_max <= 1e-12 * scale.max(1.0));
    }
}
