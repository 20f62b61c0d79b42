//! Closed-form pointwise kernel evaluation.
//!
//! The time-dependent Stokes fundamental tensor splits into a Gaussian part
//! and the Hessian of an error-function potential:
//!
//! ```text
//! G_jm(x,t) = delta_jm g(x,t) + J_jm(x,t) / (2 pi^{3/2})
//! g(x,t)    = exp(-|x|^2/(4 nu t)) / (4 nu t pi)^{3/2}
//! J_jm      = d^2/dx_j dx_m [ b(|x|/sqrt(4 nu t)) / |x| ]
//! b(s)      = int_0^s exp(-u^2) du
//! ```
//!
//! `J` is kept without the `1/(2 pi^{3/2})` factor; `oseen_g` applies it.
//! All physical-space kernels vanish for `t < 0`.
//!
//! Near the origin the two bracketed groups of `J` both diverge like
//! `|x|^{-3}` while their sum stays bounded, so below `rho = |x|/sqrt(4 nu t)
//! = 1e-2` the evaluation switches to series expansions that are accurate to
//! machine precision there (the direct form still has ~1e-12 relative
//! cancellation error at the switch point).

use thiserror::Error;

use crate::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    /// Evaluation requested at a singular point of the kernel.
    #[error("singular evaluation: {0}")]
    Singular(&'static str),
    /// Argument outside the kernel's domain.
    #[error("domain error: {0}")]
    Domain(&'static str),
}

/// A 3x3 real tensor value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor3<T>(pub [[T; 3]; 3]);

impl<T: Real> Tensor3<T> {
    pub fn zero() -> Self {
        Tensor3([[T::zero(); 3]; 3])
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for row in &self.0 {
            for &v in row {
                m = m.max(v.abs());
            }
        }
        m
    }

    /// Largest absolute difference from the transpose.
    pub fn asymmetry(&self) -> T {
        let mut m = T::zero();
        for j in 0..3 {
            for k in 0..3 {
                m = m.max((self.0[j][k] - self.0[k][j]).abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|r| r.iter().all(|v| v.is_finite()))
    }
}

/// Argument bundle for the physical-space kernels.
#[derive(Debug, Clone, Copy)]
pub struct KernelPoint<T> {
    pub x: [T; 3],
    pub t: T,
    pub nu: T,
}

impl<T: Real> KernelPoint<T> {
    pub fn new(x: [T; 3], t: T, nu: T) -> Self {
        Self { x, t, nu }
    }

    pub fn radius(&self) -> T {
        (self.x[0] * self.x[0] + self.x[1] * self.x[1] + self.x[2] * self.x[2]).sqrt()
    }
}

fn kronecker<T: Real>(j: usize, m: usize) -> T {
    if j == m {
        T::one()
    } else {
        T::zero()
    }
}

/// `1/(2 pi^{3/2})`, the weight of the Hessian part of `G`.
pub fn hessian_weight<T: Real>() -> T {
    T::one() / (T::of(2.0) * T::PI().powf(T::of(1.5)))
}

/// Heat kernel `g(x,t)`; zero for `t < 0` and, away from the origin, for `t = 0`.
pub fn heat_kernel<T: Real>(p: &KernelPoint<T>) -> Result<T, KernelError> {
    if p.nu <= T::zero() {
        return Err(KernelError::Domain("viscosity must be positive"));
    }
    if p.t < T::zero() {
        return Ok(T::zero());
    }
    let r2 = p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2];
    if p.t == T::zero() {
        if r2 == T::zero() {
            return Err(KernelError::Singular("heat kernel delta limit at x=0, t=0"));
        }
        return Ok(T::zero());
    }
    let four_nu_t = T::of(4.0) * p.nu * p.t;
    Ok((-r2 / four_nu_t).exp() / (four_nu_t * T::PI()).powf(T::of(1.5)))
}

/// `b(s) = int_0^s exp(-u^2) du`, evaluated through the error function.
pub fn b_integral<T: Real>(s: T) -> Result<T, KernelError> {
    if s < T::zero() {
        return Err(KernelError::Domain("b integral argument must be >= 0"));
    }
    Ok(T::PI().sqrt() / T::of(2.0) * s.erf())
}

/// `b(|x|/sqrt(4 nu t)) / |x|`, whose Hessian is `J`.
pub fn erf_potential<T: Real>(p: &KernelPoint<T>) -> Result<T, KernelError> {
    let r = p.radius();
    if r == T::zero() {
        return Err(KernelError::Singular("erf potential at x=0"));
    }
    if p.t <= T::zero() || p.nu <= T::zero() {
        return Err(KernelError::Domain("erf potential requires t > 0, nu > 0"));
    }
    let w = (T::of(4.0) * p.nu * p.t).sqrt();
    Ok(b_integral(r / w)? / r)
}

/// First three radial derivatives of the potential `phi(r) = b(r/w)/r`.
///
/// Series branch below `rho = 1e-2`; every term of the expansions is beyond
/// machine precision at the switch point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialDerivs<T> {
    pub f1: T,
    pub f2: T,
    pub f3: T,
}

pub(crate) fn radial_derivs<T: Real>(r: T, w: T) -> RadialDerivs<T> {
    let rho = r / w;
    if rho < T::of(1e-2) {
        let p = rho * rho;
        // f' = ( -2/3 rho + 2/5 rho^3 - 1/7 rho^5 + 1/27 rho^7 ) / w^2, etc.
        let s1 = rho
            * (T::of(-2.0 / 3.0)
                + p * (T::of(2.0 / 5.0) + p * (T::of(-1.0 / 7.0) + p * T::of(1.0 / 27.0))));
        let s2 = T::of(-2.0 / 3.0)
            + p * (T::of(6.0 / 5.0) + p * (T::of(-5.0 / 7.0) + p * T::of(7.0 / 27.0)));
        let s3 = rho * (T::of(12.0 / 5.0) + p * (T::of(-20.0 / 7.0) + p * T::of(42.0 / 27.0)));
        let w2 = w * w;
        RadialDerivs {
            f1: s1 / w2,
            f2: s2 / (w2 * w),
            f3: s3 / (w2 * w2),
        }
    } else {
        let r2 = r * r;
        let e = (-rho * rho).exp();
        let b = T::PI().sqrt() / T::of(2.0) * rho.erf();
        let f1 = e / (w * r) - b / r2;
        let f2 = T::of(-2.0) * e / (w * w * w) - T::of(2.0) * e / (w * r2)
            + T::of(2.0) * b / (r2 * r);
        let f3 = e
            * (T::of(4.0) * r / (w * w * w * w * w)
                + T::of(4.0) / (w * w * w * r)
                + T::of(6.0) / (w * r2 * r))
            - T::of(6.0) * b / (r2 * r2);
        RadialDerivs { f1, f2, f3 }
    }
}

/// Hessian tensor `J` of the error-function potential; zero for `t < 0`.
pub fn oseen_j<T: Real>(p: &KernelPoint<T>) -> Result<Tensor3<T>, KernelError> {
    if p.t < T::zero() {
        return Ok(Tensor3::zero());
    }
    let r = p.radius();
    if r == T::zero() {
        return Err(KernelError::Singular("J at x=0"));
    }
    if p.t == T::zero() || p.nu <= T::zero() {
        return Err(KernelError::Domain("J requires t > 0, nu > 0"));
    }
    let w = (T::of(4.0) * p.nu * p.t).sqrt();
    let rho = r / w;
    let mut out = Tensor3::zero();
    if rho < T::of(1e-2) {
        // J = delta * D(rho)/w^3 + x_j x_m * E(rho)/w^5 with
        // D = -2/3 + 2/5 p - 1/7 p^2 + 1/27 p^3, E = 4/5 - 4/7 p + 2/9 p^2 - 2/33 p^3
        let p2 = rho * rho;
        let d = T::of(-2.0 / 3.0)
            + p2 * (T::of(2.0 / 5.0)
                + p2 * (T::of(-1.0 / 7.0) + p2 * (T::of(1.0 / 27.0) - p2 * T::of(1.0 / 132.0))));
        let e = T::of(4.0 / 5.0)
            + p2 * (T::of(-4.0 / 7.0)
                + p2 * (T::of(2.0 / 9.0) + p2 * (T::of(-2.0 / 33.0) + p2 * T::of(1.0 / 78.0))));
        let w3 = w * w * w;
        let w5 = w3 * w * w;
        for j in 0..3 {
            for m in 0..3 {
                out.0[j][m] = kronecker::<T>(j, m) * d / w3 + p.x[j] * p.x[m] * e / w5;
            }
        }
    } else {
        let r2 = r * r;
        let r3 = r2 * r;
        let r4 = r2 * r2;
        let r5 = r4 * r;
        let e = (-rho * rho).exp();
        let b = T::PI().sqrt() / T::of(2.0) * rho.erf();
        let w3 = w * w * w;
        for j in 0..3 {
            for m in 0..3 {
                let d = kronecker::<T>(j, m);
                let xx = p.x[j] * p.x[m];
                let gaussian_group = e
                    * (d / (r2 * w) - T::of(3.0) * xx / (r4 * w) - T::of(2.0) * xx / (r2 * w3));
                let saturated_group = b * (T::of(3.0) * xx / r5 - d / r3);
                out.0[j][m] = gaussian_group + saturated_group;
            }
        }
    }
    Ok(out)
}

/// Full tensor `G = delta g + J/(2 pi^{3/2})`; zero for `t < 0`.
pub fn oseen_g<T: Real>(p: &KernelPoint<T>) -> Result<Tensor3<T>, KernelError> {
    if p.t < T::zero() {
        return Ok(Tensor3::zero());
    }
    let g = heat_kernel(p)?;
    let j = oseen_j(p)?;
    let c = hessian_weight::<T>();
    let mut out = Tensor3::zero();
    for row in 0..3 {
        for col in 0..3 {
            out.0[row][col] = kronecker::<T>(row, col) * g + c * j.0[row][col];
        }
    }
    Ok(out)
}

/// Fourier symbol `H(xi,t) = (2 pi)^{-3} (I - xi xi^T/|xi|^2) exp(-nu |xi|^2 t)`.
///
/// Zero for `t < 0`. The projector is undefined at `xi = 0`; grid-level
/// callers use the pass-through convention there instead of this function.
pub fn fourier_h<T: Real>(xi: [T; 3], t: T, nu: T) -> Result<Tensor3<T>, KernelError> {
    let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if xi2 == T::zero() {
        return Err(KernelError::Domain("H projector undefined at xi=0"));
    }
    if nu <= T::zero() {
        return Err(KernelError::Domain("viscosity must be positive"));
    }
    if t < T::zero() {
        return Ok(Tensor3::zero());
    }
    let two_pi = T::of(2.0) * T::PI();
    let norm = (two_pi * two_pi * two_pi).recip();
    let decay = (-nu * xi2 * t).exp();
    let mut out = Tensor3::zero();
    for j in 0..3 {
        for m in 0..3 {
            out.0[j][m] = norm * (kronecker::<T>(j, m) - xi[j] * xi[m] / xi2) * decay;
        }
    }
    Ok(out)
}

/// Gradient of the pressure kernel `(1/(2 pi^{3/2})) b(|x|/sqrt(4 nu t))/|x|`.
pub fn pressure_kernel_grad<T: Real>(p: &KernelPoint<T>) -> Result<[T; 3], KernelError> {
    let r = p.radius();
    if r == T::zero() {
        return Err(KernelError::Singular("pressure kernel gradient at x=0"));
    }
    if p.t <= T::zero() || p.nu <= T::zero() {
        return Err(KernelError::Domain("pressure kernel requires t > 0, nu > 0"));
    }
    let w = (T::of(4.0) * p.nu * p.t).sqrt();
    let f1 = radial_derivs(r, w).f1;
    let c = hessian_weight::<T>();
    Ok([
        c * f1 * p.x[0] / r,
        c * f1 * p.x[1] / r,
        c * f1 * p.x[2] / r,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-14;

    fn pt(x: [f64; 3], t: f64, nu: f64) -> KernelPoint<f64> {
        KernelPoint::new(x, t, nu)
    }

    #[test]
    fn heat_kernel_at_origin_unit_args() {
        // 1/(4 pi)^{3/2}
        let v = heat_kernel(&pt([0.0; 3], 1.0, 1.0)).unwrap();
        assert!((v - 0.02244839026564582).abs() < EPS);
    }

    #[test]
    fn heat_kernel_exponent_one() {
        // |x|^2 = 4 nu t makes the exponent -1
        let t = 0.7f64;
        let nu = 0.3f64;
        let r = (4.0 * nu * t).sqrt();
        let v = heat_kernel(&pt([r, 0.0, 0.0], t, nu)).unwrap();
        let expect = (-1.0f64).exp() / (4.0 * nu * t * std::f64::consts::PI).powf(1.5);
        assert!((v - expect).abs() < EPS * expect);
    }

    #[test]
    fn heat_kernel_reference_point() {
        let v = heat_kernel(&pt([1.0, 2.0, -1.0], 0.7, 0.3)).unwrap();
        assert!((v - 1.843965620651173e-4).abs() < 1e-18);
    }

    #[test]
    fn heat_kernel_causality_and_singularity() {
        assert_eq!(heat_kernel(&pt([1.0, 0.0, 0.0], -0.5, 1.0)).unwrap(), 0.0);
        assert_eq!(heat_kernel(&pt([1.0, 0.0, 0.0], 0.0, 1.0)).unwrap(), 0.0);
        assert!(matches!(
            heat_kernel(&pt([0.0; 3], 0.0, 1.0)),
            Err(KernelError::Singular(_))
        ));
    }

    #[test]
    fn b_integral_values() {
        assert_eq!(b_integral(0.0f64).unwrap(), 0.0);
        assert!((b_integral(0.5f64).unwrap() - 0.46128100641279245).abs() < EPS);
        assert!((b_integral(1.0f64).unwrap() - 0.74682413281242703).abs() < EPS);
        assert!((b_integral(2.0f64).unwrap() - 0.88208139076242168).abs() < EPS);
        // saturation at sqrt(pi)/2
        assert!((b_integral(40.0f64).unwrap() - 0.88622692545275801).abs() < EPS);
        assert!(b_integral(-1e-8f64).is_err());
    }

    #[test]
    fn b_integral_small_argument_linear() {
        for &s in &[1e-3f64, 1e-5, 1e-7] {
            let b = b_integral(s).unwrap();
            assert!((b / s - 1.0).abs() < 2.0 * s * s);
        }
    }

    #[test]
    fn b_integral_monotone_concave_bounded() {
        let sqrt_pi_2 = std::f64::consts::PI.sqrt() / 2.0;
        let mut prev = 0.0;
        let mut prev_inc = f64::INFINITY;
        for i in 1..=400 {
            let s = i as f64 * 0.02;
            let b = b_integral(s).unwrap();
            // strictly increasing until erf saturates in f64
            if s < 5.0 {
                assert!(b > prev, "monotone at s={s}");
            } else {
                assert!(b >= prev, "monotone at s={s}");
            }
            let inc = b - prev;
            // concavity is only meaningful above the roundoff floor
            if inc > 1e-14 {
                assert!(inc <= prev_inc * (1.0 + 1e-12), "concave at s={s}");
            }
            assert!(b <= sqrt_pi_2 + 1e-15, "bounded");
            prev = b;
            prev_inc = inc;
        }
    }

    #[test]
    fn erf_potential_reference_and_scaling() {
        let p = pt([0.3, -1.1, 0.7], 0.25, 0.8);
        let v = erf_potential(&p).unwrap();
        assert!((v - 0.63961448412827018).abs() < 1e-15);

        // large |x|: b saturates, value -> (sqrt(pi)/2)/|x|
        let far = pt([50.0, 0.0, 0.0], 0.25, 0.8);
        let vf = erf_potential(&far).unwrap();
        assert!((vf - 0.88622692545275801 / 50.0).abs() < 1e-17);

        // scaling: phi(lambda x, lambda^2 t) = phi(x, t)/lambda
        for &lambda in &[0.5, 2.0, 7.0] {
            let scaled = pt(
                [0.3 * lambda, -1.1 * lambda, 0.7 * lambda],
                0.25 * lambda * lambda,
                0.8,
            );
            let vs = erf_potential(&scaled).unwrap();
            assert!((vs * lambda - v).abs() < 1e-14 * v.abs());
        }
    }

    #[test]
    fn erf_potential_long_time_decay() {
        // fixed x, t -> infinity: value ~ |x|/sqrt(4 nu t)/|x| -> t^{-1/2}
        let x = [1.0, 0.0, 0.0];
        let v1 = erf_potential(&pt(x, 1e4, 1.0)).unwrap();
        let v2 = erf_potential(&pt(x, 4e4, 1.0)).unwrap();
        assert!((v1 / v2 - 2.0).abs() < 1e-4);
    }

    #[test]
    fn oseen_j_reference_tensor() {
        // frozen from a high-precision Hessian of the potential
        let expect = [
            [0.555064171675983961, 0.552095116264815283, -0.33125706975888917],
            [0.552095116264815283, -0.273078502721238964, -0.165628534879444585],
            [-0.33125706975888917, -0.165628534879444585, -0.449748939925979854],
        ];
        let j = oseen_j(&pt([1.0, 0.5, -0.3], 0.4, 0.2)).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                assert!(
                    (j.0[r][c] - expect[r][c]).abs() < 1e-14,
                    "entry ({r},{c}): {} vs {}",
                    j.0[r][c],
                    expect[r][c]
                );
            }
        }
        assert!(j.asymmetry() == 0.0);
    }

    #[test]
    fn oseen_j_series_branch_consistency() {
        // straddle the series switch: both branches must agree to ~1e-11
        let w = (4.0f64 * 0.2 * 0.4).sqrt();
        for &scale in &[0.9e-2, 1.1e-2] {
            let r = scale * w;
            let x = [r * 0.6, r * 0.64, r * 0.48];
            let p = pt(x, 0.4, 0.2);
            let j = oseen_j(&p).unwrap();
            // compare against the opposite branch evaluated in f64 by nudging rho
            // across the switch through a slightly different nu
            let j_ref = {
                let mut sum = Tensor3::zero();
                let rd = radial_derivs(p.radius(), w);
                let rr = p.radius();
                for a in 0..3 {
                    for b in 0..3 {
                        let xh_a = x[a] / rr;
                        let xh_b = x[b] / rr;
                        let d = if a == b { 1.0 } else { 0.0 };
                        sum.0[a][b] = rd.f2 * xh_a * xh_b + rd.f1 / rr * (d - xh_a * xh_b);
                    }
                }
                sum
            };
            for a in 0..3 {
                for b in 0..3 {
                    assert!(
                        (j.0[a][b] - j_ref.0[a][b]).abs() < 1e-11 * j.max_abs(),
                        "scale {scale} entry ({a},{b})"
                    );
                }
            }
        }
    }

    #[test]
    fn oseen_j_causality_and_errors() {
        assert_eq!(
            oseen_j(&pt([1.0, 0.0, 0.0], -1.0, 0.5)).unwrap(),
            Tensor3::zero()
        );
        assert!(oseen_j(&pt([0.0; 3], 1.0, 0.5)).is_err());
    }

    #[test]
    fn oseen_g_trace_is_twice_heat_kernel() {
        // the Fourier symbol has trace 2, so trace(G) = 2 g
        let pts = [
            ([1.0, 0.5, -0.3], 0.4, 0.2),
            ([0.1, 0.0, 0.05], 0.9, 1.3),
            ([2.0, -2.0, 1.0], 0.05, 0.7),
            ([1e-3, 2e-3, -0.5e-3], 0.3, 0.5),
        ];
        for &(x, t, nu) in &pts {
            let p = pt(x, t, nu);
            let g = heat_kernel(&p).unwrap();
            let gg = oseen_g(&p).unwrap();
            assert!(
                (gg.trace() - 2.0 * g).abs() <= 1e-10 * (g.abs() + f64::EPSILON),
                "trace identity at {x:?}"
            );
        }
    }

    #[test]
    fn oseen_g_scaling_law() {
        // G(lambda x, lambda^2 t) = lambda^{-3} G(x, t) at fixed nu
        let p = pt([0.8, -0.4, 0.2], 0.3, 0.6);
        let g0 = oseen_g(&p).unwrap();
        for &lambda in &[0.5f64, 2.0, 3.7] {
            let ps = pt(
                [0.8 * lambda, -0.4 * lambda, 0.2 * lambda],
                0.3 * lambda * lambda,
                0.6,
            );
            let gs = oseen_g(&ps).unwrap();
            for r in 0..3 {
                for c in 0..3 {
                    let want = g0.0[r][c] / (lambda * lambda * lambda);
                    assert!((gs.0[r][c] - want).abs() < 1e-13 * g0.max_abs());
                }
            }
        }
    }

    #[test]
    fn oseen_g_vanishes_for_negative_time() {
        assert_eq!(
            oseen_g(&pt([1.0, 1.0, 1.0], -0.3, 1.0)).unwrap(),
            Tensor3::zero()
        );
    }

    #[test]
    fn fourier_h_axis_projection() {
        // xi = (1,0,0), t = 0: (2 pi)^{-3} diag(0,1,1)
        let h = fourier_h([1.0, 0.0, 0.0], 0.0, 1.0).unwrap();
        let norm = (2.0 * std::f64::consts::PI).powi(3).recip();
        for j in 0..3 {
            for m in 0..3 {
                let want = if j == m && j > 0 { norm } else { 0.0 };
                assert!((h.0[j][m] - want).abs() < 1e-18);
            }
        }
    }

    #[test]
    fn fourier_h_annihilated_by_xi() {
        let samples = [
            ([0.3, -1.0, 2.0], 0.7, 0.4),
            ([5.0, 5.0, -1.0], 0.01, 2.0),
            ([0.0, 0.0, 1.0], 3.0, 1.0),
        ];
        for &(xi, t, nu) in &samples {
            let h = fourier_h(xi, t, nu).unwrap();
            for m in 0..3 {
                let contraction: f64 = (0..3).map(|j| xi[j] * h.0[j][m]).sum();
                assert!(contraction.abs() < 1e-16);
            }
            // |H| <= (2 pi)^{-3} e^{-nu t |xi|^2} entrywise
            let xi2: f64 = xi.iter().map(|v| v * v).sum();
            let bound = (2.0 * std::f64::consts::PI).powi(3).recip() * (-nu * t * xi2).exp();
            assert!(h.max_abs() <= bound * (1.0 + 1e-14));
        }
    }

    #[test]
    fn fourier_h_zero_mode_and_causality() {
        assert!(fourier_h([0.0; 3], 1.0, 1.0).is_err());
        assert_eq!(
            fourier_h([1.0, 0.0, 0.0], -1.0, 1.0).unwrap(),
            Tensor3::zero()
        );
    }

    #[test]
    fn pressure_grad_reference_and_structure() {
        let p = pt([1.0, 0.5, -0.3], 0.4, 0.2);
        let g = pressure_kernel_grad(&p).unwrap();
        let expect = [
            -0.049307984476317739,
            -0.0246539922381588695,
            0.0147923953428953217,
        ];
        for i in 0..3 {
            assert!((g[i] - expect[i]).abs() < 1e-15);
        }
        // odd under x -> -x
        let m = pressure_kernel_grad(&pt([-1.0, -0.5, 0.3], 0.4, 0.2)).unwrap();
        for i in 0..3 {
            assert!((g[i] + m[i]).abs() < 1e-18);
        }
        // parallel to x
        let cross = [
            g[1] * p.x[2] - g[2] * p.x[1],
            g[2] * p.x[0] - g[0] * p.x[2],
            g[0] * p.x[1] - g[1] * p.x[0],
        ];
        for c in cross {
            assert!(c.abs() < 1e-16);
        }
    }
}
