//! Brute-force quadrature verifiers for the closed-form kernels.

use num_complex::Complex;

use crate::kernels::{oseen_j, KernelPoint, Tensor3};
use crate::oracles::OracleError;
use crate::Real;

/// Cube `[-r_max, r_max]^3` midpoint rule for the Fourier inversion of the
/// kernel symbol. Midpoint nodes avoid the projector's `xi = 0` point.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec<T> {
    pub r_max: T,
    pub nodes_per_axis: usize,
}

impl<T: Real> QuadratureSpec<T> {
    /// Cutoff chosen so the Gaussian tail is below 1e-12, with node count
    /// adapted to the oscillation scale `|x|`.
    pub fn auto(x: [T; 3], t: T, nu: T) -> Self {
        let r_max = (T::of(27.7) / (nu * t)).sqrt();
        let x_norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        // at least ~5 nodes per oscillation period 2 pi / |x|
        let for_oscillation = (r_max * x_norm.max(T::one())).to_f64().unwrap() * 1.6;
        let nodes = (for_oscillation.ceil() as usize).clamp(128, 256);
        QuadratureSpec {
            r_max,
            nodes_per_axis: nodes + nodes % 2,
        }
    }

    fn tail_check(&self, t: T, nu: T) -> Result<(), OracleError> {
        let tail = (-nu * t * self.r_max * self.r_max).exp().to_f64().unwrap();
        if tail > 1e-12 {
            return Err(OracleError::TailCheck(format!(
                "Gaussian tail e^(-nu t R^2) = {tail:e} exceeds 1e-12; widen r_max"
            )));
        }
        Ok(())
    }
}

/// Direct 3D quadrature of the Fourier representation
/// `G(x,t) = (2 pi)^{-3} int e^{i xi.x} (I - xi xi^T/|xi|^2) e^{-nu t |xi|^2} d xi`.
pub fn numeric_g_quadrature<T: Real>(
    x: [T; 3],
    t: T,
    nu: T,
    spec: &QuadratureSpec<T>,
) -> Result<Tensor3<T>, OracleError> {
    if !(t > T::zero()) {
        return Err(OracleError::Domain(
            "Fourier quadrature needs t > 0 for absolute integrability".into(),
        ));
    }
    spec.tail_check(t, nu)?;
    let n = spec.nodes_per_axis;
    let h = T::of(2.0) * spec.r_max / T::of_usize(n);
    // separable per-axis factors e^{i xi x_a} e^{-nu t xi^2}
    let mut axis: [Vec<(T, Complex<T>)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (a, slot) in axis.iter_mut().enumerate() {
        *slot = (0..n)
            .map(|i| {
                let xi = -spec.r_max + (T::of_usize(i) + T::of(0.5)) * h;
                let damp = (-nu * t * xi * xi).exp();
                let phase = xi * x[a];
                (xi, Complex::new(phase.cos(), phase.sin()) * damp)
            })
            .collect();
    }
    let mut acc = Tensor3::<T>::zero();
    for (xi0, w0) in &axis[0] {
        for (xi1, w1) in &axis[1] {
            let w01 = *w0 * *w1;
            for (xi2, w2) in &axis[2] {
                let re = (w01 * *w2).re;
                let norm2 = *xi0 * *xi0 + *xi1 * *xi1 + *xi2 * *xi2;
                let xi = [*xi0, *xi1, *xi2];
                for j in 0..3 {
                    for m in j..3 {
                        let d = if j == m { T::one() } else { T::zero() };
                        acc.0[j][m] += re * (d - xi[j] * xi[m] / norm2);
                    }
                }
            }
        }
    }
    let two_pi = T::of(2.0) * T::PI();
    let scale = h * h * h / (two_pi * two_pi * two_pi);
    let mut out = Tensor3::zero();
    for j in 0..3 {
        for m in j..3 {
            out.0[j][m] = acc.0[j][m] * scale;
            out.0[m][j] = out.0[j][m];
        }
    }
    Ok(out)
}

/// Scalar radial potential behind the projector part of the symbol:
/// `S(r) = (2 pi)^{-2} int_0^inf e^{-nu t rho^2} (2 sin(rho r)/(rho r)) d rho`.
pub fn i2_radial_potential<T: Real>(r: T, t: T, nu: T) -> T {
    // Gauss-Legendre on [0, R] with R from the Gaussian tail
    let r_cut = (T::of(34.5) / (nu * t)).sqrt();
    let n = 600;
    let (nodes, weights) = gauss_legendre::<T>(n);
    let mut sum = T::zero();
    for (xi, w) in nodes.iter().zip(&weights) {
        let rho = (T::one() + *xi) / T::of(2.0) * r_cut;
        let arg = rho * r;
        let sinc = if arg.abs() < T::of(1e-8) {
            T::one() - arg * arg / T::of(6.0)
        } else {
            arg.sin() / arg
        };
        sum += *w * (-nu * t * rho * rho).exp() * T::of(2.0) * sinc;
    }
    sum * r_cut / T::of(2.0) / (T::of(2.0) * T::PI()) / (T::of(2.0) * T::PI())
}

/// Finite-difference Hessian of the radial potential, the quadrature route to
/// the projector part of the kernel. Cross-checks the closed-form `J` via
/// `I2 = J / (2 pi^{3/2})`.
pub fn numeric_i2<T: Real>(x: [T; 3], t: T, nu: T, h: T) -> Result<Tensor3<T>, OracleError> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r == T::zero() || !(t > T::zero()) {
        return Err(OracleError::Domain("I2 quadrature needs x != 0, t > 0".into()));
    }
    let s = |y: [T; 3]| {
        let rr = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        i2_radial_potential(rr, t, nu)
    };
    let mut out = Tensor3::zero();
    for j in 0..3 {
        for m in 0..3 {
            let val = if j == m {
                let mut xp = x;
                let mut xm = x;
                xp[j] += h;
                xm[j] -= h;
                (s(xp) + s(xm) - T::of(2.0) * s(x)) / (h * h)
            } else {
                let mut pp = x;
                let mut pm = x;
                let mut mp = x;
                let mut mm = x;
                pp[j] += h;
                pp[m] += h;
                pm[j] += h;
                pm[m] -= h;
                mp[j] -= h;
                mp[m] += h;
                mm[j] -= h;
                mm[m] -= h;
                (s(pp) - s(pm) - s(mp) + s(mm)) / (T::of(4.0) * h * h)
            };
            out.0[j][m] = val;
        }
    }
    Ok(out)
}

/// Both sides of the sine-transform identity
/// `int_0^inf sin(s y)/s e^{-a s^2} ds = (pi/2) erf(y / (2 sqrt a))`.
pub fn erf_identity_sides<T: Real>(y: T, a: T) -> (T, T) {
    let r_cut = (T::of(36.0) / a).sqrt();
    let n = 20_000usize; // Simpson pairs
    let h = r_cut / T::of_usize(2 * n);
    let f = |s: T| -> T {
        if s == T::zero() {
            y
        } else {
            (s * y).sin() / s * (-a * s * s).exp()
        }
    };
    let mut sum = f(T::zero()) + f(r_cut);
    for i in 1..(2 * n) {
        let w = if i % 2 == 1 { T::of(4.0) } else { T::of(2.0) };
        sum += w * f(h * T::of_usize(i));
    }
    let lhs = sum * h / T::of(3.0);
    let rhs = T::PI() / T::of(2.0) * (y / (T::of(2.0) * a.sqrt())).erf();
    (lhs, rhs)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1]
/// (Newton iteration on Legendre polynomials).
pub(crate) fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        nodes[n - 1 - i] = T::of(x);
        weights[n - 1 - i] = T::of(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Cross-check helper: `J/(2 pi^{3/2})` from the closed form.
pub fn scaled_oseen_j<T: Real>(p: &KernelPoint<T>) -> Result<Tensor3<T>, OracleError> {
    let j = oseen_j(p).map_err(|e| OracleError::Domain(e.to_string()))?;
    let c = crate::kernels::hessian_weight::<T>();
    let mut out = Tensor3::zero();
    for a in 0..3 {
        for b in 0..3 {
            out.0[a][b] = c * j.0[a][b];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{heat_kernel, oseen_g};

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre::<f64>(12);
        // int_{-1}^{1} x^8 dx = 2/9
        let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert!((got - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn quadrature_reproduces_closed_form_g() {
        let x = [1.0f64, 0.0, 0.0];
        let (t, nu) = (0.5f64, 0.1f64);
        let spec = QuadratureSpec::auto(x, t, nu);
        let num = numeric_g_quadrature(x, t, nu, &spec).unwrap();
        let exact = oseen_g(&KernelPoint::new(x, t, nu)).unwrap();
        for j in 0..3 {
            for m in 0..3 {
                let denom = exact.max_abs();
                assert!(
                    (num.0[j][m] - exact.0[j][m]).abs() < 1e-3 * denom,
                    "entry ({j},{m}): {} vs {}",
                    num.0[j][m],
                    exact.0[j][m]
                );
            }
        }
        // trace of the quadrature equals 2 g within quadrature error
        let g = heat_kernel(&KernelPoint::new(x, t, nu)).unwrap();
        assert!((num.trace() - 2.0 * g).abs() < 1e-3 * g);
        assert!(num.asymmetry() < 1e-12 * num.max_abs());
    }

    #[test]
    fn tail_check_rejects_small_cutoff() {
        let spec = QuadratureSpec {
            r_max: 1.0,
            nodes_per_axis: 16,
        };
        assert!(matches!(
            numeric_g_quadrature([1.0, 0.0, 0.0], 0.5, 0.1, &spec),
            Err(OracleError::TailCheck(_))
        ));
    }

    #[test]
    fn i2_matches_scaled_j() {
        let x = [1.0f64, 0.5, -0.3];
        let (t, nu) = (0.4f64, 0.2f64);
        let num = numeric_i2(x, t, nu, 1e-3).unwrap();
        let exact = scaled_oseen_j(&KernelPoint::new(x, t, nu)).unwrap();
        for j in 0..3 {
            for m in 0..3 {
                assert!(
                    (num.0[j][m] - exact.0[j][m]).abs() < 1e-4 * exact.max_abs(),
                    "I2 entry ({j},{m}): {} vs {}",
                    num.0[j][m],
                    exact.0[j][m]
                );
            }
        }
    }

    #[test]
    fn erf_identity_reference_pairs() {
        // frozen reference: both sides at (1,1) equal 0.81759929616592601
        let (lhs, rhs) = erf_identity_sides(1.0f64, 1.0f64);
        assert!((rhs - 0.81759929616592601).abs() < 1e-14);
        assert!((lhs - rhs).abs() < 1e-8);
    }
}
