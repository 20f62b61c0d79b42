//! Numerical check of the kernel decay estimate.
//!
//! The estimate bounds the weighted convolution
//! `N0( int |G(x-y,t)| (1+|y|)^{-1} dy ) <= c t^{-1/2}`. Its proof splits the
//! norm into a value part, bounded through the weighted integral itself, and
//! a gradient part, bounded by the unweighted total mass of the kernel
//! gradient (for the Gaussian term that mass is exactly `2/(nu t pi)^{1/2}`).
//! The scan mirrors that split:
//!
//! ```text
//! M(t) = sup_x maxrow int |G_jm(z)| (1+|x-z|)^{-1} dz   (value part)
//!      + maxrow int ||grad G_jm(z)|| dz                 (gradient mass)
//! ```
//!
//! where `maxrow` is the max row sum over entries (the operator infinity
//! norm, an upper bound for any vector contraction). Both parts are computed
//! by spherical product quadrature; the gradient mass scales exactly like
//! `t^{-1/2}` by the kernel's parabolic scaling, so the fitted log-log slope
//! of `M` sits near -1/2.

use crate::kernels::{hessian_weight, radial_derivs};
use crate::oracles::quadrature::gauss_legendre;
use crate::oracles::OracleError;
use crate::Real;

/// One scan row.
#[derive(Debug, Clone)]
pub struct DecayScanEntry<T> {
    pub t: T,
    pub value_part: T,
    pub gradient_mass: T,
    pub total: T,
}

#[derive(Debug, Clone)]
pub struct DecayScan<T> {
    pub entries: Vec<DecayScanEntry<T>>,
    /// Least-squares slope of `log M` against `log t`.
    pub slope: T,
    pub intercept: T,
}

/// Entrywise `|G_jm|` and `||grad G_jm||_2` at a point, assembled from the
/// radial derivatives of the error-function potential.
fn kernel_value_and_grad<T: Real>(z: [T; 3], t: T, nu: T) -> ([[T; 3]; 3], [[T; 3]; 3]) {
    let r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    let r = r2.sqrt();
    let w = (T::of(4.0) * nu * t).sqrt();
    let rho = r / w;
    let c = hessian_weight::<T>();
    let four_nu_t = T::of(4.0) * nu * t;
    let g = (-rho * rho).exp() / (four_nu_t * T::PI()).powf(T::of(1.5));
    let dg = -g * r / (T::of(2.0) * nu * t);
    let rd = radial_derivs(r, w);
    let xh = [z[0] / r, z[1] / r, z[2] / r];
    let mut val = [[T::zero(); 3]; 3];
    let mut grad = [[T::zero(); 3]; 3];
    for j in 0..3 {
        for m in 0..3 {
            let d = if j == m { T::one() } else { T::zero() };
            let jjm = rd.f2 * xh[j] * xh[m] + rd.f1 / r * (d - xh[j] * xh[m]);
            val[j][m] = (d * g + c * jjm).abs();
            let mut norm_sq = T::zero();
            for (l, xh_l) in xh.iter().enumerate() {
                let dl_j = if l == j { T::one() } else { T::zero() };
                let dl_m = if l == m { T::one() } else { T::zero() };
                let third = rd.f3 * xh[j] * xh[m] * *xh_l
                    + (rd.f2 / r - rd.f1 / r2)
                        * (dl_j * xh[m] + dl_m * xh[j] + d * *xh_l
                            - T::of(3.0) * xh[j] * xh[m] * *xh_l);
                let entry = d * dg * *xh_l + c * third;
                norm_sq += entry * entry;
            }
            grad[j][m] = norm_sq.sqrt();
        }
    }
    (val, grad)
}

struct SphericalRule<T> {
    /// (radius, radial weight) including the r^2 Jacobian factor.
    radial: Vec<(T, T)>,
    /// (cos theta, weight).
    polar: Vec<(T, T)>,
    n_azimuth: usize,
}

impl<T: Real> SphericalRule<T> {
    /// Graded rule: dense Gauss-Legendre through the Gaussian core `[0, 8w]`,
    /// log-spaced Gauss-Legendre out to `r_cut`.
    fn new(w: T, r_cut: T) -> Self {
        let (xs, ws) = gauss_legendre::<T>(48);
        let mut radial = Vec::new();
        let near_end = (T::of(8.0) * w).min(r_cut / T::of(2.0));
        for (x, wt) in xs.iter().zip(&ws) {
            let r = (*x + T::one()) / T::of(2.0) * near_end;
            radial.push((r, *wt * near_end / T::of(2.0)));
        }
        let (a, b) = (near_end.ln(), r_cut.ln());
        for (x, wt) in xs.iter().zip(&ws) {
            let s = (*x + T::one()) / T::of(2.0) * (b - a) + a;
            let r = s.exp();
            radial.push((r, *wt * (b - a) / T::of(2.0) * r));
        }
        let (pc, pw) = gauss_legendre::<T>(16);
        SphericalRule {
            radial,
            polar: pc.into_iter().zip(pw).collect(),
            n_azimuth: 24,
        }
    }

    fn integrate(&self, mut f: impl FnMut([T; 3], T)) {
        let dphi = T::of(2.0) * T::PI() / T::of_usize(self.n_azimuth);
        for &(r, wr) in &self.radial {
            for &(cu, wu) in &self.polar {
                let su = (T::one() - cu * cu).max(T::zero()).sqrt();
                for ip in 0..self.n_azimuth {
                    let phi = (T::of_usize(ip) + T::of(0.5)) * dphi;
                    let dir = [su * phi.cos(), su * phi.sin(), cu];
                    let weight = wr * wu * dphi * r * r;
                    f([r * dir[0], r * dir[1], r * dir[2]], weight);
                }
            }
        }
    }
}

fn max_row_sum<T: Real>(m: &[[T; 3]; 3]) -> T {
    let mut best = T::zero();
    for row in m {
        let s = row[0] + row[1] + row[2];
        best = best.max(s);
    }
    best
}

/// Unweighted total mass of the kernel gradient, row-max contracted.
pub fn kernel_gradient_mass<T: Real>(t: T, nu: T, r_cut: T) -> T {
    let w = (T::of(4.0) * nu * t).sqrt();
    let rule = SphericalRule::new(w, r_cut);
    let mut acc = [[T::zero(); 3]; 3];
    rule.integrate(|z, weight| {
        let (_, grad) = kernel_value_and_grad(z, t, nu);
        for j in 0..3 {
            for m in 0..3 {
                acc[j][m] += grad[j][m] * weight;
            }
        }
    });
    max_row_sum(&acc)
}

/// Sup over probe points of the weighted value integral
/// `maxrow int |G(z)| (1+|x-z|)^{-1} dz`.
pub fn weighted_value_sup<T: Real>(t: T, nu: T, r_cut: T) -> T {
    let w = (T::of(4.0) * nu * t).sqrt();
    let rule = SphericalRule::new(w, r_cut);
    let probes: Vec<[T; 3]> = {
        let mut p = vec![[T::zero(); 3]];
        for &scale in &[0.5, 1.0, 2.0] {
            p.push([T::zero(), T::zero(), T::of(scale) * w]);
            let d = T::of(scale) * w / T::of(3.0f64.sqrt());
            p.push([d, d, d]);
        }
        p
    };
    let mut best = T::zero();
    for xp in probes {
        let mut acc = [[T::zero(); 3]; 3];
        rule.integrate(|z, weight| {
            let (val, _) = kernel_value_and_grad(z, t, nu);
            let dx = [xp[0] - z[0], xp[1] - z[1], xp[2] - z[2]];
            let dist = (dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2]).sqrt();
            let rho_w = (T::one() + dist).recip();
            for j in 0..3 {
                for m in 0..3 {
                    acc[j][m] += val[j][m] * rho_w * weight;
                }
            }
        });
        best = best.max(max_row_sum(&acc));
    }
    best
}

/// Estimate of the gradient-mass truncation tail beyond `r_cut`, using the
/// saturated far field `||grad J|| ~ b_inf |3 sym - 15 xhat^3| / r^4`.
fn gradient_tail_estimate<T: Real>(r_cut: T) -> T {
    let b_inf = T::PI().sqrt() / T::of(2.0);
    let c = hessian_weight::<T>();
    // angular factor: integrate the far-field row sums once
    let (pc, pw) = gauss_legendre::<T>(16);
    let n_az = 24;
    let dphi = T::of(2.0) * T::PI() / T::of_usize(n_az);
    let mut acc = [[T::zero(); 3]; 3];
    for (cu, wu) in pc.iter().zip(&pw) {
        let su = (T::one() - *cu * *cu).max(T::zero()).sqrt();
        for ip in 0..n_az {
            let phi = (T::of_usize(ip) + T::of(0.5)) * dphi;
            let xh = [su * phi.cos(), su * phi.sin(), *cu];
            for j in 0..3 {
                for m in 0..3 {
                    let d = if j == m { T::one() } else { T::zero() };
                    let mut norm_sq = T::zero();
                    for (l, xh_l) in xh.iter().enumerate() {
                        let dl_j = if l == j { T::one() } else { T::zero() };
                        let dl_m = if l == m { T::one() } else { T::zero() };
                        let e = T::of(3.0) * (dl_j * xh[m] + dl_m * xh[j] + d * *xh_l)
                            - T::of(15.0) * xh[j] * xh[m] * *xh_l;
                        norm_sq += e * e;
                    }
                    acc[j][m] += norm_sq.sqrt() * *wu * dphi;
                }
            }
        }
    }
    // int_{r_cut}^inf r^{-4} r^2 dr = 1/r_cut
    max_row_sum(&acc) * c * b_inf / r_cut
}

/// Scan `M(t)` over the given times and fit the log-log slope.
pub fn kernel_decay_scan<T: Real>(t_list: &[T], nu: T) -> Result<DecayScan<T>, OracleError> {
    if t_list.len() < 3 {
        return Err(OracleError::Domain("decay scan needs at least 3 times".into()));
    }
    let mut r_cut = T::of(60.0);
    let mut entries = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if !(t > T::zero()) {
            return Err(OracleError::Domain("decay scan times must be positive".into()));
        }
        let mut grad = kernel_gradient_mass(t, nu, r_cut);
        // widen once if the analytic far-field tail is not negligible
        let mut tail = gradient_tail_estimate(r_cut);
        if tail > T::of(0.05) * grad {
            r_cut = r_cut * T::of(2.0);
            grad = kernel_gradient_mass(t, nu, r_cut);
            tail = gradient_tail_estimate(r_cut);
            if tail > T::of(0.05) * grad {
                return Err(OracleError::TailCheck(format!(
                    "gradient-mass tail {:.3e} above 5% after widening",
                    tail.to_f64().unwrap_or(f64::NAN)
                )));
            }
        }
        let value = weighted_value_sup(t, nu, r_cut);
        entries.push(DecayScanEntry {
            t,
            value_part: value,
            gradient_mass: grad,
            total: value + grad,
        });
    }
    let n = T::of_usize(entries.len());
    let mut sx = T::zero();
    let mut sy = T::zero();
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for e in &entries {
        let x = e.t.ln();
        let y = e.total.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    Ok(DecayScan {
        entries,
        slope,
        intercept,
    })
}

/// High-accuracy radial quadrature of `int |grad g| dx`; the closed form is
/// `2 / sqrt(nu t pi)`.
pub fn grad_g_mass<T: Real>(t: T, nu: T) -> T {
    let w = (T::of(4.0) * nu * t).sqrt();
    let (xs, ws) = gauss_legendre::<T>(200);
    let r_cut = T::of(12.0) * w;
    let mut sum = T::zero();
    let four_nu_t = T::of(4.0) * nu * t;
    let norm = (four_nu_t * T::PI()).powf(T::of(1.5));
    for (x, wt) in xs.iter().zip(&ws) {
        let r = (*x + T::one()) / T::of(2.0) * r_cut;
        let g = (-r * r / four_nu_t).exp() / norm;
        let dg = g * r / (T::of(2.0) * nu * t);
        sum += *wt * dg * T::of(4.0) * T::PI() * r * r;
    }
    sum * r_cut / T::of(2.0)
}

pub fn grad_g_mass_exact<T: Real>(t: T, nu: T) -> T {
    T::of(2.0) / (nu * t * T::PI()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_mass_of_heat_kernel_matches_closed_form() {
        for &(t, nu) in &[(0.25f64, 1.0f64), (0.7, 0.3), (0.05, 2.0)] {
            let got = grad_g_mass(t, nu);
            let want = grad_g_mass_exact(t, nu);
            assert!(
                (got - want).abs() < 1e-6 * want,
                "t={t} nu={nu}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn kernel_gradient_mass_scales_as_inverse_sqrt_t() {
        // pure parabolic scaling: the whole-space integral is C t^{-1/2};
        // the truncated quadrature keeps that within a percent
        let nu = 1.0;
        let a = kernel_gradient_mass(0.04f64, nu, 60.0);
        let b = kernel_gradient_mass(0.16f64, nu, 60.0);
        let ratio = a / b;
        assert!(
            (ratio - 2.0).abs() < 0.05,
            "t^-1/2 scaling violated: ratio {ratio}"
        );
    }

    #[test]
    fn doubling_viscosity_preserves_the_slope() {
        let ts: Vec<f64> = (0..5)
            .map(|i| 0.01 * (100.0f64).powf(i as f64 / 4.0))
            .collect();
        let s1 = kernel_decay_scan(&ts, 1.0).unwrap();
        let s2 = kernel_decay_scan(&ts, 2.0).unwrap();
        assert!((s1.slope - s2.slope).abs() < 0.05);
        // larger viscosity shrinks the kernel mass at matched times
        assert!(s2.entries[0].total < s1.entries[0].total);
    }
}
