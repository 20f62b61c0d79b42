//! Finite-difference verification of the differentiated kernel tensor.

use crate::kernels::{erf_potential, KernelPoint, Tensor3};
use crate::oracles::OracleError;
use crate::Real;

/// Outcome of the two-step Richardson step-size audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepSizeCheck {
    Ok,
    /// Halving the step did not shrink the disagreement as O(h^2): the
    /// roundoff floor has been reached (h too small) or h is outside the
    /// asymptotic range (too large).
    Warning,
}

/// Central second differences of the error-function potential.
pub fn finite_difference_j<T: Real>(
    x: [T; 3],
    t: T,
    nu: T,
    h: T,
) -> Result<Tensor3<T>, OracleError> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r == T::zero() || !(t > T::zero()) || !(h > T::zero()) {
        return Err(OracleError::Domain(
            "finite differences need x != 0, t > 0, h > 0".into(),
        ));
    }
    if h > r / T::of(4.0) {
        return Err(OracleError::Domain("step too large against |x|".into()));
    }
    let phi = |y: [T; 3]| -> Result<T, OracleError> {
        erf_potential(&KernelPoint::new(y, t, nu)).map_err(|e| OracleError::Domain(e.to_string()))
    };
    let mut out = Tensor3::zero();
    let center = phi(x)?;
    for j in 0..3 {
        for m in j..3 {
            let v = if j == m {
                let mut xp = x;
                let mut xm = x;
                xp[j] += h;
                xm[j] -= h;
                (phi(xp)? + phi(xm)? - T::of(2.0) * center) / (h * h)
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
                (phi(pp)? - phi(pm)? - phi(mp)? + phi(mm)?) / (T::of(4.0) * h * h)
            };
            out.0[j][m] = v;
            out.0[m][j] = v;
        }
    }
    Ok(out)
}

/// Finite-difference tensor plus a Richardson audit of the step size: the
/// h and h/2 evaluations must disagree by roughly 4x less than h and 2h do,
/// otherwise h sits outside the second-order regime.
pub fn finite_difference_j_checked<T: Real>(
    x: [T; 3],
    t: T,
    nu: T,
    h: T,
) -> Result<(Tensor3<T>, StepSizeCheck), OracleError> {
    let coarse = finite_difference_j(x, t, nu, h * T::of(2.0))?;
    let mid = finite_difference_j(x, t, nu, h)?;
    let fine = finite_difference_j(x, t, nu, h / T::of(2.0))?;
    let mut d_coarse = T::zero();
    let mut d_fine = T::zero();
    for j in 0..3 {
        for m in 0..3 {
            d_coarse = d_coarse.max((coarse.0[j][m] - mid.0[j][m]).abs());
            d_fine = d_fine.max((mid.0[j][m] - fine.0[j][m]).abs());
        }
    }
    // second order: the (h, h/2) disagreement should be ~1/4 of (2h, h);
    // accept anything better than 1/2, flag the rest
    let check = if d_fine <= d_coarse / T::of(2.0) || d_fine <= T::of(1e-14) * mid.max_abs() {
        StepSizeCheck::Ok
    } else {
        StepSizeCheck::Warning
    };
    Ok((mid, check))
}
