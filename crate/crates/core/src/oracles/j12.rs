//! Scan of the weakly-singular tail bound.
//!
//! The strongest-singularity piece of the weighted kernel integral is
//! `J1(q) = int b(|z|) / (|z|^3 (1 + |x+z|)) dz` with `q = |x|`, split at
//! `|z| = 1` into `J11 + J12`. The claimed bounds are `J11 <= c (1+q)^{-1}`
//! and `J12 <= c ln(3+q) / (2+q)`. In spherical coordinates the angular
//! integral is elementary:
//!
//! ```text
//! int_{-1}^{1} du / (1 + sqrt(r^2 + q^2 - 2 r q u))
//!   = [w - ln(1+w)]_{|r-q|}^{r+q} / (r q),
//! ```
//!
//! leaving one radial quadrature per q.

use crate::oracles::quadrature::gauss_legendre;
use crate::oracles::OracleError;
use crate::Real;

fn b_of<T: Real>(r: T) -> T {
    T::PI().sqrt() / T::of(2.0) * r.erf()
}

/// The elementary angular integral above.
fn angular<T: Real>(r: T, q: T) -> T {
    let f = |w: T| w - (T::one() + w).ln();
    let hi = r + q;
    let lo = (r - q).abs();
    (f(hi) - f(lo)) / (r * q)
}

/// Outer piece `J12(q) = 2 pi int_1^inf (b(r)/r) * angular(r, q) dr`,
/// quadratured in log space out to a cutoff with tail below 1e-8.
pub fn j12<T: Real>(q: T) -> Result<T, OracleError> {
    if q < T::one() {
        return Err(OracleError::Domain("scan is defined for q >= 1".into()));
    }
    // integrand ~ 2 b_inf / r^2 for large r: tail ~ 4 pi b_inf / r_cut
    let mut r_cut = T::of(2.0e9);
    for _ in 0..3 {
        let tail = T::of(4.0) * T::PI() * (T::PI().sqrt() / T::of(2.0)) / r_cut;
        if tail.to_f64().unwrap() <= 1e-8 {
            let (xs, ws) = gauss_legendre::<T>(600);
            let (a, b) = (T::zero(), r_cut.ln());
            let mut sum = T::zero();
            for (x, w) in xs.iter().zip(&ws) {
                let s = (*x + T::one()) / T::of(2.0) * (b - a) + a;
                let r = s.exp();
                sum += *w * (b - a) / T::of(2.0) * r * (b_of(r) / r) * angular(r, q);
            }
            return Ok(T::of(2.0) * T::PI() * sum);
        }
        r_cut = r_cut * T::of(10.0);
    }
    Err(OracleError::TailCheck(
        "outer radial truncation tail above 1e-8".into(),
    ))
}

/// Inner piece `J11(q) = 2 pi int_0^1 (b(r)/r) * angular(r, q) dr`
/// (bounded near 0 because `b(r)/r -> 1`).
pub fn j11<T: Real>(q: T) -> T {
    let (xs, ws) = gauss_legendre::<T>(200);
    let mut sum = T::zero();
    for (x, w) in xs.iter().zip(&ws) {
        let r = (*x + T::one()) / T::of(2.0);
        sum += *w / T::of(2.0) * (b_of(r) / r) * angular(r, q);
    }
    T::of(2.0) * T::PI() * sum
}

#[derive(Debug, Clone)]
pub struct J12Scan<T> {
    /// `(q, J12(q), J12(q) (2+q)/ln(3+q))` per scan point.
    pub rows: Vec<(T, T, T)>,
    pub ratio_max: T,
    pub ratio_min: T,
    /// Fitted decay exponent of J11 against (1+q).
    pub j11_exponent: T,
}

/// Scan the bound ratio over the requested q values and fit J11's decay.
pub fn j12_bound_scan<T: Real>(q_list: &[T]) -> Result<J12Scan<T>, OracleError> {
    if q_list.len() < 2 {
        return Err(OracleError::Domain("scan needs at least 2 points".into()));
    }
    let mut rows = Vec::with_capacity(q_list.len());
    let mut ratio_max = T::zero();
    let mut ratio_min = T::infinity();
    for &q in q_list {
        let v = j12(q)?;
        let ratio = v * (T::of(2.0) + q) / (T::of(3.0) + q).ln();
        ratio_max = ratio_max.max(ratio);
        ratio_min = ratio_min.min(ratio);
        rows.push((q, v, ratio));
    }
    // least squares of ln J11 on ln(1+q)
    let mut sx = T::zero();
    let mut sy = T::zero();
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for &q in q_list {
        let x = (T::one() + q).ln();
        let y = j11(q).ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let n = T::of_usize(q_list.len());
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(J12Scan {
        rows,
        ratio_max,
        ratio_min,
        j11_exponent: -slope,
    })
}
