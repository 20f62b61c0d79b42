//! Truncated periodic computational box.
//!
//! All discrete fields live on the cube `[-L, L]^3` sampled with `N` points
//! per axis. The box is periodic with period `2L`, so the wavevector carried
//! by index `k` along an axis is `(pi/L) * k_signed` with
//! `k_signed in [-N/2, N/2)`.

use crate::fields::FieldError;
use crate::Real;

/// Resolution and extent of the computational box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    half_width: T,
    points_per_axis: usize,
    dealias_fraction: T,
}

impl<T: Real> GridSpec<T> {
    /// Standard 2/3-rule grid.
    pub fn new(half_width: T, points_per_axis: usize) -> Result<Self, FieldError> {
        Self::with_dealias(half_width, points_per_axis, T::of(2.0 / 3.0))
    }

    pub fn with_dealias(
        half_width: T,
        points_per_axis: usize,
        dealias_fraction: T,
    ) -> Result<Self, FieldError> {
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(FieldError::InvalidGrid("half_width must be positive"));
        }
        if points_per_axis < 4 || points_per_axis % 2 != 0 {
            return Err(FieldError::InvalidGrid(
                "points_per_axis must be an even integer >= 4",
            ));
        }
        if !(dealias_fraction > T::zero() && dealias_fraction <= T::one()) {
            return Err(FieldError::InvalidGrid("dealias_fraction must be in (0, 1]"));
        }
        Ok(Self {
            half_width,
            points_per_axis,
            dealias_fraction,
        })
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn dealias_fraction(&self) -> T {
        self.dealias_fraction
    }

    /// Grid spacing `2L/N`.
    pub fn spacing(&self) -> T {
        T::of(2.0) * self.half_width / T::of_usize(self.points_per_axis)
    }

    /// Volume of one grid cell, the weight of the periodic trapezoid rule.
    pub fn cell_volume(&self) -> T {
        let h = self.spacing();
        h * h * h
    }

    /// Box volume `(2L)^3`.
    pub fn volume(&self) -> T {
        let side = T::of(2.0) * self.half_width;
        side * side * side
    }

    /// Total number of grid points `N^3`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical coordinate of index `i` along one axis: `-L + i*h`.
    pub fn coord(&self, i: usize) -> T {
        -self.half_width + T::of_usize(i) * self.spacing()
    }

    /// Signed integer frequency for index `k`: `0..N/2-1, -N/2..-1`.
    pub fn signed_freq(&self, k: usize) -> i64 {
        let n = self.points_per_axis as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Wavevector component `(pi/L) * signed_freq(k)`.
    pub fn wavenumber(&self, k: usize) -> T {
        T::of(self.signed_freq(k) as f64) * T::PI() / self.half_width
    }

    /// Whether the signed frequency triple survives spherical 2/3 truncation.
    pub fn dealias_keep(&self, k1: i64, k2: i64, k3: i64) -> bool {
        let r2 = (k1 * k1 + k2 * k2 + k3 * k3) as f64;
        let cutoff = self.dealias_fraction.to_f64().unwrap() * self.points_per_axis as f64 / 2.0;
        r2 <= cutoff * cutoff * (1.0 + 1e-12)
    }

    /// Largest retained |signed frequency| after dealiasing, per axis.
    pub fn dealias_cutoff(&self) -> f64 {
        self.dealias_fraction.to_f64().unwrap() * self.points_per_axis as f64 / 2.0
    }
}
