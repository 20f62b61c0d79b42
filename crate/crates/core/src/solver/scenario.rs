//! Problem specification: viscosity, box, initial data, forcing, horizon.

use crate::fields::{forward_transform, leray_project, SpectralField, VectorField};
use crate::grid::GridSpec;
use crate::oracles::ManufacturedCase;
use crate::solver::SolverError;
use crate::Real;

/// Named analytic initial-velocity families.
#[derive(Debug, Clone)]
pub enum InitialCondition<T> {
    Zero,
    /// Classic cellular vortex `A (sin kx cos ky cos kz, -cos kx sin ky cos kz, 0)`
    /// with `k = wavenumber * pi / L`; exactly periodic and divergence-free.
    TaylorGreen { amplitude: T, wavenumber: i64 },
    /// Curl of a Gaussian stream function: rapidly decaying, divergence-free.
    GaussianVortex { amplitude: T, width: T },
    /// Broadband divergence-free field with `|v-hat(k)| ~ |k|^{-exponent}`
    /// and deterministic pseudo-random phases. Spectrally rough data like
    /// this is what makes the short-lag singularity of the kernel visible;
    /// single-scale fields see only its smooth part.
    SpectralPowerLaw {
        amplitude: T,
        exponent: T,
        /// Keep modes with `|k| <= cutoff_fraction * N/2`.
        cutoff_fraction: T,
        seed: u64,
    },
    /// Exact manufactured solution evaluated at `t = 0`.
    Manufactured(ManufacturedCase<T>),
}

/// SplitMix64 step, the usual stateless hash for reproducible phases.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn unit_from_hash(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64
}

impl<T: Real> InitialCondition<T> {
    pub fn sample(&self, grid: &GridSpec<T>) -> VectorField<T> {
        match self {
            InitialCondition::Zero => VectorField::zeros(*grid),
            InitialCondition::TaylorGreen {
                amplitude,
                wavenumber,
            } => {
                let k = T::of(*wavenumber as f64) * T::PI() / grid.half_width();
                let a = *amplitude;
                VectorField::from_fn(*grid, |x, y, z| {
                    [
                        a * (k * x).sin() * (k * y).cos() * (k * z).cos(),
                        -a * (k * x).cos() * (k * y).sin() * (k * z).cos(),
                        T::zero(),
                    ]
                })
            }
            InitialCondition::GaussianVortex { amplitude, width } => {
                let a = *amplitude;
                let s2 = *width * *width;
                VectorField::from_fn(*grid, |x, y, z| {
                    let psi = a * (-(x * x + y * y + z * z) / (T::of(2.0) * s2)).exp();
                    [-y / s2 * psi, x / s2 * psi, T::zero()]
                })
            }
            InitialCondition::SpectralPowerLaw {
                amplitude,
                exponent,
                cutoff_fraction,
                seed,
            } => {
                let n = grid.points_per_axis();
                let mut vhat = SpectralField::zeros(*grid);
                let cutoff = cutoff_fraction.to_f64().unwrap() * n as f64 / 2.0;
                for k0 in 0..n {
                    let f0 = grid.signed_freq(k0);
                    for k1 in 0..n {
                        let f1 = grid.signed_freq(k1);
                        for k2 in 0..n {
                            let f2 = grid.signed_freq(k2);
                            // fill one mode of each conjugate pair; mirror below
                            if (f0, f1, f2) <= (0, 0, 0)
                                || f0 == -(n as i64) / 2
                                || f1 == -(n as i64) / 2
                                || f2 == -(n as i64) / 2
                            {
                                continue;
                            }
                            let kk = ((f0 * f0 + f1 * f1 + f2 * f2) as f64).sqrt();
                            if kk > cutoff {
                                continue;
                            }
                            // |k|^{-p} in integer-frequency units
                            let mag = *amplitude * T::of(kk).powf(-*exponent);
                            let neg = [
                                (n - k0) % n,
                                (n - k1) % n,
                                (n - k2) % n,
                            ];
                            for c in 0..3 {
                                let h = splitmix(
                                    seed.wrapping_add(c as u64)
                                        .wrapping_mul(0x100000001b3)
                                        .wrapping_add(
                                            (k0 as u64) << 40
                                                | (k1 as u64) << 20
                                                | k2 as u64,
                                        ),
                                );
                                let phase =
                                    T::of(unit_from_hash(h) * 2.0 * std::f64::consts::PI);
                                let z = num_complex::Complex::new(
                                    mag * phase.cos(),
                                    mag * phase.sin(),
                                );
                                vhat.components[c][[k0, k1, k2]] = z;
                                vhat.components[c][neg] = z.conj();
                            }
                        }
                    }
                }
                let projected = leray_project(&vhat);
                crate::fields::inverse_transform(&projected)
                    .expect("constructed spectrum is conjugate-symmetric")
            }
            InitialCondition::Manufactured(case) => {
                VectorField::from_fn(*grid, |x, y, z| case.velocity([x, y, z], T::zero()))
            }
        }
    }
}

/// Named analytic forcing families.
#[derive(Debug, Clone)]
pub enum Forcing<T> {
    None,
    /// `A e^{-gamma t} d cos(xi . x)` with `xi = (pi/L) k` and `d . k = 0`,
    /// a single divergence-free harmonic.
    SolenoidalHarmonic {
        amplitude: T,
        wavenumber: [i64; 3],
        direction: [T; 3],
        decay_rate: T,
    },
    /// Forcing derived from a manufactured exact solution.
    Manufactured(ManufacturedCase<T>),
}

impl<T: Real> Forcing<T> {
    pub fn is_zero(&self) -> bool {
        matches!(self, Forcing::None)
    }

    /// Physical samples of `f(., t)`, or `None` when the forcing vanishes.
    pub fn sample(&self, grid: &GridSpec<T>, t: T) -> Option<VectorField<T>> {
        match self {
            Forcing::None => None,
            Forcing::SolenoidalHarmonic {
                amplitude,
                wavenumber,
                direction,
                decay_rate,
            } => {
                let k = *wavenumber;
                let l = grid.half_width();
                let xi = [
                    T::of(k[0] as f64) * T::PI() / l,
                    T::of(k[1] as f64) * T::PI() / l,
                    T::of(k[2] as f64) * T::PI() / l,
                ];
                let a = *amplitude * (-*decay_rate * t).exp();
                let d = *direction;
                Some(VectorField::from_fn(*grid, |x, y, z| {
                    let phase = (xi[0] * x + xi[1] * y + xi[2] * z).cos();
                    [a * d[0] * phase, a * d[1] * phase, a * d[2] * phase]
                }))
            }
            Forcing::Manufactured(case) => Some(VectorField::from_fn(*grid, |x, y, z| {
                case.forcing([x, y, z], t)
            })),
        }
    }

    /// Spectral samples of `f(., t)`.
    pub fn sample_spectral(&self, grid: &GridSpec<T>, t: T) -> Option<SpectralField<T>> {
        self.sample(grid, t)
            .map(|f| forward_transform(&f).expect("analytic forcing is finite"))
    }
}

/// Full problem statement.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub nu: T,
    pub grid: GridSpec<T>,
    pub initial: InitialCondition<T>,
    pub forcing: Forcing<T>,
    pub horizon: T,
    /// Documented decay class of the data: `|v0| + |grad v0| = O((1+|x|)^{-a})`.
    pub decay_exponent: T,
}

impl<T: Real> Scenario<T> {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.nu > T::zero()) {
            return Err(SolverError::Config("viscosity must be positive".into()));
        }
        if !(self.horizon > T::zero()) {
            return Err(SolverError::Config("horizon must be positive".into()));
        }
        if !(self.decay_exponent > T::of(3.0)) {
            return Err(SolverError::Config(
                "decay exponent must exceed 3".into(),
            ));
        }
        if let Forcing::SolenoidalHarmonic {
            wavenumber,
            direction,
            ..
        } = &self.forcing
        {
            let dot = T::of(wavenumber[0] as f64) * direction[0]
                + T::of(wavenumber[1] as f64) * direction[1]
                + T::of(wavenumber[2] as f64) * direction[2];
            if dot.abs() > T::of(1e-12) {
                return Err(SolverError::Config(
                    "harmonic forcing direction must be orthogonal to its wavevector".into(),
                ));
            }
        }
        Ok(())
    }

    /// Divergence-free spectral initial state: the sampled field is projected
    /// at load, and the projection is verified.
    pub fn initial_spectral(&self) -> Result<SpectralField<T>, SolverError> {
        let v0 = self.initial.sample(&self.grid);
        let v0hat = leray_project(&forward_transform(&v0)?);
        let div = v0hat.max_relative_divergence();
        if div > T::of(1e-10) {
            return Err(SolverError::Domain(format!(
                "projected initial data still has relative divergence {div:e}"
            )));
        }
        Ok(v0hat)
    }
}
