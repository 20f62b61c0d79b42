//! Manufactured exact solutions and the exact Stokes flow.
//!
//! The catalog builds divergence-free fields as the curl of a stream
//! function `psi(x) e_3` with `psi = phi1(x1) phi2(x2) phi3(x3)`, a product
//! of one-dimensional Gaussian-times-trigonometric factors. Every derivative
//! needed by the momentum equation (through third order) is then a product
//! of closed-form one-dimensional derivatives, so the forcing
//! `f = v' + (v.grad)v - nu lap v + grad p` is evaluated exactly, never by
//! numerical differentiation.

use crate::fields::{heat_propagate, FieldError, SpectralField};
use crate::oracles::OracleError;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trig {
    One,
    Sin,
    Cos,
}

/// Value and first three derivatives of one axis factor
/// `phi(s) = envelope(s) * trig(s)`.
fn axis_factor<T: Real>(s: T, kappa: T, width: Option<T>, trig: Trig) -> [T; 4] {
    let (g, g1, g2, g3) = match width {
        Some(sigma) => {
            let s2 = sigma * sigma;
            let g = (-s * s / (T::of(2.0) * s2)).exp();
            let g1 = -(s / s2) * g;
            let g2 = (s * s / (s2 * s2) - s2.recip()) * g;
            let g3 = (T::of(3.0) * s / (s2 * s2) - s * s * s / (s2 * s2 * s2)) * g;
            (g, g1, g2, g3)
        }
        None => (T::one(), T::zero(), T::zero(), T::zero()),
    };
    let k = kappa;
    let (f, f1, f2, f3) = match trig {
        Trig::One => (T::one(), T::zero(), T::zero(), T::zero()),
        Trig::Sin => {
            let (sin, cos) = (k * s).sin_cos();
            (sin, k * cos, -k * k * sin, -k * k * k * cos)
        }
        Trig::Cos => {
            let (sin, cos) = (k * s).sin_cos();
            (cos, -k * sin, -k * k * cos, k * k * k * sin)
        }
    };
    [
        g * f,
        g * f1 + g1 * f,
        g * f2 + T::of(2.0) * g1 * f1 + g2 * f,
        g * f3 + T::of(3.0) * g1 * f2 + T::of(3.0) * g2 * f1 + g3 * f,
    ]
}

/// A closed-form exact solution of the momentum equation with derived forcing.
#[derive(Debug, Clone)]
pub struct ManufacturedCase<T> {
    pub amplitude: T,
    /// Trigonometric wavenumber; an integer multiple of `pi/L` keeps the
    /// pressure exactly periodic on the box.
    pub kappa: T,
    /// Gaussian envelope width; `None` keeps the field exactly periodic.
    pub envelope_width: Option<T>,
    /// Modulate the stream function by `cos(kappa x3)`; without it (and
    /// without an envelope) the convective term is a pure gradient and the
    /// nonlinearity would be invisible to the projected dynamics.
    pub axial_cosine: bool,
    /// Exponential time-decay rate of the velocity amplitude.
    pub decay_rate: T,
    pub nu: T,
    pub pressure_amplitude: T,
}

/// Spatial profile pieces at one point: velocity, gradient, Laplacian.
struct Profile<T> {
    u: [T; 3],
    /// `grad_u[j][m] = d_j u_m`.
    grad: [[T; 3]; 3],
    lap: [T; 3],
}

impl<T: Real> ManufacturedCase<T> {
    fn profile(&self, x: [T; 3]) -> Profile<T> {
        let p1 = axis_factor(x[0], self.kappa, self.envelope_width, Trig::Sin);
        let p2 = axis_factor(x[1], self.kappa, self.envelope_width, Trig::Sin);
        let trig3 = if self.axial_cosine { Trig::Cos } else { Trig::One };
        let p3 = axis_factor(x[2], self.kappa, self.envelope_width, trig3);
        // u = curl(psi e3) = (d2 psi, -d1 psi, 0)
        let u = [p1[0] * p2[1] * p3[0], -(p1[1] * p2[0] * p3[0]), T::zero()];
        let mut grad = [[T::zero(); 3]; 3];
        // d_j u_1 = d_j d_2 psi
        grad[0][0] = p1[1] * p2[1] * p3[0];
        grad[1][0] = p1[0] * p2[2] * p3[0];
        grad[2][0] = p1[0] * p2[1] * p3[1];
        // d_j u_2 = -d_j d_1 psi
        grad[0][1] = -(p1[2] * p2[0] * p3[0]);
        grad[1][1] = -(p1[1] * p2[1] * p3[0]);
        grad[2][1] = -(p1[1] * p2[0] * p3[1]);
        let lap = [
            p1[2] * p2[1] * p3[0] + p1[0] * p2[3] * p3[0] + p1[0] * p2[1] * p3[2],
            -(p1[3] * p2[0] * p3[0] + p1[1] * p2[2] * p3[0] + p1[1] * p2[0] * p3[2]),
            T::zero(),
        ];
        Profile { u, grad, lap }
    }

    fn amp(&self, t: T) -> T {
        self.amplitude * (-self.decay_rate * t).exp()
    }

    /// Exact velocity at a spacetime point.
    pub fn velocity(&self, x: [T; 3], t: T) -> [T; 3] {
        let a = self.amp(t);
        let p = self.profile(x);
        [a * p.u[0], a * p.u[1], a * p.u[2]]
    }

    /// Chosen exact pressure (periodic cosine product).
    pub fn pressure(&self, x: [T; 3], t: T) -> T {
        let b = self.pressure_amplitude * (-T::of(2.0) * self.decay_rate * t).exp();
        b * (self.kappa * x[0]).cos() * (self.kappa * x[1]).cos() * (self.kappa * x[2]).cos()
    }

    fn pressure_grad(&self, x: [T; 3], t: T) -> [T; 3] {
        let b = self.pressure_amplitude * (-T::of(2.0) * self.decay_rate * t).exp();
        let k = self.kappa;
        let (s0, c0) = (k * x[0]).sin_cos();
        let (s1, c1) = (k * x[1]).sin_cos();
        let (s2, c2) = (k * x[2]).sin_cos();
        [
            -b * k * s0 * c1 * c2,
            -b * k * c0 * s1 * c2,
            -b * k * c0 * c1 * s2,
        ]
    }

    /// Forcing that makes the exact velocity solve the momentum equation:
    /// `f = v' + (v.grad)v - nu lap v + grad p`, all terms in closed form.
    pub fn forcing(&self, x: [T; 3], t: T) -> [T; 3] {
        let a = self.amp(t);
        let da = -self.decay_rate * a;
        let p = self.profile(x);
        let gp = self.pressure_grad(x, t);
        let mut f = [T::zero(); 3];
        for m in 0..3 {
            let mut conv = T::zero();
            for j in 0..3 {
                conv += p.u[j] * p.grad[j][m];
            }
            f[m] = da * p.u[m] + a * a * conv - self.nu * a * p.lap[m] + gp[m];
        }
        f
    }

    /// Analytic divergence of the velocity profile (identically zero; kept
    /// for tests of the construction).
    pub fn divergence(&self, x: [T; 3], t: T) -> T {
        let a = self.amp(t);
        let p = self.profile(x);
        a * (p.grad[0][0] + p.grad[1][1] + p.grad[2][2])
    }
}

/// Parameters for the manufactured-case catalog.
#[derive(Debug, Clone)]
pub struct MmsParams<T> {
    pub amplitude: T,
    /// Integer mode count: `kappa = wavenumber * pi / half_width`.
    pub wavenumber: i64,
    pub half_width: T,
    pub envelope_width: T,
    pub decay_rate: T,
    pub nu: T,
    pub pressure_amplitude: T,
}

/// Build a documented case by name.
///
/// - `"taylor-green-gaussian"`: cellular vortex under a Gaussian radial
///   envelope, amplitude decaying in time;
/// - `"taylor-green-periodic"`: the same vortex without the envelope
///   (exactly periodic, spectrally exact on any resolving grid).
pub fn manufactured_case<T: Real>(
    name: &str,
    params: &MmsParams<T>,
) -> Result<ManufacturedCase<T>, OracleError> {
    let kappa = T::of(params.wavenumber as f64) * T::PI() / params.half_width;
    match name {
        "taylor-green-gaussian" => Ok(ManufacturedCase {
            amplitude: params.amplitude,
            kappa,
            envelope_width: Some(params.envelope_width),
            axial_cosine: false,
            decay_rate: params.decay_rate,
            nu: params.nu,
            pressure_amplitude: params.pressure_amplitude,
        }),
        "taylor-green-periodic" => Ok(ManufacturedCase {
            amplitude: params.amplitude,
            kappa,
            envelope_width: None,
            axial_cosine: true,
            decay_rate: params.decay_rate,
            nu: params.nu,
            pressure_amplitude: params.pressure_amplitude,
        }),
        other => Err(OracleError::UnknownCase(other.to_string())),
    }
}

/// Exact solution of the Stokes limit: the heat-propagated initial data.
pub fn stokes_exact<T: Real>(
    v0hat: &SpectralField<T>,
    t: T,
    nu: T,
) -> Result<SpectralField<T>, FieldError> {
    heat_propagate(v0hat, t, nu)
}
