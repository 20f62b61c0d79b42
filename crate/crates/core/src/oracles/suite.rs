//! The self-contained verification suite behind `verify`.
//!
//! Runs kernel cross-checks, estimate scans, and small solver checks with
//! pinned tolerances, and reports one row per check. Thresholds follow the
//! convergence studies recorded in the integration tests; none is tuned
//! looser than its oracle's measured accuracy.

use crate::diagnostics::{balance_from_series, energy_bound_check, spectral_envelope_check};
use crate::fields::forward_transform;
use crate::grid::GridSpec;
use crate::kernels::{heat_kernel, oseen_g, oseen_j, KernelPoint, Tensor3};
use crate::oracles::quadrature::scaled_oseen_j;
use crate::oracles::{
    erf_identity_sides, finite_difference_j, grad_g_mass, grad_g_mass_exact, j12_bound_scan,
    kernel_decay_scan, numeric_g_quadrature, numeric_i2, pinned_kernel_points, QuadratureSpec,
};
use crate::solver::{
    march, Forcing, InitialCondition, Scenario, SolverConfig, WindowPolicy,
};

/// One row of the verification report.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: String,
    pub suite: &'static str,
    pub description: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckResult {
    fn upper(id: &str, suite: &'static str, description: &str, measured: f64, threshold: f64) -> Self {
        CheckResult {
            id: id.to_string(),
            suite,
            description: description.to_string(),
            measured,
            threshold,
            pass: measured <= threshold && measured.is_finite(),
        }
    }

    fn within(
        id: &str,
        suite: &'static str,
        description: &str,
        measured: f64,
        lo: f64,
        hi: f64,
    ) -> Self {
        CheckResult {
            id: id.to_string(),
            suite,
            description: description.to_string(),
            measured,
            threshold: hi,
            pass: measured.is_finite() && measured >= lo && measured <= hi,
        }
    }
}

/// Options for a suite run. `perturb_kernel` is the negative control: it
/// feeds the comparisons a deliberately mis-scaled copy of the closed-form
/// tensor, which must make the suite fail.
#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub only: Option<String>,
    pub perturb_kernel: bool,
    /// Trim the slowest checks (quadrature point count) for quick runs.
    pub quick: bool,
}

fn closed_form_g(p: &KernelPoint<f64>, perturb: bool) -> Tensor3<f64> {
    let mut g = oseen_g(p).expect("pinned points are regular");
    if perturb {
        // test-only wrong constant: scale the Hessian part by 1.001
        let jj = oseen_j(p).expect("pinned points are regular");
        let c = crate::kernels::hessian_weight::<f64>();
        for a in 0..3 {
            for b in 0..3 {
                g.0[a][b] += 1e-3 * c * jj.0[a][b];
            }
        }
    }
    g
}

fn kernel_checks(out: &mut Vec<CheckResult>, perturb: bool, quick: bool) {
    let pts = pinned_kernel_points();
    let quad_pts = if quick { &pts[..6] } else { &pts[..] };

    // closed form vs Fourier quadrature
    let mut worst = 0.0f64;
    for p in quad_pts {
        let spec = QuadratureSpec::auto(p.x, p.t, p.nu);
        let num = numeric_g_quadrature(p.x, p.t, p.nu, &spec).expect("tail check sized by auto");
        let exact = closed_form_g(p, perturb);
        let scale = exact.max_abs();
        for j in 0..3 {
            for m in 0..3 {
                worst = worst.max((num.0[j][m] - exact.0[j][m]).abs() / scale);
            }
        }
    }
    out.push(CheckResult::upper(
        "kernels/g-vs-fourier-quadrature",
        "kernels",
        "closed-form G vs direct symbol quadrature, entrywise relative",
        worst,
        1e-3,
    ));

    // differentiated tensor vs finite differences of the potential; the
    // step follows the potential's variation scale max(|x|, sqrt(4 nu t))
    let mut worst = 0.0f64;
    for p in &pts {
        let scale_len = p.radius().max((4.0 * p.nu * p.t).sqrt());
        let fd = finite_difference_j(p.x, p.t, p.nu, 1e-4 * scale_len).expect("regular point");
        let mut exact = oseen_j(p).expect("regular point");
        if perturb {
            for a in 0..3 {
                for b in 0..3 {
                    exact.0[a][b] *= 1.001;
                }
            }
        }
        let scale = exact.max_abs();
        for j in 0..3 {
            for m in 0..3 {
                worst = worst.max((fd.0[j][m] - exact.0[j][m]).abs() / scale);
            }
        }
    }
    out.push(CheckResult::upper(
        "kernels/j-vs-finite-differences",
        "kernels",
        "closed-form J vs central differences of the potential",
        worst,
        1e-6,
    ));

    // trace identity
    let mut worst = 0.0f64;
    for p in &pts {
        let g = heat_kernel(p).expect("regular point");
        let gg = closed_form_g(p, perturb);
        worst = worst.max((gg.trace() - 2.0 * g).abs() / (g.abs() + f64::EPSILON));
    }
    out.push(CheckResult::upper(
        "kernels/trace-identity",
        "kernels",
        "trace(G) = 2 g on the pinned set",
        worst,
        1e-10,
    ));

    // heat kernel normalization on a resolved box
    let measured = {
        let (t, nu) = (0.25, 1.0);
        let l = 8.0;
        let n = 64usize;
        let h = 2.0 * l / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let x = -l + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y = -l + (j as f64 + 0.5) * h;
                for k in 0..n {
                    let z = -l + (k as f64 + 0.5) * h;
                    sum += heat_kernel(&KernelPoint::new([x, y, z], t, nu)).unwrap();
                }
            }
        }
        (sum * h * h * h - 1.0).abs()
    };
    out.push(CheckResult::upper(
        "kernels/heat-normalization",
        "kernels",
        "|box quadrature of g - 1|",
        measured,
        1e-8,
    ));

    // I2 quadrature route
    let mut worst = 0.0f64;
    for p in pts.iter().take(3) {
        if p.radius() < 0.3 {
            continue;
        }
        let num = numeric_i2(p.x, p.t, p.nu, 1e-3).expect("regular point");
        let mut exact = scaled_oseen_j(p).expect("regular point");
        if perturb {
            for row in exact.0.iter_mut() {
                for v in row.iter_mut() {
                    *v *= 1.001;
                }
            }
        }
        for j in 0..3 {
            for m in 0..3 {
                worst = worst.max((num.0[j][m] - exact.0[j][m]).abs() / exact.max_abs());
            }
        }
    }
    out.push(CheckResult::upper(
        "kernels/i2-radial-quadrature",
        "kernels",
        "projector part via radial quadrature vs closed form",
        worst,
        1e-4,
    ));

    // sine-transform identity
    let mut worst = 0.0f64;
    for &(y, a) in &[(1.0f64, 1.0f64), (2.0, 0.5), (0.5, 2.0), (3.0, 1.5), (1.5, 0.25)] {
        let (lhs, rhs) = erf_identity_sides(y, a);
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
    }
    out.push(CheckResult::upper(
        "kernels/erf-identity",
        "kernels",
        "sine transform of the Gaussian vs (pi/2) Erf",
        worst,
        1e-8,
    ));
}

fn estimate_checks(out: &mut Vec<CheckResult>, quick: bool) {
    let nt = if quick { 4 } else { 6 };
    let ts: Vec<f64> = (0..nt)
        .map(|i| 0.01 * (100.0f64).powf(i as f64 / (nt - 1) as f64))
        .collect();
    match kernel_decay_scan(&ts, 1.0) {
        Ok(scan) => out.push(CheckResult::within(
            "estimates/decay-slope",
            "estimates",
            "fitted log-log slope of the weighted kernel scan",
            scan.slope,
            -0.55,
            -0.45,
        )),
        Err(e) => out.push(CheckResult::upper(
            "estimates/decay-slope",
            "estimates",
            &format!("scan failed: {e}"),
            f64::INFINITY,
            0.0,
        )),
    }

    let mut worst = 0.0f64;
    for &(t, nu) in &[(0.7f64, 0.3f64), (0.25, 1.0), (0.05, 2.0)] {
        let got = grad_g_mass(t, nu);
        let want = grad_g_mass_exact(t, nu);
        worst = worst.max((got - want).abs() / want);
    }
    out.push(CheckResult::upper(
        "estimates/grad-g-mass",
        "estimates",
        "total gradient mass of g vs 2/sqrt(nu t pi)",
        worst,
        1e-6,
    ));

    let qs: Vec<f64> = vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
    match j12_bound_scan(&qs) {
        Ok(scan) => {
            out.push(CheckResult::upper(
                "estimates/j12-ratio-spread",
                "estimates",
                "max/min of J12 (2+q)/ln(3+q) over q in [1,100]",
                scan.ratio_max / scan.ratio_min,
                20.0,
            ));
            out.push(CheckResult::within(
                "estimates/j11-decay-exponent",
                "estimates",
                "fitted decay exponent of the inner piece J11",
                scan.j11_exponent,
                0.85,
                1.15,
            ));
        }
        Err(e) => out.push(CheckResult::upper(
            "estimates/j12-ratio-spread",
            "estimates",
            &format!("scan failed: {e}"),
            f64::INFINITY,
            0.0,
        )),
    }
}

fn solver_checks(out: &mut Vec<CheckResult>) {
    // quick Stokes exactness + divergence + energy identity at 16^3
    let grid = GridSpec::new(std::f64::consts::PI, 16).unwrap();
    let scenario = Scenario {
        nu: 0.5,
        grid,
        initial: InitialCondition::TaylorGreen {
            amplitude: 1.0,
            wavenumber: 1,
        },
        forcing: Forcing::None,
        horizon: 0.5,
        decay_exponent: 4.0,
    };
    let config = SolverConfig {
        nonlinear: false,
        window: WindowPolicy::Fixed(0.25),
        // the trapezoid audit of the energy identity is second order in the
        // node spacing; this density puts its error near 1e-8
        dt: 1.0 / 4096.0,
        snapshot_stride: 512,
        ..SolverConfig::default()
    };
    match march(&scenario, &config) {
        Ok(run) => {
            let v0hat = scenario.initial_spectral().unwrap();
            let mut worst = 0.0f64;
            let mut div = 0.0f64;
            for (t, state) in run.trajectory.times.iter().zip(&run.trajectory.states) {
                let exact = crate::oracles::stokes_exact(&v0hat, *t, scenario.nu).unwrap();
                let got = forward_transform(state).unwrap();
                div = div.max(got.max_relative_divergence());
                let mut diff = got;
                diff.axpy(-1.0, &exact);
                let scale = crate::diagnostics::energy_spectral(&exact).sqrt();
                worst = worst.max(crate::diagnostics::energy_spectral(&diff).sqrt() / scale);
            }
            out.push(CheckResult::upper(
                "solver/stokes-exactness",
                "solver",
                "linear march vs heat-propagated data, relative L2",
                worst,
                1e-10,
            ));
            out.push(CheckResult::upper(
                "solver/divergence-free",
                "solver",
                "max relative spectral divergence across snapshots",
                div.max(
                    run.trace
                        .windows
                        .iter()
                        .map(|w| w.max_divergence)
                        .fold(0.0, f64::max),
                ),
                1e-10,
            ));
            let rows = balance_from_series(&run.energy, scenario.nu, 1);
            let e0 = run.energy.energy[0];
            let resid = rows
                .iter()
                .map(|r| r.residual.abs())
                .fold(0.0, f64::max)
                / e0;
            out.push(CheckResult::upper(
                "solver/energy-identity",
                "solver",
                "cumulative energy-balance residual, Stokes run",
                resid,
                1e-6,
            ));
            let bound = energy_bound_check(&run.energy);
            out.push(CheckResult::upper(
                "solver/energy-bound",
                "solver",
                "negative part of the eps=1/2 sup-energy bound slack",
                (-bound.slack).max(0.0),
                0.0,
            ));
            let envelope = spectral_envelope_check(
                &run.trajectory.times,
                &run.trajectory.states,
                Some(run.trace.fhat_sq_sup),
            )
            .unwrap();
            let envelope_violation = envelope
                .times
                .iter()
                .zip(&envelope.m)
                .map(|(t, m)| m - (envelope.c0 + envelope.c1 * t))
                .fold(0.0f64, f64::max);
            out.push(CheckResult::upper(
                "solver/spectral-envelope",
                "solver",
                "worst violation of the fitted affine spectral envelope",
                envelope_violation.max(0.0),
                1e-12 * envelope.m.iter().cloned().fold(1.0, f64::max),
            ));
        }
        Err(e) => out.push(CheckResult::upper(
            "solver/stokes-exactness",
            "solver",
            &format!("march failed: {e}"),
            f64::INFINITY,
            0.0,
        )),
    }

    // two-window split consistency on a small nonlinear case
    let scenario = Scenario {
        nu: 0.6,
        grid: GridSpec::new(std::f64::consts::PI, 16).unwrap(),
        initial: InitialCondition::TaylorGreen {
            amplitude: 0.4,
            wavenumber: 1,
        },
        forcing: Forcing::None,
        horizon: 0.25,
        decay_exponent: 4.0,
    };
    let tol = 1e-11;
    let base = SolverConfig {
        window: WindowPolicy::Fixed(0.25),
        dt: 1.0 / 64.0,
        picard_tol: tol,
        snapshot_stride: 8,
        ..SolverConfig::default()
    };
    let split = SolverConfig {
        window: WindowPolicy::Fixed(0.125),
        ..base.clone()
    };
    match (march(&scenario, &base), march(&scenario, &split)) {
        (Ok(a), Ok(b)) => {
            let mut worst = 0.0f64;
            for (va, vb) in a.trajectory.states.iter().zip(&b.trajectory.states) {
                let ha = forward_transform(va).unwrap();
                let mut hb = forward_transform(vb).unwrap();
                hb.axpy(-1.0, &ha);
                worst = worst.max(crate::diagnostics::n0_of_spectral(&hb));
            }
            out.push(CheckResult::upper(
                "solver/window-split-consistency",
                "solver",
                "one window vs two half windows, N0 distance / (10 tol)",
                worst / (10.0 * tol),
                1.0,
            ));
        }
        _ => out.push(CheckResult::upper(
            "solver/window-split-consistency",
            "solver",
            "march failed",
            f64::INFINITY,
            0.0,
        )),
    }
}

/// Run the suite, optionally filtered to one sub-suite name
/// (`kernels`, `estimates`, `solver`).
pub fn run_suite(options: &SuiteOptions) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let want = |name: &str| options.only.as_deref().map(|o| o == name).unwrap_or(true);
    if want("kernels") {
        kernel_checks(&mut out, options.perturb_kernel, options.quick);
    }
    if want("estimates") {
        estimate_checks(&mut out, options.quick);
    }
    if want("solver") {
        solver_checks(&mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_control_fails_kernel_checks() {
        let options = SuiteOptions {
            only: Some("kernels".into()),
            perturb_kernel: true,
            quick: true,
        };
        let results = run_suite(&options);
        assert!(
            results.iter().any(|r| !r.pass),
            "a deliberately wrong kernel constant must be caught"
        );
    }
}
