//! Window-marched Picard solution of the velocity integral equation.
//!
//! On each window `[t0, t0+tau]` the iteration runs
//!
//! ```text
//! v^{n+1}(t) = F1(t) - int_{t0}^t P e^{-nu |xi|^2 (t-s)} [(v^n . grad) v^n](s) ds,
//! v^1 = F1,
//! ```
//!
//! where `F1` folds the heat-propagated initial data, the forcing history
//! over `[0, t]`, and the already-solved nonlinear history over `[0, t0]`
//! into a known term. Both history integrals satisfy an exact semigroup
//! recurrence, so they are carried as running accumulators instead of being
//! requadratured.

use crate::diagnostics::{
    energy_spectral, grad_sq_spectral, inner_product_spectral, n0_of_spectral, n1_of_spectral,
    EnergySeries,
};
use crate::fields::{
    heat_propagate, inverse_transform_raw, leray_project, nonlinear_term_spectral, ScalarField,
    SpectralField, VectorField,
};
use crate::solver::duhamel::StepWeights;
use crate::solver::{recover_pressure, Scenario, SolverError};
use crate::Real;

/// Contraction-window policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowPolicy<T> {
    Fixed(T),
    /// Probe the contraction ratio on a trial window and size tau from it.
    Adaptive,
}

#[derive(Debug, Clone)]
pub struct SolverConfig<T> {
    /// Iteration stops when the N0 norm of consecutive iterates drops below this.
    pub picard_tol: T,
    pub max_iters: usize,
    pub window: WindowPolicy<T>,
    /// Duhamel quadrature step (a target; windows divide evenly into substeps).
    pub dt: T,
    /// Desired contraction ratio for adaptive window sizing, in (0,1).
    pub contraction_safety: T,
    /// When false the convective term is dropped (Stokes limit).
    pub nonlinear: bool,
    /// Window halvings allowed after a contraction failure.
    pub retry_limit: usize,
    /// A run is flagged when the per-window sup of N1 grows by more than this
    /// factor over its value on the first window.
    pub n1_growth_factor: T,
    /// Keep every `snapshot_stride`-th quadrature node in the trajectory.
    pub snapshot_stride: usize,
    pub with_pressure: bool,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            picard_tol: T::of(1e-9),
            max_iters: 40,
            window: WindowPolicy::Adaptive,
            dt: T::of(1.0 / 64.0),
            contraction_safety: T::of(0.5),
            nonlinear: true,
            retry_limit: 6,
            n1_growth_factor: T::of(10.0),
            snapshot_stride: 1,
            with_pressure: false,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.picard_tol > T::zero()) {
            return Err(SolverError::Config("picard_tol must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(SolverError::Config("max_iters must be positive".into()));
        }
        if !(self.dt > T::zero()) {
            return Err(SolverError::Config("dt must be positive".into()));
        }
        if let WindowPolicy::Fixed(tau) = self.window {
            if !(tau > T::zero()) {
                return Err(SolverError::Config("window must be positive".into()));
            }
            if self.dt > tau * (T::one() + T::of(1e-12)) {
                return Err(SolverError::Config("dt must not exceed the window".into()));
            }
        }
        if !(self.contraction_safety > T::zero() && self.contraction_safety < T::one()) {
            return Err(SolverError::Config(
                "contraction_safety must lie in (0, 1)".into(),
            ));
        }
        if self.snapshot_stride == 0 {
            return Err(SolverError::Config("snapshot_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-window iteration record.
#[derive(Debug, Clone)]
pub struct WindowTrace<T> {
    pub t_start: T,
    pub t_end: T,
    /// `d_n = N0(v_{n+1} - v_n)` per iteration.
    pub deltas: Vec<T>,
    /// Sup over window nodes of `N1(v_n)` per iteration (the boundedness monitor).
    pub n1_sup: Vec<T>,
    pub converged: bool,
    /// Worst relative spectral divergence over every iterate at every node.
    pub max_divergence: T,
}

impl<T: Real> WindowTrace<T> {
    /// Consecutive delta ratios `d_{n+1}/d_n`.
    pub fn ratios(&self) -> Vec<T> {
        self.deltas
            .windows(2)
            .filter(|w| w[0] > T::zero())
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Whole-run iteration diagnostics.
#[derive(Debug, Clone)]
pub struct ConvergenceTrace<T> {
    pub windows: Vec<WindowTrace<T>>,
    pub n1_growth_flagged: bool,
    /// `max_{xi, t} |xi|^2 |F-hat(xi,t)|^2` over all quadrature nodes.
    pub fhat_sq_sup: T,
}

/// Velocity (and optionally pressure) snapshots along the run.
#[derive(Debug, Clone)]
pub struct SolutionTrajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<VectorField<T>>,
    pub pressures: Option<Vec<ScalarField<T>>>,
}

#[derive(Debug)]
pub struct MarchOutput<T> {
    pub trajectory: SolutionTrajectory<T>,
    pub trace: ConvergenceTrace<T>,
    /// Scalar energy audit collected at every quadrature node.
    pub energy: EnergySeries<T>,
}

fn heat_direct<T: Real>(vhat: &SpectralField<T>, dt: T, nu: T) -> SpectralField<T> {
    heat_propagate(vhat, dt, nu).expect("nonnegative dt by construction")
}

/// `max_xi |xi|^2 |v-hat|^2`.
fn xi2_weighted_sup<T: Real>(vhat: &SpectralField<T>) -> T {
    let n = vhat.grid.points_per_axis();
    let mut best = T::zero();
    for k0 in 0..n {
        let xi0 = vhat.grid.wavenumber(k0);
        for k1 in 0..n {
            let xi1 = vhat.grid.wavenumber(k1);
            for k2 in 0..n {
                let xi2 = vhat.grid.wavenumber(k2);
                let w = xi0 * xi0 + xi1 * xi1 + xi2 * xi2;
                let mut mode = T::zero();
                for c in 0..3 {
                    mode += vhat.components[c][[k0, k1, k2]].norm_sqr();
                }
                best = best.max(w * mode);
            }
        }
    }
    best
}

/// The known term `F(t)` of the integral equation at the requested times:
/// heat-propagated initial data plus the Duhamel integral of the forcing,
/// quadratured from 0 with substeps no longer than `dt`.
pub fn assemble_known_term<T: Real>(
    scenario: &Scenario<T>,
    times: &[T],
    dt: T,
) -> Result<Vec<SpectralField<T>>, SolverError> {
    scenario.validate()?;
    if !(dt > T::zero()) {
        return Err(SolverError::Config("dt must be positive".into()));
    }
    let v0hat = scenario.initial_spectral()?;
    let tol = T::of(1e-9) * scenario.horizon;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < -tol || t > scenario.horizon + tol {
            return Err(SolverError::Domain(format!(
                "requested time {t} outside [0, {}]",
                scenario.horizon
            )));
        }
        let t = t.max(T::zero());
        let mut f = heat_direct(&v0hat, t, scenario.nu);
        if !scenario.forcing.is_zero() && t > T::zero() {
            let n = (t / dt).to_f64().unwrap().ceil().max(1.0) as usize;
            let delta = t / T::of_usize(n);
            let weights = StepWeights::new(&scenario.grid, scenario.nu, delta);
            let mut acc = SpectralField::zeros(scenario.grid);
            let mut prev = scenario
                .forcing
                .sample_spectral(&scenario.grid, T::zero())
                .map(|f| leray_project(&f));
            for k in 1..=n {
                let next = scenario
                    .forcing
                    .sample_spectral(&scenario.grid, delta * T::of_usize(k))
                    .map(|f| leray_project(&f));
                weights.advance(&mut acc, prev.as_ref(), next.as_ref());
                prev = next;
            }
            f.axpy(T::one(), &acc);
        }
        out.push(f);
    }
    Ok(out)
}

struct PicardResult<T> {
    states: Vec<SpectralField<T>>,
    /// Projected convective sources of the converged states (window history).
    sources: Vec<SpectralField<T>>,
    trace: WindowTrace<T>,
}

/// Fixed-point iteration on one window. `iters` limits the count; `tol = None`
/// disables the convergence exit (probe mode).
fn run_picard<T: Real>(
    f_nodes: &[SpectralField<T>],
    weights: &StepWeights<T>,
    nu: T,
    nonlinear: bool,
    iters: usize,
    tol: Option<T>,
) -> PicardResult<T> {
    let _ = nu;
    let n_nodes = f_nodes.len();
    let grid = f_nodes[0].grid;
    let mut v: Vec<SpectralField<T>> = f_nodes.to_vec();
    let mut deltas = Vec::new();
    let mut n1_sup = Vec::new();
    let mut max_div = T::zero();
    let mut converged = false;

    let sup_n1 = |nodes: &[SpectralField<T>]| -> T {
        nodes
            .iter()
            .map(n1_of_spectral)
            .fold(T::zero(), |a, b| a.max(b))
    };
    n1_sup.push(sup_n1(&v));
    for vi in &v {
        max_div = max_div.max(vi.max_relative_divergence());
    }

    if !nonlinear {
        // one application of the zero map confirms the fixed point
        deltas.push(T::zero());
        converged = true;
        let zeros = vec![SpectralField::zeros(grid); n_nodes];
        return PicardResult {
            states: v,
            sources: zeros,
            trace: WindowTrace {
                t_start: T::zero(),
                t_end: T::zero(),
                deltas,
                n1_sup,
                converged,
                max_divergence: max_div,
            },
        };
    }

    for _ in 0..iters {
        let sources: Vec<SpectralField<T>> = v
            .iter()
            .map(|vi| leray_project(&nonlinear_term_spectral(vi)))
            .collect();
        let mut acc = SpectralField::zeros(grid);
        let mut d = T::zero();
        for i in 1..n_nodes {
            weights.advance(&mut acc, Some(&sources[i - 1]), Some(&sources[i]));
            let mut vnew = f_nodes[i].clone();
            vnew.axpy(-T::one(), &acc);
            let mut diff = vnew.clone();
            diff.axpy(-T::one(), &v[i]);
            d = d.max(n0_of_spectral(&diff));
            max_div = max_div.max(vnew.max_relative_divergence());
            v[i] = vnew;
        }
        deltas.push(d);
        n1_sup.push(sup_n1(&v));
        if let Some(tol) = tol {
            if d <= tol {
                converged = true;
                break;
            }
        }
    }

    let sources = v
        .iter()
        .map(|vi| leray_project(&nonlinear_term_spectral(vi)))
        .collect();
    PicardResult {
        states: v,
        sources,
        trace: WindowTrace {
            t_start: T::zero(),
            t_end: T::zero(),
            deltas,
            n1_sup,
            converged,
            max_divergence: max_div,
        },
    }
}

/// Known-term nodes for a window starting at `t0`, given the forcing history
/// accumulator `ff_hist` (the forcing Duhamel integral at `t0`) and the
/// nonlinear history accumulator `b_hist`.
#[allow(clippy::too_many_arguments)]
fn window_known_term<T: Real>(
    scenario: &Scenario<T>,
    v0hat: &SpectralField<T>,
    t0: T,
    n_sub: usize,
    delta: T,
    weights: &StepWeights<T>,
    ff_hist: &SpectralField<T>,
    b_hist: Option<&SpectralField<T>>,
    fhat_sq_sup: &mut T,
) -> (
    Vec<SpectralField<T>>,
    Vec<Option<SpectralField<T>>>,
    Vec<T>,
    SpectralField<T>,
) {
    let grid = scenario.grid;
    let nu = scenario.nu;
    // forcing nodes: raw L2 size for the energy audit, then projected for use
    let mut f_norms = Vec::with_capacity(n_sub + 1);
    let mut fh: Vec<Option<SpectralField<T>>> = Vec::with_capacity(n_sub + 1);
    for i in 0..=n_sub {
        let t = t0 + delta * T::of_usize(i);
        match scenario.forcing.sample_spectral(&grid, t) {
            Some(raw) => {
                f_norms.push(energy_spectral(&raw).sqrt());
                fh.push(Some(leray_project(&raw)));
            }
            None => {
                f_norms.push(T::zero());
                fh.push(None);
            }
        }
    }
    let mut f_nodes = Vec::with_capacity(n_sub + 1);
    let mut ff_run = ff_hist.clone();
    for i in 0..=n_sub {
        if i > 0 {
            weights.advance(&mut ff_run, fh[i - 1].as_ref(), fh[i].as_ref());
        }
        let t = t0 + delta * T::of_usize(i);
        let mut fi = heat_direct(v0hat, t, nu);
        fi.axpy(T::one(), &ff_run);
        // the boundedness precondition refers to F before history folding
        *fhat_sq_sup = fhat_sq_sup.max(xi2_weighted_sup(&fi));
        if let Some(b) = b_hist {
            let propagated = heat_direct(b, delta * T::of_usize(i), nu);
            fi.axpy(-T::one(), &propagated);
        }
        f_nodes.push(fi);
    }
    (f_nodes, fh, f_norms, ff_run)
}

/// Probe the iteration on a fresh window `[0, window_len]` for a fixed number
/// of iterations and return the measured deltas.
pub fn picard_probe<T: Real>(
    scenario: &Scenario<T>,
    config: &SolverConfig<T>,
    window_len: T,
    iters: usize,
) -> Result<WindowTrace<T>, SolverError> {
    scenario.validate()?;
    config.validate()?;
    let v0hat = scenario.initial_spectral()?;
    let n_sub = ((window_len / config.dt).to_f64().unwrap().round() as usize).max(1);
    let delta = window_len / T::of_usize(n_sub);
    let weights = StepWeights::new(&scenario.grid, scenario.nu, delta);
    let ff_hist = SpectralField::zeros(scenario.grid);
    let mut fsup = T::zero();
    let (f_nodes, _, _, _) = window_known_term(
        scenario,
        &v0hat,
        T::zero(),
        n_sub,
        delta,
        &weights,
        &ff_hist,
        None,
        &mut fsup,
    );
    let mut result = run_picard(&f_nodes, &weights, scenario.nu, config.nonlinear, iters, None);
    result.trace.t_start = T::zero();
    result.trace.t_end = window_len;
    Ok(result.trace)
}

/// Choose a window length from a measured contraction ratio: run two probe
/// iterations on a trial window, then scale by `(safety / ratio)^2` (the
/// ratio varies like the square root of the window).
pub fn estimate_window<T: Real>(
    scenario: &Scenario<T>,
    config: &SolverConfig<T>,
) -> Result<T, SolverError> {
    let horizon = scenario.horizon;
    let tau_trial = horizon.min((config.dt * T::of(4.0)).max(horizon / T::of(4.0)));
    let trace = picard_probe(scenario, config, tau_trial, 2)?;
    let d1 = trace.deltas.first().cloned().unwrap_or_else(T::zero);
    let d2 = trace.deltas.get(1).cloned().unwrap_or_else(T::zero);
    if d1 <= T::of(1e-14) {
        // no measurable nonlinearity: a single window suffices
        return Ok(horizon);
    }
    let ratio = d2 / d1;
    if ratio <= T::zero() {
        return Ok(horizon);
    }
    let scale = config.contraction_safety / ratio;
    let tau = tau_trial * scale * scale;
    Ok(tau.max(config.dt).min(horizon))
}

/// Solve over `[0, horizon]` in contraction windows.
pub fn march<T: Real>(
    scenario: &Scenario<T>,
    config: &SolverConfig<T>,
) -> Result<MarchOutput<T>, SolverError> {
    scenario.validate()?;
    config.validate()?;
    let grid = scenario.grid;
    let nu = scenario.nu;
    let horizon = scenario.horizon;
    let v0hat = scenario.initial_spectral()?;

    let mut tau = match config.window {
        WindowPolicy::Fixed(t) => t,
        WindowPolicy::Adaptive => estimate_window(scenario, config)?,
    };

    let mut energy = EnergySeries::default();
    let push_energy =
        |series: &mut EnergySeries<T>, t: T, vhat: &SpectralField<T>, f: Option<&SpectralField<T>>, f_norm: T| {
            series.times.push(t);
            series.energy.push(energy_spectral(vhat));
            series.grad_sq.push(grad_sq_spectral(vhat));
            series
                .f_dot_v
                .push(f.map(|f| inner_product_spectral(f, vhat)).unwrap_or_else(T::zero));
            series.f_norm.push(f_norm);
        };

    let f0_raw = scenario.forcing.sample_spectral(&grid, T::zero());
    let f0_norm = f0_raw
        .as_ref()
        .map(|f| energy_spectral(f).sqrt())
        .unwrap_or_else(T::zero);
    let f0_proj = f0_raw.as_ref().map(leray_project);
    push_energy(&mut energy, T::zero(), &v0hat, f0_proj.as_ref(), f0_norm);

    let store_state = |vhat: &SpectralField<T>, t: T| -> Result<VectorField<T>, SolverError> {
        let (mut v, _, _) = inverse_transform_raw(vhat);
        v.time_tag = Some(t);
        v.validate()?;
        Ok(v)
    };

    let mut times = vec![T::zero()];
    let mut states = vec![store_state(&v0hat, T::zero())?];
    let mut pressures: Option<Vec<ScalarField<T>>> = if config.with_pressure {
        let f0 = scenario.forcing.sample(&grid, T::zero());
        Some(vec![recover_pressure(&states[0], f0.as_ref())?])
    } else {
        None
    };

    let mut b_hist: Option<SpectralField<T>> = None;
    let mut ff_hist = SpectralField::zeros(grid);
    let mut windows: Vec<WindowTrace<T>> = Vec::new();
    let mut fsup = T::zero();
    let mut t0 = T::zero();
    let mut node_counter = 0usize;
    let end_tol = T::of(1e-12) * horizon;

    while t0 < horizon - end_tol {
        let mut retries = 0usize;
        loop {
            let tau_w = tau.min(horizon - t0);
            let n_sub = ((tau_w / config.dt).to_f64().unwrap().round() as usize).max(1);
            let delta = tau_w / T::of_usize(n_sub);
            let weights = StepWeights::new(&grid, nu, delta);
            let (f_nodes, fh, f_norms, ff_run) = window_known_term(
                scenario,
                &v0hat,
                t0,
                n_sub,
                delta,
                &weights,
                &ff_hist,
                b_hist.as_ref(),
                &mut fsup,
            );

            if !config.nonlinear {
                // Stokes limit: the fixed point is the known term; stream the
                // nodes without storing the whole window
                let mut max_div = T::zero();
                for (i, fi) in f_nodes.iter().enumerate() {
                    if i == 0 {
                        continue;
                    }
                    let t = t0 + delta * T::of_usize(i);
                    max_div = max_div.max(fi.max_relative_divergence());
                    push_energy(&mut energy, t, fi, fh[i].as_ref(), f_norms[i]);
                    node_counter += 1;
                    let last = (t - horizon).abs() <= end_tol;
                    if node_counter % config.snapshot_stride == 0 || last {
                        times.push(t);
                        states.push(store_state(fi, t)?);
                        if let Some(p) = pressures.as_mut() {
                            let f = scenario.forcing.sample(&grid, t);
                            p.push(recover_pressure(states.last().unwrap(), f.as_ref())?);
                        }
                    }
                }
                windows.push(WindowTrace {
                    t_start: t0,
                    t_end: t0 + tau_w,
                    deltas: vec![T::zero()],
                    n1_sup: vec![],
                    converged: true,
                    max_divergence: max_div,
                });
                ff_hist = ff_run;
                t0 = t0 + tau_w;
                break;
            }

            let result = run_picard(
                &f_nodes,
                &weights,
                nu,
                true,
                config.max_iters,
                Some(config.picard_tol),
            );
            if !result.trace.converged {
                retries += 1;
                let ratio = result
                    .trace
                    .ratios()
                    .last()
                    .cloned()
                    .unwrap_or_else(T::one)
                    .to_f64()
                    .unwrap_or(f64::NAN);
                if retries > config.retry_limit {
                    return Err(SolverError::ContractionFailure {
                        ratio,
                        window: tau_w.to_f64().unwrap_or(f64::NAN),
                        iters: result.trace.deltas.len(),
                    });
                }
                tau = tau / T::of(2.0);
                continue;
            }

            let mut trace = result.trace;
            trace.t_start = t0;
            trace.t_end = t0 + tau_w;

            for i in 1..=n_sub {
                let t = t0 + delta * T::of_usize(i);
                push_energy(&mut energy, t, &result.states[i], fh[i].as_ref(), f_norms[i]);
                node_counter += 1;
                let last = (t - horizon).abs() <= end_tol;
                if node_counter % config.snapshot_stride == 0 || last {
                    times.push(t);
                    states.push(store_state(&result.states[i], t)?);
                    if let Some(p) = pressures.as_mut() {
                        let f = scenario.forcing.sample(&grid, t);
                        p.push(recover_pressure(states.last().unwrap(), f.as_ref())?);
                    }
                }
            }

            // fold this window's converged sources into the history integral
            let mut b_new = match b_hist.take() {
                Some(b) => heat_direct(&b, tau_w, nu),
                None => SpectralField::zeros(grid),
            };
            let mut acc = SpectralField::zeros(grid);
            for i in 1..=n_sub {
                weights.advance(&mut acc, Some(&result.sources[i - 1]), Some(&result.sources[i]));
            }
            b_new.axpy(T::one(), &acc);
            b_hist = Some(b_new);
            ff_hist = ff_run;
            windows.push(trace);
            t0 = t0 + tau_w;
            break;
        }
    }

    let first_n1 = windows
        .first()
        .and_then(|w| w.n1_sup.iter().cloned().reduce(T::max))
        .unwrap_or_else(T::zero);
    let n1_growth_flagged = first_n1 > T::zero()
        && windows.iter().any(|w| {
            w.n1_sup
                .iter()
                .cloned()
                .reduce(T::max)
                .map(|m| m > config.n1_growth_factor * first_n1)
                .unwrap_or(false)
        });

    Ok(MarchOutput {
        trajectory: SolutionTrajectory {
            times,
            states,
            pressures,
        },
        trace: ConvergenceTrace {
            windows,
            n1_growth_flagged,
            fhat_sq_sup: fsup,
        },
        energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::forward_transform;
    use crate::grid::GridSpec;
    use crate::solver::{Forcing, InitialCondition};

    fn tg_scenario(n: usize, nu: f64, amplitude: f64, horizon: f64) -> Scenario<f64> {
        Scenario {
            nu,
            grid: GridSpec::new(std::f64::consts::PI, n).unwrap(),
            initial: InitialCondition::TaylorGreen {
                amplitude,
                wavenumber: 1,
            },
            forcing: Forcing::None,
            horizon,
            decay_exponent: 4.0,
        }
    }

    #[test]
    fn known_term_at_zero_is_initial_data() {
        let s = tg_scenario(8, 0.5, 1.0, 1.0);
        let f = assemble_known_term(&s, &[0.0], 0.125).unwrap();
        let v0 = s.initial_spectral().unwrap();
        let mut diff = f[0].clone();
        diff.axpy(-1.0, &v0);
        assert!(diff.max_abs() < 1e-14);
    }

    #[test]
    fn known_term_zero_data_is_zero() {
        let s = Scenario {
            initial: InitialCondition::Zero,
            ..tg_scenario(8, 0.5, 1.0, 1.0)
        };
        let f = assemble_known_term(&s, &[0.0, 0.5, 1.0], 0.125).unwrap();
        for fi in f {
            assert_eq!(fi.max_abs(), 0.0);
        }
    }

    #[test]
    fn known_term_constant_harmonic_forcing_closed_form() {
        // v0 = 0, constant-in-time divergence-free harmonic forcing:
        // F-hat(xi, t) = f-hat (1 - e^{-nu |xi|^2 t}) / (nu |xi|^2)
        let nu = 0.7;
        let s = Scenario {
            nu,
            grid: GridSpec::new(std::f64::consts::PI, 8).unwrap(),
            initial: InitialCondition::Zero,
            forcing: Forcing::SolenoidalHarmonic {
                amplitude: 2.0,
                wavenumber: [1, 0, 0],
                direction: [0.0, 1.0, 0.0],
                decay_rate: 0.0,
            },
            horizon: 1.0,
            decay_exponent: 4.0,
        };
        let t = 0.8;
        let f = assemble_known_term(&s, &[t], 0.05).unwrap();
        // coefficient of cos mode at signed frequency (1,0,0): amplitude/2
        let xi2 = 1.0;
        let want = 1.0 * (1.0 - (-nu * xi2 * t).exp()) / (nu * xi2);
        let got = f[0].components[1][[1, 0, 0]].re;
        assert!(
            (got - want).abs() < 1e-13,
            "duhamel of constant source: {got} vs {want}"
        );
    }

    #[test]
    fn rejects_times_outside_horizon() {
        let s = tg_scenario(8, 0.5, 1.0, 1.0);
        assert!(matches!(
            assemble_known_term(&s, &[1.5], 0.125),
            Err(SolverError::Domain(_))
        ));
    }

    #[test]
    fn linear_march_is_exact_heat_flow() {
        let s = tg_scenario(8, 0.5, 1.0, 0.5);
        let config = SolverConfig {
            nonlinear: false,
            window: WindowPolicy::Fixed(0.25),
            dt: 1.0 / 32.0,
            snapshot_stride: 4,
            ..SolverConfig::default()
        };
        let out = march(&s, &config).unwrap();
        let v0hat = s.initial_spectral().unwrap();
        for (t, state) in out.trajectory.times.iter().zip(&out.trajectory.states) {
            let exact = heat_direct(&v0hat, *t, s.nu);
            let got = forward_transform(state).unwrap();
            let mut diff = got.clone();
            diff.axpy(-1.0, &exact);
            assert!(
                diff.max_abs() <= 1e-12 * exact.max_abs().max(1e-30),
                "at t={t}"
            );
        }
        assert!(out.trace.windows.iter().all(|w| w.converged));
    }

    #[test]
    fn zero_scenario_trajectory_is_zero() {
        let s = Scenario {
            initial: InitialCondition::Zero,
            ..tg_scenario(8, 1.0, 0.0, 0.25)
        };
        let config = SolverConfig {
            window: WindowPolicy::Fixed(0.25),
            dt: 1.0 / 16.0,
            ..SolverConfig::default()
        };
        let out = march(&s, &config).unwrap();
        for state in &out.trajectory.states {
            assert_eq!(state.max_abs(), 0.0);
        }
        for w in &out.trace.windows {
            assert!(w.converged);
            assert!(w.deltas.iter().all(|&d| d == 0.0));
        }
    }

    #[test]
    fn trajectory_starts_at_projected_initial_data() {
        let s = tg_scenario(8, 0.4, 0.3, 0.25);
        let config = SolverConfig {
            window: WindowPolicy::Fixed(0.25),
            dt: 1.0 / 16.0,
            picard_tol: 1e-11,
            ..SolverConfig::default()
        };
        let out = march(&s, &config).unwrap();
        assert_eq!(out.trajectory.times[0], 0.0);
        let v0 = s.initial.sample(&s.grid);
        let mut worst = 0.0f64;
        for c in 0..3 {
            for (a, b) in out.trajectory.states[0].components[c]
                .iter()
                .zip(v0.components[c].iter())
            {
                worst = worst.max((a - b).abs());
            }
        }
        // Taylor-Green is already divergence-free: projection changes nothing
        assert!(worst < 1e-12);
    }

    #[test]
    fn window_split_consistency() {
        // one window over [0, 2 tau] vs two windows of tau
        let s = tg_scenario(16, 0.6, 0.4, 0.25);
        let tol = 1e-11;
        let one = SolverConfig {
            window: WindowPolicy::Fixed(0.25),
            dt: 1.0 / 64.0,
            picard_tol: tol,
            snapshot_stride: 8,
            ..SolverConfig::default()
        };
        let two = SolverConfig {
            window: WindowPolicy::Fixed(0.125),
            ..one.clone()
        };
        let a = march(&s, &one).unwrap();
        let b = march(&s, &two).unwrap();
        assert_eq!(a.trajectory.times.len(), b.trajectory.times.len());
        let mut worst = 0.0f64;
        for (va, vb) in a.trajectory.states.iter().zip(&b.trajectory.states) {
            let ha = forward_transform(va).unwrap();
            let mut hb = forward_transform(vb).unwrap();
            hb.axpy(-1.0, &ha);
            worst = worst.max(n0_of_spectral(&hb));
        }
        assert!(worst <= 10.0 * tol, "split inconsistency {worst:e}");
    }

    #[test]
    fn estimate_window_linear_problem_returns_horizon() {
        let s = Scenario {
            initial: InitialCondition::Zero,
            ..tg_scenario(8, 1.0, 0.0, 2.0)
        };
        let config = SolverConfig {
            dt: 1.0 / 16.0,
            ..SolverConfig::default()
        };
        let tau = estimate_window(&s, &config).unwrap();
        assert_eq!(tau, 2.0);
    }
}
