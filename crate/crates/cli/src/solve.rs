//! The `solve` subcommand: validate, march, emit artifacts.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context, Result};
use serde::Serialize;

use oseen::diagnostics::{
    balance_from_series, energy_bound_check, spectral_envelope_check, norm_report,
};
use oseen::solver::{march, MarchOutput, SolverError};

use crate::output;
use crate::scenario_file::{ScenarioFile, WindowField};
use crate::SolveArgs;

#[derive(Serialize)]
struct Manifest {
    code_version: String,
    start_unix: f64,
    end_unix: f64,
    wall_seconds: f64,
    converged: bool,
    n1_growth_flagged: bool,
    fhat_sq_sup: f64,
    energy_bound_slack: f64,
    energy_bound_pass: bool,
    envelope_c0: Option<f64>,
    envelope_c1: Option<f64>,
    windows: Vec<WindowSummary>,
    resolved: ResolvedEcho,
}

#[derive(Serialize)]
struct WindowSummary {
    t_start: f64,
    t_end: f64,
    iterations: usize,
    final_delta: f64,
    converged: bool,
    max_divergence: f64,
}

#[derive(Serialize)]
struct ResolvedEcho {
    scenario_file: ScenarioFile,
    linear_flag: bool,
}

pub fn run(args: &SolveArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.scenario)
        .with_context(|| format!("reading {}", args.scenario.display()))?;
    let mut file = ScenarioFile::parse(&text)?;

    // flag overrides, then re-validate the resolved configuration
    if let Some(tau) = &args.tau {
        file.solver.window = if tau == "adaptive" {
            WindowField::Named("adaptive".into())
        } else {
            WindowField::Fixed(
                tau.parse::<f64>()
                    .map_err(|_| anyhow!("--tau expects a number or \"adaptive\""))?,
            )
        };
    }
    if let Some(dt) = args.dt {
        file.solver.dt = dt;
    }
    if let Some(n) = args.grid {
        file.scenario.grid.points_per_axis = n;
    }
    if let Some(l) = args.box_half_width {
        file.scenario.grid.half_width = l;
    }
    if args.linear {
        file.solver.nonlinear = false;
    }
    if let Some(out) = &args.out {
        file.output.directory = Some(out.display().to_string());
    }
    let (scenario, config) = file.resolve()?;
    scenario.validate().map_err(|e| anyhow!("{e}"))?;
    config.validate().map_err(|e| anyhow!("{e}"))?;

    // validation is done: now (and only now) touch the filesystem
    let start_unix = unix_now();
    let started = Instant::now();
    let out = match march(&scenario, &config) {
        Ok(out) => out,
        Err(SolverError::ContractionFailure {
            ratio,
            window,
            iters,
        }) => {
            eprintln!(
                "contraction failure: ratio {ratio:.3e} on window {window:.3e} after {iters} iterations and all retries"
            );
            return Ok(ExitCode::from(3));
        }
        Err(other) => return Err(other.into()),
    };

    let dir_name = file.output.resolve_directory();
    let dir = Path::new(&dir_name);
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    if file.wants("snapshots") {
        output::write_snapshots(dir, &out.trajectory)?;
    }
    if file.wants("norms") {
        let rows: Vec<_> = out
            .trajectory
            .states
            .iter()
            .map(|v| norm_report(v).map_err(|e| anyhow!("{e}")))
            .collect::<Result<_>>()?;
        output::write_norms(&dir.join("norms.csv"), &rows)?;
    }
    if file.wants("energy") {
        let rows = balance_from_series(&out.energy, scenario.nu, 1);
        output::write_energy(&dir.join("energy.csv"), &rows)?;
    }
    let envelope = if file.wants("spectral-envelope") {
        let report = spectral_envelope_check(
            &out.trajectory.times,
            &out.trajectory.states,
            Some(out.trace.fhat_sq_sup),
        )
        .map_err(|e| anyhow!("{e}"))?;
        output::write_spectral_envelope(&dir.join("spectral_envelope.csv"), &report)?;
        Some(report)
    } else {
        None
    };
    if file.wants("trace") {
        output::write_trace(&dir.join("trace.csv"), &out.trace)?;
    }

    let bound = energy_bound_check(&out.energy);
    let manifest = build_manifest(&file, args.linear, &out, start_unix, started.elapsed().as_secs_f64(), bound.slack, bound.pass, &envelope);
    fs::write(dir.join("manifest.toml"), toml::to_string_pretty(&manifest)?)?;

    let converged = out.trace.windows.iter().all(|w| w.converged);
    println!(
        "solved to t = {} in {} windows ({} snapshots) -> {}",
        out.trajectory.times.last().unwrap(),
        out.trace.windows.len(),
        out.trajectory.times.len(),
        dir.display()
    );
    if out.trace.n1_growth_flagged {
        eprintln!("note: the N1 boundedness monitor grew past its configured factor (flag only)");
    }
    Ok(if converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

#[allow(clippy::too_many_arguments)]
fn build_manifest(
    file: &ScenarioFile,
    linear_flag: bool,
    out: &MarchOutput<f64>,
    start_unix: f64,
    wall: f64,
    slack: f64,
    bound_pass: bool,
    envelope: &Option<oseen::diagnostics::SpectralEnvelopeReport<f64>>,
) -> Manifest {
    Manifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        start_unix,
        end_unix: start_unix + wall,
        wall_seconds: wall,
        converged: out.trace.windows.iter().all(|w| w.converged),
        n1_growth_flagged: out.trace.n1_growth_flagged,
        fhat_sq_sup: out.trace.fhat_sq_sup,
        energy_bound_slack: slack,
        energy_bound_pass: bound_pass,
        envelope_c0: envelope.as_ref().map(|l| l.c0),
        envelope_c1: envelope.as_ref().map(|l| l.c1),
        windows: out
            .trace
            .windows
            .iter()
            .map(|w| WindowSummary {
                t_start: w.t_start,
                t_end: w.t_end,
                iterations: w.deltas.len(),
                final_delta: w.deltas.last().copied().unwrap_or(0.0),
                converged: w.converged,
                max_divergence: w.max_divergence,
            })
            .collect(),
        resolved: ResolvedEcho {
            scenario_file: file.clone(),
            linear_flag,
        },
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}
