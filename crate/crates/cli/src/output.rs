//! CSV and manifest writers.
//!
//! Data files are deterministic: full-precision shortest round-trip floats,
//! '.' decimals, no wall-clock content. Timing lives only in the manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use oseen::diagnostics::{EnergyReport, SpectralEnvelopeReport, NormReport};
use oseen::fields::ScalarField;
use oseen::oracles::suite::CheckResult;
use oseen::solver::{ConvergenceTrace, SolutionTrajectory};
use oseen::VectorField64;

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

pub fn write_norms(path: &Path, rows: &[NormReport<f64>]) -> Result<()> {
    let mut out = String::from("t,n0,n1,n0_x1,n0_x2,n0_x3,n1_x1,n1_x2,n1_x3\n");
    for r in rows {
        let t = r.t.unwrap_or(f64::NAN);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            t,
            r.n0,
            r.n1,
            r.n0_location[0],
            r.n0_location[1],
            r.n0_location[2],
            r.n1_location[0],
            r.n1_location[1],
            r.n1_location[2]
        )?;
    }
    write_atomic(path, &out)
}

pub fn write_energy(path: &Path, rows: &[EnergyReport<f64>]) -> Result<()> {
    let mut out = String::from("t,energy,dissipation_cum,forcing_cum,residual\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.t, r.energy, r.dissipation_cum, r.forcing_cum, r.residual
        )?;
    }
    write_atomic(path, &out)
}

pub fn write_spectral_envelope(path: &Path, report: &SpectralEnvelopeReport<f64>) -> Result<()> {
    let mut out = String::from("t,m,envelope\n");
    for (t, m) in report.times.iter().zip(&report.m) {
        writeln!(out, "{},{},{}", t, m, report.c0 + report.c1 * t)?;
    }
    write_atomic(path, &out)
}

pub fn write_trace(path: &Path, trace: &ConvergenceTrace<f64>) -> Result<()> {
    let mut out =
        String::from("window,t_start,t_end,iteration,delta,n1_sup,converged,max_divergence\n");
    for (w, win) in trace.windows.iter().enumerate() {
        let n = win.deltas.len().max(win.n1_sup.len());
        for i in 0..n {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                w,
                win.t_start,
                win.t_end,
                i,
                win.deltas.get(i).copied().unwrap_or(f64::NAN),
                win.n1_sup.get(i).copied().unwrap_or(f64::NAN),
                win.converged,
                win.max_divergence
            )?;
        }
    }
    write_atomic(path, &out)
}

pub fn write_snapshot(
    path: &Path,
    t: f64,
    v: &VectorField64,
    p: Option<&ScalarField<f64>>,
) -> Result<()> {
    let n = v.grid.points_per_axis();
    let mut out = String::with_capacity(n * n * n * 48);
    if p.is_some() {
        out.push_str("t,x1,x2,x3,v1,v2,v3,p\n");
    } else {
        out.push_str("t,x1,x2,x3,v1,v2,v3\n");
    }
    for i in 0..n {
        let x = v.grid.coord(i);
        for j in 0..n {
            let y = v.grid.coord(j);
            for k in 0..n {
                let z = v.grid.coord(k);
                write!(
                    out,
                    "{},{},{},{},{},{},{}",
                    t,
                    x,
                    y,
                    z,
                    v.components[0][[i, j, k]],
                    v.components[1][[i, j, k]],
                    v.components[2][[i, j, k]]
                )?;
                if let Some(p) = p {
                    write!(out, ",{}", p.samples[[i, j, k]])?;
                }
                out.push('\n');
            }
        }
    }
    write_atomic(path, &out)
}

/// Trajectory snapshots as `snapshot_###.csv`.
pub fn write_snapshots(dir: &Path, traj: &SolutionTrajectory<f64>) -> Result<()> {
    for (i, (t, v)) in traj.times.iter().zip(&traj.states).enumerate() {
        let p = traj.pressures.as_ref().map(|ps| &ps[i]);
        write_snapshot(&dir.join(format!("snapshot_{i:03}.csv")), *t, v, p)?;
    }
    Ok(())
}

pub fn write_verify_table(path: &Path, results: &[CheckResult]) -> Result<()> {
    let mut out = String::from("id,suite,description,measured,threshold,pass\n");
    for r in results {
        writeln!(
            out,
            "{},{},\"{}\",{},{},{}",
            r.id, r.suite, r.description, r.measured, r.threshold, r.pass
        )?;
    }
    write_atomic(path, &out)
}

pub fn print_verify_table(results: &[CheckResult]) {
    let width = results.iter().map(|r| r.id.len()).max().unwrap_or(8);
    for r in results {
        println!(
            "{:>5} {:<w$} measured {: <13} threshold {: <13} {}",
            if r.pass { "ok" } else { "FAIL" },
            r.id,
            format!("{:.6e}", r.measured),
            format!("{:.3e}", r.threshold),
            r.description,
            w = width,
        );
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    println!(
        "verify: {} checks, {} failed",
        results.len(),
        failed
    );
}
