//! The `tabulate` subcommand: kernel values in long CSV form.
//!
//! Columns `x1,x2,x3,t,nu,component_jm,value`, one row per component:
//! `g` plus `G11..G33` for every physical point, `H11..H33` for every
//! Fourier point (where `x` columns carry the wavevector). Rows at singular
//! points carry an error marker in the value column; negative times are
//! causal zeros.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;

use oseen::kernels::{fourier_h, heat_kernel, oseen_g, KernelPoint};

#[derive(Args)]
pub struct TabulateArgs {
    /// Physical-space point "x1,x2,x3,t,nu" (repeatable).
    #[arg(long = "point")]
    points: Vec<String>,
    /// Fourier-space point "k1,k2,k3,t,nu" (repeatable).
    #[arg(long = "xi")]
    xi_points: Vec<String>,
    /// CSV file of physical points with header x1,x2,x3,t,nu.
    #[arg(long = "points-file")]
    points_file: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_five(raw: &str) -> Result<[f64; 5]> {
    let parts: Vec<f64> = raw
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("parsing point {raw:?}"))?;
    if parts.len() != 5 {
        bail!("point {raw:?} must have 5 comma-separated values");
    }
    Ok([parts[0], parts[1], parts[2], parts[3], parts[4]])
}

pub fn run(args: &TabulateArgs) -> Result<ExitCode> {
    let mut physical: Vec<[f64; 5]> = Vec::new();
    for raw in &args.points {
        physical.push(parse_five(raw)?);
    }
    if let Some(file) = &args.points_file {
        let text = fs::read_to_string(file)?;
        for line in text.lines().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            physical.push(parse_five(line)?);
        }
    }
    let mut fourier: Vec<[f64; 5]> = Vec::new();
    for raw in &args.xi_points {
        fourier.push(parse_five(raw)?);
    }
    if physical.is_empty() && fourier.is_empty() {
        bail!("nothing to tabulate: pass --point, --points-file, or --xi");
    }

    let mut out = String::from("x1,x2,x3,t,nu,component_jm,value\n");
    let mut ok_rows = 0usize;
    let mut failed_rows = 0usize;
    let labels = ["1", "2", "3"];

    for p in &physical {
        let point = KernelPoint::new([p[0], p[1], p[2]], p[3], p[4]);
        match heat_kernel(&point) {
            Ok(v) => {
                writeln!(out, "{},{},{},{},{},g,{}", p[0], p[1], p[2], p[3], p[4], v)?;
                ok_rows += 1;
            }
            Err(e) => {
                writeln!(
                    out,
                    "{},{},{},{},{},g,error:{}",
                    p[0], p[1], p[2], p[3], p[4], e
                )?;
                failed_rows += 1;
            }
        }
        match oseen_g(&point) {
            Ok(tensor) => {
                for j in 0..3 {
                    for m in 0..3 {
                        writeln!(
                            out,
                            "{},{},{},{},{},G{}{},{}",
                            p[0],
                            p[1],
                            p[2],
                            p[3],
                            p[4],
                            labels[j],
                            labels[m],
                            tensor.0[j][m]
                        )?;
                        ok_rows += 1;
                    }
                }
            }
            Err(e) => {
                for j in 0..3 {
                    for m in 0..3 {
                        writeln!(
                            out,
                            "{},{},{},{},{},G{}{},error:{}",
                            p[0], p[1], p[2], p[3], p[4], labels[j], labels[m], e
                        )?;
                        failed_rows += 1;
                    }
                }
            }
        }
    }
    for p in &fourier {
        match fourier_h([p[0], p[1], p[2]], p[3], p[4]) {
            Ok(tensor) => {
                for j in 0..3 {
                    for m in 0..3 {
                        writeln!(
                            out,
                            "{},{},{},{},{},H{}{},{}",
                            p[0],
                            p[1],
                            p[2],
                            p[3],
                            p[4],
                            labels[j],
                            labels[m],
                            tensor.0[j][m]
                        )?;
                        ok_rows += 1;
                    }
                }
            }
            Err(e) => {
                for j in 0..3 {
                    for m in 0..3 {
                        writeln!(
                            out,
                            "{},{},{},{},{},H{}{},error:{}",
                            p[0], p[1], p[2], p[3], p[4], labels[j], labels[m], e
                        )?;
                        failed_rows += 1;
                    }
                }
            }
        }
    }

    match &args.out {
        Some(path) => fs::write(path, out)?,
        None => print!("{out}"),
    }
    Ok(if ok_rows == 0 && failed_rows > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
