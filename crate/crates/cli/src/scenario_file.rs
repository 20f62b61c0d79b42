//! Scenario-file schema and validation.
//!
//! A run is a single TOML document holding the physical scenario, the solver
//! configuration, and the output requests. Unknown keys are rejected, and
//! everything is validated before any computation or file output happens.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use oseen::oracles::{manufactured_case, MmsParams};
use oseen::solver::{Forcing, InitialCondition, Scenario, SolverConfig, WindowPolicy};
use oseen::GridSpec64;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub nu: f64,
    pub horizon: f64,
    #[serde(default = "default_decay_exponent")]
    pub decay_exponent: f64,
    pub grid: GridSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub forcing: ForcingSection,
    /// Shared parameters when either the initial data or the forcing refers
    /// to a manufactured exact solution.
    #[serde(default)]
    pub manufactured: Option<ManufacturedSection>,
}

fn default_decay_exponent() -> f64 {
    4.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub half_width: f64,
    pub points_per_axis: usize,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

fn default_dealias() -> f64 {
    2.0 / 3.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSection {
    Zero,
    TaylorGreen {
        amplitude: f64,
        #[serde(default = "one_i64")]
        wavenumber: i64,
    },
    GaussianVortex {
        amplitude: f64,
        width: f64,
    },
    SpectralPowerLaw {
        amplitude: f64,
        exponent: f64,
        #[serde(default = "default_dealias")]
        cutoff_fraction: f64,
        #[serde(default)]
        seed: u64,
    },
    Manufactured,
}

fn one_i64() -> i64 {
    1
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ForcingSection {
    #[default]
    None,
    SolenoidalHarmonic {
        amplitude: f64,
        wavenumber: [i64; 3],
        direction: [f64; 3],
        #[serde(default)]
        decay_rate: f64,
    },
    Manufactured,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManufacturedSection {
    /// `"taylor-green-periodic"` or `"taylor-green-gaussian"`.
    pub case: String,
    pub amplitude: f64,
    #[serde(default = "one_i64")]
    pub wavenumber: i64,
    #[serde(default = "default_envelope")]
    pub envelope_width: f64,
    #[serde(default)]
    pub decay_rate: f64,
    #[serde(default)]
    pub pressure_amplitude: f64,
}

fn default_envelope() -> f64 {
    0.6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub window: WindowField,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_safety")]
    pub contraction_safety: f64,
    #[serde(default = "default_true")]
    pub nonlinear: bool,
    #[serde(default = "default_retries")]
    pub retry_limit: usize,
    #[serde(default = "default_growth")]
    pub n1_growth_factor: f64,
}

fn default_tol() -> f64 {
    1e-9
}
fn default_iters() -> usize {
    40
}
fn default_dt() -> f64 {
    1.0 / 64.0
}
fn default_safety() -> f64 {
    0.5
}
fn default_true() -> bool {
    true
}
fn default_retries() -> usize {
    6
}
fn default_growth() -> f64 {
    10.0
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            picard_tol: default_tol(),
            max_iters: default_iters(),
            window: WindowField::default(),
            dt: default_dt(),
            contraction_safety: default_safety(),
            nonlinear: true,
            retry_limit: default_retries(),
            n1_growth_factor: default_growth(),
        }
    }
}

/// `window = "adaptive"` or a positive number of time units.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowField {
    Fixed(f64),
    Named(String),
}

impl Default for WindowField {
    fn default() -> Self {
        WindowField::Named("adaptive".into())
    }
}

impl WindowField {
    pub fn resolve(&self) -> Result<WindowPolicy<f64>> {
        match self {
            WindowField::Fixed(tau) => Ok(WindowPolicy::Fixed(*tau)),
            WindowField::Named(s) if s == "adaptive" => Ok(WindowPolicy::Adaptive),
            WindowField::Named(other) => {
                bail!("window must be a positive number or \"adaptive\", got {other:?}")
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Defaults to `$OSEEN_OUT_DIR`, then `out`.
    #[serde(default)]
    pub directory: Option<String>,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    /// Any of "norms", "energy", "spectral-envelope", "trace", "snapshots".
    #[serde(default = "default_diagnostics")]
    pub diagnostics: Vec<String>,
    #[serde(default)]
    pub with_pressure: bool,
}

impl OutputSection {
    pub fn resolve_directory(&self) -> String {
        self.directory
            .clone()
            .or_else(|| std::env::var("OSEEN_OUT_DIR").ok())
            .unwrap_or_else(|| "out".into())
    }
}

fn default_stride() -> usize {
    8
}
fn default_diagnostics() -> Vec<String> {
    vec![
        "norms".into(),
        "energy".into(),
        "spectral-envelope".into(),
        "trace".into(),
        "snapshots".into(),
    ]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: None,
            snapshot_stride: default_stride(),
            diagnostics: default_diagnostics(),
            with_pressure: false,
        }
    }
}

const KNOWN_DIAGNOSTICS: &[&str] = &["norms", "energy", "spectral-envelope", "trace", "snapshots"];

fn check_family_keys(text: &str) -> Result<()> {
    let value: toml::Value = toml::from_str(text)?;
    let section = |path: &[&str]| -> Option<&toml::value::Table> {
        let mut v = &value;
        for p in path {
            v = v.get(p)?;
        }
        v.as_table()
    };
    let allowed: &[(&[&str], &[(&str, &[&str])])] = &[
        (
            &["scenario", "initial"],
            &[
                ("zero", &["family"]),
                ("taylor-green", &["family", "amplitude", "wavenumber"]),
                ("gaussian-vortex", &["family", "amplitude", "width"]),
                (
                    "spectral-power-law",
                    &["family", "amplitude", "exponent", "cutoff_fraction", "seed"],
                ),
                ("manufactured", &["family"]),
            ],
        ),
        (
            &["scenario", "forcing"],
            &[
                ("none", &["family"]),
                (
                    "solenoidal-harmonic",
                    &["family", "amplitude", "wavenumber", "direction", "decay_rate"],
                ),
                ("manufactured", &["family"]),
            ],
        ),
    ];
    for (path, families) in allowed {
        let Some(table) = section(path) else { continue };
        let family = table
            .get("family")
            .and_then(|f| f.as_str())
            .ok_or_else(|| anyhow!("{} needs a string \"family\" key", path.join(".")))?;
        let keys = families
            .iter()
            .find(|(name, _)| *name == family)
            .map(|(_, keys)| *keys)
            .ok_or_else(|| anyhow!("unknown family {family:?} in {}", path.join(".")))?;
        for key in table.keys() {
            if !keys.contains(&key.as_str()) {
                bail!(
                    "unknown key {key:?} for family {family:?} in {}",
                    path.join(".")
                );
            }
        }
    }
    Ok(())
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).context("scenario file schema")?;
        // serde's internally tagged enums do not reject unknown fields, so
        // the family sections get an explicit key check
        check_family_keys(text)?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<()> {
        for d in &self.output.diagnostics {
            if !KNOWN_DIAGNOSTICS.contains(&d.as_str()) {
                bail!("unknown diagnostic {d:?}; known: {KNOWN_DIAGNOSTICS:?}");
            }
        }
        if self.output.snapshot_stride == 0 {
            bail!("output.snapshot_stride must be >= 1");
        }
        let needs_case = matches!(self.scenario.initial, InitialSection::Manufactured)
            || matches!(self.scenario.forcing, ForcingSection::Manufactured);
        if needs_case && self.scenario.manufactured.is_none() {
            bail!("initial or forcing family \"manufactured\" requires a [scenario.manufactured] section");
        }
        self.window_policy()?;
        // construct everything once so core-level validation runs up front
        let (scenario, config) = self.resolve()?;
        scenario.validate().map_err(|e| anyhow!("{e}"))?;
        config.validate().map_err(|e| anyhow!("{e}"))?;
        Ok(())
    }

    pub fn window_policy(&self) -> Result<WindowPolicy<f64>> {
        self.solver.window.resolve()
    }

    /// Build the core scenario and solver configuration.
    pub fn resolve(&self) -> Result<(Scenario<f64>, SolverConfig<f64>)> {
        let g = &self.scenario.grid;
        let grid = GridSpec64::with_dealias(g.half_width, g.points_per_axis, g.dealias_fraction)
            .map_err(|e| anyhow!("{e}"))?;

        let case = match &self.scenario.manufactured {
            Some(m) => Some(
                manufactured_case(
                    &m.case,
                    &MmsParams {
                        amplitude: m.amplitude,
                        wavenumber: m.wavenumber,
                        half_width: g.half_width,
                        envelope_width: m.envelope_width,
                        decay_rate: m.decay_rate,
                        nu: self.scenario.nu,
                        pressure_amplitude: m.pressure_amplitude,
                    },
                )
                .map_err(|e| anyhow!("{e}"))?,
            ),
            None => None,
        };

        let initial = match &self.scenario.initial {
            InitialSection::Zero => InitialCondition::Zero,
            InitialSection::TaylorGreen {
                amplitude,
                wavenumber,
            } => InitialCondition::TaylorGreen {
                amplitude: *amplitude,
                wavenumber: *wavenumber,
            },
            InitialSection::GaussianVortex { amplitude, width } => {
                InitialCondition::GaussianVortex {
                    amplitude: *amplitude,
                    width: *width,
                }
            }
            InitialSection::SpectralPowerLaw {
                amplitude,
                exponent,
                cutoff_fraction,
                seed,
            } => InitialCondition::SpectralPowerLaw {
                amplitude: *amplitude,
                exponent: *exponent,
                cutoff_fraction: *cutoff_fraction,
                seed: *seed,
            },
            InitialSection::Manufactured => {
                InitialCondition::Manufactured(case.clone().expect("validated above"))
            }
        };
        let forcing = match &self.scenario.forcing {
            ForcingSection::None => Forcing::None,
            ForcingSection::SolenoidalHarmonic {
                amplitude,
                wavenumber,
                direction,
                decay_rate,
            } => Forcing::SolenoidalHarmonic {
                amplitude: *amplitude,
                wavenumber: *wavenumber,
                direction: *direction,
                decay_rate: *decay_rate,
            },
            ForcingSection::Manufactured => {
                Forcing::Manufactured(case.expect("validated above"))
            }
        };

        let scenario = Scenario {
            nu: self.scenario.nu,
            grid,
            initial,
            forcing,
            horizon: self.scenario.horizon,
            decay_exponent: self.scenario.decay_exponent,
        };
        let config = SolverConfig {
            picard_tol: self.solver.picard_tol,
            max_iters: self.solver.max_iters,
            window: self.window_policy()?,
            dt: self.solver.dt,
            contraction_safety: self.solver.contraction_safety,
            nonlinear: self.solver.nonlinear,
            retry_limit: self.solver.retry_limit,
            n1_growth_factor: self.solver.n1_growth_factor,
            snapshot_stride: self.output.snapshot_stride,
            with_pressure: self.output.with_pressure,
        };
        Ok((scenario, config))
    }

    pub fn wants(&self, diagnostic: &str) -> bool {
        self.output.diagnostics.iter().any(|d| d == diagnostic)
    }
}
