//! JSON run configuration.

use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::Deserialize;

use crate::error::{CpsError, Result};
use crate::gates::FieldDensity;
use crate::model::{detunings_from_single_photon, PhysParams};
use crate::C64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Cps,
    Epr,
    Sweep,
    Xcheck,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Cps => "cps",
            Scenario::Epr => "epr",
            Scenario::Sweep => "sweep",
            Scenario::Xcheck => "xcheck",
        }
    }
}

/// A complex number given as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> C64 {
        match self {
            ComplexValue::Real(x) => C64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }
}

/// Parameters in units of `|g|` unless stated otherwise.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    /// Shorthand for `g_a = g_b = g_c`.
    pub g: Option<ComplexValue>,
    /// Shorthand for `Ω_1 = Ω_2`.
    pub omega: Option<ComplexValue>,
    pub g_a: Option<ComplexValue>,
    pub g_b: Option<ComplexValue>,
    pub g_c: Option<ComplexValue>,
    pub omega_1: Option<ComplexValue>,
    pub omega_2: Option<ComplexValue>,
    pub detunings: Option<[f64; 6]>,
    pub single_photon_detunings: Option<[f64; 6]>,
    pub n_max: Option<usize>,
}

impl ParamsConfig {
    pub fn resolve(&self) -> Result<PhysParams> {
        if self.detunings.is_some() && self.single_photon_detunings.is_some() {
            return Err(CpsError::Config(
                "params: give either `detunings` or `single_photon_detunings`, not both".into(),
            ));
        }
        let g = self.g.map(ComplexValue::value).unwrap_or(C64::new(1.0, 0.0));
        let omega = self.omega.map(ComplexValue::value).unwrap_or(C64::new(10.0, 0.0));
        let pick = |v: Option<ComplexValue>, default: C64| v.map(ComplexValue::value).unwrap_or(default);
        let detunings = match (self.detunings, self.single_photon_detunings) {
            (Some(d), _) => d,
            (None, Some(eps)) => detunings_from_single_photon(eps),
            (None, None) => [0.0; 6],
        };
        let params = PhysParams {
            g_a: pick(self.g_a, g),
            g_b: pick(self.g_b, g),
            g_c: pick(self.g_c, g),
            omega_1: pick(self.omega_1, omega),
            omega_2: pick(self.omega_2, omega),
            detunings,
            n_max: self.n_max.unwrap_or(1),
        };
        params
            .validate()
            .map_err(|e| CpsError::Config(format!("params: {e}")))?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TimeBound {
    Absolute(f64),
    /// Multiple of the scenario's interaction time.
    Relative { t_int: f64 },
}

impl TimeBound {
    pub fn resolve(self, t_int: f64) -> f64 {
        match self {
            TimeBound::Absolute(t) => t,
            TimeBound::Relative { t_int: k } => k * t_int,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default = "zero_bound")]
    pub start: TimeBound,
    pub stop: TimeBound,
    pub steps: usize,
}

fn zero_bound() -> TimeBound {
    TimeBound::Absolute(0.0)
}

impl TimeGrid {
    /// `steps + 1` equally spaced times from start to stop inclusive.
    pub fn times(&self, t_int: f64) -> Result<Vec<f64>> {
        if self.steps < 2 {
            return Err(CpsError::Config(format!(
                "time_grid.steps must be ≥ 2, got {}",
                self.steps
            )));
        }
        let start = self.start.resolve(t_int);
        let stop = self.stop.resolve(t_int);
        if !(start >= 0.0 && stop > start && stop.is_finite()) {
            return Err(CpsError::Config(format!(
                "time_grid: need 0 ≤ start < stop, got [{start}, {stop}]"
            )));
        }
        Ok((0..=self.steps)
            .map(|i| start + (stop - start) * i as f64 / self.steps as f64)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Preset(String),
    Amplitudes(Vec<ComplexValue>),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Preset("xi".into())
    }
}

impl InitialState {
    pub fn resolve(&self) -> Result<FieldDensity> {
        match self {
            InitialState::Preset(name) => match name.as_str() {
                "xi" => Ok(FieldDensity::xi()),
                "phi" => Ok(FieldDensity::phi()),
                "uniform" => Ok(FieldDensity::uniform()),
                other => {
                    let Some(idx) = other.strip_prefix("basis:") else {
                        return Err(CpsError::Config(format!(
                            "initial_state: unknown preset `{other}` (xi, phi, uniform, basis:<s>)"
                        )));
                    };
                    let s: usize = idx.trim().parse().map_err(|_| {
                        CpsError::Config(format!("initial_state: bad basis index `{idx}`"))
                    })?;
                    FieldDensity::basis(s).map_err(|e| CpsError::Config(format!("initial_state: {e}")))
                }
            },
            InitialState::Amplitudes(amps) => {
                if amps.len() != 8 {
                    return Err(CpsError::Config(format!(
                        "initial_state: expected 8 amplitudes, got {}",
                        amps.len()
                    )));
                }
                let psi = DVector::from_iterator(8, amps.iter().map(|a| a.value()));
                let norm = psi.norm();
                if (norm - 1.0).abs() > 1e-6 {
                    log::warn!("initial_state: renormalising amplitudes (norm was {norm:.9})");
                }
                FieldDensity::pure(&psi).map_err(|e| CpsError::Config(format!("initial_state: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out_dir(), formats: default_formats() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// `|Ω|` with `|g|` fixed.
    Omega,
    /// `|g|` with `|Ω|` fixed.
    G,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    #[serde(default)]
    pub values: Vec<f64>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub steps: Option<usize>,
    #[serde(default)]
    pub log: bool,
}

impl SweepConfig {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !self.values.is_empty() {
            return Ok(self.values.clone());
        }
        match (self.start, self.stop, self.steps) {
            (Some(a), Some(b), Some(n)) if n >= 1 => Ok((0..=n)
                .map(|i| {
                    let f = i as f64 / n as f64;
                    if self.log {
                        a * (b / a).powf(f)
                    } else {
                        a + (b - a) * f
                    }
                })
                .collect()),
            _ => Err(CpsError::Config(
                "sweep: give `values` or `start`, `stop`, `steps` (≥ 1)".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XcheckConfig {
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default = "default_times")]
    pub times: usize,
    /// Upper end of the random time window, in units of `1/|g|`.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    /// Draw random parameters; `false` checks the configured `params`.
    #[serde(default = "default_random")]
    pub random: bool,
}

fn default_random() -> bool {
    true
}

fn default_draws() -> usize {
    20
}

fn default_times() -> usize {
    20
}

fn default_t_max() -> f64 {
    50.0
}

impl Default for XcheckConfig {
    fn default() -> Self {
        XcheckConfig {
            draws: default_draws(),
            times: default_times(),
            t_max: default_t_max(),
            random: default_random(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EprConfig {
    #[serde(default)]
    pub scan: bool,
    pub scan_steps: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertion {
    pub name: String,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub scenario: Scenario,
    #[serde(default)]
    pub params: ParamsConfig,
    pub time_grid: Option<TimeGrid>,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub xcheck: XcheckConfig,
    #[serde(default)]
    pub epr: EprConfig,
    /// Samples per fast period when averaging `1 − P`.
    #[serde(default = "default_period_samples")]
    pub period_samples: usize,
    /// Propagator tolerance for unitarity and Hermiticity checks.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
}

fn default_period_samples() -> usize {
    400
}

fn default_tol() -> f64 {
    crate::propagator::DEFAULT_TOL
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CpsError::Config(format!(
                "line {} column {}, field `{}`: {}",
                inner.line(),
                inner.column(),
                path,
                inner
            ))
        })?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(CpsError::Config(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CpsError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
