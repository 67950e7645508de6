//! Scenario files.
//!
//! A scenario is a TOML document with a fixed set of sections. Every table
//! rejects unknown keys. `--set section.key=value` overrides are applied to
//! the parsed document before it is resolved, and sweeps are expanded into
//! one resolved scenario per value.

use std::f64::consts::PI;

use qnoise::analysis::PsdMethod;
use qnoise::noise::{HurstProfile, MemoryKernel};
use qnoise::qubit::{Frame, LindbladParams, QuantumState, QubitParams, DEFAULT_OMEGA0};
use qnoise::sde::{Drift, IntegratorKind, SdeSpec};
use qnoise::TimeGrid;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Sde,
    Unitary,
    Lindblad,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Sde => "sde",
            Model::Unitary => "unitary",
            Model::Lindblad => "lindblad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HurstKind {
    Constant,
    Sinusoidal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Mmfbm,
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorName {
    MmfbmSde,
    MemoryOu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftKind {
    Linear,
    Affine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameName {
    Lab,
    Rotating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Zero,
    One,
    Plus,
}

impl InitialState {
    pub fn state(&self) -> QuantumState {
        match self {
            InitialState::Zero => QuantumState::zero(),
            InitialState::One => QuantumState::one(),
            InitialState::Plus => QuantumState::plus(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdMethodName {
    Periodogram,
    SegmentAveraged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub model: Model,
    pub grid: RawGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hurst: Option<RawHurst>,
    pub kernel: RawKernel,
    pub sde: RawSde,
    pub ensemble: RawEnsemble,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RawSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<RawQubit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lindblad: Option<RawLindblad>,
    #[serde(default)]
    pub analysis: RawAnalysis,
    #[serde(default)]
    pub output: RawOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub total_time: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHurst {
    pub kind: HurstKind,
    pub base: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawKernel {
    pub kind: KernelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSde {
    pub integrator: IntegratorName,
    pub drift: DriftKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Direct noise amplitude `G`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<f64>,
    /// Amplitude entering through `σφ / 2π`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_phi: Option<f64>,
    pub chi0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEnsemble {
    pub n_traj: usize,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub parameter: String,
    pub values: Vec<f64>,
}

fn default_omega0() -> f64 {
    DEFAULT_OMEGA0
}

fn default_ej_ec() -> f64 {
    50.0
}

fn default_delta_ng() -> f64 {
    0.1
}

fn default_frame() -> FrameName {
    FrameName::Rotating
}

fn default_initial() -> InitialState {
    InitialState::Zero
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQubit {
    #[serde(default = "default_omega0")]
    pub omega0: f64,
    pub delta: f64,
    #[serde(default = "default_ej_ec")]
    pub ej_ec_ratio: f64,
    #[serde(default = "default_delta_ng")]
    pub delta_ng: f64,
    #[serde(default = "default_frame")]
    pub frame: FrameName,
    #[serde(default = "default_initial")]
    pub initial_state: InitialState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLindblad {
    pub t1: f64,
    pub t2: f64,
}

fn default_psd_method() -> PsdMethodName {
    PsdMethodName::SegmentAveraged
}

fn default_beta_tol() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAnalysis {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_band: Option<[f64; 2]>,
    #[serde(default = "default_psd_method")]
    pub psd_method: PsdMethodName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_segment: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_beta: Option<f64>,
    #[serde(default = "default_beta_tol")]
    pub reference_beta_tol: f64,
}

impl Default for RawAnalysis {
    fn default() -> Self {
        Self {
            decay_window: None,
            spectral_band: None,
            psd_method: default_psd_method(),
            psd_segment: None,
            reference_beta: None,
            reference_beta_tol: default_beta_tol(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    /// Number of individual trajectories written as `t, value` CSVs.
    #[serde(default)]
    pub noise_paths: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitSetup {
    pub params: QubitParams,
    pub initial_state: InitialState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSetup {
    pub decay_window: (f64, f64),
    pub spectral_band: Option<(f64, f64)>,
    pub psd_method: PsdMethod,
    pub psd_segment: Option<usize>,
    /// Reference exponent and tolerance that a fitted `β̂` is matched against.
    pub reference_beta: Option<(f64, f64)>,
}

/// A fully validated scenario, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub spec: SdeSpec,
    pub integrator: IntegratorKind,
    pub n_traj: usize,
    pub base_seed: u64,
    pub qubit: Option<QubitSetup>,
    pub lindblad: Option<LindbladParams>,
    pub analysis: AnalysisSetup,
    pub noise_paths: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub key: String,
    pub value: Value,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn leaf(&self) -> &str {
        self.parameter.rsplit('.').next().unwrap_or(&self.parameter)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    /// `None` without a sweep, otherwise `<leaf>_<value>`.
    pub label: Option<String>,
    pub resolved: RawConfig,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub origin: String,
    pub source: String,
    pub overrides: Vec<Override>,
    /// The document after overrides, before sweep expansion.
    pub resolved: RawConfig,
    pub sweep: Option<Sweep>,
    pub variants: Vec<Variant>,
}

/// Shortest round-trip formatting used for every number written to disk.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn parse_override(raw: &str) -> Result<Override, ConfigError> {
    let err = |message: String| ConfigError {
        origin: "--set".into(),
        line: None,
        message,
    };
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| err(format!("`{raw}` is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(|p| p.is_empty()) {
        return Err(err(format!("`{raw}` has an empty key segment")));
    }
    let text = value.trim();
    let value = match toml::from_str::<Table>(&format!("v = {text}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => Value::String(text.to_string()),
    };
    Ok(Override {
        key: key.to_string(),
        value,
        raw: raw.to_string(),
    })
}

fn set_path(table: &mut Table, key: &str, value: Value) -> Result<(), String> {
    let parts: Vec<&str> = key.split('.').collect();
    let (last, parents) = parts.split_last().expect("non-empty key");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = match entry {
            Value::Table(t) => t,
            _ => return Err(format!("`{p}` in `{key}` is not a section")),
        };
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn get_path<'a>(table: &'a Table, key: &str) -> Option<&'a Value> {
    let mut parts = key.split('.');
    let mut cur = table.get(parts.next()?)?;
    for p in parts {
        cur = cur.as_table()?.get(p)?;
    }
    Some(cur)
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Line of `key = ...` inside `[section]` (top level for an empty section),
/// falling back to the section header.
fn locate(src: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, line) in src.lines().enumerate() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

struct Ctx<'a> {
    origin: &'a str,
    src: &'a str,
    overrides: &'a [Override],
    label: Option<&'a str>,
}

impl Ctx<'_> {
    /// `field` is `section.key`, or a bare top-level key.
    fn error(&self, field: &str, message: impl Into<String>) -> ConfigError {
        let (section, key) = field.rsplit_once('.').unwrap_or(("", field));
        let mut message = message.into();
        if self.overrides.iter().any(|o| o.key == field) {
            message = format!("{message} (set by --set {field})");
        }
        if let Some(label) = self.label {
            message = format!("{message} (sweep value {label})");
        }
        ConfigError {
            origin: self.origin.to_string(),
            line: locate(self.src, section, key),
            message: format!("{field}: {message}"),
        }
    }

    fn model(&self, field: &str, e: qnoise::Error) -> ConfigError {
        self.error(field, e.to_string())
    }
}

fn deserialize(table: &Table, ctx: &Ctx) -> Result<RawConfig, ConfigError> {
    Value::Table(table.clone())
        .try_into::<RawConfig>()
        .map_err(|e| {
            let msg = e.message().trim().to_string();
            // Name the first override the message mentions, if any.
            let culprit = ctx
                .overrides
                .iter()
                .find(|o| msg.contains(o.key.rsplit('.').next().unwrap_or(&o.key)));
            ConfigError {
                origin: ctx.origin.to_string(),
                line: None,
                message: match culprit {
                    Some(o) => format!("{msg} (after --set {})", o.raw),
                    None => msg,
                },
            }
        })
}

fn resolve(raw: &RawConfig, ctx: &Ctx) -> Result<Scenario, ConfigError> {
    let grid = TimeGrid::new(raw.grid.total_time, raw.grid.steps).map_err(|e| {
        let field = if raw.grid.steps == 0 {
            "grid.steps"
        } else {
            "grid.total_time"
        };
        ctx.model(field, e)
    })?;
    let horizon = grid.total_time();

    let kernel = match raw.kernel.kind {
        KernelKind::Mmfbm => {
            if raw.kernel.beta.is_some() {
                return Err(ctx.error("kernel.beta", "only the power_law kernel takes beta"));
            }
            let h = raw
                .hurst
                .as_ref()
                .ok_or_else(|| ctx.error("kernel.kind", "the mmfbm kernel needs a [hurst] section"))?;
            let profile = match h.kind {
                HurstKind::Constant => {
                    if h.amplitude.is_some() || h.period.is_some() {
                        return Err(ctx.error(
                            "hurst.kind",
                            "a constant profile takes only `base`",
                        ));
                    }
                    HurstProfile::constant(h.base, horizon)
                }
                HurstKind::Sinusoidal => {
                    let amplitude = h
                        .amplitude
                        .ok_or_else(|| ctx.error("hurst.amplitude", "required for a sinusoidal profile"))?;
                    let period = h
                        .period
                        .ok_or_else(|| ctx.error("hurst.period", "required for a sinusoidal profile"))?;
                    HurstProfile::sinusoidal(h.base, amplitude, period, horizon)
                }
            }
            .map_err(|e| ctx.model("hurst.base", e))?;
            MemoryKernel::mmfbm(profile)
        }
        KernelKind::PowerLaw => {
            if raw.hurst.is_some() {
                return Err(ctx.error("hurst.kind", "[hurst] only applies to the mmfbm kernel"));
            }
            let beta = raw
                .kernel
                .beta
                .ok_or_else(|| ctx.error("kernel.beta", "required for the power_law kernel"))?;
            MemoryKernel::power_law(beta).map_err(|e| ctx.model("kernel.beta", e))?
        }
    };
    let kernel = match raw.kernel.cutoff {
        Some(tau) => kernel
            .with_cutoff(tau)
            .map_err(|e| ctx.model("kernel.cutoff", e))?,
        None => kernel,
    };

    let sde = &raw.sde;
    let drift = match sde.drift {
        DriftKind::Linear => {
            if sde.mu.is_some() {
                return Err(ctx.error("sde.mu", "a linear drift takes `lambda`, not `mu`"));
            }
            let lambda = sde
                .lambda
                .ok_or_else(|| ctx.error("sde.lambda", "required for a linear drift"))?;
            if !(lambda.is_finite() && lambda >= 0.0) {
                return Err(ctx.error("sde.lambda", format!("{lambda} must be finite and >= 0")));
            }
            Drift::Linear { lambda }
        }
        DriftKind::Affine => {
            if sde.lambda.is_some() {
                return Err(ctx.error("sde.lambda", "an affine drift takes `mu`, not `lambda`"));
            }
            let mu = sde
                .mu
                .ok_or_else(|| ctx.error("sde.mu", "required for an affine drift"))?;
            if !mu.is_finite() {
                return Err(ctx.error("sde.mu", "must be finite"));
            }
            Drift::Affine { mu }
        }
    };
    let (integrator, diffusion) = match (sde.integrator, sde.diffusion, sde.sigma_phi) {
        (_, Some(_), Some(_)) => {
            return Err(ctx.error("sde.sigma_phi", "give either `diffusion` or `sigma_phi`, not both"))
        }
        (IntegratorName::MmfbmSde, Some(g), None) => (IntegratorKind::MmfbmSde, g),
        (IntegratorName::MmfbmSde, None, Some(s)) => (IntegratorKind::MmfbmSde, s / (2.0 * PI)),
        // memory_ou applies the 1/2π prefactor itself
        (IntegratorName::MemoryOu, None, Some(s)) => (IntegratorKind::MemoryOu, s),
        (IntegratorName::MemoryOu, Some(_), None) => {
            return Err(ctx.error("sde.diffusion", "memory_ou takes its amplitude as `sigma_phi`"))
        }
        (_, None, None) => return Err(ctx.error("sde.diffusion", "a noise amplitude is required")),
    };
    let amp_field = if sde.sigma_phi.is_some() {
        "sde.sigma_phi"
    } else {
        "sde.diffusion"
    };
    match (integrator, raw.kernel.kind) {
        (IntegratorKind::MmfbmSde, KernelKind::Mmfbm) | (IntegratorKind::MemoryOu, KernelKind::PowerLaw) => {}
        (IntegratorKind::MmfbmSde, _) => {
            return Err(ctx.error("sde.integrator", "mmfbm_sde needs the mmfbm kernel"))
        }
        (IntegratorKind::MemoryOu, _) => {
            return Err(ctx.error("sde.integrator", "memory_ou needs the power_law kernel"))
        }
    }
    let spec = SdeSpec::new(drift, diffusion, sde.chi0, kernel, grid.clone()).map_err(|e| {
        let field = match &e {
            qnoise::Error::Domain { name: "chi0", .. } => "sde.chi0",
            _ => amp_field,
        };
        ctx.model(field, e)
    })?;

    if raw.ensemble.n_traj == 0 {
        return Err(ctx.error("ensemble.n_traj", "must be >= 1"));
    }

    let qubit = match (raw.model, &raw.qubit) {
        (Model::Sde, Some(_)) => {
            return Err(ctx.error("model", "[qubit] is not used by the sde model"))
        }
        (Model::Sde, None) => None,
        (_, None) => return Err(ctx.error("model", "qubit models need a [qubit] section")),
        (_, Some(q)) => {
            let params = QubitParams {
                omega0: q.omega0,
                delta: q.delta,
                ej_ec_ratio: q.ej_ec_ratio,
                delta_ng: q.delta_ng,
                frame: match q.frame {
                    FrameName::Lab => Frame::Lab,
                    FrameName::Rotating => Frame::Rotating,
                },
            };
            params.validate().map_err(|e| {
                let field = match &e {
                    qnoise::Error::Domain { name: "delta", .. } => "qubit.delta",
                    _ => "qubit.omega0",
                };
                ctx.model(field, e)
            })?;
            Some(QubitSetup {
                params,
                initial_state: q.initial_state,
            })
        }
    };
    let lindblad = match (raw.model, &raw.lindblad) {
        (Model::Lindblad, Some(l)) => {
            Some(LindbladParams::new(l.t1, l.t2).map_err(|e| ctx.model("lindblad.t2", e))?)
        }
        (Model::Lindblad, None) => {
            return Err(ctx.error("model", "the lindblad model needs a [lindblad] section"))
        }
        (_, Some(_)) => {
            return Err(ctx.error("lindblad.t1", "[lindblad] is only used by the lindblad model"))
        }
        (_, None) => None,
    };

    let a = &raw.analysis;
    let decay_window = match a.decay_window {
        Some([lo, hi]) => {
            if !(lo >= 0.0 && hi > lo && hi <= horizon) {
                return Err(ctx.error(
                    "analysis.decay_window",
                    format!("[{lo}, {hi}] must satisfy 0 <= lo < hi <= total_time"),
                ));
            }
            (lo, hi)
        }
        None => (0.0, horizon),
    };
    let spectral_band = match a.spectral_band {
        Some([lo, hi]) => {
            if !(lo > 0.0 && hi > lo) {
                return Err(ctx.error("analysis.spectral_band", format!("[{lo}, {hi}] must satisfy 0 < lo < hi")));
            }
            Some((lo, hi))
        }
        None => None,
    };
    if let Some(seg) = a.psd_segment {
        if seg < 16 || seg > grid.steps() {
            return Err(ctx.error(
                "analysis.psd_segment",
                format!("{seg} must lie in [16, grid.steps]"),
            ));
        }
    }
    if !(a.reference_beta_tol.is_finite() && a.reference_beta_tol >= 0.0) {
        return Err(ctx.error("analysis.reference_beta_tol", "must be finite and >= 0"));
    }
    let analysis = AnalysisSetup {
        decay_window,
        spectral_band,
        psd_method: match a.psd_method {
            PsdMethodName::Periodogram => PsdMethod::Periodogram,
            PsdMethodName::SegmentAveraged => PsdMethod::SegmentAveraged,
        },
        psd_segment: a.psd_segment,
        reference_beta: a.reference_beta.map(|b| (b, a.reference_beta_tol)),
    };
    if raw.output.noise_paths > raw.ensemble.n_traj {
        return Err(ctx.error("output.noise_paths", "cannot exceed ensemble.n_traj"));
    }

    Ok(Scenario {
        name: raw.name.clone(),
        model: raw.model,
        spec,
        integrator,
        n_traj: raw.ensemble.n_traj,
        base_seed: raw.ensemble.base_seed,
        qubit,
        lindblad,
        analysis,
        noise_paths: raw.output.noise_paths,
    })
}

/// Parses `source`, applies `overrides`, expands any sweep and validates
/// every resulting scenario.
pub fn load(origin: &str, source: &str, overrides: &[String]) -> Result<LoadedConfig, ConfigError> {
    // Parsing the file on its own first anchors syntax and schema errors.
    toml::from_str::<RawConfig>(source).map_err(|e| ConfigError {
        origin: origin.to_string(),
        line: e.span().map(|s| line_of(source, s.start)),
        message: e.message().trim().to_string(),
    })?;
    let mut table: Table = toml::from_str(source).map_err(|e| ConfigError {
        origin: origin.to_string(),
        line: e.span().map(|s| line_of(source, s.start)),
        message: e.message().trim().to_string(),
    })?;
    let overrides = overrides
        .iter()
        .map(|o| parse_override(o))
        .collect::<Result<Vec<_>, _>>()?;
    for o in &overrides {
        set_path(&mut table, &o.key, o.value.clone()).map_err(|message| ConfigError {
            origin: "--set".into(),
            line: None,
            message,
        })?;
    }
    let ctx = Ctx {
        origin,
        src: source,
        overrides: &overrides,
        label: None,
    };
    let resolved = deserialize(&table, &ctx)?;

    let sweep = match &resolved.sweep {
        None => None,
        Some(s) => {
            if s.values.is_empty() {
                return Err(ctx.error("sweep.values", "needs at least one value"));
            }
            let target = s.parameter.as_str();
            if target.starts_with("sweep.") || !target.contains('.') {
                return Err(ctx.error("sweep.parameter", format!("`{target}` cannot be swept")));
            }
            match get_path(&table, target) {
                Some(Value::Float(_)) | Some(Value::Integer(_)) => {}
                _ => {
                    return Err(ctx.error(
                        "sweep.parameter",
                        format!("`{target}` does not name a numeric key of this scenario"),
                    ))
                }
            }
            Some(Sweep {
                parameter: s.parameter.clone(),
                values: s.values.clone(),
            })
        }
    };

    let variants = match &sweep {
        None => vec![Variant {
            label: None,
            scenario: resolve(&resolved, &ctx)?,
            resolved: resolved.clone(),
        }],
        Some(s) => {
            let mut out = Vec::with_capacity(s.values.len());
            for &v in &s.values {
                let label = format!("{}_{}", s.leaf(), fmt_f64(v));
                let mut t = table.clone();
                set_path(&mut t, &s.parameter, Value::Float(v)).expect("path checked above");
                let vctx = Ctx {
                    label: Some(&label),
                    ..ctx
                };
                let raw = deserialize(&t, &vctx)?;
                out.push(Variant {
                    scenario: resolve(&raw, &vctx)?,
                    resolved: raw,
                    label: Some(label),
                });
            }
            out
        }
    };

    Ok(LoadedConfig {
        origin: origin.to_string(),
        source: source.to_string(),
        overrides,
        resolved,
        sweep,
        variants,
    })
}

/// Flattens a resolved document into sorted `dotted.key = value` pairs.
pub fn flatten(raw: &RawConfig) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Table(t) => {
                for (k, v) in t {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, v, out);
                }
            }
            other => out.push((prefix.to_string(), render(other))),
        }
    }
    fn render(v: &Value) -> String {
        match v {
            Value::Float(x) => fmt_f64(*x),
            Value::String(s) => s.clone(),
            Value::Array(a) => format!("[{}]", a.iter().map(render).collect::<Vec<_>>().join(", ")),
            other => other.to_string(),
        }
    }
    let value = Value::try_from(raw).expect("config serializes");
    let mut out = Vec::new();
    walk("", &value, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
model = "sde"

[grid]
total_time = 1.0
steps = 100

[hurst]
kind = "constant"
base = 0.5

[kernel]
kind = "mmfbm"

[sde]
integrator = "mmfbm_sde"
drift = "affine"
mu = -0.1
diffusion = 0.2
chi0 = 1.0

[ensemble]
n_traj = 4
base_seed = 1
"#;

    #[test]
    fn minimal_config_resolves() {
        let cfg = load("t.toml", MINIMAL, &[]).unwrap();
        assert_eq!(cfg.variants.len(), 1);
        let s = &cfg.variants[0].scenario;
        assert_eq!(s.spec.grid.steps(), 100);
        assert_eq!(s.spec.drift, Drift::Affine { mu: -0.1 });
        assert_eq!(s.analysis.decay_window, (0.0, 1.0));
    }

    #[test]
    fn unknown_key_is_anchored() {
        let src = MINIMAL.replace("chi0 = 1.0", "chi0 = 1.0\nchi00 = 2.0");
        let err = load("t.toml", &src, &[]).unwrap_err();
        assert!(err.message.contains("chi00"), "{err}");
        assert_eq!(err.line, Some(src.lines().position(|l| l.starts_with("chi00")).unwrap() + 1));
    }

    #[test]
    fn semantic_error_is_anchored() {
        let src = MINIMAL.replace("base = 0.5", "base = 1.5");
        let err = load("t.toml", &src, &[]).unwrap_err();
        assert_eq!(err.line, Some(src.lines().position(|l| l.starts_with("base = 1.5")).unwrap() + 1));
    }

    #[test]
    fn overrides_apply_and_unknown_override_keys_fail() {
        let cfg = load("t.toml", MINIMAL, &["grid.steps=50".into(), "sde.mu=-0.3".into()]).unwrap();
        assert_eq!(cfg.variants[0].scenario.spec.grid.steps(), 50);
        assert_eq!(cfg.resolved.sde.mu, Some(-0.3));
        let err = load("t.toml", MINIMAL, &["sde.muu=1".into()]).unwrap_err();
        assert!(err.message.contains("muu"), "{err}");
    }

    #[test]
    fn sweep_expands_with_labels() {
        let src = format!("{MINIMAL}\n[sweep]\nparameter = \"sde.chi0\"\nvalues = [0.0, 0.5]\n");
        let cfg = load("t.toml", &src, &[]).unwrap();
        let labels: Vec<_> = cfg.variants.iter().map(|v| v.label.clone().unwrap()).collect();
        assert_eq!(labels, ["chi0_0.0", "chi0_0.5"]);
        assert_eq!(cfg.variants[1].scenario.spec.chi0, 0.5);
        let bad = src.replace("\"sde.chi0\"", "\"sde.chi\"");
        assert!(load("t.toml", &bad, &[]).is_err());
    }

    #[test]
    fn sigma_phi_converts_for_the_mmfbm_integrator() {
        let src = MINIMAL.replace("diffusion = 0.2", "sigma_phi = 3.0");
        let cfg = load("t.toml", &src, &[]).unwrap();
        let d = cfg.variants[0].scenario.spec.diffusion;
        assert!((d - 3.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn override_values_parse_as_toml() {
        assert_eq!(parse_override("a.b=3").unwrap().value, Value::Integer(3));
        assert_eq!(parse_override("a.b = 0.5").unwrap().value, Value::Float(0.5));
        assert_eq!(parse_override("a.b=plus").unwrap().value, Value::String("plus".into()));
        assert!(parse_override("novalue").is_err());
    }

    #[test]
    fn flatten_is_sorted_and_complete() {
        let cfg = load("t.toml", MINIMAL, &[]).unwrap();
        let flat = flatten(&cfg.resolved);
        assert!(flat.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(flat.contains(&("grid.steps".into(), "100".into())));
        assert!(flat.contains(&("sde.mu".into(), "-0.1".into())));
        assert!(flat.contains(&("analysis.psd_method".into(), "segment_averaged".into())));
    }
}
