//! Line-oriented `key = value` experiment configs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anderson_mp::{
    DisorderSpec, Distribution, Error as ModelError, FitWindow, InteractionKernel, ModelConfig, Norm,
};
use thiserror::Error;

pub const KNOWN_KEYS: &[&str] = &[
    "model.d",
    "model.n",
    "model.h",
    "model.L_list",
    "model.m_list",
    "model.interaction",
    "model.u0",
    "model.r0",
    "model.yukawa_length",
    "model.table",
    "model.norm",
    "model.dimension_cap",
    "disorder.distribution",
    "disorder.v_max",
    "disorder.p",
    "disorder.rate",
    "disorder.cap",
    "disorder.seed",
    "disorder.R",
    "task.e_min",
    "task.e_max",
    "task.e_points",
    "task.e_spacing",
    "task.fit_window",
    "task.fit_lo",
    "task.fit_hi",
    "task.e0",
    "task.e_probe",
    "task.probe_lo",
    "task.probe_hi",
    "task.tol",
    "task.weyl_k",
    "task.weyl_m_list",
    "task.realization",
    "output.dir",
    "output.prefix",
];

const MANDATORY: &[&str] = &[
    "model.d",
    "model.n",
    "model.h",
    "disorder.distribution",
    "disorder.seed",
    "disorder.R",
];

/// Where a value came from: a file line or a command-line override.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override => f.write_str("--set"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Read { path: PathBuf, reason: String },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: Origin, key: String },
    #[error("key `{key}` is set twice, on lines {first} and {second}")]
    Duplicate { key: String, first: usize, second: usize },
    #[error("missing mandatory key `{key}`")]
    Missing { key: String },
    #[error("{origin}, key `{key}`: {reason}")]
    Invalid { origin: Origin, key: String, reason: String },
}

#[derive(Debug, Clone)]
struct Entry {
    origin: Origin,
    value: String,
}

/// Parsed but not yet validated key/value pairs.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    text: content.to_string(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    text: content.to_string(),
                });
            }
            check_known(key, Origin::Line(line_no))?;
            if let Some(prev) = raw.entries.get(key) {
                let Origin::Line(first) = prev.origin else { unreachable!() };
                return Err(ConfigError::Duplicate {
                    key: key.to_string(),
                    first,
                    second: line_no,
                });
            }
            raw.entries.insert(
                key.to_string(),
                Entry {
                    origin: Origin::Line(line_no),
                    value: value.to_string(),
                },
            );
        }
        Ok(raw)
    }

    /// Applies a `--set key=value` override, replacing any file value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim();
        check_known(key, Origin::Override)?;
        self.entries.insert(
            key.to_string(),
            Entry {
                origin: Origin::Override,
                value: value.trim().to_string(),
            },
        );
        Ok(())
    }

    /// Parses `key=value` as given on the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), ConfigError> {
        match pair.split_once('=') {
            Some((k, v)) => self.set(k, v),
            None => Err(ConfigError::Invalid {
                origin: Origin::Override,
                key: pair.to_string(),
                reason: "expected key=value".into(),
            }),
        }
    }

    pub fn validate(&self) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_raw(self)
    }

    fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn invalid(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            origin: self.entry(key).map_or(Origin::Override, |e| e.origin),
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    fn scalar<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        self.entry(key)
            .map(|e| {
                e.value
                    .parse::<T>()
                    .map_err(|_| self.invalid(key, format!("expected {what}, got `{}`", e.value)))
            })
            .transpose()
    }

    fn required<T: FromStr>(&self, key: &str, what: &str) -> Result<T, ConfigError> {
        self.scalar(key, what)?.ok_or_else(|| ConfigError::Missing { key: key.to_string() })
    }

    fn list<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<Vec<T>>, ConfigError> {
        let Some(e) = self.entry(key) else { return Ok(None) };
        let items: Result<Vec<T>, _> = e
            .value
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<T>()
                    .map_err(|_| self.invalid(key, format!("expected a list of {what}, got `{}`", s.trim())))
            })
            .collect();
        let items = items?;
        if items.is_empty() {
            return Err(self.invalid(key, "list is empty"));
        }
        Ok(Some(items))
    }

    fn word(&self, key: &str) -> Option<String> {
        self.entry(key).map(|e| e.value.to_ascii_lowercase())
    }
}

fn check_known(key: &str, origin: Origin) -> Result<(), ConfigError> {
    if KNOWN_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey {
            origin,
            key: key.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl EnergyGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// How `compare` picks its probe energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    Fixed(f64),
    /// Lowest grid energy where the free normalized IDS of the largest box lies in `[lo, hi]`.
    Auto { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskConfig {
    pub energies: EnergyGrid,
    pub fit_window: FitWindow,
    pub e0: f64,
    pub probe: Probe,
    pub tol: f64,
    pub weyl_k: usize,
    pub weyl_m_list: Vec<usize>,
    pub realization: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub prefix: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    /// Physical side lengths `L`.
    pub sides: Vec<f64>,
    pub disorder: DisorderSpec,
    pub task: TaskConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        for key in MANDATORY {
            if raw.entry(key).is_none() {
                return Err(ConfigError::Missing { key: key.to_string() });
            }
        }
        let model = model_block(raw)?;
        let sides = side_list(raw, &model)?;
        let disorder = disorder_block(raw)?;
        let task = task_block(raw, &disorder)?;
        let output = OutputConfig {
            dir: raw.entry("output.dir").map_or_else(|| PathBuf::from("."), |e| PathBuf::from(&e.value)),
            prefix: raw.entry("output.prefix").map(|e| e.value.clone()).unwrap_or_default(),
        };
        Ok(Self {
            model,
            sides,
            disorder,
            task,
            output,
        })
    }
}

fn model_block(raw: &RawConfig) -> Result<ModelConfig, ConfigError> {
    let d: usize = raw.required("model.d", "an integer")?;
    let n: usize = raw.required("model.n", "an integer")?;
    let h: f64 = raw.required("model.h", "a number")?;
    if d == 0 {
        return Err(raw.invalid("model.d", "must be at least 1"));
    }
    if n == 0 {
        return Err(raw.invalid("model.n", "must be at least 1"));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(raw.invalid("model.h", "must be finite and positive"));
    }
    let u0 = raw.scalar("model.u0", "a number")?.unwrap_or(0.0);
    let r0 = raw.scalar("model.r0", "a number")?.unwrap_or(0.0);
    let kind = raw.word("model.interaction").unwrap_or_else(|| "hard_sphere".into());
    let kernel = match kind.as_str() {
        "none" => InteractionKernel::none(),
        "hard_sphere" => InteractionKernel::hard_sphere(u0, r0),
        "yukawa" => {
            let length = raw.scalar("model.yukawa_length", "a number")?.unwrap_or(1.0);
            InteractionKernel::yukawa(u0, r0, length)
        }
        "table" => {
            let steps: Vec<String> = raw
                .list("model.table", "radius:value pairs")?
                .ok_or_else(|| ConfigError::Missing { key: "model.table".into() })?;
            let parsed: Option<Vec<(f64, f64)>> = steps
                .iter()
                .map(|s| {
                    let (r, v) = s.split_once(':')?;
                    Some((r.trim().parse().ok()?, v.trim().parse().ok()?))
                })
                .collect();
            let parsed = parsed.ok_or_else(|| raw.invalid("model.table", "expected radius:value pairs"))?;
            InteractionKernel::table(u0, r0, parsed)
        }
        other => {
            return Err(raw.invalid(
                "model.interaction",
                format!("unknown interaction `{other}` (none, hard_sphere, yukawa, table)"),
            ))
        }
    };
    let norm = match raw.word("model.norm").as_deref() {
        None | Some("max") => Norm::Max,
        Some("euclidean") => Norm::Euclidean,
        Some(other) => return Err(raw.invalid("model.norm", format!("unknown norm `{other}` (max, euclidean)"))),
    };
    let kernel = kernel.with_norm(norm);
    kernel.validate().map_err(|e| module_error(raw, "model", e))?;
    let mut model = ModelConfig::new(d, n, h).with_kernel(kernel);
    if let Some(cap) = raw.scalar::<usize>("model.dimension_cap", "an integer")? {
        if cap == 0 {
            return Err(raw.invalid("model.dimension_cap", "must be at least 1"));
        }
        model = model.with_dimension_cap(cap);
    }
    Ok(model)
}

fn side_list(raw: &RawConfig, model: &ModelConfig) -> Result<Vec<f64>, ConfigError> {
    let l_list: Option<Vec<f64>> = raw.list("model.L_list", "numbers")?;
    let m_list: Option<Vec<usize>> = raw.list("model.m_list", "integers")?;
    let (key, sides) = match (l_list, m_list) {
        (Some(_), Some(_)) => {
            return Err(raw.invalid("model.m_list", "set only one of model.L_list and model.m_list"))
        }
        (None, None) => {
            return Err(ConfigError::Missing {
                key: "model.L_list or model.m_list".into(),
            })
        }
        (Some(l), None) => ("model.L_list", l),
        (None, Some(m)) => ("model.m_list", m.iter().map(|&m| m as f64 * model.h).collect()),
    };
    let exponent = (model.n * model.d) as u32;
    for &side in &sides {
        let m = model
            .sites_for_side(side)
            .map_err(|_| raw.invalid(key, format!("side {side} is not a positive multiple of h = {}", model.h)))?;
        let fits = (m as u128)
            .checked_pow(exponent)
            .is_some_and(|dim| dim <= model.dimension_cap as u128);
        if !fits {
            return Err(raw.invalid(
                key,
                format!("{m}^{exponent} configurations exceed the dimension cap {}", model.dimension_cap),
            ));
        }
    }
    Ok(sides)
}

fn disorder_block(raw: &RawConfig) -> Result<DisorderSpec, ConfigError> {
    let v_max = raw.scalar("disorder.v_max", "a number")?.unwrap_or(1.0);
    let distribution = match raw.word("disorder.distribution").as_deref() {
        Some("uniform") => Distribution::Uniform { v_max },
        Some("bernoulli") => Distribution::Bernoulli {
            p: raw.scalar("disorder.p", "a number")?.unwrap_or(0.5),
            v_max,
        },
        Some("exponential") => Distribution::Exponential {
            rate: raw.scalar("disorder.rate", "a number")?.unwrap_or(1.0),
            cap: raw.scalar("disorder.cap", "a number")?.unwrap_or(f64::MAX),
        },
        other => {
            return Err(raw.invalid(
                "disorder.distribution",
                format!(
                    "unknown distribution `{}` (uniform, bernoulli, exponential)",
                    other.unwrap_or_default()
                ),
            ))
        }
    };
    let seed: u64 = raw.required("disorder.seed", "a non-negative integer")?;
    let realizations: usize = raw.required("disorder.R", "an integer")?;
    if realizations == 0 {
        return Err(raw.invalid("disorder.R", "must be at least 1"));
    }
    let spec = DisorderSpec::new(distribution, seed, realizations);
    spec.validate().map_err(|e| module_error(raw, "disorder", e))?;
    Ok(spec)
}

fn task_block(raw: &RawConfig, disorder: &DisorderSpec) -> Result<TaskConfig, ConfigError> {
    let finite = |key: &str, v: f64| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(raw.invalid(key, "must be finite"))
        }
    };
    let spacing = match raw.word("task.e_spacing").as_deref() {
        None | Some("linear") => Spacing::Linear,
        Some("log") => Spacing::Log,
        Some(other) => return Err(raw.invalid("task.e_spacing", format!("unknown spacing `{other}` (linear, log)"))),
    };
    let energies = EnergyGrid {
        min: finite("task.e_min", raw.scalar("task.e_min", "a number")?.unwrap_or(0.0))?,
        max: finite("task.e_max", raw.scalar("task.e_max", "a number")?.unwrap_or(1.0))?,
        points: raw.scalar("task.e_points", "an integer")?.unwrap_or(101),
        spacing,
    };
    if energies.points == 0 {
        return Err(raw.invalid("task.e_points", "must be at least 1"));
    }
    if energies.points > 1 && energies.max <= energies.min {
        return Err(raw.invalid("task.e_max", "must exceed task.e_min"));
    }
    if spacing == Spacing::Log && energies.min <= 0.0 {
        return Err(raw.invalid("task.e_min", "log spacing needs a positive minimum"));
    }

    let fit_lo: Option<f64> = raw.scalar("task.fit_lo", "a number")?;
    let fit_hi: Option<f64> = raw.scalar("task.fit_hi", "a number")?;
    let fit_window = match raw.word("task.fit_window").as_deref() {
        None | Some("ids") => FitWindow::Normalized {
            lo: fit_lo.unwrap_or(1e-6),
            hi: fit_hi.unwrap_or(1e-1),
        },
        Some("energy") => FitWindow::Energy {
            lo: fit_lo.ok_or_else(|| ConfigError::Missing { key: "task.fit_lo".into() })?,
            hi: fit_hi.ok_or_else(|| ConfigError::Missing { key: "task.fit_hi".into() })?,
        },
        Some(other) => return Err(raw.invalid("task.fit_window", format!("unknown window `{other}` (ids, energy)"))),
    };
    let (lo, hi) = match fit_window {
        FitWindow::Normalized { lo, hi } | FitWindow::Energy { lo, hi } => (lo, hi),
    };
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(raw.invalid("task.fit_hi", "fit window needs fit_lo < fit_hi"));
    }
    if matches!(fit_window, FitWindow::Normalized { .. }) && !(lo > 0.0 && hi <= 1.0) {
        return Err(raw.invalid("task.fit_lo", "IDS window must lie in (0, 1]"));
    }

    let probe = match raw.word("task.e_probe").as_deref() {
        None | Some("auto") => {
            let lo = raw.scalar("task.probe_lo", "a number")?.unwrap_or(1e-3);
            let hi = raw.scalar("task.probe_hi", "a number")?.unwrap_or(1e-2);
            if !(lo > 0.0 && lo < hi && hi <= 1.0) {
                return Err(raw.invalid("task.probe_hi", "probe window needs 0 < probe_lo < probe_hi <= 1"));
            }
            Probe::Auto { lo, hi }
        }
        Some(_) => Probe::Fixed(finite("task.e_probe", raw.required("task.e_probe", "a number or `auto`")?)?),
    };

    let tol: f64 = raw.scalar("task.tol", "a number")?.unwrap_or(1e-10);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(raw.invalid("task.tol", "must be finite and positive"));
    }
    let weyl_k: usize = raw.scalar("task.weyl_k", "an integer")?.unwrap_or(1);
    if weyl_k == 0 {
        return Err(raw.invalid("task.weyl_k", "must be at least 1"));
    }
    let weyl_m_list: Vec<usize> = raw.list("task.weyl_m_list", "integers")?.unwrap_or_else(|| vec![4, 8, 16]);
    if weyl_m_list.contains(&0) {
        return Err(raw.invalid("task.weyl_m_list", "entries must be at least 1"));
    }
    let realization: usize = raw.scalar("task.realization", "an integer")?.unwrap_or(0);
    if realization >= disorder.realizations {
        return Err(raw.invalid(
            "task.realization",
            format!("must be below disorder.R = {}", disorder.realizations),
        ));
    }
    Ok(TaskConfig {
        energies,
        fit_window,
        e0: finite("task.e0", raw.scalar("task.e0", "a number")?.unwrap_or(0.0))?,
        probe,
        tol,
        weyl_k,
        weyl_m_list,
        realization,
    })
}

/// Re-keys a validation error from the core crate onto the config key it came from.
fn module_error(raw: &RawConfig, block: &str, e: ModelError) -> ConfigError {
    match e {
        ModelError::InvalidParameter { name, reason } => {
            let key = match name {
                "screening_length" => "model.yukawa_length".to_string(),
                other => format!("{block}.{other}"),
            };
            raw.invalid(&key, reason)
        }
        other => raw.invalid(block, other.to_string()),
    }
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    RawConfig::parse(text)?.validate()
}

pub fn read_config(path: &Path) -> Result<RawConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    RawConfig::parse(&text)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    read_config(path)?.validate()
}
