//! Experiment configuration documents.
//!
//! A document names a `command`, an `output_dir` and optionally a `seed`,
//! plus at most one table holding the parameters of that command:
//!
//! ```toml
//! command = "decay"
//! output_dir = "out/decay"
//!
//! [decay]
//! signal = { kind = "hermite", index = [0] }
//! t_start = 1.0
//! t_end = 6.0
//! ```
//!
//! Parsing is strict: unknown keys, wrong types and tables for a different
//! command are errors. `emit` writes the canonical form, with every default
//! filled in.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown key{}: {message}", at(*.line, *.column))]
    UnknownKey {
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    #[error("type mismatch{}: {message}", at(*.line, *.column))]
    TypeMismatch {
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    #[error("missing required keys: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn at(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        _ => String::new(),
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Transform,
    Semigroup,
    Norm,
    Decay,
    Smoothing,
    Solve,
    Blowup,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Transform,
        Command::Semigroup,
        Command::Norm,
        Command::Decay,
        Command::Smoothing,
        Command::Solve,
        Command::Blowup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Semigroup => "semigroup",
            Command::Norm => "norm",
            Command::Decay => "decay",
            Command::Smoothing => "smoothing",
            Command::Solve => "solve",
            Command::Blowup => "blowup",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Initial data and test signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalSpec {
    /// `amplitude * Φ_index`
    Hermite {
        index: Vec<usize>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Coefficients in grlex order; missing trailing entries are zero.
    Coefficients {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
    /// A named entry of the 1-D test corpus, projected to the working degree.
    Corpus { name: String },
    /// Seeded generic expansion: `c_0 = 1`, other coefficients uniform in
    /// `[-0.2, 0.2] + i[-0.2, 0.2]`.
    Random {
        #[serde(default = "six")]
        degree: usize,
    },
}

fn one() -> f64 {
    1.0
}

fn six() -> usize {
    6
}

impl Default for SignalSpec {
    fn default() -> Self {
        SignalSpec::Hermite {
            index: vec![0],
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    XInner,
    XiInner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormEntry {
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "x_inner")]
    pub order: Order,
}

fn x_inner() -> Order {
    Order::XInner
}

impl NormEntry {
    pub fn new(p: f64, q: f64) -> Self {
        NormEntry {
            p,
            q,
            s: 0.0,
            order: Order::XInner,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exponents {
    pub p1: f64,
    pub q1: f64,
    pub p2: f64,
    pub q2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_extent: f64,
    pub xi_extent: f64,
    pub n_x: usize,
    pub n_xi: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformParams {
    pub d: usize,
    pub degree: usize,
    pub signal: SignalSpec,
    /// Gauss–Hermite points per axis; `degree + 1` when absent.
    pub rule_order: Option<usize>,
}

impl Default for TransformParams {
    fn default() -> Self {
        TransformParams {
            d: 1,
            degree: 16,
            signal: SignalSpec::default(),
            rule_order: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SemigroupParams {
    pub d: usize,
    pub degree: usize,
    pub beta: f64,
    pub times: Vec<f64>,
    pub signal: SignalSpec,
    /// Compare with the Mehler kernel (`beta = 1`, `d <= 2`).
    pub mehler: bool,
    pub mehler_rule_order: usize,
}

impl Default for SemigroupParams {
    fn default() -> Self {
        SemigroupParams {
            d: 1,
            degree: 16,
            beta: 1.0,
            times: vec![0.1, 1.0, 5.0],
            signal: SignalSpec::default(),
            mehler: false,
            mehler_rule_order: 160,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormParams {
    pub d: usize,
    pub degree: usize,
    pub signal: SignalSpec,
    /// `"gauss"` or `"hermiteN"`.
    pub window: String,
    pub norms: Vec<NormEntry>,
    /// Default grid for the degree and window when absent.
    pub grid: Option<GridSpec>,
    /// Also write the sampled STFT.
    pub export_stft: bool,
}

impl Default for NormParams {
    fn default() -> Self {
        NormParams {
            d: 1,
            degree: 16,
            signal: SignalSpec::default(),
            window: "gauss".into(),
            norms: vec![NormEntry::new(2.0, 2.0), NormEntry::new(1.0, 1.0), NormEntry::new(INF, 1.0)],
            grid: None,
            export_stft: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayParams {
    pub d: usize,
    pub degree: usize,
    pub beta: f64,
    pub exponents: Exponents,
    pub signal: SignalSpec,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub spacing: Spacing,
}

impl Default for DecayParams {
    fn default() -> Self {
        DecayParams {
            d: 1,
            degree: 16,
            beta: 1.0,
            exponents: Exponents {
                p1: 2.0,
                q1: 2.0,
                p2: 2.0,
                q2: 2.0,
            },
            signal: SignalSpec::default(),
            t_start: 1.0,
            t_end: 6.0,
            samples: 11,
            spacing: Spacing::Linear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoothingParams {
    pub degree: usize,
    pub betas: Vec<f64>,
    pub exponents: Vec<Exponents>,
    /// Signals to sweep; the `f_alpha` stress family when empty.
    pub signals: Vec<SignalSpec>,
    pub t_min: f64,
    pub samples: usize,
    /// Repeat every sweep on the refined phase-space grid.
    pub refine: bool,
    /// Smallest time of the damping-model fit.
    pub damping_t_min: f64,
    pub damping_samples: usize,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        SmoothingParams {
            degree: 24,
            betas: vec![1.0, 2.0],
            exponents: vec![
                Exponents {
                    p1: INF,
                    q1: INF,
                    p2: 2.0,
                    q2: 2.0,
                },
                Exponents {
                    p1: INF,
                    q1: 1.0,
                    p2: 1.0,
                    q2: 1.0,
                },
            ],
            signals: Vec::new(),
            t_min: 1e-3,
            samples: 13,
            refine: true,
            damping_t_min: 1e-2,
            damping_samples: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveParams {
    pub d: usize,
    pub degree: usize,
    pub beta: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub k: usize,
    pub dt: f64,
    pub horizon: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub eps: f64,
    pub blowup_threshold: f64,
    pub allow_out_of_theory: bool,
    pub norm: NormEntry,
    pub signal: SignalSpec,
    /// Write every `n`-th state; 0 disables snapshots.
    pub snapshot_stride: usize,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            d: 1,
            degree: 16,
            beta: 1.0,
            lambda_re: 1.0,
            lambda_im: 0.0,
            k: 1,
            dt: 0.05,
            horizon: 4.0,
            picard_tol: 1e-12,
            picard_max_iters: 50,
            eps: 0.1,
            blowup_threshold: 1e8,
            allow_out_of_theory: false,
            norm: NormEntry::new(2.0, 1.0),
            signal: SignalSpec::Hermite {
                index: vec![0],
                amplitude: 0.01,
            },
            snapshot_stride: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlowupParams {
    /// Constant initial value.
    pub a: f64,
    pub k: usize,
    pub lambda: f64,
    pub d: usize,
    pub degree: usize,
    pub beta: f64,
    pub dt: f64,
    pub horizon: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub eps: f64,
    pub blowup_threshold: f64,
}

impl Default for BlowupParams {
    fn default() -> Self {
        BlowupParams {
            a: 1.0,
            k: 1,
            lambda: 1.0,
            d: 1,
            degree: 16,
            beta: 1.0,
            dt: 0.05,
            horizon: 2.0,
            picard_tol: 1e-12,
            picard_max_iters: 50,
            eps: 0.1,
            blowup_threshold: 1e8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semigroup: Option<SemigroupParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<SmoothingParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupParams>,
}

const REQUIRED: [&str; 2] = ["command", "output_dir"];

impl ExperimentConfig {
    /// A config for `command` with default parameters.
    pub fn with_defaults(command: Command, output_dir: impl Into<PathBuf>) -> Self {
        let mut c = ExperimentConfig {
            command,
            output_dir: output_dir.into(),
            seed: 0,
            transform: None,
            semigroup: None,
            norm: None,
            decay: None,
            smoothing: None,
            solve: None,
            blowup: None,
        };
        c.fill_defaults();
        c
    }

    fn present_sections(&self) -> Vec<Command> {
        let flags = [
            self.transform.is_some(),
            self.semigroup.is_some(),
            self.norm.is_some(),
            self.decay.is_some(),
            self.smoothing.is_some(),
            self.solve.is_some(),
            self.blowup.is_some(),
        ];
        Command::ALL.iter().zip(flags).filter(|(_, f)| *f).map(|(c, _)| *c).collect()
    }

    fn fill_defaults(&mut self) {
        match self.command {
            Command::Transform => {
                self.transform.get_or_insert_with(Default::default);
            }
            Command::Semigroup => {
                self.semigroup.get_or_insert_with(Default::default);
            }
            Command::Norm => {
                self.norm.get_or_insert_with(Default::default);
            }
            Command::Decay => {
                self.decay.get_or_insert_with(Default::default);
            }
            Command::Smoothing => {
                self.smoothing.get_or_insert_with(Default::default);
            }
            Command::Solve => {
                self.solve.get_or_insert_with(Default::default);
            }
            Command::Blowup => {
                self.blowup.get_or_insert_with(Default::default);
            }
        }
    }
}

fn classify(text: &str, e: toml::de::Error) -> ConfigError {
    let message = e.message().trim().to_string();
    let (line, column) = match e.span() {
        Some(s) => {
            let (l, c) = line_col(text, s.start);
            (Some(l), Some(c))
        }
        None => (None, None),
    };
    if message.starts_with("unknown field") {
        ConfigError::UnknownKey { line, column, message }
    } else if message.starts_with("missing field") {
        let key = message.split('`').nth(1).unwrap_or("?").to_string();
        ConfigError::Missing(vec![key])
    } else if message.starts_with("invalid type") || message.starts_with("unknown variant") || message.starts_with("invalid value") {
        ConfigError::TypeMismatch { line, column, message }
    } else {
        ConfigError::Invalid(message)
    }
}

/// Strict parse; the command's table is filled with defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ConfigError::Syntax {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    let missing: Vec<String> = REQUIRED
        .iter()
        .filter(|k| !table.contains_key(**k))
        .map(|k| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::Missing(missing));
    }
    let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| classify(text, e))?;
    let foreign: Vec<String> = cfg
        .present_sections()
        .into_iter()
        .filter(|c| *c != cfg.command)
        .map(|c| format!("[{c}]"))
        .collect();
    if !foreign.is_empty() {
        return Err(ConfigError::Invalid(format!(
            "table {} does not apply to command {}",
            foreign.join(", "),
            cfg.command
        )));
    }
    cfg.fill_defaults();
    Ok(cfg)
}

/// Canonical TOML: fixed key order, every default spelled out.
pub fn emit(cfg: &ExperimentConfig) -> String {
    let mut c = cfg.clone();
    c.fill_defaults();
    toml::to_string(&c).expect("config is serializable")
}

/// Canonical form of a document.
pub fn canonicalize(text: &str) -> Result<String, ConfigError> {
    parse_config(text).map(|c| emit(&c))
}
