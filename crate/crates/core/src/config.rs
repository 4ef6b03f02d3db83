//! Run configuration: TOML parsing and validation.
//!
//! ```toml
//! experiment = "transfer-sweep"   # optional, must match the CLI argument
//! seed = 0
//!
//! [parameters]
//! n = 101
//! eta = { start = 0.1, stop = 1.0, step = 0.01 }
//! jt = { start = 0.0, stop = 60.0, step = 0.05 }
//! ```
//!
//! The keys accepted under `[parameters]` depend on the experiment; see
//! `docs/config.md` for the full schema.

use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dense::DENSE_DYNAMICS_CAP;
use crate::open::OPEN_DYNAMICS_CAP;

/// Largest grid accepted along any axis.
pub const MAX_GRID_POINTS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Table1,
    UqcmCircuit,
    UqcmPrepOpt,
    UqcmChain,
    UniversalityScan,
    TransferSingle,
    TransferSweep,
    TransferDisorder,
    PerfectTransfer,
    SeriesCheck,
    OpenFlux,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Table1,
        Experiment::UqcmCircuit,
        Experiment::UqcmPrepOpt,
        Experiment::UqcmChain,
        Experiment::UniversalityScan,
        Experiment::TransferSingle,
        Experiment::TransferSweep,
        Experiment::TransferDisorder,
        Experiment::PerfectTransfer,
        Experiment::SeriesCheck,
        Experiment::OpenFlux,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Table1 => "table1",
            Experiment::UqcmCircuit => "uqcm-circuit",
            Experiment::UqcmPrepOpt => "uqcm-prep-opt",
            Experiment::UqcmChain => "uqcm-chain",
            Experiment::UniversalityScan => "universality-scan",
            Experiment::TransferSingle => "transfer-single",
            Experiment::TransferSweep => "transfer-sweep",
            Experiment::TransferDisorder => "transfer-disorder",
            Experiment::PerfectTransfer => "perfect-transfer",
            Experiment::SeriesCheck => "series-check",
            Experiment::OpenFlux => "open-flux",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                format!(
                    "unknown experiment `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// A problem with the configuration, tied to the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Evenly spaced range (inclusive of `stop` up to rounding) or explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Range { start: f64, stop: f64, step: f64 },
    List(Vec<f64>),
}

impl Grid {
    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        Grid::Range { start, stop, step }
    }

    fn check(&self, field: &str, out: &mut Vec<Diagnostic>) {
        match *self {
            Grid::Range { start, stop, step } => {
                if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
                    out.push(Diagnostic::new(
                        field,
                        "start, stop and step must be finite",
                    ));
                } else if step <= 0.0 {
                    out.push(Diagnostic::new(
                        field,
                        format!("step must be positive, got {step}"),
                    ));
                } else if stop < start {
                    out.push(Diagnostic::new(
                        field,
                        format!("stop {stop} is below start {start}"),
                    ));
                } else if (stop - start) / step + 1.0 > MAX_GRID_POINTS as f64 {
                    out.push(Diagnostic::new(
                        field,
                        format!("grid exceeds {MAX_GRID_POINTS} points"),
                    ));
                }
            }
            Grid::List(ref v) => {
                if v.is_empty() {
                    out.push(Diagnostic::new(field, "grid must not be empty"));
                } else if v.iter().any(|x| !x.is_finite()) {
                    out.push(Diagnostic::new(field, "grid values must be finite"));
                } else if v.len() > MAX_GRID_POINTS {
                    out.push(Diagnostic::new(
                        field,
                        format!("grid exceeds {MAX_GRID_POINTS} points"),
                    ));
                }
            }
        }
    }

    fn check_nonnegative(&self, field: &str, out: &mut Vec<Diagnostic>) {
        let min = match self {
            Grid::Range { start, .. } => *start,
            Grid::List(v) => v.iter().cloned().fold(f64::INFINITY, f64::min),
        };
        if min < 0.0 {
            out.push(Diagnostic::new(field, "times must be nonnegative"));
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Range { start, stop, step } => {
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|k| start + k as f64 * step).collect()
            }
            Grid::List(ref v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Eta,
    Perfect,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrepTarget {
    Symmetric,
    Biased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianKind {
    None,
    Xy,
    Heisenberg,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn three() -> usize {
    3
}
fn twenty() -> usize {
    20
}
fn eta_profile() -> ProfileKind {
    ProfileKind::Eta
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Params {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UqcmCircuitParams {
    /// Random pure inputs whose clone fidelities are reported.
    #[serde(default = "twenty")]
    pub inputs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepOptParams {
    pub target: PrepTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainParams {
    #[serde(default = "three")]
    pub n: usize,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default = "two")]
    pub lambda: f64,
    pub jt: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniversalityParams {
    pub lambdas: Vec<f64>,
    #[serde(default = "one")]
    pub j: f64,
    pub jt: Grid,
}

/// Coupling profile of a chain: `eta` uses `j` and `eta`, `perfect` uses
/// `lambda`, `custom` uses `couplings`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    pub n: usize,
    #[serde(default = "eta_profile")]
    pub profile: ProfileKind,
    #[serde(default = "one")]
    pub eta: f64,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub couplings: Vec<f64>,
    pub jt: Grid,
    /// Series truncation order (series-check only; automatic when absent).
    #[serde(default)]
    pub order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    pub n: usize,
    pub eta: Grid,
    pub jt: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderParams {
    pub n: usize,
    pub eta: f64,
    pub sigma: f64,
    pub trials: usize,
    pub jt: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerfectParams {
    pub n: Vec<usize>,
    #[serde(default = "one")]
    pub lambda: f64,
    pub jt: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenParams {
    pub n: usize,
    pub gamma: f64,
    #[serde(default)]
    pub gamma_deph: f64,
    #[serde(default)]
    pub nbar: f64,
    pub hamiltonian: HamiltonianKind,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub input: usize,
    pub target: usize,
    /// Dimensionless times: `Γt` when Γ > 0, otherwise `Jt` (or plain `t`
    /// without a Hamiltonian).
    pub t: Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Parameters {
    Table1(Table1Params),
    UqcmCircuit(UqcmCircuitParams),
    UqcmPrepOpt(PrepOptParams),
    UqcmChain(ChainParams),
    UniversalityScan(UniversalityParams),
    TransferSingle(ProfileParams),
    TransferSweep(SweepParams),
    TransferDisorder(DisorderParams),
    PerfectTransfer(PerfectParams),
    SeriesCheck(ProfileParams),
    OpenFlux(OpenParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub parameters: Parameters,
    /// `[parameters]` as written, echoed into result metadata.
    pub raw_parameters: toml::Table,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: Option<String>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    parameters: toml::Table,
}

fn typed<T: DeserializeOwned>(table: &toml::Table) -> Result<T, Vec<Diagnostic>> {
    toml::Value::Table(table.clone())
        .try_into()
        .map_err(|e: toml::de::Error| vec![Diagnostic::new("parameters", e.message().to_string())])
}

impl RunConfig {
    /// Parses a config file. `experiment` (from the command line) overrides
    /// or must agree with the file's own `experiment` key.
    pub fn parse(text: &str, experiment: Option<Experiment>) -> Result<Self, Vec<Diagnostic>> {
        let file: FileConfig = toml::from_str(text)
            .map_err(|e| vec![Diagnostic::new("config", e.message().to_string())])?;
        let from_file = match file.experiment.as_deref().map(Experiment::from_str) {
            Some(Err(msg)) => return Err(vec![Diagnostic::new("experiment", msg)]),
            Some(Ok(e)) => Some(e),
            None => None,
        };
        let experiment = match (experiment, from_file) {
            (Some(a), Some(b)) if a != b => {
                return Err(vec![Diagnostic::new(
                    "experiment",
                    format!("config is for `{b}` but `{a}` was requested"),
                )])
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => {
                return Err(vec![Diagnostic::new("experiment", "no experiment given")]);
            }
        };
        Self::from_parts(experiment, file.seed, file.parameters)
    }

    pub fn from_parts(
        experiment: Experiment,
        seed: u64,
        raw_parameters: toml::Table,
    ) -> Result<Self, Vec<Diagnostic>> {
        let p = &raw_parameters;
        let parameters = match experiment {
            Experiment::Table1 => Parameters::Table1(typed(p)?),
            Experiment::UqcmCircuit => Parameters::UqcmCircuit(typed(p)?),
            Experiment::UqcmPrepOpt => Parameters::UqcmPrepOpt(typed(p)?),
            Experiment::UqcmChain => Parameters::UqcmChain(typed(p)?),
            Experiment::UniversalityScan => Parameters::UniversalityScan(typed(p)?),
            Experiment::TransferSingle => Parameters::TransferSingle(typed(p)?),
            Experiment::TransferSweep => Parameters::TransferSweep(typed(p)?),
            Experiment::TransferDisorder => Parameters::TransferDisorder(typed(p)?),
            Experiment::PerfectTransfer => Parameters::PerfectTransfer(typed(p)?),
            Experiment::SeriesCheck => Parameters::SeriesCheck(typed(p)?),
            Experiment::OpenFlux => Parameters::OpenFlux(typed(p)?),
        };
        Ok(Self {
            experiment,
            seed,
            parameters,
            raw_parameters,
        })
    }

    /// Every violated precondition, each naming its field. Empty when valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate(self)
    }

    /// The config as a TOML document (what [`RunConfig::parse`] reads).
    pub fn to_toml(&self) -> String {
        let mut t = toml::Table::new();
        t.insert("experiment".into(), self.experiment.name().into());
        t.insert("seed".into(), toml::Value::Integer(self.seed as i64));
        t.insert("parameters".into(), self.raw_parameters.clone().into());
        toml::to_string(&t).expect("tables serialize")
    }
}

fn positive(field: &str, v: f64, out: &mut Vec<Diagnostic>) {
    if !(v > 0.0 && v.is_finite()) {
        out.push(Diagnostic::new(field, format!("must be positive, got {v}")));
    }
}

fn nonnegative(field: &str, v: f64, out: &mut Vec<Diagnostic>) {
    if !(v >= 0.0 && v.is_finite()) {
        out.push(Diagnostic::new(
            field,
            format!("must be nonnegative, got {v}"),
        ));
    }
}

fn finite(field: &str, v: f64, out: &mut Vec<Diagnostic>) {
    if !v.is_finite() {
        out.push(Diagnostic::new(field, format!("must be finite, got {v}")));
    }
}

fn chain_length(field: &str, n: usize, out: &mut Vec<Diagnostic>) {
    if n < 2 {
        out.push(Diagnostic::new(
            field,
            format!("a chain needs at least 2 qubits, got {n}"),
        ));
    }
}

fn profile(p: &ProfileParams, out: &mut Vec<Diagnostic>) {
    chain_length("parameters.n", p.n, out);
    match p.profile {
        ProfileKind::Eta => {
            finite("parameters.eta", p.eta, out);
            finite("parameters.j", p.j, out);
        }
        ProfileKind::Perfect => finite("parameters.lambda", p.lambda, out),
        ProfileKind::Custom => {
            if p.couplings.len() + 1 != p.n {
                out.push(Diagnostic::new(
                    "parameters.couplings",
                    format!(
                        "expected n − 1 = {} couplings, got {}",
                        p.n.saturating_sub(1),
                        p.couplings.len()
                    ),
                ));
            }
            if p.couplings.iter().any(|c| !c.is_finite()) {
                out.push(Diagnostic::new(
                    "parameters.couplings",
                    "couplings must be finite",
                ));
            }
        }
    }
    p.jt.check("parameters.jt", out);
}

pub fn validate(config: &RunConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let d = &mut out;
    match &config.parameters {
        Parameters::Table1(_) => {}
        Parameters::UqcmCircuit(p) => {
            if p.inputs == 0 {
                d.push(Diagnostic::new("parameters.inputs", "must be at least 1"));
            }
        }
        Parameters::UqcmPrepOpt(_) => {}
        Parameters::UqcmChain(p) => {
            if p.n < 3 {
                d.push(Diagnostic::new(
                    "parameters.n",
                    format!("the cloner needs at least 3 qubits, got {}", p.n),
                ));
            } else if p.n > DENSE_DYNAMICS_CAP {
                d.push(Diagnostic::new(
                    "parameters.n",
                    format!(
                        "{} exceeds the dense dynamics cap of {DENSE_DYNAMICS_CAP} qubits",
                        p.n
                    ),
                ));
            }
            positive("parameters.j", p.j, d);
            finite("parameters.lambda", p.lambda, d);
            p.jt.check("parameters.jt", d);
            p.jt.check_nonnegative("parameters.jt", d);
        }
        Parameters::UniversalityScan(p) => {
            if p.lambdas.is_empty() {
                d.push(Diagnostic::new("parameters.lambdas", "must not be empty"));
            }
            for l in &p.lambdas {
                finite("parameters.lambdas", *l, d);
            }
            positive("parameters.j", p.j, d);
            p.jt.check("parameters.jt", d);
        }
        Parameters::TransferSingle(p) => profile(p, d),
        Parameters::SeriesCheck(p) => {
            profile(p, d);
            if p.n > 64 {
                d.push(Diagnostic::new(
                    "parameters.n",
                    "series check supports at most 64 qubits",
                ));
            }
        }
        Parameters::TransferSweep(p) => {
            chain_length("parameters.n", p.n, d);
            p.eta.check("parameters.eta", d);
            p.jt.check("parameters.jt", d);
        }
        Parameters::TransferDisorder(p) => {
            chain_length("parameters.n", p.n, d);
            finite("parameters.eta", p.eta, d);
            nonnegative("parameters.sigma", p.sigma, d);
            if p.trials == 0 {
                d.push(Diagnostic::new("parameters.trials", "must be at least 1"));
            }
            p.jt.check("parameters.jt", d);
        }
        Parameters::PerfectTransfer(p) => {
            if p.n.is_empty() {
                d.push(Diagnostic::new(
                    "parameters.n",
                    "must list at least one chain length",
                ));
            }
            for &n in &p.n {
                chain_length("parameters.n", n, d);
            }
            positive("parameters.lambda", p.lambda, d);
            p.jt.check("parameters.jt", d);
        }
        Parameters::OpenFlux(p) => {
            if p.n == 0 || p.n > OPEN_DYNAMICS_CAP {
                d.push(Diagnostic::new(
                    "parameters.n",
                    format!("must be between 1 and the open dynamics cap of {OPEN_DYNAMICS_CAP} qubits, got {}", p.n),
                ));
            }
            nonnegative("parameters.gamma", p.gamma, d);
            nonnegative("parameters.gamma_deph", p.gamma_deph, d);
            nonnegative("parameters.nbar", p.nbar, d);
            finite("parameters.j", p.j, d);
            finite("parameters.lambda", p.lambda, d);
            if p.hamiltonian != HamiltonianKind::None && p.n < 2 {
                d.push(Diagnostic::new(
                    "parameters.hamiltonian",
                    "a chain Hamiltonian needs n ≥ 2",
                ));
            }
            if p.input >= p.n {
                d.push(Diagnostic::new(
                    "parameters.input",
                    format!("qubit {} is outside 0..{}", p.input, p.n),
                ));
            }
            if p.target >= p.n {
                d.push(Diagnostic::new(
                    "parameters.target",
                    format!("qubit {} is outside 0..{}", p.target, p.n),
                ));
            }
            p.t.check("parameters.t", d);
            p.t.check_nonnegative("parameters.t", d);
        }
    }
    out
}
