//! Command-line front end.
//!
//! [`run`] parses arguments, merges an optional key=value config file under
//! the flags, executes one subcommand and writes a JSON or CSV report to
//! `out`. Diagnostics go to `err`. The return value is the process exit code:
//! 0 when every row passes, 1 on a tolerance or numerical failure and 2 on
//! bad arguments.

pub mod args;
mod commands;
pub mod suites;

pub use args::{Cli, Command, CommonArgs, RadialType, SpectrumMethod};
pub use commands::{cmd_laplace, cmd_poles, cmd_radial, cmd_smatrix, cmd_spectrum, cmd_verify};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// `m = hbar = 1`, so the coupling is the fine-structure-like constant itself.
    #[default]
    Natural,
    /// Physical `m` and `hbar`; energies are reported in the same units.
    Explicit,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Fully merged run configuration; `None` means the command's own default.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub lambda: Option<f64>,
    pub q: Option<f64>,
    pub units: Units,
    pub mass: f64,
    pub hbar: f64,
    pub n_max: Option<usize>,
    pub j: Option<usize>,
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub format: Format,
    pub threads: usize,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lambda: None,
            q: None,
            units: Units::Natural,
            mass: 1.0,
            hbar: 1.0,
            n_max: None,
            j: None,
            tolerance: None,
            seed: 7,
            format: Format::Json,
            threads: 1,
            timing: false,
        }
    }
}

const CONFIG_KEYS: [&str; 13] = [
    "lambda", "q", "alpha", "nmax", "j", "tolerance", "seed", "format", "threads", "units", "mass", "hbar", "timing",
];

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key=value, got {raw:?}", lineno + 1)))?;
        let key = key.trim().to_ascii_lowercase();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(usage(format!("config line {}: unknown key {key:?}", lineno + 1)));
        }
        let key = if key == "alpha" { "q".to_string() } else { key };
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn from_file<T: FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|_| usage(format!("config key {key}: cannot parse {v:?}"))))
        .transpose()
}

fn enum_from_file<T: ValueEnum>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    file.get(key)
        .map(|v| T::from_str(v, true).map_err(|_| usage(format!("config key {key}: unknown value {v:?}"))))
        .transpose()
}

impl RunConfig {
    /// Flags win over the config file, which wins over the defaults.
    pub fn resolve(flags: &CommonArgs, file: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let d = RunConfig::default();
        let cfg = RunConfig {
            lambda: flags.lambda.or(from_file(file, "lambda")?),
            q: flags.q.or(from_file(file, "q")?),
            units: flags.units.or(enum_from_file(file, "units")?).unwrap_or(d.units),
            mass: flags.mass.or(from_file(file, "mass")?).unwrap_or(d.mass),
            hbar: flags.hbar.or(from_file(file, "hbar")?).unwrap_or(d.hbar),
            n_max: flags.n_max.or(from_file(file, "nmax")?),
            j: flags.j.or(from_file(file, "j")?),
            tolerance: flags.tolerance.or(from_file(file, "tolerance")?),
            seed: flags.seed.or(from_file(file, "seed")?).unwrap_or(d.seed),
            format: flags.format.or(enum_from_file(file, "format")?).unwrap_or(d.format),
            threads: flags
                .threads
                .or(from_file(file, "threads")?)
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
            timing: flags.timing || from_file::<bool>(file, "timing")?.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(l) = self.lambda {
            if !(l.is_finite() && l > 0.0) {
                return Err(usage(format!("lambda must be positive, got {l}")));
            }
        }
        if let Some(q) = self.q {
            if !q.is_finite() {
                return Err(usage("coupling must be finite"));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(usage(format!("tolerance must be positive, got {t}")));
            }
        }
        if self.threads == 0 {
            return Err(usage("threads must be at least 1"));
        }
        match self.units {
            Units::Natural if self.mass != 1.0 || self.hbar != 1.0 => {
                Err(usage("--mass/--hbar need --units explicit"))
            }
            _ if !(self.mass > 0.0 && self.hbar > 0.0 && self.mass.is_finite() && self.hbar.is_finite()) => {
                Err(usage("mass and hbar must be positive"))
            }
            _ => Ok(()),
        }
    }

    pub fn lambda_or(&self, default: f64) -> f64 {
        self.lambda.unwrap_or(default)
    }

    pub fn q_or(&self, default: f64) -> f64 {
        self.q.unwrap_or(default)
    }

    /// Coupling in natural units, `q m / hbar^2`.
    pub fn natural_coupling(&self, q: f64) -> f64 {
        q * self.mass / (self.hbar * self.hbar)
    }

    /// Natural energies multiply by `hbar^2 / m` to give physical ones.
    pub fn energy_scale(&self) -> f64 {
        self.hbar * self.hbar / self.mass
    }

    pub fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }
}

/// One row of a report.
pub type Row = Map<String, Value>;

/// Build a row from `(key, value)` pairs, keeping their order.
pub fn row<const N: usize>(pairs: [(&str, Value); N]) -> Row {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Row layout for a pass/fail identity check.
pub fn check_row(anchor: &str, residual: f64, tolerance: f64) -> Row {
    row([
        ("anchor", Value::from(anchor)),
        ("residual", num(residual)),
        ("tolerance", num(tolerance)),
        ("pass", Value::from(residual.is_finite() && residual <= tolerance)),
    ])
}

/// Non-finite floats become `null` in JSON and an empty CSV cell.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    /// Values actually used after applying command defaults.
    pub parameters: Row,
    pub results: Vec<Row>,
    /// Summary checks that decide `pass` besides the per-row flags.
    pub residuals: Vec<Row>,
    pub pass: bool,
    pub elapsed_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig, parameters: Row) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            parameters,
            results: Vec::new(),
            residuals: Vec::new(),
            pass: true,
            elapsed_ms: None,
        }
    }

    /// Recompute `pass` from every row carrying a `pass` flag.
    pub fn finish(mut self) -> Self {
        self.pass = self
            .results
            .iter()
            .chain(&self.residuals)
            .all(|r| r.get("pass").and_then(Value::as_bool).unwrap_or(true));
        self
    }

    /// Labels of failing rows, for diagnostics.
    pub fn failures(&self) -> Vec<String> {
        self.results
            .iter()
            .chain(&self.residuals)
            .filter(|r| r.get("pass").and_then(Value::as_bool) == Some(false))
            .map(|r| {
                ["anchor", "name", "family", "n", "energy"]
                    .iter()
                    .filter_map(|k| r.get(*k).map(|v| format!("{k}={}", cell(v))))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Results table with a header row; columns are the union of row keys
    /// in order of first appearance.
    pub fn to_csv(&self) -> String {
        let mut columns: Vec<&str> = Vec::new();
        for r in &self.results {
            for k in r.keys() {
                if !columns.contains(&k.as_str()) {
                    columns.push(k);
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&columns).expect("in-memory write");
        for r in &self.results {
            w.write_record(columns.iter().map(|c| r.get(*c).map(cell).unwrap_or_default()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json() + "\n",
            Format::Csv => self.to_csv(),
        }
    }
}

/// CSV cell text; floats use 17 significant digits.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => format!("{f:.16e}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Execute an already-parsed command line.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let file = match &cli.common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    let cfg = RunConfig::resolve(&cli.common, &file)?;
    let start = Instant::now();
    let report = match &cli.command {
        Command::Spectrum { levels, method } => cmd_spectrum(&cfg, *levels, *method),
        Command::Smatrix { points, energies } => cmd_smatrix(&cfg, *points, energies.as_deref()),
        Command::Verify { suite, samples } => cmd_verify(&cfg, *suite, *samples),
        Command::Poles { count } => cmd_poles(&cfg, *count),
        Command::Laplace { q0 } => cmd_laplace(&cfg, *q0),
        Command::Radial { kind, n, energy } => cmd_radial(&cfg, *kind, *n, *energy),
    }?;
    let mut report = report.finish();
    if cfg.timing {
        report.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

/// Full CLI entry point; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    let start = Instant::now();
    match execute(&cli) {
        Ok(report) => {
            let format = report.config.format;
            let _ = out.write_all(report.render(format).as_bytes());
            let _ = writeln!(
                err,
                "{}: {} rows, {} in {:.1} ms",
                report.command,
                report.results.len(),
                if report.pass { "pass" } else { "FAIL" },
                start.elapsed().as_secs_f64() * 1e3
            );
            if report.pass {
                0
            } else {
                for f in report.failures() {
                    let _ = writeln!(err, "failed: {f}");
                }
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
