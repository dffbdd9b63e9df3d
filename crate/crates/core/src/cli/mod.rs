//! Command implementations behind the `qbern` binary.
//!
//! Every command returns a serialisable report that embeds the full
//! [`RunConfig`], so a run can be reproduced from its own output. Exit codes:
//! 0 success, 1 verification failure, 2 invalid input, 3 numerical budget
//! exhausted.

mod commands;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use commands::{
    bq_apply, distance, moments, quad_error, weights, ApplyRow, BqApplyReport, DistanceReport,
    MomentRow, MomentsReport, QuadErrorReport, WeightRow, WeightsReport, Witness,
};
pub use verify::{verify, Case, VerifyReport};

use crate::error::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "qbern", version, about = "Limit q-Bernstein operator toolkit")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Tabulate p_k(q;x) and the running sum.
    Weights(WeightsArgs),
    /// Apply B_q to a piecewise-linear function read from a file.
    BqApply(BqApplyArgs),
    /// Run one of the inequality sweeps.
    Verify(VerifyArgs),
    /// Estimate ||B_q - B_r||.
    Distance(DistanceArgs),
    /// Composite quadrature error, direct and Peano form.
    QuadError(QuadErrorArgs),
    /// Kernel moments I_j, closed form against numeric.
    Moments(MomentsArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WeightsArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub eps: f64,
    /// Largest number of rows before giving up.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_k: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BqApplyArgs {
    #[arg(long)]
    pub q: f64,
    /// File with one `t,y` pair per line, sorted, including t = 0 and t = 1.
    #[arg(long = "fn")]
    pub function: PathBuf,
    /// Evaluation points; defaults to a geometric grid towards 1.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    /// Finest grid gap is 10^-depth.
    #[arg(long, default_value_t = 8)]
    pub grid_depth: u32,
    #[arg(long, default_value_t = 1e-14)]
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fedja,
    Moments,
    Theta,
    Rho,
    Decay,
    Tail,
    Envelope,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Restrict the sweep to one q.
    #[arg(long)]
    pub q: Option<f64>,
    /// Restrict the sweep to one m.
    #[arg(long)]
    pub m: Option<usize>,
    /// Upper end of the m range for `moments` and `theta`.
    #[arg(long)]
    pub m_max: Option<usize>,
    /// Largest k for `fedja`.
    #[arg(long, default_value_t = 30)]
    pub k_max: usize,
    /// Closest approach to x = 1 (10^-depth) for `envelope`.
    #[arg(long, default_value_t = 8)]
    pub grid_depth: u32,
    /// Margins below -tol count as failures; the default depends on the suite.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 1e-14)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistanceArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub r: f64,
    #[arg(long = "N", default_value_t = 60)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub grid_depth: u32,
    #[arg(long, default_value_t = 0.5)]
    pub start_gap: f64,
    #[arg(long, default_value_t = 4)]
    pub per_halving: usize,
    /// Double N from 16 (up to --N) until the bound is this close to its limit.
    #[arg(long)]
    pub target_eps: Option<f64>,
    #[arg(long, default_value_t = 1e-14)]
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// t^2
    Square,
    /// t^3
    Cube,
    /// e^-t
    ExpNeg,
    /// -ln(1 - e^-t)
    LogTerm,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuadErrorArgs {
    #[arg(long = "f", value_enum)]
    pub function: TestFunction,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    /// Right end; omit for [a, inf).
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub panels: usize,
    /// Panel width on [a, inf).
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MomentsArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    #[arg(long, default_value_t = 2)]
    pub j_max: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("serialisation failed: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(e) if e.is_budget_exhaustion() => 3,
            _ => 2,
        }
    }
}

/// A rendered report and whether it passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub body: String,
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Execute one configured command and render its report.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    match &config.command {
        Command::Weights(args) => {
            let report = weights(config, args)?;
            let body = match config.format {
                Format::Json => to_json(&report)?,
                Format::Csv => to_csv(
                    ["k", "p_k", "cumulative_sum"],
                    report
                        .rows
                        .iter()
                        .map(|r| vec![r.k.to_string(), float(r.p_k), float(r.cumulative_sum)]),
                )?,
            };
            Ok(Outcome { body, passed: true })
        }
        Command::BqApply(args) => {
            let report = bq_apply(config, args)?;
            let body = match config.format {
                Format::Json => to_json(&report)?,
                Format::Csv => to_csv(
                    ["x", "value", "error_bound"],
                    report
                        .rows
                        .iter()
                        .map(|r| vec![float(r.x), float(r.value), float(r.error_bound)]),
                )?,
            };
            Ok(Outcome { body, passed: true })
        }
        Command::Verify(args) => {
            let report = verify(config, args)?;
            let passed = report.failures.is_empty();
            let body = match config.format {
                Format::Json => to_json(&report)?,
                Format::Csv => to_csv(
                    ["case", "params", "margin", "failed"],
                    report.all.iter().enumerate().map(|(i, c)| {
                        let params: Vec<String> =
                            c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                        vec![
                            i.to_string(),
                            params.join(";"),
                            float(c.margin),
                            c.failed.to_string(),
                        ]
                    }),
                )?,
            };
            Ok(Outcome { body, passed })
        }
        Command::Distance(args) => {
            let report = distance(config, args)?;
            let body = match config.format {
                Format::Json => to_json(&report)?,
                Format::Csv => {
                    let opt = |v: Option<f64>| v.map(float).unwrap_or_default();
                    let relation = report
                        .relation
                        .map(|r| format!("{}:{}", r.j, r.m))
                        .unwrap_or_default();
                    let rows = vec![
                        vec![
                            "regime".into(),
                            format!("{:?}", report.regime).to_lowercase(),
                        ],
                        vec!["relation".into(), relation],
                        vec!["lower_bound".into(), float(report.lower_bound)],
                        vec!["closed_form".into(), opt(report.closed_form)],
                        vec!["envelope".into(), opt(report.envelope)],
                        vec!["witness_x".into(), float(report.witness.x)],
                        vec!["N".into(), report.witness.n.to_string()],
                    ];
                    to_csv(["key", "value"], rows.into_iter())?
                }
            };
            Ok(Outcome { body, passed: true })
        }
        Command::QuadError(args) => {
            let report = quad_error(config, args)?;
            let body = match config.format {
                Format::Json => to_json(&report)?,
                Format::Csv => to_csv(
                    ["method", "integral", "quadrature", "error"],
                    [&report.direct, &report.peano].into_iter().map(|e| {
                        vec![
                            format!("{:?}", e.method).to_lowercase(),
                            float(e.value_integral),
                            float(e.value_quadrature),
                            float(e.error),
                        ]
                    }),
                )?,
            };
            Ok(Outcome { body, passed: true })
        }
        Command::Moments(args) => {
            let report = moments(config, args)?;
            let body = match config.format {
                Format::Json => to_json(&report)?,
                Format::Csv => to_csv(
                    ["j", "closed_form", "numeric"],
                    report
                        .rows
                        .iter()
                        .map(|r| vec![r.j.to_string(), float(r.closed_form), float(r.numeric)]),
                )?,
            };
            Ok(Outcome { body, passed: true })
        }
    }
}

/// Parse `args`, run, write the report and map the result to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = run(&config).and_then(|outcome| {
        match &config.out {
            Some(path) => std::fs::write(path, &outcome.body).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?,
            None => print!("{}", outcome.body),
        }
        Ok(outcome)
    });
    match outcome {
        Ok(outcome) => {
            if !outcome.passed {
                eprintln!("qbern: verification failed");
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("qbern: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// 17 significant digits, enough to round-trip any double.
fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_csv<const N: usize>(
    header: [&str; N],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Output(e.to_string());
    writer.write_record(header).map_err(err)?;
    for row in rows {
        writer.write_record(&row).map_err(err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

pub(crate) fn param(name: &'static str, v: f64) -> Result<crate::QParam, CliError> {
    crate::QParam::new(v)
        .map_err(|_| CliError::Input(format!("--{name} must lie in (0, 1), got {v}")))
}

pub(crate) fn policy(eps: f64, max_terms: usize) -> Result<crate::TruncationPolicy, CliError> {
    crate::TruncationPolicy::new(eps, max_terms).map_err(|e| CliError::Input(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("qbern").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn weights_csv_ends_near_one() {
        let out = run(&parse(&[
            "weights", "--q", "0.5", "--x", "0.5", "--eps", "1e-12", "--format", "csv",
        ]))
        .unwrap();
        let last = out.body.lines().last().unwrap();
        let cum: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
        assert!((cum - 1.0).abs() < 1e-12);
        assert!(out.body.starts_with("k,p_k,cumulative_sum"));
    }

    #[test]
    fn exit_codes() {
        let bad = run(&parse(&["weights", "--q", "1.5", "--x", "0.5"])).unwrap_err();
        assert_eq!(bad.exit_code(), 2);
        let capped = run(&parse(&[
            "weights", "--q", "0.9", "--x", "0.999999", "--max-k", "50",
        ]))
        .unwrap_err();
        assert_eq!(capped.exit_code(), 3);
        let failed = Outcome {
            body: String::new(),
            passed: false,
        };
        assert_eq!(failed.exit_code(), 1);
    }

    #[test]
    fn reports_embed_config() {
        let out = run(&parse(&["moments", "--m", "3"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.body).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["config"]["command"]["name"], "moments");
        assert_eq!(v["config"]["command"]["m"], 3);
    }

    #[test]
    fn deterministic_output() {
        let cfg = parse(&["distance", "--q", "0.5", "--r", "0.25", "--N", "20"]);
        assert_eq!(run(&cfg).unwrap().body, run(&cfg).unwrap().body);
    }
}
