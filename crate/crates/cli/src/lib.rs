//! Command-line driver: argument definitions, report emission and exit codes.

pub mod commands;
pub mod scenario;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] qtps::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        2
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotConverged,
}

impl Verdict {
    pub fn code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::NotConverged => 3,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Rows of a CSV table with its header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Everything a command produces.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub verdict: Verdict,
    pub json: serde_json::Value,
    pub table: Option<Table>,
    /// Additional files `(name, contents)` written next to the report.
    pub files: Vec<(String, String)>,
}

impl Report {
    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report values serialize");
        s.push('\n');
        s
    }

    /// Top-level scalar fields as `key,value` lines.
    fn flat_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        if let serde_json::Value::Object(map) = &self.json {
            for (k, v) in map {
                match v {
                    serde_json::Value::Array(_) | serde_json::Value::Object(_) => {}
                    serde_json::Value::String(s) => out.push_str(&format!("{k},{s}\n")),
                    other => out.push_str(&format!("{k},{other}\n")),
                }
            }
        }
        out
    }

    pub fn csv_text(&self) -> String {
        match &self.table {
            Some(t) => t.to_csv(),
            None => self.flat_csv(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qtps", version, about = "Tensor product structures, dualities and single-outcome measurement")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Directory for report files; reports go to stdout only when absent.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the command's default tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ascending eigenvalues of a Hamiltonian.
    Spectrum(commands::SpectrumArgs),
    /// Checks the duality map and compares the transformed model with both field axes.
    DualVerify(commands::DualVerifyArgs),
    /// Decides whether two structures differ only by local unitaries and permutations.
    TpsEquiv(commands::TpsEquivArgs),
    /// Pauli decomposition and k-locality of a Hamiltonian, optionally in another frame.
    Klocal(commands::KlocalArgs),
    /// Schmidt decomposition of a state across a cut.
    Schmidt(commands::SchmidtArgs),
    /// Searches for a structure in which the state factorizes.
    FindTps(commands::FindTpsArgs),
    /// Single-outcome measurement of an apparatus observable.
    Measure(commands::ScenarioArgs),
    /// Entropy before and after product-structure search along an evolution.
    Trajectory(commands::TrajectoryArgs),
    /// Negativity of the two-mass interferometer state.
    Gie(commands::GieArgs),
    /// Spectral comparison over a grid of couplings and fields.
    Scan(commands::ScanArgs),
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, g),
        Command::DualVerify(a) => commands::dual_verify(a, g),
        Command::TpsEquiv(a) => commands::tps_equiv(a, g),
        Command::Klocal(a) => commands::klocal(a, g),
        Command::Schmidt(a) => commands::schmidt(a, g),
        Command::FindTps(a) => commands::find_tps(a, g),
        Command::Measure(a) => commands::measure(a, g),
        Command::Trajectory(a) => commands::trajectory(a, g),
        Command::Gie(a) => commands::gie(a, g),
        Command::Scan(a) => commands::scan(a, g),
    }
}

fn emit(report: &Report, g: &Global) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    if let Some(dir) = &g.out_dir {
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join(format!("{}.json", report.command)), report.json_text()).map_err(io)?;
        if let Some(t) = &report.table {
            std::fs::write(dir.join(format!("{}.csv", report.command)), t.to_csv()).map_err(io)?;
        }
        for (name, text) in &report.files {
            std::fs::write(dir.join(name), text).map_err(io)?;
        }
    }
    let text = match g.format {
        Format::Json => report.json_text(),
        Format::Csv => report.csv_text(),
    };
    std::io::stdout().lock().write_all(text.as_bytes()).map_err(io)
}

pub fn run(cli: Cli) -> ExitCode {
    let result = execute(&cli).and_then(|r| {
        for (name, text) in extra_outputs(&cli, &r) {
            std::fs::write(&name, text).map_err(|e| CliError::Io(format!("{}: {e}", name.display())))?;
        }
        emit(&r, &cli.global).map(|_| r.verdict)
    });
    match result {
        Ok(v) => ExitCode::from(v.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Files requested by per-command flags such as `trajectory --out`.
fn extra_outputs(cli: &Cli, report: &Report) -> Vec<(PathBuf, String)> {
    match (&cli.command, &report.table) {
        (Command::Trajectory(a), Some(t)) => a.out.iter().map(|p| (p.clone(), t.to_csv())).collect(),
        _ => Vec::new(),
    }
}
