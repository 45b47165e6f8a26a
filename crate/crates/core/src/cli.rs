//! Experiment harness behind the `bck` binary.
//!
//! ```text
//! bck run --graph two-moons:2000:10:1 --balance cheeger --extension median \
//!     --c-sweep 0,0.1,1 --random-inits 99 --spectral --out table.csv
//! bck compare-extensions --graph g.graph --random-inits 10 --spectral
//! bck oracle --graph p3.graph --balance ratio-cut
//! ```

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{read_graph, two_moons_graph, Graph, GraphFormat};
use crate::objective::{Constraint, RatioObjective};
use crate::oracle::brute_force_optimum;
use crate::outer::{initial_pool, run_pool, InitPool, Mode, RunReport, SolverConfig};
use crate::setfn::{BalanceFunction, Extension, ExtensionKind};

/// Where the graph comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    /// `two-moons:N:K:SEED`
    TwoMoons {
        n: usize,
        k: usize,
        seed: u64,
    },
}

impl FromStr for GraphSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let Some(rest) = s.strip_prefix("two-moons:") else {
            return Ok(GraphSource::File(PathBuf::from(s)));
        };
        let parts: Vec<&str> = rest.split(':').collect();
        let usage = || format!("expected two-moons:N:K:SEED, got `{s}`");
        if parts.len() != 3 {
            return Err(usage());
        }
        Ok(GraphSource::TwoMoons {
            n: parts[0].parse().map_err(|_| usage())?,
            k: parts[1].parse().map_err(|_| usage())?,
            seed: parts[2].parse().map_err(|_| usage())?,
        })
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::File(p) => write!(f, "{}", p.display()),
            GraphSource::TwoMoons { n, k, seed } => write!(f, "two-moons:{n}:{k}:{seed}"),
        }
    }
}

impl GraphSource {
    pub fn load(&self, format: Option<GraphFormat>) -> Result<Graph> {
        match self {
            GraphSource::File(path) => read_graph(path, format),
            GraphSource::TwoMoons { n, k, seed } => {
                two_moons_graph(*n, *k, None, 0.1, *seed).map(|(g, _)| g)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum BalanceArg {
    RatioCut,
    Cheeger,
}

impl BalanceArg {
    pub fn function(self) -> BalanceFunction {
        match self {
            BalanceArg::RatioCut => BalanceFunction::RatioCut,
            BalanceArg::Cheeger => BalanceFunction::RatioCheeger,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ExtensionArg {
    Lovasz,
    Mean,
    Median,
}

impl ExtensionArg {
    pub fn kind(self) -> ExtensionKind {
        match self {
            ExtensionArg::Lovasz => ExtensionKind::Lovasz,
            ExtensionArg::Mean => ExtensionKind::ScaledMean,
            ExtensionArg::Median => ExtensionKind::Median,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ModeArg {
    Standard,
    CutMonotone,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Standard => Mode::Standard,
            ModeArg::CutMonotone => Mode::CutMonotone,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
pub enum OutFormat {
    #[default]
    Csv,
    Json,
}

fn parse_format(s: &str) -> std::result::Result<GraphFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// One experiment: a graph, an objective, a sweep over the proximal weight
/// `c` (with `c^k = c λ^k`) and a shared pool of initial vectors.
#[derive(Debug, Clone, Args)]
pub struct ExperimentSpec {
    /// Graph file, or `two-moons:N:K:SEED`.
    #[arg(long)]
    pub graph: GraphSource,
    /// File format; guessed from the extension when absent.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<GraphFormat>,
    #[arg(long, value_enum, default_value = "ratio-cut")]
    pub balance: BalanceArg,
    #[arg(long, value_enum, default_value = "lovasz")]
    pub extension: ExtensionArg,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub c_sweep: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub random_inits: usize,
    /// Add the second Laplacian eigenvector to the initializations.
    #[arg(long)]
    pub spectral: bool,
    #[arg(long, value_enum, default_value = "standard")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub out_format: OutFormat,
}

impl ExperimentSpec {
    pub fn new(graph: GraphSource) -> Self {
        Self {
            graph,
            format: None,
            balance: BalanceArg::RatioCut,
            extension: ExtensionArg::Lovasz,
            c_sweep: vec![0.0],
            random_inits: 10,
            spectral: false,
            mode: ModeArg::Standard,
            seed: 0,
            out: None,
            out_format: OutFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_sweep.is_empty() {
            return Err(Error::InvalidArgument("--c-sweep must not be empty".into()));
        }
        if let Some(c) = self.c_sweep.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "--c-sweep entries must be finite and nonnegative, got {c}"
            )));
        }
        if self.random_inits == 0 {
            return Err(Error::InvalidArgument(
                "--random-inits must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn config(&self, c: f64) -> SolverConfig {
        SolverConfig {
            c_s: c,
            mode: self.mode.into(),
            seed: self.seed,
            ..SolverConfig::default()
        }
    }

    fn objective(&self, graph: Arc<Graph>, kind: ExtensionKind) -> Result<RatioObjective> {
        RatioObjective::cut(graph, Extension::new(self.balance.function(), kind)?)
    }

    fn pool(&self, obj: &RatioObjective) -> Result<InitPool> {
        initial_pool(
            obj,
            Constraint::L2,
            self.random_inits,
            self.spectral,
            self.seed,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub report: RunReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub graph: String,
    pub n: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["c", "avg", "top10_avg", "best", "best_set_size"])
            .map_err(csv_error)?;
        for row in &self.rows {
            let r = &row.report;
            w.write_record([
                row.c.to_string(),
                r.avg.to_string(),
                r.top10_avg.to_string(),
                r.best.to_string(),
                r.best_set.len().to_string(),
            ])
            .map_err(csv_error)?;
        }
        finish_csv(w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render(&self, format: OutFormat) -> Result<String> {
        match format {
            OutFormat::Csv => self.to_csv(),
            OutFormat::Json => Ok(self.to_json()),
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Runs every entry of the c sweep from the same initial vectors.
pub fn cmd_run(spec: &ExperimentSpec) -> Result<SweepReport> {
    spec.validate()?;
    let graph = Arc::new(spec.graph.load(spec.format)?);
    let obj = spec.objective(graph.clone(), spec.extension.kind())?;
    let pool = spec.pool(&obj)?;
    let rows = spec
        .c_sweep
        .iter()
        .map(|&c| {
            Ok(SweepRow {
                c,
                report: run_pool(&obj, &spec.config(c), &pool)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepReport {
        graph: spec.graph.to_string(),
        n: graph.n(),
        rows,
    })
}

/// Lovász extension against the extension used in earlier work for the
/// same balance function (scaled mean for the ratio cut, median for the
/// ratio Cheeger cut).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub graph: String,
    pub c: f64,
    pub other: String,
    pub inits: usize,
    pub better: usize,
    pub equal: usize,
    pub worse: usize,
    pub best_lovasz: f64,
    pub best_other: f64,
    /// `best_lovasz / best_other`.
    pub best_ratio: f64,
    pub lovasz: RunReport,
    pub other_report: RunReport,
}

impl CompareReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "inits",
            "better",
            "equal",
            "worse",
            "best_lovasz",
            "best_other",
            "best_ratio",
        ])
        .map_err(csv_error)?;
        w.write_record([
            self.inits.to_string(),
            self.better.to_string(),
            self.equal.to_string(),
            self.worse.to_string(),
            self.best_lovasz.to_string(),
            self.best_other.to_string(),
            self.best_ratio.to_string(),
        ])
        .map_err(csv_error)?;
        finish_csv(w)
    }

    pub fn render(&self, format: OutFormat) -> Result<String> {
        match format {
            OutFormat::Csv => self.to_csv(),
            OutFormat::Json => Ok(serde_json::to_string_pretty(self).expect("report serializes")),
        }
    }
}

/// Cut ratios closer than this (relative) count as equal.
const EQUAL_TOL: f64 = 1e-10;

/// Runs both extensions from the same initial vectors at the first entry of
/// the c sweep and counts per initialization whether Lovász wins.
pub fn cmd_compare_extensions(spec: &ExperimentSpec) -> Result<CompareReport> {
    spec.validate()?;
    let graph = Arc::new(spec.graph.load(spec.format)?);
    let other_kind = match spec.balance {
        BalanceArg::RatioCut => ExtensionKind::ScaledMean,
        BalanceArg::Cheeger => ExtensionKind::Median,
    };
    let lovasz_obj = spec.objective(graph.clone(), ExtensionKind::Lovasz)?;
    let other_obj = spec.objective(graph, other_kind)?;
    let pool = spec.pool(&lovasz_obj)?;
    let c = spec.c_sweep[0];
    let cfg = spec.config(c);
    let lovasz = run_pool(&lovasz_obj, &cfg, &pool)?;
    let other_cfg = SolverConfig {
        mode: Mode::Standard,
        ..cfg
    };
    let other = run_pool(&other_obj, &other_cfg, &pool)?;

    let (mut better, mut equal, mut worse) = (0, 0, 0);
    for (a, b) in lovasz.runs.iter().zip(&other.runs) {
        let (x, y) = (a.best_ratio, b.best_ratio);
        if (x - y).abs() <= EQUAL_TOL * (1.0 + x.abs().max(y.abs())) {
            equal += 1;
        } else if x < y {
            better += 1;
        } else {
            worse += 1;
        }
    }
    Ok(CompareReport {
        graph: spec.graph.to_string(),
        c,
        other: match other_kind {
            ExtensionKind::ScaledMean => "mean",
            _ => "median",
        }
        .into(),
        inits: pool.len(),
        better,
        equal,
        worse,
        best_lovasz: lovasz.best,
        best_other: other.best,
        best_ratio: lovasz.best / other.best,
        lovasz,
        other_report: other,
    })
}

/// `"{ratio:?} {set}"`, e.g. `0.5 {0}`.
pub fn cmd_oracle(
    graph: &GraphSource,
    format: Option<GraphFormat>,
    balance: BalanceArg,
) -> Result<String> {
    let g = graph.load(format)?;
    let r = brute_force_optimum(&g, &balance.function())?;
    Ok(format!("{:?} {}", r.best_ratio, r.best_set))
}

#[derive(Debug, Parser)]
#[command(name = "bck", version, about = "Balanced graph cuts by RatioDCA-prox")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multi-start solves over a sweep of proximal weights.
    Run(ExperimentSpec),
    /// Lovász extension against the scaled-mean / median extension.
    CompareExtensions(ExperimentSpec),
    /// Exact optimum by exhaustive search (n <= 24).
    Oracle {
        #[arg(long)]
        graph: GraphSource,
        #[arg(long, value_parser = parse_format)]
        format: Option<GraphFormat>,
        #[arg(long, value_enum, default_value = "ratio-cut")]
        balance: BalanceArg,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Parse { .. } | Error::InvalidGraph(_) => EXIT_IO,
        Error::InvalidArgument(_)
        | Error::Unsupported(_)
        | Error::TooLarge { .. }
        | Error::Disconnected { .. }
        | Error::SetFunction(_)
        | Error::Dimension { .. } => EXIT_USAGE,
        Error::Degenerate(_) | Error::Relaxation(_) | Error::Numerical(_) => EXIT_NUMERICAL,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(spec) => {
            let text = cmd_run(&spec)?.render(spec.out_format)?;
            emit(&spec.out, &text)
        }
        Command::CompareExtensions(spec) => {
            let text = cmd_compare_extensions(&spec)?.render(spec.out_format)?;
            emit(&spec.out, &text)
        }
        Command::Oracle {
            graph,
            format,
            balance,
        } => {
            println!("{}", cmd_oracle(&graph, format, balance)?);
            Ok(())
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
