//! Command-line surface: distribution tables, the correlation dataset and
//! single joint-CDF records, written as CSV or JSON.

use crate::distributions::{grid_points, joint_cdf, tw_table};
use crate::moments::{correlation_extremes_given, tw_moments};
use crate::montecarlo::{sample_correlation, EnsembleKind, EnsembleSpec};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::PathBuf;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const FULL_SAMPLES: usize = 1_000_000;
pub const DEFAULT_N_LIST: &[usize] = &[2, 4, 8, 16, 32, 64];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleChoice {
    Gue,
    Uniform,
}

#[derive(Debug, Parser)]
#[command(
    name = "gue-extremes",
    version,
    about = "Extreme eigenvalues of the GUE via Fredholm determinants"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Target accuracy of determinants and integrals, in [1e-14, 1e-4].
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of F2 and F2' on a grid.
    TwTable {
        /// Grid as lo:hi:step.
        #[arg(long, default_value = "-10:6:0.05", allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Correlation of the extreme eigenvalues against n.
    Figure1 {
        /// Comma-separated matrix sizes.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_N_LIST.to_vec())]
        n_list: Vec<usize>,
        /// Add Monte Carlo columns.
        #[arg(long)]
        mc: bool,
        /// Restrict Monte Carlo to one ensemble.
        #[arg(long, value_enum)]
        ensemble: Option<EnsembleChoice>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Use 10^6 Monte Carlo samples.
        #[arg(long)]
        full_samples: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Joint CDF P(λ̃min ≤ x, λ̃max ≤ y) at size n.
    Joint {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Validated run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub n_list: Vec<usize>,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1e-14..=1e-4).contains(&self.tol) {
            return Err(Error::Domain(format!(
                "--tol {} must lie in [1e-14, 1e-4]",
                self.tol
            )));
        }
        if self.command == "figure1" && self.n_list.is_empty() {
            return Err(Error::Domain("--n-list must not be empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Numeric column values; empty cells become NaN.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        Some(
            self.column(name)?
                .into_iter()
                .map(|c| match c {
                    Cell::Num(v) => v,
                    Cell::Int(v) => v as f64,
                    Cell::Empty => f64::NAN,
                })
                .collect(),
        )
    }
}

/// Fixed 15-significant-digit representation.
pub fn format_number(v: f64) -> String {
    format!("{v:.14e}")
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_number(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Empty => String::new(),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Num(v) => format_number(*v)
            .parse::<f64>()
            .ok()
            .and_then(serde_json::Number::from_f64)
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Cell::Int(v) => json!(v),
        Cell::Empty => Value::Null,
    }
}

pub fn render_csv(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell_text)).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

pub fn render_json(table: &Table, metadata: Value) -> Result<Vec<u8>> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            let obj: Map<String, Value> = table
                .columns
                .iter()
                .cloned()
                .zip(r.iter().map(cell_json))
                .collect();
            Value::Object(obj)
        })
        .collect();
    let doc = json!({ "metadata": metadata, "columns": table.columns, "rows": rows });
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn metadata(config: &RunConfig) -> Value {
    json!({
        "command": config.command,
        "tol": config.tol,
        "seed": config.seed,
        "samples": config.samples,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn emit(table: &Table, config: &RunConfig) -> Result<()> {
    let bytes = match config.output_format {
        OutputFormat::Csv => render_csv(table)?,
        OutputFormat::Json => render_json(table, metadata(config))?,
    };
    match &config.output_path {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout().write_all(&bytes).map_err(Error::from),
    }
}

/// Parses `lo:hi:step`.
pub fn parse_grid(spec: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Domain(format!("grid '{spec}' is not lo:hi:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    grid_points(v[0], v[1], v[2])?;
    Ok((v[0], v[1], v[2]))
}

/// Columns `t, F2, F2_pdf`.
pub fn cmd_tw_table(grid: (f64, f64, f64), tol: f64) -> Result<Table> {
    let g = tw_table(grid.0, grid.1, grid.2, tol)?;
    let mut table = Table::new(&["t", "F2", "F2_pdf"]);
    let pdf = g.pdf.unwrap_or_default();
    for ((t, f), p) in g.grid.iter().zip(&g.cdf).zip(&pdf) {
        table
            .rows
            .push(vec![Cell::Num(*t), Cell::Num(*f), Cell::Num(*p)]);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Options {
    pub n_list: Vec<usize>,
    pub tol: f64,
    /// Monte Carlo sample count; `None` leaves the Monte Carlo columns empty.
    pub samples: Option<usize>,
    pub seed: u64,
    /// Ensembles sampled when Monte Carlo is enabled.
    pub ensembles: Vec<EnsembleKind>,
}

pub const FIGURE1_COLUMNS: &[&str] = &[
    "n",
    "rho_det",
    "rho_asym",
    "rho_mc_gue",
    "stderr_gue",
    "rho_mc_uniform",
    "stderr_uniform",
];

/// Determinant correlation, asymptote and optional Monte Carlo estimates
/// per matrix size.
pub fn cmd_figure1(opts: &Figure1Options) -> Result<Table> {
    if opts.n_list.is_empty() {
        return Err(Error::Domain("n list must not be empty".into()));
    }
    let sigma2 = tw_moments(opts.tol)?.variance;
    let mut table = Table::new(FIGURE1_COLUMNS);
    for &n in &opts.n_list {
        let rec = correlation_extremes_given(n, opts.tol, sigma2)?;
        let mut row = vec![
            Cell::Int(n as u64),
            Cell::Num(rec.rho_det),
            Cell::Num(rec.rho_asym),
        ];
        for kind in [EnsembleKind::Gue, EnsembleKind::UniformWigner] {
            match opts.samples {
                Some(samples) if opts.ensembles.contains(&kind) => {
                    let spec = EnsembleSpec { kind, n };
                    let mc = sample_correlation(spec, samples, opts.seed)?;
                    row.push(Cell::Num(mc.rho));
                    row.push(Cell::Num(mc.stderr));
                }
                _ => {
                    row.push(Cell::Empty);
                    row.push(Cell::Empty);
                }
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

pub const JOINT_COLUMNS: &[&str] = &[
    "n",
    "x",
    "y",
    "joint",
    "product",
    "deviation",
    "predictor_correction",
];

/// One joint-CDF record.
pub fn cmd_joint(n: usize, x: f64, y: f64, tol: f64) -> Result<Table> {
    let v = joint_cdf(n, x, y, tol)?;
    let mut table = Table::new(JOINT_COLUMNS);
    table.rows.push(vec![
        Cell::Int(n as u64),
        Cell::Num(x),
        Cell::Num(y),
        Cell::Num(v.joint),
        Cell::Num(v.product),
        Cell::Num(v.deviation()),
        Cell::Num(v.correction_predictor),
    ]);
    Ok(table)
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Domain(e.to_string()))?;
    execute(cli)
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::TwTable { grid, common } => {
            let config = config("tw-table", Vec::new(), 0, 0, &common);
            config.validate()?;
            let grid = parse_grid(&grid)?;
            emit(&cmd_tw_table(grid, common.tol)?, &config)
        }
        Command::Figure1 {
            n_list,
            mc,
            ensemble,
            samples,
            full_samples,
            seed,
            common,
        } => {
            let samples = if full_samples { FULL_SAMPLES } else { samples };
            let config = config("figure1", n_list.clone(), samples, seed, &common);
            config.validate()?;
            let ensembles = match ensemble {
                Some(EnsembleChoice::Gue) => vec![EnsembleKind::Gue],
                Some(EnsembleChoice::Uniform) => vec![EnsembleKind::UniformWigner],
                None => vec![EnsembleKind::Gue, EnsembleKind::UniformWigner],
            };
            let opts = Figure1Options {
                n_list,
                tol: common.tol,
                samples: (mc || full_samples || ensemble.is_some()).then_some(samples),
                seed,
                ensembles,
            };
            emit(&cmd_figure1(&opts)?, &config)
        }
        Command::Joint { n, x, y, common } => {
            let config = config("joint", vec![n], 0, 0, &common);
            config.validate()?;
            emit(&cmd_joint(n, x, y, common.tol)?, &config)
        }
    }
}

fn config(
    command: &'static str,
    n_list: Vec<usize>,
    samples: usize,
    seed: u64,
    c: &CommonArgs,
) -> RunConfig {
    RunConfig {
        command,
        n_list,
        tol: c.tol,
        samples,
        seed,
        output_format: c.format,
        output_path: c.out.clone(),
    }
}
