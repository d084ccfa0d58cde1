//! The `padua` command-line tool.

use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::bench::{preset, result_row, run_experiment, ExperimentConfig, CSV_COLUMNS, PRESETS};
use crate::error::{Error, Result};
use crate::field::{eval_field, make_field, FieldKind};
use crate::io::{read_samples, write_output, Cell, Format, Table};
use crate::lsq::{
    condition_number, gram_orthonormality, lebesgue_estimate, perturbation_sweep, BasisKind,
    BasisSpec, MatrixNorm, WeightedVandermonde, DEFAULT_LEBESGUE_RESOLUTION,
};
use crate::padua::{interpolate_fast, PaduaSamples};
use crate::points::{linspace, padua_points_curve, padua_points_grid, Point2};
use crate::rbf::{rbf_eval, rbf_fit};

const SEED_ENV: &str = "PADUA_FIELD_SEED";

#[derive(Debug, Parser)]
#[command(name = "padua", version, about = "Padua-point field reconstruction toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Padua points of one order with their class and cubature weight.
    Points(PointsArgs),
    /// A normalized true field sampled on a square grid.
    Field(FieldArgs),
    /// Reconstruct a field on a grid from sampled values.
    Interp(InterpArgs),
    /// Conditioning, Lebesgue, Gram and perturbation diagnostics.
    Diagnose(DiagnoseArgs),
    /// Run mapping-error benchmarks.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output path; stdout when absent or `-`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Curve,
    Grid,
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    #[arg(long, value_parser = parse_order)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = Construction::Curve)]
    pub construction: Construction,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// polynomial, linear, franke or nonpoly.
    #[arg(long)]
    pub kind: FieldKind,
    /// Degree of a polynomial field.
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Points per side of the output grid.
    #[arg(long, default_value_t = 101, value_parser = parse_resolution)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpMethod {
    Padua,
    Rbf,
}

#[derive(Debug, Args)]
pub struct InterpArgs {
    /// CSV with x, y, value columns.
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long, value_enum, default_value_t = InterpMethod::Padua)]
    pub method: InterpMethod,
    /// Points per side of a square evaluation grid.
    #[arg(long, value_parser = parse_resolution, conflicts_with_all = ["grid_x", "grid_y"])]
    pub grid: Option<usize>,
    #[arg(long, value_parser = parse_resolution)]
    pub grid_x: Option<usize>,
    #[arg(long, value_parser = parse_resolution)]
    pub grid_y: Option<usize>,
    /// RBF shape parameter (default: inverse mean nearest-neighbour spacing).
    #[arg(long)]
    pub shape: Option<f64>,
    /// RBF ridge regularization.
    #[arg(long)]
    pub ridge: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Diagnostic {
    Condition,
    Lebesgue,
    Gram,
    Perturb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Inf,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Chebyshev,
    Monomial,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long, value_parser = parse_order)]
    pub order: usize,
    #[arg(long, value_enum)]
    pub what: Diagnostic,
    #[arg(long, value_enum, default_value_t = NormArg::Inf)]
    pub norm: NormArg,
    #[arg(long, value_enum, default_value_t = BasisArg::Chebyshev)]
    pub basis: BasisArg,
    #[arg(long, default_value_t = DEFAULT_LEBESGUE_RESOLUTION, value_parser = parse_resolution)]
    pub resolution: usize,
    /// Comma-separated perturbation magnitudes.
    #[arg(long, value_delimiter = ',', default_value = "0,1e-4,1e-3,1e-2")]
    pub eps: Vec<f64>,
    /// Field used by the perturbation sweep.
    #[arg(long, default_value = "franke")]
    pub field: FieldKind,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["preset", "config"])))]
pub struct BenchArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    pub preset: Option<String>,
    /// JSON file holding one experiment configuration or an array of them.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_positive)]
    pub trials: Option<usize>,
    #[arg(long, value_parser = parse_positive_u64)]
    pub shots: Option<u64>,
    /// Master seed.
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
    /// Use exact field values at the sensors.
    #[arg(long)]
    pub noiseless: bool,
    #[arg(long, value_parser = parse_positive)]
    pub threads: Option<usize>,
    /// Report wall_ms as 0 so output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_order(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))?;
    if v == 0 {
        return Err("order must be >= 1".into());
    }
    Ok(v)
}

fn parse_resolution(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))?;
    if v < 2 {
        return Err("grid resolution must be >= 2".into());
    }
    Ok(v)
}

fn parse_positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be >= 1".into()),
        Ok(v) => Ok(v),
        Err(_) => Err(format!("'{s}' is not a positive integer")),
    }
}

fn parse_positive_u64(s: &str) -> std::result::Result<u64, String> {
    parse_positive(s).map(|v| v as u64)
}

/// Parses and validates a command line (including the program name).
pub fn parse_args<I, T>(argv: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    if let Command::Field(a) = &cli.command {
        if a.kind == FieldKind::Polynomial && a.degree > 30 {
            return Err(Cli::command().error(
                clap::error::ErrorKind::ValueValidation,
                "--degree: polynomial degree must be <= 30",
            ));
        }
    }
    if let Command::Diagnose(a) = &cli.command {
        if a.what == Diagnostic::Lebesgue && a.resolution < crate::lsq::MIN_LEBESGUE_RESOLUTION {
            return Err(Cli::command().error(
                clap::error::ErrorKind::ValueValidation,
                format!("--resolution: must be >= {} for lebesgue", crate::lsq::MIN_LEBESGUE_RESOLUTION),
            ));
        }
        if a.eps.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Cli::command().error(
                clap::error::ErrorKind::ValueValidation,
                "--eps: values must be finite and non-negative",
            ));
        }
    }
    Ok(cli)
}

fn square_grid(n: usize) -> Vec<Point2> {
    let axis = linspace(n);
    axis.iter()
        .flat_map(|&y| axis.iter().map(move |&x| Point2 { x, y }))
        .collect()
}

fn f(v: f64) -> Cell {
    Cell::Float(v)
}

fn points_table(a: &PointsArgs) -> Result<Table> {
    let set = match a.construction {
        Construction::Curve => padua_points_curve(a.order)?,
        Construction::Grid => padua_points_grid(a.order)?,
    };
    let mut t = Table::new(["x", "y", "class", "weight"]);
    for ((p, c), w) in set.points().iter().zip(set.classes()).zip(set.weights()) {
        t.push(vec![f(p.x), f(p.y), Cell::Text(c.as_str().into()), f(*w)])?;
    }
    Ok(t)
}

fn field_table(a: &FieldArgs) -> Result<Table> {
    let field = make_field(a.kind, a.degree, a.seed)?;
    let pts = square_grid(a.grid);
    let vals = eval_field(&field, &pts)?;
    let mut t = Table::new(["x", "y", "value"]);
    for (p, v) in pts.iter().zip(vals) {
        t.push(vec![f(p.x), f(p.y), f(v)])?;
    }
    Ok(t)
}

fn interp_table(a: &InterpArgs) -> Result<Table> {
    let rows = read_samples(&a.samples)?;
    let pts: Vec<Point2> = rows.iter().map(|r| Point2::new(r.0, r.1)).collect::<Result<_>>()?;
    let vals: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let gx = linspace(a.grid.or(a.grid_x).unwrap_or(21));
    let gy = linspace(a.grid.or(a.grid_y).unwrap_or(21));
    let mut t = Table::new(["x", "y", "value"]);
    match a.method {
        InterpMethod::Padua => {
            let samples = PaduaSamples::from_scattered(&pts, &vals)?;
            let out = interpolate_fast(&samples, &gx, &gy)?;
            for (r, &y) in gy.iter().enumerate() {
                for (c, &x) in gx.iter().enumerate() {
                    t.push(vec![f(x), f(y), f(out[(r, c)])])?;
                }
            }
        }
        InterpMethod::Rbf => {
            let model = rbf_fit(&pts, &vals, a.shape, a.ridge)?;
            let targets: Vec<Point2> = gy
                .iter()
                .flat_map(|&y| gx.iter().map(move |&x| Point2 { x, y }))
                .collect();
            for (p, v) in targets.iter().zip(rbf_eval(&model, &targets)) {
                t.push(vec![f(p.x), f(p.y), f(v)])?;
            }
        }
    }
    Ok(t)
}

fn diagnose_table(a: &DiagnoseArgs) -> Result<Table> {
    let order_cell = Cell::UInt(a.order as u64);
    match a.what {
        Diagnostic::Condition | Diagnostic::Gram => {
            let set = padua_points_curve(a.order)?;
            let kind = match a.basis {
                BasisArg::Chebyshev => BasisKind::ProductChebyshev,
                BasisArg::Monomial => BasisKind::Monomial,
            };
            let w: Vec<f64> = set.weights().iter().map(|w| w.sqrt()).collect();
            let v = WeightedVandermonde::new(BasisSpec::new(kind, a.order), set.points(), &w)?;
            let basis_name = Cell::Text(format!("{:?}", a.basis).to_lowercase());
            if a.what == Diagnostic::Gram {
                let g = gram_orthonormality(&v);
                let mut t = Table::new(["row", "col", "value"]);
                for i in 0..g.nrows() {
                    for j in 0..g.ncols() {
                        t.push(vec![Cell::UInt(i as u64), Cell::UInt(j as u64), f(g[(i, j)])])?;
                    }
                }
                return Ok(t);
            }
            let (norm, name) = match a.norm {
                NormArg::Inf => (MatrixNorm::Infinity, "inf"),
                NormArg::Spectral => (MatrixNorm::Spectral, "spectral"),
            };
            let eta = condition_number(&v, norm)?;
            let mut t = Table::new(["order", "basis", "norm", "eta"]);
            t.push(vec![order_cell, basis_name, Cell::Text(name.into()), f(eta)])?;
            Ok(t)
        }
        Diagnostic::Lebesgue => {
            let est = lebesgue_estimate(a.order, a.resolution)?;
            let mut t = Table::new(["order", "resolution", "lebesgue_constant"]);
            t.push(vec![order_cell, Cell::UInt(est.grid_resolution as u64), f(est.value)])?;
            Ok(t)
        }
        Diagnostic::Perturb => {
            let field = make_field(a.field, a.order, a.seed)?;
            let rows = perturbation_sweep(a.order, &a.eps, &field, a.seed, a.resolution)?;
            let mut t = Table::new(["order", "epsilon", "max_error"]);
            for r in rows {
                t.push(vec![order_cell.clone(), f(r.epsilon), f(r.max_error)])?;
            }
            Ok(t)
        }
    }
}

fn load_configs(a: &BenchArgs) -> Result<Vec<ExperimentConfig>> {
    let mut configs = match (&a.preset, &a.config) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let parsed = if value.is_array() {
                serde_json::from_value(value)
            } else {
                serde_json::from_value(value).map(|c| vec![c])
            };
            parsed.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        }
        (None, None) => unreachable!("clap enforces one source"),
    };
    for c in &mut configs {
        if let Some(t) = a.trials {
            c.trials = t;
        }
        if let Some(m) = a.shots {
            c.shots = m;
        }
        if let Some(s) = a.seed {
            c.master_seed = s;
        }
        c.noiseless |= a.noiseless;
        c.validate()?;
    }
    Ok(configs)
}

fn bench_table(a: &BenchArgs) -> Result<Table> {
    let configs = load_configs(a)?;
    let run = || -> Result<Table> {
        let mut t = Table::new(CSV_COLUMNS);
        for c in &configs {
            let mut r = run_experiment(c)?;
            if a.no_timing {
                r.wall_ms = 0;
            }
            t.push(result_row(&r))?;
        }
        Ok(t)
    };
    match a.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let (table, output) = match &cli.command {
        Command::Points(a) => (points_table(a)?, &a.output),
        Command::Field(a) => (field_table(a)?, &a.output),
        Command::Interp(a) => (interp_table(a)?, &a.output),
        Command::Diagnose(a) => (diagnose_table(a)?, &a.output),
        Command::Bench(a) => (bench_table(a)?, &a.output),
    };
    write_output(&table, output.format, output.out.as_deref())
}

/// Entry point returning the process exit code: 0 success, 2 usage error,
/// 1 runtime error.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
