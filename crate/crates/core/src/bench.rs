//! Field-mapping experiments: true field → simulated sensor measurements →
//! reconstruction at the data-qubits → uniform mapping error, repeated over
//! seeded trials.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{eval_field, make_field, Field, FieldKind};
use crate::measurement::{stream_rng, MeasurementRecord};
use crate::padua::{PaduaInterpolant, PaduaSamples};
use crate::points::{data_grid, padua_points_curve, regular_sensor_grid, standard_assignment, DataGrid, Point2};
use crate::rbf::rbf_fit;
use crate::Interpolant;

pub const DEFAULT_MASTER_SEED: u64 = 42;
pub const PRESETS: [&str; 5] = ["fig1b", "fig2a", "fig2b", "fig2c", "fig3"];

/// Stream id reserved for drawing a per-trial polynomial field.
const FIELD_STREAM: u64 = u64::MAX;
/// Stream ids of the standard layout: `orientation * STRIDE + sensor`.
const ORIENTATION_STRIDE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub kind: FieldKind,
    /// Polynomial degree; informational for the fixed fields.
    #[serde(default)]
    pub degree: usize,
    /// Fixed polynomial seed. `None` draws a fresh polynomial every trial.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SensorSpec {
    Padua { order: usize },
    Regular { d: usize, remove_overlaps: bool },
    /// The 9-sensor neighbourhood layout, averaged over its four orientations.
    Standard,
}

impl SensorSpec {
    pub fn kind_str(&self) -> &'static str {
        match self {
            SensorSpec::Padua { .. } => "padua",
            SensorSpec::Regular { .. } => "regular",
            SensorSpec::Standard => "standard",
        }
    }

    /// κ, d, or the number of orientations.
    pub fn param(&self) -> usize {
        match *self {
            SensorSpec::Padua { order } => order,
            SensorSpec::Regular { d, .. } => d,
            SensorSpec::Standard => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PaduaLagrange,
    Rbf,
    Standard,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::PaduaLagrange => "padua-lagrange",
            Method::Rbf => "rbf",
            Method::Standard => "standard",
        }
    }
}

/// Which spread statistic a figure's error bars show.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    StdDev,
    StdErr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label copied into every output row.
    pub preset: String,
    pub field: FieldSpec,
    pub sensors: SensorSpec,
    pub method: Method,
    pub shots: u64,
    /// Feed exact field values to the reconstruction instead of shot estimates.
    #[serde(default)]
    pub noiseless: bool,
    pub trials: usize,
    pub master_seed: u64,
    pub data_grid: GridSpec,
    pub statistic: Statistic,
    #[serde(default)]
    pub rbf_shape: Option<f64>,
    #[serde(default)]
    pub rbf_ridge: Option<f64>,
    #[serde(default)]
    pub note: String,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.shots == 0 {
            return bad("shots must be >= 1".into());
        }
        match (self.method, self.sensors) {
            (Method::PaduaLagrange, SensorSpec::Padua { order }) if order >= 1 => {}
            (Method::PaduaLagrange, _) => return bad("padua-lagrange needs padua sensors of order >= 1".into()),
            (Method::Standard, SensorSpec::Standard) => {
                if self.data_grid != (GridSpec { rows: 5, cols: 5 }) {
                    return bad("the standard method needs a 5×5 data grid".into());
                }
            }
            (Method::Standard, _) | (_, SensorSpec::Standard) => {
                return bad("the standard method and the standard sensor layout go together".into())
            }
            (Method::Rbf, SensorSpec::Regular { d, .. }) if d < 2 => return bad("regular grids need d >= 2".into()),
            (Method::Rbf, _) => {}
        }
        if self.data_grid.rows < 2 || self.data_grid.cols < 2 {
            return bad("data grid must be at least 2×2".into());
        }
        Ok(())
    }

    fn data(&self) -> Result<DataGrid> {
        data_grid(self.data_grid.rows, self.data_grid.cols)
    }

    fn sensor_points(&self, data: &DataGrid) -> Result<Vec<Point2>> {
        match self.sensors {
            SensorSpec::Padua { order } => Ok(padua_points_curve(order)?.points().to_vec()),
            SensorSpec::Regular { d, remove_overlaps } => Ok(regular_sensor_grid(d, data.points(), remove_overlaps)?.points),
            SensorSpec::Standard => Ok(standard_assignment(data, 0)?.sensors().to_vec()),
        }
    }

    pub fn sensor_count(&self) -> Result<usize> {
        Ok(self.sensor_points(&self.data()?)?.len())
    }

    fn field_for_trial(&self, trial: u64) -> Result<Field> {
        let seed = match (self.field.kind, self.field.seed) {
            (FieldKind::Polynomial, None) => stream_rng(self.master_seed, trial, FIELD_STREAM).random::<u64>(),
            (_, s) => s.unwrap_or(0),
        };
        make_field(self.field.kind, self.field.degree, seed)
    }

    /// Sensor readings: exact values when noiseless, shot estimates otherwise.
    fn read_sensors(&self, field: &Field, sensors: &[Point2], trial: u64, stream_base: u64) -> Result<Vec<f64>> {
        sensors
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if self.noiseless {
                    return Ok(field.affine_value(s));
                }
                let mut rng = stream_rng(self.master_seed, trial, stream_base + i as u64);
                Ok(MeasurementRecord::simulate(*s, field.value(s)?, self.shots, &mut rng)?.estimate)
            })
            .collect()
    }
}

/// `max_i |truth_i − estimate_i|`.
pub fn mapping_error(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            got: estimate.len(),
        });
    }
    Ok(truth
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Uniform mapping error of one trial.
pub fn run_trial(config: &ExperimentConfig, trial: u64) -> Result<f64> {
    config.validate()?;
    let data = config.data()?;
    let field = config.field_for_trial(trial)?;
    let truth = eval_field(&field, data.points())?;

    if config.method == Method::Standard {
        let mut total = 0.0;
        for o in 0..4u8 {
            let layout = standard_assignment(&data, o)?;
            let readings = config.read_sensors(&field, layout.sensors(), trial, o as u64 * ORIENTATION_STRIDE)?;
            let owner = layout.owner_of();
            let estimate: Vec<f64> = data
                .points()
                .iter()
                .zip(&owner)
                .map(|(q, own)| {
                    let s = own.unwrap_or_else(|| nearest(layout.sensors(), q));
                    readings[s]
                })
                .collect();
            total += mapping_error(&truth, &estimate)?;
        }
        return Ok(total / 4.0);
    }

    let sensors = config.sensor_points(&data)?;
    let readings = config.read_sensors(&field, &sensors, trial, 0)?;
    let estimate = match config.method {
        Method::PaduaLagrange => {
            let set = padua_points_curve(config.sensors.param())?;
            PaduaInterpolant::fit(&PaduaSamples::new(set, readings)?)?.evaluate(data.points())?
        }
        Method::Rbf => rbf_fit(&sensors, &readings, config.rbf_shape, config.rbf_ridge)?.evaluate(data.points())?,
        Method::Standard => unreachable!(),
    };
    mapping_error(&truth, &estimate)
}

fn nearest(points: &[Point2], q: &Point2) -> usize {
    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        if p.distance(q) < points[best].distance(q) {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Errors of the successful trials, in trial order.
    pub errors: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (`n − 1`).
    pub std_dev: f64,
    pub std_err: f64,
    /// False when fewer than two trials succeeded; the spread is then reported as 0.
    pub spread_defined: bool,
    pub failures: usize,
    pub sensor_count: usize,
    pub wall_ms: u64,
}

/// Runs all trials on the current rayon pool. Results are collected in trial
/// order, so the thread count never changes the output.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let outcomes: Vec<Result<f64>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect();
    let mut errors = Vec::with_capacity(outcomes.len());
    let mut failures = 0;
    let mut first_failure = None;
    for o in outcomes {
        match o {
            Ok(e) => errors.push(e),
            Err(e) => {
                failures += 1;
                first_failure.get_or_insert(e);
            }
        }
    }
    if errors.is_empty() {
        return Err(first_failure.unwrap());
    }
    if failures * 10 > config.trials {
        return Err(Error::TooManyFailures {
            failures,
            trials: config.trials,
        });
    }
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let (std_dev, std_err, spread_defined) = if errors.len() > 1 {
        let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var.sqrt(), var.sqrt() / n.sqrt(), true)
    } else {
        (0.0, 0.0, false)
    };
    Ok(ExperimentResult {
        config: config.clone(),
        errors,
        mean,
        std_dev,
        std_err,
        spread_defined,
        failures,
        sensor_count: config.sensor_count()?,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

fn base(preset: &str, field: FieldSpec, sensors: SensorSpec, method: Method, statistic: Statistic) -> ExperimentConfig {
    ExperimentConfig {
        preset: preset.to_string(),
        field,
        sensors,
        method,
        shots: 50,
        noiseless: false,
        trials: 50,
        master_seed: DEFAULT_MASTER_SEED,
        data_grid: GridSpec { rows: 5, cols: 5 },
        statistic,
        rbf_shape: None,
        rbf_ridge: None,
        note: String::new(),
    }
}

fn regular(d: usize) -> SensorSpec {
    // only the densest grid collides with the 5×5 data-qubits
    SensorSpec::Regular { d, remove_overlaps: d == 9 }
}

fn fixed_field(kind: FieldKind) -> FieldSpec {
    FieldSpec {
        kind,
        degree: usize::from(kind == FieldKind::Linear),
        seed: None,
    }
}

/// Expands a named sweep into its experiment configurations.
pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>> {
    let mut out = Vec::new();
    match name {
        "fig1b" => {
            // regular grid of nearest size to each Padua set
            let matched = [(1, 2), (3, 3), (4, 4), (6, 5)];
            for n in 1..=9 {
                let field = FieldSpec { kind: FieldKind::Polynomial, degree: n, seed: None };
                out.push(base(name, field, SensorSpec::Padua { order: n }, Method::PaduaLagrange, Statistic::StdDev));
                let mut fixed = base(name, field, regular(9), Method::Rbf, Statistic::StdDev);
                if n == 9 {
                    fixed.note = "size-matched to padua order 9".into();
                }
                out.push(fixed);
                if let Some(&(_, d)) = matched.iter().find(|(k, _)| *k == n) {
                    let mut c = base(name, field, regular(d), Method::Rbf, Statistic::StdDev);
                    c.note = format!("size-matched to padua order {n}");
                    out.push(c);
                }
            }
        }
        "fig2a" | "fig2b" | "fig2c" => {
            let kind = match name {
                "fig2a" => FieldKind::Linear,
                "fig2b" => FieldKind::Franke,
                _ => FieldKind::Nonpoly,
            };
            let field = fixed_field(kind);
            for k in [1, 2, 3, 4, 5, 10] {
                out.push(base(name, field, SensorSpec::Padua { order: k }, Method::PaduaLagrange, Statistic::StdErr));
            }
            for d in [2, 3, 4, 6, 9] {
                out.push(base(name, field, regular(d), Method::Rbf, Statistic::StdErr));
            }
            out.push(base(name, field, SensorSpec::Standard, Method::Standard, Statistic::StdErr));
        }
        "fig3" => {
            for kind in [FieldKind::Linear, FieldKind::Nonpoly] {
                for k in [1, 4, 10] {
                    for m in [5, 10, 25, 50, 100, 250, 500, 1000] {
                        let mut c = base(name, fixed_field(kind), SensorSpec::Padua { order: k }, Method::PaduaLagrange, Statistic::StdErr);
                        c.shots = m;
                        out.push(c);
                    }
                }
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown preset '{other}' (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    }
    Ok(out)
}

pub const CSV_COLUMNS: [&str; 14] = [
    "preset",
    "field_kind",
    "field_degree",
    "method",
    "sensor_kind",
    "sensor_param",
    "sensor_count",
    "shots",
    "trials",
    "mean_error_rad",
    "std_dev_rad",
    "std_err_rad",
    "failures",
    "wall_ms",
];

/// One output row, in [`CSV_COLUMNS`] order.
pub fn result_row(r: &ExperimentResult) -> Vec<crate::io::Cell> {
    use crate::io::Cell;
    let c = &r.config;
    vec![
        Cell::Text(c.preset.clone()),
        Cell::Text(c.field.kind.as_str().into()),
        Cell::UInt(c.field.degree as u64),
        Cell::Text(c.method.as_str().into()),
        Cell::Text(c.sensors.kind_str().into()),
        Cell::UInt(c.sensors.param() as u64),
        Cell::UInt(r.sensor_count as u64),
        Cell::UInt(c.shots),
        Cell::UInt(c.trials as u64),
        Cell::Float(r.mean),
        Cell::Float(r.std_dev),
        Cell::Float(r.std_err),
        Cell::UInt(r.failures as u64),
        Cell::UInt(r.wall_ms),
    ]
}
