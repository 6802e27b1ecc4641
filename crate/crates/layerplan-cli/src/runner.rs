//! Batch runs over task sets and layer/waypoint sweeps, with CSV and JSON
//! emission.
//!
//! Rows are produced in deterministic task order (the per-batch edge scoring
//! inside the planner is already data-parallel). All row fields except
//! `plan_time_ms` are reproducible bit for bit given identical inputs, and
//! the timing sits in the last CSV column so it can be stripped for
//! comparisons.

use crate::tasks::Task;
use layerplan::akima::plan_akima;
use layerplan::graph::{GoalSet, PlannerParams};
use layerplan::metrics;
use layerplan::planner::{plan, PlanResult};
use layerplan::space::World;
use layerplan::{Error, Result};
use ndarray::Array2;
use serde::Serialize;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

/// Which edge geometry the planner uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlannerKind {
    /// Straight segments between consecutive waypoints.
    Straight,
    /// C^1 cubic spline edges with layer-shared knot slopes.
    Akima,
}

impl PlannerKind {
    pub fn label(self) -> &'static str {
        match self {
            PlannerKind::Straight => "straight",
            PlannerKind::Akima => "akima",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "straight" => Ok(PlannerKind::Straight),
            "akima" => Ok(PlannerKind::Akima),
            other => Err(format!("unknown planner '{other}' (expected straight|akima)")),
        }
    }
}

/// Metric settings shared by every run.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub planner: PlannerKind,
    /// Entropic regularization of the diversity metric.
    pub lambda: f64,
    /// Dense samples per spline edge when measuring smoothness.
    pub samples_per_edge: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            planner: PlannerKind::Straight,
            lambda: metrics::DEFAULT_LAMBDA,
            samples_per_edge: 20,
        }
    }
}

/// One output row of metrics for a planned batch.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsRow {
    pub task_id: usize,
    pub planner: String,
    #[serde(rename = "M")]
    pub layers: usize,
    #[serde(rename = "N")]
    pub waypoints: usize,
    #[serde(rename = "H")]
    pub probes: usize,
    #[serde(rename = "B")]
    pub batch: usize,
    pub rep: usize,
    pub seed: u64,
    /// Percentage of batch entries that found a collision-free path.
    pub cf_percent: f64,
    /// Mean over feasible entries of the worst-turn cosine similarity;
    /// NaN when no feasible entry yields a value.
    pub min_cosim_mean: f64,
    /// Mean pairwise transport distance over the feasible entries; NaN when
    /// fewer than two entries are feasible or when the transport iteration
    /// reports non-convergence at the requested regularization.
    pub pd: f64,
    /// Wall-clock planning time. Excluded from reproducibility guarantees.
    pub plan_time_ms: f64,
}

/// Fixed, versioned CSV schema; bump when columns change.
pub const CSV_SCHEMA_VERSION: &str = "layerplan-csv v1";
const CSV_COLUMNS: &str =
    "task_id,planner,M,N,H,B,rep,seed,cf_percent,min_cosim_mean,pd,plan_time_ms";

/// Write rows as CSV with a version header comment.
pub fn write_csv(rows: &[MetricsRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "# {CSV_SCHEMA_VERSION}")?;
    writeln!(out, "{CSV_COLUMNS}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.task_id,
            r.planner,
            r.layers,
            r.waypoints,
            r.probes,
            r.batch,
            r.rep,
            r.seed,
            r.cf_percent,
            r.min_cosim_mean,
            r.pd,
            r.plan_time_ms
        )?;
    }
    Ok(())
}

pub fn rows_to_csv_string(rows: &[MetricsRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV rows are ASCII")
}

pub fn rows_to_json_string(rows: &[MetricsRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize infallibly") + "\n"
}

/// Everything produced by planning one task once.
#[derive(Debug, Clone)]
pub struct TaskOutcome {
    pub row: MetricsRow,
    pub result: PlanResult,
}

fn goal_set(task: &Task) -> Result<GoalSet> {
    let g = task.goals.len();
    let d = task.start.len();
    let mut flat = Vec::with_capacity(g * d);
    for goal in &task.goals {
        if goal.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: goal.len() });
        }
        flat.extend_from_slice(goal);
    }
    let points = Array2::from_shape_vec((g, d), flat)
        .map_err(|e| Error::InvalidParameter(format!("goal matrix: {e}")))?;
    GoalSet::from_points(points)
}

/// Plan one task and reduce the batch to a metrics row.
///
/// Timing covers the planning call only (sampling through tracing);
/// world loading and metric computation are excluded. Smoothness is
/// measured on densely sampled spline points for the spline planner and on
/// the traced polyline otherwise; diversity always compares the traced
/// waypoint polylines so both planners are scored on the same support.
pub fn run_task(
    world: &World,
    task: &Task,
    task_id: usize,
    rep: usize,
    params: &PlannerParams,
    cfg: &RunConfig,
) -> Result<TaskOutcome> {
    let goals = goal_set(task)?;

    let started = Instant::now();
    let result = match cfg.planner {
        PlannerKind::Straight => plan(world, &task.start, &goals, params)?,
        PlannerKind::Akima => plan_akima(world, &task.start, &goals, params)?,
    };
    let plan_time_ms = started.elapsed().as_secs_f64() * 1e3;

    let feasible: Vec<usize> =
        (0..params.batch).filter(|&b| result.feasible[b]).collect();
    let cf_percent = 100.0 * feasible.len() as f64 / params.batch as f64;

    let mut cosims = Vec::with_capacity(feasible.len());
    for &b in &feasible {
        let points = match (&cfg.planner, &result.splines) {
            (PlannerKind::Akima, Some(splines)) => splines[b].sample(cfg.samples_per_edge),
            _ => result.paths[b].clone(),
        };
        match metrics::min_cosine_similarity(&points) {
            Ok(v) => cosims.push(v),
            // A path whose segments all collapse has no turn to measure.
            Err(Error::DegeneratePath) => {}
            Err(e) => return Err(e),
        }
    }
    let min_cosim_mean = if cosims.is_empty() {
        f64::NAN
    } else {
        cosims.iter().sum::<f64>() / cosims.len() as f64
    };

    let pd = if feasible.len() >= 2 {
        let polylines: Vec<Array2<f64>> =
            feasible.iter().map(|&b| result.paths[b].clone()).collect();
        match metrics::path_diversity(&polylines, cfg.lambda) {
            Ok(v) => v,
            // At small lambda relative to the raw coordinate scale the
            // transport problem can have degenerate ties whose marginals
            // converge only sublinearly; the batch's diversity is then
            // reported as NaN instead of failing the whole run.
            Err(Error::SinkhornDiverged { .. }) => f64::NAN,
            Err(e) => return Err(e),
        }
    } else {
        f64::NAN
    };

    let row = MetricsRow {
        task_id,
        planner: cfg.planner.label().to_string(),
        layers: params.layers,
        waypoints: params.waypoints,
        probes: params.probes,
        batch: params.batch,
        rep,
        seed: params.seed,
        cf_percent,
        min_cosim_mean,
        pd,
        plan_time_ms,
    };
    Ok(TaskOutcome { row, result })
}

/// A grid of layer/waypoint counts to sweep over one task.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub m_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub probes: usize,
    pub batch: usize,
    pub repetitions: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m_values.is_empty() || self.n_values.is_empty() {
            return Err(Error::InvalidParameter(
                "sweep needs at least one M value and one N value".into(),
            ));
        }
        if self.m_values.iter().chain(&self.n_values).any(|&v| v < 1) {
            return Err(Error::InvalidParameter("sweep values must be >= 1".into()));
        }
        if self.repetitions < 1 {
            return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
        }
        if self.probes < 2 {
            return Err(Error::InvalidParameter("probes per edge must be >= 2".into()));
        }
        if self.batch < 1 {
            return Err(Error::InvalidParameter("batch size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Replan one task over every (M, N, repetition) cell.
///
/// Produces exactly `|M| * |N| * repetitions` rows in deterministic order
/// (M outer, N inner, repetition innermost); repetition `r` plans with
/// `base_seed + r` so repeated cells draw fresh waypoints.
pub fn run_sweep(
    world: &World,
    task: &Task,
    task_id: usize,
    spec: &SweepSpec,
    base_seed: u64,
    cfg: &RunConfig,
) -> Result<Vec<MetricsRow>> {
    spec.validate()?;
    let mut rows =
        Vec::with_capacity(spec.m_values.len() * spec.n_values.len() * spec.repetitions);
    for &m in &spec.m_values {
        for &n in &spec.n_values {
            for rep in 0..spec.repetitions {
                let params = PlannerParams::new(
                    m,
                    n,
                    spec.probes,
                    spec.batch,
                    base_seed.wrapping_add(rep as u64),
                );
                rows.push(run_task(world, task, task_id, rep, &params, cfg)?.row);
            }
        }
    }
    Ok(rows)
}
