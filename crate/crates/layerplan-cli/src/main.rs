//! Command-line harness: plan task sets, sweep graph sizes, generate tasks,
//! and render SVG overlays.
//!
//! Exit codes: 0 on success, 1 when planning succeeded but produced zero
//! feasible paths across all tasks, 2 on any input or usage error.

use clap::{Args, Parser, Subcommand};
use layerplan::graph::PlannerParams;
use layerplan::planner::PlanResult;
use layerplan::space::World;
use layerplan_cli::{
    generate_tasks, render_svg, rows_to_csv_string, rows_to_json_string, run_sweep, run_task,
    MetricsRow, PlannerKind, RenderOptions, RunConfig, SweepSpec, TaskSet,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "layerplan",
    version,
    about = "Batch motion planning on layered random graphs: runs, sweeps, renders"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Plan every task of a task set and write metrics plus result files.
    Plan(PlanArgs),
    /// Replan one task over a grid of layer/waypoint counts.
    Sweep(SweepArgs),
    /// Draw a world, optionally overlaying a saved planning result, as SVG.
    Render(RenderArgs),
    /// Sample a random task set for a world.
    GenTasks(GenTasksArgs),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv|json)")),
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    /// World description JSON; defaults to the task file's world_ref.
    #[arg(long)]
    world: Option<PathBuf>,
    /// Task set JSON (see `gen-tasks`).
    #[arg(long)]
    tasks: PathBuf,
    /// Waypoint layers (M).
    #[arg(long = "M", default_value_t = 3)]
    layers: usize,
    /// Waypoints per layer (N).
    #[arg(long = "N", default_value_t = 32)]
    waypoints: usize,
    /// Collision probes per edge (H).
    #[arg(long = "H", default_value_t = 10)]
    probes: usize,
    /// Paths planned per task (B).
    #[arg(long = "B", default_value_t = 8)]
    batch: usize,
    /// RNG seed used for every task's batch.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge geometry: straight | akima.
    #[arg(long, default_value = "straight")]
    planner: PlannerKind,
    /// Entropic regularization of the diversity metric.
    #[arg(long, default_value_t = layerplan::metrics::DEFAULT_LAMBDA)]
    lambda: f64,
    /// Override the world's collision margin.
    #[arg(long)]
    margin: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Metrics file format: csv | json.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct SweepArgs {
    /// World description JSON; defaults to the task file's world_ref.
    #[arg(long)]
    world: Option<PathBuf>,
    /// Task set JSON; the sweep replans a single task from it.
    #[arg(long)]
    tasks: PathBuf,
    /// Index of the task to sweep.
    #[arg(long, default_value_t = 0)]
    task: usize,
    /// Comma-separated layer counts (M).
    #[arg(long = "M", value_delimiter = ',', default_value = "2,3,5")]
    layers: Vec<usize>,
    /// Comma-separated waypoint counts (N).
    #[arg(long = "N", value_delimiter = ',', default_value = "10,32,100")]
    waypoints: Vec<usize>,
    /// Collision probes per edge (H).
    #[arg(long = "H", default_value_t = 10)]
    probes: usize,
    /// Paths planned per cell (B).
    #[arg(long = "B", default_value_t = 8)]
    batch: usize,
    /// Repetitions per cell; repetition r plans with seed + r.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Base RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge geometry: straight | akima.
    #[arg(long, default_value = "straight")]
    planner: PlannerKind,
    /// Entropic regularization of the diversity metric.
    #[arg(long, default_value_t = layerplan::metrics::DEFAULT_LAMBDA)]
    lambda: f64,
    /// Override the world's collision margin.
    #[arg(long)]
    margin: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Metrics file format: csv | json.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct RenderArgs {
    /// World description JSON.
    #[arg(long)]
    world: PathBuf,
    /// Planning result JSON produced by `plan`; omit to draw the world only.
    #[arg(long)]
    result: Option<PathBuf>,
    /// Override the world's collision margin.
    #[arg(long)]
    margin: Option<f64>,
    /// Dense samples per spline edge.
    #[arg(long, default_value_t = 20)]
    samples_per_edge: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct GenTasksArgs {
    /// World description JSON the tasks are sampled in.
    #[arg(long)]
    world: PathBuf,
    /// Number of tasks.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Goals per task.
    #[arg(long, default_value_t = 1)]
    goals: usize,
    /// RNG seed for task sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the world's collision margin.
    #[arg(long)]
    margin: Option<f64>,
    /// Output directory (receives tasks.json).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Plan(args) => cmd_plan(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Render(args) => cmd_render(args),
        Cmd::GenTasks(args) => cmd_gen_tasks(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_world_for_tasks(
    world_flag: &Option<PathBuf>,
    tasks_path: &Path,
    task_set: &TaskSet,
    margin: Option<f64>,
) -> layerplan::Result<World> {
    let world_path = match world_flag {
        Some(p) => p.clone(),
        None => task_set.resolve_world_ref(tasks_path),
    };
    World::from_json_file(world_path, margin)
}

fn write_rows(
    rows: &[MetricsRow],
    format: OutputFormat,
    out_dir: &Path,
    stem: &str,
) -> std::io::Result<PathBuf> {
    let (name, text) = match format {
        OutputFormat::Csv => (format!("{stem}.csv"), rows_to_csv_string(rows)),
        OutputFormat::Json => (format!("{stem}.json"), rows_to_json_string(rows)),
    };
    let path = out_dir.join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}

fn exit_by_feasibility(rows: &[MetricsRow]) -> ExitCode {
    if rows.iter().any(|r| r.cf_percent > 0.0) {
        ExitCode::SUCCESS
    } else {
        eprintln!("no feasible path found for any task");
        ExitCode::from(1)
    }
}

fn cmd_plan(args: PlanArgs) -> layerplan::Result<ExitCode> {
    let task_set = TaskSet::from_json_file(&args.tasks)?;
    let world = load_world_for_tasks(&args.world, &args.tasks, &task_set, args.margin)?;
    task_set.validate(&world)?;
    std::fs::create_dir_all(&args.out)?;

    let cfg = RunConfig { planner: args.planner, lambda: args.lambda, ..RunConfig::default() };
    let params = PlannerParams::new(args.layers, args.waypoints, args.probes, args.batch, args.seed);
    let mut rows = Vec::with_capacity(task_set.tasks.len());
    for (task_id, task) in task_set.tasks.iter().enumerate() {
        let outcome = run_task(&world, task, task_id, 0, &params, &cfg)?;
        let result_file =
            args.out.join(format!("plan_task{task_id}_{}.json", args.planner.label()));
        std::fs::write(&result_file, outcome.result.to_json_string())?;
        rows.push(outcome.row);
    }

    let metrics_file = write_rows(&rows, args.format, &args.out, "results")?;
    let mean_cf = rows.iter().map(|r| r.cf_percent).sum::<f64>() / rows.len() as f64;
    println!(
        "planned {} tasks ({} batch entries each), mean CF {mean_cf:.1}%",
        rows.len(),
        args.batch
    );
    println!("wrote {}", metrics_file.display());
    Ok(exit_by_feasibility(&rows))
}

fn cmd_sweep(args: SweepArgs) -> layerplan::Result<ExitCode> {
    let task_set = TaskSet::from_json_file(&args.tasks)?;
    let world = load_world_for_tasks(&args.world, &args.tasks, &task_set, args.margin)?;
    task_set.validate(&world)?;
    let task = task_set.tasks.get(args.task).ok_or_else(|| {
        layerplan::Error::InvalidParameter(format!(
            "task index {} out of range ({} tasks)",
            args.task,
            task_set.tasks.len()
        ))
    })?;
    std::fs::create_dir_all(&args.out)?;

    let cfg = RunConfig { planner: args.planner, lambda: args.lambda, ..RunConfig::default() };
    let spec = SweepSpec {
        m_values: args.layers.clone(),
        n_values: args.waypoints.clone(),
        probes: args.probes,
        batch: args.batch,
        repetitions: args.reps,
    };
    let rows = run_sweep(&world, task, args.task, &spec, args.seed, &cfg)?;

    let metrics_file = write_rows(&rows, args.format, &args.out, "sweep")?;
    println!(
        "swept {} cells x {} repetitions over task {}",
        spec.m_values.len() * spec.n_values.len(),
        spec.repetitions,
        args.task
    );
    println!("wrote {}", metrics_file.display());
    Ok(exit_by_feasibility(&rows))
}

fn cmd_render(args: RenderArgs) -> layerplan::Result<ExitCode> {
    let world = World::from_json_file(&args.world, args.margin)?;
    let result = match &args.result {
        Some(path) => Some(PlanResult::from_json_str(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    let opts =
        RenderOptions { samples_per_edge: args.samples_per_edge, ..RenderOptions::default() };
    let svg = render_svg(&world, result.as_ref(), &opts)?;

    std::fs::create_dir_all(&args.out)?;
    let stem = args
        .result
        .as_deref()
        .and_then(Path::file_stem)
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "world".to_string());
    let path = args.out.join(format!("{stem}.svg"));
    std::fs::write(&path, svg)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen_tasks(args: GenTasksArgs) -> layerplan::Result<ExitCode> {
    let world = World::from_json_file(&args.world, args.margin)?;
    let set = generate_tasks(
        &world,
        &args.world.to_string_lossy(),
        args.count,
        args.goals,
        args.seed,
    )?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("tasks.json");
    set.to_json_file(&path)?;
    println!("wrote {} ({} tasks)", path.display(), set.tasks.len());
    Ok(ExitCode::SUCCESS)
}
