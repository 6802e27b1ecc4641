//! Benchmark harness for the layered-graph batch planner: task-set
//! generation, metric runs, layer/waypoint sweeps, and SVG overlays.

pub mod render;
pub mod runner;
pub mod tasks;

pub use render::{render_svg, PixelMap, RenderOptions};
pub use runner::{
    rows_to_csv_string, rows_to_json_string, run_sweep, run_task, write_csv, MetricsRow,
    PlannerKind, RunConfig, SweepSpec, TaskOutcome, CSV_SCHEMA_VERSION,
};
pub use tasks::{generate_tasks, Task, TaskSet};
