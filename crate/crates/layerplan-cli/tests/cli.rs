//! End-to-end tests of the `layerplan` binary: pipeline behavior, output
//! files, reproducibility, and exit codes.

use layerplan_cli::{Task, TaskSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_layerplan"))
}

fn maps_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../maps").canonicalize().unwrap()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("binary should not be killed by a signal")
}

/// Writes a single-task set, pointing at `world` by absolute path.
fn write_task_set(dir: &Path, world: &Path, start: [f64; 2], goal: [f64; 2]) -> PathBuf {
    let set = TaskSet {
        world_ref: world.to_string_lossy().into_owned(),
        seed: 0,
        tasks: vec![Task { start: start.to_vec(), goals: vec![goal.to_vec()] }],
    };
    let path = dir.join("tasks.json");
    set.to_json_file(&path).unwrap();
    path
}

/// Drops the final comma-separated field (the timing column) of every row.
fn strip_timing(csv: &str) -> String {
    csv.lines()
        .map(|line| match line.rfind(',') {
            Some(cut) => &line[..cut],
            None => line,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(2) // version comment + column header
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn gen_tasks_then_plan_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let world = maps_dir().join("blocks.json");

    let gen = run(&[
        "gen-tasks",
        "--world",
        world.to_str().unwrap(),
        "--count",
        "3",
        "--goals",
        "2",
        "--seed",
        "7",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&gen), 0, "gen-tasks failed: {}", String::from_utf8_lossy(&gen.stderr));
    let tasks_path = tmp.path().join("tasks.json");
    let set = TaskSet::from_json_file(&tasks_path).unwrap();
    assert_eq!(set.tasks.len(), 3);
    assert!(set.tasks.iter().all(|t| t.goals.len() == 2));

    let out_dir = tmp.path().join("run");
    let plan = run(&[
        "plan",
        "--tasks",
        tasks_path.to_str().unwrap(),
        "--M",
        "3",
        "--N",
        "16",
        "--B",
        "4",
        "--seed",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&plan), 0, "plan failed: {}", String::from_utf8_lossy(&plan.stderr));

    for task_id in 0..3 {
        assert!(out_dir.join(format!("plan_task{task_id}_straight.json")).exists());
    }
    let csv = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert!(csv.starts_with("# layerplan-csv v1\n"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 3);
    // Every task planned with the same requested geometry and seed.
    for (task_id, row) in rows.iter().enumerate() {
        assert_eq!(row[0], task_id.to_string());
        assert_eq!(&row[1..8], ["straight", "3", "16", "10", "4", "0", "1"]);
    }
}

#[test]
fn plan_outputs_are_reproducible_apart_from_timing() {
    let tmp = tempfile::tempdir().unwrap();
    let world = maps_dir().join("blocks.json");
    let tasks = write_task_set(tmp.path(), &world, [1.0, 1.0], [19.0, 19.0]);

    let out = |dir: &str| {
        let out_dir = tmp.path().join(dir);
        let res = run(&[
            "plan",
            "--tasks",
            tasks.to_str().unwrap(),
            "--M",
            "3",
            "--N",
            "24",
            "--B",
            "6",
            "--seed",
            "42",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&res), 0, "plan failed: {}", String::from_utf8_lossy(&res.stderr));
        out_dir
    };
    let first = out("a");
    let second = out("b");

    let csv_a = std::fs::read_to_string(first.join("results.csv")).unwrap();
    let csv_b = std::fs::read_to_string(second.join("results.csv")).unwrap();
    assert_ne!(csv_a, csv_b, "timing column should differ between runs");
    assert_eq!(strip_timing(&csv_a), strip_timing(&csv_b));

    let result_a = std::fs::read(first.join("plan_task0_straight.json")).unwrap();
    let result_b = std::fs::read(second.join("plan_task0_straight.json")).unwrap();
    assert_eq!(result_a, result_b, "planning result files should be byte-identical");
}

#[test]
fn json_format_writes_parseable_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let world = maps_dir().join("blocks.json");
    let tasks = write_task_set(tmp.path(), &world, [1.0, 1.0], [19.0, 19.0]);

    let res = run(&[
        "plan",
        "--tasks",
        tasks.to_str().unwrap(),
        "--N",
        "16",
        "--B",
        "4",
        "--format",
        "json",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 0);
    let text = std::fs::read_to_string(tmp.path().join("results.json")).unwrap();
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["task_id"], 0);
    assert_eq!(rows[0]["planner"], "straight");
    assert_eq!(rows[0]["N"], 16);
}

#[test]
fn all_infeasible_tasks_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let world = maps_dir().join("u_corridor.json");
    // Start sits inside the U pocket; with only two layers no straight
    // polyline threads the corridor, so every batch entry is infeasible.
    let tasks = write_task_set(tmp.path(), &world, [50.5, 35.5], [50.5, 8.5]);

    let res = run(&[
        "plan",
        "--tasks",
        tasks.to_str().unwrap(),
        "--M",
        "2",
        "--N",
        "32",
        "--H",
        "30",
        "--B",
        "8",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 1);
    assert!(String::from_utf8_lossy(&res.stderr).contains("no feasible path"));

    // Three layers make the same task solvable.
    let res = run(&[
        "plan",
        "--tasks",
        tasks.to_str().unwrap(),
        "--M",
        "3",
        "--N",
        "100",
        "--H",
        "30",
        "--B",
        "8",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 0);
}

#[test]
fn input_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();

    // Unreadable world file.
    let missing = tmp.path().join("no_such_world.json");
    let res = run(&["render", "--world", missing.to_str().unwrap()]);
    assert_eq!(exit_code(&res), 2);
    assert!(String::from_utf8_lossy(&res.stderr).starts_with("error:"));

    // Task endpoint inside an obstacle fails validation.
    let world = maps_dir().join("blocks.json");
    let tasks = write_task_set(tmp.path(), &world, [10.0, 10.0], [19.0, 19.0]);
    let res = run(&[
        "plan",
        "--tasks",
        tasks.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 2);

    // Unknown metrics format is a usage error.
    let tasks = write_task_set(tmp.path(), &world, [1.0, 1.0], [19.0, 19.0]);
    let res = run(&[
        "plan",
        "--tasks",
        tasks.to_str().unwrap(),
        "--format",
        "yaml",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 2);
}

#[test]
fn render_writes_svg_for_world_and_result() {
    let tmp = tempfile::tempdir().unwrap();
    let world = maps_dir().join("blocks.json");
    let tasks = write_task_set(tmp.path(), &world, [1.0, 1.0], [1.0, 19.0]);

    let res = run(&[
        "plan",
        "--tasks",
        tasks.to_str().unwrap(),
        "--planner",
        "akima",
        "--N",
        "16",
        "--B",
        "4",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 0, "plan failed: {}", String::from_utf8_lossy(&res.stderr));
    let result = tmp.path().join("plan_task0_akima.json");

    let res = run(&[
        "render",
        "--world",
        world.to_str().unwrap(),
        "--result",
        result.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 0, "render failed: {}", String::from_utf8_lossy(&res.stderr));
    let svg = std::fs::read_to_string(tmp.path().join("plan_task0_akima.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("<polyline"), "feasible paths should be drawn");
    assert!(svg.contains("#d62728"), "start marker missing");
    assert!(svg.contains("#2ca02c"), "goal marker missing");

    // World-only render falls back to the world stem and draws no paths.
    let res = run(&[
        "render",
        "--world",
        world.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 0);
    let svg = std::fs::read_to_string(tmp.path().join("world.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(!svg.contains("<polyline"));
}

#[test]
fn sweep_emits_grid_in_deterministic_order() {
    let tmp = tempfile::tempdir().unwrap();
    let world = maps_dir().join("blocks.json");
    let tasks = write_task_set(tmp.path(), &world, [1.0, 1.0], [19.0, 19.0]);

    let res = run(&[
        "sweep",
        "--tasks",
        tasks.to_str().unwrap(),
        "--M",
        "2,3",
        "--N",
        "4,6",
        "--reps",
        "2",
        "--seed",
        "5",
        "--B",
        "4",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 0, "sweep failed: {}", String::from_utf8_lossy(&res.stderr));

    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 8, "2 M x 2 N x 2 reps");
    let cells: Vec<(String, String, String, String)> = rows
        .iter()
        .map(|r| (r[2].clone(), r[3].clone(), r[6].clone(), r[7].clone()))
        .collect();
    let expected: Vec<(String, String, String, String)> = [
        ("2", "4", "0", "5"),
        ("2", "4", "1", "6"),
        ("2", "6", "0", "5"),
        ("2", "6", "1", "6"),
        ("3", "4", "0", "5"),
        ("3", "4", "1", "6"),
        ("3", "6", "0", "5"),
        ("3", "6", "1", "6"),
    ]
    .iter()
    .map(|(m, n, rep, seed)| (m.to_string(), n.to_string(), rep.to_string(), seed.to_string()))
    .collect();
    assert_eq!(cells, expected, "rows must iterate M outer, N inner, repetition innermost");
}
