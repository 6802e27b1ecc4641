//! Task-set files: planning queries bound to a world description.
//!
//! A task set is a JSON document:
//!
//! ```json
//! {
//!   "world_ref": "blocks.json",
//!   "seed": 7,
//!   "tasks": [
//!     { "start": [1.0, 1.0], "goals": [[18.0, 18.0]] }
//!   ]
//! }
//! ```
//!
//! `world_ref` is resolved relative to the task file first and the current
//! directory second, so task sets can live next to their maps or reference
//! them by absolute path.

use layerplan::space::World;
use layerplan::{Error, Result};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// One planning query: a start configuration and one or more goals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Task {
    pub start: Vec<f64>,
    pub goals: Vec<Vec<f64>>,
}

/// A list of tasks generated for (and validated against) one world file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskSet {
    /// Path of the world these tasks were sampled in.
    pub world_ref: String,
    /// Seed the tasks were generated from.
    pub seed: u64,
    pub tasks: Vec<Task>,
}

impl TaskSet {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let set: TaskSet = serde_json::from_str(&text)?;
        if set.tasks.is_empty() {
            return Err(Error::InvalidParameter("task set holds no tasks".into()));
        }
        Ok(set)
    }

    pub fn to_json_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    /// Locate the referenced world: relative paths are tried next to the
    /// task file first, then against the current directory.
    pub fn resolve_world_ref(&self, task_file: &Path) -> PathBuf {
        let referenced = Path::new(&self.world_ref);
        if referenced.is_absolute() {
            return referenced.to_path_buf();
        }
        let sibling =
            task_file.parent().unwrap_or_else(|| Path::new(".")).join(referenced);
        if sibling.exists() {
            sibling
        } else {
            referenced.to_path_buf()
        }
    }

    /// Every start and every goal must be collision-free in `world`.
    pub fn validate(&self, world: &World) -> Result<()> {
        for (i, task) in self.tasks.iter().enumerate() {
            if task.goals.is_empty() {
                return Err(Error::InvalidParameter(format!("task {i} lists no goals")));
            }
            if world.collision_cost(&task.start)? > 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "task {i}: start {:?} is in collision",
                    task.start
                )));
            }
            for (k, goal) in task.goals.iter().enumerate() {
                if world.collision_cost(goal)? > 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "task {i}: goal {k} {goal:?} is in collision"
                    )));
                }
            }
        }
        Ok(())
    }
}

const SAMPLE_ATTEMPTS: usize = 100_000;

/// Rejection-sample `count` tasks whose starts and goals are collision-free
/// and separated by at least a quarter of the workspace diagonal.
pub fn generate_tasks(
    world: &World,
    world_ref: &str,
    count: usize,
    goals_per_task: usize,
    seed: u64,
) -> Result<TaskSet> {
    if count == 0 {
        return Err(Error::InvalidParameter("task count must be >= 1".into()));
    }
    if goals_per_task == 0 {
        return Err(Error::InvalidParameter("goals per task must be >= 1".into()));
    }
    let limits = world.limits();
    let d = limits.dim();
    let min_separation = 0.25 * limits.diagonal();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let free_point = |rng: &mut ChaCha8Rng| -> Result<Vec<f64>> {
        for _ in 0..SAMPLE_ATTEMPTS {
            let q: Vec<f64> = (0..d)
                .map(|i| rng.random_range(limits.lower()[i]..limits.upper()[i]))
                .collect();
            if world.collision_cost(&q)? == 0.0 {
                return Ok(q);
            }
        }
        Err(Error::InvalidParameter(
            "could not sample a collision-free point; the world has almost no free space".into(),
        ))
    };

    let mut tasks = Vec::with_capacity(count);
    for t in 0..count {
        let start = free_point(&mut rng)?;
        let mut goals = Vec::with_capacity(goals_per_task);
        let mut attempts = 0usize;
        while goals.len() < goals_per_task {
            let goal = free_point(&mut rng)?;
            let separation: f64 = start
                .iter()
                .zip(&goal)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if separation >= min_separation {
                goals.push(goal);
            }
            attempts += 1;
            if attempts > SAMPLE_ATTEMPTS {
                return Err(Error::InvalidParameter(format!(
                    "task {t}: no free goal at least {min_separation:.3} away from the start"
                )));
            }
        }
        tasks.push(Task { start, goals });
    }
    Ok(TaskSet { world_ref: world_ref.to_string(), seed, tasks })
}
