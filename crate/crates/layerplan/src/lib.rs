//! Batch sampling-based motion planning on layered random graphs.
//!
//! The planner draws a fixed tensor of random waypoints arranged in layers,
//! connects consecutive layers all-to-all, scores every edge by probing a
//! collision world, and extracts shortest start-to-goal paths for a whole
//! batch with a small number of value-iteration sweeps. A spline variant
//! replaces straight edges with C^1 cubic segments whose knot slopes are
//! shared per layer, so any traced path is smooth by construction.

pub mod akima;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod planner;
pub mod space;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
