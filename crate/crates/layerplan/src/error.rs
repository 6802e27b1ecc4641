use thiserror::Error;

/// Errors shared across the crate.
#[derive(Error, Debug)]
pub enum Error {
    /// A point or tensor did not match the dimension of the space it is used in.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A structurally invalid argument (counts, bounds, shapes).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The start configuration collides with the world.
    #[error("start configuration is in collision")]
    StartInCollision,

    /// Every goal configuration collides with the world.
    #[error("all goal configurations are in collision")]
    GoalsInCollision,

    /// A spline was evaluated outside its knot interval.
    #[error("parameter {t} outside knot interval [{t0}, {t1}]")]
    OutsideKnotInterval { t: f64, t0: f64, t1: f64 },

    /// The Sinkhorn iteration did not reach the marginal tolerance.
    #[error("sinkhorn did not converge: residual {residual:.3e} after {iterations} iterations")]
    SinkhornDiverged { residual: f64, iterations: usize },

    /// A path had too few non-degenerate segments for a direction statistic.
    #[error("path has fewer than two nonzero-length segments")]
    DegeneratePath,

    #[error("malformed PGM image: {0}")]
    PgmFormat(String),

    #[error("malformed world description: {0}")]
    WorldFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
