use thiserror::Error;

/// Errors produced by the planning and optimization pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A query point or parameter lies outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Geometrically degenerate input (coincident points, zero vectors).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Potential field vanished at the query point.
    #[error("degenerate potential field at {0:?}")]
    DegenerateField([f64; 3]),

    #[error("singular density: mean obstacle density is {0}")]
    SingularDensity(f64),

    /// Monte-Carlo estimation could not place a single sample in the region.
    #[error("density estimation failed: {0}")]
    Estimation(String),

    /// Start or goal violates the planner preconditions.
    #[error("infeasible input: {0}")]
    InfeasibleInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("ill-posed constraint system: {0}")]
    IllPosed(String),

    /// The conic program has no feasible point.
    #[error("infeasible problem ({class}): {detail}")]
    Infeasible { class: String, detail: String },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("environment generation failed: {0}")]
    Generation(String),

    #[error("penalization undefined: {0}")]
    Penalization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
