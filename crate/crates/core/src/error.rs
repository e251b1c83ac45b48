use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample in {context} at index {index}")]
    NonFinite { context: &'static str, index: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid admissible pair: {0}")]
    InvalidPair(String),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("trajectory is not uniform in time: {0}")]
    NonUniformTrajectory(String),

    #[error("spectral blocking at t = {time}: {fraction:.3e} of the mass sits in the top third of modes")]
    SpectralBlocking { time: f64, fraction: f64 },

    #[error("boundary leak at t = {time}: {fraction:.3e} of the mass lies within box_length/8 of the boundary")]
    BoundaryLeak { time: f64, fraction: f64 },

    #[error("non-finite nonlinear phase at step {step}")]
    PhaseOverflow { step: usize },

    #[error("scaling parameter could not be calibrated: {0}")]
    NotCalibratable(String),

    #[error("weight construction failed: {0}")]
    WeightConstruction(String),

    #[error("weight has a point mass in its bilaplacian; use the interaction machinery")]
    PointMassWeight,

    #[error("weight kernel is not resolvable on the grid: {0}")]
    UnresolvableKernel(String),

    #[error("unsorted shells: expected N1 >= N2 >= N3")]
    UnsortedShells,

    #[error("degenerate frequency sample: {0}")]
    DegenerateSample(String),

    #[error("malformed snapshot: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
