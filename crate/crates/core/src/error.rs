use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    #[error("gram matrix is not symmetric positive definite: {0}")]
    InvalidGram(String),

    #[error("not an isometry of the frame: {0}")]
    NotAnIsometry(String),

    #[error("invalid crystallographic group:\n{0}")]
    InvalidGroup(crate::group::ValidationReport),

    #[error("unknown preset group {0:?}")]
    UnknownPreset(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zero normal in half-space")]
    ZeroNormal,

    #[error("degenerate polytope: {0}")]
    DegeneratePolytope(String),

    #[error("polytope interiors overlap")]
    OverlappingInteriors,

    #[error("point has a nontrivial stabilizer ({0} elements)")]
    NontrivialStabilizer(usize),

    #[error("point is not a site of the point set")]
    NotASite,

    #[error("Voronoi cell is unbounded")]
    UnboundedCell,

    #[error("invalid tiling: {0}")]
    InvalidTiling(String),

    #[error("genericity certificate rejected: {0}")]
    NotGeneric(String),

    #[error("witness verification failed: {0}")]
    WitnessFailed(String),

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
