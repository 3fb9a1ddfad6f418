use thiserror::Error;

/// Errors produced by the laboratory. Every module reports through this one
/// enum so that the CLI and the C ABI can map failures to stable codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mesh parameters: {0}")]
    InvalidMesh(String),

    #[error("map has {got} values but the mesh has {expected} vertices")]
    VertexCountMismatch { expected: usize, got: usize },

    #[error("map belongs to a different mesh")]
    MeshMismatch,

    #[error("non-finite value at vertex {0}")]
    NonFinite(usize),

    #[error("boundary samples are not injective (samples {0} and {1} coincide)")]
    NotInjective(usize, usize),

    #[error("boundary map has winding number {0}, expected +1")]
    Orientation(i64),

    #[error("sample {0} lies off the target polygon")]
    OffPolygon(usize),

    #[error("evaluation point {0} is too close to the boundary")]
    NearBoundary(usize),

    #[error("point outside the domain of `{map}`: {detail}")]
    Domain { map: String, detail: String },

    #[error("unknown gallery map `{0}`")]
    UnknownGallery(String),

    #[error("ball around the target point meets the boundary trace")]
    BoundaryAdjacent,

    #[error("maps have different boundary values")]
    TraceMismatch,

    #[error("condenser plate touches the outer boundary")]
    PlateTouchesBoundary,

    #[error("condenser plate is empty")]
    EmptyPlate,

    #[error("segment leaves the disk")]
    SegmentOutside,

    #[error("quadratic differential vanishes identically")]
    IdenticallyZero,

    #[error("seed {0} lies outside the mesh")]
    SeedOutside(String),

    #[error("seed {0} is at a critical point")]
    SeedAtCriticalPoint(String),

    #[error("trajectory does not reach the boundary at both ends")]
    InapplicableTermination,

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("radius {radius} is below the mesh resolution {resolution}")]
    BelowResolution { radius: f64, resolution: f64 },

    #[error("linear solver did not converge (relative residual {0:e})")]
    SolverDiverged(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_stage(self, stage: &str) -> Error {
        Error::Stage { stage: stage.to_string(), source: Box::new(self) }
    }

    /// The innermost error, with stage attribution removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
