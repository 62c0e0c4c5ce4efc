use thiserror::Error;

/// Errors raised by mesh construction, the cochain calculus and the
/// verification pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("non-manifold complex: facet {facet:?} is shared by {count} top simplices")]
    NonManifold { facet: Vec<usize>, count: usize },

    #[error("inconsistent orientation across facet {facet:?}")]
    InconsistentOrientation { facet: Vec<usize> },

    #[error("degenerate simplex {simplex:?} (volume {volume:e})")]
    DegenerateSimplex { simplex: Vec<usize>, volume: f64 },

    #[error("boundary facet {facet:?} carries no face label")]
    UnlabeledFacet { facet: Vec<usize> },

    #[error("label assigned to {facet:?}, which is not a boundary facet")]
    NotABoundaryFacet { facet: Vec<usize> },

    #[error("unknown face label `{0}`")]
    UnknownLabel(String),

    #[error("face labels do not partition the boundary: {0}")]
    NotAPartition(String),

    #[error("gluing rejected: {0}")]
    Glue(String),

    #[error("degree {degree} out of range for a complex of dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },

    #[error("cochain lives on a different complex or has the wrong length")]
    HostMismatch,

    #[error("chain is not a cycle (boundary has {nonzero} nonzero entries)")]
    NotACycle { nonzero: usize },

    #[error("numerical rank is ambiguous at threshold {threshold:e}: retained {retained:e}, discarded {discarded:e}")]
    RankAmbiguity {
        threshold: f64,
        retained: f64,
        discarded: f64,
    },

    #[error("singular value decomposition failed to converge")]
    SolverFailure,

    #[error("cochain is not coclosed: relative defect {defect:e} exceeds {tolerance:e}")]
    NotCoclosed { defect: f64, tolerance: f64 },

    #[error("cochain does not solve the Euler-Lagrange equations: relative residual {residual:e}")]
    NotASolution { residual: f64 },

    #[error("boundary datum is not extendable: relative projection residual {residual:e} exceeds {tolerance:e}")]
    NotExtendable { residual: f64, tolerance: f64 },

    #[error("curvature ratio not constant: relative deviation {deviation:e}")]
    CurvatureNotConstant { deviation: f64 },

    #[error("mesh has {0} boundary components; per-component reporting required")]
    MultipleBoundaryComponents(usize),

    #[error("winding vector has length {got}, expected {expected}")]
    WindingLength { got: usize, expected: usize },

    #[error("invalid builtin mesh spec `{0}`")]
    InvalidSpec(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
