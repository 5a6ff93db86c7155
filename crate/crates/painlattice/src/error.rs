//! Error type shared across the pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Exact division in the VY recursion (or elsewhere) left a remainder.
    /// This is always an arithmetic bug, never a data problem.
    #[error("exact polynomial division left a nonzero remainder (dividend degree {degree})")]
    NonzeroRemainder { degree: usize },

    /// A consistency node disagreed with the interpolated discriminant.
    #[error("discriminant interpolation inconsistent at node t = {node}")]
    InterpolationMismatch { node: String },

    /// The linear system for the Airy polynomials was singular (cannot occur
    /// for the stated operator; treated as a bug).
    #[error("singular linear system while solving for B_{n}")]
    SingularAirySystem { n: usize },

    #[error("root finding failed to converge: {failing}/{total} roots above residual target (worst {worst})")]
    RootConvergence {
        failing: usize,
        total: usize,
        worst: String,
    },

    #[error("root set failed simplicity certification: min pairwise distance {distance}")]
    RootsNotSimple { distance: String },

    #[error("turning points nearly degenerate (pairwise distance {distance})")]
    DegenerateTurningPoints { distance: String },

    #[error("ambiguous turning-point labeling (two matchings within {margin_percent}% total cost)")]
    AmbiguousLabeling { margin_percent: f64 },

    #[error("ambiguous eigenvalue cluster at t = {t} (gap ratio {ratio})")]
    AmbiguousCluster { t: String, ratio: f64 },

    #[error("loop geometry failure: {reason}")]
    LoopGeometry { reason: String },

    #[error("branch tracking lost continuity after {refinements} refinements")]
    BranchTracking { refinements: u32 },

    #[error("orientation inconsistency: Im tau = {imag} is not positive")]
    TauOrientation { imag: String },

    #[error("integrand does not decay below target at truncation radius {radius} for t = {t}")]
    WedgeDecay { radius: f64, t: String },

    #[error("both moment-matrix rows are numerically zero")]
    ZeroMomentMatrix,

    #[error("Laurent-coefficient validation failed: {detail}")]
    LaurentValidation { detail: String },

    #[error("boundary continuation stalled near a = {a}")]
    ContinuationStall { a: String },

    #[error("probe {probe} lies outside the elliptic region")]
    ProbeOutsideRegion { probe: String },

    #[error("need at least {needed} values of n, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
