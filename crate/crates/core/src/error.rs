//! Error type shared by all solver modules.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum FloqError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("tensor product dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("operator/state space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "integrator did not converge: est_error {est_error:.3e} > tolerance {tolerance:.3e} \
         after {refinements} refinements ({steps} steps over [{t0}, {t1}] ns)"
    )]
    NonConvergence {
        est_error: f64,
        tolerance: f64,
        refinements: usize,
        steps: usize,
        t0: f64,
        t1: f64,
    },

    #[error("positivity violation at t = {t} ns: min eigenvalue {min_eig:.3e} (step size {dt:.3e} ns; reduce the step or raise substeps)")]
    PositivityViolation { t: f64, min_eig: f64, dt: f64 },

    #[error("degenerate Floquet eigenphases: separation {separation:.3e} below 1e-10")]
    DegenerateQuasienergies { separation: f64 },

    #[error("normal-mode labeling ambiguous: frequency gap {gap_rad_ns:.3e} rad/ns below threshold")]
    LabelingAmbiguity { gap_rad_ns: f64 },

    #[error("anticrossing extraction failed: empty intersection at numerator p = {at_p}; per-numerator survivor counts: {survivors:?}")]
    EmptyIntersection { at_p: u32, survivors: Vec<(u32, usize)> },

    #[error("boundary not found in [{t_lo}, {t_hi}] ns: F({t_lo}) = {f_lo:.6}, F({t_hi}) = {f_hi:.6}, target {target}")]
    BoundaryNotFound {
        t_lo: f64,
        t_hi: f64,
        f_lo: f64,
        f_hi: f64,
        target: f64,
    },

    #[error("scaling-law fit rejected: {0}")]
    PoorFit(String),

    #[error("linear algebra backend error: {0}")]
    Linalg(String),
}

impl From<ndarray_linalg::error::LinalgError> for FloqError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        FloqError::Linalg(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FloqError>;
