use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// Configuration the model does not define (e.g. a finite chain at θ ≠ 90°).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("eigensolver did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },

    /// The spectrum closes on the sampled contour, so the invariant does not exist.
    #[error("winding undefined: spectrum gapless (min |det Q| = {min_abs_det:e})")]
    Gapless { min_abs_det: f64 },

    #[error("contour under-resolved (deviation from integer {deviation:.3e}); increase n_k")]
    InsufficientResolution { deviation: f64 },

    #[error("ratio path degenerate: |psi_B(K)| = {value:e} at sample {sample}")]
    DegenerateRatio { sample: usize, value: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("charge basis not converged: {0}")]
    CutoffNotConverged(String),

    #[error("ensemble failed: {failed} of {total} realizations")]
    Ensemble { failed: usize, total: usize },
}

impl Error {
    /// True for errors caused by caller input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::Unsupported(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
