use thiserror::Error;

/// Errors surfaced by the engine.
#[derive(Debug, Error)]
pub enum ZenoError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Post-selecting on an outcome whose forward amplitude is zero (below
    /// [`crate::tol::POST_SELECTION_AMP`], which also covers protocol-exact
    /// zeros that survive only as cos(pi/2) rounding residue).
    #[error("impossible post-selection on {0}: forward amplitude is zero")]
    ImpossiblePostSelection(String),

    /// Both ABL branch amplitudes vanish, so the conditional probability has
    /// no defined value.
    #[error("ABL probability undefined: both branch amplitudes are zero")]
    UndefinedAbl,

    /// Conditioning on an event of probability zero (e.g. "never found" when
    /// every trajectory is found or absorbed).
    #[error("conditioning event has probability zero")]
    ImpossibleConditioning,

    /// More pointer couplings requested than the branch bookkeeping allows.
    #[error("pointer coupling capacity exceeded: {requested} couplings, cap {cap}")]
    CapacityExceeded { requested: usize, cap: usize },

    /// A density grid failed its normalization self-check.
    #[error("grid under-resolution: density integral off from 1 by {defect:e}")]
    PrecisionError { defect: f64 },
}

impl ZenoError {
    /// Stable machine-readable code for each error class.
    pub fn code(&self) -> &'static str {
        match self {
            ZenoError::InvalidParameter(_) => "invalid_parameter",
            ZenoError::ImpossiblePostSelection(_) => "impossible_post_selection",
            ZenoError::UndefinedAbl => "undefined_abl",
            ZenoError::ImpossibleConditioning => "impossible_conditioning",
            ZenoError::CapacityExceeded { .. } => "capacity_exceeded",
            ZenoError::PrecisionError { .. } => "precision_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, ZenoError>;
