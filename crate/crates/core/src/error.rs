use thiserror::Error;

/// Errors raised by the risk library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("invalid interval: lower bound {a} exceeds upper bound {b}")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid LVR {0}: must be positive and finite")]
    InvalidLvr(f64),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("truncation at {floor} leaves no probability mass")]
    DegenerateTruncation { floor: f64 },

    #[error("LVR {lvr} is outside the tabulated range [{lo}, {hi}]")]
    OutOfRange { lvr: f64, lo: f64, hi: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("cannot sample from distribution: {0}")]
    UnsupportedSampling(&'static str),

    #[error("at LVR {lvr}: {source}")]
    AtLvr {
        lvr: f64,
        #[source]
        source: Box<RiskError>,
    },
}

pub type Result<T> = std::result::Result<T, RiskError>;

pub(crate) fn check_param(
    name: &'static str,
    value: f64,
    ok: bool,
    reason: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(RiskError::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
