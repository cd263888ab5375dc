use thiserror::Error;

/// Errors raised by the analytic model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// An argument lies outside the domain of the formula.
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A ratio whose denominator vanished.
    #[error("undefined ratio: {0}")]
    UndefinedRatio(&'static str),

    /// Error rates that do not correspond to a valid Bell-diagonal state.
    #[error("inconsistent error rates: e_XY = {e_xy} < e_Z/2 = {half_e_z}")]
    InconsistentErrorRates { e_xy: f64, half_e_z: f64 },

    /// The analytic yield bounds only hold for p_B >= p_A.
    #[error(
        "analytic yield bounds require p_B >= p_A (got p_A = {p_a}, p_B = {p_b}); \
         use the Monte Carlo estimator for repeaters shifted towards Alice"
    )]
    BoundsRequireBobSide { p_a: f64, p_b: f64 },

    /// The high-loss bound is derived for cut-offs of at least two attempts.
    #[error("high-loss yield bound requires n* >= 2 (got n* = {0})")]
    HighLossCutoffTooSmall(u64),

    /// Parameter set failed validation.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Requested Monte Carlo run exceeds the configured sample budget.
    #[error("requested {requested} samples, maximum is {maximum}")]
    TooManySamples { requested: u64, maximum: u64 },
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ModelError::Domain {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

pub(crate) fn check_positive_probability(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(ModelError::Domain {
            name,
            value,
            reason: "must lie in (0, 1]",
        })
    }
}
