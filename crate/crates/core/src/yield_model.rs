//! Expected channel uses `E[max(N_A, N_B)]` per raw bit, with and without a
//! cut-off on Bob's attempts.
//!
//! Two regimes are distinguished by `p_A * n*`:
//!
//! * high loss (`p_A n* < 1`): Alice dominates the count. The lower bound is
//!   `E[N_A] = 1 / (p_A (1 - (1 - p_B)^{n*}))` and a Chernoff argument gives
//!   the relative error `g_err`.
//! * low loss (`p_A n* >= 1`): the cut-off rarely binds. The lower bound is
//!   the no cut-off value `N_NC` with relative error `g~_err`.
//!
//! Both bounds assume `p_B >= p_A`, i.e. the repeater sits at or beyond the
//! midpoint towards Bob.

use serde::Serialize;

use crate::cutoff::Cutoff;
use crate::error::{check_positive_probability, check_probability, ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum YieldRegime {
    #[serde(rename = "high_loss")]
    HighLoss,
    #[serde(rename = "low_loss")]
    LowLoss,
}

impl YieldRegime {
    pub fn name(self) -> &'static str {
        match self {
            YieldRegime::HighLoss => "high_loss",
            YieldRegime::LowLoss => "low_loss",
        }
    }

    /// `p_A n* < 1` is high loss; equality belongs to the low-loss branch.
    pub fn classify(p_a: f64, n_star: Cutoff) -> Self {
        if p_a * n_star.as_f64() < 1.0 {
            YieldRegime::HighLoss
        } else {
            YieldRegime::LowLoss
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YieldBounds {
    /// Lower bound on channel uses per raw bit.
    pub lower: f64,
    /// Upper bound on channel uses per raw bit.
    pub upper: f64,
    pub regime: YieldRegime,
    /// Relative error `upper / lower - 1`.
    pub err_term: f64,
    /// `p_bsm / upper`.
    pub yield_lower: f64,
    /// `p_bsm / lower`.
    pub yield_upper: f64,
}

/// `1/p_A + 1/p_B - 1/(p_A + p_B - p_A p_B)`: mean of the maximum of two
/// independent geometric variables.
pub fn expected_uses_no_cutoff(p_a: f64, p_b: f64) -> Result<f64> {
    check_positive_probability("p_A", p_a)?;
    check_positive_probability("p_B", p_b)?;
    Ok(1.0 / p_a + 1.0 / p_b - 1.0 / (p_a + p_b - p_a * p_b))
}

/// Probability that Bob succeeds within one round, `1 - (1 - p_B)^{n*}`.
pub fn round_success_probability(p_b: f64, n_star: Cutoff) -> f64 {
    match n_star {
        Cutoff::Finite(n) => -(n as f64 * (-p_b).ln_1p()).exp_m1(),
        Cutoff::Infinite => {
            if p_b > 0.0 {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Minimum over `t > 0` of the Chernoff generating function,
/// `f(t0) = p_A n* (n* (1 - p_A) / (n* - 1))^{n* - 1}`, evaluated in log space.
pub fn chernoff_minimum(p_a: f64, n_star: u64) -> f64 {
    let n = n_star as f64;
    // ln(n/(n-1)) = -ln(1 - 1/n)
    let ln_base = -(-1.0 / n).ln_1p() + (-p_a).ln_1p();
    ((p_a * n).ln() + (n - 1.0) * ln_base).exp()
}

/// Relative error of the high-loss bound.
pub fn g_err(p_a: f64, p_b: f64, n_star: u64) -> f64 {
    let f = chernoff_minimum(p_a, n_star);
    let p_r = round_success_probability(p_b, Cutoff::Finite(n_star));
    let fail = Cutoff::Finite(n_star).survival(p_b);
    let denom = 1.0 - fail * f;
    p_r * p_r * p_a * n_star as f64 * f / (denom * denom)
}

/// Relative error of the low-loss bound; zero without a cut-off.
pub fn g_err_tilde(p_a: f64, p_b: f64, n_star: Cutoff) -> Result<f64> {
    let Cutoff::Finite(n) = n_star else {
        return Ok(0.0);
    };
    let fail = n_star.survival(p_b);
    if fail == 0.0 {
        return Ok(0.0);
    }
    let n_nc = expected_uses_no_cutoff(p_a, p_b)?;
    let p_r = -(n as f64 * (-p_b).ln_1p()).exp_m1();
    let mu = 1.0 / p_a;
    // (2 - q^n) / (1 - q^n) with q^n = 1 - p_r
    Ok(fail * ((n as f64 + mu) / n_nc * ((1.0 + p_r) / p_r) - 1.0))
}

fn check_pair(p_a: f64, p_b: f64) -> Result<()> {
    check_positive_probability("p_A", p_a)?;
    check_positive_probability("p_B", p_b)?;
    if p_b < p_a {
        return Err(ModelError::BoundsRequireBobSide { p_a, p_b });
    }
    Ok(())
}

/// Lower and upper bounds on the expected channel uses and the matching
/// yields.
pub fn yield_bounds(p_a: f64, p_b: f64, n_star: Cutoff, p_bsm: f64) -> Result<YieldBounds> {
    check_pair(p_a, p_b)?;
    check_probability("p_bsm", p_bsm)?;
    let regime = YieldRegime::classify(p_a, n_star);
    let (lower, err_term) = match regime {
        YieldRegime::HighLoss => {
            // high loss is only reachable with a finite cut-off
            let n = n_star.finite().expect("finite cut-off in high-loss regime");
            if n < 2 {
                return Err(ModelError::HighLossCutoffTooSmall(n));
            }
            let p_r = round_success_probability(p_b, n_star);
            (1.0 / (p_a * p_r), g_err(p_a, p_b, n))
        }
        YieldRegime::LowLoss => (
            expected_uses_no_cutoff(p_a, p_b)?,
            g_err_tilde(p_a, p_b, n_star)?,
        ),
    };
    let upper = (1.0 + err_term) * lower;
    Ok(YieldBounds {
        lower,
        upper,
        regime,
        err_term,
        yield_lower: p_bsm / upper,
        yield_upper: p_bsm / lower,
    })
}

/// Two-branch estimate used for reported rates: the high-loss lower bound
/// when `1/p_A > n*`, else the no cut-off value.
pub fn approx_expected_uses(p_a: f64, p_b: f64, n_star: Cutoff) -> Result<f64> {
    check_pair(p_a, p_b)?;
    match YieldRegime::classify(p_a, n_star) {
        YieldRegime::HighLoss => Ok(1.0 / (p_a * round_success_probability(p_b, n_star))),
        YieldRegime::LowLoss => expected_uses_no_cutoff(p_a, p_b),
    }
}
