//! Memory decoherence, averaged quantum bit error rates and the Bell-diagonal
//! state shared by Alice and Bob.
//!
//! The per-attempt state follows the entanglement-swapping picture: the
//! memory holding Alice's half is dephased with `lambda_1 = (1 + e^{-a n})/2`
//! and depolarised with `lambda_2 = e^{-b n}` while Bob's link is attempted
//! `n` times. Gate noise and dark counts add a global depolarising factor
//! `F_gm * alpha_A * alpha_B`.
//!
//! Bell coefficients are reported with the target state relabelled to
//! `|psi(0,0)>`: the swap outcome `|psi(1,0)>` maps to `p00` and its
//! phase-flipped partner `|psi(1,1)>` to `p01`. The remaining two
//! coefficients are equal, so the relabelling is a local Pauli frame change.

use serde::Serialize;

use crate::channel_loss::LinkClickModel;
use crate::cutoff::Cutoff;
use crate::error::{check_positive_probability, ModelError, Result};
use crate::params::{ExperimentParams, SPEED_OF_LIGHT_KM_PER_S};

/// Decoherence per attempt on Bob's link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRates {
    /// Dephasing per attempt.
    pub a: f64,
    /// Depolarisation per attempt.
    pub b: f64,
}

/// Basis-dependent error rates. `e_x == e_y` in this noise model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRates {
    pub e_x: f64,
    pub e_y: f64,
    pub e_z: f64,
}

impl ErrorRates {
    pub fn symmetric(e_xy: f64, e_z: f64) -> Self {
        ErrorRates {
            e_x: e_xy,
            e_y: e_xy,
            e_z,
        }
    }

    pub fn e_xy(&self) -> f64 {
        self.e_x
    }
}

/// Coefficients of a Bell-diagonal state, `p_xz` with `x` the bit-flip and
/// `z` the phase-flip label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellCoefficients {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl BellCoefficients {
    pub fn as_array(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    pub fn sum(&self) -> f64 {
        self.p00 + self.p01 + self.p10 + self.p11
    }

    /// Error rate of a Z-basis measurement: bit flips.
    pub fn e_z(&self) -> f64 {
        self.p10 + self.p11
    }

    /// Error rate of an X-basis measurement: phase flips.
    pub fn e_x(&self) -> f64 {
        self.p01 + self.p11
    }

    /// Error rate of a Y-basis measurement.
    pub fn e_y(&self) -> f64 {
        self.p01 + self.p10
    }
}

/// Time between attempts on Bob's link: a round trip to Bob plus preparation.
fn attempt_period(params: &ExperimentParams) -> f64 {
    2.0 * params.n_ri * params.l_b() / SPEED_OF_LIGHT_KM_PER_S + params.t_prep
}

pub fn decay_rates(params: &ExperimentParams) -> DecayRates {
    let period = attempt_period(params);
    DecayRates {
        a: params.a0 + params.a1 * period,
        b: params.b0 + params.b1 * period,
    }
}

/// Mean of `e^{-c n}` over the geometric distribution of Bob's successful
/// attempt, truncated to the first `n*` trials.
///
/// Every `1 - x` factor of the closed form is evaluated as `-expm1(ln x)` so
/// tiny `p_B` and `c` keep full precision.
pub fn truncated_geometric_mean_exp(c: f64, p_b: f64, n_star: Cutoff) -> Result<f64> {
    check_positive_probability("p_B", p_b)?;
    if !(c >= 0.0) {
        return Err(ModelError::Domain {
            name: "c",
            value: c,
            reason: "decay per attempt must be non-negative",
        });
    }
    if c == 0.0 {
        return Ok(1.0);
    }
    let ln_q = (-p_b).ln_1p();
    match n_star {
        Cutoff::Finite(0) => Err(ModelError::Domain {
            name: "n*",
            value: 0.0,
            reason: "cut-off must be at least one attempt",
        }),
        Cutoff::Finite(1) => Ok((-c).exp()),
        Cutoff::Finite(n) => {
            let n = n as f64;
            let geometric_norm = -(n * ln_q).exp_m1();
            let tail = -(n * (ln_q - c)).exp_m1();
            let ratio = -(ln_q - c).exp_m1();
            Ok(p_b * (-c).exp() * tail / (geometric_norm * ratio))
        }
        Cutoff::Infinite => Ok(p_b * (-c).exp() / -(ln_q - c).exp_m1()),
    }
}

/// Error rates averaged over Bob's attempt count:
/// `e_XY = 1/2 - 1/2 F_gm a_A a_B (2F_prep - 1)^2 <e^{-(a+b)n}>` and
/// `e_Z = 1/2 - 1/2 F_gm a_A a_B <e^{-b n}>`.
pub fn averaged_error_rates(
    params: &ExperimentParams,
    link_a: &LinkClickModel,
    link_b: &LinkClickModel,
    n_star: Cutoff,
) -> Result<ErrorRates> {
    let DecayRates { a, b } = decay_rates(params);
    let p_b = link_b.p_click;
    let depol = params.f_gm * link_a.alpha * link_b.alpha;
    let visibility = (2.0 * params.f_prep - 1.0).powi(2);
    let mean_xy = truncated_geometric_mean_exp(a + b, p_b, n_star)?;
    let mean_z = truncated_geometric_mean_exp(b, p_b, n_star)?;
    Ok(ErrorRates::symmetric(
        0.5 - 0.5 * depol * visibility * mean_xy,
        0.5 - 0.5 * depol * mean_z,
    ))
}

/// Bell coefficients of the state whose error rates are `e`.
pub fn bell_coefficients(e: &ErrorRates) -> Result<BellCoefficients> {
    let e_xy = e.e_xy();
    let half_z = e.e_z / 2.0;
    let mut p01 = e_xy - half_z;
    if p01 < 0.0 {
        // rounding noise at the noiseless point
        if p01 > -1e-14 {
            p01 = 0.0;
        } else {
            return Err(ModelError::InconsistentErrorRates {
                e_xy,
                half_e_z: half_z,
            });
        }
    }
    Ok(BellCoefficients {
        p00: 1.0 - half_z - e_xy,
        p01,
        p10: half_z,
        p11: half_z,
    })
}

/// The state after exactly `n` attempts on Bob's link, before averaging.
pub fn final_state_coefficients(
    params: &ExperimentParams,
    link_a: &LinkClickModel,
    link_b: &LinkClickModel,
    n: u64,
) -> Result<BellCoefficients> {
    if n == 0 {
        return Err(ModelError::Domain {
            name: "n",
            value: 0.0,
            reason: "at least one attempt is needed",
        });
    }
    let rates = decay_rates(params);
    Ok(state_after_attempts(
        params.f_prep,
        params.f_gm * link_a.alpha * link_b.alpha,
        rates,
        n as f64,
    ))
}

pub(crate) fn state_after_attempts(
    f_prep: f64,
    global_depol: f64,
    rates: DecayRates,
    n: f64,
) -> BellCoefficients {
    let f_t1 = (-rates.b * n).exp();
    let f_t2 = (1.0 + (-rates.a * n).exp()) / 2.0;
    // dephasing of the stored copy composed with its preparation noise
    let f_deph = f_t2 * f_prep + (1.0 - f_t2) * (1.0 - f_prep);
    let lambda = global_depol * f_t1;
    let mixed = (1.0 - lambda) / 4.0;
    let target = f_deph * f_prep + (1.0 - f_deph) * (1.0 - f_prep);
    let flipped = f_deph * (1.0 - f_prep) + (1.0 - f_deph) * f_prep;
    BellCoefficients {
        p00: lambda * target + mixed,
        p01: lambda * flipped + mixed,
        p10: mixed,
        p11: mixed,
    }
}
