//! Secret-key fractions: fully asymmetric BB84 with one-way post-processing
//! and symmetric six-state with advantage distillation.

use serde::Serialize;

use crate::error::{check_probability, Result};
use crate::noise::{bell_coefficients, BellCoefficients, ErrorRates};
use crate::params::ProtocolKind;

/// Which expression produced the key fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SkfBranch {
    #[serde(rename = "one_way")]
    OneWay,
    #[serde(rename = "ad_branch_1")]
    AdBranch1,
    #[serde(rename = "ad_branch_2")]
    AdBranch2,
}

impl SkfBranch {
    pub fn name(self) -> &'static str {
        match self {
            SkfBranch::OneWay => "one_way",
            SkfBranch::AdBranch1 => "ad_branch_1",
            SkfBranch::AdBranch2 => "ad_branch_2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecretKeyFraction {
    /// Secret bits per raw bit, clamped to `[0, 1]`.
    pub value: f64,
    pub protocol: ProtocolKind,
    pub branch: SkfBranch,
}

/// `x log2 x` with `0 log 0 = 0`.
fn x_log2_x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    -x_log2_x(p) - x_log2_x(1.0 - p)
}

/// Shannon entropy in bits of a finite distribution.
pub fn shannon_entropy(dist: &[f64]) -> f64 {
    -dist.iter().map(|&p| x_log2_x(p)).sum::<f64>()
}

/// `max(0, 1 - h(e_Z) - h(e_X))`.
pub fn skf_bb84(e_z: f64, e_x: f64) -> Result<SecretKeyFraction> {
    check_probability("e_Z", e_z)?;
    check_probability("e_X", e_x)?;
    let r = 1.0 - binary_entropy(e_z) - binary_entropy(e_x);
    Ok(SecretKeyFraction {
        value: r.clamp(0.0, 1.0),
        protocol: ProtocolKind::Bb84Active,
        branch: SkfBranch::OneWay,
    })
}

/// Six-state key fraction with advantage distillation on a Bell-diagonal
/// state; the prefactor 1/3 is the sifting of the symmetric protocol.
pub fn skf_six_state_ad(p: &BellCoefficients) -> Result<SecretKeyFraction> {
    for (name, v) in [("p00", p.p00), ("p01", p.p01), ("p10", p.p10), ("p11", p.p11)] {
        check_probability(name, v)?;
    }
    let no_flip = p.p00 + p.p01;
    let flip = p.p10 + p.p11;
    let parity_even = no_flip * no_flip + flip * flip;
    let parity_odd = 2.0 * no_flip * flip;

    // the correction carries a P(1) prefactor, so it vanishes with either marginal
    let correction = if parity_odd > 0.0 {
        let ratio = (p.p00 * p.p10 + p.p01 * p.p11) / (no_flip * flip);
        parity_odd / 2.0 * binary_entropy(ratio.clamp(0.0, 1.0))
    } else {
        0.0
    };
    let first = 1.0 - shannon_entropy(&p.as_array()) + correction;

    let distilled = [
        (p.p00 * p.p00 + p.p01 * p.p01) / parity_even,
        2.0 * p.p00 * p.p01 / parity_even,
        (p.p10 * p.p10 + p.p11 * p.p11) / parity_even,
        2.0 * p.p10 * p.p11 / parity_even,
    ];
    let second = parity_even / 2.0 * (1.0 - shannon_entropy(&distilled));

    let (best, branch) = if second > first {
        (second, SkfBranch::AdBranch2)
    } else {
        (first, SkfBranch::AdBranch1)
    };
    Ok(SecretKeyFraction {
        value: (best / 3.0).clamp(0.0, 1.0),
        protocol: ProtocolKind::SixStatePassive,
        branch,
    })
}

/// Key fraction of `protocol` for its own error rates.
pub fn skf_for(protocol: ProtocolKind, e: &ErrorRates) -> Result<SecretKeyFraction> {
    match protocol {
        ProtocolKind::Bb84Active => skf_bb84(e.e_z, e.e_x),
        ProtocolKind::SixStatePassive => skf_six_state_ad(&bell_coefficients(e)?),
    }
}

/// The larger of the two protocols' key fractions, each evaluated on its own
/// error rates. Ties go to BB84.
pub fn best_skf(bb84: &ErrorRates, six_state: &ErrorRates) -> Result<SecretKeyFraction> {
    let a = skf_for(ProtocolKind::Bb84Active, bb84)?;
    let b = skf_for(ProtocolKind::SixStatePassive, six_state)?;
    Ok(if b.value > a.value { b } else { a })
}
