//! Transmissivities, click probabilities and the depolarising noise that
//! dark counts induce under the squashing model.

use serde::Serialize;

use crate::error::{check_probability, ModelError, Result};
use crate::params::{ExperimentParams, ProtocolKind, Side};

/// Click statistics of one side's detector setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkClickModel {
    pub side: Side,
    pub protocol: ProtocolKind,
    /// Fibre transmissivity between repeater and this party.
    pub eta: f64,
    /// Probability that at least one detector clicks in an attempt.
    pub p_click: f64,
    /// Depolarising parameter conditioned on a click.
    pub alpha: f64,
    /// Dark-click probability per detector and window.
    pub p_d: f64,
    /// Mean thermal photons per window.
    pub n_bar: f64,
}

impl LinkClickModel {
    pub fn new(params: &ExperimentParams, side: Side, protocol: ProtocolKind) -> Result<Self> {
        let length = match side {
            Side::Alice => params.l_a,
            Side::Bob => params.l_b(),
        };
        let eta = fibre_transmissivity(length, params.l0)?;
        let (n_bar, p_d) = dark_click_probability(params.dark_rate, params.t_int);
        Self::from_parts(side, protocol, eta, params.p_app(), params.p_ps, p_d, n_bar)
    }

    pub fn from_parts(
        side: Side,
        protocol: ProtocolKind,
        eta: f64,
        p_app: f64,
        p_ps: f64,
        p_d: f64,
        n_bar: f64,
    ) -> Result<Self> {
        let p_click = click_probability(eta, p_app, p_ps, p_d, protocol)?;
        let alpha = squashing_alpha(eta, p_app, p_ps, p_d, protocol)?;
        Ok(LinkClickModel {
            side,
            protocol,
            eta,
            p_click,
            alpha,
            p_d,
            n_bar,
        })
    }
}

/// Both links of the repeater for one protocol.
pub fn link_pair(
    params: &ExperimentParams,
    protocol: ProtocolKind,
) -> Result<(LinkClickModel, LinkClickModel)> {
    Ok((
        LinkClickModel::new(params, Side::Alice, protocol)?,
        LinkClickModel::new(params, Side::Bob, protocol)?,
    ))
}

/// `exp(-L / L0)`.
pub fn fibre_transmissivity(length_km: f64, l0_km: f64) -> Result<f64> {
    if !(l0_km > 0.0) {
        return Err(ModelError::Domain {
            name: "L0",
            value: l0_km,
            reason: "attenuation length must be positive",
        });
    }
    if !(length_km >= 0.0) {
        return Err(ModelError::Domain {
            name: "L",
            value: length_km,
            reason: "fibre length must be non-negative",
        });
    }
    Ok((-length_km / l0_km).exp())
}

/// Poissonian dark counts: returns `(n_bar, p_d)` with `p_d = 1 - exp(-n_bar)`.
pub fn dark_click_probability(dark_rate: f64, t_int: f64) -> (f64, f64) {
    let n_bar = dark_rate * t_int;
    (n_bar, -(-n_bar).exp_m1())
}

/// `ln (1 - p_d)^k`, exact for tiny `p_d`.
fn ln_no_dark_clicks(p_d: f64, detectors: i32) -> f64 {
    detectors as f64 * (-p_d).ln_1p()
}

fn check_inputs(eta: f64, p_app: f64, p_ps: f64, p_d: f64) -> Result<()> {
    check_probability("eta", eta)?;
    check_probability("p_app", p_app)?;
    check_probability("p_ps", p_ps)?;
    check_probability("p_d", p_d)
}

/// `1 - (1 - p_app p_ps eta)(1 - p_d)^k` with `k` the detector count.
pub fn click_probability(
    eta: f64,
    p_app: f64,
    p_ps: f64,
    p_d: f64,
    protocol: ProtocolKind,
) -> Result<f64> {
    check_inputs(eta, p_app, p_ps, p_d)?;
    let signal = p_app * p_ps * eta;
    let k = protocol.detector_count();
    // 1 - exp(ln(1 - s) + k ln(1 - p_d)), kept in expm1 form
    let ln_silent = (-signal).ln_1p() + ln_no_dark_clicks(p_d, k);
    Ok(-ln_silent.exp_m1())
}

/// Fraction of clicks in which the signal photon arrived and no other
/// detector fired: `p_app p_ps eta (1 - p_d)^{k-1} / p_click`.
pub fn squashing_alpha(
    eta: f64,
    p_app: f64,
    p_ps: f64,
    p_d: f64,
    protocol: ProtocolKind,
) -> Result<f64> {
    let p_click = click_probability(eta, p_app, p_ps, p_d, protocol)?;
    if p_click <= 0.0 {
        return Err(ModelError::UndefinedRatio(
            "squashing alpha: click probability is zero",
        ));
    }
    let k = protocol.detector_count();
    let good = p_app * p_ps * eta * ln_no_dark_clicks(p_d, k - 1).exp();
    Ok((good / p_click).min(1.0))
}
