//! Rates that a repeater has to beat: capacities and bounds of the channel
//! between Alice and Bob for three choices of where the channel ends, plus
//! the rate of the same hardware without a repeater.
//!
//! | boundary                     | pure loss | finite energy | thermal | direct |
//! |------------------------------|-----------|---------------|---------|--------|
//! | fibre                        | 1a        | 1b            |         |        |
//! | fibre + filters              | 2a        | 2b            |         |        |
//! | fibre + filters + apparatus  |           |               | 3c      | 3d     |

use std::fmt;

use serde::Serialize;

use crate::channel_loss::{click_probability, dark_click_probability, squashing_alpha};
use crate::error::{check_probability, ModelError, Result};
use crate::noise::ErrorRates;
use crate::params::{ExperimentParams, ProtocolKind};
use crate::skf::skf_for;

/// Where the channel boundary is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryCase {
    FibreOnly = 1,
    WithFilters = 2,
    WithApparatus = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BenchmarkLabel {
    #[serde(rename = "1a")]
    L1a,
    #[serde(rename = "1b")]
    L1b,
    #[serde(rename = "2a")]
    L2a,
    #[serde(rename = "2b")]
    L2b,
    #[serde(rename = "3c")]
    L3c,
    #[serde(rename = "3d")]
    L3d,
}

impl BenchmarkLabel {
    pub const ALL: [BenchmarkLabel; 6] = [
        BenchmarkLabel::L1a,
        BenchmarkLabel::L1b,
        BenchmarkLabel::L2a,
        BenchmarkLabel::L2b,
        BenchmarkLabel::L3c,
        BenchmarkLabel::L3d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkLabel::L1a => "1a",
            BenchmarkLabel::L1b => "1b",
            BenchmarkLabel::L2a => "2a",
            BenchmarkLabel::L2b => "2b",
            BenchmarkLabel::L3c => "3c",
            BenchmarkLabel::L3d => "3d",
        }
    }

    pub fn case(self) -> BoundaryCase {
        match self {
            BenchmarkLabel::L1a | BenchmarkLabel::L1b => BoundaryCase::FibreOnly,
            BenchmarkLabel::L2a | BenchmarkLabel::L2b => BoundaryCase::WithFilters,
            BenchmarkLabel::L3c | BenchmarkLabel::L3d => BoundaryCase::WithApparatus,
        }
    }
}

impl fmt::Display for BenchmarkLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BenchmarkLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        BenchmarkLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s.trim())
            .ok_or_else(|| format!("unknown benchmark label '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkValue {
    pub label: BenchmarkLabel,
    /// Effective transmissivity of the channel.
    pub eta: f64,
    /// Secret bits per channel use; `+inf` for a lossless pure-loss channel.
    pub value: f64,
    /// Mean photon number, finite-energy benchmarks only.
    pub mean_photons: Option<f64>,
    /// Thermal photons per use, thermal benchmark only.
    pub n_bar: Option<f64>,
}

/// `-log2(1 - eta)`, `+inf` at `eta = 1`.
pub fn pure_loss_capacity(eta: f64) -> Result<f64> {
    check_probability("eta", eta)?;
    if eta == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-(-eta).ln_1p() / std::f64::consts::LN_2)
}

/// `g(x) = (x + 1) log2(x + 1) - x log2 x`, the entropy of a thermal state
/// with mean photon number `x`.
pub fn thermal_entropy(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ((x + 1.0) * x.ln_1p() - x * x.ln()) / std::f64::consts::LN_2
}

/// Upper bound for the pure-loss channel with mean photon number `P`:
/// `g((1 + eta) P / 2) - g((1 - eta) P / 2)`.
pub fn finite_energy_bound(eta: f64, mean_photons: f64) -> Result<f64> {
    check_probability("eta", eta)?;
    if !(mean_photons >= 0.0) {
        return Err(ModelError::Domain {
            name: "P",
            value: mean_photons,
            reason: "mean photon number must be non-negative",
        });
    }
    let hi = thermal_entropy((1.0 + eta) * mean_photons / 2.0);
    let lo = thermal_entropy((1.0 - eta) * mean_photons / 2.0);
    Ok((hi - lo).max(0.0))
}

/// Upper bound for the thermal-loss channel:
/// `-log2((1 - eta) eta^n) - g(n)` while `n < eta / (1 - eta)`, else zero.
pub fn thermal_loss_bound(eta: f64, n_bar: f64) -> Result<f64> {
    check_probability("eta", eta)?;
    if !(n_bar >= 0.0) {
        return Err(ModelError::Domain {
            name: "n_bar",
            value: n_bar,
            reason: "thermal photon number must be non-negative",
        });
    }
    if eta == 0.0 {
        return Ok(0.0);
    }
    if eta == 1.0 {
        return Ok(f64::INFINITY);
    }
    if n_bar >= eta / (1.0 - eta) {
        return Ok(0.0);
    }
    let log2_arg = ((-eta).ln_1p() + n_bar * eta.ln()) / std::f64::consts::LN_2;
    Ok((-log2_arg - thermal_entropy(n_bar)).max(0.0))
}

/// Effective transmissivity for a channel boundary. Filters and apparatus
/// count once, as they would without a repeater.
pub fn benchmark_eta(params: &ExperimentParams, case: BoundaryCase) -> f64 {
    let fibre = (-params.l_total / params.l0).exp();
    match case {
        BoundaryCase::FibreOnly => fibre,
        BoundaryCase::WithFilters => fibre * params.p_ps,
        BoundaryCase::WithApparatus => fibre * params.p_ps * params.p_app(),
    }
}

/// Mean photon number entering the channel: `p_em` (after conversion) when
/// the emitter is outside the channel, one photon otherwise.
pub fn mean_photon_for_case(params: &ExperimentParams, case: BoundaryCase) -> f64 {
    match case {
        BoundaryCase::FibreOnly | BoundaryCase::WithFilters => params.effective_p_em(),
        BoundaryCase::WithApparatus => 1.0,
    }
}

/// Emission probability below which the finite-energy bound is tighter than
/// the capacity at high loss: the root of `p ln((p + 2)/p) = 1`, the nats
/// form of `p log2((p + 2)/p) = 1/ln 2`. Solved by Newton iteration.
pub fn finite_energy_crossover() -> f64 {
    let f = |p: f64| p * ((p + 2.0) / p).ln() - 1.0;
    let df = |p: f64| ((p + 2.0) / p).ln() - 2.0 / (p + 2.0);
    let mut p = 0.8;
    for _ in 0..50 {
        let step = f(p) / df(p);
        p -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    p
}

/// Rate of the same hardware without a repeater.
///
/// A source at Alice sends states of preparation fidelity `F_prep` through
/// the whole fibre; filters and apparatus act once. Bob's click probability
/// and dark-count depolarisation follow the repeater's own link model with
/// `eta = eta_f`, and there is no memory, gate or swapping noise:
/// `e_X = (1 - alpha (2 F_prep - 1)) / 2`, `e_Z = (1 - alpha) / 2`,
/// `R = p_click * r / 2`.
pub fn direct_transmission_rate(params: &ExperimentParams, protocol: ProtocolKind) -> Result<f64> {
    let eta = benchmark_eta(params, BoundaryCase::FibreOnly);
    let (_, p_d) = dark_click_probability(params.dark_rate, params.t_int);
    let p_click = click_probability(eta, params.p_app(), params.p_ps, p_d, protocol)?;
    if p_click == 0.0 {
        return Ok(0.0);
    }
    let alpha = squashing_alpha(eta, params.p_app(), params.p_ps, p_d, protocol)?;
    let rates = ErrorRates::symmetric(
        (1.0 - alpha * (2.0 * params.f_prep - 1.0)) / 2.0,
        (1.0 - alpha) / 2.0,
    );
    let r = skf_for(protocol, &rates)?;
    Ok(0.5 * p_click * r.value)
}

/// Best direct-transmission rate over both protocols.
pub fn best_direct_transmission_rate(params: &ExperimentParams) -> Result<f64> {
    let mut best: f64 = 0.0;
    for protocol in ProtocolKind::ALL {
        best = best.max(direct_transmission_rate(params, protocol)?);
    }
    Ok(best)
}

/// The six benchmarks for the configured total distance.
pub fn all_benchmarks(params: &ExperimentParams) -> Result<Vec<BenchmarkValue>> {
    let (n_bar, _) = dark_click_probability(params.dark_rate, params.t_int);
    BenchmarkLabel::ALL
        .into_iter()
        .map(|label| {
            let case = label.case();
            let eta = benchmark_eta(params, case);
            let mut v = BenchmarkValue {
                label,
                eta,
                value: 0.0,
                mean_photons: None,
                n_bar: None,
            };
            match label {
                BenchmarkLabel::L1a | BenchmarkLabel::L2a => v.value = pure_loss_capacity(eta)?,
                BenchmarkLabel::L1b | BenchmarkLabel::L2b => {
                    let p = mean_photon_for_case(params, case);
                    v.value = finite_energy_bound(eta, p)?;
                    v.mean_photons = Some(p);
                }
                BenchmarkLabel::L3c => {
                    v.value = thermal_loss_bound(eta, n_bar)?;
                    v.n_bar = Some(n_bar);
                }
                BenchmarkLabel::L3d => v.value = best_direct_transmission_rate(params)?,
            }
            Ok(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_expected_params;
    use proptest::prelude::*;

    #[test]
    fn capacity_values() {
        assert_eq!(pure_loss_capacity(0.0).unwrap(), 0.0);
        assert_eq!(pure_loss_capacity(0.5).unwrap(), 1.0);
        assert_eq!(pure_loss_capacity(1.0).unwrap(), f64::INFINITY);
        let eta = 1e-6;
        let c = pure_loss_capacity(eta).unwrap();
        assert!((c - eta * (1.0 + eta / 2.0) / std::f64::consts::LN_2).abs() < 1e-11 * c);
        assert!(pure_loss_capacity(1.5).is_err());
    }

    #[test]
    fn thermal_entropy_values() {
        assert_eq!(thermal_entropy(0.0), 0.0);
        assert_eq!(thermal_entropy(1.0), 2.0);
        assert!((thermal_entropy(0.5) - (1.5 * 1.5f64.log2() + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn finite_energy_values() {
        assert_eq!(finite_energy_bound(0.0, 0.49).unwrap(), 0.0);
        assert_eq!(finite_energy_bound(1.0, 0.49).unwrap(), thermal_entropy(0.49));
        assert_eq!(finite_energy_bound(1.0, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn thermal_bound_values() {
        assert_eq!(thermal_loss_bound(0.3, 0.0).unwrap(), pure_loss_capacity(0.3).unwrap());
        assert_eq!(thermal_loss_bound(0.5, 1.0).unwrap(), 0.0);
        assert_eq!(thermal_loss_bound(0.2, 0.3).unwrap(), 0.0);
        let g = 1.5 * 1.5f64.log2() + 0.5;
        let expect = -(0.5 * 0.5f64.powf(0.5)).log2() - g;
        assert!((thermal_loss_bound(0.5, 0.5).unwrap() - expect.max(0.0)).abs() < 1e-15);
    }

    #[test]
    fn crossover_root() {
        let root = finite_energy_crossover();
        assert!((root - 0.796).abs() < 1e-3, "root {root}");
        // bisection oracle on the base-2 form
        let h = |p: f64| p * ((p + 2.0) / p).log2() - 1.0 / std::f64::consts::LN_2;
        let (mut lo, mut hi) = (0.5f64, 0.9f64);
        assert!(h(lo) < 0.0 && h(hi) > 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if h(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((root - lo).abs() < 1e-12);
    }

    #[test]
    fn crossover_separates_small_eta_ordering() {
        let root = finite_energy_crossover();
        let eta = 1e-6;
        let below = finite_energy_bound(eta, root - 0.05).unwrap();
        let above = finite_energy_bound(eta, (root + 0.1).min(1.0)).unwrap();
        let cap = pure_loss_capacity(eta).unwrap();
        assert!(below < cap);
        assert!(above > cap);
    }

    #[test]
    fn eta_cases() {
        let mut p = default_expected_params();
        p.l_total = 0.0;
        p.l_a = 0.0;
        assert_eq!(benchmark_eta(&p, BoundaryCase::FibreOnly), 1.0);
        let p = default_expected_params();
        let e1 = benchmark_eta(&p, BoundaryCase::FibreOnly);
        assert_eq!(benchmark_eta(&p, BoundaryCase::WithFilters), e1 * p.p_ps);
        assert_eq!(benchmark_eta(&p, BoundaryCase::WithApparatus), e1 * p.p_ps * p.p_app());
    }

    #[test]
    fn mean_photons() {
        let mut p = default_expected_params();
        assert_eq!(mean_photon_for_case(&p, BoundaryCase::FibreOnly), 0.49);
        assert_eq!(mean_photon_for_case(&p, BoundaryCase::WithApparatus), 1.0);
        p.conversion_eff = 0.3;
        assert_eq!(mean_photon_for_case(&p, BoundaryCase::WithFilters), 0.3 * 0.49);
    }

    #[test]
    fn direct_transmission_cases() {
        let mut p = default_expected_params();
        p.dark_rate = 0.0;
        p.f_prep = 1.0;
        let eta = benchmark_eta(&p, BoundaryCase::FibreOnly);
        let expect = 0.5 * p.p_app() * p.p_ps * eta;
        let got = direct_transmission_rate(&p, ProtocolKind::Bb84Active).unwrap();
        assert!((got - expect).abs() < 1e-15 * expect);
        assert!((best_direct_transmission_rate(&p).unwrap() - expect).abs() < 1e-15 * expect);

        let mut far = default_expected_params();
        far.l_total = 200.0 * far.l0;
        far.l_a = far.l_total / 2.0;
        assert_eq!(best_direct_transmission_rate(&far).unwrap(), 0.0);
    }

    #[test]
    fn all_benchmarks_labels_and_values() {
        let mut ideal = default_expected_params();
        ideal.l_total = 0.0;
        ideal.l_a = 0.0;
        let b = all_benchmarks(&ideal).unwrap();
        assert_eq!(b.iter().map(|v| v.label).collect::<Vec<_>>(), BenchmarkLabel::ALL.to_vec());
        assert_eq!(b[0].value, f64::INFINITY);

        let p = default_expected_params();
        let b = all_benchmarks(&p).unwrap();
        let e1 = benchmark_eta(&p, BoundaryCase::FibreOnly);
        let e2 = e1 * p.p_ps;
        let e3 = e2 * p.p_app();
        assert_eq!(b[0].value, pure_loss_capacity(e1).unwrap());
        assert_eq!(b[1].value, finite_energy_bound(e1, 0.49).unwrap());
        assert_eq!(b[2].value, pure_loss_capacity(e2).unwrap());
        assert_eq!(b[3].value, finite_energy_bound(e2, 0.49).unwrap());
        assert_eq!(b[4].value, thermal_loss_bound(e3, 3e-7).unwrap());
        assert_eq!(b[5].value, best_direct_transmission_rate(&p).unwrap());
        assert_eq!(b[1].mean_photons, Some(0.49));
        assert!(b[4].n_bar.is_some());
        assert!(b[2].value <= b[0].value && b[3].value <= b[1].value);
    }

    proptest! {
        #[test]
        fn orderings(eta in 1e-9f64..0.999, p in 0.0f64..=1.0, n_bar in 0.0f64..2.0, shrink in 0.0f64..=1.0) {
            let cap = pure_loss_capacity(eta).unwrap();
            let fe = finite_energy_bound(eta, p).unwrap();
            let th = thermal_loss_bound(eta, n_bar).unwrap();
            prop_assert!(cap.is_finite() && fe.is_finite() && th.is_finite());
            prop_assert!(cap >= 0.0 && fe >= 0.0 && th >= 0.0);
            prop_assert!(th <= cap + 1e-15);
            prop_assert!(pure_loss_capacity(eta * shrink).unwrap() <= cap);
            prop_assert!(finite_energy_bound(eta * shrink, p).unwrap() <= fe + 1e-15);
        }
    }
}
