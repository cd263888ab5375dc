//! Secret-key rate `R = (Y/2) r`, its optimisation over the cut-off and the
//! protocol, and the distance, position, cut-off and parameter sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::benchmarks::{all_benchmarks, BenchmarkLabel, BenchmarkValue};
use crate::channel_loss::link_pair;
use crate::cutoff::Cutoff;
use crate::error::{ModelError, Result};
use crate::noise::{averaged_error_rates, ErrorRates};
use crate::params::{ExperimentParams, ProtocolKind};
use crate::simulator::{estimate_setup, SimSetup, DEFAULT_MAX_SAMPLES};
use crate::skf::{skf_for, SecretKeyFraction, SkfBranch};
use crate::yield_model::{expected_uses_no_cutoff, yield_bounds, YieldRegime};

/// Number of log-spaced grid points below `10 ceil(1/p_B)`.
const GRID_POINTS: usize = 60;

/// How the channel uses entering the rate were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UsesMethod {
    #[serde(rename = "bounds")]
    Bounds,
    /// `N_NC`, exact without a cut-off for any `p_A`, `p_B`.
    #[serde(rename = "exact_no_cutoff")]
    ExactNoCutoff,
    #[serde(rename = "monte_carlo")]
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub label: BenchmarkLabel,
    pub surpassed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult {
    /// Rate from the upper channel-use bound.
    pub r_lower: f64,
    /// Rate from the lower channel-use bound; the reported rate.
    pub r_upper: f64,
    pub n_star_opt: Cutoff,
    pub protocol: ProtocolKind,
    pub branch: SkfBranch,
    pub skf: f64,
    pub e_x: f64,
    pub e_z: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub uses_lower: f64,
    pub uses_upper: f64,
    pub regime: Option<YieldRegime>,
    pub err_term: f64,
    pub method: UsesMethod,
    pub benchmarks: Vec<BenchmarkValue>,
    pub verdicts: Vec<Verdict>,
}

impl RateResult {
    pub fn surpasses(&self, label: BenchmarkLabel) -> bool {
        self.verdicts.iter().any(|v| v.label == label && v.surpassed)
    }

    pub fn benchmark(&self, label: BenchmarkLabel) -> Option<f64> {
        self.benchmarks.iter().find(|b| b.label == label).map(|b| b.value)
    }

    /// Fills in the six benchmarks at `params` and the verdicts against them.
    pub fn with_benchmarks(mut self, params: &ExperimentParams) -> Result<Self> {
        self.benchmarks = all_benchmarks(params)?;
        self.verdicts = self
            .benchmarks
            .iter()
            .map(|b| Verdict {
                label: b.label,
                surpassed: self.r_upper > b.value,
            })
            .collect();
        Ok(self)
    }
}

/// Click probabilities and key fraction of one protocol at one cut-off.
#[derive(Debug, Clone, Copy)]
struct KeyPoint {
    p_a: f64,
    p_b: f64,
    rates: ErrorRates,
    skf: SecretKeyFraction,
}

fn key_point(params: &ExperimentParams, protocol: ProtocolKind, n_star: Cutoff) -> Result<KeyPoint> {
    let (a, b) = link_pair(params, protocol)?;
    let rates = averaged_error_rates(params, &a, &b, n_star)?;
    let skf = skf_for(protocol, &rates)?;
    Ok(KeyPoint {
        p_a: a.p_click,
        p_b: b.p_click,
        rates,
        skf,
    })
}

fn assemble(
    k: &KeyPoint,
    n_star: Cutoff,
    p_bsm: f64,
    uses_lower: f64,
    uses_upper: f64,
    regime: Option<YieldRegime>,
    method: UsesMethod,
) -> RateResult {
    let r = k.skf.value;
    RateResult {
        r_lower: p_bsm / (2.0 * uses_upper) * r,
        r_upper: p_bsm / (2.0 * uses_lower) * r,
        n_star_opt: n_star,
        protocol: k.skf.protocol,
        branch: k.skf.branch,
        skf: r,
        e_x: k.rates.e_x,
        e_z: k.rates.e_z,
        p_a: k.p_a,
        p_b: k.p_b,
        uses_lower,
        uses_upper,
        regime,
        err_term: uses_upper / uses_lower - 1.0,
        method,
        benchmarks: Vec::new(),
        verdicts: Vec::new(),
    }
}

/// Rate without benchmarks, for the inner loops.
fn evaluate(params: &ExperimentParams, protocol: ProtocolKind, n_star: Cutoff) -> Result<RateResult> {
    let k = key_point(params, protocol, n_star)?;
    let y = yield_bounds(k.p_a, k.p_b, n_star, params.p_bsm)?;
    let mut out = assemble(&k, n_star, params.p_bsm, y.lower, y.upper, Some(y.regime), UsesMethod::Bounds);
    out.err_term = y.err_term;
    Ok(out)
}

/// Rate of `protocol` at a fixed cut-off, with both bounds and the benchmark
/// verdicts. Parameters are not validated here.
pub fn rate_at(params: &ExperimentParams, protocol: ProtocolKind, n_star: Cutoff) -> Result<RateResult> {
    evaluate(params, protocol, n_star)?.with_benchmarks(params)
}

/// The better of the two protocols at a fixed cut-off; ties go to BB84.
pub fn best_rate_at(params: &ExperimentParams, n_star: Cutoff) -> Result<RateResult> {
    let bb = evaluate(params, ProtocolKind::Bb84Active, n_star);
    let six = evaluate(params, ProtocolKind::SixStatePassive, n_star);
    pick(bb, six)?.with_benchmarks(params)
}

fn pick(bb: Result<RateResult>, six: Result<RateResult>) -> Result<RateResult> {
    match (bb, six) {
        (Ok(a), Ok(b)) => Ok(if b.r_upper > a.r_upper { b } else { a }),
        (Ok(a), Err(_)) => Ok(a),
        (Err(_), Ok(b)) => Ok(b),
        (Err(e), Err(_)) => Err(e),
    }
}

/// About 60 distinct log-spaced integers in `[1, 10 ceil(1/p_B)]`.
pub fn cutoff_grid(p_b: f64) -> Vec<u64> {
    let top = 10.0 * (1.0 / p_b).ceil();
    let top = if top.is_finite() { top.min(1e15) } else { 1e15 };
    let mut grid: Vec<u64> = (0..GRID_POINTS)
        .map(|i| {
            let t = i as f64 / (GRID_POINTS - 1) as f64;
            top.powf(t).round().max(1.0) as u64
        })
        .collect();
    grid.dedup();
    grid
}

/// Higher reported rate wins; on a tie, the tighter bracket.
fn better(candidate: &RateResult, best: &Option<RateResult>) -> bool {
    best.as_ref().is_none_or(|b| {
        candidate.r_upper > b.r_upper || (candidate.r_upper == b.r_upper && candidate.r_lower > b.r_lower)
    })
}

/// Best cut-off for one protocol: a log grid plus `inf`, then every integer
/// strictly between the grid neighbours of the best grid point.
pub fn optimize_cutoff_for(params: &ExperimentParams, protocol: ProtocolKind) -> Result<RateResult> {
    let (_, b) = link_pair(params, protocol)?;
    let grid = cutoff_grid(b.p_click);
    let mut best: Option<RateResult> = None;
    let mut best_idx = None;
    let mut first_err = None;
    for (i, &n) in grid.iter().enumerate() {
        match evaluate(params, protocol, Cutoff::Finite(n)) {
            Ok(r) => {
                if better(&r, &best) {
                    best = Some(r);
                    best_idx = Some(i);
                }
            }
            // n* = 1 in the high-loss regime has no bound; skip it
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match evaluate(params, protocol, Cutoff::Infinite) {
        Ok(r) => {
            if better(&r, &best) {
                best = Some(r);
                best_idx = None;
            }
        }
        Err(e) => {
            first_err.get_or_insert(e);
        }
    }

    if let Some(i) = best_idx {
        let lo = if i == 0 { grid[0] } else { grid[i - 1] + 1 };
        let hi = if i + 1 < grid.len() {
            grid[i + 1] - 1
        } else {
            grid[i]
        };
        for n in lo..=hi {
            if n == grid[i] {
                continue;
            }
            if let Ok(r) = evaluate(params, protocol, Cutoff::Finite(n)) {
                if better(&r, &best) {
                    best = Some(r);
                }
            }
        }
    }
    best.ok_or_else(|| first_err.expect("empty grid"))
}

/// Best rate over cut-off and protocol, with benchmarks and verdicts.
pub fn optimize_cutoff(params: &ExperimentParams) -> Result<RateResult> {
    let bb = optimize_cutoff_for(params, ProtocolKind::Bb84Active);
    let six = optimize_cutoff_for(params, ProtocolKind::SixStatePassive);
    pick(bb, six)?.with_benchmarks(params)
}

/// Monte Carlo settings for points the analytic bounds cannot handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McOptions {
    pub samples: u64,
    pub seed: u64,
    /// Log-spaced finite cut-offs tried per protocol.
    pub grid_points: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            samples: 20_000,
            seed: 42,
            grid_points: 16,
        }
    }
}

/// No cut-off rate from the exact `N_NC`, valid for any repeater position.
pub fn no_cutoff_rate(params: &ExperimentParams) -> Result<RateResult> {
    let one = |protocol| -> Result<RateResult> {
        let k = key_point(params, protocol, Cutoff::Infinite)?;
        let uses = expected_uses_no_cutoff(k.p_a, k.p_b)?;
        Ok(assemble(
            &k,
            Cutoff::Infinite,
            params.p_bsm,
            uses,
            uses,
            Some(YieldRegime::LowLoss),
            UsesMethod::ExactNoCutoff,
        ))
    };
    pick(one(ProtocolKind::Bb84Active), one(ProtocolKind::SixStatePassive))?.with_benchmarks(params)
}

/// Cut-off optimisation with simulated channel uses, for `p_B < p_A`.
/// Both rate fields carry the Monte Carlo mean.
pub fn optimize_cutoff_monte_carlo(params: &ExperimentParams, mc: McOptions) -> Result<RateResult> {
    let mut best = Some(no_cutoff_rate(params)?);
    for protocol in ProtocolKind::ALL {
        let (_, b) = link_pair(params, protocol)?;
        let top = 10.0 * (1.0 / b.p_click).ceil();
        let mut grid: Vec<u64> = (0..mc.grid_points)
            .map(|i| top.powf(i as f64 / (mc.grid_points.max(2) - 1) as f64).round().max(1.0) as u64)
            .collect();
        grid.dedup();
        for n in grid {
            let n_star = Cutoff::Finite(n);
            let k = key_point(params, protocol, n_star)?;
            if k.skf.value == 0.0 {
                continue;
            }
            let setup = SimSetup {
                p_a: k.p_a,
                p_b: k.p_b,
                n_star,
                state: None,
            };
            let s = estimate_setup(&setup, mc.samples, mc.seed, DEFAULT_MAX_SAMPLES)?;
            let r = assemble(&k, n_star, params.p_bsm, s.mean_uses, s.mean_uses, None, UsesMethod::MonteCarlo);
            if better(&r, &best) {
                best = Some(r);
            }
        }
    }
    best.expect("seeded with the no cut-off rate").with_benchmarks(params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint<X> {
    pub x: X,
    pub result: std::result::Result<RateResult, ModelError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionPoint {
    pub l_a: f64,
    pub optimized: std::result::Result<RateResult, ModelError>,
    pub no_cutoff: std::result::Result<RateResult, ModelError>,
}

/// Optimised and no cut-off rates for each Alice-repeater distance. Points
/// closer to Alice than to Bob use the Monte Carlo estimator for finite
/// cut-offs.
pub fn position_sweep(params: &ExperimentParams, positions: &[f64], mc: McOptions) -> Vec<PositionPoint> {
    positions
        .par_iter()
        .map(|&l_a| {
            let mut p = *params;
            p.l_a = l_a;
            let analytic = optimize_cutoff(&p);
            let optimized = match analytic {
                Err(ModelError::BoundsRequireBobSide { .. }) => optimize_cutoff_monte_carlo(&p, mc),
                other => other,
            };
            PositionPoint {
                l_a,
                optimized,
                no_cutoff: no_cutoff_rate(&p),
            }
        })
        .collect()
}

/// Optimised rate at each total distance (km) with the repeater half-way.
/// `dark_counts_on = false` sets the dark-count rate to zero.
pub fn distance_sweep(params: &ExperimentParams, distances: &[f64], dark_counts_on: bool) -> Vec<SweepPoint<f64>> {
    distances
        .par_iter()
        .map(|&d| {
            let mut p = params.with_midpoint_distance(d);
            if !dark_counts_on {
                p.dark_rate = 0.0;
            }
            SweepPoint {
                x: d,
                result: optimize_cutoff(&p),
            }
        })
        .collect()
}

/// Best protocol at each fixed cut-off.
pub fn cutoff_sweep(params: &ExperimentParams, cutoffs: &[Cutoff]) -> Vec<SweepPoint<Cutoff>> {
    cutoffs
        .par_iter()
        .map(|&n| SweepPoint {
            x: n,
            result: best_rate_at(params, n),
        })
        .collect()
}

/// A parameter name and the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub field: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourPoint {
    pub x: f64,
    pub y: f64,
    pub result: std::result::Result<RateResult, ModelError>,
}

/// Optimised rate and verdicts over a two-parameter grid at total distance
/// `distance` km, repeater half-way. Rows follow `axis1`, columns `axis2`.
pub fn contour_sweep(params: &ExperimentParams, axis1: &Axis, axis2: &Axis, distance: f64) -> Result<Vec<ContourPoint>> {
    let base = params.with_midpoint_distance(distance);
    for axis in [axis1, axis2] {
        if base.get(&axis.field).is_none() {
            return Err(ModelError::InvalidParams(format!("unknown axis field '{}'", axis.field)));
        }
    }
    let cells: Vec<(f64, f64)> = axis1
        .values
        .iter()
        .flat_map(|&x| axis2.values.iter().map(move |&y| (x, y)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(x, y)| {
            let mut p = base;
            let result = p
                .set(&axis1.field, x)
                .and_then(|_| p.set(&axis2.field, y))
                .map_err(|e| ModelError::InvalidParams(e.to_string()))
                .and_then(|_| {
                    let report = p.validate();
                    match report.errors.first() {
                        Some(v) => Err(ModelError::InvalidParams(v.to_string())),
                        None => optimize_cutoff(&p),
                    }
                });
            ContourPoint { x, y, result }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_expected_params;

    fn ideal() -> ExperimentParams {
        let mut p = default_expected_params();
        p.l_total = 0.0;
        p.l_a = 0.0;
        p.p_em = 1.0;
        p.p_det = 1.0;
        p.p_ps = 1.0;
        p.dark_rate = 0.0;
        p.f_gm = 1.0;
        p.f_prep = 1.0;
        p.a0 = 0.0;
        p.a1 = 0.0;
        p.b0 = 0.0;
        p.b1 = 0.0;
        p
    }

    #[test]
    fn ideal_rate_is_half() {
        let r = rate_at(&ideal(), ProtocolKind::Bb84Active, Cutoff::Finite(1)).unwrap();
        assert_eq!(r.r_upper, 0.5);
        assert_eq!(r.r_lower, 0.5);
        assert_eq!(r.benchmark(BenchmarkLabel::L1a), Some(f64::INFINITY));
        assert!(!r.surpasses(BenchmarkLabel::L1a));
    }

    #[test]
    fn fully_depolarising_gates_give_zero() {
        let mut p = default_expected_params();
        p.f_gm = 0.0;
        for n in [Cutoff::Finite(10), Cutoff::Finite(1000), Cutoff::Infinite] {
            for protocol in ProtocolKind::ALL {
                let r = rate_at(&p, protocol, n).unwrap();
                assert_eq!(r.r_upper, 0.0);
            }
        }
    }

    #[test]
    fn no_decoherence_prefers_no_cutoff() {
        let mut p = default_expected_params();
        p.a0 = 0.0;
        p.a1 = 0.0;
        p.b0 = 0.0;
        p.b1 = 0.0;
        let r = optimize_cutoff(&p).unwrap();
        assert_eq!(r.n_star_opt, Cutoff::Infinite);
    }

    #[test]
    fn optimum_dominates_grid_and_infinity() {
        let p = default_expected_params();
        let best = optimize_cutoff(&p).unwrap();
        let inf = best_rate_at(&p, Cutoff::Infinite).unwrap();
        assert!(best.r_upper >= inf.r_upper);
        for protocol in ProtocolKind::ALL {
            let (_, b) = link_pair(&p, protocol).unwrap();
            for n in cutoff_grid(b.p_click) {
                if let Ok(r) = rate_at(&p, protocol, Cutoff::Finite(n)) {
                    assert!(best.r_upper >= r.r_upper);
                }
            }
        }
        assert!(best.r_lower <= best.r_upper);
        assert!((best.r_upper / best.r_lower - (1.0 + best.err_term)).abs() < 1e-12 || best.r_upper == 0.0);
    }

    #[test]
    fn grid_shape() {
        let g = cutoff_grid(1e-4);
        assert_eq!(g[0], 1);
        assert_eq!(*g.last().unwrap(), 100_000);
        assert!(g.len() >= 50 && g.len() <= 60);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(cutoff_grid(1.0), (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn shifted_towards_alice_uses_simulation() {
        let p = default_expected_params();
        let pts = position_sweep(&p, &[0.4 * p.l_total], McOptions { samples: 2000, ..Default::default() });
        let opt = pts[0].optimized.as_ref().unwrap();
        assert!(matches!(opt.method, UsesMethod::MonteCarlo | UsesMethod::ExactNoCutoff));
        assert!(pts[0].no_cutoff.is_ok());
        assert!(opt.r_upper >= pts[0].no_cutoff.as_ref().unwrap().r_upper);
    }

    #[test]
    fn contour_rejects_bad_points() {
        let p = default_expected_params();
        let a = Axis { field: "p_em".into(), values: vec![0.5, 2.0] };
        let b = Axis { field: "p_ps".into(), values: vec![0.5] };
        let grid = contour_sweep(&p, &a, &b, 9.6 * p.l0).unwrap();
        assert!(grid[0].result.is_ok());
        assert!(grid[1].result.is_err());
        let bad = Axis { field: "c".into(), values: vec![1.0] };
        assert!(contour_sweep(&p, &bad, &b, 1.0).is_err());
    }
}
