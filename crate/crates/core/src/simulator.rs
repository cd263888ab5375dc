//! Monte Carlo execution of the repeater protocol, one raw bit at a time.
//!
//! Attempt counts are drawn by inverse transform rather than attempt by
//! attempt: Alice's attempts per round are geometric, the number of rounds is
//! geometric in the round success probability, and Bob's attempts in the
//! successful round follow the geometric law truncated to `n*`. Error flags
//! are drawn from the Bell-diagonal state reached after Bob's final attempt.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Gamma, Poisson};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel_loss::link_pair;
use crate::cutoff::Cutoff;
use crate::error::{check_positive_probability, ModelError, Result};
use crate::noise::{decay_rates, state_after_attempts, BellCoefficients, DecayRates};
use crate::params::{ExperimentParams, ProtocolKind};
use crate::yield_model::round_success_probability;

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_MAX_SAMPLES: u64 = 1_000_000_000;

/// Raw bits simulated per shard; shard `i` draws from stream `i` of the
/// seeded generator, so results do not depend on the thread count.
const SHARD_SIZE: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ErrorFlags {
    pub x: bool,
    pub z: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimOutcome {
    /// `max(n_A, n_B)`.
    pub n_uses: u64,
    pub rounds: u64,
    pub n_a: u64,
    pub n_b: u64,
    /// Bob's attempts in the successful round.
    pub n_b_final: u64,
    pub errors: Option<ErrorFlags>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimSummary {
    pub mean_uses: f64,
    pub std_error_uses: f64,
    pub e_x: f64,
    pub e_x_std_error: f64,
    pub e_z: f64,
    pub e_z_std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// State of the stored pair after `n` attempts on Bob's link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateModel {
    pub f_prep: f64,
    /// `F_gm alpha_A alpha_B`.
    pub global_depol: f64,
    pub rates: DecayRates,
}

impl StateModel {
    pub fn coefficients(&self, n: u64) -> BellCoefficients {
        state_after_attempts(self.f_prep, self.global_depol, self.rates, n as f64)
    }
}

/// Everything one raw bit needs: click probabilities and the final state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSetup {
    pub p_a: f64,
    pub p_b: f64,
    pub n_star: Cutoff,
    pub state: Option<StateModel>,
}

impl SimSetup {
    pub fn from_params(params: &ExperimentParams, protocol: ProtocolKind, n_star: Cutoff) -> Result<Self> {
        let (a, b) = link_pair(params, protocol)?;
        Ok(SimSetup {
            p_a: a.p_click,
            p_b: b.p_click,
            n_star,
            state: Some(StateModel {
                f_prep: params.f_prep,
                global_depol: params.f_gm * a.alpha * b.alpha,
                rates: decay_rates(params),
            }),
        })
    }
}

fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // (0, 1]
    1.0 - rng.random::<f64>()
}

/// Number of trials up to and including the first success.
pub fn sample_geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let g = (uniform_open(rng).ln() / (-p).ln_1p()).ceil();
    if g < 1.0 {
        1
    } else {
        g as u64
    }
}

/// Geometric variable conditioned on being at most `n`; `p_r = 1 - (1-p)^n`.
fn sample_truncated_geometric<R: Rng + ?Sized>(p: f64, n: u64, p_r: f64, rng: &mut R) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u = rng.random::<f64>();
    let g = ((-u * p_r).ln_1p() / (-p).ln_1p()).ceil();
    (g.max(1.0) as u64).min(n)
}

fn sample_flags<R: Rng + ?Sized>(c: &BellCoefficients, rng: &mut R) -> ErrorFlags {
    let u = rng.random::<f64>() * c.sum();
    // p00: none, p01: X, p10: Z, p11: both
    let (x, z) = if u < c.p00 {
        (false, false)
    } else if u < c.p00 + c.p01 {
        (true, false)
    } else if u < c.p00 + c.p01 + c.p10 {
        (false, true)
    } else {
        (true, true)
    };
    ErrorFlags { x, z }
}

/// Rounds above which Alice's total is drawn in one go.
const LOOP_ROUNDS: u64 = 256;

/// Alice's attempts summed over `rounds` rounds.
///
/// Short runs add one geometric draw per round. Long runs, which occur when
/// Bob's link is far lossier than the cut-off allows for, draw the number of
/// failures from the negative binomial as a Gamma-mixed Poisson instead.
fn alice_attempts<R: Rng + ?Sized>(p_a: f64, rounds: u64, rng: &mut R) -> u64 {
    if p_a >= 1.0 {
        return rounds;
    }
    if rounds <= LOOP_ROUNDS {
        let mut n_a: u64 = 0;
        for _ in 0..rounds {
            n_a = n_a.saturating_add(sample_geometric(p_a, rng));
        }
        return n_a;
    }
    let scale = (1.0 - p_a) / p_a;
    let lambda = Gamma::new(rounds as f64, scale).expect("positive shape and scale").sample(rng);
    let failures = if lambda > 0.0 {
        Poisson::new(lambda).map(|d| d.sample(rng) as u64).unwrap_or(u64::MAX)
    } else {
        0
    };
    rounds.saturating_add(failures)
}

/// One raw bit of the protocol.
pub fn simulate_raw_bit<R: Rng + ?Sized>(setup: &SimSetup, rng: &mut R) -> SimOutcome {
    let SimSetup { p_a, p_b, n_star, .. } = *setup;
    let (rounds, n_b_final, n_b) = match n_star {
        Cutoff::Infinite => {
            let g = sample_geometric(p_b, rng);
            (1, g, g)
        }
        Cutoff::Finite(n) => {
            let p_r = round_success_probability(p_b, n_star);
            let k = sample_geometric(p_r, rng);
            let g = sample_truncated_geometric(p_b, n, p_r, rng);
            (k, g, (k - 1).saturating_mul(n).saturating_add(g))
        }
    };
    let n_a = alice_attempts(p_a, rounds, rng);
    let errors = setup
        .state
        .map(|s| sample_flags(&s.coefficients(n_b_final), rng));
    SimOutcome {
        n_uses: n_a.max(n_b),
        rounds,
        n_a,
        n_b,
        n_b_final,
        errors,
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    count: u64,
    sum: u128,
    sum_sq: u128,
    x_errors: u64,
    z_errors: u64,
}

impl Tally {
    fn add(&mut self, o: &SimOutcome) {
        self.count += 1;
        self.sum += o.n_uses as u128;
        self.sum_sq += (o.n_uses as u128) * (o.n_uses as u128);
        if let Some(f) = o.errors {
            self.x_errors += f.x as u64;
            self.z_errors += f.z as u64;
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.x_errors += other.x_errors;
        self.z_errors += other.z_errors;
        self
    }
}

fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

fn run(setup: &SimSetup, samples: u64, seed: u64) -> Tally {
    let shards = samples.div_ceil(SHARD_SIZE);
    // integer sums make the merge exact, so the result is order independent
    (0..shards)
        .into_par_iter()
        .map(|i| {
            let mut rng = shard_rng(seed, i);
            let n = SHARD_SIZE.min(samples - i * SHARD_SIZE);
            let mut t = Tally::default();
            for _ in 0..n {
                t.add(&simulate_raw_bit(setup, &mut rng));
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}

fn summarize(t: &Tally, seed: u64) -> SimSummary {
    let n = t.count as f64;
    let mean = t.sum as f64 / n;
    let var = if t.count > 1 {
        let exact = t.sum_sq as f64 - (t.sum as f64) * mean;
        (exact / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let rate = |k: u64| {
        let e = k as f64 / n;
        (e, (e * (1.0 - e) / n).sqrt())
    };
    let (e_x, e_x_std_error) = rate(t.x_errors);
    let (e_z, e_z_std_error) = rate(t.z_errors);
    SimSummary {
        mean_uses: mean,
        std_error_uses: (var / n).sqrt(),
        e_x,
        e_x_std_error,
        e_z,
        e_z_std_error,
        samples: t.count,
        seed,
    }
}

fn check_samples(samples: u64, maximum: u64) -> Result<()> {
    if samples == 0 {
        return Err(ModelError::Domain {
            name: "samples",
            value: 0.0,
            reason: "at least one sample is needed",
        });
    }
    if samples > maximum {
        return Err(ModelError::TooManySamples {
            requested: samples,
            maximum,
        });
    }
    Ok(())
}

/// Monte Carlo estimate for a prepared setup, capped at `max_samples`.
pub fn estimate_setup(setup: &SimSetup, samples: u64, seed: u64, max_samples: u64) -> Result<SimSummary> {
    check_positive_probability("p_A", setup.p_a)?;
    check_positive_probability("p_B", setup.p_b)?;
    if setup.n_star == Cutoff::Finite(0) {
        return Err(ModelError::Domain {
            name: "n*",
            value: 0.0,
            reason: "cut-off must be at least one attempt",
        });
    }
    check_samples(samples, max_samples)?;
    Ok(summarize(&run(setup, samples, seed), seed))
}

/// Channel uses only, for bare click probabilities.
pub fn estimate_uses(p_a: f64, p_b: f64, n_star: Cutoff, samples: u64, seed: u64) -> Result<SimSummary> {
    let setup = SimSetup {
        p_a,
        p_b,
        n_star,
        state: None,
    };
    estimate_setup(&setup, samples, seed, DEFAULT_MAX_SAMPLES)
}

/// Channel uses and error rates of `protocol` at the configured distances.
pub fn estimate(
    params: &ExperimentParams,
    protocol: ProtocolKind,
    n_star: Cutoff,
    samples: u64,
    seed: u64,
) -> Result<SimSummary> {
    let setup = SimSetup::from_params(params, protocol, n_star)?;
    estimate_setup(&setup, samples, seed, DEFAULT_MAX_SAMPLES)
}
