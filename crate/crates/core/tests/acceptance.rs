//! Acceptance checks, one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed; exits non-zero if any
//! criterion fails.

use std::f64::consts::{E, LN_2};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqrep::benchmarks::*;
use seqrep::channel_loss::*;
use seqrep::noise::*;
use seqrep::optimizer::*;
use seqrep::params::*;
use seqrep::simulator::*;
use seqrep::skf::*;
use seqrep::yield_model::*;
use seqrep::Cutoff;

const SEED: u64 = 42;

type Outcome = Result<String, String>;

struct Report {
    failures: usize,
}

impl Report {
    fn run(&mut self, id: u32, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let mut out = f();
        let took = start.elapsed();
        if let (Some(limit), Ok(msg)) = (limit, &out) {
            if took > limit {
                out = Err(format!("{msg}; took {took:.2?}, limit {limit:.0?}"));
            }
        }
        match out {
            Ok(msg) => println!("criterion {id:>2}: PASS  {title}: {msg} ({took:.2?})"),
            Err(msg) => {
                self.failures += 1;
                println!("criterion {id:>2}: FAIL  {title}: {msg} ({took:.2?})");
            }
        }
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Compensated sum of the truncated geometric weights, with and without the
/// `e^{-cn}` factor.
fn direct_mean(c: f64, p_b: f64, n_star: u64) -> f64 {
    let ln_q = (-p_b).ln_1p();
    let (mut num, mut num_c) = (0.0f64, 0.0f64);
    let (mut den, mut den_c) = (0.0f64, 0.0f64);
    let kahan = |sum: &mut f64, comp: &mut f64, x: f64| {
        let y = x - *comp;
        let t = *sum + y;
        *comp = (t - *sum) - y;
        *sum = t;
    };
    for n in 1..=n_star {
        let w = p_b * ((n - 1) as f64 * ln_q).exp();
        kahan(&mut num, &mut num_c, w * (-c * n as f64).exp());
        kahan(&mut den, &mut den_c, w);
    }
    num / den
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let c = log_uniform(&mut rng, 1e-8, 1.0);
        let p_b = log_uniform(&mut rng, 1e-6, 1.0);
        let n = rng.random_range(1..=100_000u64);
        let closed = truncated_geometric_mean_exp(c, p_b, Cutoff::Finite(n)).map_err(|e| e.to_string())?;
        let direct = direct_mean(c, p_b, n);
        let rel = ((closed - direct) / direct).abs();
        worst = worst.max(rel);
        ensure(rel <= 1e-10, format!("c={c:e} p_B={p_b:e} n*={n}: rel error {rel:e}"))?;
    }
    Ok(format!("200 tuples, worst relative error {worst:.2e}"))
}

fn oracle_grid() -> Vec<(f64, f64, u64)> {
    let mut grid = Vec::new();
    for p_a in [1e-4, 1e-3, 1e-2] {
        for ratio in [1.0, 5.0] {
            for mult in [0.2f64, 5.0] {
                grid.push((p_a, p_a * ratio, (mult / p_a).round() as u64));
            }
        }
    }
    grid
}

fn criterion_2() -> Outcome {
    for (p_a, p_b, n) in oracle_grid() {
        let b = yield_bounds(p_a, p_b, Cutoff::Finite(n), 1.0).map_err(|e| e.to_string())?;
        let s = estimate_uses(p_a, p_b, Cutoff::Finite(n), 1_000_000, SEED).map_err(|e| e.to_string())?;
        let band = 3.0 * s.std_error_uses;
        ensure(
            s.mean_uses + band >= b.lower && s.mean_uses - band <= b.upper,
            format!(
                "(p_A={p_a:e}, p_B={p_b:e}, n*={n}): MC {:.6e} +- {band:.3e} outside [{:.6e}, {:.6e}]",
                s.mean_uses, b.lower, b.upper
            ),
        )?;
    }
    Ok(format!("12/12 points bracketed at 1e6 samples, seed {SEED}"))
}

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for (p_a, p_b, n) in oracle_grid() {
        match YieldRegime::classify(p_a, Cutoff::Finite(n)) {
            YieldRegime::HighLoss => {
                let beta = 1.0 / (p_a * n as f64);
                let g = g_err(p_a, p_b, n);
                ensure(g < E / (beta * beta), format!("g_err = {g:e} at ({p_a:e}, {p_b:e}, {n})"))?;
            }
            YieldRegime::LowLoss => {
                let beta_p = p_b * n as f64;
                let g = g_err_tilde(p_a, p_b, Cutoff::Finite(n)).map_err(|e| e.to_string())?;
                let bound = 3.0 * coth(0.5) * beta_p * (-beta_p).exp();
                ensure(g < bound, format!("g~_err = {g:e} >= {bound:e} at ({p_a:e}, {p_b:e}, {n})"))?;
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} points, both inequalities strict"))
}

fn criterion_4() -> Outcome {
    let p = default_expected_params().with_midpoint_distance(15.0 * 0.542);
    let protocol = ProtocolKind::Bb84Active;
    let (a, b) = link_pair(&p, protocol).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for n in [100u64, 1_000, 10_000] {
        let analytic = averaged_error_rates(&p, &a, &b, Cutoff::Finite(n)).map_err(|e| e.to_string())?;
        let s = estimate(&p, protocol, Cutoff::Finite(n), 1_000_000, SEED).map_err(|e| e.to_string())?;
        let zx = (s.e_x - analytic.e_x).abs() / s.e_x_std_error;
        let zz = (s.e_z - analytic.e_z).abs() / s.e_z_std_error;
        worst = worst.max(zx).max(zz);
        ensure(
            zx <= 3.0 && zz <= 3.0,
            format!(
                "n*={n}: e_X {:.5} vs {:.5} ({zx:.2} sigma), e_Z {:.5} vs {:.5} ({zz:.2} sigma)",
                s.e_x, analytic.e_x, s.e_z, analytic.e_z
            ),
        )?;
    }
    Ok(format!("3 cut-offs, largest deviation {worst:.2} sigma"))
}

fn criterion_5() -> Outcome {
    let root = finite_energy_crossover();
    ensure((root - 0.796).abs() <= 0.001, format!("root {root}"))?;
    Ok(format!("root {root:.6}"))
}

fn criterion_6() -> Outcome {
    let p = default_expected_params().with_midpoint_distance(15.0 * 0.542);
    let best = optimize_cutoff(&p).map_err(|e| e.to_string())?;
    let big = best_rate_at(&p, Cutoff::Finite(1_000_000)).map_err(|e| e.to_string())?;
    ensure(best.r_upper > 0.0, "optimised rate is zero")?;
    ensure(
        big.r_upper < 1e-6 * best.r_upper,
        format!("R(1e6) = {:e} vs optimum {:e}", big.r_upper, best.r_upper),
    )?;
    Ok(format!(
        "optimum {:.4e} at n*={}, R(1e6) = {:e}",
        best.r_upper, best.n_star_opt, big.r_upper
    ))
}

fn criterion_7() -> Outcome {
    let p = default_expected_params().with_midpoint_distance(11.0 * 0.542);
    let half = p.l_total / 2.0;
    let positions: Vec<f64> = (0..21).map(|i| half + half * i as f64 / 20.0).collect();
    let pts = position_sweep(&p, &positions, McOptions::default());
    let opt: Vec<f64> = pts.iter().map(|pt| pt.optimized.as_ref().map(|r| r.r_upper)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let nc: Vec<f64> = pts.iter().map(|pt| pt.no_cutoff.as_ref().map(|r| r.r_upper)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    ensure(opt.iter().all(|&r| opt[0] >= r), "optimised rate higher off the midpoint")?;
    let argmax = nc.iter().enumerate().fold(0, |best, (i, &r)| if r > nc[best] { i } else { best });
    ensure(argmax != 0, "no cut-off maximum at the midpoint")?;
    Ok(format!(
        "midpoint {:.4e} is the maximum of 21 positions; no cut-off maximum at L_A = {:.3} L0",
        opt[0],
        positions[argmax] / p.l0
    ))
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_8() -> Outcome {
    let p = default_expected_params();
    let distances: Vec<f64> = (0..=40).map(|d| d as f64 * p.l0).collect();
    let sweep = distance_sweep(&p, &distances, false);
    let mut first = Vec::new();
    let mut long = Vec::new();
    for pt in &sweep {
        let r = pt.result.as_ref().map_err(|e| e.to_string())?;
        let x = pt.x / p.l0;
        // short distances: the optimal cut-off does not bind
        if r.regime == Some(YieldRegime::LowLoss) {
            first.push((x, r.r_upper.log2()));
        }
        if x >= 20.0 {
            long.push((x, r.r_upper.log2()));
        }
    }
    ensure(first.len() >= 3, "fewer than three low-loss points")?;
    let s1 = slope(&first);
    let s2 = slope(&long);
    ensure(
        (-0.80..=-0.65).contains(&s1) && (-1.55..=-1.35).contains(&s2),
        format!("slopes {s1:.4} (0..{} L0) and {s2:.4} (20..40 L0)", first.len() - 1),
    )?;
    Ok(format!(
        "slope {s1:.4} over 0..{} L0, {s2:.4} over 20..40 L0",
        first.len() - 1
    ))
}

fn surpassed_labels(p: &ExperimentParams, distances: &[f64]) -> Result<Vec<BenchmarkLabel>, String> {
    let sweep = distance_sweep(p, distances, true);
    let mut out: Vec<BenchmarkLabel> = Vec::new();
    for pt in sweep {
        let r = pt.result.map_err(|e| e.to_string())?;
        for v in r.verdicts {
            if v.surpassed && !out.contains(&v.label) {
                out.push(v.label);
            }
        }
    }
    out.sort();
    Ok(out)
}

fn criterion_9() -> Outcome {
    use BenchmarkLabel::*;
    let p = default_expected_params();
    let d: Vec<f64> = (6..=12).map(|x| x as f64 * p.l0).collect();
    let beaten = surpassed_labels(&p, &d)?;
    for l in [L3d, L3c, L2b] {
        ensure(beaten.contains(&l), format!("{l} never surpassed at 6-12 L0 (surpassed: {beaten:?})"))?;
    }
    ensure(!beaten.contains(&L1a), "1a surpassed")?;

    let mut t = p;
    t.l0 = 22.0;
    t.conversion_eff = 0.3;
    let d: Vec<f64> = (1..=15).map(|x| x as f64 * t.l0).collect();
    let telecom = surpassed_labels(&t, &d)?;
    ensure(
        telecom == vec![L3c, L3d],
        format!("telecom scan surpasses {telecom:?}"),
    )?;
    let names = |v: &[BenchmarkLabel]| v.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(",");
    Ok(format!("6-12 L0 surpasses {}; telecom 1-15 L0 surpasses {}", names(&beaten), names(&telecom)))
}

fn criterion_10() -> Outcome {
    let mut n = 0;
    let mut check = |cond: bool, what: &str| -> Result<(), String> {
        n += 1;
        ensure(cond, what.to_string())
    };
    let e = |r: seqrep::Result<f64>| r.unwrap_or(f64::NAN);
    let p = default_expected_params();

    check(p.p_app() == 0.49 * 0.8, "p_app")?;
    check(p.n_bar() == 10.0 * 30e-9, "n_bar")?;
    check(p.validate().is_ok(), "expected params validate")?;
    let mut bad = p;
    bad.p_em = 1.2;
    check(bad.validate().errors.iter().any(|v| v.field == "p_em"), "p_em = 1.2 rejected")?;
    let mut shifted = p;
    shifted.l_a = 0.1 * p.l_total;
    check(shifted.validate().warnings.iter().any(|v| v.field == "L_A"), "L_A warning")?;

    check(e(fibre_transmissivity(0.0, 0.542)) == 1.0, "eta(0)")?;
    check(e(fibre_transmissivity(0.542, 0.542)) == (-1.0f64).exp(), "eta(L0)")?;
    check(e(fibre_transmissivity(5.42, 0.542)) == (-10.0f64).exp(), "eta(10 L0)")?;
    check(dark_click_probability(0.0, 1.0) == (0.0, 0.0), "no dark counts")?;
    let (nb, pd) = dark_click_probability(10.0, 30e-9);
    check(nb == 3e-7 && (pd - 3e-7).abs() < 1e-13, "p_d small n_bar")?;
    let (nb, pd) = dark_click_probability(1e9, 1e-9);
    check(nb == 1.0 && pd == -(-1.0f64).exp_m1(), "p_d at n_bar 1")?;
    let pc = e(click_probability(0.3, 0.392, 0.46, 0.0, ProtocolKind::Bb84Active));
    check((pc - 0.392 * 0.46 * 0.3).abs() <= 1e-16, "p_click without dark counts")?;
    check(e(click_probability(0.0, 0.392, 0.46, 0.0, ProtocolKind::Bb84Active)) == 0.0, "p_click no light")?;
    check(e(click_probability(1.0, 1.0, 1.0, 0.1, ProtocolKind::Bb84Active)) == 1.0, "p_click certain")?;
    check(e(squashing_alpha(0.3, 0.392, 0.46, 0.0, ProtocolKind::SixStatePassive)) == 1.0, "alpha without dark counts")?;
    check(e(squashing_alpha(0.0, 0.392, 0.46, 1e-3, ProtocolKind::SixStatePassive)) == 0.0, "alpha dark only")?;

    let mut q = p;
    q.a1 = 0.0;
    q.b1 = 0.0;
    check(decay_rates(&q) == DecayRates { a: q.a0, b: q.b0 }, "decay rates a1=b1=0")?;
    let mut q = p;
    q.l_a = q.l_total;
    q.t_prep = 0.0;
    check(decay_rates(&q) == DecayRates { a: q.a0, b: q.b0 }, "decay rates L_B=0")?;
    check(e(truncated_geometric_mean_exp(0.0, 0.1, Cutoff::Finite(50))) == 1.0, "mean at c=0")?;
    check(e(truncated_geometric_mean_exp(0.3, 0.1, Cutoff::Finite(1))) == (-0.3f64).exp(), "mean at n*=1")?;

    let perfect = LinkClickModel::from_parts(Side::Alice, ProtocolKind::Bb84Active, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
    let mut ideal = p;
    ideal.f_gm = 1.0;
    ideal.f_prep = 1.0;
    ideal.a0 = 0.0;
    ideal.a1 = 0.0;
    ideal.b0 = 0.0;
    ideal.b1 = 0.0;
    let r = averaged_error_rates(&ideal, &perfect, &perfect, Cutoff::Finite(10)).unwrap();
    check(r == ErrorRates::symmetric(0.0, 0.0), "noiseless error rates")?;
    let mut dead = p;
    dead.f_gm = 0.0;
    let r = averaged_error_rates(&dead, &perfect, &perfect, Cutoff::Finite(10)).unwrap();
    check(r == ErrorRates::symmetric(0.5, 0.5), "F_gm = 0 error rates")?;
    let zero = BellCoefficients { p00: 1.0, p01: 0.0, p10: 0.0, p11: 0.0 };
    let mixed = BellCoefficients { p00: 0.25, p01: 0.25, p10: 0.25, p11: 0.25 };
    check(bell_coefficients(&ErrorRates::symmetric(0.0, 0.0)).unwrap() == zero, "Bell coefficients at 0")?;
    check(bell_coefficients(&ErrorRates::symmetric(0.5, 0.5)).unwrap() == mixed, "Bell coefficients at 1/2")?;
    check(final_state_coefficients(&ideal, &perfect, &perfect, 37).unwrap() == zero, "final state noiseless")?;
    check(final_state_coefficients(&dead, &perfect, &perfect, 37).unwrap() == mixed, "final state depolarised")?;

    check(skf_bb84(0.0, 0.0).unwrap().value == 1.0, "BB84 at zero error")?;
    check(skf_bb84(0.5, 0.2).unwrap().value == 0.0, "BB84 at e_Z = 1/2")?;
    let s = skf_six_state_ad(&zero).unwrap();
    check(s.value == 1.0 / 3.0 && s.branch == SkfBranch::AdBranch1, "six-state at zero error")?;
    check(skf_six_state_ad(&mixed).unwrap().value == 0.0, "six-state maximally mixed")?;
    let best = best_skf(&ErrorRates::symmetric(0.0, 0.0), &ErrorRates::symmetric(0.0, 0.0)).unwrap();
    check(best.protocol == ProtocolKind::Bb84Active && best.value == 1.0, "BB84 wins at zero error")?;
    let best = best_skf(&ErrorRates::symmetric(0.5, 0.5), &ErrorRates::symmetric(0.5, 0.5)).unwrap();
    check(best.protocol == ProtocolKind::Bb84Active && best.value == 0.0, "tie goes to BB84")?;

    check(e(expected_uses_no_cutoff(1.0, 1.0)) == 1.0, "E[max] at p = 1")?;
    let tiny = 1e-9;
    check((e(expected_uses_no_cutoff(tiny, tiny)) * tiny - 1.5).abs() < 1e-8, "E[max] small p")?;
    let y = yield_bounds(0.01, 0.02, Cutoff::Infinite, 1.0).unwrap();
    check(y.lower == y.upper && y.lower == e(expected_uses_no_cutoff(0.01, 0.02)), "bounds without cut-off")?;

    check(e(pure_loss_capacity(0.0)) == 0.0, "capacity(0)")?;
    check(e(pure_loss_capacity(0.5)) == 1.0, "capacity(1/2)")?;
    check((e(pure_loss_capacity(1e-9)) * LN_2 / 1e-9 - 1.0).abs() < 1e-8, "capacity small eta")?;
    check(e(finite_energy_bound(0.0, 0.49)) == 0.0, "finite energy at eta 0")?;
    check(e(finite_energy_bound(1.0, 0.49)) == thermal_entropy(0.49), "finite energy at eta 1")?;
    check(thermal_entropy(1.0) == 2.0, "g(1)")?;
    check(e(thermal_loss_bound(0.3, 0.0)) == e(pure_loss_capacity(0.3)), "thermal at n_bar 0")?;
    check(e(thermal_loss_bound(0.2, 0.25)) == 0.0, "thermal past its cut-off")?;
    let mut at0 = p;
    at0.l_total = 0.0;
    at0.l_a = 0.0;
    check(benchmark_eta(&at0, BoundaryCase::FibreOnly) == 1.0, "case 1 at L = 0")?;
    let e1 = benchmark_eta(&p, BoundaryCase::FibreOnly);
    check(benchmark_eta(&p, BoundaryCase::WithFilters) == e1 * p.p_ps, "case 2")?;
    check(benchmark_eta(&p, BoundaryCase::WithApparatus) == e1 * p.p_ps * p.p_app(), "case 3")?;
    let root = finite_energy_crossover();
    check(e(finite_energy_bound(1e-6, root - 0.05)) < e(pure_loss_capacity(1e-6)), "below crossover")?;
    let mut direct = p;
    direct.dark_rate = 0.0;
    direct.f_prep = 1.0;
    let want = 0.5 * direct.p_app() * direct.p_ps * e1;
    check((e(direct_transmission_rate(&direct, ProtocolKind::Bb84Active)) - want).abs() <= 1e-15 * want, "3d noiseless")?;
    let mut far = p.with_midpoint_distance(300.0 * p.l0);
    far.dark_rate = 10.0;
    check(e(best_direct_transmission_rate(&far)) == 0.0, "3d dark only")?;
    let b = all_benchmarks(&at0).unwrap();
    check(b[0].value == f64::INFINITY, "1a sentinel")?;
    let b = all_benchmarks(&p).unwrap();
    check(b[2].value <= b[0].value, "2a <= 1a")?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let certain = SimSetup { p_a: 1.0, p_b: 1.0, n_star: Cutoff::Finite(5), state: None };
    let o = simulate_raw_bit(&certain, &mut rng);
    check(o.n_uses == 1 && o.rounds == 1, "certain clicks")?;
    let open = SimSetup { p_a: 0.1, p_b: 0.001, n_star: Cutoff::Infinite, state: None };
    check((0..1000).all(|_| simulate_raw_bit(&open, &mut rng).rounds == 1), "no restarts without cut-off")?;
    let a = estimate(&p, ProtocolKind::Bb84Active, Cutoff::Finite(20), 20_000, SEED).unwrap();
    let b2 = estimate(&p, ProtocolKind::Bb84Active, Cutoff::Finite(20), 20_000, SEED).unwrap();
    check(a == b2, "seeded determinism")?;
    let mut clean = ideal;
    clean.dark_rate = 0.0;
    let s = estimate(&clean, ProtocolKind::SixStatePassive, Cutoff::Finite(20), 20_000, SEED).unwrap();
    check(s.e_x == 0.0 && s.e_z == 0.0, "noiseless simulation")?;

    let mut lossless = clean;
    lossless.l_total = 0.0;
    lossless.l_a = 0.0;
    lossless.p_em = 1.0;
    lossless.p_det = 1.0;
    lossless.p_ps = 1.0;
    check(rate_at(&lossless, ProtocolKind::Bb84Active, Cutoff::Finite(1)).unwrap().r_upper == 0.5, "ideal R = 1/2")?;
    check(
        [Cutoff::Finite(10), Cutoff::Finite(10_000), Cutoff::Infinite]
            .iter()
            .all(|&n| best_rate_at(&dead, n).unwrap().r_upper == 0.0),
        "F_gm = 0 gives R = 0",
    )?;
    let mut frozen = p;
    frozen.a0 = 0.0;
    frozen.a1 = 0.0;
    frozen.b0 = 0.0;
    frozen.b1 = 0.0;
    check(optimize_cutoff(&frozen).unwrap().n_star_opt == Cutoff::Infinite, "no decoherence prefers inf")?;
    check(
        optimize_cutoff(&p).unwrap().r_upper >= best_rate_at(&p, Cutoff::Infinite).unwrap().r_upper,
        "optimum >= no cut-off",
    )?;
    let r0 = optimize_cutoff(&at0).unwrap();
    check(r0.benchmark(BenchmarkLabel::L1a) == Some(f64::INFINITY) && r0.r_upper.is_finite(), "L = 0 rate")?;

    Ok(format!("{n} exact cases"))
}

fn main() {
    let mut report = Report { failures: 0 };
    report.run(1, "closed-form truncated mean vs direct sum", Some(Duration::from_secs(5)), criterion_1);
    report.run(2, "Monte Carlo channel uses inside yield bounds", Some(Duration::from_secs(60)), criterion_2);
    report.run(3, "error-term inequalities", None, criterion_3);
    report.run(4, "simulated QBER vs averaged error rates", None, criterion_4);
    report.run(5, "finite-energy crossover", None, criterion_5);
    report.run(6, "rate collapse at large cut-off, 15 L0", None, criterion_6);
    report.run(7, "midpoint optimality, 11 L0", None, criterion_7);
    report.run(8, "distance scaling without dark counts", None, criterion_8);
    report.run(9, "benchmark verdicts, visible and telecom", None, criterion_9);
    report.run(10, "trivial-value suite", None, criterion_10);
    if report.failures > 0 {
        println!("{} criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
