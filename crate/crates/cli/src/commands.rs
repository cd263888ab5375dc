use std::path::PathBuf;

use anyhow::{bail, Result};

use seqrep::benchmarks::{all_benchmarks, BenchmarkLabel};
use seqrep::cutoff::Cutoff;
use seqrep::optimizer::*;
use seqrep::params::{ExperimentParams, ProtocolKind};
use seqrep::simulator::{estimate_uses, DEFAULT_SAMPLES};
use seqrep::yield_model::yield_bounds;
use seqrep::ModelError;

use crate::output::{col, emit, num, rate_columns, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Monte Carlo samples per cut-off when the bounds refuse a position.
const POSITION_MC_SAMPLES: u64 = 20_000;
const POSITION_STEPS: usize = 100;

pub struct Ctx {
    pub params: ExperimentParams,
    pub seed: u64,
    pub samples: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Ctx {
    fn mc(&self) -> McOptions {
        McOptions {
            samples: self.samples.unwrap_or(POSITION_MC_SAMPLES),
            seed: self.seed,
            ..McOptions::default()
        }
    }

    fn emit(&self, table: &Table) -> Result<()> {
        emit(table, self.out.as_deref(), &self.params, self.seed)
    }
}

fn distance_columns(p: &ExperimentParams) -> Vec<(String, String)> {
    vec![
        col("distance_km", num(p.l_total)),
        col("distance_l0", num(p.l_total / p.l0)),
        col("L_A_km", num(p.l_a)),
    ]
}

pub fn single_rate(ctx: &Ctx, n_star: Option<Cutoff>, protocol: Option<ProtocolKind>) -> Result<RateResult, ModelError> {
    let p = &ctx.params;
    let result = match (n_star, protocol) {
        (Some(n), Some(proto)) => rate_at(p, proto, n),
        (Some(n), None) => best_rate_at(p, n),
        (None, Some(proto)) => optimize_cutoff_for(p, proto).and_then(|r| r.with_benchmarks(p)),
        (None, None) => optimize_cutoff(p),
    };
    match (result, n_star) {
        (Err(ModelError::BoundsRequireBobSide { .. }), None) => optimize_cutoff_monte_carlo(p, ctx.mc()),
        (Err(ModelError::BoundsRequireBobSide { .. }), Some(Cutoff::Infinite)) => no_cutoff_rate(p),
        (r, _) => r,
    }
}

pub fn rate(ctx: &Ctx, n_star: Option<Cutoff>, protocol: Option<ProtocolKind>) -> Result<i32> {
    let result = single_rate(ctx, n_star, protocol);
    let p = &ctx.params;
    let r = match &result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_RUNTIME);
        }
    };
    println!(
        "distance      {} km ({} L0), repeater at L_A = {} km",
        num(p.l_total),
        num(p.l_total / p.l0),
        num(p.l_a)
    );
    println!("protocol      {} ({})", r.protocol, r.branch.name());
    println!("cut-off       {}", r.n_star_opt);
    println!("R_upper       {} secret bits per channel use", num(r.r_upper));
    println!("R_lower       {}", num(r.r_lower));
    match r.regime {
        Some(g) => println!("channel uses  [{}, {}] ({}, {})", num(r.uses_lower), num(r.uses_upper), g.name(), crate::output::method_name(r)),
        None => println!("channel uses  {} ({})", num(r.uses_lower), crate::output::method_name(r)),
    }
    println!("e_X, e_Z      {}, {}", num(r.e_x), num(r.e_z));
    println!("key fraction  {}", num(r.skf));
    let mut bm = Table::default();
    for label in BenchmarkLabel::ALL {
        bm.push(vec![
            col("benchmark", label.as_str()),
            col("value", r.benchmark(label).map(num).unwrap_or_default()),
            col("surpassed", r.surpasses(label).to_string()),
        ]);
    }
    print!("\n{}", bm.render());

    if ctx.out.is_some() {
        let mut t = Table::default();
        let mut row = distance_columns(p);
        row.extend(rate_columns(&result));
        t.push(row);
        ctx.emit(&t)?;
    }
    Ok(EXIT_OK)
}

pub fn benchmarks(ctx: &Ctx) -> Result<i32> {
    let values = match all_benchmarks(&ctx.params) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_RUNTIME);
        }
    };
    let mut t = Table::default();
    for v in values {
        let mut row = distance_columns(&ctx.params);
        row.extend([
            col("label", v.label.as_str()),
            col("boundary_case", (v.label.case() as u8).to_string()),
            col("eta", num(v.eta)),
            col("value", num(v.value)),
            col("mean_photons", v.mean_photons.map(num).unwrap_or_default()),
            col("n_bar", v.n_bar.map(num).unwrap_or_default()),
        ]);
        t.push(row);
    }
    print!("{}", t.render());
    if ctx.out.is_some() {
        ctx.emit(&t)?;
    }
    Ok(EXIT_OK)
}

fn finish_sweep(ctx: &Ctx, t: &Table, ok_rows: usize) -> Result<i32> {
    ctx.emit(t)?;
    if ok_rows == 0 && !t.rows.is_empty() {
        eprintln!("error: every point of the sweep failed");
        return Ok(EXIT_RUNTIME);
    }
    Ok(EXIT_OK)
}

/// Inclusive arithmetic range; the end point is kept despite rounding.
pub fn linspace_step(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(to >= from) {
        bail!("need step > 0 and to >= from");
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| from + step * i as f64).collect())
}

pub fn sweep_distance(ctx: &Ctx, distances_l0: &[f64], dark_counts_on: bool) -> Result<i32> {
    let (t, ok) = distance_table(ctx, distances_l0, dark_counts_on);
    finish_sweep(ctx, &t, ok)
}

pub fn distance_table(ctx: &Ctx, distances_l0: &[f64], dark_counts_on: bool) -> (Table, usize) {
    let km: Vec<f64> = distances_l0.iter().map(|d| d * ctx.params.l0).collect();
    let points = distance_sweep(&ctx.params, &km, dark_counts_on);
    let mut t = Table::default();
    let mut ok = 0;
    for pt in &points {
        let mut p = ctx.params.with_midpoint_distance(pt.x);
        if !dark_counts_on {
            p.dark_rate = 0.0;
        }
        let mut row = distance_columns(&p);
        row.push(col("dark_counts", dark_counts_on.to_string()));
        let best = best_no_cutoff_position(&p);
        row.push(col("R_upper_no_cutoff_best_position", best.map(|b| num(b.1)).unwrap_or_default()));
        row.push(col("L_A_fraction_no_cutoff", best.map(|b| num(b.0)).unwrap_or_default()));
        row.extend(rate_columns(&pt.result));
        ok += pt.result.is_ok() as usize;
        t.push(row);
    }
    (t, ok)
}

/// Repeater position maximising the no cut-off rate, scanned in steps of
/// 1% of the total length. Returns `(fraction, R_upper)`.
pub fn best_no_cutoff_position(p: &ExperimentParams) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for i in 0..=POSITION_STEPS {
        let frac = i as f64 / POSITION_STEPS as f64;
        let mut q = *p;
        q.l_a = frac * p.l_total;
        if let Ok(r) = no_cutoff_rate(&q) {
            if best.is_none_or(|b| r.r_upper > b.1) {
                best = Some((frac, r.r_upper));
            }
        }
    }
    best
}

/// Log-spaced distinct integers in `[from, to]`.
pub fn log_cutoffs(from: u64, to: u64, points: usize) -> Result<Vec<u64>> {
    if from == 0 || to < from || points == 0 {
        bail!("need 1 <= from <= to and at least one point");
    }
    let (lo, hi) = ((from as f64).ln(), (to as f64).ln());
    let mut v: Vec<u64> = (0..points)
        .map(|i| {
            let t = if points == 1 { 0.0 } else { i as f64 / (points - 1) as f64 };
            ((lo + t * (hi - lo)).exp().round() as u64).clamp(from, to)
        })
        .collect();
    v.dedup();
    Ok(v)
}

pub fn sweep_cutoff(ctx: &Ctx, cutoffs: &[Cutoff]) -> Result<i32> {
    let (t, ok) = cutoff_table(ctx, cutoffs);
    finish_sweep(ctx, &t, ok)
}

pub fn cutoff_table(ctx: &Ctx, cutoffs: &[Cutoff]) -> (Table, usize) {
    let points = cutoff_sweep(&ctx.params, cutoffs);
    let mut t = Table::default();
    let mut ok = 0;
    for pt in &points {
        let mut row = distance_columns(&ctx.params);
        row.push(col("n_star_requested", pt.x.to_string()));
        for proto in ProtocolKind::ALL {
            let v = rate_at(&ctx.params, proto, pt.x).map(|r| num(r.r_upper)).unwrap_or_default();
            row.push(col(&format!("R_upper_{}", proto.name()), v));
        }
        row.extend(rate_columns(&pt.result));
        ok += pt.result.is_ok() as usize;
        t.push(row);
    }
    (t, ok)
}

pub fn sweep_position(ctx: &Ctx, fractions: &[f64]) -> Result<i32> {
    let (t, ok) = position_table(ctx, fractions);
    finish_sweep(ctx, &t, ok)
}

pub fn position_table(ctx: &Ctx, fractions: &[f64]) -> (Table, usize) {
    let p = &ctx.params;
    let positions: Vec<f64> = fractions.iter().map(|f| f * p.l_total).collect();
    let points = position_sweep(p, &positions, ctx.mc());
    let mut t = Table::default();
    let mut ok = 0;
    for (pt, frac) in points.iter().zip(fractions) {
        let mut q = *p;
        q.l_a = pt.l_a;
        let mut row = distance_columns(&q);
        row.push(col("L_A_fraction", num(*frac)));
        let nc = pt.no_cutoff.as_ref().ok();
        row.push(col("R_upper_no_cutoff", nc.map(|r| num(r.r_upper)).unwrap_or_default()));
        row.push(col("protocol_no_cutoff", nc.map(|r| r.protocol.name().to_string()).unwrap_or_default()));
        row.extend(rate_columns(&pt.optimized));
        ok += pt.optimized.is_ok() as usize;
        t.push(row);
    }
    (t, ok)
}

/// `field:lo:hi:n`, `n` evenly spaced values including both ends.
pub fn parse_axis(spec: &str) -> Result<Axis> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [field, lo, hi, n] = parts.as_slice() else {
        bail!("axis '{spec}': expected field:lo:hi:n");
    };
    let (lo, hi): (f64, f64) = (lo.parse()?, hi.parse()?);
    let n: usize = n.parse()?;
    if n == 0 {
        bail!("axis '{spec}': need at least one value");
    }
    if ExperimentParams::default().get(field).is_none() {
        bail!("axis '{spec}': unknown parameter '{field}'");
    }
    let values = (0..n)
        .map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect();
    Ok(Axis {
        field: field.to_string(),
        values,
    })
}

pub fn sweep_contour(ctx: &Ctx, x: &Axis, y: &Axis, distance_l0: f64) -> Result<i32> {
    match contour_table(ctx, x, y, distance_l0) {
        Ok((t, ok)) => finish_sweep(ctx, &t, ok),
        Err(e) => {
            eprintln!("error: {e}");
            Ok(EXIT_INVALID)
        }
    }
}

pub fn contour_table(ctx: &Ctx, x: &Axis, y: &Axis, distance_l0: f64) -> Result<(Table, usize), ModelError> {
    let d = distance_l0 * ctx.params.l0;
    let cells = contour_sweep(&ctx.params, x, y, d)?;
    let mut t = Table::default();
    let mut ok = 0;
    for c in &cells {
        let mut row = distance_columns(&ctx.params.with_midpoint_distance(d));
        row.push(col(&x.field, num(c.x)));
        row.push(col(&y.field, num(c.y)));
        row.extend(rate_columns(&c.result));
        ok += c.result.is_ok() as usize;
        t.push(row);
    }
    Ok((t, ok))
}

/// The bracketing grid used by the acceptance run.
pub fn default_oracle_grid() -> Vec<(f64, f64, Cutoff)> {
    let mut grid = Vec::new();
    for p_a in [1e-4, 1e-3, 1e-2] {
        for ratio in [1.0, 5.0] {
            for mult in [0.2f64, 5.0] {
                grid.push((p_a, p_a * ratio, Cutoff::Finite((mult / p_a).round() as u64)));
            }
        }
    }
    grid
}

/// `p_A,p_B,n*`.
pub fn parse_point(s: &str) -> Result<(f64, f64, Cutoff)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, n] = parts.as_slice() else {
        bail!("point '{s}': expected p_A,p_B,n_star");
    };
    Ok((a.parse()?, b.parse()?, n.parse()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NoBound,
}

/// One bracketing row: analytic bounds against the simulated mean.
pub fn validate_point(p_a: f64, p_b: f64, n: Cutoff, samples: u64, seed: u64) -> Result<(Vec<(String, String)>, Status), ModelError> {
    let s = estimate_uses(p_a, p_b, n, samples, seed)?;
    let band = 3.0 * s.std_error_uses;
    let bounds = yield_bounds(p_a, p_b, n, 1.0);
    let (lower, upper, regime, status) = match bounds {
        Ok(b) => {
            let inside = s.mean_uses + band >= b.lower && s.mean_uses - band <= b.upper;
            (num(b.lower), num(b.upper), b.regime.name(), if inside { Status::Pass } else { Status::Fail })
        }
        Err(ModelError::BoundsRequireBobSide { .. }) => (String::new(), String::new(), "", Status::NoBound),
        Err(e) => return Err(e),
    };
    let row = vec![
        col("p_A", num(p_a)),
        col("p_B", num(p_b)),
        col("n_star", n.to_string()),
        col("regime", regime),
        col("lower", lower),
        col("mc_mean", num(s.mean_uses)),
        col("mc_3sigma", num(band)),
        col("upper", upper),
        col("samples", samples.to_string()),
        col(
            "status",
            match status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::NoBound => "no analytic bound",
            },
        ),
    ];
    Ok((row, status))
}

pub fn validate(ctx: &Ctx, extra: &[(f64, f64, Cutoff)], default_grid: bool, from_config: bool) -> Result<i32> {
    let samples = ctx.samples.unwrap_or(DEFAULT_SAMPLES);
    let mut points: Vec<(f64, f64, Cutoff)> = if default_grid { default_oracle_grid() } else { Vec::new() };
    points.extend_from_slice(extra);
    if from_config {
        for proto in ProtocolKind::ALL {
            let (a, b) = seqrep::channel_loss::link_pair(&ctx.params, proto)?;
            let n = optimize_cutoff_for(&ctx.params, proto)
                .ok()
                .map(|r| r.n_star_opt)
                .filter(|n| !n.is_infinite())
                .unwrap_or(Cutoff::Finite((10.0 / b.p_click).ceil() as u64));
            points.push((a.p_click, b.p_click, n));
        }
    }
    if points.is_empty() {
        bail!("no points to validate");
    }
    let mut t = Table::default();
    let mut failed = 0;
    for (p_a, p_b, n) in points {
        match validate_point(p_a, p_b, n, samples, ctx.seed) {
            Ok((row, status)) => {
                failed += (status == Status::Fail) as usize;
                t.push(row);
            }
            Err(e) => {
                eprintln!("error at ({p_a}, {p_b}, {n}): {e}");
                return Ok(EXIT_RUNTIME);
            }
        }
    }
    print!("{}", t.render());
    if ctx.out.is_some() {
        ctx.emit(&t)?;
    }
    if failed > 0 {
        eprintln!("{failed} point(s) outside their bounds");
        return Ok(EXIT_RUNTIME);
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(linspace_step(1.0, 3.0, 0.5).unwrap(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(linspace_step(0.0, 0.3, 0.1).unwrap().len(), 4);
        assert!(linspace_step(1.0, 0.0, 1.0).is_err());
        assert_eq!(log_cutoffs(1, 1000, 4).unwrap(), vec![1, 10, 100, 1000]);
        assert_eq!(log_cutoffs(1, 3, 10).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn axis_parsing() {
        let a = parse_axis("p_em:0.2:1:5").unwrap();
        assert_eq!(a.field, "p_em");
        assert_eq!(a.values, vec![0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert!(parse_axis("c:0:1:3").is_err());
        assert!(parse_axis("p_em:0:1").is_err());
    }

    #[test]
    fn point_parsing() {
        assert_eq!(parse_point("0.05, 0.01, 30").unwrap(), (0.05, 0.01, Cutoff::Finite(30)));
        assert_eq!(parse_point("0.1,0.2,inf").unwrap().2, Cutoff::Infinite);
        assert!(parse_point("0.1,0.2").is_err());
    }

    #[test]
    fn refused_point_is_flagged_not_failed() {
        let (row, status) = validate_point(0.05, 0.01, Cutoff::Finite(30), 2000, 1).unwrap();
        assert_eq!(status, Status::NoBound);
        assert_eq!(row.last().unwrap().1, "no analytic bound");
    }
}
