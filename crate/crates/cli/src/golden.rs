//! Golden fixtures: CSV rows of `id,op,args,expected,tag,tolerance,oracle`.
//!
//! `args` is `key=value` pairs separated by `;`. Keys naming a parameter
//! override the expected parameter set; `L_l0` sets the total length in units
//! of L0 with the repeater at the midpoint. `out` picks which output of the
//! operation is compared. A failing operation evaluates to `error: <message>`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use seqrep::benchmarks::*;
use seqrep::channel_loss::*;
use seqrep::cutoff::Cutoff;
use seqrep::noise::*;
use seqrep::optimizer::*;
use seqrep::params::{ExperimentParams, ProtocolKind, Side};
use seqrep::simulator::{estimate, estimate_uses, simulate_raw_bit, SimSetup};
use seqrep::skf::*;
use seqrep::yield_model::*;

use crate::commands::{self, Ctx, Status};
use crate::config;
use crate::output::rate_columns;

pub const FIXTURE_FILES: [&str; 3] = ["trivial.csv", "derived.csv", "paper.csv"];

#[derive(Debug, Clone, Deserialize)]
pub struct GoldenCase {
    pub id: String,
    pub op: String,
    pub args: String,
    pub expected: String,
    pub tag: String,
    pub tolerance: String,
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    /// A Monte Carlo estimate with its standard error.
    Estimate(f64, f64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(x) => write!(f, "{}", crate::output::num(*x)),
            Value::Estimate(x, se) => write!(f, "{} +- {}", crate::output::num(*x), crate::output::num(*se)),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Text(b.to_string())
    }
}

struct Args {
    map: BTreeMap<String, String>,
}

impl Args {
    fn parse(s: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| anyhow!("argument '{part}' is not key=value"))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Args { map })
    }

    fn str(&self, key: &str) -> Result<&str> {
        self.map
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| anyhow!("missing argument '{key}'"))
    }

    fn f(&self, key: &str) -> Result<f64> {
        let s = self.str(key)?;
        s.parse().with_context(|| format!("argument {key}={s}"))
    }

    fn cutoff(&self, key: &str) -> Result<Cutoff> {
        Ok(self.str(key)?.parse()?)
    }

    fn u(&self, key: &str) -> Result<u64> {
        Ok(self.str(key)?.parse()?)
    }

    fn protocol(&self) -> Result<ProtocolKind> {
        self.str("protocol")?.parse().map_err(|e: String| anyhow!(e))
    }

    fn case(&self) -> Result<BoundaryCase> {
        Ok(match self.u("case")? {
            1 => BoundaryCase::FibreOnly,
            2 => BoundaryCase::WithFilters,
            3 => BoundaryCase::WithApparatus,
            c => bail!("no boundary case {c}"),
        })
    }

    fn out(&self) -> &str {
        self.map.get("out").map(String::as_str).unwrap_or("value")
    }

    /// `--set` style assignments for every parameter key, `L_l0` last.
    fn overrides(&self) -> Result<Vec<String>> {
        let mut v: Vec<String> = self
            .map
            .iter()
            .filter(|(k, _)| ExperimentParams::FIELD_NAMES.contains(&k.as_str()))
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        if let Some(l) = self.map.get("L_l0") {
            let l: f64 = l.parse()?;
            let l0 = match config::effective_params(None, &v) {
                Ok(p) => p.l0,
                Err(e) => bail!("{e:?}"),
            };
            v.push(format!("L_total={}", l * l0));
        }
        Ok(v)
    }

    fn params(&self) -> Result<ExperimentParams> {
        config::effective_params(None, &self.overrides()?).map_err(|e| anyhow!("{e:?}"))
    }
}

fn no_output(op: &str, out: &str) -> anyhow::Error {
    anyhow!("{op} has no output '{out}'")
}

fn bell_field(p: &BellCoefficients, out: &str) -> Result<Value> {
    Ok(match out {
        "p00" => p.p00,
        "p01" => p.p01,
        "p10" => p.p10,
        "p11" => p.p11,
        "sum" => p.sum(),
        "e_x" => p.e_x(),
        "e_z" => p.e_z(),
        _ => return Err(no_output("bell coefficients", out)),
    }
    .into())
}

/// Shared outputs of every rate-producing operation, from the CLI columns.
fn rate_field(r: &seqrep::Result<RateResult>, out: &str) -> Result<Value> {
    let r = match r {
        Ok(r) => r,
        Err(e) => return Ok(format!("error: {e}").into()),
    };
    match out {
        "r_upper" => return Ok(r.r_upper.into()),
        "r_lower" => return Ok(r.r_lower.into()),
        "bracket" => return Ok((r.r_lower <= r.r_upper).into()),
        "surpassed" => {
            let labels: Vec<&str> = BenchmarkLabel::ALL
                .into_iter()
                .filter(|l| r.surpasses(*l))
                .map(|l| l.as_str())
                .collect();
            return Ok(labels.join(" ").into());
        }
        _ => {}
    }
    let cols = rate_columns(&Ok(r.clone()));
    let (_, v) = cols
        .iter()
        .find(|(k, _)| k == out)
        .ok_or_else(|| no_output("rate", out))?;
    Ok(v.parse::<f64>().map(Value::Num).unwrap_or_else(|_| Value::Text(v.clone())))
}

fn lift<T>(r: seqrep::Result<T>, f: impl FnOnce(T) -> Result<Value>) -> Result<Value> {
    match r {
        Ok(t) => f(t),
        Err(e) => Ok(format!("error: {e}").into()),
    }
}

fn eval(op: &str, a: &Args) -> Result<Value> {
    let out = a.out();
    match op {
        "default_expected_params" => {
            let p = seqrep::default_expected_params();
            p.get(out).map(Value::Num).ok_or_else(|| no_output(op, out))
        }
        "validate" => {
            // bypasses the CLI's own check on purpose
            let mut p = ExperimentParams::default();
            for s in a.overrides()? {
                p.apply_assignment(&s)?;
            }
            let r = p.validate();
            let list = |v: &[seqrep::params::Violation]| {
                if v.is_empty() {
                    "none".to_string()
                } else {
                    v.iter().map(|x| x.field.as_str()).collect::<Vec<_>>().join(" ")
                }
            };
            Ok(match out {
                "errors" => list(&r.errors),
                "warnings" => list(&r.warnings),
                _ => return Err(no_output(op, out)),
            }
            .into())
        }
        "fibre_transmissivity" => lift(fibre_transmissivity(a.f("L")?, a.f("L0")?), |x| Ok(x.into())),
        "dark_click_probability" => {
            let (n_bar, p_d) = dark_click_probability(a.f("dark_rate")?, a.f("t_int")?);
            Ok(match out {
                "n_bar" => n_bar,
                "p_d" => p_d,
                _ => return Err(no_output(op, out)),
            }
            .into())
        }
        "click_probability" | "squashing_alpha" => {
            let f = if op == "click_probability" { click_probability } else { squashing_alpha };
            lift(f(a.f("eta")?, a.f("p_app")?, a.f("p_ps")?, a.f("p_d")?, a.protocol()?), |x| Ok(x.into()))
        }
        "link_click_model" => {
            let side = match a.str("side")? {
                "alice" => Side::Alice,
                "bob" => Side::Bob,
                s => bail!("unknown side {s}"),
            };
            lift(LinkClickModel::new(&a.params()?, side, a.protocol()?), |m| {
                Ok(match out {
                    "eta" => m.eta,
                    "p_click" => m.p_click,
                    "alpha" => m.alpha,
                    "p_d" => m.p_d,
                    _ => return Err(no_output(op, out)),
                }
                .into())
            })
        }
        "decay_rates" => {
            let d = decay_rates(&a.params()?);
            Ok(match out {
                "a" => d.a,
                "b" => d.b,
                _ => return Err(no_output(op, out)),
            }
            .into())
        }
        "truncated_geometric_mean_exp" => {
            lift(truncated_geometric_mean_exp(a.f("c")?, a.f("p_b")?, a.cutoff("n_star")?), |x| Ok(x.into()))
        }
        "averaged_error_rates" => {
            let p = a.params()?;
            let n = a.cutoff("n_star")?;
            lift(
                link_pair(&p, a.protocol()?).and_then(|(la, lb)| averaged_error_rates(&p, &la, &lb, n)),
                |e| {
                    Ok(match out {
                        "e_x" => e.e_x,
                        "e_z" => e.e_z,
                        _ => return Err(no_output(op, out)),
                    }
                    .into())
                },
            )
        }
        "bell_coefficients" => lift(bell_coefficients(&ErrorRates::symmetric(a.f("e_xy")?, a.f("e_z")?)), |p| bell_field(&p, out)),
        "final_state_coefficients" => {
            let p = a.params()?;
            let n = a.u("n")?;
            lift(
                link_pair(&p, a.protocol()?).and_then(|(la, lb)| final_state_coefficients(&p, &la, &lb, n)),
                |c| bell_field(&c, out),
            )
        }
        "skf_bb84" | "skf_six_state_ad" | "best_skf" => {
            let e = ErrorRates::symmetric(a.f("e_xy")?, a.f("e_z")?);
            let r = match op {
                "skf_bb84" => skf_bb84(e.e_z, e.e_x),
                "skf_six_state_ad" => bell_coefficients(&e).and_then(|p| skf_six_state_ad(&p)),
                _ => best_skf(&e, &e),
            };
            lift(r, |s| {
                Ok(match out {
                    "value" => s.value.into(),
                    "branch" => s.branch.name().into(),
                    "protocol" => s.protocol.name().into(),
                    _ => return Err(no_output(op, out)),
                })
            })
        }
        "binary_entropy" => Ok(binary_entropy(a.f("p")?).into()),
        "expected_uses_no_cutoff" => lift(expected_uses_no_cutoff(a.f("p_a")?, a.f("p_b")?), |x| Ok(x.into())),
        "yield_bounds" => {
            let p_bsm = a.f("p_bsm").unwrap_or(1.0);
            lift(yield_bounds(a.f("p_a")?, a.f("p_b")?, a.cutoff("n_star")?, p_bsm), |b| {
                Ok(match out {
                    "lower" => b.lower.into(),
                    "upper" => b.upper.into(),
                    "err_term" => b.err_term.into(),
                    "yield_lower" => b.yield_lower.into(),
                    "yield_upper" => b.yield_upper.into(),
                    "regime" => b.regime.name().into(),
                    _ => return Err(no_output(op, out)),
                })
            })
        }
        "approx_expected_uses" => lift(approx_expected_uses(a.f("p_a")?, a.f("p_b")?, a.cutoff("n_star")?), |x| Ok(x.into())),
        "g_err" => Ok(g_err(a.f("p_a")?, a.f("p_b")?, a.u("n_star")?).into()),
        "g_err_tilde" => lift(g_err_tilde(a.f("p_a")?, a.f("p_b")?, a.cutoff("n_star")?), |x| Ok(x.into())),
        "pure_loss_capacity" => lift(pure_loss_capacity(a.f("eta")?), |x| Ok(x.into())),
        "finite_energy_bound" => lift(finite_energy_bound(a.f("eta")?, a.f("P")?), |x| Ok(x.into())),
        "thermal_loss_bound" => lift(thermal_loss_bound(a.f("eta")?, a.f("n_bar")?), |x| Ok(x.into())),
        "benchmark_eta" => Ok(benchmark_eta(&a.params()?, a.case()?).into()),
        "mean_photon_for_case" => Ok(mean_photon_for_case(&a.params()?, a.case()?).into()),
        "finite_energy_crossover" => Ok(finite_energy_crossover().into()),
        "direct_transmission_rate" => lift(direct_transmission_rate(&a.params()?, a.protocol()?), |x| Ok(x.into())),
        "all_benchmarks" => lift(all_benchmarks(&a.params()?), |v| {
            let label: BenchmarkLabel = out.parse().map_err(|e| anyhow!("{e:?}"))?;
            v.iter()
                .find(|b| b.label == label)
                .map(|b| Value::Num(b.value))
                .ok_or_else(|| no_output(op, out))
        }),
        "simulate_raw_bit" => {
            use rand::SeedableRng;
            let setup = SimSetup {
                p_a: a.f("p_a")?,
                p_b: a.f("p_b")?,
                n_star: a.cutoff("n_star")?,
                state: None,
            };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.u("seed")?);
            let o = simulate_raw_bit(&setup, &mut rng);
            Ok(match out {
                "n_uses" => o.n_uses as f64,
                "rounds" => o.rounds as f64,
                "n_a" => o.n_a as f64,
                "n_b" => o.n_b as f64,
                "n_b_final" => o.n_b_final as f64,
                _ => return Err(no_output(op, out)),
            }
            .into())
        }
        "estimate_uses" => lift(
            estimate_uses(a.f("p_a")?, a.f("p_b")?, a.cutoff("n_star")?, a.u("samples")?, a.u("seed")?),
            |s| Ok(Value::Estimate(s.mean_uses, s.std_error_uses)),
        ),
        "estimate" => lift(
            estimate(&a.params()?, a.protocol()?, a.cutoff("n_star")?, a.u("samples")?, a.u("seed")?),
            |s| {
                Ok(match out {
                    "mean_uses" => Value::Estimate(s.mean_uses, s.std_error_uses),
                    "e_x" => Value::Estimate(s.e_x, s.e_x_std_error),
                    "e_z" => Value::Estimate(s.e_z, s.e_z_std_error),
                    _ => return Err(no_output(op, out)),
                })
            },
        ),
        "rate_at" => rate_field(&rate_at(&a.params()?, a.protocol()?, a.cutoff("n_star")?), out),
        "best_rate_at" => rate_field(&best_rate_at(&a.params()?, a.cutoff("n_star")?), out),
        "optimize_cutoff" => rate_field(&optimize_cutoff(&a.params()?), out),
        "no_cutoff_rate" => rate_field(&no_cutoff_rate(&a.params()?), out),
        "optimize_cutoff_monte_carlo" => {
            let mc = McOptions {
                samples: a.u("samples")?,
                seed: a.u("seed")?,
                ..McOptions::default()
            };
            rate_field(&optimize_cutoff_monte_carlo(&a.params()?, mc), out)
        }
        "position_sweep" => {
            let p = a.params()?;
            let pts = position_sweep(&p, &[a.f("fraction")? * p.l_total], McOptions::default());
            match a.str("curve").unwrap_or("optimized") {
                "no_cutoff" => rate_field(&pts[0].no_cutoff, out),
                _ => rate_field(&pts[0].optimized, out),
            }
        }
        "distance_sweep" => {
            let p = a.params()?;
            let dark = a.str("dark_counts").map(|s| s == "true").unwrap_or(true);
            let pts = distance_sweep(&p, &[a.f("distance_l0")? * p.l0], dark);
            rate_field(&pts[0].result, out)
        }
        "cutoff_sweep" => {
            let pts = cutoff_sweep(&a.params()?, &[a.cutoff("n_star")?]);
            rate_field(&pts[0].result, out)
        }
        "contour_sweep" => {
            let axis = |k: &str| -> Result<Axis> {
                Ok(Axis {
                    field: a.str(&format!("{k}_field"))?.to_string(),
                    values: vec![a.f(&format!("{k}_value"))?],
                })
            };
            let p = a.params()?;
            match contour_sweep(&p, &axis("x")?, &axis("y")?, a.f("distance_l0")? * p.l0) {
                Ok(cells) => rate_field(&cells[0].result, out),
                Err(e) => Ok(format!("error: {e}").into()),
            }
        }
        "cmd_rate" => {
            let params = match config::effective_params(None, &a.overrides()?) {
                Ok(p) => p,
                Err(_) => return Ok(Value::Num(commands::EXIT_INVALID as f64)),
            };
            if let Err(config::LoadError::Invalid(r)) = config::check(&params) {
                return Ok(match out {
                    "exit" => Value::Num(commands::EXIT_INVALID as f64),
                    "error_fields" => r.errors.iter().map(|v| v.field.as_str()).collect::<Vec<_>>().join(" ").into(),
                    _ => return Err(no_output(op, out)),
                });
            }
            let ctx = ctx_for(params, a);
            let n_star = a.map.get("n_star").map(|s| s.parse()).transpose()?;
            let r = commands::single_rate(&ctx, n_star, None);
            match out {
                "exit" => Ok(Value::Num(if r.is_ok() { 0.0 } else { commands::EXIT_RUNTIME as f64 })),
                _ => rate_field(&r, out),
            }
        }
        "cmd_sweep" => {
            let ctx = ctx_for(a.params()?, a);
            let (t, ok) = match a.str("kind")? {
                "distance" => commands::distance_table(&ctx, &[a.f("distance_l0")?], a.str("dark_counts").map(|s| s == "true").unwrap_or(true)),
                "cutoff" => commands::cutoff_table(&ctx, &[a.cutoff("n_star")?]),
                "position" => commands::position_table(&ctx, &[a.f("fraction")?]),
                "contour" => {
                    let x = commands::parse_axis(a.str("x")?)?;
                    let y = commands::parse_axis(a.str("y")?)?;
                    match commands::contour_table(&ctx, &x, &y, a.f("distance_l0")?) {
                        Ok(t) => t,
                        Err(e) => return Ok(format!("error: {e}").into()),
                    }
                }
                k => bail!("unknown sweep kind {k}"),
            };
            match out {
                "rows" => Ok((t.rows.len() as f64).into()),
                "ok_rows" => Ok((ok as f64).into()),
                "has_columns" => {
                    let need = a.str("columns")?.split(' ').all(|c| t.columns.iter().any(|h| h == c));
                    Ok(need.into())
                }
                col => {
                    let i = t.columns.iter().position(|h| h == col).ok_or_else(|| no_output(op, out))?;
                    let v = &t.rows[0][i];
                    Ok(v.parse::<f64>().map(Value::Num).unwrap_or_else(|_| Value::Text(v.clone())))
                }
            }
        }
        "cmd_validate" => {
            let r = commands::validate_point(a.f("p_a")?, a.f("p_b")?, a.cutoff("n_star")?, a.u("samples")?, a.u("seed")?);
            lift(r, |(_, status)| {
                Ok(match status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::NoBound => "no analytic bound",
                }
                .into())
            })
        }
        "run_golden_suite" => Ok(match run_suite(Path::new(a.str("dir")?)) {
            Ok(r) => format!("{} failed", r.failed).into(),
            Err(e) => format!("error: {e}").into(),
        }),
        _ => bail!("unknown operation '{op}'"),
    }
}

fn ctx_for(params: ExperimentParams, a: &Args) -> Ctx {
    Ctx {
        params,
        seed: a.u("seed").unwrap_or(42),
        samples: a.u("samples").ok(),
        out: None,
    }
}

/// Compares per the tolerance spec: `exact`, `rel:x`, `abs:x`, `sigma:k`
/// or `prefix`.
pub fn compare(value: &Value, expected: &str, tolerance: &str) -> Result<bool> {
    let (kind, amount) = match tolerance.split_once(':') {
        Some((k, x)) => (k, x.parse::<f64>().with_context(|| format!("tolerance {tolerance}"))?),
        None => (tolerance, 0.0),
    };
    let want = expected.parse::<f64>().ok();
    Ok(match (value, want, kind) {
        (Value::Text(s), _, "prefix") => s.starts_with(expected),
        (Value::Text(s), _, "exact") => s == expected,
        (Value::Num(x), Some(w), "exact") => *x == w || (x.is_nan() && w.is_nan()),
        (Value::Num(x), Some(w), "rel") => {
            if w.is_infinite() || w == 0.0 {
                *x == w
            } else {
                ((x - w) / w).abs() <= amount
            }
        }
        (Value::Num(x), Some(w), "abs") => (x - w).abs() <= amount,
        (Value::Estimate(x, se), Some(w), "sigma") => (x - w).abs() <= amount * se,
        (Value::Estimate(x, _), Some(w), "rel") => ((x - w) / w).abs() <= amount,
        _ => false,
    })
}

pub struct CaseOutcome {
    pub file: String,
    pub case: GoldenCase,
    pub value: Result<Value>,
    pub passed: bool,
}

pub struct SuiteReport {
    pub outcomes: Vec<CaseOutcome>,
    pub failed: usize,
}

pub fn load_cases(path: &Path) -> Result<Vec<GoldenCase>> {
    if !path.exists() {
        bail!("missing fixture file {}", path.display());
    }
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let mut cases = Vec::new();
    for row in rdr.deserialize() {
        let c: GoldenCase = row.with_context(|| format!("reading {}", path.display()))?;
        if !matches!(c.tag.as_str(), "TRIVIAL" | "DERIVED" | "PAPER") {
            bail!("{}: case {} has tag '{}'", path.display(), c.id, c.tag);
        }
        if c.tag == "DERIVED" && c.oracle.trim().is_empty() {
            bail!("{}: derived case {} names no oracle", path.display(), c.id);
        }
        cases.push(c);
    }
    Ok(cases)
}

pub fn run_file(path: &Path) -> Result<Vec<CaseOutcome>> {
    let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(load_cases(path)?
        .into_iter()
        .map(|case| {
            let value = Args::parse(&case.args).and_then(|a| eval(&case.op, &a));
            let passed = match &value {
                Ok(v) => compare(v, &case.expected, &case.tolerance).unwrap_or(false),
                Err(_) => false,
            };
            CaseOutcome {
                file: file.clone(),
                case,
                value,
                passed,
            }
        })
        .collect())
}

pub fn run_suite(dir: &Path) -> Result<SuiteReport> {
    let mut outcomes = Vec::new();
    for f in FIXTURE_FILES {
        outcomes.extend(run_file(&dir.join(f))?);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    Ok(SuiteReport { outcomes, failed })
}

pub fn run(dir: &PathBuf) -> Result<i32> {
    let report = match run_suite(dir) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(commands::EXIT_RUNTIME);
        }
    };
    for o in &report.outcomes {
        let got = match &o.value {
            Ok(v) => v.to_string(),
            Err(e) => format!("evaluation failed: {e:#}"),
        };
        println!(
            "{} {}:{} {} got {} want {} ({})",
            if o.passed { "PASS" } else { "FAIL" },
            o.file,
            o.case.id,
            o.case.op,
            got,
            o.case.expected,
            o.case.tolerance
        );
    }
    println!("{} cases, {} failed", report.outcomes.len(), report.failed);
    Ok(if report.failed == 0 { 0 } else { commands::EXIT_RUNTIME })
}
