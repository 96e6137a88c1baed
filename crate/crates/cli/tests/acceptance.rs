//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on failure.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::f64::consts::{E, LN_2};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tailtrace_core::counterexample as cx;
use tailtrace_core::limits::{self, default_schedule, Direction, LimitSurrogate, SurrogateKind};
use tailtrace_core::majorize::{
    check_singular_value_sum, check_sum_inequalities, head_chain, hl_majorized, tail_chain, tail_majorized, SVD_SLACK,
};
use tailtrace_core::rearrange::{singular_values, MuFunction, StepFunction};
use tailtrace_core::traces::{ih_norm, tail_chain_surrogates, tau_omega, trace_transform, OperatorInput};
use tailtrace_core::weights::{exists_at_infinity, exists_at_zero, TailLimsupEstimator, WeightFunction};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let h = cx::weight();
    let tt = trace_transform(MuFunction::Symbolic(cx::f()), &h).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (t, want) in [(E.powi(2) - 1.0, 1.5), (E.powi(4) - 1.0, 2.5), (E.powi(8) - 1.0, 4.5)] {
        let rel = (tt.eval(t) - want).abs() / want;
        worst = worst.max(rel);
    }
    ensure(worst <= 1e-8, || format!("relative error {worst:e} at the knees"))?;
    let norm = ih_norm(&OperatorInput::Symbolic(cx::f()), &h).map_err(|e| e.to_string())?;
    ensure(!norm.is_member, || "f reported as a member".into())?;
    let (fd, gd) = cx::dyadic_pair().map_err(|e| e.to_string())?;
    let hl = hl_majorized(&fd, &gd).map_err(|e| e.to_string())?;
    ensure(hl.holds && hl.worst_margin >= 0.0, || format!("hl margin {:e}", hl.worst_margin))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.3}s"))?;
    Ok(format!("max rel err {worst:.1e}, non-member, hl margin {:.3e}, {secs:.3}s", hl.worst_margin))
}

fn normalisation() -> Outcome {
    let mut worst = 0.0f64;
    for h in [WeightFunction::log_reciprocal(), WeightFunction::paper_tail(), WeightFunction::exp_decay()] {
        let v = tau_omega(&OperatorInput::neg_hprime(h.clone()), &h, &LimitSurrogate::new(SurrogateKind::LogCesaro))
            .map_err(|e| format!("{}: {e}", h.description()))?;
        let d = (v.surrogate_value.estimate - 1.0).abs();
        ensure(d <= 1e-12, || format!("{}: |τ − 1| = {d:e}", h.description()))?;
        worst = worst.max(d);
    }
    Ok(format!("max |τ − 1| = {worst:.1e}"))
}

/// `h` sampled on the estimator grid `t_min·2^{k/4}`.
fn sampled(h: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let est = TailLimsupEstimator::default();
    let mut out = Vec::new();
    let mut t = est.t_min;
    while t <= est.t_max * 1.1 {
        out.push((t, h(t)));
        t *= est.grid_ratio;
    }
    out
}

fn existence_criteria() -> Outcome {
    let start = Instant::now();
    let est = TailLimsupEstimator::default();
    let err = |e: tailtrace_core::Error| e.to_string();
    ensure(exists_at_infinity(&WeightFunction::log_reciprocal(), &est).map_err(err)?.satisfied, || {
        "logrec at infinity".into()
    })?;
    for alpha in [0.5, 1.0, 2.0] {
        let v = exists_at_infinity(&WeightFunction::power_law(alpha).map_err(err)?, &est).map_err(err)?;
        let r = v.evidence.ratio_limsup_estimate;
        ensure(!v.satisfied && (r - 2f64.powf(-alpha)).abs() <= 1e-3, || format!("power:{alpha} ratio {r}"))?;
    }
    ensure(!exists_at_infinity(&WeightFunction::exp_decay(), &est).map_err(err)?.satisfied, || {
        "exp at infinity".into()
    })?;
    let table = WeightFunction::tabulated(sampled(|t| (1.0 + 1.0 / t).ln())).map_err(err)?;
    let z = exists_at_zero(&table, &est).map_err(err)?;
    ensure(z.satisfied, || format!("tabulated log(1+1/t) at zero: {:?}", z.evidence))?;
    let p = exists_at_zero(&WeightFunction::power_law(1.0).map_err(err)?, &est).map_err(err)?;
    ensure(!p.satisfied, || "power:1 at zero".into())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.3}s"))?;
    Ok(format!("all verdicts as expected; tabulated ratio limsup {:.6}, {secs:.3}s", z.evidence.ratio_limsup_estimate))
}

fn pd_replay() -> Outcome {
    let mut s = vec![10.0f64];
    for n in 1..8 {
        let last = s[n - 1];
        s.push(2f64.powi(n as i32 + 2) * last);
    }
    let windows = s.clone();
    let f = move |x: f64| {
        for (i, &sn) in windows.iter().enumerate() {
            if x >= sn && x < 2f64.powi(i as i32 + 1) * sn {
                return 1.0 - 1.0 / (i + 1) as f64;
            }
        }
        0.0
    };
    let kinks: Vec<f64> = s.iter().enumerate().flat_map(|(i, &x)| [x, 2f64.powi(i as i32 + 1) * x]).collect();
    let schedule: Vec<f64> = (2..=8).map(|n| 2f64.powi(n)).collect();
    let mut a_grid = vec![1.0];
    a_grid.extend(&s);
    let sur = LimitSurrogate::with_schedule_unchecked(
        SurrogateKind::DilationPD,
        Direction::AtInfinity,
        schedule,
        a_grid,
        1e-3,
    )
    .map_err(|e| e.to_string())?;
    let v = limits::p_d_with_kinks(&f, &sur, &kinks).map_err(|e| e.to_string())?;
    ensure(v.estimate >= 0.874, || format!("p_D estimate {}", v.estimate))?;
    let lc = limits::log_cesaro_with_kinks(&f, s[7], &kinks).map_err(|e| e.to_string())?;
    ensure(lc < v.estimate, || format!("log-Cesàro {lc} not below p_D {}", v.estimate))?;
    Ok(format!("p_D = {:.6}, log-Cesàro at s_8 = {lc:.6}", v.estimate))
}

fn rearrangement_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for k in 0..200 {
        let f = oracle::random_step(&mut rng, 12);
        let mu = f.rearrange();
        ensure(mu == oracle::brute_force_rearrange(&f), || format!("case {k}: {f:?}"))?;
        let end = f.breakpoints().last().copied().unwrap_or(1.0).max(1.0);
        for _ in 0..50 {
            let t = rng.gen_range(0.0..end * 1.25);
            if mu.breakpoints().contains(&t) {
                continue;
            }
            let want = oracle::right_continuous_inverse(&f, t);
            ensure(mu.eval(t) == want, || format!("case {k}: μ({t}) = {} vs {want}", mu.eval(t)))?;
        }
    }
    Ok("200 functions, 50 probes each, exact".into())
}

fn svd_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let n = rng.gen_range(1..=4);
        let m = oracle::random_complex_matrix(&mut rng, n);
        let got = singular_values(&m, 1e-15).map_err(|e| e.to_string())?;
        let want = oracle::singular_values_by_charpoly(&m);
        ensure(got.values().len() == want.len(), || format!("case {k}: rank mismatch"))?;
        for (a, b) in got.values().iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    let grid = [0.5, 1.0, 1.5, 2.0];
    for k in 0..100 {
        let n = rng.gen_range(1..=4);
        let (a, b) = (oracle::random_psd(&mut rng, n), oracle::random_psd(&mut rng, n));
        let r = check_singular_value_sum(&a, &b, &grid, 1e-15).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("pair {k}: margin {:e} at {}", r.worst_margin, r.witness_t))?;
    }
    Ok(format!("max deviation {worst:.1e}; 100 pointwise sum checks hold"))
}

fn chains() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let h = WeightFunction::log_reciprocal();
    let sur = LimitSurrogate::ending_at(SurrogateKind::LogCesaro, 1e9, 1.0, 1e-3).map_err(|e| e.to_string())?;
    let surrogate_slack = 1e-9;
    let ordered = |[low, mid, high]: [f64; 3]| low <= mid + surrogate_slack && mid <= high + surrogate_slack;
    for k in 0..50 {
        let n = rng.gen_range(1..=6);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=16) as f64 / 8.0).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=16) as f64 / 8.0).collect();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let mu = |v: &[f64]| StepFunction::unit_steps(v).map(|s| s.rearrange()).map_err(|e| e.to_string());
        let (ma, mb, ms) = (mu(&a)?, mu(&b)?, mu(&sum)?);
        let hc = head_chain(&ma, &mb, &ms, 0.0);
        let tc = tail_chain(&ma, &mb, &ms, 0.0);
        ensure(hc.holds && tc.holds, || format!("diagonal pair {k}: {hc:?} {tc:?}"))?;
        let s = tail_chain_surrogates(&ma, &mb, &ms, &h, &sur).map_err(|e| e.to_string())?;
        ensure(ordered(s), || format!("diagonal pair {k}: surrogate chain {s:?}"))?;
    }
    for k in 0..50 {
        let (a, b) = (oracle::random_psd(&mut rng, 3), oracle::random_psd(&mut rng, 3));
        let (pointwise, head) =
            check_sum_inequalities(&a, &b, &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0], 1e-15).map_err(|e| e.to_string())?;
        ensure(pointwise.holds && head.holds, || format!("matrix pair {k}: {pointwise:?} {head:?}"))?;
        let sv = |m: &tailtrace_core::rearrange::MatrixOperator| {
            singular_values(m, 1e-15).map(|l| l.to_step()).map_err(|e| e.to_string())
        };
        let sum = a.add(&b).map_err(|e| e.to_string())?;
        let (ma, mb, ms) = (sv(&a)?, sv(&b)?, sv(&sum)?);
        let slack = SVD_SLACK * ms.integral().max(1.0);
        let hc = head_chain(&ma, &mb, &ms, slack);
        let tc = tail_chain(&ma, &mb, &ms, slack);
        ensure(hc.holds && tc.holds, || format!("matrix pair {k}: {hc:?} {tc:?}"))?;
        let s = tail_chain_surrogates(&ma, &mb, &ms, &h, &sur).map_err(|e| e.to_string())?;
        ensure(ordered(s), || format!("matrix pair {k}: surrogate chain {s:?}"))?;
    }
    Ok("50 diagonal and 50 PSD 3x3 pairs, integral and surrogate chains ordered".into())
}

fn dilation_defect() -> Outcome {
    let s: Vec<f64> = {
        let mut v = vec![10.0f64];
        for n in 1..8 {
            let last = v[n - 1];
            v.push(2f64.powi(n as i32 + 2) * last);
        }
        v
    };
    let windows = s.clone();
    let staircase = move |x: f64| {
        for (i, &sn) in windows.iter().enumerate() {
            if x >= sn && x < 2f64.powi(i as i32 + 1) * sn {
                return 1.0 - 1.0 / (i + 1) as f64;
            }
        }
        0.0
    };
    let stair_kinks: Vec<f64> = s.iter().enumerate().flat_map(|(i, &x)| [x, 2f64.powi(i as i32 + 1) * x]).collect();
    type Symbol = Box<dyn Fn(f64) -> f64>;
    let symbols: Vec<(&str, Symbol, f64, Vec<f64>)> = vec![
        ("(1+s)/(1+2s)", Box::new(|x: f64| (1.0 + x) / (1.0 + 2.0 * x)), 1.0, vec![]),
        ("sin(log s)", Box::new(|x: f64| x.ln().sin()), 1.0, vec![]),
        ("indicator of [0,100)", Box::new(|x: f64| if x < 100.0 { 1.0 } else { 0.0 }), 1.0, vec![100.0]),
        ("windowed staircase", Box::new(staircase), 0.875, stair_kinks),
        ("2 + cos(sqrt(log s))", Box::new(|x: f64| 2.0 + x.max(1.0).ln().sqrt().cos()), 3.0, vec![1.0]),
    ];
    let mut tightest = f64::INFINITY;
    for (name, f, sup, kinks) in &symbols {
        let half: Vec<f64> = kinks.iter().map(|k| 0.5 * k).collect();
        let g = |x: f64| f(2.0 * x);
        for t in default_schedule() {
            let a = limits::log_cesaro_with_kinks(f, t, kinks).map_err(|e| e.to_string())?;
            let b = limits::log_cesaro_with_kinks(&g, t, &half).map_err(|e| e.to_string())?;
            let bound = 2.0 * LN_2 * sup / t.ln();
            let d = (a - b).abs();
            ensure(d <= bound, || format!("{name} at t = {t:e}: defect {d:e} > {bound:e}"))?;
            tightest = tightest.min(bound - d);
        }
    }
    Ok(format!("5 symbols, 7 horizons; smallest gap to the bound {tightest:.3e}"))
}

fn tail_respect() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let h = WeightFunction::log_reciprocal();
    let sur = LimitSurrogate::new(SurrogateKind::LogCesaro);
    let (mut pairs, mut draws) = (0, 0);
    let mut worst = f64::NEG_INFINITY;
    while pairs < 100 {
        draws += 1;
        ensure(draws < 100_000, || "too few tail-majorised pairs drawn".into())?;
        let (x, y) = (oracle::random_step(&mut rng, 8), oracle::random_step(&mut rng, 8));
        let (a, b) = if tail_majorized(&x, &y).map_err(|e| e.to_string())?.holds {
            (x, y)
        } else if tail_majorized(&y, &x).map_err(|e| e.to_string())?.holds {
            (y, x)
        } else {
            continue;
        };
        pairs += 1;
        let ta = tau_omega(&OperatorInput::Step(a), &h, &sur).map_err(|e| e.to_string())?.surrogate_value;
        let tb = tau_omega(&OperatorInput::Step(b), &h, &sur).map_err(|e| e.to_string())?.surrogate_value;
        for (ia, ib) in ta.iterates.iter().zip(&tb.iterates) {
            let excess = ia.value - ib.value;
            worst = worst.max(excess);
            ensure(excess <= 1e-12, || format!("pair {pairs} at t = {:e}: excess {excess:e}", ia.horizon))?;
        }
    }
    Ok(format!("100 pairs from {draws} draws; largest τ(A) − τ(B) = {worst:.3e}"))
}

fn cli_suite(dir: &std::path::Path) -> Result<Vec<u8>, String> {
    let file = dir.join("op.json");
    std::fs::write(&file, r#"{"horizon": 6, "breakpoints": [0, 1, 2.5, 6], "values": [1, 3, 2]}"#)
        .map_err(|e| e.to_string())?;
    let file_spec = format!("file:{}", file.display());
    let runs: Vec<Vec<&str>> = vec![
        vec!["mu", "--op", "steps:3,1,2,2"],
        vec!["mu", "--op", &file_spec, "--format", "csv"],
        vec!["mu", "--op", "random-psd:4", "--seed", "3"],
        vec!["mu", "--op", "mu:neg-hprime", "--weight", "papertail", "--format", "csv"],
        vec!["majorize", "--op", "random-psd:3", "--op2", "random-psd:3", "--seed", "5"],
        vec!["majorize", "--mode", "tail", "--op", "steps:1,1", "--op2", &file_spec],
        vec!["norm", "--op", "random-psd:3", "--seed", "8", "--weight", "logrec"],
        vec!["norm", "--op", "steps:2,1", "--weight", "papertail", "--format", "csv"],
        vec!["trace", "--op", "mu:neg-hprime", "--weight", "logrec", "--surrogate", "logcesaro:t=1e12"],
        vec!["trace", "--op", "random-psd:2", "--seed", "1", "--surrogate", "pd:t=1e10,a=2^30"],
        vec!["trace", "--op", &file_spec, "--surrogate", "bracket", "--format", "csv"],
        vec!["criteria", "--weight", "power:1"],
        vec!["criteria", "--weight", "logrec", "--format", "csv"],
        vec!["criteria", "--weight", "papertail", "--at", "zero"],
        vec!["counterexample", "--format", "csv"],
        vec!["counterexample", "--grid-decades", "4"],
    ];
    let mut out = Vec::new();
    for args in runs {
        let o = Command::new(env!("CARGO_BIN_EXE_tailtrace")).args(&args).output().map_err(|e| e.to_string())?;
        out.extend(format!("$ {} -> {:?}\n", args.join(" "), o.status.code()).into_bytes());
        out.extend(o.stdout);
        out.extend(o.stderr);
    }
    Ok(out)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = cli_suite(dir.path())?;
    let second = cli_suite(dir.path())?;
    ensure(first == second, || "outputs differ between runs".into())?;
    Ok(format!("16 invocations, {} identical bytes", first.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("counterexample reproduction", counterexample),
        ("normalisation", normalisation),
        ("existence criteria", existence_criteria),
        ("p_D construction replay", pd_replay),
        ("rearrangement oracle", rearrangement_oracle),
        ("SVD oracle", svd_oracle),
        ("integral chains", chains),
        ("dilation-defect bound", dilation_defect),
        ("tail-respect monotonicity", tail_respect),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
