use serde_json::{json, Value};
use tailtrace_core::counterexample as cx;
use tailtrace_core::limits::{Direction, SurrogateValue};
use tailtrace_core::majorize::{hl_majorized, tail_majorized, MajorisationReport, SVD_SLACK};
use tailtrace_core::rearrange::{geometric_probes, MuFunction, StepFunction};
use tailtrace_core::traces::{ih_norm, ih_norm_with_density, tau_omega, trace_transform, OperatorInput};
use tailtrace_core::weights::{
    exists_at_infinity, exists_at_zero, limcond_diagnostic, TailLimsupEstimator, WeightFunction,
};

use crate::args::{At, Command, Common, Format, Mode};
use crate::error::{CliError, CliResult};
use crate::output::{num, nums, opt, Document, Table};
use crate::spec;

/// Output of a successful run and its exit code (0 or 3).
pub struct Outcome {
    pub document: Document,
    pub code: i32,
}

impl Outcome {
    fn ok(document: Document) -> Self {
        Outcome { document, code: 0 }
    }

    fn verdict(document: Document, holds: bool) -> Self {
        Outcome { document, code: if holds { 0 } else { 3 } }
    }
}

pub fn run(command: &Command) -> CliResult<Outcome> {
    let c = command.common();
    let h = spec::weight(&c.weight)?;
    match command {
        Command::Mu(_) => mu(c, &h),
        Command::Majorize(_) => majorize(c, &h),
        Command::Norm(_) => norm(c, &h),
        Command::Trace(_) => trace(c, &h),
        Command::Criteria(_) => criteria(c, &h),
        Command::Counterexample(_) => counterexample(c),
    }
}

/// `--op` and, when requested, `--op2`, drawn from one seeded stream.
fn operators(c: &Common, h: &WeightFunction, need_second: bool) -> CliResult<(OperatorInput, Option<OperatorInput>)> {
    let mut rng = spec::rng(c.seed);
    let op = c.op.as_deref().ok_or_else(|| CliError::Input("--op is required".into()))?;
    let a = spec::operator(op, h, &mut rng)?;
    let b = match (need_second, c.op2.as_deref()) {
        (true, Some(s)) => Some(spec::operator(s, h, &mut rng)?),
        (true, None) => return Err(CliError::Input("--op2 is required".into())),
        (false, _) => None,
    };
    Ok((a, b))
}

fn horizon_value(b: f64) -> Value {
    if b.is_finite() {
        num(b)
    } else {
        Value::String("inf".into())
    }
}

/// Eight points per decade on `[lo, hi]` without near-coincident neighbours.
fn output_grid(lo: f64, hi: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = Vec::new();
    for t in geometric_probes(lo, hi, 8) {
        match grid.last_mut() {
            Some(last) if t <= *last * (1.0 + 1e-9) => *last = t,
            _ => grid.push(t),
        }
    }
    grid
}

/// Geometric grid over `--grid-decades` decades centred at 1.
fn sample_grid(c: &Common) -> Vec<f64> {
    let half = f64::from(c.grid_decades) / 2.0;
    output_grid(10f64.powf(-half), 10f64.powf(half))
}

fn step_of(a: &OperatorInput, which: &str) -> CliResult<StepFunction> {
    match a.mu()? {
        MuFunction::Step(s) => Ok(s),
        MuFunction::Symbolic(_) => Err(CliError::Input(format!("{which} must be a step function, list or matrix"))),
    }
}

fn mu(c: &Common, h: &WeightFunction) -> CliResult<Outcome> {
    let (a, _) = operators(c, h, false)?;
    let doc = match (a.mu()?, c.format) {
        (MuFunction::Step(s), Format::Json) => Document::Json(json!({
            "horizon": horizon_value(s.horizon().value()),
            "breakpoints": nums(s.breakpoints()),
            "values": nums(s.values()),
        })),
        (MuFunction::Step(s), Format::Csv) => {
            let mut t = Table::new(vec!["start", "end", "value"]);
            for (l, r, v) in s.pieces() {
                t.push(vec![l.into(), r.into(), v.into()]);
            }
            Document::Csv(t)
        }
        (m, format) => {
            let grid: Vec<f64> = sample_grid(c).into_iter().filter(|&t| t < m.horizon().value()).collect();
            let values: Vec<f64> = grid.iter().map(|&t| m.eval(t)).collect();
            match format {
                Format::Json => Document::Json(json!({
                    "operator": a.description(),
                    "horizon": horizon_value(m.horizon().value()),
                    "t": nums(&grid),
                    "mu": nums(&values),
                })),
                Format::Csv => {
                    let mut t = Table::new(vec!["t", "mu"]);
                    for (x, v) in grid.iter().zip(&values) {
                        t.push(vec![(*x).into(), (*v).into()]);
                    }
                    Document::Csv(t)
                }
            }
        }
    };
    Ok(Outcome::ok(doc))
}

fn majorize(c: &Common, h: &WeightFunction) -> CliResult<Outcome> {
    let (a, b) = operators(c, h, true)?;
    let b = b.expect("requested");
    let (sa, sb) = (step_of(&a, "--op")?, step_of(&b, "--op2")?);
    let report = match c.mode {
        Mode::Hl => hl_majorized(&sa, &sb)?,
        Mode::Tail => tail_majorized(&sa, &sb)?,
    };
    let through_svd = matches!(a, OperatorInput::Matrix(_)) || matches!(b, OperatorInput::Matrix(_));
    let slack = if through_svd { SVD_SLACK } else { 0.0 };
    let MajorisationReport { worst_margin, witness_t, .. } = report;
    let holds = worst_margin >= -slack;
    let mode = match c.mode {
        Mode::Hl => "hl",
        Mode::Tail => "tail",
    };
    let doc = match c.format {
        Format::Json => Document::Json(json!({
            "mode": mode,
            "holds": holds,
            "worst_margin": num(worst_margin),
            "witness_t": num(witness_t),
            "slack": num(slack),
            "op": a.description(),
            "op2": b.description(),
        })),
        Format::Csv => {
            let mut t = Table::new(vec!["mode", "holds", "worst_margin", "witness_t", "slack"]);
            t.push(vec![mode.into(), holds.into(), worst_margin.into(), witness_t.into(), slack.into()]);
            Document::Csv(t)
        }
    };
    Ok(Outcome::verdict(doc, holds))
}

fn norm(c: &Common, h: &WeightFunction) -> CliResult<Outcome> {
    let (a, _) = operators(c, h, false)?;
    let r = ih_norm_with_density(&a, h, 1)?;
    let doc = match c.format {
        Format::Json => Document::Json(json!({
            "operator": a.description(),
            "weight": h.description(),
            "value": num(r.value),
            "maximizing_t": opt(r.maximizing_t),
            "is_member": r.is_member,
        })),
        Format::Csv => {
            let mut t = Table::new(vec!["t", "profile"]);
            for &(x, v) in &r.profile {
                t.push(vec![x.into(), v.into()]);
            }
            t.trailer.push(format!("member={}", r.is_member));
            Document::Csv(t)
        }
    };
    Ok(Outcome::verdict(doc, r.is_member))
}

fn direction(at: At) -> Direction {
    match at {
        At::Infinity => Direction::AtInfinity,
        At::Zero => Direction::AtZero,
    }
}

fn surrogate_json(v: &SurrogateValue) -> Value {
    let iterates: Vec<Value> = v
        .iterates
        .iter()
        .map(|it| {
            json!({
                "horizon": num(it.horizon),
                "value": num(it.value),
                "window_start": opt(it.window_start),
                "bracket": it.bracket.map_or(Value::Null, |(lo, hi)| nums(&[lo, hi])),
            })
        })
        .collect();
    json!({
        "estimate": num(v.estimate),
        "lower": num(v.lower),
        "upper": num(v.upper),
        "converged": v.converged,
        "a_max": opt(v.a_max),
        "iterates": iterates,
    })
}

fn trace(c: &Common, h: &WeightFunction) -> CliResult<Outcome> {
    let (a, _) = operators(c, h, false)?;
    let s = spec::surrogate(&c.surrogate, c.tol, direction(c.at))?;
    let est = tau_omega(&a, h, &s)?;
    let v = &est.surrogate_value;
    let doc = match c.format {
        Format::Json => {
            let mut body = surrogate_json(v);
            body["operator"] = Value::String(est.operator_digest.clone());
            body["normalized_by"] = Value::String(est.normalized_by.clone());
            body["surrogate"] = Value::String(s.description());
            Document::Json(body)
        }
        Format::Csv => {
            let mut t = Table::new(vec!["horizon", "value"]);
            for it in &v.iterates {
                t.push(vec![it.horizon.into(), it.value.into()]);
            }
            t.trailer.push(format!("estimate={},converged={}", crate::output::fmt_f64(v.estimate), v.converged));
            Document::Csv(t)
        }
    };
    Ok(Outcome::ok(doc))
}

fn criteria(c: &Common, h: &WeightFunction) -> CliResult<Outcome> {
    let est = TailLimsupEstimator::default();
    let (verdict, at) = match c.at {
        At::Infinity => (exists_at_infinity(h, &est)?, "infinity"),
        At::Zero => (exists_at_zero(h, &est)?, "zero"),
    };
    let limcond = match c.at {
        At::Infinity => limcond_diagnostic(h, &est).ok(),
        At::Zero => None,
    };
    let e = &verdict.evidence;
    let doc = match c.format {
        Format::Json => Document::Json(json!({
            "weight": h.description(),
            "at": at,
            "satisfied": verdict.satisfied,
            "limit_estimate": num(e.limit_estimate),
            "ratio_limsup_estimate": num(e.ratio_limsup_estimate),
            "grid_used": e.grid_used,
            "closed_form": e.closed_form,
            "limcond": limcond.map_or(Value::Null, |d| json!({
                "limit": opt(d.limit),
                "liminf": num(d.liminf),
                "limsup": num(d.limsup),
            })),
        })),
        Format::Csv => {
            let mut t =
                Table::new(vec!["weight", "at", "satisfied", "limit_estimate", "ratio_limsup_estimate", "closed_form"]);
            t.push(vec![
                h.description().as_str().into(),
                at.into(),
                verdict.satisfied.into(),
                e.limit_estimate.into(),
                e.ratio_limsup_estimate.into(),
                e.closed_form.into(),
            ]);
            Document::Csv(t)
        }
    };
    Ok(Outcome::verdict(doc, verdict.satisfied))
}

/// Runs the non-member example end to end. Succeeds when beyond the knee
/// `e² − 1` the profile matches `½(1 + log(1+t))`, `f` is not in `I_h`,
/// and the dyadic discretisation of `f` is majorised by that of `g`.
fn counterexample(c: &Common) -> CliResult<Outcome> {
    let h = cx::weight();
    let tt = trace_transform(MuFunction::Symbolic(cx::f()), &h)?;
    let grid = output_grid(cx::knee(), cx::knee() * 10f64.powi(c.grid_decades as i32));
    let profile: Vec<f64> = grid.iter().map(|&t| tt.eval(t)).collect();
    let max_rel_err =
        grid.iter().zip(&profile).map(|(&t, &p)| (p / cx::transform_closed_form(t) - 1.0).abs()).fold(0.0, f64::max);
    let member = ih_norm(&OperatorInput::Symbolic(cx::f()), &h)?.is_member;
    let (fd, gd) = cx::dyadic_pair()?;
    let hl = hl_majorized(&fd, &gd)?;
    let reproduced = !member && hl.holds && max_rel_err <= 1e-8;
    let doc = match c.format {
        Format::Json => Document::Json(json!({
            "weight": h.description(),
            "t": nums(&grid),
            "profile": nums(&profile),
            "max_relative_error": num(max_rel_err),
            "member": member,
            "hl_majorized": hl.holds,
            "worst_margin": num(hl.worst_margin),
        })),
        Format::Csv => {
            let mut t = Table::new(vec!["t", "profile"]);
            for (x, p) in grid.iter().zip(&profile) {
                t.push(vec![(*x).into(), (*p).into()]);
            }
            t.trailer.push(format!("member={member}"));
            Document::Csv(t)
        }
    };
    Ok(Outcome::verdict(doc, reproduced))
}
