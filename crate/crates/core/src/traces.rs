//! The `I_h` norm, the trace transform `T x(t) = (1/h(t))∫_t^b x`, the
//! estimator `τ_ω(A) = ω(T μ(A))` on surrogates, and spectral cuts.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::limits::{Direction, LimitSurrogate, SurrogateValue};
use crate::majorize;
use crate::quad;
use crate::rearrange::{
    geometric_probes, mu_of_list, singular_values, Horizon, MatrixOperator, MonotoneHint, MuFunction,
    SingularValueList, StepFunction, SymbolicFunction, T_MAX, T_MIN,
};
use crate::weights::{TailKind, WeightFunction};

/// Profile level above which an operator is declared outside `I_h`.
pub const DIV_THRESHOLD: f64 = 1e9;
/// Convergence tolerance for matrix singular values.
pub const SVD_TOL: f64 = 1e-14;
const TREND_POINTS: usize = 5;
const PROBES_PER_PIECE: usize = 8;
const MAX_REFINED_PEAKS: usize = 64;
const MAX_REFINED_PIECES: usize = 4096;

/// Concrete realisations of an operator.
#[derive(Debug, Clone)]
pub enum OperatorInput {
    Step(StepFunction),
    /// Taken to be its own rearrangement; must be nonincreasing.
    Symbolic(SymbolicFunction),
    Matrix(MatrixOperator),
    List(SingularValueList),
    /// `μ = c·(−h′)` on `(0, b)`, with tail `c·(h(t) − h(b⁻))`.
    NegHPrime {
        weight: WeightFunction,
        horizon: Horizon,
        scale: f64,
    },
}

impl OperatorInput {
    pub fn neg_hprime(weight: WeightFunction) -> Self {
        OperatorInput::NegHPrime { weight, horizon: Horizon::INFINITE, scale: 1.0 }
    }

    pub fn description(&self) -> String {
        match self {
            OperatorInput::Step(s) => format!("step function with {} pieces", s.values().len()),
            OperatorInput::Symbolic(s) => format!("symbolic function {}", s.label()),
            OperatorInput::Matrix(m) => format!("{}x{} matrix", m.dim(), m.dim()),
            OperatorInput::List(l) => format!("singular value list of length {}", l.values().len()),
            OperatorInput::NegHPrime { weight, horizon, scale } => {
                let b = if horizon.is_finite() { format!(" on (0, {})", horizon.value()) } else { String::new() };
                if *scale == 1.0 {
                    format!("-h' for h = {}{b}", weight.description())
                } else {
                    format!("{scale}*(-h') for h = {}{b}", weight.description())
                }
            }
        }
    }

    /// `μ(A)`.
    pub fn mu(&self) -> Result<MuFunction> {
        match self {
            OperatorInput::Step(s) => Ok(MuFunction::Step(s.rearrange())),
            OperatorInput::Symbolic(s) => {
                if s.monotone() != MonotoneHint::Nonincreasing {
                    return Err(Error::Precondition(format!(
                        "symbolic input {} must be declared nonincreasing",
                        s.label()
                    )));
                }
                Ok(MuFunction::Symbolic(s.clone()))
            }
            OperatorInput::Matrix(m) => Ok(MuFunction::Step(mu_of_list(&singular_values(m, SVD_TOL)?))),
            OperatorInput::List(l) => Ok(MuFunction::Step(mu_of_list(l))),
            OperatorInput::NegHPrime { weight, horizon, scale } => {
                Ok(MuFunction::Symbolic(neg_hprime_function(weight, *horizon, *scale)?))
            }
        }
    }

    /// Positivity in the operator sense: PSD matrices, non-negative functions.
    pub fn is_positive(&self) -> bool {
        match self {
            OperatorInput::Matrix(m) => m.is_positive_semidefinite(1e-12),
            OperatorInput::NegHPrime { scale, .. } => *scale >= 0.0,
            _ => true,
        }
    }

    pub fn scale(&self, c: f64) -> Result<OperatorInput> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(invalid!("scale factor must be non-negative and finite"));
        }
        Ok(match self {
            OperatorInput::Step(s) => OperatorInput::Step(s.scale(c)?),
            OperatorInput::Symbolic(s) => {
                let (f, tail) = (s.evaluator(), s.has_closed_tail().then(|| s.clone()));
                let mut out = SymbolicFunction::from_fn(
                    &format!("{c}*{}", s.label()),
                    s.horizon(),
                    move |t| c * f(t),
                    s.monotone(),
                );
                if let Some(orig) = tail {
                    out = out.with_tail(move |t| c * orig.tail_integral(t).map(|v| v.value).unwrap_or(f64::INFINITY));
                }
                OperatorInput::Symbolic(out)
            }
            OperatorInput::Matrix(m) => OperatorInput::Matrix(m.scale(c)),
            OperatorInput::List(l) => {
                OperatorInput::List(SingularValueList::new(l.values().iter().map(|v| c * v).collect())?)
            }
            OperatorInput::NegHPrime { weight, horizon, scale } => {
                OperatorInput::NegHPrime { weight: weight.clone(), horizon: *horizon, scale: c * scale }
            }
        })
    }
}

fn neg_hprime_function(h: &WeightFunction, horizon: Horizon, scale: f64) -> Result<SymbolicFunction> {
    let end = end_value(h, horizon);
    let (h1, h2) = (h.clone(), h.clone());
    Ok(SymbolicFunction::from_fn(
        &format!("-h' ({})", h.description()),
        horizon,
        move |t| -scale * h1.right_derivative(t),
        MonotoneHint::Nonincreasing,
    )
    .with_tail(move |t| scale * (h2.eval(t) - end).max(0.0)))
}

/// `h(b⁻)`, or `h(∞)` on the infinite horizon.
fn end_value(h: &WeightFunction, horizon: Horizon) -> f64 {
    if horizon.is_finite() {
        h.eval(horizon.value())
    } else {
        h.limit_at_infinity()
    }
}

/// `t ↦ (1/h(t))∫_t^b x(s) ds`.
#[derive(Debug, Clone)]
pub struct TraceTransform {
    x: MuFunction,
    h: WeightFunction,
    /// `(c, h(b⁻))` when `x = c·(−h′)`, giving the closed form `c(1 − h(b⁻)/h(t))`.
    exact: Option<(f64, f64)>,
}

impl TraceTransform {
    pub fn eval(&self, t: f64) -> f64 {
        let b = self.x.horizon().value();
        if !(t > 0.0) || t >= b {
            return 0.0;
        }
        if let Some((c, end)) = self.exact {
            return if end == 0.0 { c } else { c * (1.0 - end / self.h.eval(t)) };
        }
        let tail = self.x.tail_integral(t).unwrap_or(f64::INFINITY);
        let ht = self.h.eval(t);
        if ht > 0.0 {
            tail / ht
        } else if tail == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// Points where the transform may fail to be smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.x {
            MuFunction::Step(s) => s.breakpoints().iter().copied().filter(|&t| t > 0.0).collect(),
            MuFunction::Symbolic(s) if s.horizon().is_finite() => alloc::vec![s.horizon().value()],
            MuFunction::Symbolic(_) => Vec::new(),
        }
    }

    pub fn function(&self) -> &MuFunction {
        &self.x
    }
}

/// The trace transform of `x` with respect to `h`.
pub fn trace_transform(x: MuFunction, h: &WeightFunction) -> Result<TraceTransform> {
    let b = x.horizon().value();
    let probe = if b.is_finite() { 0.5 * b } else { 1.0 };
    if !x.tail_integral(probe)?.is_finite() {
        return Err(Error::UnboundedTail);
    }
    Ok(TraceTransform { x, h: h.clone(), exact: None })
}

/// Trace transform of `μ(A)`, using the closed form for `−h′` inputs.
pub fn trace_transform_of(a: &OperatorInput, h: &WeightFunction) -> Result<TraceTransform> {
    let mu = a.mu()?;
    if let OperatorInput::NegHPrime { weight, horizon, scale } = a {
        if weight.description() == h.description() && !matches!(h.kind(), crate::weights::WeightKind::Custom(_)) {
            return Ok(TraceTransform { x: mu, h: h.clone(), exact: Some((*scale, end_value(h, *horizon))) });
        }
    }
    trace_transform(mu, h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IhNormResult {
    /// `+∞` for non-members.
    pub value: f64,
    /// `Some(0.0)` stands for the limit `t → 0⁺`.
    pub maximizing_t: Option<f64>,
    pub is_member: bool,
    /// Sorted by `t`.
    pub profile: Vec<(f64, f64)>,
}

/// `‖A‖_{I_h} = sup_{t>0} (1/h(t))∫_t^b μ(s, A) ds`.
pub fn ih_norm(a: &OperatorInput, h: &WeightFunction) -> Result<IhNormResult> {
    ih_norm_with_density(a, h, 1)
}

/// As [`ih_norm`] with `density` times as many probes.
pub fn ih_norm_with_density(a: &OperatorInput, h: &WeightFunction, density: usize) -> Result<IhNormResult> {
    let density = density.max(1);
    let mu = a.mu()?;
    let tt = match trace_transform_of(a, h) {
        Ok(tt) => tt,
        Err(Error::UnboundedTail) => {
            return Ok(IhNormResult { value: f64::INFINITY, maximizing_t: None, is_member: false, profile: Vec::new() })
        }
        Err(e) => return Err(e),
    };
    let phi = |t: f64| tt.eval(t);
    let b = mu.horizon().value();
    let mut probes = match &mu {
        MuFunction::Step(s) => step_probes(s, PROBES_PER_PIECE * density),
        MuFunction::Symbolic(_) => {
            let top = if b.is_finite() { b * (1.0 - 1e-12) } else { T_MAX };
            let lo = if b.is_finite() { T_MIN * b } else { T_MIN };
            geometric_probes(lo, top, PROBES_PER_PIECE * density)
        }
    };
    probes.sort_by(f64::total_cmp);
    probes.dedup();
    let mut profile: Vec<(f64, f64)> = probes.iter().map(|&t| (t, phi(t))).collect();

    if profile.iter().any(|p| !p.1.is_finite()) {
        return Ok(IhNormResult { value: f64::INFINITY, maximizing_t: None, is_member: false, profile });
    }
    // step functions have compact support and are always members
    if let MuFunction::Symbolic(_) = mu {
        if profile.iter().any(|p| p.1 > DIV_THRESHOLD) {
            return Ok(IhNormResult { value: f64::INFINITY, maximizing_t: None, is_member: false, profile });
        }
        let mut thin: Vec<(f64, f64)> = Vec::new();
        for &p in &profile {
            match thin.last() {
                Some(q) if p.0 <= q.0 * (1.0 + 1e-6) => {}
                _ => thin.push(p),
            }
        }
        let growing_at_zero = growing(thin.iter().take(TREND_POINTS).rev().map(|p| p.1));
        let growing_at_inf = !b.is_finite() && growing(thin.iter().rev().take(TREND_POINTS).rev().map(|p| p.1));
        if growing_at_zero || growing_at_inf {
            return Ok(IhNormResult { value: f64::INFINITY, maximizing_t: None, is_member: false, profile });
        }
    }

    // t → 0⁺ limit
    let h0 = h.eval(0.0);
    let first = mu.tail_integral(0.0)?;
    let at_zero = if h0 > 0.0 && h0.is_finite() && first.is_finite() { Some(first / h0) } else { None };

    let mut best = profile.iter().copied().fold((f64::NAN, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
    if !best.1.is_finite() {
        return Err(invalid!("empty probe set"));
    }
    let mut peaks: Vec<usize> = (0..profile.len())
        .filter(|&i| {
            let v = profile[i].1;
            (i == 0 || v >= profile[i - 1].1) && (i + 1 == profile.len() || v >= profile[i + 1].1)
        })
        .collect();
    peaks.sort_by(|&i, &j| profile[j].1.total_cmp(&profile[i].1));
    peaks.truncate(MAX_REFINED_PEAKS);
    let mut refined = Vec::new();
    for i in peaks {
        let t = profile[i].0;
        let lo = if i > 0 { profile[i - 1].0 } else { 0.5 * t };
        let hi = if i + 1 < profile.len() { profile[i + 1].0 } else { t };
        for (l, r) in [(lo, t), (t, hi)] {
            if r > l {
                let (tr, v) = quad::golden_max(&phi, l, r, 200);
                if v.is_finite() && v > profile[i].1 {
                    refined.push((tr, v));
                    if v > best.1 {
                        best = (tr, v);
                    }
                }
            }
        }
    }
    if let MuFunction::Step(st) = &mu {
        if st.values().len() <= MAX_REFINED_PIECES {
            for (l, r, _) in st.pieces() {
                let r = r.min(b * (1.0 - 1e-15));
                let l = if l > 0.0 { l } else { 1e-12 * r };
                if r > l {
                    let (tr, v) = quad::golden_max(&phi, l, r, 200);
                    if v.is_finite() {
                        refined.push((tr, v));
                        if v > best.1 {
                            best = (tr, v);
                        }
                    }
                }
            }
        }
    }
    profile.extend(refined);
    if let Some(v0) = at_zero {
        if v0 >= best.1 * (1.0 - 4.0 * f64::EPSILON) {
            best = (0.0, v0.max(best.1));
            profile.push((0.0, v0));
        }
    }
    profile.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(IhNormResult { value: best.1, maximizing_t: Some(best.0), is_member: true, profile })
}

/// Strictly increasing with increments that do not decay (each at least
/// 0.99 of the previous).
fn growing<I: Iterator<Item = f64>>(values: I) -> bool {
    let v: Vec<f64> = values.collect();
    if v.len() < 3 {
        return false;
    }
    let d: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    d.iter().all(|&x| x > 1e-12 * v[v.len() - 1].abs()) && d.windows(2).all(|w| w[1] >= 0.99 * w[0])
}

fn step_probes(s: &StepFunction, per_piece: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for (l, r, _) in s.pieces() {
        let r = if r.is_finite() { r } else { break };
        let l = if l > 0.0 { l } else { 1e-12 * r };
        let ratio = libm::pow(r / l, 1.0 / per_piece as f64);
        let mut t = l;
        for _ in 0..per_piece {
            out.push(t);
            t *= ratio;
        }
        out.push(r);
    }
    let b = s.horizon().value();
    out.retain(|&t| t > 0.0 && t < b);
    if out.is_empty() {
        out.push(if b.is_finite() { 0.5 * b } else { 1.0 });
    }
    out
}

/// `τ_ω(A)` on a surrogate, together with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEstimate {
    pub surrogate_value: SurrogateValue,
    pub normalized_by: String,
    pub operator_digest: String,
}

/// `τ_ω(A) = ω(t ↦ (1/h(t))∫_t^b μ(s, A) ds)` for positive members of `I_h`.
pub fn tau_omega(a: &OperatorInput, h: &WeightFunction, surrogate: &LimitSurrogate) -> Result<TraceEstimate> {
    if !a.is_positive() {
        return Err(Error::Precondition("tau_omega is defined here for positive operators only".into()));
    }
    let norm = ih_norm(a, h)?;
    if !norm.is_member {
        let (t, value) = norm.profile.last().copied().unwrap_or((f64::NAN, f64::INFINITY));
        return Err(Error::NotMember { t, value });
    }
    let tt = trace_transform_of(a, h)?;
    let value = evaluate_transform(&tt, surrogate)?;
    Ok(TraceEstimate { surrogate_value: value, normalized_by: h.description(), operator_digest: a.description() })
}

fn evaluate_transform(tt: &TraceTransform, surrogate: &LimitSurrogate) -> Result<SurrogateValue> {
    surrogate.evaluate_with_kinks(&|t: f64| tt.eval(t), &tt.kinks())
}

/// Surrogate applied to `t ↦ (1/h(t)) ∫_t^b x` for an arbitrary step function.
pub fn surrogate_of_step_transform(
    x: &StepFunction,
    h: &WeightFunction,
    surrogate: &LimitSurrogate,
) -> Result<SurrogateValue> {
    evaluate_transform(&trace_transform(MuFunction::Step(x.clone()), h)?, surrogate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationReport {
    /// `|τ_ω(−h′) − 1|`.
    pub defect: f64,
    pub estimate: SurrogateValue,
    /// The symbol is identically 1 (`h(b⁻) = 0`).
    pub constant_symbol: bool,
    /// `(t, (1/h(t))(h(t) − h(b⁻)))` along the final horizon's grid when the
    /// symbol is not constant.
    pub profile: Vec<(f64, f64)>,
}

/// `|τ_ω(μ = −h′) − 1|` on the infinite horizon.
pub fn normalization_check(h: &WeightFunction, surrogate: &LimitSurrogate) -> Result<NormalizationReport> {
    normalization_check_on(h, Horizon::INFINITE, surrogate)
}

/// Normalisation check on `(0, b)`. Finite horizons are evaluated at zero.
pub fn normalization_check_on(
    h: &WeightFunction,
    horizon: Horizon,
    surrogate: &LimitSurrogate,
) -> Result<NormalizationReport> {
    if !horizon.is_finite() {
        let vanishes = match h.tail_kind() {
            Some(k) => k == TailKind::VanishesAtInfinity,
            None => h.limit_at_infinity() == 0.0,
        };
        if !vanishes {
            return Err(Error::NormalisationUndefined(format!(
                "{} has the positive limit {} at infinity",
                h.description(),
                h.limit_at_infinity()
            )));
        }
    }
    let s = if horizon.is_finite() { surrogate.clone().with_direction(Direction::AtZero) } else { surrogate.clone() };
    let a = OperatorInput::NegHPrime { weight: h.clone(), horizon, scale: 1.0 };
    let tt = trace_transform_of(&a, h)?;
    let estimate = evaluate_transform(&tt, &s)?;
    let end = end_value(h, horizon);
    let constant_symbol = end == 0.0;
    let profile = if constant_symbol {
        Vec::new()
    } else {
        let b = horizon.value();
        geometric_probes(T_MIN * b.min(1.0), b * (1.0 - 1e-9), 8).into_iter().map(|t| (t, tt.eval(t))).collect()
    };
    Ok(NormalizationReport { defect: libm::fabs(estimate.estimate - 1.0), estimate, constant_symbol, profile })
}

/// `μ(A + B)` where it is determined: matrix sums, and step functions
/// realised as commuting multiplication operators (pointwise sum).
pub fn operator_sum(a: &OperatorInput, b: &OperatorInput) -> Result<OperatorInput> {
    match (a, b) {
        (OperatorInput::Matrix(x), OperatorInput::Matrix(y)) => Ok(OperatorInput::Matrix(x.add(y)?)),
        (OperatorInput::Step(x), OperatorInput::Step(y)) => Ok(OperatorInput::Step(x.add(y))),
        (OperatorInput::List(x), OperatorInput::List(y)) => Ok(OperatorInput::Step(mu_of_list(x).add(&mu_of_list(y)))),
        _ => Err(invalid!("the sum of {} and {} is not computable from the inputs", a.description(), b.description())),
    }
}

/// `|τ_ω(A+B) − τ_ω(A) − τ_ω(B)|` at equal horizons.
pub fn additivity_defect(
    a: &OperatorInput,
    b: &OperatorInput,
    h: &WeightFunction,
    surrogate: &LimitSurrogate,
) -> Result<f64> {
    let sum = operator_sum(a, b)?;
    let ta = tau_omega(a, h, surrogate)?.surrogate_value.estimate;
    let tb = tau_omega(b, h, surrogate)?.surrogate_value.estimate;
    let ts = tau_omega(&sum, h, surrogate)?.surrogate_value.estimate;
    Ok(libm::fabs(ts - ta - tb))
}

/// Surrogate values of the three terms of the tail chain
/// `∫_{2t}^b μ(A+B) ≤ ∫_t^b (μ(A)+μ(B)) ≤ ∫_t^b μ(A+B)`, each divided by `h(t)`.
pub fn tail_chain_surrogates(
    mu_a: &StepFunction,
    mu_b: &StepFunction,
    mu_sum: &StepFunction,
    h: &WeightFunction,
    surrogate: &LimitSurrogate,
) -> Result<[f64; 3]> {
    let horizon = mu_a.horizon().max(mu_b.horizon()).max(mu_sum.horizon());
    let (a, b, s) = (mu_a.embed(horizon)?, mu_b.embed(horizon)?, mu_sum.embed(horizon)?);
    let plus = a.add(&b);
    let dil = majorize::dilate_half(&s);
    // ∫_{2t} μ(A+B) = 2 ∫_t σ_{1/2}μ(A+B)
    let low = surrogate_of_step_transform(&dil, h, surrogate)?.estimate * 2.0;
    let mid = surrogate_of_step_transform(&plus, h, surrogate)?.estimate;
    let high = surrogate_of_step_transform(&s, h, surrogate)?.estimate;
    Ok([low, mid, high])
}

/// Keeps the part of `μ(A)` strictly above `a`: `μ(A)·χ_{μ(A) > a}`.
pub fn cut_tail(x: &OperatorInput, a: f64) -> Result<OperatorInput> {
    cut(x, a, true)
}

/// Keeps the part of `μ(A)` at or below `a`, rearranged.
pub fn cut_head(x: &OperatorInput, a: f64) -> Result<OperatorInput> {
    cut(x, a, false)
}

fn cut(x: &OperatorInput, a: f64, above: bool) -> Result<OperatorInput> {
    if !(a > 0.0) {
        return Err(invalid!("cut level must be positive, got {a}"));
    }
    match x.mu()? {
        MuFunction::Step(s) => Ok(OperatorInput::Step(if above { s.cut_above(a) } else { s.cut_below(a) })),
        MuFunction::Symbolic(s) => {
            let d = s.distribution(a);
            let b = s.horizon().value();
            let label = format!("{}{}{a}", s.label(), if above { " > " } else { " <= " });
            if above {
                if d == 0.0 {
                    return Ok(OperatorInput::Step(StepFunction::zero(s.horizon())));
                }
                let src = s.clone();
                let mut out = SymbolicFunction::from_fn(
                    &label,
                    s.horizon(),
                    move |t| if t < d { src.eval(t) } else { 0.0 },
                    MonotoneHint::Nonincreasing,
                );
                if s.has_closed_tail() && d.is_finite() {
                    let src = s.clone();
                    let at_d = s.tail_integral(d)?.value;
                    out = out.with_tail(move |t| {
                        if t >= d {
                            0.0
                        } else {
                            src.tail_integral(t).map(|v| v.value - at_d).unwrap_or(f64::INFINITY)
                        }
                    });
                }
                Ok(OperatorInput::Symbolic(out))
            } else {
                if !d.is_finite() || d >= b {
                    return Ok(OperatorInput::Step(StepFunction::zero(s.horizon())));
                }
                let src = s.clone();
                let horizon = if b.is_finite() { Horizon::new(b - d)? } else { Horizon::INFINITE };
                let mut out = SymbolicFunction::new(
                    &label,
                    horizon,
                    Arc::new(move |t| src.eval(t + d)),
                    MonotoneHint::Nonincreasing,
                    None,
                );
                if s.has_closed_tail() {
                    let src = s.clone();
                    out = out.with_tail(move |t| src.tail_integral(t + d).map(|v| v.value).unwrap_or(f64::INFINITY));
                }
                Ok(OperatorInput::Symbolic(out))
            }
        }
    }
}
