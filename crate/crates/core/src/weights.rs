//! The weight class `Ω` (convex, decreasing, positive functions on
//! `(0, ∞)`), the ratio `h(2t)/h(t)`, the functional
//! `α(s) = limsup_{t→∞} h(st)/h(t)` and the existence criteria for
//! tail-respecting functionals supported at infinity and at zero.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::E;
use core::fmt;

use crate::error::{invalid, Error, Result};
use crate::rearrange::{geometric_probes, Evaluator};

pub const VANISH_TOL: f64 = 1e-6;
pub const BLOWUP_THRESHOLD: f64 = 1e6;
pub const CRIT_TOL: f64 = 1e-3;
pub const T_MAX: f64 = crate::rearrange::T_MAX;
pub const T_MIN: f64 = crate::rearrange::T_MIN;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailKind {
    VanishesAtInfinity,
    PositiveLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroKind {
    BlowsUpAtZero,
    FiniteAtZero,
}

/// Asymptotic ratio limits known in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForms {
    pub ratio_limit_at_infinity: f64,
    pub ratio_limit_at_zero: f64,
}

/// Piecewise-linear interpolation of sampled weight values.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    t: Vec<f64>,
    h: Vec<f64>,
}

impl Table {
    /// Validates positivity, monotonicity and midpoint convexity of the
    /// interpolant (violations of at least `1e-8·max(1, h)` are rejected).
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid!("a weight table needs at least two points"));
        }
        let (t, h): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        if t.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(invalid!("table abscissae must be positive and finite"));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid!("table abscissae must be strictly increasing"));
        }
        if h.iter().any(|&y| !(y > 0.0 && y.is_finite())) {
            return Err(invalid!("weight values must be positive and finite"));
        }
        if let Some(i) = (1..h.len()).find(|&i| h[i] > h[i - 1]) {
            return Err(invalid!("weight table increases at t = {}", t[i]));
        }
        for i in 1..t.len() - 1 {
            let lam = (t[i] - t[i - 1]) / (t[i + 1] - t[i - 1]);
            let chord = h[i - 1] + lam * (h[i + 1] - h[i - 1]);
            if h[i] - chord >= 1e-8 * h[i].max(1.0) {
                return Err(invalid!("weight table is not convex at t = {} (excess {:e})", t[i], h[i] - chord));
            }
        }
        Ok(Table { t, h })
    }

    /// Builds a table without the shape checks; used for diagnostics on
    /// samples that are only asymptotically convex.
    pub fn unchecked(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid!("a weight table needs at least two points"));
        }
        let (t, h): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        if t.windows(2).any(|w| !(w[1] > w[0])) || h.iter().any(|&y| !(y > 0.0)) {
            return Err(invalid!("table must have increasing abscissae and positive values"));
        }
        Ok(Table { t, h })
    }

    pub fn first(&self) -> f64 {
        self.t[0]
    }

    pub fn last(&self) -> f64 {
        *self.t.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    fn slope(&self, i: usize) -> f64 {
        (self.h[i + 1] - self.h[i]) / (self.t[i + 1] - self.t[i])
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.t.len();
        if x >= self.t[n - 1] {
            return self.h[n - 1];
        }
        if x <= self.t[0] {
            return (self.h[0] + self.slope(0) * (x - self.t[0])).max(self.h[0]);
        }
        let i = self.t.partition_point(|&s| s <= x) - 1;
        let lam = (x - self.t[i]) / (self.t[i + 1] - self.t[i]);
        self.h[i] + lam * (self.h[i + 1] - self.h[i])
    }

    fn right_derivative(&self, x: f64) -> f64 {
        let n = self.t.len();
        if x >= self.t[n - 1] {
            return 0.0;
        }
        if x < self.t[0] {
            return self.slope(0);
        }
        let i = self.t.partition_point(|&s| s <= x) - 1;
        self.slope(i)
    }
}

/// User-supplied weight given by closures.
#[derive(Clone)]
pub struct CustomWeight {
    pub name: String,
    pub eval: Evaluator,
    pub right_derivative: Evaluator,
    /// `lim_{t→∞} h(t)` (or `h(b⁻)` for weights used on a finite horizon).
    pub limit_at_infinity: f64,
}

impl fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomWeight").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub enum WeightKind {
    /// `(1+t)^{-α}`
    PowerLaw(f64),
    /// `1/log(e+t)`
    LogReciprocal,
    /// `e^{-t}`
    ExpDecay,
    /// `2/(1+t)`
    PaperTail,
    Tabulated(Arc<Table>),
    Custom(CustomWeight),
}

/// A function `h ∈ Ω`.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    kind: WeightKind,
}

impl WeightFunction {
    pub fn power_law(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid!("power-law exponent must be positive, got {alpha}"));
        }
        Ok(WeightFunction { kind: WeightKind::PowerLaw(alpha) })
    }

    pub fn log_reciprocal() -> Self {
        WeightFunction { kind: WeightKind::LogReciprocal }
    }

    pub fn exp_decay() -> Self {
        WeightFunction { kind: WeightKind::ExpDecay }
    }

    pub fn paper_tail() -> Self {
        WeightFunction { kind: WeightKind::PaperTail }
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        Ok(WeightFunction { kind: WeightKind::Tabulated(Arc::new(Table::new(points)?)) })
    }

    pub fn from_table(table: Table) -> Self {
        WeightFunction { kind: WeightKind::Tabulated(Arc::new(table)) }
    }

    pub fn custom(weight: CustomWeight) -> Self {
        WeightFunction { kind: WeightKind::Custom(weight) }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Short name in the weight mini-language (`power:1.5`, `logrec`, ...).
    pub fn description(&self) -> String {
        match &self.kind {
            WeightKind::PowerLaw(a) => format!("power:{a}"),
            WeightKind::LogReciprocal => "logrec".into(),
            WeightKind::ExpDecay => "exp".into(),
            WeightKind::PaperTail => "papertail".into(),
            WeightKind::Tabulated(t) => format!("table[{} points on {:e}..{:e}]", t.len(), t.first(), t.last()),
            WeightKind::Custom(c) => c.name.clone(),
        }
    }

    /// `h(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::PowerLaw(a) => libm::pow(1.0 + t, -a),
            WeightKind::LogReciprocal => 1.0 / libm::log(E + t),
            WeightKind::ExpDecay => libm::exp(-t),
            WeightKind::PaperTail => 2.0 / (1.0 + t),
            WeightKind::Tabulated(tab) => tab.eval(t),
            WeightKind::Custom(c) => (c.eval)(t),
        }
    }

    /// `log h(t)`, accurate where `h` underflows.
    pub fn ln_eval(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::PowerLaw(a) => -a * libm::log1p(t),
            WeightKind::ExpDecay => -t,
            _ => libm::log(self.eval(t)),
        }
    }

    /// `h′(t⁺)`.
    pub fn right_derivative(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::PowerLaw(a) => -a * libm::pow(1.0 + t, -a - 1.0),
            WeightKind::LogReciprocal => {
                let l = libm::log(E + t);
                -1.0 / ((E + t) * l * l)
            }
            WeightKind::ExpDecay => -libm::exp(-t),
            WeightKind::PaperTail => -2.0 / ((1.0 + t) * (1.0 + t)),
            WeightKind::Tabulated(tab) => tab.right_derivative(t),
            WeightKind::Custom(c) => (c.right_derivative)(t),
        }
    }

    /// `lim_{t→∞} h(t)`.
    pub fn limit_at_infinity(&self) -> f64 {
        match &self.kind {
            WeightKind::Tabulated(tab) => tab.h[tab.h.len() - 1],
            WeightKind::Custom(c) => c.limit_at_infinity,
            _ => 0.0,
        }
    }

    /// Declared behaviour at infinity, when known in closed form.
    pub fn tail_kind(&self) -> Option<TailKind> {
        match &self.kind {
            WeightKind::Tabulated(_) | WeightKind::Custom(_) => None,
            _ => Some(TailKind::VanishesAtInfinity),
        }
    }

    /// Declared behaviour at zero, when known in closed form.
    pub fn zero_kind(&self) -> Option<ZeroKind> {
        match &self.kind {
            WeightKind::Tabulated(_) | WeightKind::Custom(_) => None,
            _ => Some(ZeroKind::FiniteAtZero),
        }
    }

    /// `h(0⁺)` for the built-in weights.
    fn value_at_zero(&self) -> Option<f64> {
        match &self.kind {
            WeightKind::PowerLaw(_) | WeightKind::LogReciprocal | WeightKind::ExpDecay => Some(1.0),
            WeightKind::PaperTail => Some(2.0),
            _ => None,
        }
    }

    pub fn closed_forms(&self) -> Option<ClosedForms> {
        let at_inf = match &self.kind {
            WeightKind::PowerLaw(a) => libm::exp2(-a),
            WeightKind::LogReciprocal => 1.0,
            WeightKind::ExpDecay => 0.0,
            WeightKind::PaperTail => 0.5,
            _ => return None,
        };
        Some(ClosedForms { ratio_limit_at_infinity: at_inf, ratio_limit_at_zero: 1.0 })
    }

    /// `lim_{t→∞} h(st)/h(t)` in closed form.
    fn alpha_closed(&self, s: f64) -> Option<f64> {
        match &self.kind {
            WeightKind::PowerLaw(a) => Some(libm::pow(s, -a)),
            WeightKind::LogReciprocal => Some(1.0),
            WeightKind::ExpDecay => Some(if s > 1.0 { 0.0 } else { 1.0 }),
            WeightKind::PaperTail => Some(1.0 / s),
            _ => None,
        }
    }

    /// `h(st)/h(t)`.
    pub fn ratio_at(&self, s: f64, t: f64) -> f64 {
        match &self.kind {
            WeightKind::PowerLaw(a) => libm::pow((1.0 + t) / (1.0 + s * t), *a),
            WeightKind::LogReciprocal => libm::log(E + t) / libm::log(E + s * t),
            WeightKind::ExpDecay => libm::exp(-(s - 1.0) * t),
            WeightKind::PaperTail => (1.0 + t) / (1.0 + s * t),
            _ => {
                let (num, den) = (self.eval(s * t), self.eval(t));
                if den > 0.0 {
                    num / den
                } else {
                    libm::exp(self.ln_eval(s * t) - self.ln_eval(t))
                }
            }
        }
    }

    /// Checks positivity, monotonicity, midpoint convexity and the right
    /// derivative against forward differences on a probe grid inside
    /// `[lo, hi]`.
    pub fn validate_on(&self, lo: f64, hi: f64) -> Result<()> {
        let probes = geometric_probes(lo, hi, 8);
        for w in probes.windows(2) {
            let (t1, t2) = (w[0], w[1]);
            let (h1, h2) = (self.eval(t1), self.eval(t2));
            if !(h1 > 0.0) {
                return Err(invalid!("{} is not positive at t = {t1}", self.description()));
            }
            if h2 > h1 * (1.0 + 1e-14) {
                return Err(invalid!("{} increases on [{t1}, {t2}]", self.description()));
            }
            let mid = self.eval(0.5 * (t1 + t2));
            if mid > 0.5 * (h1 + h2) + 1e-12 * h1 {
                return Err(invalid!("{} is not convex on [{t1}, {t2}]", self.description()));
            }
        }
        for &t in &probes {
            let d = self.right_derivative(t);
            if d > 0.0 {
                return Err(invalid!("{} has a positive derivative at t = {t}", self.description()));
            }
            let delta = 1e-8 * (1.0 + t);
            let fd = (self.eval(t + delta) - self.eval(t)) / delta;
            let scale = d.abs().max(1e-300);
            let tol = 1e-6 * scale + 4.0 * f64::EPSILON * self.eval(t) / delta;
            if (fd - d).abs() > tol {
                return Err(invalid!(
                    "{}: right derivative {d:e} disagrees with difference quotient {fd:e} at t = {t}",
                    self.description()
                ));
            }
        }
        Ok(())
    }
}

/// `h(2t)/h(t)`, in `(0, 1]` for `h ∈ Ω`.
pub fn ratio(h: &WeightFunction, t: f64) -> f64 {
    h.ratio_at(2.0, t)
}

/// Grid estimator for asymptotic limsup/liminf of ratio functions.
#[derive(Debug, Clone, PartialEq)]
pub struct TailLimsupEstimator {
    pub t_max: f64,
    pub t_min: f64,
    /// Geometric grid ratio.
    pub grid_ratio: f64,
    /// Fraction (in log scale) of the grid nearest the limit point.
    pub window: f64,
    pub use_closed_forms: bool,
}

impl Default for TailLimsupEstimator {
    fn default() -> Self {
        TailLimsupEstimator {
            t_max: T_MAX,
            t_min: T_MIN,
            grid_ratio: libm::exp2(0.25),
            window: 0.25,
            use_closed_forms: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitPoint {
    Infinity,
    Zero,
}

/// Raw bracket of a sampled ratio over the asymptotic window.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioBracket {
    pub liminf: f64,
    pub limsup: f64,
    /// Quadratic extrapolation in `1/|log t|` when the window is monotone.
    pub extrapolated: Option<f64>,
    pub grid_used: String,
}

impl RatioBracket {
    /// Limsup estimate: the extrapolated value for monotone windows, the
    /// window maximum otherwise. Clamped to `[0, 1]`.
    pub fn limsup_estimate(&self) -> f64 {
        self.extrapolated.unwrap_or(self.limsup).clamp(0.0, 1.0)
    }
}

impl TailLimsupEstimator {
    fn grid(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut t = lo;
        while t <= hi * (1.0 + 1e-12) {
            out.push(t);
            t *= self.grid_ratio;
        }
        out
    }

    /// Samples `h(st)/h(t)` towards `point` and brackets it over the window.
    pub fn ratio_bracket(&self, h: &WeightFunction, s: f64, point: LimitPoint) -> RatioBracket {
        let (ts, label) = match point {
            LimitPoint::Infinity => {
                let ts = self.grid(1.0, self.t_max / s);
                let n = ts.len();
                let k = ((n as f64) * (1.0 - self.window)) as usize;
                (ts[k.min(n - 1)..].to_vec(), "top")
            }
            LimitPoint::Zero => {
                let mut ts = self.grid(self.t_min, 1.0 / s);
                let n = ts.len();
                let k = libm::ceil((n as f64) * self.window) as usize;
                ts.truncate(k.clamp(1, n));
                ts.reverse();
                (ts, "bottom")
            }
        };
        let values: Vec<f64> = ts.iter().map(|&t| h.ratio_at(s, t)).collect();
        let liminf = values.iter().copied().fold(f64::INFINITY, f64::min);
        let limsup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let extrapolated = extrapolate_in_inverse_log(&ts, &values);
        let grid_used = format!(
            "geometric grid ratio {:.6} on [{:e}, {:e}], {} {}% window of {} points{}",
            self.grid_ratio,
            ts.iter().copied().fold(f64::INFINITY, f64::min),
            ts.iter().copied().fold(0.0, f64::max),
            label,
            (self.window * 100.0) as u32,
            ts.len(),
            if extrapolated.is_some() { ", extrapolated in 1/|log t|" } else { "" }
        );
        RatioBracket { liminf, limsup, extrapolated, grid_used }
    }
}

/// Quadratic extrapolation to `1/|log t| → 0` through the first, middle
/// and last samples, used only when the samples are monotone.
fn extrapolate_in_inverse_log(ts: &[f64], values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let nondecreasing = values.windows(2).all(|w| w[1] >= w[0] - 1e-15);
    let nonincreasing = values.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    if !(nondecreasing || nonincreasing) {
        return None;
    }
    let idx = [0, n / 2, n - 1];
    let x: Vec<f64> = idx.iter().map(|&i| 1.0 / libm::fabs(libm::log(ts[i]))).collect();
    let y: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
    if !x.iter().all(|v| v.is_finite()) {
        return None;
    }
    // Lagrange basis evaluated at 0
    let mut acc = 0.0;
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if i != j {
                w *= (0.0 - x[j]) / (x[i] - x[j]);
            }
        }
        acc += w * y[i];
    }
    acc.is_finite().then_some(acc)
}

/// `α(s) = limsup_{t→∞} h(st)/h(t)`.
pub fn alpha(h: &WeightFunction, s: f64, estimator: &TailLimsupEstimator) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(invalid!("alpha needs s >= 1, got {s}"));
    }
    if s == 1.0 {
        return Ok(1.0);
    }
    if estimator.use_closed_forms {
        if let Some(v) = h.alpha_closed(s) {
            return Ok(v);
        }
    }
    check_range(h, estimator, LimitPoint::Infinity)?;
    Ok(estimator.ratio_bracket(h, s, LimitPoint::Infinity).limsup_estimate())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    /// Estimated `lim h` at the limit point (`+∞` for blow-up at zero).
    pub limit_estimate: f64,
    pub ratio_limsup_estimate: f64,
    pub grid_used: String,
    pub closed_form: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionVerdict {
    pub satisfied: bool,
    pub evidence: Evidence,
}

fn check_range(h: &WeightFunction, est: &TailLimsupEstimator, point: LimitPoint) -> Result<()> {
    if let WeightKind::Tabulated(tab) = h.kind() {
        match point {
            LimitPoint::Infinity if tab.last() < est.t_max * (1.0 - 1e-9) => {
                return Err(Error::InsufficientRange { needed: est.t_max, available: tab.last() })
            }
            LimitPoint::Zero if tab.first() > est.t_min * (1.0 + 1e-9) => {
                return Err(Error::InsufficientRange { needed: est.t_min, available: tab.first() })
            }
            _ => {}
        }
    }
    Ok(())
}

/// Divergence test on decade samples: the last value exceeds `threshold`,
/// or the last decade increment is positive and has not decayed relative
/// to the previous one (growth at least logarithmic).
fn diverges(samples: &[f64], threshold: f64) -> bool {
    let n = samples.len();
    if samples[n - 1] > threshold {
        return true;
    }
    let last = samples[n - 1] - samples[n - 2];
    let prev = samples[n - 2] - samples[n - 3];
    last > 1e-12 * samples[n - 1].abs() && prev > 0.0 && last >= (1.0 - CRIT_TOL) * prev
}

/// Existence of non-zero tail-respecting functionals supported at
/// infinity: `h → 0` and `limsup_{t→∞} h(2t)/h(t) = 1`.
pub fn exists_at_infinity(h: &WeightFunction, est: &TailLimsupEstimator) -> Result<CriterionVerdict> {
    if est.use_closed_forms {
        if let (Some(TailKind::VanishesAtInfinity), Some(cf)) = (h.tail_kind(), h.closed_forms()) {
            let r = cf.ratio_limit_at_infinity;
            return Ok(CriterionVerdict {
                satisfied: r >= 1.0 - CRIT_TOL,
                evidence: Evidence {
                    limit_estimate: 0.0,
                    ratio_limsup_estimate: r,
                    grid_used: "closed form".into(),
                    closed_form: true,
                },
            });
        }
    }
    check_range(h, est, LimitPoint::Infinity)?;
    let top = libm::floor(libm::log10(est.t_max)) as i32;
    let reciprocal: Vec<f64> = (top - 3..=top).map(|k| 1.0 / h.eval(libm::pow(10.0, k as f64))).collect();
    let at_end = h.eval(est.t_max);
    let vanishes = at_end < VANISH_TOL || diverges(&reciprocal, 1.0 / VANISH_TOL);
    let bracket = est.ratio_bracket(h, 2.0, LimitPoint::Infinity);
    let r = bracket.limsup_estimate();
    Ok(CriterionVerdict {
        satisfied: vanishes && r >= 1.0 - CRIT_TOL,
        evidence: Evidence {
            limit_estimate: if vanishes { 0.0 } else { at_end },
            ratio_limsup_estimate: r,
            grid_used: bracket.grid_used,
            closed_form: false,
        },
    })
}

/// Existence of non-zero tail-respecting functionals supported at zero:
/// `h → ∞` at zero and `limsup_{t→0} h(2t)/h(t) = 1`.
pub fn exists_at_zero(h: &WeightFunction, est: &TailLimsupEstimator) -> Result<CriterionVerdict> {
    if est.use_closed_forms {
        if let (Some(ZeroKind::FiniteAtZero), Some(cf), Some(h0)) = (h.zero_kind(), h.closed_forms(), h.value_at_zero())
        {
            return Ok(CriterionVerdict {
                satisfied: false,
                evidence: Evidence {
                    limit_estimate: h0,
                    ratio_limsup_estimate: cf.ratio_limit_at_zero,
                    grid_used: "closed form".into(),
                    closed_form: true,
                },
            });
        }
    }
    check_range(h, est, LimitPoint::Zero)?;
    // every 16th point of the estimator grid, moving towards zero
    let step = libm::pow(est.grid_ratio, 16.0);
    let samples: Vec<f64> = (0..4).rev().map(|k| h.eval(est.t_min * libm::pow(step, k as f64))).collect();
    let at_start = h.eval(est.t_min);
    let blows_up = diverges(&samples, BLOWUP_THRESHOLD);
    let bracket = est.ratio_bracket(h, 2.0, LimitPoint::Zero);
    let r = bracket.limsup_estimate();
    Ok(CriterionVerdict {
        satisfied: blows_up && r >= 1.0 - CRIT_TOL,
        evidence: Evidence {
            limit_estimate: if blows_up { f64::INFINITY } else { at_start },
            ratio_limsup_estimate: r,
            grid_used: bracket.grid_used,
            closed_form: false,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimcondDiagnostic {
    /// `lim_{t→∞} h(2t)/h(t)` when the bracket closes; `None` flags "no limit".
    pub limit: Option<f64>,
    pub liminf: f64,
    pub limsup: f64,
    pub grid_used: String,
}

/// Diagnostic for `lim_{t→∞} h(2t)/h(t) = 1`: closed form when available,
/// otherwise the raw window bracket, which must close within `CRIT_TOL`.
pub fn limcond_diagnostic(h: &WeightFunction, est: &TailLimsupEstimator) -> Result<LimcondDiagnostic> {
    if est.use_closed_forms {
        if let Some(cf) = h.closed_forms() {
            let r = cf.ratio_limit_at_infinity;
            return Ok(LimcondDiagnostic { limit: Some(r), liminf: r, limsup: r, grid_used: "closed form".into() });
        }
    }
    check_range(h, est, LimitPoint::Infinity)?;
    let b = est.ratio_bracket(h, 2.0, LimitPoint::Infinity);
    let limit = (b.limsup - b.liminf <= CRIT_TOL).then_some(0.5 * (b.limsup + b.liminf));
    Ok(LimcondDiagnostic { limit, liminf: b.liminf, limsup: b.limsup, grid_used: b.grid_used })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est() -> TailLimsupEstimator {
        TailLimsupEstimator::default()
    }

    #[test]
    fn ratio_examples() {
        let p1 = WeightFunction::power_law(1.0).unwrap();
        assert!((ratio(&p1, 1.0) - 2.0 / 3.0).abs() < 1e-15);
        let lr = WeightFunction::log_reciprocal();
        let t = libm::exp(10.0);
        let direct = libm::log(E + t) / libm::log(E + 2.0 * t);
        assert!((ratio(&lr, t) - direct).abs() < 1e-15);
        assert!((ratio(&lr, t) - 0.9352).abs() < 1e-4);
    }

    #[test]
    fn builtins_are_in_omega() {
        for h in [
            WeightFunction::power_law(0.5).unwrap(),
            WeightFunction::power_law(2.0).unwrap(),
            WeightFunction::log_reciprocal(),
            WeightFunction::exp_decay(),
            WeightFunction::paper_tail(),
        ] {
            h.validate_on(1e-6, 1e2).unwrap();
        }
    }

    #[test]
    fn alpha_closed_forms() {
        let p1 = WeightFunction::power_law(1.0).unwrap();
        assert_eq!(alpha(&p1, 1.0, &est()).unwrap(), 1.0);
        assert_eq!(alpha(&p1, 2.0, &est()).unwrap(), 0.5);
        assert_eq!(alpha(&WeightFunction::log_reciprocal(), 2.0, &est()).unwrap(), 1.0);
        assert!(alpha(&p1, 0.5, &est()).is_err());
    }

    #[test]
    fn criteria_closed_forms() {
        let v = exists_at_infinity(&WeightFunction::log_reciprocal(), &est()).unwrap();
        assert!(v.satisfied && v.evidence.closed_form);
        let v = exists_at_infinity(&WeightFunction::power_law(1.0).unwrap(), &est()).unwrap();
        assert!(!v.satisfied);
        assert_eq!(v.evidence.ratio_limsup_estimate, 0.5);
        assert!(!exists_at_zero(&WeightFunction::power_law(1.0).unwrap(), &est()).unwrap().satisfied);
        assert!(!exists_at_zero(&WeightFunction::exp_decay(), &est()).unwrap().satisfied);
    }

    #[test]
    fn constant_table_does_not_vanish() {
        let h = WeightFunction::tabulated(alloc::vec![(1e-12, 1.0), (1e12, 1.0)]).unwrap();
        let v = exists_at_infinity(&h, &est()).unwrap();
        assert!(!v.satisfied);
        assert_eq!(v.evidence.limit_estimate, 1.0);
    }

    #[test]
    fn short_table_reports_range() {
        let h = WeightFunction::tabulated(alloc::vec![(1.0, 2.0), (10.0, 1.0)]).unwrap();
        assert!(matches!(exists_at_infinity(&h, &est()), Err(Error::InsufficientRange { .. })));
        assert!(matches!(exists_at_zero(&h, &est()), Err(Error::InsufficientRange { .. })));
    }

    #[test]
    fn table_validation() {
        assert!(WeightFunction::tabulated(alloc::vec![(1.0, 1.0), (2.0, 2.0)]).is_err());
        // concave kink
        assert!(WeightFunction::tabulated(alloc::vec![(1.0, 3.0), (2.0, 2.9), (3.0, 1.0)]).is_err());
        assert!(WeightFunction::tabulated(alloc::vec![(1.0, 3.0), (2.0, 1.0), (3.0, 0.5)]).is_ok());
    }

    #[test]
    fn limcond_closed_forms() {
        let d = limcond_diagnostic(&WeightFunction::log_reciprocal(), &est()).unwrap();
        assert_eq!(d.limit, Some(1.0));
        let d = limcond_diagnostic(&WeightFunction::power_law(2.0).unwrap(), &est()).unwrap();
        assert_eq!(d.limit, Some(0.25));
    }
}
