use alloc::sync::Arc;
use core::fmt;

use super::step::Horizon;
use crate::error::{invalid, Error, Result};
use crate::quad;

/// Shared real-valued map.
pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneHint {
    Nonincreasing,
    Unknown,
}

/// Upper end of the numeric integration range for symbolic tails.
pub const T_MAX: f64 = 1e12;
/// Lower end of geometric probe grids.
pub const T_MIN: f64 = 1e-12;

/// A non-negative function given by an evaluator, with an optional
/// closed-form tail integral `t ↦ ∫_t^b f`.
#[derive(Clone)]
pub struct SymbolicFunction {
    horizon: Horizon,
    eval: Evaluator,
    monotone: MonotoneHint,
    tail: Option<Evaluator>,
    label: Arc<str>,
}

impl fmt::Debug for SymbolicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolicFunction")
            .field("label", &self.label)
            .field("horizon", &self.horizon)
            .field("monotone", &self.monotone)
            .field("closed_tail", &self.tail.is_some())
            .finish()
    }
}

/// Result of a symbolic tail integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailValue {
    pub value: f64,
    /// Estimated contribution beyond the numeric range (zero when exact).
    pub tail_bound: f64,
}

impl SymbolicFunction {
    pub fn new(
        label: &str,
        horizon: Horizon,
        eval: Evaluator,
        monotone: MonotoneHint,
        tail: Option<Evaluator>,
    ) -> Self {
        SymbolicFunction { horizon, eval, monotone, tail, label: Arc::from(label) }
    }

    pub fn from_fn<F>(label: &str, horizon: Horizon, f: F, monotone: MonotoneHint) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, horizon, Arc::new(f), monotone, None)
    }

    pub fn with_tail<G>(mut self, tail: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.tail = Some(Arc::new(tail));
        self
    }

    /// Drops the closed-form tail so integrals go through quadrature.
    pub fn without_tail(&self) -> Self {
        let mut s = self.clone();
        s.tail = None;
        s
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn monotone(&self) -> MonotoneHint {
        self.monotone
    }

    pub fn has_closed_tail(&self) -> bool {
        self.tail.is_some()
    }

    pub fn evaluator(&self) -> Evaluator {
        self.eval.clone()
    }

    /// `f(t)`, zero outside `(0, b)`.
    pub fn eval(&self, t: f64) -> f64 {
        if !(t > 0.0) || t >= self.horizon.value() {
            0.0
        } else {
            (self.eval)(t)
        }
    }

    /// Checks the evaluator and the closed-form tail on a geometric probe grid.
    pub fn validate(&self) -> Result<()> {
        let b = self.horizon.value();
        let top = if b.is_finite() { b } else { T_MAX };
        let probes = geometric_probes(1e-6_f64.min(top * 1e-6), top, 64);
        for &t in probes.iter().filter(|&&t| t < b) {
            let v = self.eval(t);
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid!("{} is not finite and non-negative at t = {t}", self.label));
            }
        }
        if let Some(tail) = &self.tail {
            let mut prev = f64::INFINITY;
            for &t in probes.iter().filter(|&&t| t < b) {
                let v = tail(t);
                if !(v <= prev * (1.0 + 1e-12) + 1e-300) {
                    return Err(invalid!("closed tail of {} increases at t = {t}", self.label));
                }
                prev = v;
                let d = 1e-4 * t;
                if t + d < b && t - d > 0.0 {
                    let slope = (tail(t + d) - tail(t - d)) / (2.0 * d);
                    let fv = self.eval(t);
                    let scale = fv.abs().max(1e-9 * tail(t).abs()).max(1e-300);
                    if (slope + fv).abs() > 1e-3 * scale {
                        return Err(invalid!("closed tail of {} does not differentiate to -f at t = {t}", self.label));
                    }
                }
            }
        }
        Ok(())
    }

    /// Measure of `{f > s}`. For nonincreasing functions this is the level
    /// crossing found by bisection; otherwise a midpoint count on a
    /// geometric grid with ratio `2^{1/8}`.
    pub fn distribution(&self, s: f64) -> f64 {
        let b = self.horizon.value();
        match self.monotone {
            MonotoneHint::Nonincreasing => {
                let f = |t: f64| self.eval(t);
                if !(f(T_MIN) > s) {
                    return 0.0;
                }
                let mut hi = 1.0_f64.min(if b.is_finite() { b } else { 1.0 });
                while f(hi) > s {
                    if hi >= b {
                        return b;
                    }
                    hi *= 2.0;
                    if hi > 1e300 {
                        return f64::INFINITY;
                    }
                    if hi > b {
                        hi = b;
                    }
                }
                let lo = if hi >= 2.0 { hi * 0.5 } else { 0.0 };
                quad::bisect_level(&f, lo, hi, s)
            }
            MonotoneHint::Unknown => {
                let top = if b.is_finite() { b } else { T_MAX };
                let ratio = libm::exp2(0.125);
                let mut measure = 0.0;
                let mut left = 0.0;
                let mut right = T_MIN;
                while left < top {
                    let mid = 0.5 * (left + right);
                    if self.eval(mid) > s {
                        measure += right - left;
                    }
                    left = right;
                    right = (right * ratio).min(top);
                }
                if !b.is_finite() && self.eval(T_MAX) > s {
                    return f64::INFINITY;
                }
                measure
            }
        }
    }

    /// `∫_t^b f`, using the closed form when present.
    pub fn tail_integral(&self, t: f64) -> Result<TailValue> {
        let b = self.horizon.value();
        if t >= b {
            return Ok(TailValue { value: 0.0, tail_bound: 0.0 });
        }
        if let Some(tail) = &self.tail {
            return Ok(TailValue { value: tail(t), tail_bound: 0.0 });
        }
        let t = t.max(0.0);
        if b.is_finite() {
            // raw evaluator: the integrand needs its left limit at `b`
            let raw = |s: f64| if s > 0.0 { (self.eval)(s) } else { 0.0 };
            let v = integrate_log_cells(&raw, t.max(T_MIN), b) + head_piece(self, t);
            return Ok(TailValue { value: v, tail_bound: 0.0 });
        }
        self.tail_by_octaves(t)
    }

    /// Integrates octave by octave up to `T_MAX`. The per-octave mass of a
    /// nonincreasing integrable function eventually decays geometrically;
    /// the remaining tail is bounded by the geometric series of the last
    /// observed ratio. Non-decaying octaves mean divergence.
    fn tail_by_octaves(&self, t: f64) -> Result<TailValue> {
        let f = |s: f64| self.eval(s);
        let start = t.max(T_MIN);
        let mut total = head_piece(self, t);
        let mut lo = start;
        let mut masses: alloc::vec::Vec<f64> = alloc::vec::Vec::new();
        while lo < T_MAX || masses.len() < 2 {
            let hi = 2.0 * lo;
            let m = integrate_log_cells(&f, lo, hi);
            total += m;
            masses.push(m);
            lo = hi;
            if masses.len() >= 8 && m <= 1e-17 * total {
                return Ok(TailValue { value: total, tail_bound: m });
            }
        }
        let n = masses.len();
        let (last, prev) = (masses[n - 1], masses[n - 2].max(1e-300));
        let ratio = last / prev;
        let far = self.eval(lo);
        if far == 0.0 {
            return Ok(TailValue { value: total, tail_bound: 0.0 });
        }
        match self.monotone {
            MonotoneHint::Nonincreasing if ratio < 0.99 => {
                let bound = last * ratio / (1.0 - ratio);
                Ok(TailValue { value: total + bound, tail_bound: bound })
            }
            MonotoneHint::Nonincreasing => Ok(TailValue { value: f64::INFINITY, tail_bound: f64::INFINITY }),
            MonotoneHint::Unknown => Err(Error::UnboundedTail),
        }
    }
}

/// Contribution of `(t, T_MIN)` when `t` lies below the grid start.
fn head_piece(f: &SymbolicFunction, t: f64) -> f64 {
    if t < T_MIN {
        quad::simpson(&|s| f.eval(s), t, T_MIN, quad::SIMPSON_TOL)
    } else {
        0.0
    }
}

/// `∫_lo^hi f` on cells of the geometric grid `lo·2^{k/8}`, integrated in
/// the variable `u = log s`.
pub(crate) fn integrate_log_cells<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) || !(lo > 0.0) {
        return 0.0;
    }
    let g = |u: f64| {
        let s = libm::exp(u);
        f(s) * s
    };
    quad::simpson_cells(&g, libm::log(lo), libm::log(hi), core::f64::consts::LN_2 / 8.0, quad::SIMPSON_TOL)
}

/// `n` points per decade, geometric, covering `[lo, hi]`.
pub fn geometric_probes(lo: f64, hi: f64, per_decade: usize) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec::Vec::new();
    let step = libm::pow(10.0, 1.0 / per_decade as f64);
    let mut t = lo;
    while t < hi {
        out.push(t);
        t *= step;
    }
    out.push(hi);
    out
}
