//! Computable surrogates for dilation-invariant extended limits `ω`.
//!
//! Three kinds are provided: the logarithmic Cesàro mean
//! `(1/log t)∫_1^t f(s) ds/s`, the windowed functional
//! `p_D(f) = lim_t sup_{a≥1} (1/log t)∫_a^{at} f(s) ds/s` truncated to a
//! finite `a`-grid, and a raw liminf/limsup bracket. None of them is an
//! extended limit; [`dilation_defect`] and [`h_compat_defect`] measure how
//! far a surrogate is from the contract on a given symbol.
//!
//! Means are integrated in `u = log s` on a fixed mesh of cells of width
//! `log 2 / 8`, split at caller-supplied kinks, so that surrogate values are
//! monotone in the symbol.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{E, LN_2};

use crate::error::{invalid, Error, Result};
use crate::quad;
use crate::weights::{ratio, WeightFunction};

pub const DEFAULT_TOL: f64 = 1e-3;
const CELL: f64 = LN_2 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateKind {
    LogCesaro,
    DilationPD,
    RawBracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    AtInfinity,
    /// Evaluated on `s ↦ f(1/s)`.
    AtZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSurrogate {
    kind: SurrogateKind,
    direction: Direction,
    t_schedule: Vec<f64>,
    a_grid: Vec<f64>,
    tol: f64,
}

/// `{1e3, 1e4.5, ..., 1e12}`
pub fn default_schedule() -> Vec<f64> {
    (0..7).map(|k| libm::pow(10.0, 3.0 + 1.5 * k as f64)).collect()
}

/// `{2^0, ..., 2^k_max}`
pub fn dyadic_grid(k_max: u32) -> Vec<f64> {
    (0..=k_max).map(|k| libm::exp2(k as f64)).collect()
}

impl LimitSurrogate {
    /// Default schedule, `a`-grid `2^0..2^40` and tolerance `1e-3`.
    pub fn new(kind: SurrogateKind) -> Self {
        LimitSurrogate {
            kind,
            direction: Direction::AtInfinity,
            t_schedule: default_schedule(),
            a_grid: dyadic_grid(40),
            tol: DEFAULT_TOL,
        }
    }

    /// Checks the schedule invariants: at least 4 horizons spanning at least
    /// 6 decades, monotone towards the limit point, and `a_grid` starting at 1.
    pub fn with_schedule(
        kind: SurrogateKind,
        direction: Direction,
        t_schedule: Vec<f64>,
        a_grid: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        let s = Self::with_schedule_unchecked(kind, direction, t_schedule, a_grid, tol)?;
        if s.t_schedule.len() < 4 {
            return Err(invalid!("t_schedule needs at least 4 horizons"));
        }
        let span = libm::log10(s.t_schedule[s.t_schedule.len() - 1] / s.t_schedule[0]).abs();
        if span < 6.0 - 1e-9 {
            return Err(invalid!("t_schedule spans {span:.3} decades, at least 6 are required"));
        }
        Ok(s)
    }

    /// Like [`with_schedule`](Self::with_schedule) without the length and
    /// span requirements; horizons must still be monotone towards the limit
    /// point and beyond `e` (or below `1/e` at zero).
    pub fn with_schedule_unchecked(
        kind: SurrogateKind,
        direction: Direction,
        t_schedule: Vec<f64>,
        a_grid: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        if t_schedule.is_empty() {
            return Err(invalid!("t_schedule is empty"));
        }
        match direction {
            Direction::AtInfinity => {
                if t_schedule.windows(2).any(|w| !(w[1] > w[0])) || !(t_schedule[0] > E) {
                    return Err(invalid!("t_schedule must increase and start above e"));
                }
            }
            Direction::AtZero => {
                if t_schedule.windows(2).any(|w| !(w[1] < w[0]))
                    || !(t_schedule[0] < 1.0 / E && t_schedule[t_schedule.len() - 1] > 0.0)
                {
                    return Err(invalid!("t_schedule at zero must decrease and start below 1/e"));
                }
            }
        }
        if t_schedule.iter().any(|t| !t.is_finite()) {
            return Err(invalid!("horizons must be finite"));
        }
        if a_grid.first() != Some(&1.0) || a_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid!("a_grid must start at 1 and increase"));
        }
        if a_grid.iter().any(|a| !a.is_finite()) {
            return Err(invalid!("a_grid must be finite"));
        }
        if !(tol > 0.0) {
            return Err(invalid!("tolerance must be positive"));
        }
        Ok(LimitSurrogate { kind, direction, t_schedule, a_grid, tol })
    }

    /// Seven geometric horizons ending at `t_final`, starting nine decades
    /// earlier but not below `1e3`.
    pub fn ending_at(kind: SurrogateKind, t_final: f64, a_max: f64, tol: f64) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(invalid!("final horizon must be positive and finite"));
        }
        let top = libm::log10(t_final);
        let start = (top - 9.0).max(3.0);
        let step = (top - start) / 6.0;
        let schedule: Vec<f64> = (0..7).map(|k| libm::pow(10.0, start + step * k as f64)).collect();
        if !(a_max >= 1.0 && a_max.is_finite()) {
            return Err(invalid!("a_max must be at least 1"));
        }
        let k_max = libm::floor(libm::log2(a_max) + 1e-9) as u32;
        Self::with_schedule(kind, Direction::AtInfinity, schedule, dyadic_grid(k_max), tol)
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        if direction != self.direction {
            self.t_schedule = self.t_schedule.iter().map(|t| 1.0 / t).collect();
            self.direction = direction;
        }
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(invalid!("tolerance must be positive"));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn kind(&self) -> SurrogateKind {
        self.kind
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn t_schedule(&self) -> &[f64] {
        &self.t_schedule
    }

    pub fn a_grid(&self) -> &[f64] {
        &self.a_grid
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Final horizon in the `s → ∞` variable.
    pub fn final_horizon(&self) -> f64 {
        self.horizons().last().copied().unwrap_or(f64::NAN)
    }

    pub fn description(&self) -> String {
        let t = self.t_schedule[self.t_schedule.len() - 1];
        match self.kind {
            SurrogateKind::LogCesaro => format!("logcesaro:t={t:e}"),
            SurrogateKind::DilationPD => {
                format!("pd:t={t:e},a={:e}", self.a_grid[self.a_grid.len() - 1])
            }
            SurrogateKind::RawBracket => format!("bracket:t={t:e}"),
        }
    }

    fn horizons(&self) -> Vec<f64> {
        match self.direction {
            Direction::AtInfinity => self.t_schedule.clone(),
            Direction::AtZero => self.t_schedule.iter().map(|t| 1.0 / t).collect(),
        }
    }

    /// Evaluates the surrogate on `f`.
    pub fn evaluate<F: Fn(f64) -> f64>(&self, f: &F) -> Result<SurrogateValue> {
        self.evaluate_with_kinks(f, &[])
    }

    /// Evaluates the surrogate on `f`, whose only non-smooth points are
    /// `kinks` (in the original variable).
    pub fn evaluate_with_kinks<F: Fn(f64) -> f64>(&self, f: &F, kinks: &[f64]) -> Result<SurrogateValue> {
        match self.direction {
            Direction::AtInfinity => self.evaluate_forward(f, kinks),
            Direction::AtZero => {
                let g = |s: f64| f(1.0 / s);
                let k: Vec<f64> = kinks.iter().filter(|&&x| x > 0.0).map(|x| 1.0 / x).collect();
                self.evaluate_forward(&g, &k)
            }
        }
    }

    fn evaluate_forward<F: Fn(f64) -> f64>(&self, f: &F, kinks: &[f64]) -> Result<SurrogateValue> {
        let horizons = self.horizons();
        let log_kinks: Vec<f64> = kinks.iter().filter(|&&x| x > 0.0).map(|&x| libm::log(x)).collect();
        let mut iterates = Vec::with_capacity(horizons.len());
        match self.kind {
            SurrogateKind::LogCesaro => {
                for &t in &horizons {
                    let v = window_mean(f, 1.0, t, &log_kinks)?;
                    iterates.push(Iterate::plain(t, v));
                }
            }
            SurrogateKind::DilationPD => {
                for &t in &horizons {
                    let mut best = (f64::NEG_INFINITY, 1.0);
                    for &a in &self.a_grid {
                        let v = window_mean(f, a, t, &log_kinks)?;
                        if v > best.0 {
                            best = (v, a);
                        }
                    }
                    iterates.push(Iterate { window_start: Some(best.1), ..Iterate::plain(t, best.0) });
                }
            }
            SurrogateKind::RawBracket => {
                for &t in &horizons {
                    let (lo, hi) = grid_bracket(f, libm::sqrt(t), t)?;
                    iterates.push(Iterate { bracket: Some((lo, hi)), ..Iterate::plain(t, 0.5 * (lo + hi)) });
                }
                let (lo, hi) = iterates.last().and_then(|i| i.bracket).unwrap();
                return Ok(SurrogateValue {
                    estimate: 0.5 * (lo + hi),
                    lower: lo,
                    upper: hi,
                    converged: hi - lo <= self.tol,
                    iterates,
                    a_max: None,
                });
            }
        }
        let estimate = iterates.last().unwrap().value;
        let tail = &iterates[iterates.len().saturating_sub(3)..];
        let lower = tail.iter().map(|i| i.value).fold(f64::INFINITY, f64::min);
        let upper = tail.iter().map(|i| i.value).fold(f64::NEG_INFINITY, f64::max);
        Ok(SurrogateValue {
            estimate,
            lower,
            upper,
            converged: upper - lower <= self.tol,
            iterates,
            a_max: (self.kind == SurrogateKind::DilationPD).then(|| self.a_grid[self.a_grid.len() - 1]),
        })
    }
}

/// One horizon of a surrogate evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub horizon: f64,
    pub value: f64,
    /// Maximising window start `a` for `p_D`.
    pub window_start: Option<f64>,
    /// Grid `(liminf, limsup)` for the raw bracket.
    pub bracket: Option<(f64, f64)>,
}

impl Iterate {
    fn plain(horizon: f64, value: f64) -> Self {
        Iterate { horizon, value, window_start: None, bracket: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateValue {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub converged: bool,
    pub iterates: Vec<Iterate>,
    /// Truncation point of the `a`-supremum for `p_D`.
    pub a_max: Option<f64>,
}

/// `(1/log t)∫_a^{at} f(s) ds/s` on the fixed mesh in `u = log s`.
fn window_mean<F: Fn(f64) -> f64>(f: &F, a: f64, t: f64, log_kinks: &[f64]) -> Result<f64> {
    let (lo, len) = (libm::log(a), libm::log(t));
    let unbounded_at = core::cell::Cell::new(None::<f64>);
    let g = |u: f64| {
        let s = libm::exp(u);
        let v = f(s);
        if !v.is_finite() && unbounded_at.get().is_none() {
            unbounded_at.set(Some(s));
        }
        v
    };
    let integral = quad::gauss_cells(&g, lo, lo + len, CELL, log_kinks);
    if let Some(at) = unbounded_at.get() {
        return Err(Error::UnboundedSymbol { at });
    }
    Ok(integral / len)
}

/// Min and max of `f` on the grid `lo·2^{k/8}` up to `hi`.
fn grid_bracket<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let step = libm::exp2(0.125);
    let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut s = lo;
    while s <= hi * (1.0 + 1e-12) {
        let v = f(s);
        if !v.is_finite() {
            return Err(Error::UnboundedSymbol { at: s });
        }
        mn = mn.min(v);
        mx = mx.max(v);
        s *= step;
    }
    Ok((mn, mx))
}

/// `(1/log t)∫_1^t f(s) ds/s`.
pub fn log_cesaro<F: Fn(f64) -> f64>(f: &F, t: f64) -> Result<f64> {
    log_cesaro_with_kinks(f, t, &[])
}

pub fn log_cesaro_with_kinks<F: Fn(f64) -> f64>(f: &F, t: f64, kinks: &[f64]) -> Result<f64> {
    if !(t > E) {
        return Err(invalid!("log-Cesàro horizon must exceed e, got {t}"));
    }
    let log_kinks: Vec<f64> = kinks.iter().filter(|&&x| x > 0.0).map(|&x| libm::log(x)).collect();
    window_mean(f, 1.0, t, &log_kinks)
}

/// `p_D(f)` with the supremum over window starts truncated to the surrogate's `a`-grid.
pub fn p_d<F: Fn(f64) -> f64>(f: &F, surrogate: &LimitSurrogate) -> Result<SurrogateValue> {
    p_d_with_kinks(f, surrogate, &[])
}

pub fn p_d_with_kinks<F: Fn(f64) -> f64>(f: &F, surrogate: &LimitSurrogate, kinks: &[f64]) -> Result<SurrogateValue> {
    let s = LimitSurrogate { kind: SurrogateKind::DilationPD, ..surrogate.clone() };
    s.evaluate_with_kinks(f, kinks)
}

pub fn evaluate<F: Fn(f64) -> f64>(surrogate: &LimitSurrogate, f: &F) -> Result<SurrogateValue> {
    surrogate.evaluate(f)
}

/// `|ω(f) − ω(s ↦ f(2s))|` at the final horizon.
pub fn dilation_defect<F: Fn(f64) -> f64>(surrogate: &LimitSurrogate, f: &F) -> Result<f64> {
    dilation_defect_with_kinks(surrogate, f, &[])
}

pub fn dilation_defect_with_kinks<F: Fn(f64) -> f64>(surrogate: &LimitSurrogate, f: &F, kinks: &[f64]) -> Result<f64> {
    let g = |s: f64| f(2.0 * s);
    let half: Vec<f64> = kinks.iter().map(|k| 0.5 * k).collect();
    let a = surrogate.evaluate_with_kinks(f, kinks)?.estimate;
    let b = surrogate.evaluate_with_kinks(&g, &half)?.estimate;
    Ok(libm::fabs(a - b))
}

/// `|ω(t ↦ h(2t)/h(t)) − 1|`.
pub fn h_compat_defect(surrogate: &LimitSurrogate, h: &WeightFunction) -> Result<f64> {
    let v = surrogate.evaluate(&|t: f64| ratio(h, t))?;
    Ok(libm::fabs(v.estimate - 1.0))
}

/// `2 log 2 · sup|f| / log t`
pub fn dilation_defect_bound(sup_abs: f64, t: f64) -> f64 {
    2.0 * LN_2 * sup_abs / libm::log(t)
}
