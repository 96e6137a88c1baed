//! A pair `f ≺≺ g` with `g ∈ I_h` and `f ∉ I_h` for `h(t) = 2/(1+t)`,
//! showing that `I_h` is not fully symmetric.
//!
//! `f = 2/e⁴` on `(0, e²−1]` and `log(1+t)/(1+t)²` beyond, `g = 2/(1+t)²`.
//! For `t ≥ e²−1`, `(1/h(t))∫_t^∞ f = ½(1 + log(1+t))`.

use alloc::vec::Vec;
use core::f64::consts::E;

use crate::error::Result;
use crate::rearrange::{Horizon, MonotoneHint, StepFunction, SymbolicFunction};
use crate::weights::WeightFunction;

/// `e² − 1`
pub fn knee() -> f64 {
    E * E - 1.0
}

pub fn f_value(t: f64) -> f64 {
    if t <= knee() {
        2.0 / libm::pow(E, 4.0)
    } else {
        libm::log1p(t) / ((1.0 + t) * (1.0 + t))
    }
}

/// `∫_t^∞ f`
pub fn f_tail(t: f64) -> f64 {
    let k = knee();
    if t >= k {
        (1.0 + libm::log1p(t)) / (1.0 + t)
    } else {
        (k - t) * 2.0 / libm::pow(E, 4.0) + 3.0 / (E * E)
    }
}

pub fn g_value(t: f64) -> f64 {
    2.0 / ((1.0 + t) * (1.0 + t))
}

/// `∫_t^∞ g = 2/(1+t)`
pub fn g_tail(t: f64) -> f64 {
    2.0 / (1.0 + t)
}

pub fn f() -> SymbolicFunction {
    SymbolicFunction::from_fn("f", Horizon::INFINITE, f_value, MonotoneHint::Nonincreasing).with_tail(f_tail)
}

pub fn g() -> SymbolicFunction {
    SymbolicFunction::from_fn("g", Horizon::INFINITE, g_value, MonotoneHint::Nonincreasing).with_tail(g_tail)
}

pub fn weight() -> WeightFunction {
    WeightFunction::paper_tail()
}

/// `½(1 + log(1+t))`, valid for `t ≥ e²−1`.
pub fn transform_closed_form(t: f64) -> f64 {
    0.5 * (1.0 + libm::log1p(t))
}

/// Dyadic cells `(0, 2^{k0}), (2^{k0}, 2^{k0+1}), ...` up to `end`.
pub fn dyadic_cells(k0: i32, end: f64) -> Vec<f64> {
    let mut out = alloc::vec![0.0];
    let mut k = k0;
    while libm::exp2(k as f64) < end {
        out.push(libm::exp2(k as f64));
        k += 1;
    }
    out.push(end);
    out
}

/// Step function of exact cell averages of a function given by its tail
/// integral, zero beyond the last breakpoint.
pub fn discretise(tail: fn(f64) -> f64, breakpoints: Vec<f64>) -> Result<StepFunction> {
    let values = breakpoints.windows(2).map(|w| ((tail(w[0]) - tail(w[1])) / (w[1] - w[0])).max(0.0)).collect();
    StepFunction::new(Horizon::INFINITE, breakpoints, values)
}

/// Dyadic discretisations of `(f, g)` on `(0, e⁸)`.
pub fn dyadic_pair() -> Result<(StepFunction, StepFunction)> {
    let cells = dyadic_cells(-10, libm::exp(8.0));
    Ok((discretise(f_tail, cells.clone())?, discretise(g_tail, cells)?))
}
