//! Exact step functions, symbolic functions, distribution functions,
//! decreasing rearrangements and singular values.

mod matrix;
mod step;
mod symbolic;

pub use matrix::{mu_of_list, singular_values, MatrixOperator, SingularValueList, MAX_SWEEPS};
pub use step::{merge_breakpoints, Horizon, StepFunction};
pub use symbolic::{geometric_probes, Evaluator, MonotoneHint, SymbolicFunction, TailValue, T_MAX, T_MIN};

use crate::error::{invalid, Result};

/// A nonincreasing function that plays the role of `μ(·, X)`.
#[derive(Debug, Clone)]
pub enum MuFunction {
    Step(StepFunction),
    Symbolic(SymbolicFunction),
}

impl MuFunction {
    pub fn horizon(&self) -> Horizon {
        match self {
            MuFunction::Step(s) => s.horizon(),
            MuFunction::Symbolic(s) => s.horizon(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            MuFunction::Step(s) => s.eval(t),
            MuFunction::Symbolic(s) => s.eval(t),
        }
    }

    /// `∫_t^b μ`; `+∞` when the tail diverges.
    pub fn tail_integral(&self, t: f64) -> Result<f64> {
        tail_integral(self, t)
    }

    pub fn distribution(&self, s: f64) -> f64 {
        distribution(self, s)
    }

    /// Right end of the region where the function may be nonzero.
    pub fn support_end(&self) -> f64 {
        match self {
            MuFunction::Step(s) => s.support_end(),
            MuFunction::Symbolic(s) => s.horizon().value(),
        }
    }
}

/// `d_f(s) = m({f > s})`.
pub fn distribution(f: &MuFunction, s: f64) -> f64 {
    match f {
        MuFunction::Step(step) => step.distribution(s),
        MuFunction::Symbolic(sym) => sym.distribution(s),
    }
}

/// `∫_t^b f` for `0 ≤ t`. Exact for step functions.
pub fn tail_integral(f: &MuFunction, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid!("tail integral needs t >= 0, got {t}"));
    }
    match f {
        MuFunction::Step(step) => Ok(step.tail_integral(t)),
        MuFunction::Symbolic(sym) => sym.tail_integral(t).map(|v| v.value),
    }
}
