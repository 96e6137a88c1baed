use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// The trace of the identity, `τ(1)`. May be infinite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Horizon(f64);

impl Horizon {
    pub const INFINITE: Horizon = Horizon(f64::INFINITY);

    pub fn new(b: f64) -> Result<Self> {
        if b > 0.0 && !b.is_nan() {
            Ok(Horizon(b))
        } else {
            Err(invalid!("horizon must be positive, got {b}"))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn max(self, other: Horizon) -> Horizon {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }
}

/// Non-negative piecewise-constant function on `(0, b)`.
///
/// `values[i]` is taken on `[breakpoints[i], breakpoints[i + 1])`. On an
/// infinite horizon the function vanishes past the last breakpoint. The
/// representation is canonical: equal neighbours are merged and, for an
/// infinite horizon, trailing zero pieces are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    horizon: Horizon,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(horizon: Horizon, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(invalid!("breakpoints must contain at least 0"));
        }
        if breakpoints[0] != 0.0 {
            return Err(invalid!("breakpoints must start at 0"));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(invalid!(
                "expected {} values for {} breakpoints, got {}",
                breakpoints.len() - 1,
                breakpoints.len(),
                values.len()
            ));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(invalid!("breakpoints must be strictly increasing ({} then {})", w[0], w[1]));
        }
        let last = *breakpoints.last().unwrap();
        if !last.is_finite() {
            return Err(invalid!("breakpoints must be finite"));
        }
        if horizon.is_finite() && last != horizon.value() {
            return Err(invalid!("last breakpoint {last} must equal the finite horizon {}", horizon.value()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid!("values must be finite and non-negative, got {v}"));
        }
        Ok(Self::canonical(horizon, breakpoints, values))
    }

    /// Builds the canonical form of already validated data.
    pub(crate) fn canonical(horizon: Horizon, breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        let mut bp = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        bp.push(breakpoints[0]);
        for (i, &v) in values.iter().enumerate() {
            let right = breakpoints[i + 1];
            if let Some(&prev) = vals.last() {
                if prev == v {
                    *bp.last_mut().unwrap() = right;
                    continue;
                }
            }
            vals.push(v);
            bp.push(right);
        }
        if !horizon.is_finite() {
            while vals.last() == Some(&0.0) {
                vals.pop();
                bp.pop();
            }
        }
        StepFunction { horizon, breakpoints: bp, values: vals }
    }

    /// The zero function.
    pub fn zero(horizon: Horizon) -> Self {
        if horizon.is_finite() {
            Self::canonical(horizon, alloc::vec![0.0, horizon.value()], alloc::vec![0.0])
        } else {
            Self::canonical(horizon, alloc::vec![0.0], Vec::new())
        }
    }

    /// Indicator of `(0, a)` scaled by `c`.
    pub fn indicator(horizon: Horizon, a: f64, c: f64) -> Result<Self> {
        let b = horizon.value();
        if !(a > 0.0) {
            return Err(invalid!("indicator length must be positive"));
        }
        if horizon.is_finite() && a < b {
            Self::new(horizon, alloc::vec![0.0, a, b], alloc::vec![c, 0.0])
        } else if horizon.is_finite() {
            Self::new(horizon, alloc::vec![0.0, b], alloc::vec![c])
        } else {
            Self::new(horizon, alloc::vec![0.0, a], alloc::vec![c])
        }
    }

    /// Values on consecutive unit intervals `[0,1), [1,2), ...`, infinite horizon.
    pub fn unit_steps(values: &[f64]) -> Result<Self> {
        let bp = (0..=values.len()).map(|i| i as f64).collect();
        Self::new(Horizon::INFINITE, bp, values.to_vec())
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// End of the explicit representation (`b` when finite).
    pub fn support_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn pieces(&self) -> impl DoubleEndedIterator<Item = (f64, f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.breakpoints[i], self.breakpoints[i + 1], v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Right-continuous evaluation; 0 outside the representation.
    pub fn eval(&self, t: f64) -> f64 {
        if !(t >= 0.0) || t >= self.support_end() {
            return 0.0;
        }
        // first breakpoint strictly greater than t
        let idx = self.breakpoints.partition_point(|&x| x <= t);
        self.values[idx - 1]
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// `∫_0^b f`.
    pub fn integral(&self) -> f64 {
        self.pieces().map(|(l, r, v)| v * (r - l)).sum()
    }

    /// `∫_0^t f`.
    pub fn head_integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, v) in self.pieces() {
            if t <= l {
                break;
            }
            acc += v * (r.min(t) - l);
        }
        acc
    }

    /// `∫_t^b f`.
    pub fn tail_integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, v) in self.pieces().rev() {
            if r <= t {
                break;
            }
            acc += v * (r - l.max(t));
        }
        acc
    }

    /// Measure of `{f > s}`. Always finite: on an infinite horizon the
    /// support is compact.
    pub fn distribution(&self, s: f64) -> f64 {
        self.pieces().filter(|&(_, _, v)| v > s).map(|(l, r, _)| r - l).sum()
    }

    /// The decreasing rearrangement `f*`.
    pub fn rearrange(&self) -> StepFunction {
        if self.is_nonincreasing() {
            return self.clone();
        }
        let mut pieces: Vec<(f64, f64)> = self.pieces().map(|(l, r, v)| (v, r - l)).collect();
        // stable: ties keep their original order so lengths accumulate deterministically
        pieces.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let mut bp = Vec::with_capacity(pieces.len() + 1);
        let mut vals = Vec::with_capacity(pieces.len());
        let mut x = 0.0;
        bp.push(0.0);
        let last = pieces.len();
        for (i, (v, len)) in pieces.into_iter().enumerate() {
            x += len;
            if i + 1 == last && self.horizon.is_finite() {
                x = self.horizon.value();
            }
            bp.push(x);
            vals.push(v);
        }
        Self::canonical(self.horizon, bp, vals)
    }

    /// `σ_{1/2} f`: `f(2t)` below `b/2`, zero above.
    pub fn dilate_half(&self) -> StepFunction {
        let mut bp: Vec<f64> = self.breakpoints.iter().map(|x| 0.5 * x).collect();
        let mut vals = self.values.clone();
        if self.horizon.is_finite() {
            bp.push(self.horizon.value());
            vals.push(0.0);
        }
        Self::canonical(self.horizon, bp, vals)
    }

    /// Zero extension onto a longer horizon.
    pub fn embed(&self, horizon: Horizon) -> Result<StepFunction> {
        if horizon.value() < self.horizon.value() {
            return Err(invalid!(
                "cannot embed horizon {} into shorter horizon {}",
                self.horizon.value(),
                horizon.value()
            ));
        }
        if horizon == self.horizon {
            return Ok(self.clone());
        }
        let mut bp = self.breakpoints.clone();
        let mut vals = self.values.clone();
        if horizon.is_finite() && self.support_end() < horizon.value() {
            bp.push(horizon.value());
            vals.push(0.0);
        }
        Ok(Self::canonical(horizon, bp, vals))
    }

    pub fn scale(&self, c: f64) -> Result<StepFunction> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(invalid!("scale factor must be finite and non-negative"));
        }
        let vals = self.values.iter().map(|v| v * c).collect();
        Ok(Self::canonical(self.horizon, self.breakpoints.clone(), vals))
    }

    /// Pointwise sum over the common refinement (the two functions act as
    /// commuting multiplication operators).
    pub fn add(&self, other: &StepFunction) -> StepFunction {
        let horizon = self.horizon.max(other.horizon);
        let grid = merge_breakpoints(&self.breakpoints, &other.breakpoints);
        let mut vals = Vec::with_capacity(grid.len().saturating_sub(1));
        for w in grid.windows(2) {
            vals.push(self.eval(w[0]) + other.eval(w[0]));
        }
        let mut grid = grid;
        if horizon.is_finite() && *grid.last().unwrap() < horizon.value() {
            grid.push(horizon.value());
            vals.push(0.0);
        }
        Self::canonical(horizon, grid, vals)
    }

    /// Keeps the part of the function strictly above `level`, rearranged.
    pub fn cut_above(&self, level: f64) -> StepFunction {
        let mu = self.rearrange();
        let vals = mu.values.iter().map(|&v| if v > level { v } else { 0.0 }).collect();
        Self::canonical(mu.horizon, mu.breakpoints.clone(), vals)
    }

    /// Keeps the part of the function at or below `level`, rearranged.
    pub fn cut_below(&self, level: f64) -> StepFunction {
        let vals = self.values.iter().map(|&v| if v > level { 0.0 } else { v }).collect();
        Self::canonical(self.horizon, self.breakpoints.clone(), vals).rearrange()
    }
}

/// Sorted union of two breakpoint lists.
pub fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), Some(&y)) if y < x => {
                j += 1;
                y
            }
            (Some(&x), Some(_)) => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}
