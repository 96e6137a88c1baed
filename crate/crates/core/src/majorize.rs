//! Hardy–Littlewood and tail majorisation, and the singular-value sum
//! inequalities used for additivity of `τ_ω`.
//!
//! For step functions `t ↦ ∫_0^t μ` and `t ↦ ∫_t^b μ` are piecewise linear
//! with kinks only at breakpoints of `μ`. A difference of two such
//! functions is linear between merged breakpoints, so its infimum over
//! `(0, b)` is attained at a merged breakpoint or at an end of the range.
//! Checking those points decides the inequality exactly; midpoints are
//! probed as well so witnesses are reported inside pieces when ties occur.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rearrange::{merge_breakpoints, singular_values, MatrixOperator, StepFunction};

/// Slack for inequalities that pass through a floating-point SVD.
pub const SVD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorisationReport {
    pub holds: bool,
    /// Minimum of right-hand side minus left-hand side over the probes.
    pub worst_margin: f64,
    pub witness_t: f64,
}

impl MajorisationReport {
    fn from_margins<I: IntoIterator<Item = (f64, f64)>>(margins: I, slack: f64) -> Self {
        let mut worst = f64::INFINITY;
        let mut witness = 0.0;
        for (t, m) in margins {
            if m < worst {
                worst = m;
                witness = t;
            }
        }
        if worst == f64::INFINITY {
            worst = 0.0;
        }
        MajorisationReport { holds: worst >= -slack, worst_margin: worst, witness_t: witness }
    }
}

fn common_rearrangements(a: &StepFunction, b: &StepFunction) -> Result<(StepFunction, StepFunction)> {
    let horizon = a.horizon().max(b.horizon());
    Ok((a.rearrange().embed(horizon)?, b.rearrange().embed(horizon)?))
}

/// Merged breakpoints together with the midpoints between them.
fn probes_with_midpoints(points: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * points.len());
    for (i, &x) in points.iter().enumerate() {
        if i > 0 {
            out.push(0.5 * (points[i - 1] + x));
        }
        out.push(x);
    }
    out
}

/// `A ≺≺ B`: `∫_0^t μ(A) ≤ ∫_0^t μ(B)` for all `t ∈ (0, b)`.
pub fn hl_majorized(a: &StepFunction, b: &StepFunction) -> Result<MajorisationReport> {
    let (ma, mb) = common_rearrangements(a, b)?;
    let points = merge_breakpoints(ma.breakpoints(), mb.breakpoints());
    let probes = probes_with_midpoints(&points);
    let margins = probes.into_iter().filter(|&t| t > 0.0).map(|t| (t, mb.head_integral(t) - ma.head_integral(t)));
    Ok(MajorisationReport::from_margins(margins, 0.0))
}

/// `A ≺≺_tl B`: `∫_t^b μ(A) ≤ ∫_t^b μ(B)` for all `t ∈ (0, b)`.
/// The limit `t → 0⁺` is probed; `t = b` is trivial and skipped.
pub fn tail_majorized(a: &StepFunction, b: &StepFunction) -> Result<MajorisationReport> {
    let (ma, mb) = common_rearrangements(a, b)?;
    let end = ma.horizon().value();
    let points = merge_breakpoints(ma.breakpoints(), mb.breakpoints());
    let probes = probes_with_midpoints(&points);
    let margins = probes.into_iter().filter(|&t| t < end).map(|t| (t, mb.tail_integral(t) - ma.tail_integral(t)));
    Ok(MajorisationReport::from_margins(margins, 0.0))
}

/// `σ_{1/2} f`.
pub fn dilate_half(f: &StepFunction) -> StepFunction {
    f.dilate_half()
}

/// `μ(2t, A+B) ≤ μ(t, A) + μ(t, B)` on `grid`, for arbitrary matrices.
pub fn check_singular_value_sum(
    a: &MatrixOperator,
    b: &MatrixOperator,
    grid: &[f64],
    tol: f64,
) -> Result<MajorisationReport> {
    let (mu_a, mu_b, mu_sum) = matrix_mus(a, b, tol)?;
    let scale = mu_a.sup().max(mu_b.sup()).max(1.0);
    let margins = grid.iter().map(|&t| (t, mu_a.eval(t) + mu_b.eval(t) - mu_sum.eval(2.0 * t)));
    Ok(MajorisationReport::from_margins(margins, SVD_SLACK * scale))
}

/// Both singular-value inequalities for positive semidefinite `A`, `B`:
/// the pointwise bound `μ(2t, A+B) ≤ μ(t, A) + μ(t, B)` and the head chain
/// `∫_0^t μ(A+B) ≤ ∫_0^t (μ(A) + μ(B)) ≤ 2∫_0^t σ_{1/2}μ(A+B)`.
pub fn check_sum_inequalities(
    a: &MatrixOperator,
    b: &MatrixOperator,
    grid: &[f64],
    tol: f64,
) -> Result<(MajorisationReport, MajorisationReport)> {
    if !a.is_positive_semidefinite(SVD_SLACK) || !b.is_positive_semidefinite(SVD_SLACK) {
        return Err(Error::Precondition("the head-integral chain needs positive semidefinite operators".into()));
    }
    let pointwise = check_singular_value_sum(a, b, grid, tol)?;
    let (mu_a, mu_b, mu_sum) = matrix_mus(a, b, tol)?;
    let scale = mu_sum.integral().max(1.0);
    let margins = grid.iter().map(|&t| (t, head_chain_margin(&mu_a, &mu_b, &mu_sum, t)));
    let chain = MajorisationReport::from_margins(margins, SVD_SLACK * scale);
    Ok((pointwise, chain))
}

fn matrix_mus(a: &MatrixOperator, b: &MatrixOperator, tol: f64) -> Result<(StepFunction, StepFunction, StepFunction)> {
    let sum = a.add(b)?;
    Ok((singular_values(a, tol)?.to_step(), singular_values(b, tol)?.to_step(), singular_values(&sum, tol)?.to_step()))
}

fn head_chain_margin(mu_a: &StepFunction, mu_b: &StepFunction, mu_sum: &StepFunction, t: f64) -> f64 {
    let left = mu_sum.head_integral(t);
    let middle = mu_a.head_integral(t) + mu_b.head_integral(t);
    // 2∫_0^t σ_{1/2}μ = ∫_0^{2t} μ
    let right = mu_sum.head_integral(2.0 * t);
    (middle - left).min(right - middle)
}

fn tail_chain_margin(mu_a: &StepFunction, mu_b: &StepFunction, mu_sum: &StepFunction, t: f64) -> f64 {
    let left = mu_sum.tail_integral(2.0 * t);
    let middle = mu_a.tail_integral(t) + mu_b.tail_integral(t);
    let right = mu_sum.tail_integral(t);
    (middle - left).min(right - middle)
}

/// Probe set for chains involving `t` and `2t`: merged breakpoints of the
/// three functions together with the halves of the breakpoints of `μ(A+B)`.
pub fn chain_probes(mu_a: &StepFunction, mu_b: &StepFunction, mu_sum: &StepFunction) -> Vec<f64> {
    let halves: Vec<f64> = mu_sum.breakpoints().iter().map(|x| 0.5 * x).collect();
    let merged = merge_breakpoints(
        &merge_breakpoints(mu_a.breakpoints(), mu_b.breakpoints()),
        &merge_breakpoints(mu_sum.breakpoints(), &halves),
    );
    probes_with_midpoints(&merged)
}

/// Head chain on step realisations of `μ(A)`, `μ(B)`, `μ(A+B)`, checked at
/// every chain probe with the given slack.
pub fn head_chain(mu_a: &StepFunction, mu_b: &StepFunction, mu_sum: &StepFunction, slack: f64) -> MajorisationReport {
    let probes = chain_probes(mu_a, mu_b, mu_sum);
    let margins = probes.into_iter().filter(|&t| t > 0.0).map(|t| (t, head_chain_margin(mu_a, mu_b, mu_sum, t)));
    MajorisationReport::from_margins(margins, slack)
}

/// Tail chain `∫_{2t}^b μ(A+B) ≤ ∫_t^b (μ(A) + μ(B)) ≤ ∫_t^b μ(A+B)`, the
/// integrated form of the `τ_ω` additivity sandwich.
pub fn tail_chain(mu_a: &StepFunction, mu_b: &StepFunction, mu_sum: &StepFunction, slack: f64) -> MajorisationReport {
    let probes = chain_probes(mu_a, mu_b, mu_sum);
    let margins = probes.into_iter().map(|t| (t, tail_chain_margin(mu_a, mu_b, mu_sum, t)));
    MajorisationReport::from_margins(margins, slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rearrange::Horizon;
    use alloc::vec;

    fn unit(vals: &[f64]) -> StepFunction {
        StepFunction::unit_steps(vals).unwrap()
    }

    #[test]
    fn reflexive() {
        let a = unit(&[3.0, 1.0, 2.0]);
        let hl = hl_majorized(&a, &a).unwrap();
        assert!(hl.holds);
        assert_eq!(hl.worst_margin, 0.0);
        let tl = tail_majorized(&a, &a).unwrap();
        assert!(tl.holds);
        assert_eq!(tl.worst_margin, 0.0);
    }

    #[test]
    fn half_scaling() {
        let b = unit(&[4.0, 2.0]);
        let a = b.scale(0.5).unwrap();
        let r = hl_majorized(&a, &b).unwrap();
        assert!(r.holds);
        // smallest margin at the first midpoint: ½·4·½
        assert_eq!(r.worst_margin, 1.0);
        assert_eq!(r.witness_t, 0.5);
    }

    #[test]
    fn tail_failure_example() {
        let b2 = Horizon::new(2.0).unwrap();
        let a = StepFunction::new(b2, vec![0.0, 1.0, 2.0], vec![1.0, 1.0]).unwrap();
        let b = StepFunction::new(b2, vec![0.0, 1.0, 2.0], vec![2.0, 0.0]).unwrap();
        let r = tail_majorized(&a, &b).unwrap();
        assert!(!r.holds);
        assert_eq!(r.worst_margin, -1.0);
        assert_eq!(r.witness_t, 1.0);
    }

    #[test]
    fn tail_scaling_holds() {
        let a = unit(&[1.0, 0.5, 0.25]);
        let b = a.scale(2.0).unwrap();
        assert!(tail_majorized(&a, &b).unwrap().holds);
        assert!(!tail_majorized(&b, &a).unwrap().holds);
    }

    #[test]
    fn tail_limit_at_zero_is_probed() {
        // equal tails except near 0: A has more total mass
        let a = StepFunction::new(Horizon::INFINITE, vec![0.0, 0.25, 1.0], vec![4.0, 1.0]).unwrap();
        let b = StepFunction::new(Horizon::INFINITE, vec![0.0, 1.0], vec![1.5]).unwrap();
        let r = tail_majorized(&a, &b).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness_t, 0.0);
    }

    #[test]
    fn horizons_are_embedded() {
        let a = StepFunction::new(Horizon::new(1.0).unwrap(), vec![0.0, 1.0], vec![1.0]).unwrap();
        let b = StepFunction::new(Horizon::new(3.0).unwrap(), vec![0.0, 3.0], vec![1.0]).unwrap();
        assert!(hl_majorized(&a, &b).unwrap().holds);
        assert!(tail_majorized(&a, &b).unwrap().holds);
    }

    #[test]
    fn identity_pair_equality_case() {
        let i2 = MatrixOperator::identity(2);
        let r = check_singular_value_sum(&i2, &i2, &[0.5], 1e-12).unwrap();
        assert!(r.holds);
        assert_eq!(r.worst_margin, 0.0);
    }

    #[test]
    fn diagonal_chain() {
        let a = MatrixOperator::diagonal(&[3.0, 1.0, 0.0]);
        let b = MatrixOperator::diagonal(&[0.0, 1.0, 3.0]);
        let grid = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        let (pointwise, chain) = check_sum_inequalities(&a, &b, &grid, 1e-12).unwrap();
        assert!(pointwise.holds && chain.holds, "{pointwise:?} {chain:?}");
        let mu_a = unit(&[3.0, 1.0]);
        let mu_sum = unit(&[3.0, 3.0, 2.0]);
        assert!(head_chain(&mu_a, &mu_a, &mu_sum, 0.0).holds);
        assert!(tail_chain(&mu_a, &mu_a, &mu_sum, 0.0).holds);
    }

    #[test]
    fn chain_needs_positive_inputs() {
        let a = MatrixOperator::diagonal(&[1.0, -1.0]);
        let i2 = MatrixOperator::identity(2);
        assert!(matches!(check_sum_inequalities(&a, &i2, &[1.0], 1e-12), Err(Error::Precondition(_))));
        assert!(check_singular_value_sum(&a, &i2, &[1.0], 1e-12).unwrap().holds);
    }
}
