//! Independent reference implementations and seeded generators shared by
//! the integration and acceptance tests.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tailtrace_core::rearrange::{Horizon, MatrixOperator, StepFunction};

/// Random step function with at most `max_pieces` pieces. Lengths are
/// multiples of 1/8 and values come from a small set so that ties occur
/// and every sum is exact.
pub fn random_step(rng: &mut ChaCha8Rng, max_pieces: usize) -> StepFunction {
    let n = rng.gen_range(1..=max_pieces);
    let mut bp = vec![0.0];
    let mut x = 0.0;
    for _ in 0..n {
        x += rng.gen_range(1..=16) as f64 / 8.0;
        bp.push(x);
    }
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=6) as f64 * 0.5).collect();
    let horizon = if rng.gen_bool(0.5) { Horizon::INFINITE } else { Horizon::new(x).unwrap() };
    StepFunction::new(horizon, bp, values).unwrap()
}

/// Decreasing rearrangement by grouping equal values, sorting the groups
/// and laying their total measures end to end.
pub fn brute_force_rearrange(f: &StepFunction) -> StepFunction {
    let mut groups: Vec<(f64, f64)> = Vec::new();
    for w in 0..f.values().len() {
        let (v, len) = (f.values()[w], f.breakpoints()[w + 1] - f.breakpoints()[w]);
        match groups.iter_mut().find(|g| g.0 == v) {
            Some(g) => g.1 += len,
            None => groups.push((v, len)),
        }
    }
    groups.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut bp = vec![0.0];
    let mut vals = Vec::new();
    let mut x = 0.0;
    for (v, len) in groups {
        x += len;
        bp.push(x);
        vals.push(v);
    }
    if f.horizon().is_finite() {
        *bp.last_mut().unwrap() = f.horizon().value();
    }
    StepFunction::new(f.horizon(), bp, vals).unwrap()
}

/// `inf{s ≥ 0 : d_f(s) ≤ t}`; the infimum is attained at 0 or at a value of `f`.
pub fn right_continuous_inverse(f: &StepFunction, t: f64) -> f64 {
    std::iter::once(0.0)
        .chain(f.values().iter().copied())
        .filter(|&s| f.distribution(s) <= t)
        .fold(f64::INFINITY, f64::min)
}

pub fn random_complex_matrix(rng: &mut ChaCha8Rng, n: usize) -> MatrixOperator {
    let entries = (0..n * n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    MatrixOperator::new(n, entries).unwrap()
}

/// `B·B*` for a random complex `B`.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> MatrixOperator {
    let b = random_complex_matrix(rng, n);
    b.mul(&b.adjoint()).unwrap()
}

/// `det(x·I − H)` by Gaussian elimination with partial pivoting.
fn char_poly(h: &[Complex64], n: usize, x: f64) -> f64 {
    let mut a: Vec<Complex64> = h.iter().map(|z| -z).collect();
    for i in 0..n {
        a[i * n + i] += x;
    }
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i * n + k].norm_sqr().partial_cmp(&a[j * n + k].norm_sqr()).unwrap()).unwrap();
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let piv = a[k * n + k];
        det *= piv;
        if piv.norm_sqr() == 0.0 {
            return 0.0;
        }
        for i in k + 1..n {
            let m = a[i * n + k] / piv;
            for j in k..n {
                let sub = m * a[k * n + j];
                a[i * n + j] -= sub;
            }
        }
    }
    det.re
}

/// Singular values as square roots of the roots of `det(x·I − M*M)`, found
/// by sign-change scanning and bisection. Assumes distinct eigenvalues.
pub fn singular_values_by_charpoly(m: &MatrixOperator) -> Vec<f64> {
    let n = m.dim();
    let h = m.adjoint().mul(m).unwrap();
    let hv: Vec<Complex64> = h.entries().to_vec();
    let top = (0..n).map(|i| hv[i * n + i].re).sum::<f64>() * (1.0 + 1e-9) + 1e-12;
    let p = |x: f64| char_poly(&hv, n, x);
    let mut resolution = 4000;
    loop {
        let mut roots = Vec::new();
        let lo0 = -1e-12 * top;
        let step = (top - lo0) / resolution as f64;
        let mut prev = (lo0, p(lo0));
        for k in 1..=resolution {
            let x = lo0 + step * k as f64;
            let v = p(x);
            if v == 0.0 {
                roots.push(x);
            } else if prev.1 != 0.0 && (v > 0.0) != (prev.1 > 0.0) {
                let (mut a, mut b) = (prev.0, x);
                let fa_pos = prev.1 > 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if !(mid > a && mid < b) {
                        break;
                    }
                    if (p(mid) > 0.0) == fa_pos {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            prev = (x, v);
        }
        if roots.len() == n || resolution > 4_000_000 {
            let mut s: Vec<f64> = roots.into_iter().map(|r| r.max(0.0).sqrt()).collect();
            s.sort_by(|a, b| b.partial_cmp(a).unwrap());
            return s;
        }
        resolution *= 10;
    }
}
