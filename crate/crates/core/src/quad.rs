//! Quadrature and one-dimensional search kernels.
//!
//! Adaptive Simpson without the Richardson correction term: every node
//! carries a positive weight, so non-negative integrands always produce
//! non-negative results and pointwise-ordered integrands evaluated on the
//! same mesh stay ordered.

/// Absolute tolerance per subinterval.
pub const SIMPSON_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    adapt(f, a, m, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let both = left + right;
    if depth == 0 || (both - whole).abs() <= 15.0 * tol || !(m > a && b > m) {
        return both;
    }
    adapt(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adapt(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Composite adaptive Simpson over a fixed partition of `[a, b]` into
/// cells of width `cell` anchored at `a`. Each cell is integrated with
/// tolerance `tol`; the partition depends only on `(a, b, cell)`.
pub fn simpson_cells<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cell: f64, tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let n = libm::ceil((b - a) / cell) as usize;
    let n = n.max(1);
    let mut sum = 0.0;
    for k in 0..n {
        let lo = a + cell * k as f64;
        let hi = if k + 1 == n { b } else { a + cell * (k + 1) as f64 };
        sum += simpson(f, lo, hi, tol);
    }
    sum
}

const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

fn gauss8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = 0.0;
    for &(x, w) in &GL8 {
        acc += w * (f(m - r * x) + f(m + r * x));
    }
    acc * r
}

/// Fixed-mesh composite Gauss–Legendre (8 nodes) on `[a, b]`: cells of width
/// `cell` anchored at `a`, further split at every `kinks` point inside the
/// interval. The mesh never depends on `f` and all weights are positive, so
/// pointwise-ordered integrands give ordered results.
pub fn gauss_cells<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cell: f64, kinks: &[f64]) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let n = (libm::ceil((b - a) / cell) as usize).max(1);
    let mut inner: alloc::vec::Vec<f64> = kinks.iter().copied().filter(|&k| k > a && k < b).collect();
    inner.sort_by(f64::total_cmp);
    let mut next = inner.into_iter().peekable();
    let mut sum = 0.0;
    for k in 0..n {
        let lo = a + cell * k as f64;
        let hi = if k + 1 == n { b } else { a + cell * (k + 1) as f64 };
        let mut left = lo;
        while let Some(&x) = next.peek() {
            if x >= hi {
                break;
            }
            if x > left {
                sum += gauss8(f, left, x);
                left = x;
            }
            next.next();
        }
        sum += gauss8(f, left, hi);
    }
    sum
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
/// Returns `(argmax, max)`; assumes unimodality but never returns a value
/// below `max(f(a), f(b))`.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (fa0, fb0) = (f(a), f(b));
    let (mut best_t, mut best) = if fa0 >= fb0 { (a, fa0) } else { (b, fb0) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > best {
            best = fc;
            best_t = c;
        }
        if fd > best {
            best = fd;
            best_t = d;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if !(b - a > 1e-15 * (libm::fabs(a) + libm::fabs(b))) {
            break;
        }
    }
    (best_t, best)
}

/// Bisection for the last point of `(lo, hi)` where a nonincreasing `f`
/// stays above `level`. Requires `f(lo) > level >= f(hi)`.
pub fn bisect_level<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, level: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if f(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
