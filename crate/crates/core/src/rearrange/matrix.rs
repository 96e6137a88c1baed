use alloc::vec::Vec;
use num_complex::Complex64;

use super::step::{Horizon, StepFunction};
use crate::error::{invalid, Error, Result};

/// Sweep cap for the one-sided Jacobi iteration.
pub const MAX_SWEEPS: usize = 60;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl MatrixOperator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("matrix dimension must be positive"));
        }
        if entries.len() != dim * dim {
            return Err(invalid!("expected {} entries, got {}", dim * dim, entries.len()));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(invalid!("matrix entries must be finite"));
        }
        Ok(MatrixOperator { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let dim = re.len();
        if re.iter().any(|row| row.len() != dim) {
            return Err(invalid!("real part must be square"));
        }
        if let Some(im) = im {
            if im.len() != dim || im.iter().any(|row| row.len() != dim) {
                return Err(invalid!("imaginary part must match the real part"));
            }
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let y = im.map_or(0.0, |m| m[i][j]);
                entries.push(Complex64::new(re[i][j], y));
            }
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&alloc::vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut entries = alloc::vec![Complex64::new(0.0, 0.0); n * n];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * n + i] = Complex64::new(d, 0.0);
        }
        MatrixOperator { dim: n, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn add(&self, other: &MatrixOperator) -> Result<MatrixOperator> {
        if self.dim != other.dim {
            return Err(invalid!("dimension mismatch: {} vs {}", self.dim, other.dim));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(MatrixOperator { dim: self.dim, entries })
    }

    pub fn scale(&self, c: f64) -> MatrixOperator {
        MatrixOperator { dim: self.dim, entries: self.entries.iter().map(|z| z * c).collect() }
    }

    pub fn mul(&self, other: &MatrixOperator) -> Result<MatrixOperator> {
        if self.dim != other.dim {
            return Err(invalid!("dimension mismatch: {} vs {}", self.dim, other.dim));
        }
        let n = self.dim;
        let mut entries = alloc::vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(MatrixOperator { dim: n, entries })
    }

    pub fn adjoint(&self) -> MatrixOperator {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(j, i).conj());
            }
        }
        MatrixOperator { dim: n, entries }
    }

    fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| libm::hypot(z.re, z.im)).fold(0.0, f64::max)
    }

    /// Hermitian and positive semidefinite up to `tol·max|a_ij|`, decided
    /// by a Cholesky factorisation of `A + tol·max|a_ij|·I`.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim;
        let scale = self.max_abs();
        if scale == 0.0 {
            return true;
        }
        for i in 0..n {
            for j in 0..n {
                if libm::sqrt((self.get(i, j) - self.get(j, i).conj()).norm_sqr()) > tol * scale {
                    return false;
                }
            }
        }
        let shift = tol * scale * n as f64;
        let mut l = alloc::vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re + shift;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) {
                return false;
            }
            let d = libm::sqrt(d);
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }
}

/// Finite nonincreasing list of non-negative reals: `μ(n, X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularValueList {
    values: Vec<f64>,
}

impl SingularValueList {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid!("singular values must be finite and non-negative, got {v}"));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid!("singular values must be nonincreasing"));
        }
        Ok(SingularValueList { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `μ(t) = values[n]` on `[n, n+1)`, zero after the list ends.
    pub fn to_step(&self) -> StepFunction {
        let bp = (0..=self.values.len()).map(|i| i as f64).collect();
        StepFunction::canonical(Horizon::INFINITE, bp, self.values.clone())
    }
}

/// Singular values of `m` by cyclic one-sided Jacobi rotations.
///
/// Each column pair is first phase-aligned (multiplying a column by a unit
/// complex number leaves the singular values unchanged) so the plane
/// rotation is real. A sweep is converged once every pair satisfies
/// `|⟨a_i, a_j⟩| ≤ tol·‖a_i‖‖a_j‖`.
pub fn singular_values(m: &MatrixOperator, tol: f64) -> Result<SingularValueList> {
    if !(tol > 0.0) {
        return Err(invalid!("tolerance must be positive"));
    }
    let n = m.dim;
    // column-major copy
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| m.get(i, j)).collect()).collect();
    let mut sweeps = 0;
    loop {
        let mut off = 0.0_f64;
        let largest = cols.iter().map(|c| col_norm_sqr(c)).fold(0.0, f64::max);
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = col_norm_sqr(&cols[i]);
                let beta = col_norm_sqr(&cols[j]);
                if alpha == 0.0 || beta == 0.0 || alpha.max(beta) <= f64::MIN_POSITIVE * largest {
                    continue;
                }
                let gamma: Complex64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let g = libm::hypot(gamma.re, gamma.im);
                let corr = g / libm::sqrt(alpha * beta);
                off = off.max(corr);
                if corr <= tol || g == 0.0 {
                    continue;
                }
                let phase = gamma.conj() / g;
                for z in cols[j].iter_mut() {
                    *z *= phase;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                for (a, b) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x * c - y * s;
                    *b = x * s + y * c;
                }
            }
        }
        sweeps += 1;
        if off <= tol {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::SvdNotConverged { sweeps, off_norm: off });
        }
    }
    let mut values: Vec<f64> = cols.iter().map(|c| libm::sqrt(col_norm_sqr(c))).collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(SingularValueList { values })
}

fn col_norm_sqr(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

/// `μ(·, X)` as a step function on `(0, ∞)`.
pub fn mu_of_list(list: &SingularValueList) -> StepFunction {
    list.to_step()
}
