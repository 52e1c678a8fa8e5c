use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Reciprocal condition estimates below this are treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-14;

/// Dense LU factorization with partial pivoting, `P·A = L·U`.
///
/// `L` (unit diagonal) and `U` share one column-major buffer; `pivots[k]`
/// is the row swapped with row `k` at elimination step `k`.
#[derive(Debug, Clone)]
pub struct Lu {
    factors: DMatrix<f64>,
    pivots: Vec<usize>,
    norm1: f64,
    zero_pivot: bool,
}

impl Lu {
    pub fn new(a: &DMatrix<f64>) -> Self {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.nrows();
        let norm1 = norm1(a);
        let mut factors = a.clone();
        let mut pivots = vec![0; n];
        let mut zero_pivot = false;
        let buf = factors.as_mut_slice();

        for k in 0..n {
            let col_k = k * n;
            let (mut p, mut best) = (k, 0.0_f64);
            for i in k..n {
                let v = buf[col_k + i].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            if best == 0.0 || !best.is_finite() {
                zero_pivot = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    buf.swap(j * n + k, j * n + p);
                }
            }
            let inv = 1.0 / buf[col_k + k];
            for v in &mut buf[col_k + k + 1..col_k + n] {
                *v *= inv;
            }
            let (head, tail) = buf.split_at_mut((k + 1) * n);
            let lcol = &head[col_k + k + 1..col_k + n];
            for col in tail.chunks_exact_mut(n) {
                let f = col[k];
                if f != 0.0 {
                    for (x, l) in col[k + 1..].iter_mut().zip(lcol) {
                        *x -= l * f;
                    }
                }
            }
        }
        Self { factors, pivots, norm1, zero_pivot }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Overwrites `b` with `A⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        let lu = self.factors.as_slice();
        for (k, &p) in self.pivots.iter().enumerate() {
            b.swap(k, p);
        }
        for k in 0..n {
            let bk = b[k];
            if bk != 0.0 {
                for (x, l) in b[k + 1..].iter_mut().zip(&lu[k * n + k + 1..(k + 1) * n]) {
                    *x -= l * bk;
                }
            }
        }
        for k in (0..n).rev() {
            b[k] /= lu[k * n + k];
            let bk = b[k];
            if bk != 0.0 {
                for (x, u) in b[..k].iter_mut().zip(&lu[k * n..k * n + k]) {
                    *x -= u * bk;
                }
            }
        }
    }

    /// Overwrites `b` with `A⁻ᵀ b`.
    pub fn solve_transpose_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        let lu = self.factors.as_slice();
        // Uᵀ z = b
        for k in 0..n {
            let col = &lu[k * n..k * n + k];
            let dot: f64 = col.iter().zip(&b[..k]).map(|(u, x)| u * x).sum();
            b[k] = (b[k] - dot) / lu[k * n + k];
        }
        // Lᵀ y = z
        for k in (0..n).rev() {
            let col = &lu[k * n + k + 1..(k + 1) * n];
            let dot: f64 = col.iter().zip(&b[k + 1..]).map(|(l, x)| l * x).sum();
            b[k] -= dot;
        }
        for (k, &p) in self.pivots.iter().enumerate().rev() {
            b.swap(k, p);
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut x = b.clone();
        for mut col in x.column_iter_mut() {
            self.solve_in_place(col.as_mut_slice());
        }
        x
    }

    /// Hager–Higham estimate of `1 / (‖A‖₁ ‖A⁻¹‖₁)`.
    pub fn rcond(&self) -> f64 {
        if self.zero_pivot {
            return 0.0;
        }
        let n = self.dim();
        if n == 0 || self.norm1 == 0.0 {
            return 0.0;
        }
        let inv_norm = self.inverse_norm1_estimate();
        if !inv_norm.is_finite() {
            return 0.0;
        }
        1.0 / (self.norm1 * inv_norm)
    }

    fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.dim();
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0_f64;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let mut y = x.clone();
            self.solve_in_place(&mut y);
            let ny: f64 = y.iter().map(|v| v.abs()).sum();
            if !ny.is_finite() {
                return f64::INFINITY;
            }
            if ny <= est {
                break;
            }
            est = ny;
            let mut z: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
            self.solve_transpose_in_place(&mut z);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .fold((0, 0.0_f64), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x.iter_mut().for_each(|v| *v = 0.0);
            x[j] = 1.0;
        }
        // Higham's alternating-sign probe guards against the iteration
        // settling on a poor local maximum.
        let mut alt: Vec<f64> = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
                sign * (1.0 + i as f64 / denom)
            })
            .collect();
        self.solve_in_place(&mut alt);
        let alt_est = 2.0 * alt.iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
        est.max(alt_est)
    }
}

pub fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// A factored square system solved with one step of iterative refinement.
#[derive(Debug, Clone)]
pub struct RefinedSolver<'a> {
    matrix: &'a DMatrix<f64>,
    lu: Lu,
}

impl<'a> RefinedSolver<'a> {
    /// Factors `matrix`, failing with `SingularGenerator` when the
    /// reciprocal condition estimate falls below [`SINGULAR_RCOND`].
    pub fn new(matrix: &'a DMatrix<f64>) -> Result<Self> {
        let lu = Lu::new(matrix);
        let rcond = lu.rcond();
        if !(rcond >= SINGULAR_RCOND) {
            return Err(Error::SingularGenerator { rcond });
        }
        Ok(Self { matrix, lu })
    }

    pub fn rcond(&self) -> f64 {
        self.lu.rcond()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = self.lu.solve(b);
        let ax = self.matrix * nalgebra::DVector::from_column_slice(&x);
        let mut r: Vec<f64> = b.iter().zip(ax.iter()).map(|(bi, axi)| bi - axi).collect();
        self.lu.solve_in_place(&mut r);
        x.iter_mut().zip(&r).for_each(|(xi, ri)| *xi += ri);
        x
    }
}
