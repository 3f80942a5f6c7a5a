//! Minimal dense linear algebra: row-major matrices, LU factorization with
//! partial pivoting, and a Jacobi eigenvalue sweep for small symmetric
//! matrices. Problem sizes here are small enough that dense storage wins.

use crate::error::{Error, Result};

/// Dense row-major matrix of 64-bit reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parameter("ragged rows in matrix".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend(row);
        }
        Ok(Mat { rows: r, cols: c, data })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| crate::geom::dot(self.row(i), x)).collect()
    }

    /// y = A^T x
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for (j, a) in self.row(i).iter().enumerate() {
                y[j] += a * xi;
            }
        }
        y
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// LU factorization with partial pivoting of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    /// Combined L (unit lower, below diagonal) and U (upper) factors.
    lu: Vec<f64>,
    /// Row permutation: factored row i came from input row `perm[i]`.
    perm: Vec<usize>,
}

impl Lu {
    /// Factorize `a` (n x n, row-major). Fails if the matrix is singular to
    /// working precision (pivot below `1e-12` times the largest entry).
    pub fn factor(a: &Mat) -> Result<Lu> {
        if a.rows != a.cols {
            return Err(Error::Parameter("LU requires a square matrix".into()));
        }
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = lu.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let tol = 1e-12 * scale;

        for k in 0..n {
            // Pivot search in column k.
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for i in (k + 1)..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tol {
                return Err(Error::Solver(format!(
                    "singular matrix in LU factorization at pivot {k} (|pivot| = {best:.3e})"
                )));
            }
            if p != k {
                perm.swap(k, p);
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor != 0.0 {
                    for j in (k + 1)..n {
                        lu[i * n + j] -= factor * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Lu { n, lu, perm })
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // Forward substitution with unit lower factor.
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        // Back substitution.
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solve A^T x = b.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        // U^T y = b (forward).
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[j * n + i] * y[j];
            }
            y[i] = s / self.lu[i * n + i];
        }
        // L^T z = y (backward, unit diagonal).
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= self.lu[j * n + i] * y[j];
            }
            y[i] = s;
        }
        // Undo row permutation: x[perm[i]] = z[i].
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order of magnitude.
pub fn sym_eigenvalues(a: &Mat) -> Result<Vec<f64>> {
    if a.rows != a.cols {
        return Err(Error::Parameter("eigenvalues require a square matrix".into()));
    }
    let n = a.rows;
    let mut m = a.data.clone();
    let idx = |i: usize, j: usize| i * n + j;
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[idx(i, j)].abs();
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[idx(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[idx(p, p)];
                let aqq = m[idx(q, q)];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[idx(k, p)];
                    let akq = m[idx(k, q)];
                    m[idx(k, p)] = c * akp - s * akq;
                    m[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[idx(p, k)];
                    let aqk = m[idx(q, k)];
                    m[idx(p, k)] = c * apk - s * aqk;
                    m[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[idx(i, i)]).collect();
    eig.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lu_solves_small_system() {
        let a = Mat::from_rows(vec![
            vec![2.0, 1.0, 1.0],
            vec![4.0, -6.0, 0.0],
            vec![-2.0, 7.0, 2.0],
        ])
        .unwrap();
        let lu = Lu::factor(&a).unwrap();
        let x = lu.solve(&[5.0, -2.0, 9.0]);
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(x[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(x[2], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn lu_transpose_solve_matches_direct() {
        let a = Mat::from_rows(vec![
            vec![3.0, 1.0, 0.5],
            vec![-1.0, 2.0, 0.0],
            vec![0.2, -0.7, 4.0],
        ])
        .unwrap();
        let lu = Lu::factor(&a).unwrap();
        let y = lu.solve_transpose(&[1.0, 2.0, 3.0]);
        // Check A^T y = b.
        let mut t = Mat::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                t.set(i, j, a.get(j, i));
            }
        }
        let b = t.matvec(&y);
        for (bi, want) in b.iter().zip([1.0, 2.0, 3.0]) {
            assert_relative_eq!(*bi, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn lu_detects_singular() {
        let a = Mat::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(Lu::factor(&a).is_err());
    }

    #[test]
    fn jacobi_eigenvalues_of_diag() {
        let a = Mat::from_rows(vec![
            vec![2.0, 1.0],
            vec![1.0, 2.0],
        ])
        .unwrap();
        let eig = sym_eigenvalues(&a).unwrap();
        assert_relative_eq!(eig[0], 3.0, epsilon = 1e-10);
        assert_relative_eq!(eig[1], 1.0, epsilon = 1e-10);
    }
}
