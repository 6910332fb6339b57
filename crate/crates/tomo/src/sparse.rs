//! Compressed-sparse-row matrices and a Jacobi-preconditioned conjugate
//! gradient solver, sized for the symmetric positive-definite mass and
//! stiffness systems assembled in [`crate::fem`].

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds an n×n matrix from (row, col, value) triplets; duplicate
    /// positions are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> CsrMatrix {
        let mut counts = vec![0usize; n + 1];
        for &(i, _, _) in triplets {
            debug_assert!(i < n);
            counts[i + 1] += 1;
        }
        for k in 0..n {
            counts[k + 1] += counts[k];
        }
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        let mut cursor = counts.clone();
        for &(i, j, v) in triplets {
            debug_assert!(j < n);
            cols[cursor[i]] = j;
            vals[cursor[i]] = v;
            cursor[i] += 1;
        }
        // Sort each row by column and merge duplicates in place.
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            scratch.clear();
            scratch.extend(cols[counts[i]..counts[i + 1]].iter().copied().zip(vals[counts[i]..counts[i + 1]].iter().copied()));
            scratch.sort_unstable_by_key(|&(j, _)| j);
            for &(j, v) in scratch.iter() {
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { n, row_ptr, col_idx, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).find(|&(j, _)| j == i).map_or(0.0, |(_, v)| v))
            .collect()
    }

    /// xᵀ A y.
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row_acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row_acc += self.values[k] * y[self.col_idx[k]];
            }
            acc += x[i] * row_acc;
        }
        acc
    }

    /// Largest |A_ij − A_ji|; zero for exactly symmetric assembly.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                let vt = self.row(j).find(|&(c, _)| c == i).map_or(0.0, |(_, v)| v);
                worst = worst.max((v - vt).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// ‖b − Ax‖ / ‖b‖ at exit.
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Conjugate gradients with diagonal (Jacobi) preconditioning.
///
/// Terminates when ‖b − Ax‖ ≤ rtol·‖b‖; errors if the cap is hit first.
/// `x0` warm-starts the iteration (useful across descent steps where the
/// right-hand side changes slowly).
pub fn pcg_jacobi(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    rtol: f64,
    max_iter: usize,
) -> Result<CgSolution> {
    let n = a.n();
    assert_eq!(b.len(), n);
    let norm_b = dot(b, b).sqrt();
    if norm_b == 0.0 {
        return Ok(CgSolution { x: vec![0.0; n], iterations: 0, relative_residual: 0.0 });
    }
    let inv_diag: Vec<f64> = a.diag().iter().map(|&d| {
        debug_assert!(d > 0.0, "Jacobi preconditioner needs a positive diagonal");
        1.0 / d
    }).collect();

    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = vec![0.0; n];
    a.matvec(&x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];

    let mut rel = dot(&r, &r).sqrt() / norm_b;
    for iterations in 0..=max_iter {
        if rel <= rtol {
            return Ok(CgSolution { x, iterations, relative_residual: rel });
        }
        if iterations == max_iter {
            break;
        }
        a.matvec(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        rel = dot(&r, &r).sqrt() / norm_b;
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence { solver: "conjugate gradients", iterations: max_iter, residual: rel })
}
