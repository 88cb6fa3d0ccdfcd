use alloc::vec;
use alloc::vec::Vec;

use super::eig::canonical_signs;
use super::{dot, Matrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;
const ORTHOGONALITY_TOL: f64 = 1e-12;

/// Full singular value decomposition `A = U · diag(S) · Vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// `rows x rows`, orthogonal.
    pub u: Matrix,
    /// `min(rows, cols)` values, descending.
    pub s: Vec<f64>,
    /// `cols x cols`, orthogonal.
    pub v: Matrix,
}

impl SvdResult {
    /// `U · diag(S) · Vᵀ` with the rectangular diagonal implied by the shapes.
    pub fn reconstruct(&self) -> Matrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        Matrix::from_fn(m, n, |i, j| {
            self.s
                .iter()
                .enumerate()
                .map(|(k, &sk)| self.u.get(i, k) * sk * self.v.get(j, k))
                .sum()
        })
    }
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Columns are rotated pairwise until every pair has cosine below `1e-12`.
/// Wide inputs are handled through their transpose.
pub fn svd(a: &Matrix) -> Result<SvdResult> {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.transpose())?;
        Ok(SvdResult { u: t.v, s: t.s, v: t.u })
    }
}

fn svd_tall(a: &Matrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    // Column j of `a` lives in row j of `cols`; same for the accumulated V.
    let mut cols = a.transpose();
    let mut vt = Matrix::identity(n);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(cols.row(p), cols.row(p));
                let beta = dot(cols.row(q), cols.row(q));
                let gamma = dot(cols.row(p), cols.row(q));
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= ORTHOGONALITY_TOL * libm::sqrt(alpha) * libm::sqrt(beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_rows(&mut cols, p, q, c, s);
                rotate_rows(&mut vt, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NotConverged {
            op: "svd",
            sweeps: MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = (0..n).map(|j| libm::sqrt(dot(cols.row(j), cols.row(j)))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let top = norms.iter().copied().fold(0.0, f64::max);
    let cutoff = top * 1e-15 * m as f64;

    let mut s = Vec::with_capacity(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut pending = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        if sigma > cutoff && sigma > 0.0 {
            s.push(sigma);
            basis.push(cols.row(j).iter().map(|x| x / sigma).collect());
        } else {
            s.push(0.0);
            pending.push(k);
            basis.push(Vec::new());
        }
    }
    complete_basis(&mut basis, &pending, m);

    let mut u = Matrix::from_fn(m, m, |i, k| basis[k][i]);
    let mut v = Matrix::from_fn(n, n, |i, k| vt.get(order[k], i));
    canonical_signs(&mut v, Some(&mut u));
    Ok(SvdResult { u, s, v })
}

fn rotate_rows(mat: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = mat.cols();
    let data = mat.as_mut_slice();
    let (lo, hi) = data.split_at_mut(q * n);
    let rp = &mut lo[p * n..(p + 1) * n];
    let rq = &mut hi[..n];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Fills the `pending` slots of `basis` and appends vectors until it spans
/// `R^m`, orthogonalizing unit coordinate vectors against the accepted set.
fn complete_basis(basis: &mut Vec<Vec<f64>>, pending: &[usize], m: usize) {
    let needed = pending.len() + (m - basis.len());
    if needed == 0 {
        return;
    }
    // Summed squared residuals of all e_i equal the missing dimension, so some
    // candidate always clears this bar until the basis is complete.
    let threshold = 0.5 / libm::sqrt(m as f64);
    let mut accepted: Vec<Vec<f64>> = basis.iter().filter(|b| !b.is_empty()).cloned().collect();
    let mut fresh = Vec::with_capacity(needed);
    for i in 0..m {
        if fresh.len() == needed {
            break;
        }
        let mut r = vec![0.0; m];
        r[i] = 1.0;
        for _ in 0..2 {
            for b in &accepted {
                let proj = dot(b, &r);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= proj * bi;
                }
            }
        }
        let norm = libm::sqrt(dot(&r, &r));
        if norm > threshold {
            for x in r.iter_mut() {
                *x /= norm;
            }
            accepted.push(r.clone());
            fresh.push(r);
        }
    }
    let mut fresh = fresh.into_iter();
    for &k in pending {
        basis[k] = fresh.next().expect("basis completion");
    }
    basis.extend(fresh);
}
