use alloc::vec::Vec;

use super::Matrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-10;

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEig {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigen-decomposition.
///
/// Each eigenvector is signed so that its largest-magnitude component
/// (lowest index on ties) is nonnegative.
pub fn sym_eig(s: &Matrix) -> Result<SymEig> {
    if !s.is_square() {
        return Err(Error::Shape {
            op: "sym_eig",
            left: s.shape(),
            right: (s.cols(), s.rows()),
        });
    }
    let n = s.rows();
    let scale = s.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((s.get(i, j) - s.get(j, i)).abs());
        }
    }
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }

    let mut a = Matrix::from_fn(n, n, |i, j| 0.5 * (s.get(i, j) + s.get(j, i)));
    let mut v = Matrix::identity(n);
    let total = libm::sqrt(a.as_slice().iter().map(|x| x * x).sum::<f64>());

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal(&a) <= OFF_DIAGONAL_TOL * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let sn = t * c;
                rotate(&mut a, &mut v, p, q, c, sn);
            }
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            op: "sym_eig",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).total_cmp(&a.get(i, i)).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = Matrix::from_fn(n, n, |i, k| v.get(i, order[k]));
    canonical_signs(&mut vectors, None);
    Ok(SymEig { values, vectors })
}

fn off_diagonal(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a.get(i, j) * a.get(i, j);
            }
        }
    }
    libm::sqrt(acc)
}

fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, c * akp - s * akq);
        a.set(k, q, s * akp + c * akq);
    }
    {
        let data = a.as_mut_slice();
        let (lo, hi) = data.split_at_mut(q * n);
        let rp = &mut lo[p * n..(p + 1) * n];
        let rq = &mut hi[..n];
        for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
            let (ap, aq) = (*x, *y);
            *x = c * ap - s * aq;
            *y = s * ap + c * aq;
        }
    }
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}

/// Flips columns so the largest-magnitude entry of each is nonnegative.
/// The same flip is mirrored on `partner` when given (left singular vectors).
pub(crate) fn canonical_signs(vectors: &mut Matrix, mut partner: Option<&mut Matrix>) {
    for k in 0..vectors.cols() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for i in 0..vectors.rows() {
            let x = vectors.get(i, k).abs();
            if x > best_abs {
                best_abs = x;
                best = i;
            }
        }
        if vectors.rows() > 0 && vectors.get(best, k) < 0.0 {
            for i in 0..vectors.rows() {
                vectors.set(i, k, -vectors.get(i, k));
            }
            if let Some(p) = partner.as_deref_mut() {
                for i in 0..p.rows() {
                    p.set(i, k, -p.get(i, k));
                }
            }
        }
    }
}

/// Symmetric square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-1e-6, 0)` (relative to `max(1, λ_max)`) are treated as
/// rounding noise and clamped to zero; anything below is rejected.
pub fn sqrtm_psd(s: &Matrix) -> Result<Matrix> {
    let eig = sym_eig(s)?;
    let n = s.rows();
    let top = eig.values.first().copied().unwrap_or(0.0).max(1.0);
    if let Some(&min) = eig.values.last() {
        if min < -1e-6 * top {
            return Err(Error::NotPsd { eigenvalue: min });
        }
    }
    let roots: Vec<f64> = eig.values.iter().map(|&l| libm::sqrt(l.max(0.0))).collect();
    let vecs = &eig.vectors;
    let mut r = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for (k, &root) in roots.iter().enumerate() {
                acc += vecs.get(i, k) * root * vecs.get(j, k);
            }
            r.set(i, j, acc);
            r.set(j, i, acc);
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, matmul, matmul_nt};
    use crate::rng::{gaussian_matrix, seeded};

    fn random_symmetric(n: usize, seed: u64) -> Matrix {
        let g = gaussian_matrix(&mut seeded(seed), n, n);
        Matrix::from_fn(n, n, |i, j| g.get(i, j) + g.get(j, i))
    }

    #[test]
    fn diagonal() {
        let e = sym_eig(&Matrix::from_diag(&[1.0, 3.0])).unwrap();
        assert_eq!(e.values, alloc::vec![3.0, 1.0]);
        assert_eq!(e.vectors, Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap());
    }

    #[test]
    fn classic_two_by_two() {
        let e = sym_eig(&Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap()).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let r = core::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vectors.column(0);
        let v1 = e.vectors.column(1);
        assert!((v0[0] - r).abs() < 1e-14 && (v0[1] - r).abs() < 1e-14);
        // sign convention: largest entry nonnegative, ties to lowest index
        assert!((v1[0] - r).abs() < 1e-14 && (v1[1] + r).abs() < 1e-14);
    }

    #[test]
    fn reconstructs_random_symmetric() {
        let s = random_symmetric(6, 3);
        let e = sym_eig(&s).unwrap();
        let lam = Matrix::from_diag(&e.values);
        let rec = matmul_nt(&matmul(&e.vectors, &lam).unwrap(), &e.vectors).unwrap();
        assert!(frobenius_norm(&rec.sub(&s).unwrap()) < 1e-10);
        for w in e.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for k in 0..6 {
            let v = e.vectors.column(k);
            let sv = s.mul_vec(&v).unwrap();
            for i in 0..6 {
                assert!((sv[i] - e.values[k] * v[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn deterministic() {
        let s = random_symmetric(7, 9);
        assert_eq!(sym_eig(&s).unwrap(), sym_eig(&s).unwrap());
    }

    #[test]
    fn sqrt_of_identity_and_scalar() {
        assert_eq!(sqrtm_psd(&Matrix::identity(3)).unwrap(), Matrix::identity(3));
        let r = sqrtm_psd(&Matrix::identity(4).scale(4.0)).unwrap();
        assert!(frobenius_norm(&r.sub(&Matrix::identity(4).scale(2.0)).unwrap()) < 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        let b = gaussian_matrix(&mut seeded(5), 5, 5);
        let s = matmul_nt(&b, &b).unwrap();
        let r = sqrtm_psd(&s).unwrap();
        let rr = matmul(&r, &r).unwrap();
        assert!(frobenius_norm(&rr.sub(&s).unwrap()) < 1e-9 * frobenius_norm(&s));
        assert_eq!(r, r.transpose());
        // root of an already-square PSD matrix is stable
        let again = sqrtm_psd(&rr).unwrap();
        assert!(frobenius_norm(&again.sub(&r).unwrap()) < 1e-8 * frobenius_norm(&r).max(1.0));
    }

    #[test]
    fn sqrt_clamps_noise_and_rejects_negative() {
        let noisy = Matrix::from_diag(&[1.0, -1e-11]);
        let r = sqrtm_psd(&noisy).unwrap();
        assert_eq!(r.get(1, 1), 0.0);
        let bad = Matrix::from_diag(&[1.0, -1e-3]);
        assert!(matches!(sqrtm_psd(&bad), Err(Error::NotPsd { .. })));
    }
}
