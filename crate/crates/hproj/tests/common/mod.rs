//! Independent oracles shared by the integration tests. Nothing here calls
//! the decompositions under test; dense products are plain triple loops.
#![allow(dead_code, clippy::needless_range_loop)]

use hproj_core::rng::{gaussian_matrix, SeededRng};
use hproj_core::Matrix;

pub fn naive_matmul(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols(), b.rows());
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum()
    })
}

pub fn fro_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal columns of a Gaussian matrix by twice-iterated modified
/// Gram-Schmidt.
pub fn random_orthonormal(rng: &mut SeededRng, rows: usize, cols: usize) -> Matrix {
    let g = gaussian_matrix(rng, rows, cols);
    let mut q: Vec<Vec<f64>> = (0..cols).map(|j| g.column(j)).collect();
    for j in 0..cols {
        for _ in 0..2 {
            for k in 0..j {
                let p = dotv(&q[k], &q[j]);
                let qk = q[k].clone();
                for (x, y) in q[j].iter_mut().zip(&qk) {
                    *x -= p * y;
                }
            }
        }
        let n = dotv(&q[j], &q[j]).sqrt();
        q[j].iter_mut().for_each(|x| *x /= n);
    }
    Matrix::from_columns(&q).unwrap()
}

pub fn random_orthogonal(rng: &mut SeededRng, d: usize) -> Matrix {
    random_orthonormal(rng, d, d)
}

/// Top `k` eigenpairs of a symmetric PSD matrix by power iteration with
/// deflation.
pub fn power_eigs(s: &Matrix, k: usize, iters: usize) -> Vec<(f64, Vec<f64>)> {
    let n = s.rows();
    let mut m = s.clone();
    let mut out = Vec::new();
    for e in 0..k {
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 31 + e * 17) % 7) as f64 * 0.1).collect();
        let mut lambda = 0.0;
        for _ in 0..iters {
            let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m.get(i, j) * v[j]).sum()).collect();
            let norm = dotv(&w, &w).sqrt();
            if norm == 0.0 {
                break;
            }
            lambda = dotv(&v, &w);
            v = w.iter().map(|x| x / norm).collect();
        }
        m = Matrix::from_fn(n, n, |i, j| m.get(i, j) - lambda * v[i] * v[j]);
        out.push((lambda, v));
    }
    out
}

/// Solves `a x = b` for square `a` by Gaussian elimination with partial
/// pivoting; `b` may have several columns.
pub fn solve(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.rows();
    let nb = b.cols();
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.extend_from_slice(b.row(i));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| aug[i][c].abs().total_cmp(&aug[j][c].abs()))
            .unwrap();
        aug.swap(c, p);
        for r in c + 1..n {
            let f = aug[r][c] / aug[c][c];
            for k in c..n + nb {
                aug[r][k] -= f * aug[c][k];
            }
        }
    }
    let mut x = vec![vec![0.0; nb]; n];
    for i in (0..n).rev() {
        for j in 0..nb {
            let s: f64 = (i + 1..n).map(|k| aug[i][k] * x[k][j]).sum();
            x[i][j] = (aug[i][n + j] - s) / aug[i][i];
        }
    }
    Matrix::from_fn(n, nb, |i, j| x[i][j])
}

/// Greedy `|cos|` matching of truth columns against found columns, in
/// truth order, without replacement; unmatched factors score zero.
pub fn greedy_alignment(truth: &Matrix, found: &[Vec<f64>]) -> f64 {
    let mut used = vec![false; found.len()];
    let mut total = 0.0;
    for i in 0..truth.cols() {
        let t = truth.column(i);
        let mut best: Option<(usize, f64)> = None;
        for (j, f) in found.iter().enumerate() {
            if used[j] {
                continue;
            }
            let c = dotv(&t, f).abs() / (dotv(f, f).sqrt() * dotv(&t, &t).sqrt());
            if best.is_none_or(|b| c > b.1) {
                best = Some((j, c));
            }
        }
        if let Some((j, c)) = best {
            used[j] = true;
            total += c;
        }
    }
    total / truth.cols() as f64
}

pub fn rotation2(theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    Matrix::from_rows(&[&[c, -s], &[s, c]]).unwrap()
}

/// Rotation by `theta` in the `(i, j)` coordinate plane of `R^3`.
pub fn givens3(i: usize, j: usize, theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    Matrix::from_fn(3, 3, |r, k| match (r, k) {
        _ if r == i && k == i => c,
        _ if r == j && k == j => c,
        _ if r == i && k == j => -s,
        _ if r == j && k == i => s,
        _ if r == k => 1.0,
        _ => 0.0,
    })
}

fn orth3(angles: [f64; 3], flip: bool) -> Matrix {
    let r = naive_matmul(
        &naive_matmul(&givens3(0, 1, angles[0]), &givens3(1, 2, angles[1])),
        &givens3(0, 1, angles[2]),
    );
    if flip {
        Matrix::from_fn(3, 3, |i, j| if j == 2 { -r.get(i, j) } else { r.get(i, j) })
    } else {
        r
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    if fa < fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Minimum of `‖R − A‖_F` over 2x2 orthogonal `R` (rotations and
/// reflections), by a fine angle grid refined with golden-section search.
pub fn givens_grid_min_2(a: &Matrix) -> f64 {
    let mut best = f64::INFINITY;
    for flip in [false, true] {
        let f = |t: f64| {
            let r = rotation2(t);
            let r = if flip {
                Matrix::from_fn(2, 2, |i, j| if j == 1 { -r.get(i, j) } else { r.get(i, j) })
            } else {
                r
            };
            fro_diff(&r, a)
        };
        let n = 3600;
        let step = std::f64::consts::TAU / n as f64;
        let (k, _) = (0..n)
            .map(|k| (k, f(k as f64 * step)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        let t0 = k as f64 * step;
        let (_, v) = golden_min(f, t0 - step, t0 + step, 200);
        best = best.min(v);
    }
    best
}

/// Minimum of `‖R − A‖_F` over 3x3 orthogonal `R`, parameterized by three
/// Givens angles and an optional reflection. A coarse Euler-angle grid picks
/// starting points; each is refined by cyclic golden-section search over
/// small rotations in the three coordinate planes applied on the right, which
/// stays well conditioned where the Euler angles degenerate.
pub fn givens_grid_min_3(a: &Matrix) -> f64 {
    let mut best = f64::INFINITY;
    let n = 48;
    let step = std::f64::consts::TAU / n as f64;
    let planes = [(0, 1), (1, 2), (0, 2)];
    for flip in [false, true] {
        let mut seeds: Vec<([f64; 3], f64)> = Vec::new();
        for i in 0..n {
            for j in 0..n / 2 + 1 {
                for k in 0..n {
                    let ang = [i as f64 * step, j as f64 * step, k as f64 * step];
                    seeds.push((ang, fro_diff(&orth3(ang, flip), a)));
                }
            }
        }
        seeds.sort_by(|x, y| x.1.total_cmp(&y.1));
        for (ang, _) in seeds.into_iter().take(4) {
            let mut r = orth3(ang, flip);
            let mut width = step;
            for _ in 0..80 {
                for &(p, q) in &planes {
                    let f = |t: f64| fro_diff(&naive_matmul(&r, &givens3(p, q, t)), a);
                    let (t, _) = golden_min(f, -width, width, 80);
                    r = naive_matmul(&r, &givens3(p, q, t));
                }
                width = (width * 0.8).max(1e-7);
            }
            best = best.min(fro_diff(&r, a));
        }
    }
    best
}
