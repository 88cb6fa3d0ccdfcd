//! Householder reflectors and reflector chains.
//!
//! A reflector `H = I - 2 h hᵀ / ‖h‖²` is stored through its raw vector `h`;
//! normalization happens only when the reflector is applied, so gradient
//! steps act on the unnormalized parameters. A chain `[h_1, …, h_m]`
//! represents the product `H_1 H_2 … H_m`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, orthogonality_error, Matrix};

/// Vectors shorter than this cannot define a reflector.
pub const MIN_REFLECTOR_NORM: f64 = 1e-12;

/// Tolerance on `‖MᵀM − I‖_F` accepted by [`decompose_orthogonal`].
pub const DECOMPOSE_ORTHOGONALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum Reflector {
    /// Explicit identity, used where a construction would need a zero vector.
    Identity,
    Vector(Vec<f64>),
}

impl Reflector {
    pub fn is_identity(&self) -> bool {
        matches!(self, Reflector::Identity)
    }

    pub fn vector(&self) -> Option<&[f64]> {
        match self {
            Reflector::Identity => None,
            Reflector::Vector(h) => Some(h),
        }
    }

    /// `(h, 2 / ‖h‖²)` for non-identity reflectors.
    #[inline]
    fn parts(&self) -> Option<(&[f64], f64)> {
        self.vector().map(|h| (h, 2.0 / dot(h, h)))
    }
}

/// Ordered Householder vectors in a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectorChain {
    dim: usize,
    reflectors: Vec<Reflector>,
}

impl ReflectorChain {
    pub fn new(dim: usize, reflectors: Vec<Reflector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("reflector chain dimension must be positive"));
        }
        for (index, r) in reflectors.iter().enumerate() {
            if let Reflector::Vector(h) = r {
                if h.len() != dim {
                    return Err(Error::Shape {
                        op: "ReflectorChain::new",
                        left: (dim, 1),
                        right: (h.len(), 1),
                    });
                }
                if h.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite("reflector vector"));
                }
                let norm = libm::sqrt(dot(h, h));
                if norm < MIN_REFLECTOR_NORM {
                    return Err(Error::DegenerateReflector { index, norm });
                }
            }
        }
        Ok(ReflectorChain { dim, reflectors })
    }

    /// Chain of plain vectors. A zero vector is an error here; use
    /// [`Reflector::Identity`] through [`ReflectorChain::new`] instead.
    pub fn from_vectors(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(dim, vectors.into_iter().map(Reflector::Vector).collect())
    }

    /// `m` identity placeholders.
    pub fn identity(dim: usize, m: usize) -> Result<Self> {
        Self::new(dim, vec![Reflector::Identity; m])
    }

    /// Reads row `i` as `h_i`; all-zero rows become identity placeholders.
    pub fn from_rows(rows: &Matrix) -> Result<Self> {
        let reflectors = (0..rows.rows())
            .map(|i| {
                let r = rows.row(i);
                if r.iter().all(|&x| x == 0.0) {
                    Reflector::Identity
                } else {
                    Reflector::Vector(r.to_vec())
                }
            })
            .collect();
        Self::new(rows.cols(), reflectors)
    }

    /// `m x d` matrix with `h_i` in row `i`; placeholders are zero rows.
    pub fn to_rows(&self) -> Matrix {
        let mut out = Matrix::zeros(self.len(), self.dim);
        for (i, r) in self.reflectors.iter().enumerate() {
            if let Some(h) = r.vector() {
                out.row_mut(i).copy_from_slice(h);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.reflectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reflectors.is_empty()
    }

    pub fn reflectors(&self) -> &[Reflector] {
        &self.reflectors
    }

    pub fn identity_count(&self) -> usize {
        self.reflectors.iter().filter(|r| r.is_identity()).count()
    }

    /// `x ← H_1 H_2 … H_m x` for a vector.
    pub fn apply_vec(&self, x: &mut [f64]) {
        for r in self.reflectors.iter().rev() {
            if let Some((h, coef)) = r.parts() {
                reflect_vec(h, coef, x);
            }
        }
    }

    /// `x ← (H_1 … H_m)ᵀ x = H_m … H_1 x` for a vector.
    pub fn apply_transpose_vec(&self, x: &mut [f64]) {
        for r in &self.reflectors {
            if let Some((h, coef)) = r.parts() {
                reflect_vec(h, coef, x);
            }
        }
    }

    /// Plain gradient step `h ← h − lr·g`. Returns the new chain and the
    /// indices whose updated vector fell below [`MIN_REFLECTOR_NORM`]; those
    /// slots are refilled by `redraw`.
    pub fn step(
        &self,
        grads: &[Vec<f64>],
        lr: f64,
        mut redraw: impl FnMut(usize) -> Vec<f64>,
    ) -> Result<(ReflectorChain, Vec<usize>)> {
        if grads.len() != self.len() {
            return Err(Error::Shape {
                op: "ReflectorChain::step",
                left: (self.len(), self.dim),
                right: (grads.len(), grads.first().map_or(0, |g| g.len())),
            });
        }
        let mut redrawn = Vec::new();
        let mut out = Vec::with_capacity(self.len());
        for (i, (r, g)) in self.reflectors.iter().zip(grads).enumerate() {
            if g.len() != self.dim {
                return Err(Error::Shape {
                    op: "ReflectorChain::step",
                    left: (self.dim, 1),
                    right: (g.len(), 1),
                });
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("reflector gradient"));
            }
            match r {
                Reflector::Identity => out.push(Reflector::Identity),
                Reflector::Vector(h) => {
                    let mut next = h.clone();
                    axpy(-lr, g, &mut next);
                    if next.iter().any(|x| !x.is_finite()) {
                        return Err(Error::NonFinite("updated reflector"));
                    }
                    if libm::sqrt(dot(&next, &next)) < MIN_REFLECTOR_NORM {
                        next = redraw(i);
                        redrawn.push(i);
                    }
                    out.push(Reflector::Vector(next));
                }
            }
        }
        Ok((ReflectorChain::new(self.dim, out)?, redrawn))
    }
}

#[inline]
fn reflect_vec(h: &[f64], coef: f64, x: &mut [f64]) {
    let s = coef * dot(h, x);
    axpy(-s, h, x);
}

/// `x ← H x` for every column of `x`.
fn reflect_left(h: &[f64], coef: f64, x: &mut Matrix) {
    let mut proj = vec![0.0; x.cols()];
    for (i, &hi) in h.iter().enumerate() {
        if hi != 0.0 {
            axpy(hi, x.row(i), &mut proj);
        }
    }
    for (i, &hi) in h.iter().enumerate() {
        if hi != 0.0 {
            axpy(-coef * hi, &proj, x.row_mut(i));
        }
    }
}

/// `x ← x H` for every row of `x`.
fn reflect_right(x: &mut Matrix, h: &[f64], coef: f64) {
    for r in 0..x.rows() {
        reflect_vec(h, coef, x.row_mut(r));
    }
}

fn checked_parts(h: &[f64]) -> Result<f64> {
    let nn = dot(h, h);
    let norm = libm::sqrt(nn);
    if !(norm >= MIN_REFLECTOR_NORM) {
        return Err(Error::DegenerateReflector { index: 0, norm });
    }
    Ok(2.0 / nn)
}

/// `H x` computed as the rank-1 update `x − (2/‖h‖²)·h·(hᵀx)`.
pub fn reflector_apply(h: &[f64], x: &Matrix) -> Result<Matrix> {
    if h.len() != x.rows() {
        return Err(Error::Shape {
            op: "reflector_apply",
            left: (h.len(), h.len()),
            right: x.shape(),
        });
    }
    let coef = checked_parts(h)?;
    let mut out = x.clone();
    reflect_left(h, coef, &mut out);
    Ok(out)
}

/// Dense `I − 2 h hᵀ / ‖h‖²`.
pub fn reflector_matrix(h: &[f64]) -> Result<Matrix> {
    let coef = checked_parts(h)?;
    let n = h.len();
    Ok(Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - coef * h[i] * h[j]
    }))
}

/// Dense product `H_1 H_2 … H_m`, accumulated one reflector at a time.
/// An empty chain yields the identity.
pub fn chain_accumulate(chain: &ReflectorChain) -> Matrix {
    let mut m = Matrix::identity(chain.dim);
    for r in &chain.reflectors {
        if let Some((h, coef)) = r.parts() {
            reflect_right(&mut m, h, coef);
        }
    }
    m
}

/// Splits an orthogonal matrix into exactly `d` reflectors with
/// `chain_accumulate(result) ≈ m`.
///
/// Reflector `i` maps the current column `i` onto `+e_i`, zeroing the rest of
/// that column (and, by orthogonality, of row `i`). Columns already equal to
/// `e_i` get an identity placeholder.
pub fn decompose_orthogonal(m: &Matrix) -> Result<ReflectorChain> {
    if !m.is_square() {
        return Err(Error::Shape {
            op: "decompose_orthogonal",
            left: m.shape(),
            right: (m.cols(), m.rows()),
        });
    }
    let error = orthogonality_error(m);
    if !(error < DECOMPOSE_ORTHOGONALITY_TOL) {
        return Err(Error::NotOrthogonal { error });
    }
    Ok(reflect_frame(m, m.cols()))
}

/// Reflectors for the leading `count` columns of an orthonormal frame `q`
/// (`d x k`, `k ≥ count`), so that `H_1 … H_count` maps `e_j` to column `j`
/// for every `j < count`.
pub(crate) fn reflect_frame(q: &Matrix, count: usize) -> ReflectorChain {
    let d = q.rows();
    let mut work = q.clone();
    let mut reflectors = Vec::with_capacity(count);
    for i in 0..count {
        let head = work.get(i, i);
        let tail_sq: f64 = (i + 1..d).map(|j| work.get(j, i) * work.get(j, i)).sum();
        if tail_sq == 0.0 && head > 0.0 {
            reflectors.push(Reflector::Identity);
            continue;
        }
        let norm = libm::sqrt(head * head + tail_sq);
        let mut h = vec![0.0; d];
        // head - norm without cancellation when head > 0
        h[i] = if head > 0.0 {
            -tail_sq / (head + norm)
        } else {
            head - norm
        };
        for j in i + 1..d {
            h[j] = work.get(j, i);
        }
        let scale = 1.0 / libm::sqrt(dot(&h, &h));
        for x in h.iter_mut() {
            *x *= scale;
        }
        reflect_left(&h, 2.0, &mut work);
        reflectors.push(Reflector::Vector(h));
    }
    ReflectorChain { dim: d, reflectors }
}

/// Reverse-mode gradient of a scalar loss through `M = H_1 … H_m`.
///
/// `upstream` is `∂L/∂M` (`d x d`). Returns `∂L/∂h_i` for each reflector;
/// normalization by `‖h_i‖²` is differentiated, not held constant. Identity
/// placeholders get zero gradients.
pub fn chain_vjp(chain: &ReflectorChain, upstream: &Matrix) -> Result<Vec<Vec<f64>>> {
    let d = chain.dim;
    if upstream.shape() != (d, d) {
        return Err(Error::Shape {
            op: "chain_vjp",
            left: (d, d),
            right: upstream.shape(),
        });
    }
    let m = chain.len();
    let mut grads = vec![vec![0.0; d]; m];
    if m == 0 {
        return Ok(grads);
    }
    // K_i = (H_1…H_{i-1})ᵀ · G · (H_{i+1}…H_m)ᵀ is ∂L/∂H_i.
    let mut k = upstream.clone();
    for r in chain.reflectors[1..].iter().rev() {
        if let Some((h, coef)) = r.parts() {
            reflect_right(&mut k, h, coef);
        }
    }
    for i in 0..m {
        if let Some(h) = chain.reflectors[i].vector() {
            let nn = dot(h, h);
            let kh = k.mul_vec(h)?;
            let kth = k.tr_mul_vec(h)?;
            let hkh = dot(h, &kh);
            let g = &mut grads[i];
            for j in 0..d {
                g[j] = -2.0 * (kh[j] + kth[j]) / nn + 4.0 * hkh * h[j] / (nn * nn);
            }
        }
        if i + 1 < m {
            if let Some((h, coef)) = chain.reflectors[i].parts() {
                reflect_left(h, coef, &mut k);
            }
            if let Some((h, coef)) = chain.reflectors[i + 1].parts() {
                reflect_right(&mut k, h, coef);
            }
        }
    }
    Ok(grads)
}
