//! Low-rank orthogonal projector `A = U S Vᵀ`.
//!
//! `U` (`out x out`) and `V` (`in x in`) are reflector chains and are the only
//! learnable state. `S = diag(1, …, 1, 0, …, 0)` with `rank` ones is implied by
//! the `rank` field and never stored, so every parameter value yields a
//! matrix whose nonzero singular values are exactly one.

use alloc::vec;
use alloc::vec::Vec;

use crate::discovery::DirectionSet;
use crate::error::{Error, Result};
use crate::householder::{chain_vjp, decompose_orthogonal, reflect_frame, ReflectorChain};
use crate::linalg::{matmul, matmul_nt, matmul_tn, svd, Matrix};
use crate::rng::{gaussian_vec, mix, stream};
use crate::wy::{accumulate, wy_apply, wy_from_chain, Accumulation};

/// Frobenius-nearest (semi-)orthogonal matrix to `a`: with `a = U Σ Vᵀ`,
/// the polar factor `U_k V_kᵀ` over the `k = min(rows, cols)` leading
/// singular pairs.
pub fn nearest_orthogonal(a: &Matrix) -> Result<Matrix> {
    if !a.is_finite() {
        return Err(Error::NonFinite("nearest_orthogonal input"));
    }
    let s = svd(a)?;
    let k = s.s.len();
    matmul_nt(&s.u.leading_columns(k), &s.v.leading_columns(k))
}

/// How many reflectors each side carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainLayout {
    /// `out_dim` reflectors for `U`, `in_dim` for `V`.
    Full,
    /// `rank` reflectors per side; enough to place the leading `rank` columns.
    Truncated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorParams {
    out_dim: usize,
    in_dim: usize,
    rank: usize,
    u_chain: ReflectorChain,
    v_chain: ReflectorChain,
    seed: u64,
    steps: u64,
}

/// Gradients with respect to every reflector vector of a projector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorGrads {
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

fn check_rank(out_dim: usize, in_dim: usize, rank: usize) -> Result<()> {
    if rank == 0 || rank > out_dim.min(in_dim) {
        return Err(Error::InvalidRank {
            rank,
            rows: out_dim,
            cols: in_dim,
        });
    }
    Ok(())
}

impl ProjectorParams {
    /// Random initialization: every reflector vector i.i.d. standard normal.
    pub fn new(out_dim: usize, in_dim: usize, rank: usize, seed: u64) -> Result<Self> {
        Self::random(out_dim, in_dim, rank, seed, ChainLayout::Full)
    }

    pub fn random(out_dim: usize, in_dim: usize, rank: usize, seed: u64, layout: ChainLayout) -> Result<Self> {
        check_rank(out_dim, in_dim, rank)?;
        let (nu, nv) = match layout {
            ChainLayout::Full => (out_dim, in_dim),
            ChainLayout::Truncated => (rank, rank),
        };
        let mut rng = crate::rng::seeded(seed);
        let u = (0..nu).map(|_| gaussian_vec(&mut rng, out_dim)).collect();
        let v = (0..nv).map(|_| gaussian_vec(&mut rng, in_dim)).collect();
        Ok(ProjectorParams {
            out_dim,
            in_dim,
            rank,
            u_chain: ReflectorChain::from_vectors(out_dim, u)?,
            v_chain: ReflectorChain::from_vectors(in_dim, v)?,
            seed,
            steps: 0,
        })
    }

    /// Nearest-orthogonal initialization from a weight matrix: with
    /// `a = U Σ Vᵀ`, the chains reproduce `U` and `V`, so the full-rank
    /// forward matrix is the polar factor `U Vᵀ`.
    pub fn from_pretrained(a: &Matrix, rank: usize) -> Result<Self> {
        Self::from_pretrained_with(a, rank, ChainLayout::Full)
    }

    pub fn from_pretrained_with(a: &Matrix, rank: usize, layout: ChainLayout) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::NonFinite("pretrained weight"));
        }
        let (out_dim, in_dim) = a.shape();
        check_rank(out_dim, in_dim, rank)?;
        let s = svd(a)?;
        let (u_chain, v_chain) = match layout {
            ChainLayout::Full => (decompose_orthogonal(&s.u)?, decompose_orthogonal(&s.v)?),
            ChainLayout::Truncated => (reflect_frame(&s.u, rank), reflect_frame(&s.v, rank)),
        };
        Ok(ProjectorParams {
            out_dim,
            in_dim,
            rank,
            u_chain,
            v_chain,
            seed: 0,
            steps: 0,
        })
    }

    /// Assembles a projector from existing chains. Each chain must be either
    /// full length (its dimension) or truncated (exactly `rank`).
    pub fn from_chains(
        out_dim: usize,
        in_dim: usize,
        rank: usize,
        u_chain: ReflectorChain,
        v_chain: ReflectorChain,
    ) -> Result<Self> {
        check_rank(out_dim, in_dim, rank)?;
        if u_chain.dim() != out_dim || v_chain.dim() != in_dim {
            return Err(Error::Shape {
                op: "ProjectorParams::from_chains",
                left: (out_dim, in_dim),
                right: (u_chain.dim(), v_chain.dim()),
            });
        }
        for (chain, full) in [(&u_chain, out_dim), (&v_chain, in_dim)] {
            if chain.len() != full && chain.len() != rank {
                return Err(Error::invalid(alloc::format!(
                    "chain of {} reflectors fits neither dimension {full} nor rank {rank}",
                    chain.len()
                )));
            }
        }
        Ok(ProjectorParams {
            out_dim,
            in_dim,
            rank,
            u_chain,
            v_chain,
            seed: 0,
            steps: 0,
        })
    }

    /// Seed of the stream used to redraw vanishing reflectors.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Restores the step counter, e.g. after loading saved parameters.
    pub fn with_steps(mut self, steps: u64) -> Self {
        self.steps = steps;
        self
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Gradient steps applied since construction.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn u_chain(&self) -> &ReflectorChain {
        &self.u_chain
    }

    pub fn v_chain(&self) -> &ReflectorChain {
        &self.v_chain
    }

    pub fn layout(&self) -> ChainLayout {
        if self.u_chain.len() == self.out_dim && self.v_chain.len() == self.in_dim {
            ChainLayout::Full
        } else {
            ChainLayout::Truncated
        }
    }

    /// Dense `U` (`out x out`).
    pub fn u(&self) -> Matrix {
        accumulate(&self.u_chain, Accumulation::Wy, 1).expect("validated chain")
    }

    /// Dense `V` (`in x in`).
    pub fn v(&self) -> Matrix {
        accumulate(&self.v_chain, Accumulation::Wy, 1).expect("validated chain")
    }

    /// Leading `rank` columns of `U` and `V`, through their WY forms.
    pub fn frames(&self) -> (Matrix, Matrix) {
        let frame = |chain: &ReflectorChain, dim: usize| {
            let form = wy_from_chain(chain, 1).expect("validated chain");
            wy_apply(&form, &Matrix::eye(dim, self.rank)).expect("matching dims")
        };
        (frame(&self.u_chain, self.out_dim), frame(&self.v_chain, self.in_dim))
    }

    /// Dense `A = U S Vᵀ` (`out x in`).
    pub fn forward(&self) -> Matrix {
        let (un, vn) = self.frames();
        matmul_nt(&un, &vn).expect("frame shapes")
    }

    /// `A z` via the reflectors, without forming `A`.
    pub fn apply(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.in_dim {
            return Err(Error::Shape {
                op: "projector_apply",
                left: (self.out_dim, self.in_dim),
                right: (z.len(), 1),
            });
        }
        let mut x = z.to_vec();
        self.v_chain.apply_transpose_vec(&mut x);
        let mut y = vec![0.0; self.out_dim];
        y[..self.rank].copy_from_slice(&x[..self.rank]);
        self.u_chain.apply_vec(&mut y);
        Ok(y)
    }

    /// Gradients of a scalar loss with respect to every reflector, given
    /// `∂L/∂A`. `S` is constant, so the chain rule reduces to
    /// `∂L/∂U = G V Sᵀ` and `∂L/∂V = Gᵀ U S`.
    pub fn backward(&self, d_a: &Matrix) -> Result<ProjectorGrads> {
        if d_a.shape() != (self.out_dim, self.in_dim) {
            return Err(Error::Shape {
                op: "projector_backward",
                left: (self.out_dim, self.in_dim),
                right: d_a.shape(),
            });
        }
        let u = self.u();
        let v = self.v();
        let n = self.rank;
        let gv = matmul(d_a, &v)?;
        let d_u = Matrix::from_fn(
            self.out_dim,
            self.out_dim,
            |i, j| if j < n { gv.get(i, j) } else { 0.0 },
        );
        let gu = matmul_tn(d_a, &u)?;
        let d_v = Matrix::from_fn(self.in_dim, self.in_dim, |i, j| if j < n { gu.get(i, j) } else { 0.0 });
        Ok(ProjectorGrads {
            u: chain_vjp(&self.u_chain, &d_u)?,
            v: chain_vjp(&self.v_chain, &d_v)?,
        })
    }

    /// `h ← h − lr·g` on every reflector vector. Vectors that collapse below
    /// the reflector norm floor are redrawn from the projector's seeded stream.
    pub fn gradient_step(&self, grads: &ProjectorGrads, lr: f64) -> Result<ProjectorParams> {
        if !(lr >= 0.0) || !lr.is_finite() {
            return Err(Error::invalid("learning rate must be finite and nonnegative"));
        }
        let step = self.steps;
        let seed = self.seed;
        let redraw = |side: u64, dim: usize| {
            move |index: usize| {
                log::warn!("redrawing vanished reflector {index} (side {side}) at step {step}");
                let mut rng = stream(seed, mix(mix(step, side), index as u64));
                gaussian_vec(&mut rng, dim)
            }
        };
        let (u_chain, _) = self.u_chain.step(&grads.u, lr, redraw(0, self.out_dim))?;
        let (v_chain, _) = self.v_chain.step(&grads.v, lr, redraw(1, self.in_dim))?;
        Ok(ProjectorParams {
            u_chain,
            v_chain,
            steps: self.steps + 1,
            ..self.clone()
        })
    }

    /// The parameterization's own eigenbasis of `AᵀA`: the leading `rank`
    /// columns of `V`, each with variation `‖A v_i‖²`.
    ///
    /// All nonzero eigenvalues of `AᵀA` are equal, so a generic eigensolver
    /// may return any basis of that eigenspace; this one is the basis the
    /// parameters actually encode.
    pub fn directions(&self) -> DirectionSet {
        let (_, vn) = self.frames();
        let a = self.forward();
        let columns: Vec<Vec<f64>> = (0..self.rank).map(|k| vn.column(k)).collect();
        let magnitudes = columns
            .iter()
            .map(|n| {
                let an = a.mul_vec(n).expect("dims");
                crate::linalg::dot(&an, &an)
            })
            .collect();
        DirectionSet::from_parts(Matrix::from_columns(&columns).expect("frame"), magnitudes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, orthogonality_error, sym_eig};
    use crate::rng::{gaussian_matrix, seeded};

    fn gram_spectrum(a: &Matrix) -> Vec<f64> {
        let g = if a.rows() >= a.cols() {
            matmul_tn(a, a).unwrap()
        } else {
            matmul_nt(a, a).unwrap()
        };
        sym_eig(&g).unwrap().values
    }

    fn assert_spectral(p: &ProjectorParams) {
        let vals = gram_spectrum(&p.forward());
        for (i, v) in vals.iter().enumerate() {
            let target = if i < p.rank() { 1.0 } else { 0.0 };
            assert!((v - target).abs() < 1e-9, "eigenvalue {i} = {v}");
        }
    }

    #[test]
    fn full_rank_square_is_orthogonal() {
        let p = ProjectorParams::new(4, 4, 4, 1).unwrap();
        assert!(orthogonality_error(&p.forward()) < 1e-12);
    }

    #[test]
    fn rank_validation() {
        assert!(matches!(
            ProjectorParams::new(4, 3, 4, 0),
            Err(Error::InvalidRank { .. })
        ));
        assert!(matches!(
            ProjectorParams::new(4, 3, 0, 0),
            Err(Error::InvalidRank { .. })
        ));
    }

    #[test]
    fn deterministic_init() {
        assert_eq!(
            ProjectorParams::new(6, 5, 2, 9).unwrap(),
            ProjectorParams::new(6, 5, 2, 9).unwrap()
        );
    }

    #[test]
    fn rectangular_spectrum() {
        let p = ProjectorParams::new(8, 6, 3, 2).unwrap();
        assert_spectral(&p);
        let s = svd(&p.forward()).unwrap().s;
        for (i, x) in s.iter().enumerate() {
            let target = if i < 3 { 1.0 } else { 0.0 };
            assert!((x - target).abs() < 1e-9);
        }
        assert_spectral(&ProjectorParams::new(3, 9, 2, 4).unwrap());
    }

    #[test]
    fn rank_one_structure() {
        let p = ProjectorParams::new(5, 4, 1, 3).unwrap();
        let a = p.forward();
        assert!((frobenius_norm(&a) - 1.0).abs() < 1e-12);
        let (un, vn) = p.frames();
        let outer = matmul_nt(&un, &vn).unwrap();
        assert!(frobenius_norm(&outer.sub(&a).unwrap()) < 1e-14);
    }

    #[test]
    fn pretrained_fixed_points() {
        let q = crate::householder::chain_accumulate(
            &ReflectorChain::from_vectors(3, alloc::vec![alloc::vec![1.0, 2.0, 0.5], alloc::vec![0.3, -1.0, 1.0]])
                .unwrap(),
        );
        let p = ProjectorParams::from_pretrained(&q, 3).unwrap();
        assert!(frobenius_norm(&p.forward().sub(&q).unwrap()) < 1e-9);

        let p = ProjectorParams::from_pretrained(&Matrix::from_diag(&[2.0, 3.0]), 2).unwrap();
        assert!(frobenius_norm(&p.forward().sub(&Matrix::identity(2)).unwrap()) < 1e-12);
    }

    #[test]
    fn truncated_matches_full_forward() {
        let a = gaussian_matrix(&mut seeded(5), 7, 5);
        let full = ProjectorParams::from_pretrained(&a, 3).unwrap();
        let short = ProjectorParams::from_pretrained_with(&a, 3, ChainLayout::Truncated).unwrap();
        assert_eq!(short.layout(), ChainLayout::Truncated);
        assert_eq!(short.u_chain().len(), 3);
        assert!(frobenius_norm(&full.forward().sub(&short.forward()).unwrap()) < 1e-10);
        assert_spectral(&ProjectorParams::random(9, 6, 4, 1, ChainLayout::Truncated).unwrap());
    }

    #[test]
    fn apply_matches_dense() {
        let p = ProjectorParams::new(7, 5, 3, 11).unwrap();
        let z = gaussian_vec(&mut seeded(12), 5);
        let dense = p.forward().mul_vec(&z).unwrap();
        let fast = p.apply(&z).unwrap();
        for (a, b) in dense.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(p.apply(&[0.0; 5]).unwrap().iter().all(|&x| x == 0.0));
        assert!(p.apply(&[0.0; 4]).is_err());

        let iso = ProjectorParams::new(6, 6, 6, 3).unwrap();
        let z = gaussian_vec(&mut seeded(13), 6);
        let az = iso.apply(&z).unwrap();
        assert!((crate::linalg::norm2(&az) - crate::linalg::norm2(&z)).abs() < 1e-10);
    }

    #[test]
    fn zero_upstream_and_zero_lr() {
        let p = ProjectorParams::new(5, 4, 2, 6).unwrap();
        let g = p.backward(&Matrix::zeros(5, 4)).unwrap();
        assert!(g.u.iter().chain(&g.v).flatten().all(|&x| x == 0.0));
        let g = p.backward(&gaussian_matrix(&mut seeded(1), 5, 4)).unwrap();
        let same = p.gradient_step(&g, 0.0).unwrap();
        assert_eq!(same.u_chain(), p.u_chain());
        assert_eq!(same.v_chain(), p.v_chain());
        assert!(p.gradient_step(&g, -1.0).is_err());
        assert!(p.backward(&Matrix::zeros(4, 5)).is_err());
    }

    #[test]
    fn step_keeps_spectrum() {
        let mut p = ProjectorParams::new(6, 5, 3, 2).unwrap();
        let mut rng = seeded(3);
        for _ in 0..5 {
            let g = p.backward(&gaussian_matrix(&mut rng, 6, 5)).unwrap();
            p = p.gradient_step(&g, 0.3).unwrap();
            assert_spectral(&p);
        }
        assert_eq!(p.steps(), 5);
    }

    #[test]
    fn directions_are_unit_variation() {
        let p = ProjectorParams::new(6, 8, 3, 4).unwrap();
        let d = p.directions();
        assert_eq!(d.len(), 3);
        for m in d.magnitudes() {
            assert!((m - 1.0).abs() < 1e-10);
        }
    }
}
