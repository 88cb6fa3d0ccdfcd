//! Closed-form direction discovery, latent traversal, and the evaluation
//! metrics (PPL, PIPL, Fréchet distance, Pearson correlation).
//!
//! Directions maximizing `‖A n‖²` under `‖n‖ = 1` are the eigenvectors of
//! `AᵀA`, and the variation along each equals its eigenvalue (`σ²`).

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, matmul, matmul_tn, norm2, sqrtm_psd, sym_eig, Matrix};
use crate::projector::ProjectorParams;
use crate::rng::{gaussian_matrix, gaussian_vec, seeded, stream};

/// PPL subdivision step.
pub const DEFAULT_PPL_EPS: f64 = 1e-4;
/// PIPL perturbation size.
pub const DEFAULT_PIPL_EPS: f64 = 1e-2;
/// Traversal strengths used when none are given.
pub const DEFAULT_ALPHAS: [f64; 7] = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];

const UNIT_TOL: f64 = 1e-8;
const SLERP_LINEAR_BELOW: f64 = 1e-7;

/// Orthonormal directions (columns) with their variation magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    directions: Matrix,
    magnitudes: Vec<f64>,
}

impl DirectionSet {
    /// Validates unit norms (`±1e-10`), mutual orthogonality (`< 1e-8`) and
    /// nonincreasing magnitudes.
    pub fn new(directions: Matrix, magnitudes: Vec<f64>) -> Result<Self> {
        if magnitudes.len() != directions.cols() {
            return Err(Error::Shape {
                op: "DirectionSet::new",
                left: directions.shape(),
                right: (magnitudes.len(), 1),
            });
        }
        let g = matmul_tn(&directions, &directions)?;
        for i in 0..g.rows() {
            if (g.get(i, i) - 1.0).abs() > 2e-10 {
                return Err(Error::invalid(alloc::format!("direction {i} is not unit norm")));
            }
            for j in 0..i {
                if g.get(i, j).abs() >= 1e-8 {
                    return Err(Error::invalid(alloc::format!(
                        "directions {j} and {i} are not orthogonal"
                    )));
                }
            }
        }
        if magnitudes.windows(2).any(|w| w[1] > w[0] + 1e-9) || magnitudes.iter().any(|&m| m < -1e-12) {
            return Err(Error::invalid("magnitudes must be nonnegative and nonincreasing"));
        }
        Ok(Self::from_parts(directions, magnitudes))
    }

    pub(crate) fn from_parts(directions: Matrix, magnitudes: Vec<f64>) -> Self {
        DirectionSet { directions, magnitudes }
    }

    /// Unit directions without magnitudes (all set to one), e.g. loaded from disk.
    pub fn from_directions(directions: Matrix) -> Result<Self> {
        let k = directions.cols();
        Self::new(directions, alloc::vec![1.0; k])
    }

    pub fn dim(&self) -> usize {
        self.directions.rows()
    }

    pub fn len(&self) -> usize {
        self.directions.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `d x k` matrix with one direction per column.
    pub fn directions(&self) -> &Matrix {
        &self.directions
    }

    pub fn direction(&self, i: usize) -> Vec<f64> {
        self.directions.column(i)
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }
}

/// Top `top_k` eigenvectors of `AᵀA`, magnitudes equal to the eigenvalues.
pub fn sefa_directions(a: &Matrix, top_k: usize) -> Result<DirectionSet> {
    if top_k > a.cols() {
        return Err(Error::IndexOutOfRange {
            index: top_k,
            len: a.cols(),
        });
    }
    let eig = sym_eig(&matmul_tn(a, a)?)?;
    Ok(DirectionSet::from_parts(
        eig.vectors.leading_columns(top_k),
        eig.values[..top_k].to_vec(),
    ))
}

/// `‖A n‖²` for a unit direction `n`.
pub fn variation_magnitude(a: &Matrix, n: &[f64]) -> Result<f64> {
    check_unit(n)?;
    let an = a.mul_vec(n)?;
    Ok(dot(&an, &an))
}

fn check_unit(n: &[f64]) -> Result<()> {
    let norm = norm2(n);
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(alloc::format!("direction has norm {norm}, expected 1")));
    }
    Ok(())
}

/// Spherical interpolation of direction with linear interpolation of norm.
pub fn slerp(w1: &[f64], w2: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid("slerp parameter must lie in [0, 1]"));
    }
    slerp_any(w1, w2, t)
}

/// Same formula as [`slerp`] without restricting `t`, so PPL can step to
/// `t + ε` past the endpoint.
fn slerp_any(w1: &[f64], w2: &[f64], t: f64) -> Result<Vec<f64>> {
    if w1.len() != w2.len() {
        return Err(Error::Shape {
            op: "slerp",
            left: (w1.len(), 1),
            right: (w2.len(), 1),
        });
    }
    let (n1, n2) = (norm2(w1), norm2(w2));
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::invalid("slerp endpoints must be nonzero"));
    }
    let a: Vec<f64> = w1.iter().map(|x| x / n1).collect();
    let b: Vec<f64> = w2.iter().map(|x| x / n2).collect();
    let diff: f64 = norm2(&a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>());
    let sum: f64 = norm2(&a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>());
    let omega = 2.0 * libm::atan2(diff, sum);
    if omega < SLERP_LINEAR_BELOW {
        return Ok(w1.iter().zip(w2).map(|(x, y)| (1.0 - t) * x + t * y).collect());
    }
    let so = libm::sin(omega);
    if so < 1e-12 {
        return Err(Error::invalid("slerp between antipodal directions is undefined"));
    }
    let ca = libm::sin((1.0 - t) * omega) / so;
    let cb = libm::sin(t * omega) / so;
    let norm = (1.0 - t) * n1 + t * n2;
    Ok(a.iter().zip(&b).map(|(x, y)| norm * (ca * x + cb * y)).collect())
}

/// Something that maps latent codes to outputs.
pub trait Generator {
    fn latent_dim(&self) -> usize;
    fn generate(&self, z: &[f64]) -> Vec<f64>;
}

/// Distance between two generator outputs.
pub trait Distance {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityGenerator(pub usize);

impl Generator for IdentityGenerator {
    fn latent_dim(&self) -> usize {
        self.0
    }
    fn generate(&self, z: &[f64]) -> Vec<f64> {
        z.to_vec()
    }
}

#[derive(Debug, Clone)]
pub struct ConstantGenerator {
    pub latent_dim: usize,
    pub output: Vec<f64>,
}

impl Generator for ConstantGenerator {
    fn latent_dim(&self) -> usize {
        self.latent_dim
    }
    fn generate(&self, _z: &[f64]) -> Vec<f64> {
        self.output.clone()
    }
}

/// `G(w) = A w`.
#[derive(Debug, Clone)]
pub struct LinearGenerator(pub Matrix);

impl Generator for LinearGenerator {
    fn latent_dim(&self) -> usize {
        self.0.cols()
    }
    fn generate(&self, z: &[f64]) -> Vec<f64> {
        self.0.mul_vec(z).expect("latent dimension checked by caller")
    }
}

impl Generator for ProjectorParams {
    fn latent_dim(&self) -> usize {
        self.in_dim()
    }
    fn generate(&self, z: &[f64]) -> Vec<f64> {
        self.apply(z).expect("latent dimension checked by caller")
    }
}

/// `‖a − b‖²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredL2;

impl Distance for SquaredL2 {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }
}

/// `‖a − b‖² / len`, the per-pixel mean squared difference.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanSquared;

impl Distance for MeanSquared {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        if a.is_empty() {
            return 0.0;
        }
        SquaredL2.distance(a, b) / a.len() as f64
    }
}

/// Squared distance between fixed random-projection features
/// `P x / √features`, with `P` seeded Gaussian.
#[derive(Debug, Clone)]
pub struct RandomProjection {
    proj: Matrix,
}

impl RandomProjection {
    pub fn new(input_dim: usize, features: usize, seed: u64) -> Self {
        let scale = 1.0 / libm::sqrt(features.max(1) as f64);
        let proj = gaussian_matrix(&mut seeded(seed), features, input_dim).scale(scale);
        RandomProjection { proj }
    }
}

impl Distance for RandomProjection {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let f = self.proj.mul_vec(&diff).expect("feature input dimension");
        dot(&f, &f)
    }
}

/// Monte-Carlo point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        let mean = pairwise_sum(values) / n as f64;
        let stderr = if n > 1 {
            let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            libm::sqrt(pairwise_sum(&dev) / (n - 1) as f64 / n as f64)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            stderr,
            samples: n,
        }
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn check_metric_args(eps: f64, samples: usize) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid("eps must be positive"));
    }
    if samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    Ok(())
}

fn interpolation_point<R: Rng>(rng: &mut R, dim: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let w1 = gaussian_vec(rng, dim);
    let w2 = gaussian_vec(rng, dim);
    let t: f64 = rng.random();
    (w1, w2, t)
}

/// Perceptual path length: mean of `d(G(slerp(t)), G(slerp(t + ε))) / ε²`
/// over seeded `w₁, w₂ ~ N(0, I)` and `t ~ U(0, 1)`. Sample `i` uses stream
/// `i` of `seed`.
pub fn ppl<G, D>(g: &G, dist: &D, eps: f64, samples: usize, seed: u64) -> Result<Estimate>
where
    G: Generator + ?Sized,
    D: Distance + ?Sized,
{
    check_metric_args(eps, samples)?;
    let dim = g.latent_dim();
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = stream(seed, i as u64);
        let (w1, w2, t) = interpolation_point(&mut rng, dim);
        let a = slerp_any(&w1, &w2, t)?;
        let b = slerp_any(&w1, &w2, t + eps)?;
        values.push(dist.distance(&g.generate(&a), &g.generate(&b)) / (eps * eps));
    }
    Ok(Estimate::from_samples(&values))
}

/// Perceptual interpretable path length: like [`ppl`], but the second point
/// is `slerp(t) + ε n` with `n` drawn uniformly from `directions`.
pub fn pipl<G, D>(g: &G, dist: &D, directions: &DirectionSet, eps: f64, samples: usize, seed: u64) -> Result<Estimate>
where
    G: Generator + ?Sized,
    D: Distance + ?Sized,
{
    check_metric_args(eps, samples)?;
    if directions.is_empty() {
        return Err(Error::invalid("direction set is empty"));
    }
    let dim = g.latent_dim();
    if directions.dim() != dim {
        return Err(Error::Shape {
            op: "pipl",
            left: (dim, 1),
            right: (directions.dim(), directions.len()),
        });
    }
    let dirs: Vec<Vec<f64>> = (0..directions.len()).map(|k| directions.direction(k)).collect();
    for n in &dirs {
        check_unit(n)?;
    }
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = stream(seed, i as u64);
        let (w1, w2, t) = interpolation_point(&mut rng, dim);
        let n = &dirs[rng.random_range(0..dirs.len())];
        let a = slerp_any(&w1, &w2, t)?;
        let b: Vec<f64> = a.iter().zip(n).map(|(x, y)| x + eps * y).collect();
        values.push(dist.distance(&g.generate(&a), &g.generate(&b)) / (eps * eps));
    }
    Ok(Estimate::from_samples(&values))
}

/// Mean and covariance of a Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    mean: Vec<f64>,
    cov: Matrix,
}

impl GaussianStats {
    pub fn new(mean: Vec<f64>, cov: Matrix) -> Result<Self> {
        if cov.shape() != (mean.len(), mean.len()) {
            return Err(Error::Shape {
                op: "GaussianStats::new",
                left: (mean.len(), mean.len()),
                right: cov.shape(),
            });
        }
        let scale = cov.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for i in 0..cov.rows() {
            for j in 0..i {
                let asym = (cov.get(i, j) - cov.get(j, i)).abs();
                if asym > 1e-10 * scale {
                    return Err(Error::NotSymmetric { asymmetry: asym });
                }
            }
        }
        let eig = sym_eig(&cov)?;
        if let Some(&min) = eig.values.last() {
            if min < -1e-8 * scale {
                return Err(Error::NotPsd { eigenvalue: min });
            }
        }
        Ok(GaussianStats { mean, cov })
    }

    /// Sample mean and unbiased covariance of the rows of `x`.
    pub fn from_samples(x: &Matrix) -> Result<Self> {
        let (n, d) = x.shape();
        if n < 2 {
            return Err(Error::invalid("need at least two samples for a covariance"));
        }
        let ones = alloc::vec![1.0 / n as f64; n];
        let mean = x.tr_mul_vec(&ones)?;
        let centered = Matrix::from_fn(n, d, |i, j| x.get(i, j) - mean[j]);
        let cov = matmul_tn(&centered, &centered)?.scale(1.0 / (n - 1) as f64);
        let cov = Matrix::from_fn(d, d, |i, j| 0.5 * (cov.get(i, j) + cov.get(j, i)));
        Self::new(mean, cov)
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// `sqrt(‖μ − μ'‖² + tr(Σ + Σ' − 2 (Σ^½ Σ' Σ^½)^½))`.
pub fn frechet_distance(p: &GaussianStats, q: &GaussianStats) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::Shape {
            op: "frechet_distance",
            left: (p.dim(), p.dim()),
            right: (q.dim(), q.dim()),
        });
    }
    let root_p = sqrtm_psd(&p.cov)?;
    let inner = matmul(&matmul(&root_p, &q.cov)?, &root_p)?;
    let n = inner.rows();
    let inner = Matrix::from_fn(n, n, |i, j| 0.5 * (inner.get(i, j) + inner.get(j, i)));
    let cross = sqrtm_psd(&inner)?;
    let mean_sq: f64 = p.mean.iter().zip(&q.mean).map(|(a, b)| (a - b) * (a - b)).sum();
    let radicand = mean_sq + p.cov.trace() + q.cov.trace() - 2.0 * cross.trace();
    let scale = 1.0f64.max(p.cov.trace() + q.cov.trace());
    if radicand < -1e-8 * scale {
        return Err(Error::NotPsd { eigenvalue: radicand });
    }
    Ok(libm::sqrt(radicand.max(0.0)))
}

/// Pearson correlation coefficient, clamped to `[-1, 1]`.
pub fn pearson_correlation(steps: &[f64], preds: &[f64]) -> Result<f64> {
    if steps.len() != preds.len() {
        return Err(Error::Shape {
            op: "pearson_correlation",
            left: (steps.len(), 1),
            right: (preds.len(), 1),
        });
    }
    if steps.len() < 2 {
        return Err(Error::invalid("correlation needs at least two points"));
    }
    let n = steps.len() as f64;
    let mx = steps.iter().sum::<f64>() / n;
    let my = preds.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in steps.iter().zip(preds) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (libm::sqrt(sxx) * libm::sqrt(syy))).clamp(-1.0, 1.0))
}

/// One traversal: base latent, a direction from a [`DirectionSet`] and the
/// strengths to visit.
#[derive(Debug, Clone, PartialEq)]
pub struct TraversalSpec {
    pub direction_index: usize,
    pub strengths: Vec<f64>,
    pub base: Vec<f64>,
}

/// `G(z + α_j n)` for each strength, in order.
pub fn traverse<G>(g: &G, traversal: &TraversalSpec, directions: &DirectionSet) -> Result<Vec<Vec<f64>>>
where
    G: Generator + ?Sized,
{
    if traversal.direction_index >= directions.len() {
        return Err(Error::IndexOutOfRange {
            index: traversal.direction_index,
            len: directions.len(),
        });
    }
    if traversal.strengths.iter().any(|a| !a.is_finite()) {
        return Err(Error::NonFinite("traversal strength"));
    }
    if traversal.base.len() != g.latent_dim() || directions.dim() != g.latent_dim() {
        return Err(Error::Shape {
            op: "traverse",
            left: (g.latent_dim(), 1),
            right: (traversal.base.len(), directions.dim()),
        });
    }
    let n = directions.direction(traversal.direction_index);
    Ok(traversal
        .strengths
        .iter()
        .map(|&alpha| {
            let z: Vec<f64> = traversal.base.iter().zip(&n).map(|(z, d)| z + alpha * d).collect();
            g.generate(&z)
        })
        .collect())
}
