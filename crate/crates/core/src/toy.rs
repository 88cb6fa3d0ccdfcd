//! Synthetic factor-recovery experiment.
//!
//! A ground-truth linear factor model `y = M z + b` with `M = Q diag(g) Fᵀ`
//! is fit by a small generator whose first weight is a low-rank orthogonal
//! projector. After training, the projector's latent directions are compared
//! against the factor directions `F`.
//!
//! The projector alone has unit singular values, so it cannot express the
//! gains `g`. The generator therefore ends in a dense affine head
//! (initialized to the identity) that absorbs them.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::discovery::{DirectionSet, Generator};
use crate::error::{Error, Result};
use crate::linalg::{dot, matmul, matmul_nt, matmul_tn, norm2, orthogonality_error, Matrix};
use crate::projector::ProjectorParams;
use crate::rng::{gaussian_matrix, gaussian_vec, mix, seeded, stream};

/// Largest factor gain; gains are log-spaced from here down to one.
pub const MAX_GAIN: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthFactors {
    /// `d x n_true`, orthonormal columns.
    pub directions: Matrix,
    /// Descending, in `[1, 4]`.
    pub gains: Vec<f64>,
    /// `out_dim x d`.
    pub mixing: Matrix,
    pub bias: Vec<f64>,
    pub noise: f64,
}

impl GroundTruthFactors {
    pub fn latent_dim(&self) -> usize {
        self.directions.rows()
    }

    pub fn factor_count(&self) -> usize {
        self.directions.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.mixing.rows()
    }

    pub fn with_noise(mut self, noise: f64) -> Result<Self> {
        if !(noise >= 0.0) || !noise.is_finite() {
            return Err(Error::invalid("noise level must be finite and nonnegative"));
        }
        self.noise = noise;
        Ok(self)
    }

    /// Noise-free `M z + b`.
    pub fn target(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.mixing.mul_vec(z)?;
        for (yi, bi) in y.iter_mut().zip(&self.bias) {
            *yi += bi;
        }
        Ok(y)
    }

    /// `n` samples `(z, y)` as row matrices, with `y` carrying the noise.
    pub fn sample(&self, n: usize, seed: u64) -> (Matrix, Matrix) {
        let mut rng = seeded(seed);
        let z = gaussian_matrix(&mut rng, n, self.latent_dim());
        let mut y = affine_rows(&z, &self.mixing, &self.bias);
        if self.noise > 0.0 {
            let e = gaussian_matrix(&mut rng, n, self.out_dim()).scale(self.noise);
            y = y.add(&e).expect("same shape");
        }
        (z, y)
    }
}

/// `Q` of a thin QR (positive `R` diagonal) by twice-iterated modified
/// Gram-Schmidt.
fn orthonormal_columns(a: &Matrix) -> Result<Matrix> {
    let mut cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    for j in 0..cols.len() {
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let p = dot(&done[k], &rest[0]);
                crate::linalg::axpy(-p, &done[k], &mut rest[0]);
            }
        }
        let n = norm2(&cols[j]);
        if n < 1e-10 {
            return Err(Error::invalid("random basis is numerically rank deficient"));
        }
        cols[j].iter_mut().for_each(|x| *x /= n);
    }
    Matrix::from_columns(&cols)
}

/// Log-spaced gains from [`MAX_GAIN`] down to one.
fn log_gains(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![MAX_GAIN];
    }
    (0..n)
        .map(|i| libm::pow(MAX_GAIN, (n - 1 - i) as f64 / (n - 1) as f64))
        .collect()
}

/// Seeded ground truth with `n_true` factors in a `d`-dimensional latent
/// space, observed through an `out_dim`-dimensional affine map.
pub fn make_ground_truth(d: usize, n_true: usize, out_dim: usize, seed: u64) -> Result<GroundTruthFactors> {
    if d == 0 || n_true == 0 || n_true > d || n_true > out_dim {
        return Err(Error::invalid(alloc::format!(
            "need 1 <= n_true <= min(d, out_dim), got n_true={n_true}, d={d}, out_dim={out_dim}"
        )));
    }
    let mut rng = seeded(seed);
    let f = orthonormal_columns(&gaussian_matrix(&mut rng, d, n_true))?;
    let q = orthonormal_columns(&gaussian_matrix(&mut rng, out_dim, n_true))?;
    let gains = log_gains(n_true);
    let qg = Matrix::from_fn(out_dim, n_true, |i, j| q.get(i, j) * gains[j]);
    let mixing = matmul_nt(&qg, &f)?;
    let bias = gaussian_vec(&mut rng, out_dim).iter().map(|b| 0.5 * b).collect();
    Ok(GroundTruthFactors {
        directions: f,
        gains,
        mixing,
        bias,
        noise: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nonlinearity {
    Identity,
    Tanh,
}

impl Nonlinearity {
    fn apply(self, x: f64) -> f64 {
        match self {
            Nonlinearity::Identity => x,
            Nonlinearity::Tanh => libm::tanh(x),
        }
    }

    /// Derivative expressed through the activation value.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Nonlinearity::Identity => 1.0,
            Nonlinearity::Tanh => 1.0 - y * y,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyLayer {
    pub projector: ProjectorParams,
    pub bias: Vec<f64>,
    pub nonlinearity: Nonlinearity,
}

impl ToyLayer {
    pub fn linear(projector: ProjectorParams) -> Self {
        let bias = vec![0.0; projector.out_dim()];
        ToyLayer {
            projector,
            bias,
            nonlinearity: Nonlinearity::Identity,
        }
    }
}

/// Projector layers followed by a dense affine head.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyGenerator {
    layers: Vec<ToyLayer>,
    head: Matrix,
    head_bias: Vec<f64>,
}

impl ToyGenerator {
    /// Layers with an identity head.
    pub fn new(layers: Vec<ToyLayer>) -> Result<Self> {
        let out = layers.last().map(|l| l.projector.out_dim()).unwrap_or(0);
        Self::with_head(layers, Matrix::identity(out), vec![0.0; out])
    }

    pub fn with_head(layers: Vec<ToyLayer>, head: Matrix, head_bias: Vec<f64>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("generator needs at least one layer"));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.bias.len() != l.projector.out_dim() {
                return Err(Error::Shape {
                    op: "ToyGenerator bias",
                    left: (l.projector.out_dim(), 1),
                    right: (l.bias.len(), 1),
                });
            }
            if i > 0 && layers[i - 1].projector.out_dim() != l.projector.in_dim() {
                return Err(Error::Shape {
                    op: "ToyGenerator layers",
                    left: (layers[i - 1].projector.out_dim(), 1),
                    right: (l.projector.in_dim(), 1),
                });
            }
        }
        let last = layers[layers.len() - 1].projector.out_dim();
        if head.cols() != last || head_bias.len() != head.rows() {
            return Err(Error::Shape {
                op: "ToyGenerator head",
                left: (head_bias.len(), last),
                right: head.shape(),
            });
        }
        Ok(ToyGenerator {
            layers,
            head,
            head_bias,
        })
    }

    pub fn layers(&self) -> &[ToyLayer] {
        &self.layers
    }

    pub fn head(&self) -> &Matrix {
        &self.head
    }

    pub fn head_bias(&self) -> &[f64] {
        &self.head_bias
    }

    /// The projector under study.
    pub fn first_projector(&self) -> &ProjectorParams {
        &self.layers[0].projector
    }

    pub fn out_dim(&self) -> usize {
        self.head.rows()
    }

    /// Forward pass on a batch of latent rows, keeping every activation.
    fn forward_batch(&self, z: &Matrix) -> Result<(Vec<Matrix>, Matrix)> {
        let mut acts = vec![z.clone()];
        for layer in &self.layers {
            let a = layer.projector.forward();
            let mut x = affine_rows(acts.last().expect("nonempty"), &a, &layer.bias);
            if layer.nonlinearity != Nonlinearity::Identity {
                x = Matrix::from_fn(x.rows(), x.cols(), |i, j| layer.nonlinearity.apply(x.get(i, j)));
            }
            acts.push(x);
        }
        let y = affine_rows(acts.last().expect("nonempty"), &self.head, &self.head_bias);
        Ok((acts, y))
    }
}

impl Generator for ToyGenerator {
    fn latent_dim(&self) -> usize {
        self.layers[0].projector.in_dim()
    }

    fn generate(&self, z: &[f64]) -> Vec<f64> {
        toygen_forward(self, z).expect("latent dimension checked by caller")
    }
}

/// `x Wᵀ + b` for a batch of rows `x`.
fn affine_rows(x: &Matrix, w: &Matrix, b: &[f64]) -> Matrix {
    let mut y = matmul_nt(x, w).expect("affine shapes");
    for i in 0..y.rows() {
        for (v, bj) in y.row_mut(i).iter_mut().zip(b) {
            *v += bj;
        }
    }
    y
}

/// `nonlinearity(A_l x + b_l)` through every layer, then the head.
pub fn toygen_forward(g: &ToyGenerator, z: &[f64]) -> Result<Vec<f64>> {
    let mut x = z.to_vec();
    for layer in &g.layers {
        let mut y = layer.projector.apply(&x)?;
        for (v, b) in y.iter_mut().zip(&layer.bias) {
            *v = layer.nonlinearity.apply(*v + b);
        }
        x = y;
    }
    let mut y = g.head.mul_vec(&x)?;
    for (v, b) in y.iter_mut().zip(&g.head_bias) {
        *v += b;
    }
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    /// i.i.d. Gaussian reflector vectors.
    Random,
    /// Reflectors of the singular frames of the ground-truth mixing map.
    Nearest,
}

impl Init {
    pub fn as_str(self) -> &'static str {
        match self {
            Init::Random => "random",
            Init::Nearest => "nearest",
        }
    }
}

impl FromStr for Init {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Init::Random),
            "nearest" | "nearest-orth" => Ok(Init::Nearest),
            other => Err(Error::Invalid(String::from("unknown init: ") + other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub seed: u64,
    pub steps: usize,
    pub lr: f64,
    /// Size of the fixed training set; every step is full batch.
    pub batch: usize,
    pub rank: usize,
    pub init: Init,
}

impl TrainConfig {
    pub fn new(seed: u64, steps: usize, lr: f64, rank: usize, init: Init) -> Self {
        TrainConfig {
            seed,
            steps,
            lr,
            batch: 256,
            rank,
            init,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::invalid("steps must be at least 1"));
        }
        if !(self.lr >= 0.0) || !self.lr.is_finite() {
            return Err(Error::invalid("learning rate must be finite and nonnegative"));
        }
        if self.batch == 0 {
            return Err(Error::invalid("batch must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    /// Training loss before step `t`'s update.
    pub loss: Vec<f64>,
    /// `orthogonality_error(U)` after step `t`'s update.
    pub orthogonality: Vec<f64>,
    /// Loss after the last update.
    pub final_loss: f64,
}

impl TrainHistory {
    /// First step whose recorded loss is at or below `threshold`; the final
    /// loss counts as step `loss.len()`.
    pub fn steps_to_reach(&self, threshold: f64) -> Option<usize> {
        self.loss
            .iter()
            .position(|&l| l <= threshold)
            .or_else(|| (self.final_loss <= threshold).then_some(self.loss.len()))
    }
}

/// Initial generator for a config: one identity-nonlinearity projector layer
/// `d → out_dim` and an identity head.
pub fn init_generator(gt: &GroundTruthFactors, cfg: &TrainConfig) -> Result<ToyGenerator> {
    let proj_seed = mix(cfg.seed, 1);
    let projector = match cfg.init {
        Init::Random => ProjectorParams::new(gt.out_dim(), gt.latent_dim(), cfg.rank, proj_seed)?,
        Init::Nearest => ProjectorParams::from_pretrained(&gt.mixing, cfg.rank)?.with_seed(proj_seed),
    };
    ToyGenerator::new(vec![ToyLayer::linear(projector)])
}

fn mse(pred: &Matrix, target: &Matrix) -> f64 {
    let d = pred.sub(target).expect("same shape");
    let s = d.as_slice();
    dot(s, s) / s.len() as f64
}

/// Full-batch gradient descent on mean squared error against the ground
/// truth. Projector gradients go through [`ProjectorParams::backward`] and
/// [`ProjectorParams::gradient_step`]; biases and the head take plain steps.
pub fn train_toy(gt: &GroundTruthFactors, cfg: &TrainConfig) -> Result<(ToyGenerator, TrainHistory)> {
    cfg.validate()?;
    let g = init_generator(gt, cfg)?;
    train_from(g, gt, cfg)
}

/// [`train_toy`] from a given starting generator.
pub fn train_from(
    mut g: ToyGenerator,
    gt: &GroundTruthFactors,
    cfg: &TrainConfig,
) -> Result<(ToyGenerator, TrainHistory)> {
    cfg.validate()?;
    if g.latent_dim() != gt.latent_dim() || g.out_dim() != gt.out_dim() {
        return Err(Error::Shape {
            op: "train_toy",
            left: (gt.out_dim(), gt.latent_dim()),
            right: (g.out_dim(), g.latent_dim()),
        });
    }
    let (z, target) = gt.sample(cfg.batch, mix(cfg.seed, 2));
    let mut history = TrainHistory::default();
    for step in 0..cfg.steps {
        let (acts, y) = g.forward_batch(&z)?;
        let loss = mse(&y, &target);
        if !loss.is_finite() {
            return Err(Error::Diverged { step });
        }
        history.loss.push(loss);

        let scale = 2.0 / (y.rows() * y.cols()) as f64;
        let dy = y.sub(&target)?.scale(scale);
        let last = acts.last().expect("nonempty");
        let d_head = matmul_tn(&dy, last)?;
        let d_head_bias = column_sums(&dy);
        let mut dx = matmul(&dy, &g.head)?;

        let mut new_layers = Vec::with_capacity(g.layers.len());
        for (l, layer) in g.layers.iter().enumerate().rev() {
            let out = &acts[l + 1];
            let d_pre = Matrix::from_fn(dx.rows(), dx.cols(), |i, j| {
                dx.get(i, j) * layer.nonlinearity.derivative_from_output(out.get(i, j))
            });
            let d_a = matmul_tn(&d_pre, &acts[l])?;
            let d_b = column_sums(&d_pre);
            if l > 0 {
                dx = matmul(&d_pre, &layer.projector.forward())?;
            }
            let grads = layer.projector.backward(&d_a)?;
            let projector = layer.projector.gradient_step(&grads, cfg.lr)?;
            let bias = layer.bias.iter().zip(&d_b).map(|(b, g)| b - cfg.lr * g).collect();
            new_layers.push(ToyLayer {
                projector,
                bias,
                nonlinearity: layer.nonlinearity,
            });
        }
        new_layers.reverse();
        let head = g.head.sub(&d_head.scale(cfg.lr))?;
        let head_bias = g
            .head_bias
            .iter()
            .zip(&d_head_bias)
            .map(|(b, d)| b - cfg.lr * d)
            .collect();
        g = ToyGenerator {
            layers: new_layers,
            head,
            head_bias,
        };
        history
            .orthogonality
            .push(orthogonality_error(&g.first_projector().u()));
    }
    let (_, y) = g.forward_batch(&z)?;
    history.final_loss = mse(&y, &target);
    if !history.final_loss.is_finite() {
        return Err(Error::Diverged { step: cfg.steps });
    }
    Ok((g, history))
}

fn column_sums(m: &Matrix) -> Vec<f64> {
    let mut s = vec![0.0; m.cols()];
    for i in 0..m.rows() {
        for (acc, v) in s.iter_mut().zip(m.row(i)) {
            *acc += v;
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport {
    /// `|cos|` per ground-truth factor; zero when no direction was left.
    pub per_factor: Vec<f64>,
    /// Matched discovered-direction index per factor.
    pub matched: Vec<Option<usize>>,
    pub mean: f64,
}

/// Greedy matching: factors in order (largest gain first) each take the
/// remaining discovered direction with the largest `|cos|`.
pub fn align(truth: &Matrix, found: &DirectionSet) -> Result<AlignmentReport> {
    if truth.rows() != found.dim() {
        return Err(Error::Shape {
            op: "align",
            left: truth.shape(),
            right: found.directions().shape(),
        });
    }
    let cos = matmul_tn(truth, found.directions())?;
    let mut used = vec![false; found.len()];
    let mut per_factor = Vec::with_capacity(truth.cols());
    let mut matched = Vec::with_capacity(truth.cols());
    for i in 0..truth.cols() {
        let best = (0..found.len())
            .filter(|&j| !used[j])
            .map(|j| (j, cos.get(i, j).abs()))
            .fold(None, |acc: Option<(usize, f64)>, c| match acc {
                Some(a) if a.1 >= c.1 => Some(a),
                _ => Some(c),
            });
        match best {
            Some((j, c)) => {
                used[j] = true;
                per_factor.push(c);
                matched.push(Some(j));
            }
            None => {
                per_factor.push(0.0);
                matched.push(None);
            }
        }
    }
    let mean = if per_factor.is_empty() {
        0.0
    } else {
        per_factor.iter().sum::<f64>() / per_factor.len() as f64
    };
    Ok(AlignmentReport {
        per_factor,
        matched,
        mean,
    })
}

/// Alignment of the first projector's latent directions with the factors.
///
/// Every nonzero eigenvalue of the projector's `AᵀA` equals one, so the
/// directions are read from the parameterization (leading columns of `V`)
/// rather than from an eigensolver, which could return any rotation of the
/// eigenspace.
pub fn evaluate_recovery(g: &ToyGenerator, gt: &GroundTruthFactors) -> Result<AlignmentReport> {
    align(&gt.directions, &g.first_projector().directions())
}

/// Monte-Carlo expected greedy alignment between the first `n_true` axes of
/// `R^d` and `k` Haar-random orthonormal directions.
pub fn random_alignment_baseline(d: usize, n_true: usize, k: usize, samples: usize, seed: u64) -> Result<f64> {
    if n_true == 0 || n_true > d || k == 0 || k > d || samples == 0 {
        return Err(Error::invalid("invalid baseline dimensions"));
    }
    let truth = Matrix::eye(d, n_true);
    let mut total = 0.0;
    for s in 0..samples {
        let mut rng = stream(seed, s as u64);
        let basis = orthonormal_columns(&gaussian_matrix(&mut rng, d, k))?;
        let set = DirectionSet::from_parts(basis, vec![1.0; k]);
        total += align(&truth, &set)?.mean;
    }
    Ok(total / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eig;

    #[test]
    fn ground_truth_shapes_and_orthonormality() {
        let gt = make_ground_truth(8, 3, 8, 5).unwrap();
        assert!(orthogonality_error(&gt.directions) < 1e-10);
        assert!((gt.gains[0] - 4.0).abs() < 1e-15 && (gt.gains[2] - 1.0).abs() < 1e-15);
        assert!((gt.gains[1] - 2.0).abs() < 1e-14);
        assert_eq!(gt, make_ground_truth(8, 3, 8, 5).unwrap());
        let full = make_ground_truth(5, 5, 5, 1).unwrap();
        let gram = matmul_tn(&full.directions, &full.directions).unwrap();
        assert!(crate::linalg::frobenius_norm(&gram.sub(&Matrix::identity(5)).unwrap()) < 1e-10);
        assert!(make_ground_truth(3, 4, 8, 0).is_err());
    }

    #[test]
    fn mixing_singular_structure() {
        let gt = make_ground_truth(8, 3, 6, 9).unwrap();
        let eig = sym_eig(&matmul_tn(&gt.mixing, &gt.mixing).unwrap()).unwrap();
        for i in 0..3 {
            assert!((eig.values[i] - gt.gains[i] * gt.gains[i]).abs() < 1e-10);
        }
        assert!(eig.values[3].abs() < 1e-10);
    }

    #[test]
    fn single_layer_is_affine() {
        let p = ProjectorParams::new(5, 4, 2, 3).unwrap();
        let bias = vec![0.5, -1.0, 0.0, 2.0, 1.0];
        let g = ToyGenerator::new(vec![ToyLayer {
            projector: p.clone(),
            bias: bias.clone(),
            nonlinearity: Nonlinearity::Identity,
        }])
        .unwrap();
        let z = [0.3, -0.2, 1.0, 0.7];
        let mut expect = p.apply(&z).unwrap();
        for (e, b) in expect.iter_mut().zip(&bias) {
            *e += b;
        }
        assert_eq!(toygen_forward(&g, &z).unwrap(), expect);
        let zero = ToyGenerator::new(vec![ToyLayer::linear(p)]).unwrap();
        assert!(toygen_forward(&zero, &[0.0; 4]).unwrap().iter().all(|&v| v == 0.0));
        assert!(toygen_forward(&zero, &[0.0; 3]).is_err());
    }

    #[test]
    fn layer_dims_must_chain() {
        let a = ToyLayer::linear(ProjectorParams::new(4, 3, 2, 1).unwrap());
        let b = ToyLayer::linear(ProjectorParams::new(2, 5, 2, 1).unwrap());
        assert!(ToyGenerator::new(vec![a, b]).is_err());
    }

    #[test]
    fn zero_lr_is_flat() {
        let gt = make_ground_truth(6, 2, 6, 1).unwrap();
        let cfg = TrainConfig::new(4, 5, 0.0, 2, Init::Random);
        let (g, h) = train_toy(&gt, &cfg).unwrap();
        let g0 = init_generator(&gt, &cfg).unwrap();
        assert_eq!(g.head(), g0.head());
        assert_eq!(g.first_projector().u_chain(), g0.first_projector().u_chain());
        assert!(h.loss.iter().all(|&l| l == h.loss[0]));
        assert_eq!(h.final_loss, h.loss[0]);
    }

    #[test]
    fn tanh_backprop_matches_finite_difference_on_bias() {
        let gt = make_ground_truth(4, 2, 4, 3).unwrap();
        let p = ProjectorParams::new(4, 4, 2, 8).unwrap();
        let layer = ToyLayer {
            projector: p,
            bias: vec![0.1, -0.2, 0.3, 0.0],
            nonlinearity: Nonlinearity::Tanh,
        };
        let g = ToyGenerator::new(vec![layer]).unwrap();
        let cfg = TrainConfig {
            batch: 16,
            ..TrainConfig::new(2, 1, 1.0, 2, Init::Random)
        };
        let (stepped, _) = train_from(g.clone(), &gt, &cfg).unwrap();
        // the bias moved by -lr * dL/db; compare against central differences
        let (z, target) = gt.sample(cfg.batch, mix(cfg.seed, 2));
        let loss_with = |bias: Vec<f64>| {
            let mut h = g.clone();
            h.layers[0].bias = bias;
            let (_, y) = h.forward_batch(&z).unwrap();
            mse(&y, &target)
        };
        for k in 0..4 {
            let mut bp = g.layers[0].bias.clone();
            let mut bm = bp.clone();
            bp[k] += 1e-6;
            bm[k] -= 1e-6;
            let fd = (loss_with(bp) - loss_with(bm)) / 2e-6;
            let analytic = g.layers[0].bias[k] - stepped.layers[0].bias[k];
            assert!((fd - analytic).abs() < 1e-7 * fd.abs().max(1.0), "{fd} vs {analytic}");
        }
    }

    #[test]
    fn alignment_greedy_and_unmatched() {
        let truth = Matrix::eye(3, 2);
        let found = DirectionSet::from_parts(Matrix::from_columns(&[vec![0.6, -0.8, 0.0]]).unwrap(), vec![1.0]);
        let r = align(&truth, &found).unwrap();
        assert_eq!(r.per_factor, vec![0.6, 0.0]);
        assert_eq!(r.matched, vec![Some(0), None]);
        assert!((r.mean - 0.3).abs() < 1e-15);
    }

    #[test]
    fn init_parses() {
        assert_eq!("nearest".parse::<Init>().unwrap(), Init::Nearest);
        assert_eq!("random".parse::<Init>().unwrap().as_str(), "random");
        assert!("other".parse::<Init>().is_err());
    }
}
