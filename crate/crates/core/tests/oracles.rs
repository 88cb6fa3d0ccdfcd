//! Cross-checks against independent oracles: finite differences, dense
//! triple loops, high-sample Monte Carlo and closed forms.

use hproj_core::discovery::{
    pearson_correlation, pipl, ppl, sefa_directions, traverse, variation_magnitude, DirectionSet, Generator,
    IdentityGenerator, LinearGenerator, SquaredL2, TraversalSpec,
};
use hproj_core::householder::{chain_accumulate, chain_vjp};
use hproj_core::linalg::{orthogonality_error, sym_eig};
use hproj_core::projector::nearest_orthogonal;
use hproj_core::rng::{gaussian_matrix, gaussian_vec, seeded};
use hproj_core::toy::{
    align, evaluate_recovery, init_generator, make_ground_truth, random_alignment_baseline, train_toy, Init,
    TrainConfig,
};
use hproj_core::{Matrix, ProjectorParams, ReflectorChain};

fn triple_loop(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum()
    })
}

fn fro(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn inner(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    num / b.iter().map(|y| y * y).sum::<f64>().sqrt().max(1e-12)
}

fn bumped(m: &Matrix, i: usize, j: usize, delta: f64) -> Matrix {
    Matrix::from_fn(m.rows(), m.cols(), |a, b| {
        m.get(a, b) + if (a, b) == (i, j) { delta } else { 0.0 }
    })
}

fn chain_fd(rows: &Matrix, upstream: &Matrix) -> Vec<f64> {
    let loss = |r: &Matrix| inner(upstream, &chain_accumulate(&ReflectorChain::from_rows(r).unwrap()));
    let mut out = Vec::new();
    for i in 0..rows.rows() {
        for j in 0..rows.cols() {
            out.push((loss(&bumped(rows, i, j, 1e-6)) - loss(&bumped(rows, i, j, -1e-6))) / 2e-6);
        }
    }
    out
}

#[test]
fn single_reflector_sum_loss_gradient() {
    let rows = Matrix::from_rows(&[&[0.3, -1.2, 0.7]]).unwrap();
    let ones = Matrix::from_fn(3, 3, |_, _| 1.0);
    let chain = ReflectorChain::from_rows(&rows).unwrap();
    let g = chain_vjp(&chain, &ones).unwrap().concat();
    assert!(rel(&g, &chain_fd(&rows, &ones)) < 1e-5);
}

#[test]
fn four_reflector_chain_gradient() {
    let mut rng = seeded(3);
    let rows = gaussian_matrix(&mut rng, 4, 8);
    let up = gaussian_matrix(&mut rng, 8, 8);
    let g = chain_vjp(&ReflectorChain::from_rows(&rows).unwrap(), &up)
        .unwrap()
        .concat();
    assert!(rel(&g, &chain_fd(&rows, &up)) < 1e-5);
}

fn projector_fd(p: &ProjectorParams, up: &Matrix) -> Vec<f64> {
    let (ur, vr) = (p.u_chain().to_rows(), p.v_chain().to_rows());
    let loss = |u: &Matrix, v: &Matrix| {
        let q = ProjectorParams::from_chains(
            p.out_dim(),
            p.in_dim(),
            p.rank(),
            ReflectorChain::from_rows(u).unwrap(),
            ReflectorChain::from_rows(v).unwrap(),
        )
        .unwrap();
        inner(up, &q.forward())
    };
    let mut out = Vec::new();
    for i in 0..ur.rows() {
        for j in 0..ur.cols() {
            out.push((loss(&bumped(&ur, i, j, 1e-6), &vr) - loss(&bumped(&ur, i, j, -1e-6), &vr)) / 2e-6);
        }
    }
    for i in 0..vr.rows() {
        for j in 0..vr.cols() {
            out.push((loss(&ur, &bumped(&vr, i, j, 1e-6)) - loss(&ur, &bumped(&vr, i, j, -1e-6))) / 2e-6);
        }
    }
    out
}

fn flat(p: &ProjectorParams, up: &Matrix) -> Vec<f64> {
    let g = p.backward(up).unwrap();
    g.u.concat().into_iter().chain(g.v.concat()).collect()
}

#[test]
fn projector_gradient_two_by_two_entry_loss() {
    let p = ProjectorParams::new(2, 2, 2, 4).unwrap();
    let up = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
    assert!(rel(&flat(&p, &up), &projector_fd(&p, &up)) < 1e-5);
}

#[test]
fn projector_gradient_rank_three() {
    let p = ProjectorParams::new(8, 8, 3, 5).unwrap();
    let up = gaussian_matrix(&mut seeded(6), 8, 8);
    assert!(rel(&flat(&p, &up), &projector_fd(&p, &up)) < 1e-5);
}

#[test]
fn hundred_steps_keep_orthogonality() {
    let mut p = ProjectorParams::new(32, 32, 10, 1).unwrap();
    let mut rng = seeded(2);
    for _ in 0..100 {
        let g = p.backward(&gaussian_matrix(&mut rng, 32, 32)).unwrap();
        p = p.gradient_step(&g, 0.1).unwrap();
        assert!(orthogonality_error(&p.u()) < 1e-10);
        assert!(orthogonality_error(&p.v()) < 1e-10);
    }
}

#[test]
fn large_projector_spectrum() {
    let a = ProjectorParams::new(512, 512, 10, 8).unwrap().forward();
    let eig = sym_eig(&triple_loop(&a.transpose(), &a)).unwrap();
    for (i, &v) in eig.values.iter().enumerate() {
        let target = if i < 10 { 1.0 } else { 0.0 };
        assert!((v - target).abs() < 1e-9, "eigenvalue {i} = {v}");
    }
}

#[test]
fn nearest_orthogonal_beats_random_candidates() {
    let mut rng = seeded(21);
    let a = gaussian_matrix(&mut rng, 3, 3);
    let ours = fro(&nearest_orthogonal(&a).unwrap(), &a);
    for _ in 0..10_000 {
        let angles = gaussian_vec(&mut rng, 3);
        let r = [(0, 1), (1, 2), (0, 2)]
            .iter()
            .zip(&angles)
            .fold(Matrix::identity(3), |acc, (&(i, j), &t)| {
                let (s, c) = t.sin_cos();
                let g = Matrix::from_fn(3, 3, |r, k| match (r, k) {
                    _ if (r, k) == (i, i) || (r, k) == (j, j) => c,
                    _ if (r, k) == (i, j) => -s,
                    _ if (r, k) == (j, i) => s,
                    _ if r == k => 1.0,
                    _ => 0.0,
                });
                triple_loop(&acc, &g)
            });
        assert!(ours <= fro(&r, &a) + 1e-12);
        let flipped = Matrix::from_fn(3, 3, |i, j| if j == 0 { -r.get(i, j) } else { r.get(i, j) });
        assert!(ours <= fro(&flipped, &a) + 1e-12);
    }
}

#[test]
fn apply_matches_dense_forward() {
    let p = ProjectorParams::new(7, 5, 3, 2).unwrap();
    let z = gaussian_vec(&mut seeded(1), 5);
    let dense = p.forward().mul_vec(&z).unwrap();
    let fast = p.apply(&z).unwrap();
    assert!(dense.iter().zip(&fast).all(|(a, b)| (a - b).abs() < 1e-12));
}

#[test]
fn ppl_identity_generator_agrees_with_high_sample_run() {
    let g = IdentityGenerator(6);
    let low = ppl(&g, &SquaredL2, 1e-4, 400, 9).unwrap();
    let high = ppl(&g, &SquaredL2, 1e-4, 4000, 1009).unwrap();
    assert!((low.value - high.value).abs() < 3.0 * (low.stderr.powi(2) + high.stderr.powi(2)).sqrt());
}

#[test]
fn pipl_linear_generator_is_mean_variation() {
    let a = gaussian_matrix(&mut seeded(2), 5, 6);
    let set = DirectionSet::from_directions(sefa_directions(&a, 4).unwrap().directions().clone()).unwrap();
    let expected: f64 = (0..set.len())
        .map(|i| variation_magnitude(&a, &set.direction(i)).unwrap())
        .sum::<f64>()
        / set.len() as f64;
    let est = pipl(&LinearGenerator(a), &SquaredL2, &set, 1e-2, 2000, 4).unwrap();
    // Linear outputs make each sample exact; only the direction draw varies.
    assert!(
        (est.value - expected).abs() < 4.0 * est.stderr + 1e-9,
        "{} vs {expected}",
        est.value
    );
}

#[test]
fn pearson_matches_direct_formula() {
    let mut rng = seeded(50);
    let x = gaussian_vec(&mut rng, 50);
    let y: Vec<f64> = gaussian_vec(&mut rng, 50)
        .iter()
        .zip(&x)
        .map(|(n, x)| 0.5 * x + n)
        .collect();
    let n = 50.0;
    let (sx, sy): (f64, f64) = (x.iter().sum(), y.iter().sum());
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    let direct = (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
    assert!((pearson_correlation(&x, &y).unwrap() - direct).abs() < 1e-12);
}

#[test]
fn traversal_of_linear_generator_is_linear() {
    let a = gaussian_matrix(&mut seeded(3), 4, 6);
    let set = sefa_directions(&a, 3).unwrap();
    let base = gaussian_vec(&mut seeded(4), 6);
    let traversal = TraversalSpec {
        direction_index: 1,
        strengths: vec![-3.0, -1.0, 0.0, 2.5],
        base: base.clone(),
    };
    let g = LinearGenerator(a.clone());
    let outs = traverse(&g, &traversal, &set).unwrap();
    let g0 = g.generate(&base);
    let an = a.mul_vec(&set.direction(1)).unwrap();
    for (alpha, out) in traversal.strengths.iter().zip(&outs) {
        for k in 0..4 {
            assert!((out[k] - g0[k] - alpha * an[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn sample_covariance_principal_axes_follow_factors() {
    let gt = make_ground_truth(8, 3, 8, 11).unwrap();
    let (_, y) = gt.sample(10_000, 12);
    let mean: Vec<f64> = (0..8)
        .map(|j| (0..y.rows()).map(|i| y.get(i, j)).sum::<f64>() / y.rows() as f64)
        .collect();
    let cov = Matrix::from_fn(8, 8, |a, b| {
        (0..y.rows())
            .map(|i| (y.get(i, a) - mean[a]) * (y.get(i, b) - mean[b]))
            .sum::<f64>()
            / (y.rows() - 1) as f64
    });
    let eig = sym_eig(&cov).unwrap();
    let top = DirectionSet::from_directions(eig.vectors.leading_columns(3)).unwrap();
    let images = Matrix::from_columns(
        &(0..3)
            .map(|k| gt.mixing.mul_vec(&gt.directions.column(k)).unwrap())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert!(align(&images, &top).unwrap().mean > 0.99);
}

#[test]
fn nearest_init_recovers_factors_without_training() {
    let gt = make_ground_truth(8, 3, 8, 4).unwrap();
    let g = init_generator(&gt, &TrainConfig::new(4, 1, 0.0, 3, Init::Nearest)).unwrap();
    assert!(evaluate_recovery(&g, &gt).unwrap().mean >= 0.99);
}

#[test]
fn random_init_sits_near_random_baseline() {
    let baseline = random_alignment_baseline(8, 3, 3, 4000, 77).unwrap();
    let mut total = 0.0;
    let seeds = 40;
    for s in 0..seeds {
        let gt = make_ground_truth(8, 3, 8, 500 + s).unwrap();
        let g = init_generator(&gt, &TrainConfig::new(s, 1, 0.0, 3, Init::Random)).unwrap();
        total += evaluate_recovery(&g, &gt).unwrap().mean;
    }
    let mean = total / seeds as f64;
    assert!((mean - baseline).abs() < 0.1, "untrained {mean} vs baseline {baseline}");
}

#[test]
fn training_reduces_loss_tenfold() {
    let gt = make_ground_truth(8, 3, 8, 0).unwrap();
    let (_, h) = train_toy(&gt, &TrainConfig::new(0, 500, 0.05, 3, Init::Random)).unwrap();
    assert!(h.final_loss < 0.1 * h.loss[0], "{} vs {}", h.final_loss, h.loss[0]);
}
