//! Compact WY representation of reflector products.
//!
//! A product `H_1 … H_m` is held as `I − 2 W Yᵀ` with `W, Y ∈ R^{d×m}`. The
//! factor 2 stays outside `W`. Two forms merge as
//!
//! ```text
//! (I − 2 W_L Y_Lᵀ)(I − 2 W_R Y_Rᵀ) = I − 2 [W_L | W_R − 2 W_L (Y_Lᵀ W_R)] [Y_L | Y_R]ᵀ
//! ```
//!
//! so a chain can be cut in half recursively, each half built independently,
//! and the halves merged with matrix-matrix products.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::householder::{chain_accumulate, ReflectorChain, MIN_REFLECTOR_NORM};
use crate::linalg::{dot, gemm, product, Matrix, View};
use crate::parallel::{join, threads};

/// `I − 2 W Yᵀ`. `W` and `Y` are stored transposed (`m x d`, one column per
/// row) so that concatenating blocks is an append.
#[derive(Debug, Clone, PartialEq)]
pub struct WyForm {
    dim: usize,
    wt: Vec<f64>,
    yt: Vec<f64>,
}

impl WyForm {
    /// Zero-width form representing the identity.
    pub fn empty(dim: usize) -> Self {
        WyForm {
            dim,
            wt: Vec::new(),
            yt: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of columns `m` of `W` and `Y`.
    pub fn block_size(&self) -> usize {
        self.wt.len().checked_div(self.dim).unwrap_or(0)
    }

    /// `W` as a `d x m` matrix.
    pub fn w(&self) -> Matrix {
        Matrix::from_vec_unchecked(self.block_size(), self.dim, self.wt.clone()).transpose()
    }

    /// `Y` as a `d x m` matrix.
    pub fn y(&self) -> Matrix {
        Matrix::from_vec_unchecked(self.block_size(), self.dim, self.yt.clone()).transpose()
    }

    fn wt_view(&self) -> View<'_> {
        View::row_major(&self.wt, self.block_size(), self.dim)
    }

    fn yt_view(&self) -> View<'_> {
        View::row_major(&self.yt, self.block_size(), self.dim)
    }

    /// Dense `I − 2 W Yᵀ`.
    pub fn to_dense(&self) -> Matrix {
        self.to_dense_par(1)
    }

    /// Dense `I − 2 W Yᵀ`, splitting output rows across `workers`.
    pub fn to_dense_par(&self, workers: usize) -> Matrix {
        let d = self.dim;
        let mut out = Matrix::identity(d);
        dense_rows(self, 0, out.as_mut_slice(), threads(workers));
        out
    }
}

/// Output rows per GEMM call. Fixed so that the arithmetic, and therefore the
/// rounding, does not depend on how rows are shared between workers.
const DENSE_BLOCK_ROWS: usize = 64;

fn dense_rows(form: &WyForm, first_row: usize, out: &mut [f64], workers: usize) {
    let d = form.dim;
    let rows = out.len() / d;
    let blocks = rows.div_ceil(DENSE_BLOCK_ROWS);
    if workers > 1 && blocks > 1 {
        let mid = (blocks / 2) * DENSE_BLOCK_ROWS;
        let (top, bottom) = out.split_at_mut(mid * d);
        let left = workers / 2;
        join(
            true,
            || dense_rows(form, first_row, top, left),
            || dense_rows(form, first_row + mid, bottom, workers - left),
        );
        return;
    }
    let m = form.block_size();
    if m == 0 || rows == 0 {
        return;
    }
    // Rows first_row.. of W are columns first_row.. of Wt.
    let w_rows = View::row_major(&form.wt, m, d).t();
    for (b, chunk) in out.chunks_mut(DENSE_BLOCK_ROWS * d).enumerate() {
        let start = first_row + b * DENSE_BLOCK_ROWS;
        let w_block = w_rows.rows_range(start, chunk.len() / d);
        gemm(-2.0, w_block, form.yt_view(), 1.0, chunk);
    }
}

/// Base case: a single reflector `h` gives `W = Y = h/‖h‖`.
pub fn wy_from_reflector(h: &[f64]) -> Result<WyForm> {
    let norm = libm::sqrt(dot(h, h));
    if !(norm >= MIN_REFLECTOR_NORM) {
        return Err(Error::DegenerateReflector { index: 0, norm });
    }
    if h.is_empty() {
        return Err(Error::invalid("reflector of dimension zero"));
    }
    let unit: Vec<f64> = h.iter().map(|x| x / norm).collect();
    Ok(WyForm {
        dim: h.len(),
        wt: unit.clone(),
        yt: unit,
    })
}

/// Product of two forms as one form; block sizes add.
pub fn wy_merge(left: &WyForm, right: &WyForm) -> Result<WyForm> {
    if left.dim != right.dim {
        return Err(Error::Shape {
            op: "wy_merge",
            left: (left.dim, left.block_size()),
            right: (right.dim, right.block_size()),
        });
    }
    Ok(merge_owned(left.clone(), right.clone()))
}

fn merge_owned(mut left: WyForm, mut right: WyForm) -> WyForm {
    let (ml, mr) = (left.block_size(), right.block_size());
    if ml == 0 {
        return right;
    }
    if mr == 0 {
        return left;
    }
    // T = Y_Lᵀ W_R (ml x mr); W_R' = W_R − 2 W_L T, i.e. Wt_R' = Wt_R − 2 Tᵀ Wt_L.
    let t = product(left.yt_view(), right.wt_view().t());
    gemm(-2.0, t.view().t(), left.wt_view(), 1.0, &mut right.wt);
    left.wt.append(&mut right.wt);
    left.yt.append(&mut right.yt);
    left
}

/// Builds the form of a whole chain by balanced binary splitting.
///
/// Identity placeholders are skipped, so the block size equals the number of
/// non-identity reflectors. The merge tree depends only on the chain, so the
/// result is bitwise identical for any `workers`.
pub fn wy_from_chain(chain: &ReflectorChain, workers: usize) -> Result<WyForm> {
    let leaves: Vec<&[f64]> = chain.reflectors().iter().filter_map(|r| r.vector()).collect();
    build(chain.dim(), &leaves, threads(workers))
}

fn build(dim: usize, leaves: &[&[f64]], workers: usize) -> Result<WyForm> {
    match leaves.len() {
        0 => Ok(WyForm::empty(dim)),
        1 => wy_from_reflector(leaves[0]),
        n => {
            let (lo, hi) = leaves.split_at(n / 2);
            let left_workers = workers / 2;
            let (l, r) = join(
                workers > 1,
                || build(dim, lo, left_workers.max(1)),
                || build(dim, hi, (workers - left_workers).max(1)),
            );
            Ok(merge_owned(l?, r?))
        }
    }
}

/// `x − 2 W (Yᵀ x)`, without forming the `d x d` matrix.
pub fn wy_apply(form: &WyForm, x: &Matrix) -> Result<Matrix> {
    if x.rows() != form.dim {
        return Err(Error::Shape {
            op: "wy_apply",
            left: (form.dim, form.dim),
            right: x.shape(),
        });
    }
    let mut out = x.clone();
    if form.block_size() == 0 {
        return Ok(out);
    }
    let t = product(form.yt_view(), x.view());
    gemm(-2.0, form.wt_view().t(), t.view(), 1.0, out.as_mut_slice());
    Ok(out)
}

/// How a chain is turned into a dense matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accumulation {
    /// One reflector at a time ([`chain_accumulate`]).
    Naive,
    /// Split-and-merge compact WY followed by one dense product.
    Wy,
}

impl Accumulation {
    pub fn as_str(self) -> &'static str {
        match self {
            Accumulation::Naive => "naive",
            Accumulation::Wy => "wy",
        }
    }
}

impl core::str::FromStr for Accumulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Accumulation::Naive),
            "wy" => Ok(Accumulation::Wy),
            other => Err(Error::invalid(alloc::format!("unknown accumulation method `{other}`"))),
        }
    }
}

/// Dense `H_1 … H_m` by the chosen method.
pub fn accumulate(chain: &ReflectorChain, method: Accumulation, workers: usize) -> Result<Matrix> {
    match method {
        Accumulation::Naive => Ok(chain_accumulate(chain)),
        Accumulation::Wy => Ok(wy_from_chain(chain, workers)?.to_dense_par(workers)),
    }
}
