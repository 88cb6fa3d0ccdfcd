//! Householder-parameterized low-rank orthogonal projectors.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. With `std`, compact-WY accumulation can spread its merge tree over
//! scoped worker threads and the GEMM kernels use runtime CPU detection.
//!
//! Module map:
//! - [`linalg`]: dense row-major matrices, Jacobi eigen/SVD, PSD square roots.
//! - [`householder`]: reflectors, chains, decomposition of orthogonal matrices,
//!   reverse-mode gradients through a chain.
//! - [`wy`]: compact WY form `I - 2 W Yᵀ` and split-and-merge accumulation.
//! - [`projector`]: the low-rank orthogonal projector `A = U S Vᵀ`.
//! - [`discovery`]: closed-form directions, traversal, PPL/PIPL, Fréchet
//!   distance and Pearson correlation.
//! - [`toy`]: a small synthetic generator used to exercise the projector end to end.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x >= lo)` is the NaN-rejecting form of the range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod discovery;
pub mod error;
pub mod householder;
pub mod linalg;
pub mod projector;
pub mod rng;
pub mod toy;
pub mod wy;

mod parallel;

pub use error::{Error, Result};
pub use householder::{Reflector, ReflectorChain};
pub use linalg::{Matrix, SvdResult};
pub use projector::ProjectorParams;
pub use wy::WyForm;
