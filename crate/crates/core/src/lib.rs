//! Evaluation of the Bernoulli generating function
//! `q(tau, w) = w e^{w tau} / (e^w - 1)` for scalars and of its action
//! `q(tau, A) f` on vectors.
//!
//! The scalar and matrix paths share one representation: the Lanczos split
//! `q = h_{p-1} + f_p` into a Bernoulli polynomial and a trigonometric series
//! with `O(k^{-p})` coefficients, optionally followed by a rational
//! correction of the truncated tail. Every Fourier mode of the matrix action
//! costs one real shifted solve with `A^2 + (2 pi k)^2 I`.

// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceleration;
pub mod arnoldi;
pub mod bernoulli;
pub mod bvp;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod matfunc;
pub mod report;
pub mod summation;

pub use error::{Error, Result};
pub use fourier::ApproxParams;
pub use num_complex::Complex64;
