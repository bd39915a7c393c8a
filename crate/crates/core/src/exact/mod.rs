//! Exact scalar and linear-algebra substrate.

pub mod binom;
pub mod matrix;
pub mod poly;
pub mod rational;
pub mod span;

pub use binom::{binom, binom_i64, binom_q};
pub use matrix::{rank, solve_exact, Certificate, CertificateKind, RationalMatrix};
pub use poly::{alternating_binomial_sum, combcomb_check, IntPolynomial};
pub use rational::{format_rational, frac, int, parse_rational, sign_pow, Rational};
pub use span::{membership, verify_membership, SpanSolver, SparseVec};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot parse rational `{0}`")]
    Parse(String),
}
