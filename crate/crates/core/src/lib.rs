//! Exact symbolic calculus for modified diagonal cycles.
//!
//! Cycles are formal rational combinations of diagonal-type basis classes; every check in
//! this crate reduces to exact linear algebra over the rationals.

pub mod blowup;
pub mod bundle;
pub mod cycles;
pub mod diagonal;
pub mod double_cover;
pub mod exact;
pub mod homology;
pub mod product;

pub use exact::{Certificate, CertificateKind, KernelError, Rational};
