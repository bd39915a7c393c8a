//! Symbolic cycles: formal sums over diagonal-type basis keys.

pub mod assignment;
pub mod formal_sum;
pub mod keys;
pub mod span;
pub mod subset;

pub use assignment::{push_forward, symmetrize, Assignment, Pushforward, Slot};
pub use formal_sum::FormalSum;
pub use keys::{subset_to_pattern, MarkedClassKey, Marker, OmegaBarKey, Pattern, SubsetClassKey, Sym};
pub use span::{KeyedMembership, KeyedSpan};
pub use subset::{nonempty_subsets, subsets_of_size, Subset};

use thiserror::Error;

use crate::exact::KernelError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("diagonal keys need a nonempty subset")]
    EmptySubset,
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("malformed assignment: {0}")]
    Assignment(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
