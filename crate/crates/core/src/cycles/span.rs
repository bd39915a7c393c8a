//! Span membership for formal sums, with coordinates indexed by basis key.

use std::collections::BTreeMap;

use serde::Serialize;

use super::formal_sum::FormalSum;
use super::CycleError;
use crate::exact::matrix::Certificate;
use crate::exact::rational::Rational;
use crate::exact::span::{verify_membership, SpanSolver, SparseVec};

/// A family of generators over a key basis, reduced once and queried many times.
pub struct KeyedSpan<K: Ord> {
    index: BTreeMap<K, usize>,
    keys: Vec<K>,
    solver: SpanSolver,
}

/// Outcome of a membership query with the certificate translated back to keys.
#[derive(Clone, Debug, Serialize)]
pub struct KeyedMembership {
    pub certificate: Certificate,
    pub generators: usize,
    pub rank: usize,
    pub dim: usize,
    /// Coordinate labels of the infeasibility functional.
    pub basis: Vec<String>,
}

impl KeyedMembership {
    pub fn is_solution(&self) -> bool {
        self.certificate.is_solution()
    }
}

impl<K: Ord + Clone + std::fmt::Display> KeyedSpan<K> {
    /// `extra_keys` are added to the coordinate basis so that later targets may use them.
    pub fn new(
        generators: &[FormalSum<K>],
        extra_keys: impl IntoIterator<Item = K>,
    ) -> Result<Self, CycleError> {
        let mut index = BTreeMap::new();
        for g in generators {
            for k in g.keys() {
                index.entry(k.clone()).or_insert(0);
            }
        }
        for k in extra_keys {
            index.entry(k).or_insert(0);
        }
        let keys: Vec<K> = index.keys().cloned().collect();
        for (i, v) in index.values_mut().enumerate() {
            *v = i;
        }
        let sparse = generators.iter().map(|g| to_sparse(&index, g)).collect();
        let solver = SpanSolver::new(keys.len(), sparse)?;
        Ok(Self {
            index,
            keys,
            solver,
        })
    }

    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn rank(&self) -> usize {
        self.solver.rank()
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    /// Is `target` a rational combination of the generators? Keys of `target` outside the
    /// basis make it trivially infeasible.
    pub fn membership(&mut self, target: &FormalSum<K>) -> Result<KeyedMembership, CycleError> {
        let outside: Vec<&K> = target.keys().filter(|k| !self.index.contains_key(k)).collect();
        let certificate = if outside.is_empty() {
            let t = to_sparse(&self.index, target);
            let cert = self.solver.membership(&t)?;
            debug_assert!(verify_membership(&cert, &t, self.solver.generators(), self.dim()));
            cert
        } else {
            // no generator touches these keys; report a functional on the enlarged basis
            let mut keys = self.keys.clone();
            keys.extend(outside.iter().map(|k| (*k).clone()));
            keys.sort();
            let pos = keys.binary_search(outside[0]).expect("key inserted above");
            let mut functional = vec![Rational::from_integer(0.into()); keys.len()];
            functional[pos] = Rational::from_integer(1.into());
            return Ok(KeyedMembership {
                certificate: Certificate::Infeasible { functional },
                generators: self.solver.generators().len(),
                rank: self.rank(),
                dim: keys.len(),
                basis: keys.iter().map(|k| k.to_string()).collect(),
            });
        };
        Ok(KeyedMembership {
            certificate,
            generators: self.solver.generators().len(),
            rank: self.rank(),
            dim: self.dim(),
            basis: self.keys.iter().map(|k| k.to_string()).collect(),
        })
    }
}

fn to_sparse<K: Ord + Clone>(index: &BTreeMap<K, usize>, v: &FormalSum<K>) -> SparseVec {
    let mut out: SparseVec = v.iter().map(|(k, c)| (index[k], c.clone())).collect();
    out.sort_by_key(|(i, _)| *i);
    out
}

/// One-shot membership query.
pub fn span_membership<K: Ord + Clone + std::fmt::Display>(
    target: &FormalSum<K>,
    generators: &[FormalSum<K>],
) -> Result<KeyedMembership, CycleError> {
    KeyedSpan::new(generators, target.keys().cloned())?.membership(target)
}
