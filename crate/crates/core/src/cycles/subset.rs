//! Subsets of `{1, ..., N}` for `N <= 32`, stored as bitmasks.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

pub const MAX_AMBIENT: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_AMBIENT);
        if n == 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        assert!((1..=MAX_AMBIENT).contains(&i));
        Subset(1 << (i - 1))
    }

    /// From 1-based indices.
    pub fn of(indices: &[usize]) -> Self {
        indices
            .iter()
            .fold(Subset::EMPTY, |s, &i| s.union(Subset::singleton(i)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_AMBIENT).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn insert(&mut self, i: usize) {
        *self = self.union(Subset::singleton(i));
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Subset {
        Subset::full(n).difference(self)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 32 - self.0.leading_zeros() as usize)
    }

    /// Ascending 1-based indices.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i + 1)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self` (including the empty set and `self`), in bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        let mut cur = Some(0u32);
        std::iter::from_fn(move || {
            let s = cur?;
            cur = if s == full { None } else { Some((s.wrapping_sub(full)) & full) };
            Some(Subset(s))
        })
    }
}

/// All subsets of `{1..n}` of size `k`, in lexicographic order of their sorted indices.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Subset> {
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, stack: &mut Vec<usize>, out: &mut Vec<Subset>) {
        if stack.len() == k {
            out.push(Subset::of(stack));
            return;
        }
        for i in start..=n {
            if n - i + 1 < k - stack.len() {
                break;
            }
            stack.push(i);
            rec(i + 1, n, k, stack, out);
            stack.pop();
        }
    }
    rec(1, n, k, &mut stack, &mut out);
    out
}

/// All nonempty subsets of `{1..n}`, by size then lexicographically.
pub fn nonempty_subsets(n: usize) -> Vec<Subset> {
    (1..=n).flat_map(|k| subsets_of_size(n, k)).collect()
}

impl Ord for Subset {
    /// Lexicographic on sorted index lists, so `{1} < {1,2} < {2}`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}
