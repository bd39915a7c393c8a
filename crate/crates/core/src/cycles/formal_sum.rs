//! Finite rational linear combinations of basis keys.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::exact::rational::{format_rational, Rational};

/// Sparse map from keys to nonzero rational coefficients. No zero coefficient is ever stored,
/// so structural equality is equality of linear combinations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormalSum<K: Ord> {
    terms: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for FormalSum<K> {
    fn default() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> FormalSum<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(key: K) -> Self {
        Self::term(key, Rational::one())
    }

    pub fn term(key: K, coeff: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(key, coeff);
        s
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (K, Rational)>) -> Self {
        let mut s = Self::zero();
        for (k, c) in terms {
            s.add_term(k, c);
        }
        s
    }

    pub fn add_term(&mut self, key: K, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c * factor);
        }
    }

    pub fn coeff(&self, key: &K) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c * factor))
                .collect(),
        }
    }

    /// Extends `f` linearly; `f` maps each basis key to a combination in the target basis.
    pub fn map_linear<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> FormalSum<K2>) -> FormalSum<K2> {
        let mut out = FormalSum::zero();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }

    /// Linear extension of a key map where `None` is the zero class.
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Option<K2>) -> FormalSum<K2> {
        let mut out = FormalSum::zero();
        for (k, c) in &self.terms {
            if let Some(k2) = f(k) {
                out.add_term(k2, c.clone());
            }
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Sum of all coefficients.
    pub fn total(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, c| a + c)
    }

    pub fn into_terms(self) -> BTreeMap<K, Rational> {
        self.terms
    }
}

impl<K: Ord + Clone> AddAssign<&FormalSum<K>> for FormalSum<K> {
    fn add_assign(&mut self, rhs: &FormalSum<K>) {
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), c.clone());
        }
    }
}

impl<K: Ord + Clone> SubAssign<&FormalSum<K>> for FormalSum<K> {
    fn sub_assign(&mut self, rhs: &FormalSum<K>) {
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), -c.clone());
        }
    }
}

impl<K: Ord + Clone> Add for &FormalSum<K> {
    type Output = FormalSum<K>;
    fn add(self, rhs: Self) -> FormalSum<K> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<K: Ord + Clone> Sub for &FormalSum<K> {
    type Output = FormalSum<K>;
    fn sub(self, rhs: Self) -> FormalSum<K> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<K: Ord + Clone> Neg for &FormalSum<K> {
    type Output = FormalSum<K>;
    fn neg(self) -> FormalSum<K> {
        self.scale(&-Rational::one())
    }
}

impl<K: Ord + Clone> Mul<&Rational> for &FormalSum<K> {
    type Output = FormalSum<K>;
    fn mul(self, rhs: &Rational) -> FormalSum<K> {
        self.scale(rhs)
    }
}

impl<K: Ord + Clone> FromIterator<(K, Rational)> for FormalSum<K> {
    fn from_iter<T: IntoIterator<Item = (K, Rational)>>(iter: T) -> Self {
        Self::from_terms(iter)
    }
}

impl<K: Ord + fmt::Display> fmt::Display for FormalSum<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", format_rational(c), k)?;
        }
        Ok(())
    }
}

impl<K: Ord + fmt::Display> fmt::Debug for FormalSum<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
