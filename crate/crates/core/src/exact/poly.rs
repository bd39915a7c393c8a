//! Univariate polynomials over the rationals and the alternating binomial identity.

use num_traits::{One, Zero};

use super::binom::binom_q;
use super::rational::{int, sign_pow, Rational};
use super::KernelError;

/// Dense polynomial, `coeffs[d]` is the coefficient of `x^d`. Trailing zeros are trimmed,
/// so the zero polynomial has no coefficients and no degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<Rational>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = Rational::one();
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    /// `binom(x - shift, k)` as a polynomial in `x`.
    pub fn binomial_in(shift: i64, k: usize) -> Self {
        let mut p = Self::new(vec![Rational::one()]);
        for i in 0..k as i64 {
            // multiply by (x - shift - i) / (i + 1)
            let root = int(shift + i);
            let mut next = vec![Rational::zero(); p.coeffs.len() + 1];
            for (d, c) in p.coeffs.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * &root;
            }
            let denom = int(i + 1);
            p = Self::new(next.into_iter().map(|c| c / &denom).collect());
        }
        p
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

/// Evaluates `sum_{t=0}^{n} (-1)^t p(t) binom(n, t)`.
pub fn alternating_binomial_sum(n: u32, p: &IntPolynomial) -> Rational {
    (0..=n as i64)
        .map(|t| sign_pow(t) * p.eval(&int(t)) * binom_q(n as i64, t))
        .fold(Rational::zero(), |acc, x| acc + x)
}

/// Whether the alternating binomial sum of `p` vanishes; requires `deg p < n`.
pub fn combcomb_check(n: u32, p: &IntPolynomial) -> Result<bool, KernelError> {
    if n == 0 {
        return Err(KernelError::Precondition("n must be positive".into()));
    }
    if let Some(d) = p.degree() {
        if d >= n as usize {
            return Err(KernelError::Precondition(format!(
                "polynomial degree {d} is not below n = {n}"
            )));
        }
    }
    Ok(alternating_binomial_sum(n, p).is_zero())
}
