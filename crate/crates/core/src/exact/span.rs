//! Span membership with exact certificates.
//!
//! Relation spans in this crate have many generators (up to a few hundred thousand before
//! deduplication) but live in a small coordinate space. A maximal independent subset is
//! picked with arithmetic modulo a large prime, the exact solve runs on that subset only,
//! and every certificate is re-checked exactly against the full generator list. If the
//! modular pass under-counts the rank (the prime divides a minor) the check fails and the
//! selection is redone with exact arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::Certificate;
use super::rational::Rational;
use super::KernelError;

/// Sparse vector: strictly increasing coordinate indices with nonzero values.
pub type SparseVec = Vec<(usize, Rational)>;

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

fn int_mod(n: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    let r = ((n % &p) + &p) % &p;
    r.to_u64().expect("residue fits in u64")
}

fn rational_mod(q: &Rational) -> Option<u64> {
    let d = int_mod(q.denom());
    if d == 0 {
        return None;
    }
    Some(mul_mod(int_mod(q.numer()), pow_mod(d, PRIME - 2)))
}

fn sparse_dot(y: &[Rational], v: &SparseVec) -> Rational {
    v.iter()
        .filter(|(_, x)| !x.is_zero())
        .fold(Rational::zero(), |acc, (i, x)| acc + &y[*i] * x)
}

/// Indices of a maximal independent prefix-greedy subset, computed modulo the prime.
/// `None` when some entry has a denominator divisible by the prime.
fn select_modular(dim: usize, generators: &[SparseVec]) -> Option<Vec<usize>> {
    let mut basis: Vec<Option<Vec<u64>>> = vec![None; dim];
    let mut chosen = Vec::new();
    for (g, gen) in generators.iter().enumerate() {
        if chosen.len() == dim {
            break;
        }
        let mut row = vec![0u64; dim];
        for (i, q) in gen {
            row[*i] = rational_mod(q)?;
        }
        for col in 0..dim {
            if row[col] == 0 {
                continue;
            }
            match &basis[col] {
                Some(b) => {
                    let f = row[col];
                    for (r, x) in row.iter_mut().zip(b).skip(col) {
                        if *x != 0 {
                            *r = (*r + PRIME - mul_mod(f, *x)) % PRIME;
                        }
                    }
                }
                None => {
                    let inv = pow_mod(row[col], PRIME - 2);
                    for r in row.iter_mut().skip(col) {
                        *r = mul_mod(*r, inv);
                    }
                    basis[col] = Some(row);
                    chosen.push(g);
                    break;
                }
            }
        }
    }
    Some(chosen)
}

fn select_exact(dim: usize, generators: &[SparseVec]) -> Vec<usize> {
    let mut basis: Vec<Option<Vec<Rational>>> = vec![None; dim];
    let mut chosen = Vec::new();
    for (g, gen) in generators.iter().enumerate() {
        if chosen.len() == dim {
            break;
        }
        let mut row = vec![Rational::zero(); dim];
        for (i, q) in gen {
            row[*i] = q.clone();
        }
        for col in 0..dim {
            if row[col].is_zero() {
                continue;
            }
            match &basis[col] {
                Some(b) => {
                    let f = row[col].clone();
                    for (r, x) in row.iter_mut().zip(b).skip(col) {
                        if !x.is_zero() {
                            *r -= &f * x;
                        }
                    }
                }
                None => {
                    let inv = Rational::one() / &row[col];
                    for r in row.iter_mut().skip(col) {
                        *r *= &inv;
                    }
                    basis[col] = Some(row);
                    chosen.push(g);
                    break;
                }
            }
        }
    }
    chosen
}

/// Precomputed reduction of a generator family, answering many membership queries.
pub struct SpanSolver {
    dim: usize,
    generators: Vec<SparseVec>,
    chosen: Vec<usize>,
    /// `transform * G_chosen` is in reduced echelon form with pivots `0..chosen.len()`.
    transform: Vec<Vec<Rational>>,
    exact_selection: bool,
}

impl SpanSolver {
    pub fn new(dim: usize, generators: Vec<SparseVec>) -> Result<Self, KernelError> {
        if let Some(bad) = generators
            .iter()
            .position(|g| g.iter().any(|(i, _)| *i >= dim))
        {
            return Err(KernelError::Dimension(format!(
                "generator {bad} has a coordinate outside dimension {dim}"
            )));
        }
        let (chosen, exact) = match select_modular(dim, &generators) {
            Some(c) => (c, false),
            None => (select_exact(dim, &generators), true),
        };
        Ok(Self::build(dim, generators, chosen, exact))
    }

    fn build(dim: usize, generators: Vec<SparseVec>, chosen: Vec<usize>, exact: bool) -> Self {
        let k = chosen.len();
        // rows of [G_chosen | I]
        let mut rows: Vec<Vec<Rational>> = vec![vec![Rational::zero(); k]; dim];
        for (j, &g) in chosen.iter().enumerate() {
            for (i, q) in &generators[g] {
                rows[*i][j] = q.clone();
            }
        }
        let mut transform: Vec<Vec<Rational>> = (0..dim)
            .map(|i| {
                let mut t = vec![Rational::zero(); dim];
                t[i] = Rational::one();
                t
            })
            .collect();
        let mut next = 0;
        for col in 0..k {
            let p = (next..dim)
                .find(|&i| !rows[i][col].is_zero())
                .expect("chosen generators are independent");
            rows.swap(next, p);
            transform.swap(next, p);
            let inv = Rational::one() / &rows[next][col];
            for v in rows[next].iter_mut() {
                *v *= &inv;
            }
            for v in transform[next].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = rows[next].clone();
            let pivot_t = transform[next].clone();
            for i in 0..dim {
                if i == next || rows[i][col].is_zero() {
                    continue;
                }
                let f = rows[i][col].clone();
                for (v, p) in rows[i].iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
                for (v, p) in transform[i].iter_mut().zip(&pivot_t) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
            }
            next += 1;
        }
        Self {
            dim,
            generators,
            chosen,
            transform,
            exact_selection: exact,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.chosen.len()
    }

    pub fn generators(&self) -> &[SparseVec] {
        &self.generators
    }

    pub fn membership(&mut self, target: &SparseVec) -> Result<Certificate, KernelError> {
        if target.iter().any(|(i, _)| *i >= self.dim) {
            return Err(KernelError::Dimension(format!(
                "target has a coordinate outside dimension {}",
                self.dim
            )));
        }
        loop {
            let k = self.chosen.len();
            let reduced: Vec<Rational> = self
                .transform
                .iter()
                .map(|t| sparse_dot(t, target))
                .collect();
            if let Some(i) = (k..self.dim).find(|&i| !reduced[i].is_zero()) {
                let functional = self.transform[i].clone();
                if self
                    .generators
                    .iter()
                    .all(|g| sparse_dot(&functional, g).is_zero())
                {
                    return Ok(Certificate::Infeasible { functional });
                }
                if self.exact_selection {
                    unreachable!("exact selection spans every generator");
                }
                let chosen = select_exact(self.dim, &self.generators);
                let generators = std::mem::take(&mut self.generators);
                *self = Self::build(self.dim, generators, chosen, true);
                continue;
            }
            let mut solution = vec![Rational::zero(); self.generators.len()];
            for (j, &g) in self.chosen.iter().enumerate() {
                solution[g] = reduced[j].clone();
            }
            return Ok(Certificate::Solution {
                solution,
                nullspace: Vec::new(),
                free_columns: Vec::new(),
            });
        }
    }
}

/// Re-checks a membership certificate: `sum_g x_g g = target`, or `y` kills every
/// generator and not the target.
pub fn verify_membership(cert: &Certificate, target: &SparseVec, generators: &[SparseVec], dim: usize) -> bool {
    match cert {
        Certificate::Solution { solution, .. } => {
            if solution.len() != generators.len() {
                return false;
            }
            let mut acc = vec![Rational::zero(); dim];
            for (x, g) in solution.iter().zip(generators) {
                if x.is_zero() {
                    continue;
                }
                for (i, q) in g {
                    acc[*i] += x * q;
                }
            }
            let mut want = vec![Rational::zero(); dim];
            for (i, q) in target {
                want[*i] += q;
            }
            acc == want
        }
        Certificate::Infeasible { functional } => {
            functional.len() == dim
                && generators.iter().all(|g| sparse_dot(functional, g).is_zero())
                && !sparse_dot(functional, target).is_zero()
        }
    }
}

pub fn to_sparse(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, q)| !q.is_zero())
        .map(|(i, q)| (i, q.clone()))
        .collect()
}

/// Dense-interface membership: is `target` in the span of `generators`?
pub fn membership(target: &[Rational], generators: &[Vec<Rational>]) -> Result<Certificate, KernelError> {
    let dim = target.len();
    if let Some(bad) = generators.iter().position(|g| g.len() != dim) {
        return Err(KernelError::Dimension(format!(
            "generator {bad} has length {}, target has length {dim}",
            generators[bad].len()
        )));
    }
    let mut solver = SpanSolver::new(dim, generators.iter().map(|g| to_sparse(g)).collect())?;
    solver.membership(&to_sparse(target))
}

/// Largest absolute numerator, for reporting certificate size.
pub fn height(v: &[Rational]) -> BigInt {
    v.iter()
        .map(|q| q.numer().abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}
