//! Involution patterns for a double cover `f: X -> X/i` with an `i`-fixed basepoint.
//!
//! `Xi_m` is the pullback of `Gamma^m` from the quotient, expanded in patterns. Appending a
//! list `nu` of extra coordinates and symmetrizing gives `Phi_nu(Xi_m)` on `2m-1`
//! coordinates; a combination of these equal to a nonzero multiple of `Gamma^{2m-1}` proves
//! that `Gamma^{2m-1}` vanishes upstairs.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cycles::{push_forward, symmetrize, Assignment, CycleError, FormalSum, OmegaBarKey, Pattern, Slot, Sym};
use crate::exact::matrix::{dot, solve_exact, Certificate, RationalMatrix};
use crate::exact::rational::{common_denominator, from_bigint, sign_pow, Rational};

fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * Rational::from_integer(BigInt::from(k)))
}

/// The per-pattern expansion of `Xi_m` on `m` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiExpansion {
    pub m: usize,
    pub terms: FormalSum<Pattern>,
}

/// `sum over r+s+t = m` of `(-2)^r / (2 r! s! t!) * Omega(r,s,t)`, merged under `(r,s,t) = (r,t,s)`.
pub fn xi_omega_form(m: usize) -> FormalSum<OmegaBarKey> {
    let mut out = FormalSum::zero();
    for r in 0..=m {
        for s in 0..=m - r {
            let t = m - r - s;
            if let Some(key) = OmegaBarKey::new(r, s, t) {
                let c = Rational::from_integer(BigInt::from(-2).pow(r as u32))
                    / (factorial(r) * factorial(s) * factorial(t) * Rational::from_integer(2.into()));
                out.add_term(key, c);
            }
        }
    }
    out
}

/// All `3^m` slot words, in lexicographic order `a < x < y`.
fn words(m: usize) -> Vec<Vec<Sym>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|w| {
                [Sym::Base, Sym::Var, Sym::VarConj].into_iter().map(move |s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

/// `Xi_m`: every canonical pattern with `r` basepoint slots gets `(-2)^r`.
///
/// Panics if the symmetrization disagrees with `m!` times [`xi_omega_form`]; each
/// `Omega(r,s,t)` is hit `r! s! t!` times by the full symmetric group, twice as often when
/// `s = t`.
pub fn xi(m: usize) -> XiExpansion {
    assert!(m >= 2, "Xi_m needs m >= 2");
    let mut terms = FormalSum::zero();
    for w in words(m) {
        if let Some(p) = Pattern::new(w.clone()) {
            if p.slots() == w.as_slice() {
                let r = p.base_count() as u32;
                terms.add_term(p, Rational::from_integer(BigInt::from(-2).pow(r)));
            }
        }
    }
    let expected = xi_omega_form(m).scale(&factorial(m));
    assert_eq!(symmetrize(&terms), expected, "pattern expansion of Xi_{m} is inconsistent");
    XiExpansion { m, terms }
}

/// A list of `m-1` appended coordinates, kept in canonical form under reordering and
/// relabeling of the sources.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NuList {
    m: usize,
    slots: Vec<Slot>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn relabel(slots: &[Slot], perm: &[usize]) -> Vec<Slot> {
    let mut out: Vec<Slot> = slots
        .iter()
        .map(|s| match *s {
            Slot::Base => Slot::Base,
            Slot::Source(j) => Slot::Source(perm[j - 1] + 1),
            Slot::ConjSource(j) => Slot::ConjSource(perm[j - 1] + 1),
        })
        .collect();
    out.sort();
    out
}

impl NuList {
    pub fn new(m: usize, slots: Vec<Slot>) -> Result<Self, CycleError> {
        if m < 2 {
            return Err(CycleError::OutOfRange(format!("order {m} < 2")));
        }
        if slots.len() != m - 1 {
            return Err(CycleError::Assignment(format!(
                "list of length {}, expected {}",
                slots.len(),
                m - 1
            )));
        }
        if let Some(j) = slots.iter().filter_map(|s| s.source()).find(|&j| j == 0 || j > m) {
            return Err(CycleError::Assignment(format!("source {j} outside 1..{m}")));
        }
        let slots = permutations(m)
            .iter()
            .map(|p| relabel(&slots, p))
            .min()
            .unwrap_or_default();
        Ok(Self { m, slots })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// The embedding `(x_1..x_m) -> (x_1..x_m, nu(1)..nu(m-1))`.
    pub fn assignment(&self) -> Assignment {
        let slots = (1..=self.m).map(Slot::Source).chain(self.slots.iter().copied()).collect();
        Assignment::new(self.m, slots).expect("validated list")
    }
}

impl fmt::Display for NuList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .slots
            .iter()
            .map(|s| match s {
                Slot::Base => "a".to_string(),
                Slot::Source(j) => format!("x{j}"),
                Slot::ConjSource(j) => format!("i(x{j})"),
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for NuList {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Canonical representatives, sorted with `a < x_1 < ... < x_m < i(x_1) < ... < i(x_m)`.
pub fn nu_orbits(m: usize) -> Vec<NuList> {
    assert!(m >= 2, "nu lists need m >= 2");
    let alphabet: Vec<Slot> = std::iter::once(Slot::Base)
        .chain((1..=m).map(Slot::Source))
        .chain((1..=m).map(Slot::ConjSource))
        .collect();
    // Multisets of size m-1 as nondecreasing index sequences.
    let mut lists: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..m - 1 {
        lists = lists
            .into_iter()
            .flat_map(|l| {
                let start = l.last().copied().unwrap_or(0);
                (start..alphabet.len()).map(move |i| {
                    let mut l = l.clone();
                    l.push(i);
                    l
                })
            })
            .collect();
    }
    let mut out: Vec<NuList> = lists
        .into_iter()
        .map(|l| NuList::new(m, l.iter().map(|&i| alphabet[i]).collect()).expect("in range"))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// `Phi_nu(Xi_m)` in the symmetrized basis on `2m-1` coordinates.
pub fn phi(x: &XiExpansion, nu: &NuList) -> Result<FormalSum<OmegaBarKey>, CycleError> {
    if nu.m() != x.m {
        return Err(CycleError::Assignment(format!(
            "list for order {} applied to Xi_{}",
            nu.m(),
            x.m
        )));
    }
    Ok(symmetrize(&push_forward(&x.terms, &nu.assignment())?))
}

/// `Gamma^q = sum over r+s=q` of `(-1)^r / (r! s!) * Omega(r,s,0)`.
pub fn gamma_omega(q: usize) -> FormalSum<OmegaBarKey> {
    assert!(q >= 1, "Gamma^q needs q >= 1");
    let mut out = FormalSum::zero();
    for r in 0..q {
        let key = OmegaBarKey::new(r, q - r, 0).expect("s > 0");
        out.add_term(key, sign_pow(r as i64) / (factorial(r) * factorial(q - r)));
    }
    out
}

/// Row order of the coordinate table: keys with `t > 0` by decreasing `r` (then increasing
/// `t`), followed by the `t = 0` keys that carry `Gamma^q`, by increasing `r`.
pub fn table_rows(q: usize) -> Vec<OmegaBarKey> {
    let all = OmegaBarKey::all(q);
    let mut mixed: Vec<OmegaBarKey> = all.iter().copied().filter(|k| k.t > 0).collect();
    mixed.sort_by(|a, b| b.r.cmp(&a.r).then(a.t.cmp(&b.t)));
    let pure = all.into_iter().filter(|k| k.t == 0);
    mixed.into_iter().chain(pure).collect()
}

/// Coordinates of every `Phi_nu(Xi_m)`: `entries[row][column]`.
#[derive(Clone, Debug, Serialize)]
pub struct PhiTable {
    pub m: usize,
    pub rows: Vec<OmegaBarKey>,
    pub columns: Vec<NuList>,
    #[serde(serialize_with = "crate::exact::rational::serde_text::matrix")]
    pub entries: Vec<Vec<Rational>>,
}

impl PhiTable {
    pub fn build(m: usize) -> Result<Self, CycleError> {
        let x = xi(m);
        let columns = nu_orbits(m);
        let rows = table_rows(2 * m - 1);
        let images: Vec<FormalSum<OmegaBarKey>> = columns
            .par_iter()
            .map(|nu| phi(&x, nu))
            .collect::<Result<_, _>>()?;
        let entries = rows
            .iter()
            .map(|k| images.iter().map(|img| img.coeff(k)).collect())
            .collect();
        Ok(Self {
            m,
            rows,
            columns,
            entries,
        })
    }

    pub fn matrix(&self) -> RationalMatrix {
        RationalMatrix::from_rows(self.entries.clone()).expect("rectangular table")
    }

    pub fn column(&self, j: usize) -> FormalSum<OmegaBarKey> {
        self.rows
            .iter()
            .zip(&self.entries)
            .map(|(k, row)| (*k, row[j].clone()))
            .collect()
    }

    /// `Gamma^{2m-1}` in row coordinates.
    pub fn target(&self) -> Vec<Rational> {
        let g = gamma_omega(2 * self.m - 1);
        self.rows.iter().map(|k| g.coeff(k)).collect()
    }
}

/// `sum lambda_nu Phi_nu(Xi_m) = scale * Gamma^{2m-1}`, solved with `scale = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct DoubleCoverSolution {
    pub columns: Vec<NuList>,
    #[serde(serialize_with = "crate::exact::rational::serde_text::vector")]
    pub lambdas: Vec<Rational>,
    #[serde(serialize_with = "crate::exact::rational::serde_text::rational")]
    pub scale: Rational,
    #[serde(serialize_with = "crate::exact::rational::serde_text::matrix")]
    pub nullspace: Vec<Vec<Rational>>,
    /// Least common multiple of the denominators of `lambdas`.
    #[serde(serialize_with = "serialize_bigint")]
    pub denominator_lcm: BigInt,
    /// `lambdas` and `scale` multiplied by `denominator_lcm`.
    #[serde(serialize_with = "crate::exact::rational::serde_text::vector")]
    pub integer_lambdas: Vec<Rational>,
    #[serde(serialize_with = "crate::exact::rational::serde_text::rational")]
    pub integer_scale: Rational,
}

fn serialize_bigint<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DoubleCoverOutcome {
    Solution(DoubleCoverSolution),
    Infeasible {
        columns: Vec<NuList>,
        rows: Vec<OmegaBarKey>,
        /// Row functional vanishing on every `Phi_nu(Xi_m)` but not on `Gamma^{2m-1}`.
        #[serde(serialize_with = "crate::exact::rational::serde_text::vector")]
        functional: Vec<Rational>,
    },
}

impl DoubleCoverOutcome {
    pub fn is_solution(&self) -> bool {
        matches!(self, DoubleCoverOutcome::Solution(_))
    }
}

/// Solves for a combination of the `Phi_nu(Xi_m)` over the canonical lists equal to
/// `Gamma^{2m-1}`.
pub fn solve_double_cover(m: usize) -> Result<DoubleCoverOutcome, CycleError> {
    let table = PhiTable::build(m)?;
    let a = table.matrix();
    let b = table.target();
    Ok(match solve_exact(&a, &b)? {
        Certificate::Solution {
            solution, nullspace, ..
        } => {
            let lcm = common_denominator(&solution);
            let factor = from_bigint(lcm.clone());
            DoubleCoverSolution {
                columns: table.columns,
                integer_lambdas: solution.iter().map(|l| l * &factor).collect(),
                integer_scale: factor,
                lambdas: solution,
                scale: Rational::one(),
                nullspace,
                denominator_lcm: lcm,
            }
            .into()
        }
        Certificate::Infeasible { functional } => DoubleCoverOutcome::Infeasible {
            columns: table.columns,
            rows: table.rows,
            functional,
        },
    })
}

impl From<DoubleCoverSolution> for DoubleCoverOutcome {
    fn from(s: DoubleCoverSolution) -> Self {
        DoubleCoverOutcome::Solution(s)
    }
}

/// `sum lambda_nu Phi_nu(Xi_m)` recomputed from scratch.
pub fn combine(m: usize, terms: &[(NuList, Rational)]) -> Result<FormalSum<OmegaBarKey>, CycleError> {
    let x = xi(m);
    let mut out = FormalSum::zero();
    for (nu, l) in terms {
        out.add_scaled(&phi(&x, nu)?, l);
    }
    Ok(out)
}

/// Re-checks an outcome without the solver: a solution must leave zero residual (and its
/// nullspace must map to zero), an infeasibility functional must kill every column and not
/// the target.
pub fn verify_outcome(m: usize, outcome: &DoubleCoverOutcome) -> Result<bool, CycleError> {
    let gamma = gamma_omega(2 * m - 1);
    match outcome {
        DoubleCoverOutcome::Solution(sol) => {
            let pairs: Vec<(NuList, Rational)> =
                sol.columns.iter().cloned().zip(sol.lambdas.iter().cloned()).collect();
            let residual = &combine(m, &pairs)? - &gamma.scale(&sol.scale);
            if !residual.is_zero() || sol.scale.is_zero() {
                return Ok(false);
            }
            for v in &sol.nullspace {
                let pairs: Vec<(NuList, Rational)> =
                    sol.columns.iter().cloned().zip(v.iter().cloned()).collect();
                if !combine(m, &pairs)?.is_zero() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        DoubleCoverOutcome::Infeasible {
            columns,
            rows,
            functional,
        } => {
            if functional.len() != rows.len() {
                return Ok(false);
            }
            let x = xi(m);
            let eval = |f: &FormalSum<OmegaBarKey>| {
                let coords: Vec<Rational> = rows.iter().map(|k| f.coeff(k)).collect();
                let covered = f.keys().all(|k| rows.contains(k));
                covered.then(|| dot(functional, &coords))
            };
            for nu in columns {
                match eval(&phi(&x, nu)?) {
                    Some(v) if v.is_zero() => {}
                    _ => return Ok(false),
                }
            }
            Ok(matches!(eval(&gamma), Some(v) if !v.is_zero()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{frac, int};

    fn key(text: &str) -> OmegaBarKey {
        text.parse().unwrap()
    }

    fn omega(terms: &[(&str, i64)]) -> FormalSum<OmegaBarKey> {
        terms.iter().map(|(k, c)| (key(k), int(*c))).collect()
    }

    #[test]
    fn xi_two() {
        let x = xi(2);
        let pat = |s: &str| s.parse::<Pattern>().unwrap();
        assert_eq!(x.terms.len(), 4);
        assert_eq!(x.terms.coeff(&pat("xx")), int(1));
        assert_eq!(x.terms.coeff(&pat("xy")), int(1));
        assert_eq!(x.terms.coeff(&pat("ax")), int(-2));
        assert_eq!(x.terms.coeff(&pat("xa")), int(-2));
        assert_eq!(xi(3).terms.coeff(&pat("aax")), int(4));
    }

    #[test]
    fn orbit_counts() {
        let names: Vec<String> = nu_orbits(2).iter().map(|n| n.to_string()).collect();
        assert_eq!(names, ["(a)", "(x1)", "(i(x1))"]);
        let names: Vec<String> = nu_orbits(3).iter().map(|n| n.to_string()).collect();
        assert_eq!(
            names,
            [
                "(a,a)",
                "(a,x1)",
                "(a,i(x1))",
                "(x1,x1)",
                "(x1,x2)",
                "(x1,i(x1))",
                "(x1,i(x2))",
                "(i(x1),i(x1))",
                "(i(x1),i(x2))"
            ]
        );
    }

    #[test]
    fn canonical_lists() {
        let nu = NuList::new(3, vec![Slot::ConjSource(3), Slot::Source(2)]).unwrap();
        assert_eq!(nu.to_string(), "(x1,i(x2))");
        assert!(NuList::new(3, vec![Slot::Source(4), Slot::Base]).is_err());
        assert!(NuList::new(3, vec![Slot::Base]).is_err());
    }

    #[test]
    fn phi_two() {
        let x = xi(2);
        let o = nu_orbits(2);
        assert_eq!(phi(&x, &o[0]).unwrap(), omega(&[("(1,2,0)", 1), ("(2,1,0)", -4), ("(1,1,1)", 1)]));
        assert_eq!(
            phi(&x, &o[1]).unwrap(),
            omega(&[("(0,3,0)", 1), ("(1,2,0)", -2), ("(2,1,0)", -2), ("(0,2,1)", 1)])
        );
        assert_eq!(
            phi(&x, &o[2]).unwrap(),
            omega(&[("(2,1,0)", -2), ("(1,1,1)", -2), ("(0,2,1)", 2)])
        );
        assert!(phi(&xi(3), &o[0]).is_err());
    }

    #[test]
    fn gamma_forms() {
        assert_eq!(
            gamma_omega(5).scale(&int(120)),
            omega(&[("(0,5,0)", 1), ("(1,4,0)", -5), ("(2,3,0)", 10), ("(3,2,0)", -10), ("(4,1,0)", 5)])
        );
        assert_eq!(gamma_omega(3).scale(&int(6)), omega(&[("(0,3,0)", 1), ("(1,2,0)", -3), ("(2,1,0)", 3)]));
        assert_eq!(gamma_omega(1), omega(&[("(0,1,0)", 1)]));
    }

    #[test]
    fn solve_two() {
        let DoubleCoverOutcome::Solution(sol) = solve_double_cover(2).unwrap() else {
            panic!("m=2 must be solvable");
        };
        assert_eq!(sol.lambdas, vec![frac(-1, 6), frac(1, 6), frac(-1, 12)]);
        assert_eq!(sol.integer_lambdas, vec![int(-2), int(2), int(-1)]);
        assert_eq!(sol.integer_scale, int(12));
        assert!(sol.nullspace.is_empty());
    }

    #[test]
    fn table_row_order() {
        let rows: Vec<String> = table_rows(5).iter().map(|k| k.to_string()).collect();
        assert_eq!(
            rows,
            [
                "(3,1,1)", "(2,2,1)", "(1,3,1)", "(1,2,2)", "(0,4,1)", "(0,3,2)", "(0,5,0)", "(1,4,0)", "(2,3,0)",
                "(3,2,0)", "(4,1,0)"
            ]
        );
    }
}
