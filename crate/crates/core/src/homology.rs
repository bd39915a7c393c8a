//! Degree bookkeeping for the homological triviality of `Gamma^m`.
//!
//! Pairing `Gamma^m` with `alpha_1 x ... x alpha_m`, where the cohomology degrees sum to `2n`,
//! gives `(sum over l < m of (-1)^l C(s, l))` times an integral over `X`, with `s` the number of
//! degree-zero classes. The integral factors through the Albanese variety when more than `2d`
//! classes have degree one.

use rayon::prelude::*;
use serde::Serialize;

use crate::exact::binom::binom_q;
use crate::exact::rational::{sign_pow, Rational};
use crate::exact::KernelError;

/// `sum_{l=0}^{m-1} (-1)^l C(s, l)`.
pub fn integral_coefficient(m: usize, s: usize) -> Rational {
    (0..m as i64).map(|l| sign_pow(l) * binom_q(s as i64, l)).sum()
}

/// Cohomology degrees `(d_1, ..., d_m)` summing to `2n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct DegreeProfile(pub Vec<usize>);

impl DegreeProfile {
    /// Number of degree-zero entries.
    pub fn s(&self) -> usize {
        self.0.iter().filter(|&&d| d == 0).count()
    }

    /// Number of degree-one entries.
    pub fn t(&self) -> usize {
        self.0.iter().filter(|&&d| d == 1).count()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Every profile of length `m` with entries in `[0, 2n]` summing to `2n`, lexicographic.
pub fn enumerate_profiles(m: usize, n: usize) -> Vec<DegreeProfile> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<DegreeProfile>) {
        if slots == 0 {
            if left == 0 {
                out.push(DegreeProfile(cur.clone()));
            }
            return;
        }
        for d in 0..=left {
            cur.push(d);
            rec(left - d, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(2 * n, m, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Vanishing {
    /// Some class has degree zero and the alternating binomial sum is zero.
    BinomialCoefficient,
    /// More than `2d` classes of degree one: the integral factors through the Albanese.
    Albanese,
    /// Every class has degree at least one, at most `2d` of them degree one, and the least
    /// possible total degree exceeds `2n`.
    DegreeOverflow,
    /// No vanishing reason applies.
    PotentiallyNonzero,
}

/// Classification of all profiles sharing `(s, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeTrace {
    pub s: usize,
    pub t: usize,
    pub reason: Vanishing,
    /// A profile of this type, if one sums to `2n`.
    pub example: Option<DegreeProfile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionDecision {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub torsion: bool,
    pub trace: Vec<TypeTrace>,
    /// Explicit profile on which the pairing can be nonzero.
    pub witness_profile: Option<DegreeProfile>,
    pub witness_reason: Option<String>,
}

/// The cheapest profile with `s` zeros and `t` ones summing to `2n`, if any: the remaining
/// entries start at 2 and the excess goes to the last of them.
fn realize(m: usize, n: usize, s: usize, t: usize) -> Option<DegreeProfile> {
    let rest = m - s - t;
    let min_total = t + 2 * rest;
    let total = 2 * n;
    if min_total > total || (rest == 0 && min_total != total) {
        return None;
    }
    let mut v = vec![0; s];
    v.extend(std::iter::repeat_n(1, t));
    v.extend(std::iter::repeat_n(2, rest));
    if let Some(last) = v.last_mut() {
        *last += total - min_total;
    }
    Some(DegreeProfile(v))
}

fn classify_type(m: usize, n: usize, d: usize, s: usize, t: usize) -> Vanishing {
    if s > 0 && integral_coefficient(m, s) == Rational::from_integer(0.into()) {
        Vanishing::BinomialCoefficient
    } else if s == 0 && t > 2 * d {
        Vanishing::Albanese
    } else if s == 0 && t + 2 * (m - t) > 2 * n {
        Vanishing::DegreeOverflow
    } else {
        Vanishing::PotentiallyNonzero
    }
}

/// Reason attached to one concrete profile.
pub fn classify_profile(p: &DegreeProfile, n: usize, d: usize) -> Vanishing {
    classify_type(p.0.len(), n, d, p.s(), p.t())
}

/// Decides whether the case analysis forces every pairing to vanish.
pub fn torsion_decision(m: usize, n: usize, d: usize) -> Result<TorsionDecision, KernelError> {
    if n < 1 || d > n || m < 1 {
        return Err(KernelError::Precondition(format!(
            "need n >= 1, 0 <= d <= n, m >= 1 (got m={m}, n={n}, d={d})"
        )));
    }
    let trace: Vec<TypeTrace> = (0..=m)
        .flat_map(|s| (0..=m - s).map(move |t| (s, t)))
        .map(|(s, t)| TypeTrace {
            s,
            t,
            reason: classify_type(m, n, d, s, t),
            example: realize(m, n, s, t),
        })
        .collect();
    let torsion = trace
        .iter()
        .all(|tt| tt.reason != Vanishing::PotentiallyNonzero || tt.example.is_none());
    let (witness_profile, witness_reason) = if torsion {
        (None, None)
    } else if m <= n {
        // h on m-1 factors and the remaining power of h on the last.
        let mut v = vec![2; m - 1];
        v.push(2 * (n - m + 1));
        (
            Some(DegreeProfile(v)),
            Some("powers of an ample class: the hyperplane section has nonzero degree".to_string()),
        )
    } else {
        let e = m - n;
        let mut v = vec![1; 2 * e];
        v.extend(std::iter::repeat_n(2, m - 2 * e));
        (
            Some(DegreeProfile(v)),
            Some(format!("{} holomorphic one-forms and their conjugates, e = {e}", e)),
        )
    };
    Ok(TorsionDecision {
        m,
        n,
        d,
        torsion,
        trace,
        witness_profile,
        witness_reason,
    })
}

/// Cross-check by explicit enumeration: true iff every profile summing to `2n` vanishes.
pub fn torsion_by_enumeration(m: usize, n: usize, d: usize) -> bool {
    enumerate_profiles(m, n)
        .par_iter()
        .all(|p| classify_profile(p, n, d) != Vanishing::PotentiallyNonzero)
}
