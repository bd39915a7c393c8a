//! Coefficient identities behind the blow-up theorem.
//!
//! `P_n(e)` is the set of `(n+1)`-tuples with entries in `[0, e-1]` summing to
//! `n(e-1) - 1`; `T(K)` is the set of positions where `K` reaches `e - 1`.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cycles::{subsets_of_size, CycleError, Subset};
use crate::exact::binom::binom_i64;
use crate::exact::rational::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupContext {
    pub n: usize,
    pub e: usize,
}

impl BlowupContext {
    pub fn new(n: usize, e: usize) -> Result<Self, CycleError> {
        if e < 2 || e + 1 > n {
            return Err(CycleError::OutOfRange(format!("need 2 <= e <= n-1, got n={n}, e={e}")));
        }
        if n + 1 > crate::cycles::subset::MAX_AMBIENT {
            return Err(CycleError::OutOfRange(format!("n = {n} too large")));
        }
        Ok(Self { n, e })
    }

    /// `d(t) = (t-1)(e-1) - 1` at `t = n + 1`.
    pub fn weight(&self) -> usize {
        self.n * (self.e - 1) - 1
    }

    /// Every context with `2 <= e <= n - 1 <= max_n_minus_1`.
    pub fn all_up_to(max_n_minus_1: usize) -> Vec<BlowupContext> {
        let mut out = Vec::new();
        for n in 3..=max_n_minus_1 + 1 {
            for e in 2..n {
                out.push(BlowupContext { n, e });
            }
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ChernMultiIndex(pub Vec<usize>);

impl ChernMultiIndex {
    /// Positions (1-based) where the entry equals `e - 1`.
    pub fn top(&self, e: usize) -> Subset {
        let mut t = Subset::EMPTY;
        for (i, &k) in self.0.iter().enumerate() {
            if k == e - 1 {
                t.insert(i + 1);
            }
        }
        t
    }
}

impl fmt::Display for ChernMultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for ChernMultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(&self.0)
    }
}

/// `P_n(e)` in lexicographic order.
pub fn enumerate_p(ctx: &BlowupContext) -> Vec<ChernMultiIndex> {
    fn rec(pos: usize, left: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<ChernMultiIndex>) {
        let slots = cur.capacity() - pos;
        if slots == 0 {
            if left == 0 {
                out.push(ChernMultiIndex(cur.clone()));
            }
            return;
        }
        for k in 0..=cap.min(left) {
            if left - k > cap * (slots - 1) {
                continue;
            }
            cur.push(k);
            rec(pos + 1, left - k, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(ctx.n + 1);
    rec(0, ctx.weight(), ctx.e - 1, &mut cur, &mut out);
    out
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn closed_i64(jl: i64, top_out: i64, t: i64, ctx: &BlowupContext) -> i64 {
    let (n, e) = (ctx.n as i64, ctx.e as i64);
    sign(n - jl - e) * binom_i64(t - jl - 1, n - jl - e) * binom_i64(top_out, n + 1 - t)
}

fn check_args(j: Subset, t: usize, ctx: &BlowupContext) -> Result<(), CycleError> {
    if j.is_empty() || j.len() > ctx.n - ctx.e || !j.is_subset_of(Subset::full(ctx.n + 1)) {
        return Err(CycleError::OutOfRange(format!("J = {j} not admissible")));
    }
    if t > ctx.n + 1 {
        return Err(CycleError::OutOfRange(format!("t = {t} > n + 1")));
    }
    Ok(())
}

/// `(-1)^{n-|J|-e} C(t-|J|-1, n-|J|-e) C(|T(K) \ J|, n+1-t)`.
pub fn c_blowup_closed(j: Subset, k: &ChernMultiIndex, t: usize, ctx: &BlowupContext) -> Result<Rational, CycleError> {
    check_args(j, t, ctx)?;
    let top_out = k.top(ctx.e).difference(j).len() as i64;
    Ok(int(closed_i64(j.len() as i64, top_out, t as i64, ctx)))
}

/// Which of the two regimes of the proof covers level `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `t <= n - e`: only `I = J` contributes.
    Low,
    /// `t >= n + 1 - e`: count the subsets `I` of size `t` with complement in `T(K) \ J`.
    High,
}

pub fn regimes(t: usize, ctx: &BlowupContext) -> Vec<Regime> {
    let mut r = Vec::new();
    if t <= ctx.n - ctx.e {
        r.push(Regime::Low);
    }
    if t + ctx.e > ctx.n {
        r.push(Regime::High);
    }
    r
}

fn brute_i64(j: Subset, top: Subset, t: usize, ctx: &BlowupContext) -> i64 {
    let (n, e) = (ctx.n, ctx.e);
    let jc = j.complement(n + 1);
    match regimes(t, ctx)[..] {
        [Regime::Low] => i64::from(j.len() == t && jc.is_subset_of(top)),
        [Regime::High] => {
            // complements B of I, |B| = n + 1 - t, B inside T(K) and disjoint from J
            let allowed = top.difference(j);
            let count = subsets_of_size(n + 1, n + 1 - t)
                .into_iter()
                .filter(|b| b.is_subset_of(allowed))
                .count() as i64;
            let jl = j.len() as i64;
            let (n, e, t) = (n as i64, e as i64, t as i64);
            sign(n - e - jl) * binom_i64(t - jl - 1, t - n - 1 + e) * count
        }
        _ => unreachable!("the two regimes partition 0..=n+1"),
    }
}

/// The coefficient by direct counting, regime by regime.
pub fn c_blowup_brute(j: Subset, k: &ChernMultiIndex, t: usize, ctx: &BlowupContext) -> Result<Rational, CycleError> {
    check_args(j, t, ctx)?;
    Ok(int(brute_i64(j, k.top(ctx.e), t, ctx)))
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupRow {
    pub n: usize,
    pub e: usize,
    #[serde(rename = "J")]
    pub j: Subset,
    #[serde(rename = "K")]
    pub k: ChernMultiIndex,
    #[serde(serialize_with = "crate::exact::rational::serde_text::rational")]
    pub alternating_sum: Rational,
    pub closed_vs_brute: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupReport {
    pub n: usize,
    pub e: usize,
    pub multi_indices: usize,
    pub pairs_checked: usize,
    pub regimes_exhaustive: bool,
    pub top_bound_holds: bool,
    pub degree_bound_holds: bool,
    /// Rows with a nonzero alternating sum or a closed/brute disagreement.
    pub failures: Vec<BlowupRow>,
    pub holds: bool,
}

/// Exhaustive check over all admissible `(J, K)`.
pub fn verify_blowup(ctx: &BlowupContext) -> BlowupReport {
    let (n, e) = (ctx.n, ctx.e);
    let ps = enumerate_p(ctx);
    let regimes_exhaustive = (0..=n + 1).all(|t| regimes(t, ctx).len() == 1);
    let top_bound_holds = ps.iter().all(|k| k.top(e).len() + e > n);
    let js: Vec<Subset> = (1..=n - e).flat_map(|s| subsets_of_size(n + 1, s)).collect();

    let rows: Vec<(bool, Option<BlowupRow>)> = ps
        .par_iter()
        .flat_map_iter(|k| js.iter().map(move |&j| (j, k)))
        .map(|(j, k)| {
            let top = k.top(e);
            let top_out = top.difference(j).len() as i64;
            let jl = j.len() as i64;
            // p(x) = C(n-|J|-x, n-|J|-e) has degree n-|J|-e, below |T(K) \ J|
            let degree_ok = top_out > (n - e) as i64 - jl;
            let mut sum = 0i64;
            let mut agree = true;
            for t in 0..=n + 1 {
                let c = closed_i64(jl, top_out, t as i64, ctx);
                sum += sign(t as i64) * c;
                if regimes_exhaustive && c != brute_i64(j, top, t, ctx) {
                    agree = false;
                }
            }
            let row = (sum != 0 || !agree).then(|| BlowupRow {
                n,
                e,
                j,
                k: k.clone(),
                alternating_sum: int(sum),
                closed_vs_brute: if agree { "agree" } else { "disagree" },
            });
            (degree_ok, row)
        })
        .collect();

    let pairs_checked = rows.len();
    let degree_bound_holds = rows.iter().all(|(d, _)| *d);
    let failures: Vec<BlowupRow> = rows.into_iter().filter_map(|(_, r)| r).collect();
    let holds = regimes_exhaustive && top_bound_holds && degree_bound_holds && failures.is_empty();
    BlowupReport {
        n,
        e,
        multi_indices: ps.len(),
        pairs_checked,
        regimes_exhaustive,
        top_bound_holds,
        degree_bound_holds,
        failures,
        holds,
    }
}
