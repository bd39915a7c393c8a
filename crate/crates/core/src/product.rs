//! Coefficient identities behind the product theorem: if `Gamma^m(X; a) = 0` and
//! `Gamma^n(Y; b) = 0` then `Gamma^{m+n-1}(X x Y; (a, b)) = 0`.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::cycles::{subsets_of_size, CycleError, FormalSum, Subset};
use crate::exact::binom::binom_i64;
use crate::exact::rational::{int, Rational};

/// Orders of the two hypotheses, `2 <= m <= n`, and `e = m + n - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProductContext {
    pub m: usize,
    pub n: usize,
    pub e: usize,
}

impl ProductContext {
    pub fn new(m: usize, n: usize) -> Result<Self, CycleError> {
        if m < 2 || m > n {
            return Err(CycleError::OutOfRange(format!("need 2 <= m <= n, got m={m}, n={n}")));
        }
        let e = m + n - 1;
        if e > crate::cycles::subset::MAX_AMBIENT {
            return Err(CycleError::OutOfRange(format!("e = {e} too large")));
        }
        Ok(Self { m, n, e })
    }

    /// Every context with `2 <= m <= n` and `m + n - 1 <= max_e`.
    pub fn all_up_to(max_e: usize) -> Vec<ProductContext> {
        let mut out = Vec::new();
        for m in 2..=max_e {
            for n in m..=max_e {
                if m + n - 1 <= max_e {
                    out.push(ProductContext::new(m, n).expect("in range"));
                }
            }
        }
        out
    }
}

/// `Delta_{J,K}` on `(X x Y)^e`: `J` is the diagonal group of the `X` coordinates, `K` of
/// the `Y` coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PairKey {
    pub ambient: usize,
    pub j: Subset,
    pub k: Subset,
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}x{}", self.j, self.k)
    }
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Terms of the expansion of `Delta_{I,I}`, as machine integers.
fn expansion_terms(i: Subset, ctx: &ProductContext) -> Vec<(Subset, Subset, i64)> {
    let (m, n) = (ctx.m as i64, ctx.n as i64);
    let q = i.len() as i64;
    let low = |bound: i64| -> Vec<Subset> {
        i.subsets()
            .filter(|s| !s.is_empty() && (s.len() as i64) < bound)
            .collect()
    };
    if q >= n {
        let js = low(m);
        let ks = low(n);
        let mut out = Vec::with_capacity(js.len() * ks.len());
        for &j in &js {
            let jl = j.len() as i64;
            let cj = binom_i64(q - jl - 1, m - jl - 1);
            for &k in &ks {
                let kl = k.len() as i64;
                let c = sign(m + n - jl - kl) * cj * binom_i64(q - kl - 1, n - kl - 1);
                if c != 0 {
                    out.push((j, k, c));
                }
            }
        }
        out
    } else if q >= m {
        low(m)
            .into_iter()
            .map(|j| {
                let jl = j.len() as i64;
                (j, i, sign(m - 1 - jl) * binom_i64(q - jl - 1, m - jl - 1))
            })
            .filter(|t| t.2 != 0)
            .collect()
    } else {
        vec![(i, i, 1)]
    }
}

/// `Delta_{I,I}` rewritten through the two hypotheses. Below both thresholds it is
/// returned unchanged.
pub fn expand_pair_diagonal(i: Subset, ctx: &ProductContext) -> FormalSum<PairKey> {
    assert!(!i.is_empty());
    expansion_terms(i, ctx)
        .into_iter()
        .map(|(j, k, c)| (PairKey { ambient: ctx.e, j, k }, int(c)))
        .collect()
}

/// Coefficient of `Delta_{J,K}` in `sum_{|I| = t} Delta_{I,I}` after expansion.
pub fn c_product(j: Subset, k: Subset, t: usize, ctx: &ProductContext) -> Rational {
    let target = PairKey { ambient: ctx.e, j, k };
    let union = j.union(k);
    let mut acc = Rational::from_integer(0.into());
    for i in subsets_of_size(ctx.e, t) {
        if union.is_subset_of(i) {
            acc += expand_pair_diagonal(i, ctx).coeff(&target);
        }
    }
    acc
}

fn closed_i64(jl: i64, kl: i64, ul: i64, t: i64, ctx: &ProductContext) -> i64 {
    let (m, n, e) = (ctx.m as i64, ctx.n as i64, ctx.e as i64);
    sign(m + n - jl - kl)
        * binom_i64(t - jl - 1, m - jl - 1)
        * binom_i64(t - kl - 1, n - kl - 1)
        * binom_i64(e - ul, t - ul)
}

/// The closed form, valid for `max(|J u K|, n) <= t <= e`.
pub fn c_product_closed(j: Subset, k: Subset, t: usize, ctx: &ProductContext) -> Result<Rational, CycleError> {
    let u = j.union(k).len();
    if t < u.max(ctx.n) || t > ctx.e {
        return Err(CycleError::OutOfRange(format!(
            "closed form needs max(|J u K|, n) <= t <= e, got t={t}"
        )));
    }
    Ok(int(closed_i64(j.len() as i64, k.len() as i64, u as i64, t as i64, ctx)))
}

/// All `c_{J,K}(t)` for one context, indexed by `t = 0..=e`, accumulated from the
/// expansions of every `Delta_{I,I}` in lexicographic subset order.
pub struct CoefficientTable {
    pub ctx: ProductContext,
    rows: HashMap<(Subset, Subset), Vec<i64>>,
}

impl CoefficientTable {
    pub fn build(ctx: &ProductContext) -> Self {
        let partial: Vec<HashMap<(Subset, Subset), Vec<i64>>> = (1..=ctx.e)
            .into_par_iter()
            .map(|t| {
                let mut rows: HashMap<(Subset, Subset), Vec<i64>> = HashMap::new();
                for i in subsets_of_size(ctx.e, t) {
                    for (j, k, c) in expansion_terms(i, ctx) {
                        let row = rows.entry((j, k)).or_insert_with(|| vec![0; ctx.e + 1]);
                        row[t] = row[t].checked_add(c).expect("coefficient overflow");
                    }
                }
                rows
            })
            .collect();
        let mut rows: HashMap<(Subset, Subset), Vec<i64>> = HashMap::new();
        for part in partial {
            for (key, v) in part {
                let row = rows.entry(key).or_insert_with(|| vec![0; ctx.e + 1]);
                for (a, b) in row.iter_mut().zip(v) {
                    *a += b;
                }
            }
        }
        Self { ctx: *ctx, rows }
    }

    pub fn get(&self, j: Subset, k: Subset, t: usize) -> Rational {
        int(self.rows.get(&(j, k)).map_or(0, |r| r[t]))
    }

    fn row(&self, j: Subset, k: Subset) -> Option<&[i64]> {
        self.rows.get(&(j, k)).map(|r| r.as_slice())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KunnethRow {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "J")]
    pub j: Subset,
    #[serde(rename = "K")]
    pub k: Subset,
    #[serde(serialize_with = "crate::exact::rational::serde_text::rational")]
    pub sum: Rational,
    pub status: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct KunnethReport {
    pub m: usize,
    pub n: usize,
    pub e: usize,
    pub pairs_checked: usize,
    pub closed_form_checks: usize,
    /// Rows whose alternating sum is nonzero.
    pub failures: Vec<KunnethRow>,
    pub closed_form_mismatches: Vec<KunnethRow>,
    pub boundary_mismatches: Vec<KunnethRow>,
    pub below_union_nonzero: usize,
    pub holds: bool,
}

/// Checks `sum_t (-1)^t c_{J,K}(t) = 0` for every admissible pair, the closed form on its
/// range, vanishing below `|J u K|`, and the boundary value at `t = |K|` when `J` is inside
/// `K` and `m <= |K| < n`.
pub fn verify_kunneth(ctx: &ProductContext) -> KunnethReport {
    let table = CoefficientTable::build(ctx);
    let (m, n, e) = (ctx.m, ctx.n, ctx.e);
    let js: Vec<Subset> = (1..m).flat_map(|s| subsets_of_size(e, s)).collect();
    let ks: Vec<Subset> = (1..n).flat_map(|s| subsets_of_size(e, s)).collect();
    let zero_row = vec![0i64; e + 1];

    struct Outcome {
        failure: Option<KunnethRow>,
        closed: Option<KunnethRow>,
        boundary: Option<KunnethRow>,
        closed_checks: usize,
        below_union: usize,
    }

    let outcomes: Vec<Outcome> = js
        .par_iter()
        .flat_map_iter(|&j| ks.iter().map(move |&k| (j, k)))
        .map(|(j, k)| {
            let row = table.row(j, k).unwrap_or(&zero_row);
            let mk = |sum: i64, status| KunnethRow {
                m,
                n,
                j,
                k,
                sum: int(sum),
                status,
            };
            let sum: i64 = (1..=e).map(|t| sign(t as i64) * row[t]).sum();
            let u = j.union(k).len();
            let below_union = (1..u.min(e + 1)).filter(|&t| row[t] != 0).count();
            let mut closed = None;
            let mut closed_checks = 0;
            for t in u.max(n)..=e {
                closed_checks += 1;
                let c = closed_i64(j.len() as i64, k.len() as i64, u as i64, t as i64, ctx);
                if c != row[t] && closed.is_none() {
                    closed = Some(mk(row[t] - c, "closed_form_mismatch"));
                }
            }
            let mut boundary = None;
            let kl = k.len();
            if j.is_subset_of(k) && m <= kl && kl < n {
                let jl = j.len() as i64;
                let want = sign(m as i64 - 1 - jl) * binom_i64(kl as i64 - jl - 1, m as i64 - jl - 1);
                if row[kl] != want {
                    boundary = Some(mk(row[kl] - want, "boundary_mismatch"));
                }
            }
            Outcome {
                failure: (sum != 0).then(|| mk(sum, "nonzero")),
                closed,
                boundary,
                closed_checks,
                below_union,
            }
        })
        .collect();

    let pairs_checked = outcomes.len();
    let mut report = KunnethReport {
        m,
        n,
        e,
        pairs_checked,
        closed_form_checks: 0,
        failures: Vec::new(),
        closed_form_mismatches: Vec::new(),
        boundary_mismatches: Vec::new(),
        below_union_nonzero: 0,
        holds: false,
    };
    for o in outcomes {
        report.closed_form_checks += o.closed_checks;
        report.below_union_nonzero += o.below_union;
        report.failures.extend(o.failure);
        report.closed_form_mismatches.extend(o.closed);
        report.boundary_mismatches.extend(o.boundary);
    }
    report.holds = report.failures.is_empty()
        && report.closed_form_mismatches.is_empty()
        && report.boundary_mismatches.is_empty()
        && report.below_union_nonzero == 0;
    report
}
