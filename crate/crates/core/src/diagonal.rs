//! The modified diagonal `Gamma^m`, rewriting under the hypothesis `Gamma^m = 0`, and the
//! relation spans used by the fibration checks.

use std::collections::HashSet;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::cycles::span::{KeyedMembership, KeyedSpan};
use crate::cycles::{
    push_forward, subsets_of_size, Assignment, CycleError, FormalSum, MarkedClassKey, Marker, Subset,
    SubsetClassKey,
};
use crate::exact::binom::binom_q;
use crate::exact::rational::{sign_pow, Rational};

/// The standing assumption `Gamma^m(Y; b) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GammaHypothesis {
    pub m: usize,
    /// Auxiliary marker classes have positive codimension, so a marker multiplied into a
    /// basepoint coordinate vanishes.
    pub marker_codim_positive: bool,
}

impl GammaHypothesis {
    pub fn new(m: usize) -> Result<Self, CycleError> {
        if m < 2 {
            return Err(CycleError::OutOfRange(format!("hypothesis order {m} < 2")));
        }
        Ok(Self {
            m,
            marker_codim_positive: true,
        })
    }

    /// The strongest of several available hypotheses.
    pub fn strongest(orders: &[usize]) -> Result<Self, CycleError> {
        let m = orders
            .iter()
            .copied()
            .min()
            .ok_or_else(|| CycleError::OutOfRange("no hypothesis given".into()))?;
        Self::new(m)
    }
}

/// `sum_{I != {}} (-1)^{m-|I|} Delta_I` on `m` coordinates.
pub fn gamma(m: usize) -> FormalSum<SubsetClassKey> {
    let full = Subset::full(m);
    full.subsets()
        .filter(|i| !i.is_empty())
        .map(|i| {
            (
                SubsetClassKey { ambient: m, subset: i },
                sign_pow((m - i.len()) as i64),
            )
        })
        .collect()
}

/// `Gamma^m` multiplied by the pullback of a marker class from coordinate `p`. Terms where
/// `p` is a basepoint coordinate are dropped (positive codimension).
pub fn gamma_marked(m: usize, p: usize) -> FormalSum<MarkedClassKey> {
    assert!((1..=m).contains(&p));
    gamma(m)
        .iter()
        .filter(|(k, _)| k.subset.contains(p))
        .map(|(k, c)| (MarkedClassKey::marked(m, k.subset), c.clone()))
        .collect()
}

fn as_marked(v: &FormalSum<SubsetClassKey>) -> FormalSum<MarkedClassKey> {
    v.map_keys(|k| Some(MarkedClassKey::from(*k)))
}

/// Coefficient of `Delta_J` in the reduction of `Delta_I`.
pub fn reduction_coefficient(m: usize, i_len: usize, j_len: usize) -> Rational {
    sign_pow((m - 1 - j_len) as i64) * binom_q((i_len - j_len - 1) as i64, (i_len - m) as i64)
}

/// Rewrites `Delta_I` with `|I| >= m` as a combination of `Delta_J`, `J` inside `I`,
/// `1 <= |J| <= m-1`. Smaller subsets are returned unchanged.
pub fn reduce_subset_diagonal(
    subset: Subset,
    ambient: usize,
    hyp: &GammaHypothesis,
) -> FormalSum<SubsetClassKey> {
    let m = hyp.m;
    let q = subset.len();
    if q < m {
        return FormalSum::basis(SubsetClassKey { ambient, subset });
    }
    subset
        .subsets()
        .filter(|j| (1..m).contains(&j.len()))
        .map(|j| {
            (
                SubsetClassKey { ambient, subset: j },
                reduction_coefficient(m, q, j.len()),
            )
        })
        .collect()
}

/// The reduction of `Z_I` with the marker read at coordinate `p` of `I`: only terms whose
/// group still contains `p` keep the marker; the others put it on a basepoint slot.
pub fn reduce_marked_at(
    subset: Subset,
    ambient: usize,
    p: usize,
    hyp: &GammaHypothesis,
) -> FormalSum<MarkedClassKey> {
    assert!(subset.contains(p));
    let m = hyp.m;
    let q = subset.len();
    if q < m {
        return FormalSum::basis(MarkedClassKey::marked(ambient, subset));
    }
    let mut out = FormalSum::zero();
    for j in subset.subsets().filter(|j| (1..m).contains(&j.len())) {
        let c = reduction_coefficient(m, q, j.len());
        if j.contains(p) {
            out.add_term(MarkedClassKey::marked(ambient, j), c);
        } else if !hyp.marker_codim_positive {
            out.add_term(MarkedClassKey::on_base_slot(ambient, j), c);
        }
    }
    out
}

/// Closed form for the reduction of the small diagonal on `m + r` coordinates.
pub fn delsup_closed_form(m: usize, r: usize) -> FormalSum<SubsetClassKey> {
    let hyp = GammaHypothesis { m, marker_codim_positive: true };
    reduce_subset_diagonal(Subset::full(m + r), m + r, &hyp)
}

/// Reduction of the small diagonal on `m + r` coordinates computed by induction on `r`:
/// intersect with the diagonal of the last two coordinates, then rewrite every new
/// `m`-element group through a pushed-forward copy of `Gamma^m`.
pub fn delsup_oracle(m: usize, r: usize) -> FormalSum<SubsetClassKey> {
    assert!(m >= 2);
    let g = gamma(m);
    // r = 0: Gamma^m = 0 solved for the top term
    let top = SubsetClassKey { ambient: m, subset: Subset::full(m) };
    let mut cur = &FormalSum::basis(top) - &g;
    for n in m..m + r {
        let mut next = FormalSum::zero();
        for (k, c) in cur.iter() {
            let subset = if k.subset.contains(n) {
                k.subset.union(Subset::singleton(n + 1))
            } else {
                k.subset
            };
            next.add_term(SubsetClassKey { ambient: n + 1, subset }, c.clone());
        }
        let big: Vec<(SubsetClassKey, Rational)> = next
            .iter()
            .filter(|(k, _)| k.subset.len() >= m)
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        for (k, c) in big {
            debug_assert_eq!(k.subset.len(), m);
            let idx: Vec<usize> = (1..=n + 1)
                .map(|i| {
                    if k.subset.contains(i) {
                        k.subset.iter().position(|x| x == i).unwrap() + 1
                    } else {
                        0
                    }
                })
                .collect();
            let iota = Assignment::from_indices(m, &idx).expect("valid embedding");
            let relation = push_forward(&g, &iota).expect("sizes agree");
            // Delta_K = Delta_K - iota_* Gamma^m
            next.add_scaled(&relation, &-c);
        }
        cur = next;
    }
    cur
}

/// Keys that the hypothesis can rewrite.
pub trait Reducible: Ord + Clone + Sized {
    /// `None` when the key is already in normal form.
    fn reduce(&self, hyp: &GammaHypothesis) -> Option<FormalSum<Self>>;
}

impl Reducible for SubsetClassKey {
    fn reduce(&self, hyp: &GammaHypothesis) -> Option<FormalSum<Self>> {
        (self.subset.len() >= hyp.m).then(|| reduce_subset_diagonal(self.subset, self.ambient, hyp))
    }
}

impl Reducible for MarkedClassKey {
    fn reduce(&self, hyp: &GammaHypothesis) -> Option<FormalSum<Self>> {
        match self.marker {
            Marker::OnBaseSlot if hyp.marker_codim_positive => Some(FormalSum::zero()),
            Marker::OnBaseSlot | Marker::Collapsed => None,
            Marker::Absent => (self.subset.len() >= hyp.m).then(|| {
                as_marked(&reduce_subset_diagonal(self.subset, self.ambient, hyp))
            }),
            Marker::OnDiagonalGroup => (self.subset.len() >= hyp.m).then(|| {
                let p = self.subset.min().expect("nonempty group");
                reduce_marked_at(self.subset, self.ambient, p, hyp)
            }),
        }
    }
}

/// Canonical representative modulo the rewriting rules. A single pass suffices since every
/// reduction lands below the threshold.
pub fn normal_form<K: Reducible>(input: &FormalSum<K>, hyp: &GammaHypothesis) -> FormalSum<K> {
    input.map_linear(|k| k.reduce(hyp).unwrap_or_else(|| FormalSum::basis(k.clone())))
}

/// `c_l` by direct summation.
pub fn stability_coefficient(m: usize, s: usize, l: usize) -> Rational {
    let (m, s, l) = (m as i64, s as i64, l as i64);
    let mut acc = Rational::zero();
    for r in 0..=s {
        acc += sign_pow(m - l - 1 + s - r) * binom_q(m - l - 1 + r, m - l - 1) * binom_q(m + s - l, s - r);
    }
    acc + sign_pow(m + s - l)
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub m: usize,
    pub s: usize,
    pub normal_form_terms: usize,
    #[serde(serialize_with = "crate::exact::rational::serde_text::vector")]
    pub coefficients: Vec<Rational>,
    pub holds: bool,
}

/// Checks that `Gamma^{m+s}` normalizes to zero under `Gamma^m = 0`, and that every `c_l`
/// vanishes.
pub fn verify_stability(m: usize, s: usize) -> Result<StabilityReport, CycleError> {
    let hyp = GammaHypothesis::new(m)?;
    let nf = normal_form(&gamma(m + s), &hyp);
    let coefficients: Vec<Rational> = (1..m).map(|l| stability_coefficient(m, s, l)).collect();
    let holds = nf.is_zero() && coefficients.iter().all(|c| c.is_zero());
    Ok(StabilityReport {
        m,
        s,
        normal_form_terms: nf.len(),
        coefficients,
        holds,
    })
}

/// `Gamma^m` and its marked versions are invariant under permutations of the sources
/// (fixing the marker source), so only assignments whose sources first appear in increasing
/// order need to be pushed. Distinct skipped assignments reproduce a kept instance exactly.
fn first_use_is_increasing(a: &Assignment, fixed: Option<usize>) -> bool {
    let mut last = 0;
    let mut seen = Subset::EMPTY;
    for j in a.slots().iter().filter_map(|s| s.source()) {
        if Some(j) == fixed || seen.contains(j) {
            continue;
        }
        seen.insert(j);
        // the next unseen free source must be the smallest one left
        let expected = (last + 1..).find(|&x| Some(x) != fixed).expect("unbounded");
        if j != expected {
            return false;
        }
        last = j;
    }
    true
}

/// Pushforwards of `Gamma^m` (optionally times a marker at each coordinate `p`) along every
/// assignment `{1..N} -> {b, 1..m}` that hits every source. Marked instances may also drop
/// the marker source `p` itself, which projects the marker down. Dropping any other source
/// gives zero by cancellation, so those assignments are skipped, as are relabelings of the
/// sources. Zero and repeated instances are removed; the order is lexicographic in the
/// assignment, then in `p`.
pub fn gamma_relation_instances(
    m: usize,
    ambient: usize,
    marked: bool,
) -> Result<Vec<FormalSum<MarkedClassKey>>, CycleError> {
    if m < 1 || ambient < m {
        return Err(CycleError::OutOfRange(format!("need 1 <= m <= N, got m={m}, N={ambient}")));
    }
    let all = Subset::full(m);
    let plain = as_marked(&gamma(m));
    let marked_sources: Vec<FormalSum<MarkedClassKey>> =
        (1..=m).map(|p| gamma_marked(m, p)).collect();
    let assignments = Assignment::enumerate_plain(m, ambient);
    let per_assignment: Vec<Vec<FormalSum<MarkedClassKey>>> = assignments
        .par_iter()
        .map(|a| {
            let used = a.used_sources();
            let mut out = Vec::new();
            if marked {
                for p in 1..=m {
                    if all.difference(Subset::singleton(p)).is_subset_of(used)
                        && first_use_is_increasing(a, Some(p))
                    {
                        out.push(push_forward(&marked_sources[p - 1], a).expect("sizes agree"));
                    }
                }
            } else if used == all && first_use_is_increasing(a, None) {
                out.push(push_forward(&plain, a).expect("sizes agree"));
            }
            out
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in per_assignment.into_iter().flatten() {
        if !v.is_zero() && seen.insert(v.clone()) {
            out.push(v);
        }
    }
    Ok(out)
}

/// `sum_{I in {1..m-1}} (-1)^{|I|} Z_I` on `N` coordinates, with `Z_{}` the collapsed class.
pub fn sommalt_lhs(m: usize, ambient: usize) -> FormalSum<MarkedClassKey> {
    Subset::full(m - 1)
        .subsets()
        .map(|i| {
            let key = if i.is_empty() {
                MarkedClassKey::collapsed(ambient)
            } else {
                MarkedClassKey::marked(ambient, i)
            };
            (key, sign_pow(i.len() as i64))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SommaltReport {
    pub m: usize,
    pub ambient: usize,
    pub lhs: String,
    pub membership: KeyedMembership,
    /// The certificate uses the collapsed class `Z_{}`.
    pub uses_collapsed_class: bool,
}

/// Span membership of the marked alternating sum in the marked `Gamma^m` relations.
pub fn verify_sommalt(m: usize, ambient: usize) -> Result<SommaltReport, CycleError> {
    GammaHypothesis::new(m)?;
    if ambient < m {
        return Err(CycleError::OutOfRange(format!("ambient {ambient} < m = {m}")));
    }
    let lhs = sommalt_lhs(m, ambient);
    let gens = gamma_relation_instances(m, ambient, true)?;
    let mut span = KeyedSpan::new(&gens, lhs.keys().cloned())?;
    let membership = span.membership(&lhs)?;
    Ok(SommaltReport {
        m,
        ambient,
        lhs: lhs.to_string(),
        membership,
        uses_collapsed_class: !lhs.coeff(&MarkedClassKey::collapsed(ambient)).is_zero(),
    })
}

/// All `Delta_J` keys with `1 <= |J| <= k` on `n` coordinates.
pub fn low_diagonals(n: usize, k: usize) -> Vec<SubsetClassKey> {
    (1..=k.min(n))
        .flat_map(|j| subsets_of_size(n, j))
        .map(|subset| SubsetClassKey { ambient: n, subset })
        .collect()
}
