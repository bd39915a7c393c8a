//! Projective-bundle coefficients: the universal polynomials `P_E` in the Chern classes of
//! the bundle, and the vanishing checks for `P^r`-fibrations over curves and surfaces.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cycles::span::{KeyedMembership, KeyedSpan};
use crate::cycles::{CycleError, FormalSum, MarkedClassKey, Subset, SubsetClassKey};
use crate::diagonal::{gamma_relation_instances, normal_form, GammaHypothesis};
use crate::exact::rational::{format_rational, frac, int, sign_pow, Rational};

/// Exponent vector of `c_1^{a_1} c_2^{a_2} ...`, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn c(i: usize) -> Self {
        assert!(i >= 1);
        let mut v = vec![0; i];
        v[i - 1] = 1;
        Monomial(v)
    }

    pub fn from_exponents(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    /// Weighted degree, `deg c_i = i`.
    pub fn degree(&self) -> usize {
        self.0.iter().enumerate().map(|(i, a)| (i + 1) * *a as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        let v = (0..len)
            .map(|i| self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0))
            .collect();
        Monomial(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, a)| **a > 0)
            .map(|(i, a)| if *a == 1 { format!("c{}", i + 1) } else { format!("c{}^{a}", i + 1) })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Polynomial in the Chern classes of a rank `r + 1` bundle on a base of dimension `cap`.
/// Monomials of degree above `cap` vanish, as do `c_i` with `i > r + 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChernPolynomial {
    cap: usize,
    terms: FormalSum<Monomial>,
}

impl ChernPolynomial {
    pub fn zero(cap: usize) -> Self {
        Self { cap, terms: FormalSum::zero() }
    }

    pub fn constant(cap: usize, c: Rational) -> Self {
        Self::monomial(cap, Monomial::one(), c)
    }

    pub fn monomial(cap: usize, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(cap);
        if m.degree() <= cap {
            p.terms.add_term(m, c);
        }
        p
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.coeff(m)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn add_scaled(&mut self, other: &ChernPolynomial, c: &Rational) {
        self.terms.add_scaled(&other.terms, c);
    }

    pub fn mul(&self, other: &ChernPolynomial) -> ChernPolynomial {
        let mut out = ChernPolynomial::zero(self.cap.min(other.cap));
        for (a, x) in self.terms.iter() {
            for (b, y) in other.terms.iter() {
                let m = a.mul(b);
                if m.degree() <= out.cap {
                    out.terms.add_term(m, x * y);
                }
            }
        }
        out
    }
}

impl fmt::Display for ChernPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("{} * {}", format_rational(c), m))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for ChernPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// How Segre classes are expressed through Chern classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegreConvention {
    /// `s = c^{-1}`, so `s_1 = -c_1`.
    InverseChern,
    /// `s_i` of the dual bundle: `s_1 = c_1`.
    InverseDualChern,
}

/// `s_0, ..., s_cap` for a bundle of rank `r + 1`.
pub fn segre_classes(r: usize, cap: usize, conv: SegreConvention) -> Vec<ChernPolynomial> {
    let c = |i: usize| {
        if i == 0 {
            ChernPolynomial::constant(cap, int(1))
        } else if i <= r + 1 {
            ChernPolynomial::monomial(cap, Monomial::c(i), int(1))
        } else {
            ChernPolynomial::zero(cap)
        }
    };
    let mut s = vec![ChernPolynomial::constant(cap, int(1))];
    for k in 1..=cap {
        let mut sk = ChernPolynomial::zero(cap);
        for i in 1..=k {
            sk.add_scaled(&c(i).mul(&s[k - i]), &int(-1));
        }
        s.push(sk);
    }
    if conv == SegreConvention::InverseDualChern {
        for (k, sk) in s.iter_mut().enumerate() {
            *sk = sk.mul(&ChernPolynomial::constant(cap, sign_pow(k as i64)));
        }
    }
    s
}

/// `E = (e_1, ..., e_N)` with `0 <= e_i <= r`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BundleMultiIndex(pub Vec<usize>);

impl BundleMultiIndex {
    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn dual(&self, r: usize) -> BundleMultiIndex {
        BundleMultiIndex(self.0.iter().map(|e| r - e).collect())
    }

    /// `#{i : e_i + p <= r}`.
    pub fn lambda(&self, p: usize, r: usize) -> usize {
        self.0.iter().filter(|&&e| e + p <= r).count()
    }

    /// Positions (1-based) where `e_i = r`.
    pub fn top(&self, r: usize) -> Subset {
        let mut t = Subset::EMPTY;
        for (i, &e) in self.0.iter().enumerate() {
            if e == r {
                t.insert(i + 1);
            }
        }
        t
    }

    /// Every index of length `n` with entries in `[0, r]`, lexicographic.
    pub fn all(n: usize, r: usize) -> Vec<BundleMultiIndex> {
        Self::with_weight(n, r, None)
    }

    /// Those of total weight `w` (all if `None`).
    pub fn with_weight(n: usize, r: usize, w: Option<usize>) -> Vec<BundleMultiIndex> {
        fn rec(n: usize, r: usize, w: Option<usize>, cur: &mut Vec<usize>, sum: usize, out: &mut Vec<BundleMultiIndex>) {
            if cur.len() == n {
                if w.is_none_or(|w| w == sum) {
                    out.push(BundleMultiIndex(cur.clone()));
                }
                return;
            }
            let left = n - cur.len() - 1;
            for e in 0..=r {
                if let Some(w) = w {
                    if sum + e > w || sum + e + left * r < w {
                        continue;
                    }
                }
                cur.push(e);
                rec(n, r, w, cur, sum + e, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, r, w, &mut Vec::with_capacity(n), 0, &mut out);
        out
    }
}

impl fmt::Display for BundleMultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for BundleMultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `P_E` for every `E` of length `n`, computed by descending `|E|`:
/// `P_E = s_{|E^v| - r} - sum_{|H| > |E|} P_H prod_i s_{h_i - e_i}`.
pub fn w_coefficients(
    n: usize,
    r: usize,
    dim_y: usize,
    conv: SegreConvention,
) -> BTreeMap<BundleMultiIndex, ChernPolynomial> {
    assert!(n >= 2 && r >= 1);
    let seg = segre_classes(r, dim_y, conv);
    let s = |k: i64| -> ChernPolynomial {
        if k < 0 || k as usize > dim_y {
            ChernPolynomial::zero(dim_y)
        } else {
            seg[k as usize].clone()
        }
    };
    let mut out: BTreeMap<BundleMultiIndex, ChernPolynomial> = BTreeMap::new();
    for w in (0..=r * n).rev() {
        let level = BundleMultiIndex::with_weight(n, r, Some(w));
        let computed: Vec<(BundleMultiIndex, ChernPolynomial)> = level
            .par_iter()
            .map(|e| {
                let mut p = s(e.dual(r).weight() as i64 - r as i64);
                for (h, ph) in out.iter() {
                    if h.weight() <= w || ph.is_zero() || h.0.iter().zip(&e.0).any(|(a, b)| a < b) {
                        continue;
                    }
                    let mut term = ph.clone();
                    for (a, b) in h.0.iter().zip(&e.0) {
                        term = term.mul(&s((a - b) as i64));
                    }
                    p.add_scaled(&term, &int(-1));
                }
                (e.clone(), p)
            })
            .collect();
        out.extend(computed);
    }
    out
}

/// The closed forms for `P_E` when `|E| >= r(n-1) - 2`; `None` below that range.
pub fn closed_form_coefficient(e: &BundleMultiIndex, n: usize, r: usize, dim_y: usize) -> Option<ChernPolynomial> {
    let top = r * (n - 1);
    let w = e.weight();
    if w > top {
        return Some(ChernPolynomial::zero(dim_y));
    }
    let l1 = int(e.lambda(1, r) as i64);
    let l2 = int(e.lambda(2, r) as i64);
    match top - w {
        0 => Some(ChernPolynomial::constant(dim_y, int(1))),
        1 => Some(ChernPolynomial::monomial(dim_y, Monomial::c(1), &l1 - int(1))),
        2 => {
            let mut p = ChernPolynomial::monomial(
                dim_y,
                Monomial::from_exponents(vec![2]),
                frac(1, 2) * (&l1 - int(1)) * (&l1 - int(2)),
            );
            p.add_scaled(&ChernPolynomial::monomial(dim_y, Monomial::c(2), int(1)), &(l2 - int(1)));
            Some(p)
        }
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormMismatch {
    pub e: BundleMultiIndex,
    pub computed: ChernPolynomial,
    pub expected: ChernPolynomial,
}

#[derive(Clone, Debug, Serialize)]
pub struct BundleReport {
    pub n: usize,
    pub r: usize,
    pub dim_y: usize,
    pub convention: SegreConvention,
    pub indices: usize,
    pub closed_form_checks: usize,
    pub mismatches: Vec<ClosedFormMismatch>,
    /// Levels where substituting `P_H` back into the defining identity fails.
    pub recursion_residuals: usize,
    pub holds: bool,
}

/// Recomputes the defining identity `sum_H P_H prod s_{h_i - e_i} = s_{|E^v| - r}` for
/// every `E`.
fn residuals(table: &BTreeMap<BundleMultiIndex, ChernPolynomial>, r: usize, dim_y: usize, conv: SegreConvention) -> usize {
    let seg = segre_classes(r, dim_y, conv);
    let s = |k: i64| {
        if k < 0 || k as usize > dim_y {
            ChernPolynomial::zero(dim_y)
        } else {
            seg[k as usize].clone()
        }
    };
    table
        .keys()
        .filter(|e| {
            let mut lhs = ChernPolynomial::zero(dim_y);
            for (h, ph) in table {
                if h.0.iter().zip(&e.0).any(|(a, b)| a < b) {
                    continue;
                }
                let mut term = ph.clone();
                for (a, b) in h.0.iter().zip(&e.0) {
                    term = term.mul(&s((a - b) as i64));
                }
                lhs.add_scaled(&term, &int(1));
            }
            lhs != s(e.dual(r).weight() as i64 - r as i64)
        })
        .count()
}

pub fn verify_bundle_coefficients(n: usize, r: usize, dim_y: usize, conv: SegreConvention) -> BundleReport {
    let table = w_coefficients(n, r, dim_y, conv);
    let mut mismatches = Vec::new();
    let mut checks = 0;
    for (e, p) in &table {
        if let Some(want) = closed_form_coefficient(e, n, r, dim_y) {
            checks += 1;
            if *p != want {
                mismatches.push(ClosedFormMismatch {
                    e: e.clone(),
                    computed: p.clone(),
                    expected: want,
                });
            }
        }
    }
    let recursion_residuals = residuals(&table, r, dim_y, conv);
    BundleReport {
        n,
        r,
        dim_y,
        convention: conv,
        indices: table.len(),
        closed_form_checks: checks,
        holds: mismatches.is_empty() && recursion_residuals == 0,
        mismatches,
        recursion_residuals,
    }
}

/// The Segre convention under which the recursion reproduces the closed forms on every
/// `(n, r, dim_y)` in the given ranges, if exactly one does.
pub fn select_segre_convention(max_n: usize, max_r: usize, max_dim_y: usize) -> Option<SegreConvention> {
    let ok = |conv| {
        (2..=max_n).all(|n| {
            (1..=max_r).all(|r| (0..=max_dim_y).all(|d| verify_bundle_coefficients(n, r, d, conv).holds))
        })
    };
    let good: Vec<SegreConvention> = [SegreConvention::InverseChern, SegreConvention::InverseDualChern]
        .into_iter()
        .filter(|c| ok(*c))
        .collect();
    (good.len() == 1).then(|| good[0])
}

#[derive(Clone, Debug, Serialize)]
pub struct TopBoundReport {
    pub m: usize,
    pub r: usize,
    pub defect: usize,
    pub multi_indices: usize,
    pub min_top: Option<usize>,
    pub bound: usize,
    pub bound_holds: bool,
    /// `|Top H| = m - defect` exactly when every entry is `r - 1` or `r` and `r + defect`
    /// entries equal `r - 1`.
    pub equality_characterization_holds: bool,
}

/// Multi-indices of length `m + r`, entries at most `r`, weight `r(m + r - 1) - defect`.
pub fn defect_indices(m: usize, r: usize, defect: usize) -> Vec<BundleMultiIndex> {
    let top = r * (m + r - 1);
    if defect > top {
        return Vec::new();
    }
    BundleMultiIndex::with_weight(m + r, r, Some(top - defect))
}

pub fn top_bound_check(m: usize, r: usize, defect: usize) -> TopBoundReport {
    let hs = defect_indices(m, r, defect);
    let bound = m.saturating_sub(defect);
    let mut min_top = None;
    let mut bound_holds = true;
    let mut eq_holds = true;
    for h in &hs {
        let t = h.top(r).len();
        min_top = Some(min_top.map_or(t, |x: usize| x.min(t)));
        if t < bound {
            bound_holds = false;
        }
        let near = h.0.iter().all(|&x| x + 1 >= r);
        let count = h.0.iter().filter(|&&x| x + 1 == r).count();
        let shape = near && count == r + defect;
        if (t == bound) != shape {
            eq_holds = false;
        }
    }
    TopBoundReport {
        m,
        r,
        defect,
        multi_indices: hs.len(),
        min_top,
        bound,
        bound_holds,
        equality_characterization_holds: eq_holds,
    }
}

/// `sum_{I^c in Top H} (-1)^{N - |I|} Z_I` on `N` coordinates, `Z_{}` being the collapsed
/// class.
pub fn marked_top_vector(top: Subset, n: usize) -> FormalSum<MarkedClassKey> {
    let full = Subset::full(n);
    top.subsets()
        .map(|b| {
            let i = full.difference(b);
            let key = if i.is_empty() {
                MarkedClassKey::collapsed(n)
            } else {
                MarkedClassKey::marked(n, i)
            };
            (key, sign_pow(b.len() as i64))
        })
        .collect()
}

/// The same alternating sum with plain diagonals.
pub fn plain_top_vector(top: Subset, n: usize) -> FormalSum<SubsetClassKey> {
    let full = Subset::full(n);
    top.subsets()
        .filter(|b| *b != full)
        .map(|b| (SubsetClassKey { ambient: n, subset: full.difference(b) }, sign_pow(b.len() as i64)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TopMembership {
    pub top: Subset,
    pub example: BundleMultiIndex,
    pub membership: KeyedMembership,
}

#[derive(Clone, Debug, Serialize)]
pub struct FibrationReport {
    pub m: usize,
    pub r: usize,
    pub ambient: usize,
    pub case: FibrationCase,
    pub hypothesis_order: usize,
    pub relation_generators: usize,
    pub checked: Vec<TopMembership>,
    /// Defect-0 leading terms whose normal form is nonzero.
    pub leading_term_failures: Vec<BundleMultiIndex>,
    /// Point-multiple case: defect-2 indices with a nonzero signed coefficient sum.
    pub scalar_failures: Vec<BundleMultiIndex>,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FibrationCase {
    Curve,
    SurfaceGammaMMinus1,
    SurfacePointMultiple,
}

/// Only bases of dimension one and two are handled: above that, the remainder terms with
/// `|H| < r(N - 1) - 2` no longer vanish for degree reasons.
pub fn check_base_dimension(dim_y: usize) -> Result<(), CycleError> {
    if dim_y > 2 {
        return Err(CycleError::OutOfRange(format!(
            "base dimension {dim_y} > 2: higher Chern monomials survive and the remainder is not controlled"
        )));
    }
    Ok(())
}

fn membership_by_top(
    m_rel: usize,
    n: usize,
    hs: &[BundleMultiIndex],
    r: usize,
) -> Result<(usize, Vec<TopMembership>), CycleError> {
    let mut by_top: BTreeMap<Subset, BundleMultiIndex> = BTreeMap::new();
    for h in hs {
        by_top.entry(h.top(r)).or_insert_with(|| h.clone());
    }
    let gens = gamma_relation_instances(m_rel, n, true)?;
    let targets: Vec<(Subset, FormalSum<MarkedClassKey>)> =
        by_top.keys().map(|t| (*t, marked_top_vector(*t, n))).collect();
    let mut span = KeyedSpan::new(&gens, targets.iter().flat_map(|(_, v)| v.keys().cloned().collect::<Vec<_>>()))?;
    let mut out = Vec::new();
    for (top, v) in targets {
        out.push(TopMembership {
            top,
            example: by_top[&top].clone(),
            membership: span.membership(&v)?,
        });
    }
    Ok((gens.len(), out))
}

fn leading_term_failures(m: usize, r: usize) -> Result<Vec<BundleMultiIndex>, CycleError> {
    let n = m + r;
    let hyp = GammaHypothesis::new(m)?;
    Ok(defect_indices(m, r, 0)
        .into_iter()
        .filter(|h| !normal_form(&plain_top_vector(h.top(r), n), &hyp).is_zero())
        .collect())
}

/// Every defect-1 vector lies in the span of the marked `Gamma^m` relations on `m + r`
/// coordinates, and the defect-0 leading terms vanish under `Gamma^m = 0`.
pub fn verify_fibration_curve(m: usize, r: usize) -> Result<FibrationReport, CycleError> {
    GammaHypothesis::new(m)?;
    if r < 1 {
        return Err(CycleError::OutOfRange("fiber dimension must be positive".into()));
    }
    let n = m + r;
    let (generators, checked) = membership_by_top(m, n, &defect_indices(m, r, 1), r)?;
    let leading = leading_term_failures(m, r)?;
    let holds = leading.is_empty() && checked.iter().all(|c| c.membership.is_solution());
    Ok(FibrationReport {
        m,
        r,
        ambient: n,
        case: FibrationCase::Curve,
        hypothesis_order: m,
        relation_generators: generators,
        checked,
        leading_term_failures: leading,
        scalar_failures: Vec::new(),
        holds,
    })
}

/// Surface base. With `Gamma^{m-1} = 0` the defect-1 and defect-2 vectors must lie in the
/// marked `Gamma^{m-1}` relation span; when the second Chern monomials are multiples of the
/// point class only the signed coefficient sums matter.
pub fn verify_fibration_surface(m: usize, r: usize, case: FibrationCase) -> Result<FibrationReport, CycleError> {
    if m < 3 {
        return Err(CycleError::OutOfRange(format!("surface case needs m >= 3, got {m}")));
    }
    if r < 1 {
        return Err(CycleError::OutOfRange("fiber dimension must be positive".into()));
    }
    let n = m + r;
    let defect2 = defect_indices(m, r, 2);
    let leading = leading_term_failures(m, r)?;
    let (hypothesis_order, generators, checked, scalar_failures) = match case {
        FibrationCase::SurfaceGammaMMinus1 => {
            GammaHypothesis::new(m - 1)?;
            let mut hs = defect_indices(m, r, 1);
            hs.extend(defect2.iter().cloned());
            let (g, checked) = membership_by_top(m - 1, n, &hs, r)?;
            (m - 1, g, checked, Vec::new())
        }
        FibrationCase::SurfacePointMultiple => {
            let failures: Vec<BundleMultiIndex> = defect2
                .iter()
                .filter(|h| {
                    let s: Rational = h
                        .top(r)
                        .subsets()
                        .map(|b| sign_pow(b.len() as i64))
                        .fold(Rational::zero(), |a, x| a + x);
                    !s.is_zero()
                })
                .cloned()
                .collect();
            (m, 0, Vec::new(), failures)
        }
        FibrationCase::Curve => return verify_fibration_curve(m, r),
    };
    let holds = leading.is_empty()
        && scalar_failures.is_empty()
        && checked.iter().all(|c| c.membership.is_solution());
    Ok(FibrationReport {
        m,
        r,
        ambient: n,
        case,
        hypothesis_order,
        relation_generators: generators,
        checked,
        leading_term_failures: leading,
        scalar_failures,
        holds,
    })
}

impl ChernPolynomial {
    /// Whether this is the constant one.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.coeff(&Monomial::one()).is_one()
    }
}
