//! Basis keys for diagonal-type cycles.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::subset::Subset;
use super::CycleError;

/// `Delta_I` on `ambient` factors: coordinates in `I` coincide, the others sit at the
/// basepoint.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SubsetClassKey {
    pub ambient: usize,
    pub subset: Subset,
}

impl SubsetClassKey {
    pub fn new(ambient: usize, subset: Subset) -> Result<Self, CycleError> {
        if subset.is_empty() {
            return Err(CycleError::EmptySubset);
        }
        if !subset.is_subset_of(Subset::full(ambient)) {
            return Err(CycleError::OutOfRange(format!("{subset} in ambient {ambient}")));
        }
        Ok(Self { ambient, subset })
    }

    pub fn size(&self) -> usize {
        self.subset.len()
    }
}

impl fmt::Display for SubsetClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.subset)
    }
}

impl Serialize for SubsetClassKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.subset.serialize(s)
    }
}

/// Where an auxiliary class of the base sits on a diagonal-type cycle.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Marker {
    /// Plain `Delta_I`.
    Absent,
    /// The class rides the diagonal group `I` (all its coordinates are equal).
    OnDiagonalGroup,
    /// The class is multiplied into a basepoint coordinate; this is the zero class whenever
    /// the marker has positive codimension.
    OnBaseSlot,
    /// The diagonal group was projected away entirely: the marker pushed forward to the
    /// basepoint, i.e. `deg(z) [b, ..., b]`. Only occurs with `I` empty.
    Collapsed,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MarkedClassKey {
    pub ambient: usize,
    pub subset: Subset,
    pub marker: Marker,
}

impl MarkedClassKey {
    pub fn plain(ambient: usize, subset: Subset) -> Self {
        debug_assert!(!subset.is_empty());
        Self {
            ambient,
            subset,
            marker: Marker::Absent,
        }
    }

    pub fn marked(ambient: usize, subset: Subset) -> Self {
        debug_assert!(!subset.is_empty());
        Self {
            ambient,
            subset,
            marker: Marker::OnDiagonalGroup,
        }
    }

    pub fn collapsed(ambient: usize) -> Self {
        Self {
            ambient,
            subset: Subset::EMPTY,
            marker: Marker::Collapsed,
        }
    }

    pub fn on_base_slot(ambient: usize, subset: Subset) -> Self {
        Self {
            ambient,
            subset,
            marker: Marker::OnBaseSlot,
        }
    }

    pub fn new(ambient: usize, subset: Subset, marker: Marker) -> Result<Self, CycleError> {
        if !subset.is_subset_of(Subset::full(ambient)) {
            return Err(CycleError::OutOfRange(format!("{subset} in ambient {ambient}")));
        }
        match (marker, subset.is_empty()) {
            (Marker::Absent | Marker::OnDiagonalGroup, true) => Err(CycleError::EmptySubset),
            (Marker::Collapsed, false) => Err(CycleError::OutOfRange(
                "a collapsed marker has no diagonal group".into(),
            )),
            _ => Ok(Self {
                ambient,
                subset,
                marker,
            }),
        }
    }

    pub fn is_marked(&self) -> bool {
        self.marker != Marker::Absent
    }
}

impl From<SubsetClassKey> for MarkedClassKey {
    fn from(k: SubsetClassKey) -> Self {
        MarkedClassKey::plain(k.ambient, k.subset)
    }
}

impl fmt::Display for MarkedClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.marker {
            Marker::Absent => write!(f, "D{}", self.subset),
            Marker::OnDiagonalGroup => write!(f, "Z{}", self.subset),
            Marker::OnBaseSlot => write!(f, "Zb{}", self.subset),
            Marker::Collapsed => write!(f, "Z{{}}"),
        }
    }
}

impl Serialize for MarkedClassKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Value of one coordinate of an involution pattern: the basepoint `a`, the free point `x`,
/// or its conjugate `i(x)`. Text alphabet `a`, `x`, `y`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sym {
    Base,
    Var,
    VarConj,
}

impl Sym {
    pub fn conj(self) -> Sym {
        match self {
            Sym::Base => Sym::Base,
            Sym::Var => Sym::VarConj,
            Sym::VarConj => Sym::Var,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Sym::Base => 'a',
            Sym::Var => 'x',
            Sym::VarConj => 'y',
        }
    }
}

/// The cycle `{(mu(1)(x), ..., mu(q)(x)) : x in X}`, stored in canonical form under the
/// global substitution `x -> i(x)`: the first non-basepoint slot is always `x`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    slots: Vec<Sym>,
}

impl Pattern {
    /// `None` for the all-basepoint pattern, which is the zero class.
    pub fn new(slots: Vec<Sym>) -> Option<Self> {
        let first = slots.iter().copied().find(|s| *s != Sym::Base)?;
        let slots = if first == Sym::VarConj {
            slots.into_iter().map(Sym::conj).collect()
        } else {
            slots
        };
        Some(Self { slots })
    }

    pub fn slots(&self) -> &[Sym] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Numbers of `a`, `x` and `i(x)` slots.
    pub fn counts(&self) -> (usize, usize, usize) {
        self.slots.iter().fold((0, 0, 0), |(r, s, t), sym| match sym {
            Sym::Base => (r + 1, s, t),
            Sym::Var => (r, s + 1, t),
            Sym::VarConj => (r, s, t + 1),
        })
    }

    pub fn base_count(&self) -> usize {
        self.counts().0
    }

    /// Applies a permutation of coordinates: slot `i` moves to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Option<Pattern> {
        let mut out = vec![Sym::Base; self.slots.len()];
        for (i, &p) in perm.iter().enumerate() {
            out[p] = self.slots[i];
        }
        Pattern::new(out)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.slots {
            write!(f, "{}", s.letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({self})")
    }
}

impl FromStr for Pattern {
    type Err = CycleError;

    /// Parses `"axy"`; the all-`a` string is rejected since it names the zero class.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let slots = text
            .chars()
            .map(|c| match c {
                'a' => Ok(Sym::Base),
                'x' => Ok(Sym::Var),
                'y' => Ok(Sym::VarConj),
                other => Err(CycleError::Parse(format!("unknown pattern letter `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Pattern::new(slots).ok_or_else(|| CycleError::Parse(format!("`{text}` is the zero class")))
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The fully symmetrized class with `r` basepoint slots, `s` slots `x` and `t` slots `i(x)`,
/// stored with `s >= t`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OmegaBarKey {
    pub r: usize,
    pub s: usize,
    pub t: usize,
}

impl OmegaBarKey {
    /// `None` for `(q, 0, 0)`, the zero class.
    pub fn new(r: usize, s: usize, t: usize) -> Option<Self> {
        if s == 0 && t == 0 {
            return None;
        }
        Some(Self {
            r,
            s: s.max(t),
            t: s.min(t),
        })
    }

    pub fn order(&self) -> usize {
        self.r + self.s + self.t
    }

    /// Every nonzero key on `q` coordinates, ordered by `r`, then `t`, then `s`.
    pub fn all(q: usize) -> Vec<OmegaBarKey> {
        let mut out = Vec::new();
        for r in 0..q {
            let rest = q - r;
            for t in 0..=rest / 2 {
                out.push(OmegaBarKey { r, s: rest - t, t });
            }
        }
        out
    }
}

impl fmt::Display for OmegaBarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.r, self.s, self.t)
    }
}

impl Serialize for OmegaBarKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for OmegaBarKey {
    type Err = CycleError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || CycleError::Parse(format!("`{text}` is not an (r,s,t) key"));
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let parts: Vec<usize> = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [r, s, t] = parts[..] else {
            return Err(bad());
        };
        OmegaBarKey::new(r, s, t).ok_or_else(bad)
    }
}

/// Positions of `I` become `x`, the rest `a`.
pub fn subset_to_pattern(key: &SubsetClassKey) -> Pattern {
    let slots = (1..=key.ambient)
        .map(|i| if key.subset.contains(i) { Sym::Var } else { Sym::Base })
        .collect();
    Pattern::new(slots).expect("subset keys are nonempty")
}
