//! Coordinate-assignment embeddings `X^m -> X^N` and symmetrization.

use std::fmt;

use super::formal_sum::FormalSum;
use super::keys::{MarkedClassKey, Marker, OmegaBarKey, Pattern, Sym, SubsetClassKey};
use super::subset::{Subset, MAX_AMBIENT};
use super::CycleError;

/// What a target coordinate receives.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Slot {
    Base,
    Source(usize),
    ConjSource(usize),
}

impl Slot {
    pub fn source(self) -> Option<usize> {
        match self {
            Slot::Base => None,
            Slot::Source(j) | Slot::ConjSource(j) => Some(j),
        }
    }
}

/// The map `(x_1, ..., x_m) -> (y_1, ..., y_N)` where `y_i` is the basepoint, some `x_j`,
/// or some `i(x_j)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Assignment {
    sources: usize,
    slots: Vec<Slot>,
}

impl Assignment {
    pub fn new(sources: usize, slots: Vec<Slot>) -> Result<Self, CycleError> {
        if slots.len() > MAX_AMBIENT {
            return Err(CycleError::OutOfRange(format!(
                "target size {} exceeds {MAX_AMBIENT}",
                slots.len()
            )));
        }
        for (i, s) in slots.iter().enumerate() {
            if let Some(j) = s.source() {
                if j == 0 || j > sources {
                    return Err(CycleError::Assignment(format!(
                        "slot {} refers to source {j} of {sources}",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { sources, slots })
    }

    /// Slots given as source indices, `0` meaning the basepoint.
    pub fn from_indices(sources: usize, indices: &[usize]) -> Result<Self, CycleError> {
        let slots = indices
            .iter()
            .map(|&j| if j == 0 { Slot::Base } else { Slot::Source(j) })
            .collect();
        Self::new(sources, slots)
    }

    pub fn sources(&self) -> usize {
        self.sources
    }

    pub fn target_size(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn has_conjugation(&self) -> bool {
        self.slots.iter().any(|s| matches!(s, Slot::ConjSource(_)))
    }

    /// Source indices hit by at least one slot.
    pub fn used_sources(&self) -> Subset {
        self.slots
            .iter()
            .filter_map(|s| s.source())
            .fold(Subset::EMPTY, |acc, j| acc.union(Subset::singleton(j)))
    }

    /// Target coordinates receiving a source in `set`.
    pub fn preimage(&self, set: Subset) -> Subset {
        let mut out = Subset::EMPTY;
        for (i, s) in self.slots.iter().enumerate() {
            if s.source().is_some_and(|j| set.contains(j)) {
                out.insert(i + 1);
            }
        }
        out
    }

    /// Every assignment of `target` slots to sources or the basepoint without conjugation,
    /// in lexicographic order of the index vectors (`0` = basepoint first).
    pub fn enumerate_plain(sources: usize, target: usize) -> Vec<Assignment> {
        let mut out = Vec::new();
        let mut idx = vec![0usize; target];
        loop {
            out.push(Assignment::from_indices(sources, &idx).expect("indices in range"));
            let mut k = target;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if idx[k] < sources {
                    idx[k] += 1;
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                Slot::Base => write!(f, "b")?,
                Slot::Source(j) => write!(f, "{j}")?,
                Slot::ConjSource(j) => write!(f, "i{j}")?,
            }
        }
        write!(f, ")")
    }
}

/// Basis keys that can be pushed forward along an assignment.
///
/// `None` is the zero class. Every surviving term has multiplicity one.
pub trait Pushforward: Sized {
    fn source_size(&self) -> usize;
    fn push(&self, a: &Assignment) -> Result<Option<Self>, CycleError>;
}

impl Pushforward for Pattern {
    fn source_size(&self) -> usize {
        self.len()
    }

    fn push(&self, a: &Assignment) -> Result<Option<Self>, CycleError> {
        let src = self.slots();
        let slots = a
            .slots()
            .iter()
            .map(|s| match *s {
                Slot::Base => Sym::Base,
                Slot::Source(j) => src[j - 1],
                Slot::ConjSource(j) => src[j - 1].conj(),
            })
            .collect();
        Ok(Pattern::new(slots))
    }
}

impl Pushforward for SubsetClassKey {
    fn source_size(&self) -> usize {
        self.ambient
    }

    fn push(&self, a: &Assignment) -> Result<Option<Self>, CycleError> {
        if a.has_conjugation() {
            return Err(CycleError::Assignment(
                "subset diagonals carry no involution".into(),
            ));
        }
        let image = a.preimage(self.subset);
        Ok((!image.is_empty()).then(|| SubsetClassKey {
            ambient: a.target_size(),
            subset: image,
        }))
    }
}

impl Pushforward for MarkedClassKey {
    fn source_size(&self) -> usize {
        self.ambient
    }

    /// The marker rides its diagonal group, so a marked group that loses every coordinate
    /// collapses to the basepoint class instead of vanishing. A marker on a basepoint slot
    /// is the zero class (positive codimension).
    fn push(&self, a: &Assignment) -> Result<Option<Self>, CycleError> {
        if a.has_conjugation() {
            return Err(CycleError::Assignment(
                "subset diagonals carry no involution".into(),
            ));
        }
        let n = a.target_size();
        let image = a.preimage(self.subset);
        Ok(match self.marker {
            Marker::OnBaseSlot => None,
            Marker::Collapsed => Some(MarkedClassKey::collapsed(n)),
            Marker::Absent => (!image.is_empty()).then(|| MarkedClassKey::plain(n, image)),
            Marker::OnDiagonalGroup => Some(if image.is_empty() {
                MarkedClassKey::collapsed(n)
            } else {
                MarkedClassKey::marked(n, image)
            }),
        })
    }
}

/// Linear pushforward of a combination of keys on `a.sources()` coordinates.
pub fn push_forward<K>(input: &FormalSum<K>, a: &Assignment) -> Result<FormalSum<K>, CycleError>
where
    K: Pushforward + Ord + Clone,
{
    let mut out = FormalSum::zero();
    for (k, c) in input.iter() {
        if k.source_size() != a.sources() {
            return Err(CycleError::Assignment(format!(
                "key on {} coordinates, assignment from {}",
                k.source_size(),
                a.sources()
            )));
        }
        if let Some(img) = k.push(a)? {
            out.add_term(img, c.clone());
        }
    }
    Ok(out)
}

/// Sum over all coordinate permutations: each pattern goes to the class of its counts.
pub fn symmetrize(input: &FormalSum<Pattern>) -> FormalSum<OmegaBarKey> {
    input.map_keys(|p| {
        let (r, s, t) = p.counts();
        OmegaBarKey::new(r, s, t)
    })
}
