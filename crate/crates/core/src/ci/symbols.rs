use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::CiError;

/// Largest number of symbols a [`Universe`] can hold.
pub const MAX_SYMBOLS: usize = 64;

/// Index of a ground symbol within its [`Universe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(u8);

impl SymbolId {
    pub fn new(index: usize) -> Option<SymbolId> {
        (index < MAX_SYMBOLS).then_some(SymbolId(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of symbols, stored as a bitmask. Iteration is in ascending
/// [`SymbolId`] order, which is the canonical order of the set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VarSet(u64);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub const fn from_bits(bits: u64) -> VarSet {
        VarSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(id: SymbolId) -> VarSet {
        VarSet(1u64 << id.0)
    }

    /// The first `n` symbols of a universe.
    pub fn prefix(n: usize) -> VarSet {
        if n >= 64 {
            VarSet(u64::MAX)
        } else {
            VarSet((1u64 << n) - 1)
        }
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, id: SymbolId) -> bool {
        self.0 & (1u64 << id.0) != 0
    }

    pub fn with(self, id: SymbolId) -> VarSet {
        VarSet(self.0 | (1u64 << id.0))
    }

    pub fn without(self, id: SymbolId) -> VarSet {
        VarSet(self.0 & !(1u64 << id.0))
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    pub fn difference(self, other: VarSet) -> VarSet {
        VarSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: VarSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest member.
    pub fn first(self) -> Option<SymbolId> {
        (self.0 != 0).then(|| SymbolId(self.0.trailing_zeros() as u8))
    }

    pub fn iter(self) -> impl Iterator<Item = SymbolId> {
        let mut rest = self.0;
        core::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let id = rest.trailing_zeros() as u8;
            rest &= rest - 1;
            Some(SymbolId(id))
        })
    }

    /// All subsets of `self` that are neither empty nor `self`, in
    /// decreasing bitmask order.
    pub fn proper_subsets(self) -> impl Iterator<Item = VarSet> {
        let full = self.0;
        let mut next = full.wrapping_sub(1) & full;
        core::iter::from_fn(move || {
            if next == 0 || full == 0 {
                return None;
            }
            let out = next;
            next = (next - 1) & full;
            Some(VarSet(out))
        })
    }

    /// All non-empty subsets of `self`, `self` included.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = VarSet> {
        core::iter::once(self)
            .filter(|s| !s.is_empty())
            .chain(self.proper_subsets())
    }
}

impl FromIterator<SymbolId> for VarSet {
    fn from_iter<T: IntoIterator<Item = SymbolId>>(iter: T) -> Self {
        iter.into_iter().fold(VarSet::EMPTY, VarSet::with)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|s| s.0)).finish()
    }
}

/// The finite set of ground symbols a derivation session works over.
/// Labels are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Universe {
    labels: Vec<String>,
}

impl Universe {
    pub fn new() -> Universe {
        Universe::default()
    }

    pub fn from_labels<I, S>(labels: I) -> Result<Universe, CiError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut universe = Universe::new();
        for label in labels {
            universe.add(label.as_ref())?;
        }
        Ok(universe)
    }

    /// Declares a new symbol.
    pub fn add(&mut self, label: &str) -> Result<SymbolId, CiError> {
        if self.id(label).is_some() {
            return Err(CiError::DuplicateSymbol(label.to_string()));
        }
        let id = SymbolId::new(self.labels.len()).ok_or(CiError::TooManySymbols)?;
        self.labels.push(label.to_string());
        Ok(id)
    }

    pub fn id(&self, label: &str) -> Option<SymbolId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| SymbolId(i as u8))
    }

    pub fn lookup(&self, label: &str) -> Result<SymbolId, CiError> {
        self.id(label)
            .ok_or_else(|| CiError::UnknownSymbol(label.to_string()))
    }

    pub fn label(&self, id: SymbolId) -> &str {
        &self.labels[id.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn all(&self) -> VarSet {
        VarSet::prefix(self.labels.len())
    }

    pub fn set<S: AsRef<str>>(&self, labels: &[S]) -> Result<VarSet, CiError> {
        labels
            .iter()
            .map(|l| self.lookup(l.as_ref()))
            .collect::<Result<VarSet, _>>()
    }

    pub fn set_labels(&self, set: VarSet) -> Vec<String> {
        set.iter().map(|id| self.label(id).to_string()).collect()
    }

    /// Comma-separated labels, or `∅` for the empty set.
    pub fn format_set(&self, set: VarSet) -> String {
        if set.is_empty() {
            return "∅".to_string();
        }
        self.set_labels(set).join(", ")
    }
}
