use alloc::format;
use alloc::string::String;

use super::{CiError, Universe, VarSet};

/// A conditional-independence statement `A ⫫ B | C` in canonical form.
///
/// `a` and `b` are non-empty, the three positions are pairwise disjoint, and
/// the side holding the smallest symbol is stored first, so `A ⫫ B | C` and
/// `B ⫫ A | C` share one representation. Because the sides are disjoint this
/// is the same as ordering them lexicographically by their sorted members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CIStatement {
    a: VarSet,
    b: VarSet,
    c: VarSet,
}

/// Builds the canonical statement for `a ⫫ b | c`.
///
/// Overlapping positions are an error rather than being silently trimmed.
pub fn normalize(a: VarSet, b: VarSet, c: VarSet) -> Result<CIStatement, CiError> {
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(CiError::OverlappingSets);
    }
    if a.is_empty() || b.is_empty() {
        return Err(CiError::EmptySide);
    }
    Ok(if a.first() < b.first() {
        CIStatement { a, b, c }
    } else {
        CIStatement { a: b, b: a, c }
    })
}

impl CIStatement {
    pub fn new(a: VarSet, b: VarSet, c: VarSet) -> Result<CIStatement, CiError> {
        normalize(a, b, c)
    }

    pub fn a(&self) -> VarSet {
        self.a
    }

    pub fn b(&self) -> VarSet {
        self.b
    }

    pub fn c(&self) -> VarSet {
        self.c
    }

    /// Every symbol the statement mentions.
    pub fn symbols(&self) -> VarSet {
        self.a.union(self.b).union(self.c)
    }

    /// The statement read in both directions, `(a, b)` first.
    pub fn orientations(&self) -> [(VarSet, VarSet); 2] {
        [(self.a, self.b), (self.b, self.a)]
    }

    /// True when one side equals `x` and the other equals `y`, in either
    /// order, and the conditioning set is `c`.
    pub fn matches(&self, x: VarSet, y: VarSet, c: VarSet) -> bool {
        self.c == c && ((self.a == x && self.b == y) || (self.a == y && self.b == x))
    }

    pub fn display(&self, universe: &Universe) -> String {
        if self.c.is_empty() {
            format!(
                "{} ⫫ {}",
                universe.format_set(self.a),
                universe.format_set(self.b)
            )
        } else {
            format!(
                "{} ⫫ {} | {}",
                universe.format_set(self.a),
                universe.format_set(self.b),
                universe.format_set(self.c)
            )
        }
    }
}

impl Universe {
    /// Parses `a1, a2 ⫫ b1 | c1, c2`. The independence sign may also be
    /// written `_||_`; the conditioning part is optional.
    pub fn parse_statement(&self, text: &str) -> Result<CIStatement, CiError> {
        let (lhs, rest) = text
            .split_once("_||_")
            .or_else(|| text.split_once('⫫'))
            .ok_or_else(|| CiError::Parse(format!("missing `⫫` or `_||_` in `{text}`")))?;
        let (rhs, cond) = match rest.split_once('|') {
            Some((r, c)) => (r, c),
            None => (rest, ""),
        };
        let a = self.parse_set(lhs)?;
        let b = self.parse_set(rhs)?;
        let c = self.parse_set(cond)?;
        normalize(a, b, c)
    }

    fn parse_set(&self, text: &str) -> Result<VarSet, CiError> {
        let text = text.trim();
        if text.is_empty() || text == "∅" || text == "{}" {
            return Ok(VarSet::EMPTY);
        }
        let inner = text
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .unwrap_or(text);
        let mut set = VarSet::EMPTY;
        for label in inner.split(',') {
            let label = label.trim();
            if label.is_empty() {
                return Err(CiError::Parse(format!("empty label in `{text}`")));
            }
            set = set.with(self.lookup(label)?);
        }
        Ok(set)
    }
}
