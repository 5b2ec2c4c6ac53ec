use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use super::{normalize, CIStatement, CiError, SymbolId, Universe, VarSet};

/// Inference rules of the extended semi-graphoid system.
///
/// Listed in the order saturation applies them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// `A ⫫ B | C ⊢ B ⫫ A | C`. Identity on canonical statements.
    Symmetry,
    /// `A ⫫ B ∪ D | C ⊢ A ⫫ B | C`; the selection is `D`.
    Decomposition,
    /// `A ⫫ B ∪ D | C ⊢ A ⫫ B | C ∪ D`; the selection is `D`.
    WeakUnion,
    /// `A ⫫ B | C` and `A ⫫ D | B ∪ C` give `A ⫫ B ∪ D | C`.
    Contraction,
    /// `A ⫫ B | C ⊢ A ⫫ B | C ∪ {X}` when `X` is a function of `C`;
    /// the selection is `{X}`.
    DeterminismAugment,
    /// `A ⫫ B | C ∪ {X} ⊢ A ⫫ B ∪ {X} | C` when `X` is a function of `C`;
    /// the selection is the grown side `B ∪ {X}`.
    DeterminismExpand,
    /// `A ⫫ B | C ∪ {X} ⊢ A ⫫ B | C` when `X` is a function of `C`;
    /// the selection is `{X}`.
    DeterminismDrop,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::Symmetry,
        Rule::Decomposition,
        Rule::WeakUnion,
        Rule::Contraction,
        Rule::DeterminismAugment,
        Rule::DeterminismExpand,
        Rule::DeterminismDrop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Symmetry => "symmetry",
            Rule::Decomposition => "decomposition",
            Rule::WeakUnion => "weak-union",
            Rule::Contraction => "contraction",
            Rule::DeterminismAugment => "determinism-augment",
            Rule::DeterminismExpand => "determinism-expand",
            Rule::DeterminismDrop => "determinism-drop",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Rule::Contraction => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `determined` is a function of `determiners`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionalDependency {
    determined: SymbolId,
    determiners: VarSet,
}

impl FunctionalDependency {
    pub fn new(determined: SymbolId, determiners: VarSet) -> Result<Self, CiError> {
        if determiners.contains(determined) {
            return Err(CiError::SelfDetermination(alloc::format!(
                "#{}",
                determined.index()
            )));
        }
        Ok(FunctionalDependency {
            determined,
            determiners,
        })
    }

    pub fn parse(universe: &Universe, determined: &str, determiners: &[&str]) -> Result<Self, CiError> {
        let x = universe.lookup(determined)?;
        let w = universe.set(determiners)?;
        if w.contains(x) {
            return Err(CiError::SelfDetermination(determined.to_string()));
        }
        Ok(FunctionalDependency {
            determined: x,
            determiners: w,
        })
    }

    pub fn determined(&self) -> SymbolId {
        self.determined
    }

    pub fn determiners(&self) -> VarSet {
        self.determiners
    }
}

/// The functional dependencies of a derivation session.
///
/// A determinism step on `X` given `C` is licensed when `X` lies in the
/// attribute closure of `C`, i.e. when a chain of dependencies computes `X`
/// from symbols in `C`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Determinism {
    deps: Vec<FunctionalDependency>,
}

impl Determinism {
    pub fn new(mut deps: Vec<FunctionalDependency>) -> Determinism {
        deps.sort();
        deps.dedup();
        Determinism { deps }
    }

    pub fn none() -> Determinism {
        Determinism::default()
    }

    pub fn deps(&self) -> &[FunctionalDependency] {
        &self.deps
    }

    pub fn is_empty(&self) -> bool {
        self.deps.is_empty()
    }

    /// Every symbol some dependency mentions.
    pub fn symbols(&self) -> VarSet {
        self.deps.iter().fold(VarSet::EMPTY, |acc, d| {
            acc.union(d.determiners).with(d.determined)
        })
    }

    /// `given` together with everything it determines.
    pub fn closure(&self, given: VarSet) -> VarSet {
        let mut closed = given;
        loop {
            let before = closed;
            for d in &self.deps {
                if d.determiners.is_subset(closed) {
                    closed = closed.with(d.determined);
                }
            }
            if closed == before {
                return closed;
            }
        }
    }

    pub fn determines(&self, given: VarSet, x: SymbolId) -> bool {
        self.closure(given).contains(x)
    }
}

fn single(inputs: &[CIStatement], rule: Rule) -> Result<CIStatement, CiError> {
    match inputs {
        [s] => Ok(*s),
        _ => Err(CiError::ShapeMismatch(match rule.arity() {
            1 => "rule takes exactly one premise",
            _ => "rule takes exactly two premises",
        })),
    }
}

/// The side of `s` that strictly contains `selection`, with the other side.
fn split_side(s: &CIStatement, selection: VarSet) -> Result<(VarSet, VarSet), CiError> {
    if selection.is_empty() {
        return Err(CiError::ShapeMismatch("selection must be non-empty"));
    }
    s.orientations()
        .into_iter()
        .find(|(_, side)| selection.is_subset(*side) && selection != *side)
        .ok_or(CiError::ShapeMismatch(
            "selection must be a proper subset of one side",
        ))
}

fn single_symbol(selection: VarSet) -> Result<SymbolId, CiError> {
    match selection.len() {
        1 => Ok(selection.first().expect("non-empty")),
        _ => Err(CiError::ShapeMismatch("selection must be a single symbol")),
    }
}

/// Applies one rule to canonical premises and returns the canonical
/// conclusion.
///
/// `selection` identifies the part of a statement the rule acts on; see the
/// variants of [`Rule`]. Rules that take no selection require it empty.
pub fn apply_axiom(
    rule: Rule,
    inputs: &[CIStatement],
    selection: VarSet,
    det: &Determinism,
) -> Result<CIStatement, CiError> {
    match rule {
        Rule::Symmetry => {
            let s = single(inputs, rule)?;
            if !selection.is_empty() {
                return Err(CiError::ShapeMismatch("symmetry takes no selection"));
            }
            normalize(s.b(), s.a(), s.c())
        }
        Rule::Decomposition => {
            let s = single(inputs, rule)?;
            let (x, y) = split_side(&s, selection)?;
            normalize(x, y.difference(selection), s.c())
        }
        Rule::WeakUnion => {
            let s = single(inputs, rule)?;
            let (x, y) = split_side(&s, selection)?;
            normalize(x, y.difference(selection), s.c().union(selection))
        }
        Rule::Contraction => {
            let [first, second] = inputs else {
                return Err(CiError::ShapeMismatch("rule takes exactly two premises"));
            };
            if !selection.is_empty() {
                return Err(CiError::ShapeMismatch("contraction takes no selection"));
            }
            for (x, y) in first.orientations() {
                if second.c() != y.union(first.c()) {
                    continue;
                }
                let d = if second.a() == x {
                    second.b()
                } else if second.b() == x {
                    second.a()
                } else {
                    continue;
                };
                return normalize(x, y.union(d), first.c());
            }
            Err(CiError::ShapeMismatch(
                "premises must read A ⫫ B | C and A ⫫ D | B ∪ C",
            ))
        }
        Rule::DeterminismAugment => {
            let s = single(inputs, rule)?;
            let x = single_symbol(selection)?;
            if s.symbols().contains(x) {
                return Err(CiError::ShapeMismatch("augmented symbol already present"));
            }
            if !det.determines(s.c(), x) {
                return Err(CiError::UnlicensedDeterminism);
            }
            normalize(s.a(), s.b(), s.c().with(x))
        }
        Rule::DeterminismDrop => {
            let s = single(inputs, rule)?;
            let x = single_symbol(selection)?;
            if !s.c().contains(x) {
                return Err(CiError::ShapeMismatch("dropped symbol must be conditioned on"));
            }
            let rest = s.c().without(x);
            if !det.determines(rest, x) {
                return Err(CiError::UnlicensedDeterminism);
            }
            normalize(s.a(), s.b(), rest)
        }
        Rule::DeterminismExpand => {
            let s = single(inputs, rule)?;
            let (x, side) = s
                .orientations()
                .into_iter()
                .find(|(_, side)| side.is_subset(selection) && selection.difference(*side).len() == 1)
                .ok_or(CiError::ShapeMismatch(
                    "selection must be one side plus one conditioned symbol",
                ))?;
            let moved = single_symbol(selection.difference(side))?;
            if !s.c().contains(moved) {
                return Err(CiError::ShapeMismatch("moved symbol must be conditioned on"));
            }
            let rest = s.c().without(moved);
            if !det.determines(rest, moved) {
                return Err(CiError::UnlicensedDeterminism);
            }
            normalize(x, selection, rest)
        }
    }
}
