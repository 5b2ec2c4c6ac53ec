//! Forward-chaining saturation.
//!
//! Saturation runs in rounds. Round `r` takes the statements first derived
//! in round `r - 1` (the frontier), visits them in canonical order, and
//! applies the rules in [`Rule::ALL`] order. Two-premise rules pair a
//! frontier statement with any statement known at the start of the round,
//! so every pair is tried exactly when its younger member is visited.
//! Conclusions found during a round become visible in the next one. The
//! resulting closure and every recorded derivation depend only on the
//! inputs, never on hash order.

use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use super::{
    normalize, CIStatement, CiError, Determinism, Proof, ProofStep, Rule, StepInput, VarSet,
};

/// Default cap on the number of derived statements.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaturationStatus {
    /// No rule produces anything new: the set is the fixed point.
    Saturated,
    /// Stopped early because every requested goal was derived.
    GoalsReached,
    /// Stopped at the step budget; the set is a partial closure.
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy)]
struct Origin {
    // None marks a base statement.
    rule: Option<Rule>,
    premises: [u32; 2],
    selection: VarSet,
}

const BASE: Origin = Origin {
    rule: None,
    premises: [0, 0],
    selection: VarSet::EMPTY,
};

/// The result of a saturation run, with the derivation of every statement.
#[derive(Debug, Clone)]
pub struct Saturation {
    statements: Vec<CIStatement>,
    origins: Vec<Origin>,
    ids: HashMap<CIStatement, u32>,
    base_len: usize,
    status: SaturationStatus,
    rounds: usize,
}

impl Saturation {
    pub fn status(&self) -> SaturationStatus {
        self.status
    }

    pub fn is_saturated(&self) -> bool {
        self.status == SaturationStatus::Saturated
    }

    /// Number of rule rounds run.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn contains(&self, s: &CIStatement) -> bool {
        self.ids.contains_key(s)
    }

    /// Statements in discovery order, base statements first.
    pub fn statements(&self) -> &[CIStatement] {
        &self.statements
    }

    /// Statements in canonical order.
    pub fn sorted(&self) -> Vec<CIStatement> {
        let mut out = self.statements.clone();
        out.sort_unstable();
        out
    }

    /// Extracts the recorded derivation of `goal`.
    pub fn proof_of(&self, goal: &CIStatement) -> Option<Proof> {
        let gid = *self.ids.get(goal)?;
        let mut needed = alloc::vec![false; self.statements.len()];
        let mut stack = alloc::vec![gid];
        while let Some(id) = stack.pop() {
            if core::mem::replace(&mut needed[id as usize], true) {
                continue;
            }
            let origin = &self.origins[id as usize];
            if let Some(rule) = origin.rule {
                stack.extend_from_slice(&origin.premises[..rule.arity()]);
            }
        }
        // Premises always precede their conclusion, so id order is a valid
        // trace order.
        let mut position = alloc::vec![usize::MAX; self.statements.len()];
        let mut base = Vec::new();
        let mut steps: Vec<ProofStep> = Vec::new();
        for (id, _) in needed.iter().enumerate().filter(|(_, n)| **n) {
            let origin = &self.origins[id];
            match origin.rule {
                None => {
                    position[id] = base.len();
                    base.push(self.statements[id]);
                }
                Some(rule) => {
                    let inputs = origin.premises[..rule.arity()]
                        .iter()
                        .map(|&p| {
                            let p = p as usize;
                            if p < self.base_len {
                                StepInput::Base(position[p])
                            } else {
                                StepInput::Step(position[p])
                            }
                        })
                        .collect();
                    position[id] = steps.len();
                    steps.push(ProofStep {
                        rule,
                        inputs,
                        selection: origin.selection,
                        output: self.statements[id],
                    });
                }
            }
        }
        Some(Proof {
            base,
            steps,
            goal: *goal,
        })
    }
}

enum Flow {
    Continue,
    Stop(SaturationStatus),
}

struct Engine<'a> {
    det: &'a Determinism,
    universe: VarSet,
    budget: usize,
    goals: Vec<CIStatement>,
    pending_goals: usize,
    sat: Saturation,
    // (side, conditioning) -> (statement id, other side), both orientations.
    anchors: HashMap<(VarSet, VarSet), Vec<(u32, VarSet)>>,
    buffer: Vec<(CIStatement, Origin)>,
}

impl<'a> Engine<'a> {
    fn new(det: &'a Determinism, universe: VarSet, budget: usize, goals: &[CIStatement]) -> Self {
        let mut goals = goals.to_vec();
        goals.sort_unstable();
        goals.dedup();
        Engine {
            det,
            universe,
            budget,
            pending_goals: goals.len(),
            goals,
            sat: Saturation {
                statements: Vec::new(),
                origins: Vec::new(),
                ids: HashMap::new(),
                base_len: 0,
                status: SaturationStatus::Saturated,
                rounds: 0,
            },
            anchors: HashMap::new(),
            buffer: Vec::new(),
        }
    }

    fn insert(&mut self, s: CIStatement, origin: Origin) -> Flow {
        if !s.symbols().is_subset(self.universe) || self.sat.ids.contains_key(&s) {
            return Flow::Continue;
        }
        let id = self.sat.statements.len() as u32;
        self.sat.ids.insert(s, id);
        self.sat.statements.push(s);
        self.sat.origins.push(origin);
        if self.goals.binary_search(&s).is_ok() {
            self.pending_goals -= 1;
            if self.pending_goals == 0 {
                return Flow::Stop(SaturationStatus::GoalsReached);
            }
        }
        if origin.rule.is_some() && self.sat.statements.len() - self.sat.base_len >= self.budget {
            return Flow::Stop(SaturationStatus::BudgetExhausted);
        }
        Flow::Continue
    }

    fn index(&mut self, id: u32) {
        let s = self.sat.statements[id as usize];
        for (x, y) in s.orientations() {
            self.anchors.entry((x, s.c())).or_default().push((id, y));
        }
    }

    fn push(&mut self, s: Result<CIStatement, CiError>, rule: Rule, premises: [u32; 2], selection: VarSet) {
        if let Ok(s) = s {
            self.buffer.push((
                s,
                Origin {
                    rule: Some(rule),
                    premises,
                    selection,
                },
            ));
        }
    }

    /// Collects every conclusion with `id` as a premise and all other
    /// premises below `visible`.
    fn expand(&mut self, id: u32, visible: u32) {
        let s = self.sat.statements[id as usize];
        let c = s.c();
        for (x, y) in s.orientations() {
            for d in y.proper_subsets() {
                self.push(normalize(x, y.difference(d), c), Rule::Decomposition, [id, 0], d);
            }
        }
        for (x, y) in s.orientations() {
            for d in y.proper_subsets() {
                self.push(normalize(x, y.difference(d), c.union(d)), Rule::WeakUnion, [id, 0], d);
            }
        }
        for (x, y) in s.orientations() {
            // s as `A ⫫ B | C`, partner `A ⫫ D | B ∪ C`.
            if let Some(partners) = self.anchors.get(&(x, y.union(c))) {
                let found: Vec<(u32, VarSet)> = partners
                    .iter()
                    .copied()
                    .filter(|(pid, _)| *pid < visible)
                    .collect();
                for (pid, d) in found {
                    self.push(normalize(x, y.union(d), c), Rule::Contraction, [id, pid], VarSet::EMPTY);
                }
            }
            // s as `A ⫫ D | B ∪ C`, partner `A ⫫ B | C`.
            for b in c.nonempty_subsets() {
                let Ok(first) = normalize(x, b, c.difference(b)) else {
                    continue;
                };
                match self.sat.ids.get(&first) {
                    Some(&fid) if fid < visible => {
                        self.push(
                            normalize(x, b.union(y), c.difference(b)),
                            Rule::Contraction,
                            [fid, id],
                            VarSet::EMPTY,
                        );
                    }
                    _ => {}
                }
            }
        }
        if self.det.is_empty() {
            return;
        }
        let addable = self
            .det
            .closure(c)
            .difference(s.symbols())
            .intersection(self.universe);
        for x in addable.iter() {
            self.push(
                normalize(s.a(), s.b(), c.with(x)),
                Rule::DeterminismAugment,
                [id, 0],
                VarSet::singleton(x),
            );
        }
        let removable: Vec<_> = c
            .iter()
            .filter(|&x| self.det.determines(c.without(x), x))
            .collect();
        for &x in &removable {
            for (side, y) in s.orientations() {
                let grown = y.with(x);
                self.push(normalize(side, grown, c.without(x)), Rule::DeterminismExpand, [id, 0], grown);
            }
        }
        for &x in &removable {
            self.push(
                normalize(s.a(), s.b(), c.without(x)),
                Rule::DeterminismDrop,
                [id, 0],
                VarSet::singleton(x),
            );
        }
    }

    fn run(mut self, base: &[CIStatement]) -> Saturation {
        let mut base = base.to_vec();
        base.sort_unstable();
        base.dedup();
        for s in base {
            if let Flow::Stop(status) = self.insert(s, BASE) {
                self.sat.base_len = self.sat.statements.len();
                self.sat.status = status;
                return self.sat;
            }
        }
        self.sat.base_len = self.sat.statements.len();
        let mut start = 0u32;
        loop {
            let end = self.sat.statements.len() as u32;
            if start == end {
                self.sat.status = SaturationStatus::Saturated;
                return self.sat;
            }
            self.sat.rounds += 1;
            for id in start..end {
                self.index(id);
            }
            let mut frontier: Vec<u32> = (start..end).collect();
            frontier.sort_unstable_by_key(|&id| self.sat.statements[id as usize]);
            for id in frontier {
                self.expand(id, end);
                let mut found = core::mem::take(&mut self.buffer);
                for (s, origin) in found.drain(..) {
                    if let Flow::Stop(status) = self.insert(s, origin) {
                        self.sat.status = status;
                        return self.sat;
                    }
                }
                self.buffer = found;
            }
            start = end;
        }
    }
}

fn check_inputs(base: &[CIStatement], universe: VarSet, budget: usize) -> Result<(), CiError> {
    if budget == 0 {
        return Err(CiError::ZeroBudget);
    }
    if base.iter().any(|s| !s.symbols().is_subset(universe)) {
        return Err(CiError::OutsideUniverse);
    }
    Ok(())
}

/// Saturates `base` under the rule system, restricted to statements over
/// `universe`. `budget` caps the number of derived statements.
pub fn closure(
    base: &[CIStatement],
    det: &Determinism,
    universe: VarSet,
    budget: usize,
) -> Result<Saturation, CiError> {
    check_inputs(base, universe, budget)?;
    Ok(Engine::new(det, universe, budget, &[]).run(base))
}

/// Like [`closure`], but stops as soon as every statement in `goals` has
/// been derived.
pub fn saturate_towards(
    base: &[CIStatement],
    det: &Determinism,
    universe: VarSet,
    goals: &[CIStatement],
    budget: usize,
) -> Result<Saturation, CiError> {
    check_inputs(base, universe, budget)?;
    if goals.iter().any(|g| !g.symbols().is_subset(universe)) {
        return Err(CiError::OutsideUniverse);
    }
    Ok(Engine::new(det, universe, budget, goals).run(base))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeriveError {
    /// The closure saturated without the goal. This is relative to the
    /// rule system, which is incomplete for probabilistic independence.
    NotDerivable { closure_size: usize },
    /// The budget ran out first; nothing is known about the goal.
    BudgetExhausted { explored: usize },
    Invalid(CiError),
}

impl fmt::Display for DeriveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeriveError::NotDerivable { closure_size } => write!(
                f,
                "not derivable: closure saturated at {closure_size} statements without the goal"
            ),
            DeriveError::BudgetExhausted { explored } => {
                write!(f, "inconclusive: budget exhausted after {explored} statements")
            }
            DeriveError::Invalid(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for DeriveError {}

impl From<CiError> for DeriveError {
    fn from(e: CiError) -> Self {
        DeriveError::Invalid(e)
    }
}

/// Searches for a proof of `goal` from `base`. The universe is every symbol
/// mentioned by the base, the goal or the dependencies.
pub fn derive(
    base: &[CIStatement],
    det: &Determinism,
    goal: &CIStatement,
    budget: usize,
) -> Result<Proof, DeriveError> {
    let universe = base
        .iter()
        .fold(goal.symbols().union(det.symbols()), |u, s| u.union(s.symbols()));
    let sat = saturate_towards(base, det, universe, core::slice::from_ref(goal), budget)?;
    match sat.proof_of(goal) {
        Some(proof) => Ok(proof),
        None if sat.is_saturated() => Err(DeriveError::NotDerivable {
            closure_size: sat.len(),
        }),
        None => Err(DeriveError::BudgetExhausted { explored: sat.len() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci::Universe;

    #[test]
    fn single_statement_is_its_own_closure() {
        let u = Universe::from_labels(["A", "B", "C"]).unwrap();
        let s = u.parse_statement("A ⫫ B | C").unwrap();
        let sat = closure(&[s], &Determinism::none(), u.all(), 100).unwrap();
        assert!(sat.is_saturated());
        assert_eq!(sat.len(), 1);
        assert!(sat.contains(&u.parse_statement("B ⫫ A | C").unwrap()));
    }

    #[test]
    fn conditioning_symbol_cannot_be_dropped_without_license() {
        let u = Universe::from_labels(["theta_1", "theta_2", "I_0"]).unwrap();
        let base = [u.parse_statement("theta_1 ⫫ theta_2 | I_0").unwrap()];
        let goal = u.parse_statement("theta_1 ⫫ theta_2").unwrap();
        assert_eq!(
            derive(&base, &Determinism::none(), &goal, 1000),
            Err(DeriveError::NotDerivable { closure_size: 1 })
        );
    }

    #[test]
    fn goal_in_base_has_empty_trace() {
        let u = Universe::from_labels(["A", "B"]).unwrap();
        let s = u.parse_statement("A ⫫ B").unwrap();
        let proof = derive(&[s], &Determinism::none(), &s, 10).unwrap();
        assert!(proof.steps.is_empty());
        proof.replay(&Determinism::none()).unwrap();
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let u = Universe::from_labels(["A", "B", "C", "D", "E"]).unwrap();
        let s = u.parse_statement("A ⫫ B, C, D, E").unwrap();
        let goal = u.parse_statement("A ⫫ B | C, D, E").unwrap();
        let full = closure(&[s], &Determinism::none(), u.all(), DEFAULT_BUDGET).unwrap();
        assert!(full.is_saturated());
        assert!(full.contains(&goal));
        let sat = closure(&[s], &Determinism::none(), u.all(), 3).unwrap();
        assert_eq!(sat.status(), SaturationStatus::BudgetExhausted);
        assert_eq!(sat.len(), 4);
        assert_eq!(closure(&[s], &Determinism::none(), u.all(), 0).unwrap_err(), CiError::ZeroBudget);
    }

    #[test]
    fn contraction_fires_across_rounds() {
        let u = Universe::from_labels(["A", "B", "C", "D"]).unwrap();
        let base = [
            u.parse_statement("A ⫫ B | C").unwrap(),
            u.parse_statement("A ⫫ D | B, C").unwrap(),
        ];
        let goal = u.parse_statement("A ⫫ B, D | C").unwrap();
        let proof = derive(&base, &Determinism::none(), &goal, 100).unwrap();
        assert_eq!(proof.steps.len(), 1);
        assert_eq!(proof.steps[0].rule, Rule::Contraction);
        proof.replay(&Determinism::none()).unwrap();
    }

    #[test]
    fn statements_outside_universe_rejected() {
        let u = Universe::from_labels(["A", "B", "C"]).unwrap();
        let s = u.parse_statement("A ⫫ B | C").unwrap();
        let small = u.set(&["A", "B"]).unwrap();
        assert_eq!(
            closure(&[s], &Determinism::none(), small, 10).unwrap_err(),
            CiError::OutsideUniverse
        );
    }
}
