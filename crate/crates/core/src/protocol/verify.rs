use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::system::{CommonSeparation, ConditionKind, Goal, PanelSystem, ProtocolError};
use crate::ci::{derive_via, saturate_towards, CIStatement, Proof, Saturation, SymbolId, VarSet};
use crate::graph::{active_trail, CIQuery, Dag};

/// Where the conditions come from.
#[derive(Debug, Clone, Copy)]
pub enum Mode<'a> {
    /// Asserted CI statements over the system universe.
    Axiomatic(&'a [CIStatement]),
    /// A DAG whose node labels include every system symbol; extra nodes
    /// are treated as latent.
    Graphical(&'a Dag),
}

impl Mode<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Axiomatic(_) => "axiomatic",
            Mode::Graphical(_) => "graphical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// The statement is one of the asserted ones.
    Asserted,
    Proof(Proof),
    /// d-separated in the DAG given `conditioning`, the conditioning set
    /// closed under the system's determinism facts. Sides fully determined
    /// by that set hold trivially and leave `conditioning` as the only
    /// witness.
    DSeparated { conditioning: Vec<String> },
    /// An active trail, listed by node label.
    ActiveTrail(Vec<String>),
    /// The closure saturated without the statement.
    NotDerivable { closure_size: usize },
    BudgetExhausted { explored: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    NotEstablished,
    Inconclusive,
    Vacuous,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::NotEstablished => "not-established",
            Status::Inconclusive => "inconclusive",
            Status::Vacuous => "vacuous",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionCheck {
    pub kind: ConditionKind,
    pub panel: Option<usize>,
    pub statement: Option<CIStatement>,
    pub status: Status,
    pub evidence: Option<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalCheck {
    pub goal: Goal,
    pub panel: usize,
    pub statement: Option<CIStatement>,
    pub status: Status,
    pub evidence: Option<Evidence>,
}

impl GoalCheck {
    pub fn proof(&self) -> Option<&Proof> {
        match &self.evidence {
            Some(Evidence::Proof(p)) => Some(p),
            _ => None,
        }
    }
}

/// Outcome of checking the conditions and deriving the two goals for
/// every panel. The epoch is deliberately not part of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub panels: usize,
    pub mode: &'static str,
    pub common_separation: CommonSeparation,
    pub conditions: Vec<ConditionCheck>,
    pub goals: Vec<GoalCheck>,
    /// Every non-vacuous goal was derived.
    pub sound_and_distributed: bool,
}

impl Verdict {
    pub fn all_conditions_hold(&self) -> bool {
        self.conditions
            .iter()
            .all(|c| matches!(c.status, Status::Holds | Status::Vacuous))
    }

    pub fn goal(&self, goal: Goal, panel: usize) -> Option<&GoalCheck> {
        self.goals.iter().find(|g| g.goal == goal && g.panel == panel)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AblationRow {
    /// `None` for the control row.
    pub dropped: Option<ConditionKind>,
    pub verdict: Verdict,
}

fn check_base(sys: &PanelSystem, base: &[CIStatement]) -> Result<(), ProtocolError> {
    let all = sys.universe().all();
    match base.iter().find(|s| !s.symbols().is_subset(all)) {
        Some(_) => Err(ProtocolError::UniverseMismatch(
            "an asserted statement uses symbols outside the panel system".to_string(),
        )),
        None => Ok(()),
    }
}

fn saturation_outcome(sat: &Saturation, base: &[CIStatement], s: &CIStatement) -> (Status, Evidence) {
    if base.contains(s) {
        return (Status::Holds, Evidence::Asserted);
    }
    match sat.proof_of(s) {
        Some(p) => (Status::Holds, Evidence::Proof(p)),
        None if sat.is_saturated() => (
            Status::NotEstablished,
            Evidence::NotDerivable {
                closure_size: sat.len(),
            },
        ),
        None => (
            Status::Inconclusive,
            Evidence::BudgetExhausted { explored: sat.len() },
        ),
    }
}

/// Maps system symbols onto DAG nodes by label.
struct Embedding {
    nodes: Vec<SymbolId>,
}

impl Embedding {
    fn new(sys: &PanelSystem, dag: &Dag) -> Result<Embedding, ProtocolError> {
        let nodes = sys
            .universe()
            .labels()
            .iter()
            .map(|l| {
                dag.universe().id(l).ok_or_else(|| {
                    ProtocolError::UniverseMismatch(alloc::format!("the graph has no node {l}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Embedding { nodes })
    }

    fn map(&self, set: VarSet) -> VarSet {
        set.iter().map(|id| self.nodes[id.index()]).collect()
    }
}

fn graphical_outcome(sys: &PanelSystem, dag: &Dag, embed: &Embedding, s: &CIStatement) -> (Status, Evidence) {
    // Plain d-separation cannot see functional dependencies, so condition
    // on everything the conditioning set determines.
    let c = sys.determinism().closure(s.c());
    let a = s.a().difference(c);
    let b = s.b().difference(c);
    let conditioning = sys.universe().set_labels(c);
    if a.is_empty() || b.is_empty() {
        return (Status::Holds, Evidence::DSeparated { conditioning });
    }
    let q = CIQuery::new(embed.map(a), embed.map(b), embed.map(c)).expect("sides are disjoint and nonempty");
    match active_trail(dag, &q).expect("embedded query is within the graph") {
        None => (Status::Holds, Evidence::DSeparated { conditioning }),
        Some(trail) => (
            Status::NotEstablished,
            Evidence::ActiveTrail(trail.into_iter().map(|v| dag.label(v).to_string()).collect()),
        ),
    }
}

/// Tests one statement over the system universe against a DAG, closing its
/// conditioning set under the determinism facts first.
pub fn graph_check(sys: &PanelSystem, dag: &Dag, s: &CIStatement) -> Result<(Status, Evidence), ProtocolError> {
    if !s.symbols().is_subset(sys.universe().all()) {
        return Err(ProtocolError::UniverseMismatch(
            "the statement uses symbols outside the panel system".to_string(),
        ));
    }
    let embed = Embedding::new(sys, dag)?;
    Ok(graphical_outcome(sys, dag, &embed, s))
}

fn statuses<'a>(
    sys: &PanelSystem,
    mode: Mode<'_>,
    sat: Option<&Saturation>,
    instances: impl Iterator<Item = (Option<&'a CIStatement>, &'a mut Status, &'a mut Option<Evidence>)>,
) -> Result<(), ProtocolError> {
    let embed = match mode {
        Mode::Graphical(dag) => Some(Embedding::new(sys, dag)?),
        Mode::Axiomatic(_) => None,
    };
    for (statement, status, evidence) in instances {
        let Some(s) = statement else {
            *status = Status::Vacuous;
            continue;
        };
        let (st, ev) = match (mode, sat) {
            (Mode::Axiomatic(base), Some(sat)) => saturation_outcome(sat, base, s),
            (Mode::Graphical(dag), _) => graphical_outcome(sys, dag, embed.as_ref().expect("graph mode"), s),
            (Mode::Axiomatic(_), None) => unreachable!("axiomatic checks need a saturation"),
        };
        *status = st;
        *evidence = Some(ev);
    }
    Ok(())
}

fn blank_conditions(sys: &PanelSystem) -> Vec<ConditionCheck> {
    sys.all_condition_instances()
        .into_iter()
        .map(|c| ConditionCheck {
            kind: c.kind,
            panel: c.panel,
            statement: c.statement,
            status: Status::Vacuous,
            evidence: None,
        })
        .collect()
}

fn blank_goals(sys: &PanelSystem) -> Vec<GoalCheck> {
    let mut out = Vec::new();
    for panel in 0..sys.panels() {
        for goal in Goal::ALL {
            out.push(GoalCheck {
                goal,
                panel,
                statement: sys.goal_statement(goal, panel).expect("panel in range"),
                status: Status::Vacuous,
                evidence: None,
            });
        }
    }
    out
}

/// Checks every condition instance. In axiomatic mode each is looked up in,
/// or derived from, the asserted base; in graphical mode each is tested
/// for d-separation.
pub fn check_conditions(sys: &PanelSystem, mode: Mode<'_>, budget: usize) -> Result<Vec<ConditionCheck>, ProtocolError> {
    let mut conditions = blank_conditions(sys);
    let sat = match mode {
        Mode::Axiomatic(base) => {
            check_base(sys, base)?;
            let targets: Vec<CIStatement> = conditions.iter().filter_map(|c| c.statement).collect();
            Some(saturate_towards(base, sys.determinism(), sys.universe().all(), &targets, budget)?)
        }
        Mode::Graphical(_) => None,
    };
    statuses(
        sys,
        mode,
        sat.as_ref(),
        conditions
            .iter_mut()
            .map(|c| (c.statement.as_ref(), &mut c.status, &mut c.evidence)),
    )?;
    Ok(conditions)
}

/// Checks the conditions, then tries to derive both goals for every panel.
///
/// In axiomatic mode the goals are derived from the asserted base. In
/// graphical mode they are derived from the condition statements that hold
/// in the graph.
pub fn verify_distributed(sys: &PanelSystem, mode: Mode<'_>, budget: usize) -> Result<Verdict, ProtocolError> {
    let mut conditions = blank_conditions(sys);
    let mut goals = blank_goals(sys);
    let goal_statements: Vec<CIStatement> = goals.iter().filter_map(|g| g.statement).collect();

    let held: Vec<CIStatement>;
    let sat = match mode {
        Mode::Axiomatic(base) => {
            check_base(sys, base)?;
            held = base.to_vec();
            let targets: Vec<CIStatement> = conditions
                .iter()
                .filter_map(|c| c.statement)
                .chain(goal_statements.iter().copied())
                .collect();
            saturate_towards(base, sys.determinism(), sys.universe().all(), &targets, budget)?
        }
        Mode::Graphical(_) => {
            statuses(
                sys,
                mode,
                None,
                conditions
                    .iter_mut()
                    .map(|c| (c.statement.as_ref(), &mut c.status, &mut c.evidence)),
            )?;
            let mut holding: Vec<CIStatement> = conditions
                .iter()
                .filter(|c| c.status == Status::Holds)
                .filter_map(|c| c.statement)
                .collect();
            holding.sort_unstable();
            holding.dedup();
            held = holding;
            saturate_towards(&held, sys.determinism(), sys.universe().all(), &goal_statements, budget)?
        }
    };

    if let Mode::Axiomatic(_) = mode {
        statuses(
            sys,
            mode,
            Some(&sat),
            conditions
                .iter_mut()
                .map(|c| (c.statement.as_ref(), &mut c.status, &mut c.evidence)),
        )?;
    }
    // Goals are always judged by derivation, never by direct membership.
    for g in &mut goals {
        let Some(s) = &g.statement else { continue };
        let (status, mut evidence) = saturation_outcome(&sat, &[], s);
        if status == Status::Holds {
            // Prefer the derivation routed through the standard lemmas.
            let lemmas = sys.lemmas(g.goal, g.panel)?;
            if let Ok(p) = derive_via(&held, sys.determinism(), &lemmas, s, budget) {
                evidence = Evidence::Proof(p);
            }
        }
        g.status = status;
        g.evidence = Some(evidence);
    }
    let sound_and_distributed = goals
        .iter()
        .all(|g| matches!(g.status, Status::Holds | Status::Vacuous));
    Ok(Verdict {
        panels: sys.panels(),
        mode: mode.name(),
        common_separation: sys.overrides().common_separation,
        conditions,
        goals,
        sound_and_distributed,
    })
}

/// Re-runs the axiomatic verifier with all of `base`, then with each
/// condition's statements removed in turn.
pub fn ablate(sys: &PanelSystem, base: &[CIStatement], budget: usize) -> Result<Vec<AblationRow>, ProtocolError> {
    let mut rows = Vec::with_capacity(1 + ConditionKind::ALL.len());
    rows.push(AblationRow {
        dropped: None,
        verdict: verify_distributed(sys, Mode::Axiomatic(base), budget)?,
    });
    for kind in ConditionKind::ALL {
        let removed: Vec<CIStatement> = sys
            .condition_instances(kind)
            .into_iter()
            .filter_map(|c| c.statement)
            .collect();
        let reduced: Vec<CIStatement> = base.iter().filter(|s| !removed.contains(s)).copied().collect();
        rows.push(AblationRow {
            dropped: Some(kind),
            verdict: verify_distributed(sys, Mode::Axiomatic(&reduced), budget)?,
        });
    }
    Ok(rows)
}
