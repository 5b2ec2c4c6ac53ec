use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ci::{normalize, CIStatement, CiError, Determinism, FunctionalDependency, SymbolId, Universe, VarSet};
use crate::graph::{build_dag, Dag, GraphError, NodeKind};

/// Largest panel count whose symbol universe fits in a [`VarSet`].
pub const MAX_PANELS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    InvalidPanelCount,
    TooManyPanels(usize),
    IndexOutOfRange { panel: usize, panels: usize },
    UniverseMismatch(String),
    Graph(GraphError),
    Ci(CiError),
}

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolError::InvalidPanelCount => f.write_str("a panel system needs at least one panel"),
            ProtocolError::TooManyPanels(m) => {
                write!(f, "{m} panels exceed the supported maximum of {MAX_PANELS}")
            }
            ProtocolError::IndexOutOfRange { panel, panels } => {
                write!(f, "panel {} is outside 1..={panels}", panel + 1)
            }
            ProtocolError::UniverseMismatch(why) => write!(f, "universe mismatch: {why}"),
            ProtocolError::Graph(e) => e.fmt(f),
            ProtocolError::Ci(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for ProtocolError {}

impl From<GraphError> for ProtocolError {
    fn from(e: GraphError) -> Self {
        ProtocolError::Graph(e)
    }
}

impl From<CiError> for ProtocolError {
    fn from(e: CiError) -> Self {
        ProtocolError::Ci(e)
    }
}

/// The four admissibility-protocol conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionKind {
    /// `I₊ ⫫ θ | I₀, I⁎`
    Delegable,
    /// `I_ii ⫫ θ_{i⁻} | I₀, θ_i` for each panel
    SeparatelyInformed,
    /// `I⁎ ⫫ θ_i | I₀, I_ii, θ_{i⁻}` for each panel
    Cutting,
    /// `θ_i ⫫ θ_{i⁻} | I₀` for each panel
    CommonlySeparated,
}

impl ConditionKind {
    pub const ALL: [ConditionKind; 4] = [
        ConditionKind::Delegable,
        ConditionKind::SeparatelyInformed,
        ConditionKind::Cutting,
        ConditionKind::CommonlySeparated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::Delegable => "delegable",
            ConditionKind::SeparatelyInformed => "separately-informed",
            ConditionKind::Cutting => "cutting",
            ConditionKind::CommonlySeparated => "commonly-separated",
        }
    }

    pub fn from_name(name: &str) -> Option<ConditionKind> {
        ConditionKind::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn per_panel(self) -> bool {
        self != ConditionKind::Delegable
    }
}

/// The two conclusions that make supra-Bayesian inference sound and
/// distributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Goal {
    /// `θ_i ⫫ θ_{i⁻} | I₊`
    PanelIndependence,
    /// `θ_i ⫫ I₊ | I₀, I_ii`
    AutonomousUpdating,
}

impl Goal {
    pub const ALL: [Goal; 2] = [Goal::PanelIndependence, Goal::AutonomousUpdating];

    pub fn name(self) -> &'static str {
        match self {
            Goal::PanelIndependence => "panel-independence",
            Goal::AutonomousUpdating => "autonomous-updating",
        }
    }
}

/// How the common-separation condition at the current epoch is justified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CommonSeparation {
    /// Asserted afresh at every epoch.
    #[default]
    EveryEpoch,
    /// Asserted at the initial epoch and carried forward by panel-separable
    /// likelihoods.
    CarriedFromInitial,
}

impl CommonSeparation {
    pub fn name(self) -> &'static str {
        match self {
            CommonSeparation::EveryEpoch => "every-epoch",
            CommonSeparation::CarriedFromInitial => "carried-from-initial",
        }
    }

    pub fn from_name(name: &str) -> Option<CommonSeparation> {
        [CommonSeparation::EveryEpoch, CommonSeparation::CarriedFromInitial]
            .into_iter()
            .find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub common_separation: CommonSeparation,
    /// Conditions left out of [`PanelSystem::axiomatic_base`].
    pub excluded: Vec<ConditionKind>,
}

/// A grouped functional-dependency fact: every symbol of `determined` is a
/// function of `determiners`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Determination {
    pub determiners: VarSet,
    pub determined: VarSet,
}

/// One instance of a condition. `statement` is `None` when the condition
/// is vacuous, which happens for the per-panel conditions when `m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionInstance {
    pub kind: ConditionKind,
    pub panel: Option<usize>,
    pub statement: Option<CIStatement>,
}

/// An `m`-panel composite system at one epoch.
///
/// Symbols are, in order: `theta_1..theta_m`, `I_0`, `I_ij` for every
/// ordered pair, `I_plus` and `I_star`. Panels are indexed from zero in the
/// API and from one in labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PanelSystem {
    m: usize,
    epoch: u64,
    universe: Universe,
    theta: Vec<SymbolId>,
    i0: SymbolId,
    evidence: Vec<SymbolId>,
    i_plus: SymbolId,
    i_star: SymbolId,
    facts: Vec<Determination>,
    determinism: Determinism,
    overrides: Overrides,
}

fn evidence_label(i: usize, j: usize) -> String {
    format!("I_{}{}", i + 1, j + 1)
}

/// Instantiates the symbol universe and determinism facts for `m` panels.
pub fn build_system(m: usize, epoch: u64, overrides: Overrides) -> Result<PanelSystem, ProtocolError> {
    if m == 0 {
        return Err(ProtocolError::InvalidPanelCount);
    }
    if m > MAX_PANELS {
        return Err(ProtocolError::TooManyPanels(m));
    }
    let mut universe = Universe::new();
    let theta = (0..m)
        .map(|i| universe.add(&format!("theta_{}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let i0 = universe.add("I_0")?;
    let mut evidence = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            evidence.push(universe.add(&evidence_label(i, j))?);
        }
    }
    let i_plus = universe.add("I_plus")?;
    let i_star = universe.add("I_star")?;

    let own: VarSet = (0..m).map(|i| evidence[i * m + i]).collect();
    let admissible: VarSet = evidence.iter().copied().collect::<VarSet>().with(i0).with(i_star);
    let facts = alloc::vec![
        // I_star is the collection of the panels' own evidence...
        Determination {
            determiners: own,
            determined: VarSet::singleton(i_star),
        },
        // ...so each I_ii is a function of it.
        Determination {
            determiners: VarSet::singleton(i_star),
            determined: own,
        },
        Determination {
            determiners: VarSet::singleton(i_plus),
            determined: admissible,
        },
    ];
    let mut deps = Vec::new();
    for fact in &facts {
        for x in fact.determined.iter() {
            deps.push(FunctionalDependency::new(x, fact.determiners)?);
        }
    }
    Ok(PanelSystem {
        m,
        epoch,
        universe,
        theta,
        i0,
        evidence,
        i_plus,
        i_star,
        facts,
        determinism: Determinism::new(deps),
        overrides,
    })
}

impl PanelSystem {
    pub fn panels(&self) -> usize {
        self.m
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn determinism(&self) -> &Determinism {
        &self.determinism
    }

    pub fn facts(&self) -> &[Determination] {
        &self.facts
    }

    pub fn overrides(&self) -> &Overrides {
        &self.overrides
    }

    pub fn theta(&self, i: usize) -> SymbolId {
        self.theta[i]
    }

    pub fn thetas(&self) -> VarSet {
        self.theta.iter().copied().collect()
    }

    /// `θ_{i⁻}`: every parameter block except panel `i`'s.
    pub fn other_thetas(&self, i: usize) -> VarSet {
        self.thetas().without(self.theta[i])
    }

    pub fn common(&self) -> SymbolId {
        self.i0
    }

    /// `I_ij`: evidence panel `i` would use about `θ_j`.
    pub fn evidence(&self, i: usize, j: usize) -> SymbolId {
        self.evidence[i * self.m + j]
    }

    pub fn admissible(&self) -> SymbolId {
        self.i_plus
    }

    pub fn own_evidence(&self) -> SymbolId {
        self.i_star
    }

    fn check_panel(&self, i: usize) -> Result<(), ProtocolError> {
        if i < self.m {
            Ok(())
        } else {
            Err(ProtocolError::IndexOutOfRange {
                panel: i,
                panels: self.m,
            })
        }
    }

    fn one(&self, id: SymbolId) -> VarSet {
        VarSet::singleton(id)
    }

    fn vacuous_or(a: VarSet, b: VarSet, c: VarSet) -> Result<Option<CIStatement>, ProtocolError> {
        match normalize(a, b, c) {
            Ok(s) => Ok(Some(s)),
            Err(CiError::EmptySide) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// The statement of condition `kind` for panel `i`. The delegable
    /// condition does not depend on the panel; any valid index returns it.
    pub fn condition_statement(&self, kind: ConditionKind, i: usize) -> Result<Option<CIStatement>, ProtocolError> {
        self.check_panel(i)?;
        let i0 = self.one(self.i0);
        let own = self.one(self.evidence(i, i));
        let theta_i = self.one(self.theta[i]);
        let rest = self.other_thetas(i);
        match kind {
            ConditionKind::Delegable => Self::vacuous_or(
                self.one(self.i_plus),
                self.thetas(),
                i0.with(self.i_star),
            ),
            ConditionKind::SeparatelyInformed => Self::vacuous_or(own, rest, i0.union(theta_i)),
            ConditionKind::Cutting => Self::vacuous_or(
                self.one(self.i_star),
                theta_i,
                i0.union(own).union(rest),
            ),
            ConditionKind::CommonlySeparated => Self::vacuous_or(theta_i, rest, i0),
        }
    }

    /// Every instance of `kind`: one for the delegable condition, one per
    /// panel otherwise.
    pub fn condition_instances(&self, kind: ConditionKind) -> Vec<ConditionInstance> {
        if kind.per_panel() {
            (0..self.m)
                .map(|i| ConditionInstance {
                    kind,
                    panel: Some(i),
                    statement: self.condition_statement(kind, i).expect("panel in range"),
                })
                .collect()
        } else {
            alloc::vec![ConditionInstance {
                kind,
                panel: None,
                statement: self.condition_statement(kind, 0).expect("panel in range"),
            }]
        }
    }

    pub fn all_condition_instances(&self) -> Vec<ConditionInstance> {
        ConditionKind::ALL
            .into_iter()
            .flat_map(|k| self.condition_instances(k))
            .collect()
    }

    /// Statements of every condition not excluded by the overrides.
    pub fn axiomatic_base(&self) -> Vec<CIStatement> {
        self.base_without(&self.overrides.excluded)
    }

    pub fn base_without(&self, excluded: &[ConditionKind]) -> Vec<CIStatement> {
        let mut out: Vec<CIStatement> = ConditionKind::ALL
            .into_iter()
            .filter(|k| !excluded.contains(k))
            .flat_map(|k| self.condition_instances(k))
            .filter_map(|c| c.statement)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The goal statement for panel `i`, or `None` if it is vacuous.
    pub fn goal_statement(&self, goal: Goal, i: usize) -> Result<Option<CIStatement>, ProtocolError> {
        self.check_panel(i)?;
        let theta_i = self.one(self.theta[i]);
        let plus = self.one(self.i_plus);
        match goal {
            Goal::PanelIndependence => Self::vacuous_or(theta_i, self.other_thetas(i), plus),
            Goal::AutonomousUpdating => Self::vacuous_or(
                theta_i,
                plus,
                self.one(self.i0).with(self.evidence(i, i)),
            ),
        }
    }

    /// Intermediate lemmas for a structured derivation of `goal`, in the
    /// order they are proved. Vacuous lemmas are omitted.
    pub fn lemmas(&self, goal: Goal, i: usize) -> Result<Vec<CIStatement>, ProtocolError> {
        self.check_panel(i)?;
        let theta_i = self.one(self.theta[i]);
        let rest = self.other_thetas(i);
        let i0 = self.one(self.i0);
        let own = i0.with(self.evidence(i, i));
        let star = self.one(self.i_star);
        let plus = self.one(self.i_plus);
        let cut = Self::vacuous_or(theta_i, star.union(rest), own)?;
        let chain = match goal {
            Goal::PanelIndependence => alloc::vec![cut, Self::vacuous_or(theta_i, rest, i0.union(star))?],
            Goal::AutonomousUpdating => alloc::vec![
                cut,
                Self::vacuous_or(theta_i, plus, own.union(star))?,
                Self::vacuous_or(theta_i, star, own)?,
            ],
        };
        let mut out: Vec<CIStatement> = Vec::new();
        for s in chain.into_iter().flatten() {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// A reference DAG on which all four conditions hold: parameters are
    /// roots, `I_0` is exogenous, each `I_ii` has parents `θ_i` and `I_0`,
    /// the cross-panel `I_ij` depend on `I_0` only, `I_star` aggregates the
    /// `I_ii`, and `I_plus` aggregates `I_0`, `I_star` and the `I_ij`.
    pub fn canonical_dag(&self) -> Dag {
        self.dag_with(&[], &[])
    }

    /// The reference DAG plus extra latent nodes and edges, e.g. a hidden
    /// confounder of two parameter blocks.
    pub fn dag_with(&self, extra_nodes: &[(&str, NodeKind)], extra_edges: &[(&str, &str)]) -> Dag {
        self.try_dag_with(extra_nodes, extra_edges)
            .expect("reference structure is acyclic")
    }

    pub fn try_dag_with(
        &self,
        extra_nodes: &[(&str, NodeKind)],
        extra_edges: &[(&str, &str)],
    ) -> Result<Dag, ProtocolError> {
        let u = &self.universe;
        let mut nodes: Vec<(String, NodeKind)> = Vec::new();
        for &t in &self.theta {
            nodes.push((u.label(t).into(), NodeKind::Parameter));
        }
        nodes.push((u.label(self.i0).into(), NodeKind::CommonKnowledge));
        for &e in &self.evidence {
            nodes.push((u.label(e).into(), NodeKind::Evidence));
        }
        nodes.push((u.label(self.i_plus).into(), NodeKind::Evidence));
        nodes.push((u.label(self.i_star).into(), NodeKind::Evidence));
        for (label, kind) in extra_nodes {
            nodes.push(((*label).into(), *kind));
        }

        let mut edges: Vec<(String, String)> = Vec::new();
        let mut edge = |a: SymbolId, b: SymbolId| edges.push((u.label(a).into(), u.label(b).into()));
        edge(self.i0, self.i_plus);
        edge(self.i_star, self.i_plus);
        for i in 0..self.m {
            for j in 0..self.m {
                let e = self.evidence(i, j);
                if i == j {
                    edge(self.theta[i], e);
                    edge(self.i0, e);
                    edge(e, self.i_star);
                } else {
                    edge(self.i0, e);
                    edge(e, self.i_plus);
                }
            }
        }
        for (a, b) in extra_edges {
            edges.push(((*a).into(), (*b).into()));
        }
        Ok(build_dag(&nodes, &edges)?)
    }
}
