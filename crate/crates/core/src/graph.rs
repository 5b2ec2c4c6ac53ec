//! Directed acyclic graphs over typed nodes, with an exact d-separation
//! test.
//!
//! A `false` from [`d_separated`] only means the independence is not
//! guaranteed by the structure. Faithfulness is never assumed.

use alloc::collections::VecDeque;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ci::{normalize, CIStatement, CiError, SymbolId, Universe, VarSet};

/// Role of a node. Carries no meaning for d-separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Parameter,
    Evidence,
    Data,
    CommonKnowledge,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Parameter => "parameter",
            NodeKind::Evidence => "evidence",
            NodeKind::Data => "data",
            NodeKind::CommonKnowledge => "common-knowledge",
        }
    }

    pub fn from_name(name: &str) -> Option<NodeKind> {
        [
            NodeKind::Parameter,
            NodeKind::Evidence,
            NodeKind::Data,
            NodeKind::CommonKnowledge,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    CycleDetected(Vec<String>),
    UnknownEndpoint(String),
    DuplicateNode(String),
    SelfLoop(String),
    UnknownSymbol(String),
    OverlappingSets,
    EmptySide,
    TooManyNodes,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::CycleDetected(nodes) => write!(f, "cycle through {}", nodes.join(" -> ")),
            GraphError::UnknownEndpoint(n) => write!(f, "edge endpoint `{n}` is not a declared node"),
            GraphError::DuplicateNode(n) => write!(f, "node `{n}` declared twice"),
            GraphError::SelfLoop(n) => write!(f, "self-loop on `{n}`"),
            GraphError::UnknownSymbol(n) => write!(f, "`{n}` is not a node of the graph"),
            GraphError::OverlappingSets => f.write_str("query sets must be pairwise disjoint"),
            GraphError::EmptySide => f.write_str("query sides must be non-empty"),
            GraphError::TooManyNodes => {
                write!(f, "graphs hold at most {} nodes", crate::ci::MAX_SYMBOLS)
            }
        }
    }
}

impl core::error::Error for GraphError {}

impl From<CiError> for GraphError {
    fn from(e: CiError) -> Self {
        match e {
            CiError::DuplicateSymbol(n) => GraphError::DuplicateNode(n),
            CiError::UnknownSymbol(n) => GraphError::UnknownSymbol(n),
            CiError::TooManySymbols => GraphError::TooManyNodes,
            CiError::EmptySide => GraphError::EmptySide,
            _ => GraphError::OverlappingSets,
        }
    }
}

/// A validated DAG. Node ids are symbols of the graph's own [`Universe`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    universe: Universe,
    kinds: Vec<NodeKind>,
    parents: Vec<VarSet>,
    children: Vec<VarSet>,
}

/// Validates nodes and edges and builds the graph.
pub fn build_dag<N, E>(nodes: &[(N, NodeKind)], edges: &[(E, E)]) -> Result<Dag, GraphError>
where
    N: AsRef<str>,
    E: AsRef<str>,
{
    let mut universe = Universe::new();
    let mut kinds = Vec::with_capacity(nodes.len());
    for (label, kind) in nodes {
        universe.add(label.as_ref())?;
        kinds.push(*kind);
    }
    let n = universe.len();
    let mut parents = alloc::vec![VarSet::EMPTY; n];
    let mut children = alloc::vec![VarSet::EMPTY; n];
    for (from, to) in edges {
        let endpoint = |label: &str| {
            universe
                .id(label)
                .ok_or_else(|| GraphError::UnknownEndpoint(label.to_string()))
        };
        let (u, v) = (endpoint(from.as_ref())?, endpoint(to.as_ref())?);
        if u == v {
            return Err(GraphError::SelfLoop(from.as_ref().to_string()));
        }
        parents[v.index()] = parents[v.index()].with(u);
        children[u.index()] = children[u.index()].with(v);
    }
    let dag = Dag {
        universe,
        kinds,
        parents,
        children,
    };
    if let Some(cycle) = dag.find_cycle() {
        return Err(GraphError::CycleDetected(cycle));
    }
    Ok(dag)
}

impl Dag {
    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.universe.all().iter()
    }

    pub fn kind(&self, v: SymbolId) -> NodeKind {
        self.kinds[v.index()]
    }

    pub fn label(&self, v: SymbolId) -> &str {
        self.universe.label(v)
    }

    pub fn parents(&self, v: SymbolId) -> VarSet {
        self.parents[v.index()]
    }

    pub fn children(&self, v: SymbolId) -> VarSet {
        self.children[v.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = (SymbolId, SymbolId)> + '_ {
        self.nodes()
            .flat_map(move |u| self.children(u).iter().map(move |v| (u, v)))
    }

    /// Strict descendants of `v`.
    pub fn descendants(&self, v: SymbolId) -> VarSet {
        let mut seen = VarSet::EMPTY;
        let mut stack: Vec<SymbolId> = self.children(v).iter().collect();
        while let Some(u) = stack.pop() {
            if seen.contains(u) {
                continue;
            }
            seen = seen.with(u);
            stack.extend(self.children(u).iter());
        }
        seen
    }

    /// `set` together with all its ancestors.
    pub fn ancestral_closure(&self, set: VarSet) -> VarSet {
        let mut seen = VarSet::EMPTY;
        let mut stack: Vec<SymbolId> = set.iter().collect();
        while let Some(u) = stack.pop() {
            if seen.contains(u) {
                continue;
            }
            seen = seen.with(u);
            stack.extend(self.parents(u).iter());
        }
        seen
    }

    fn find_cycle(&self) -> Option<Vec<String>> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = alloc::vec![0u8; self.len()];
        let mut path: Vec<SymbolId> = Vec::new();
        for root in self.nodes() {
            if state[root.index()] != 0 {
                continue;
            }
            let mut stack: Vec<(SymbolId, Vec<SymbolId>)> =
                alloc::vec![(root, self.children(root).iter().collect())];
            state[root.index()] = 1;
            path.push(root);
            while let Some((node, pending)) = stack.last_mut() {
                let node = *node;
                match pending.pop() {
                    Some(next) if state[next.index()] == 1 => {
                        let at = path.iter().position(|&p| p == next).unwrap_or(0);
                        let mut cycle: Vec<String> =
                            path[at..].iter().map(|&p| self.label(p).to_string()).collect();
                        cycle.push(self.label(next).to_string());
                        return Some(cycle);
                    }
                    Some(next) if state[next.index()] == 0 => {
                        state[next.index()] = 1;
                        path.push(next);
                        stack.push((next, self.children(next).iter().collect()));
                    }
                    Some(_) => {}
                    None => {
                        state[node.index()] = 2;
                        path.pop();
                        stack.pop();
                    }
                }
            }
        }
        None
    }
}

/// A d-separation query `a ⫫ b | c` over the nodes of a [`Dag`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CIQuery {
    pub a: VarSet,
    pub b: VarSet,
    pub c: VarSet,
}

impl CIQuery {
    pub fn new(a: VarSet, b: VarSet, c: VarSet) -> Result<CIQuery, GraphError> {
        if a.is_empty() || b.is_empty() {
            return Err(GraphError::EmptySide);
        }
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(GraphError::OverlappingSets);
        }
        Ok(CIQuery { a, b, c })
    }

    pub fn from_labels<S: AsRef<str>>(dag: &Dag, a: &[S], b: &[S], c: &[S]) -> Result<CIQuery, GraphError> {
        let u = dag.universe();
        CIQuery::new(u.set(a)?, u.set(b)?, u.set(c)?)
    }

    pub fn from_statement(s: &CIStatement) -> CIQuery {
        CIQuery {
            a: s.a(),
            b: s.b(),
            c: s.c(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    // Arrived from a child (or started here).
    Up,
    // Arrived from a parent.
    Down,
}

fn check_query(dag: &Dag, q: &CIQuery) -> Result<(), GraphError> {
    let all = dag.universe().all();
    for set in [q.a, q.b, q.c] {
        if let Some(bad) = set.difference(all).first() {
            return Err(GraphError::UnknownSymbol(alloc::format!("#{}", bad.index())));
        }
    }
    CIQuery::new(q.a, q.b, q.c).map(|_| ())
}

/// Finds an active trail from `q.a` to `q.b` given `q.c`, as a node path
/// from an `a` node to a `b` node. `None` means the sets are d-separated.
pub fn active_trail(dag: &Dag, q: &CIQuery) -> Result<Option<Vec<SymbolId>>, GraphError> {
    check_query(dag, q)?;
    let n = dag.len();
    let with_evidence_below = dag.ancestral_closure(q.c);
    let slot = |v: SymbolId, d: Dir| v.index() * 2 + (d == Dir::Down) as usize;
    let mut prev: Vec<Option<usize>> = alloc::vec![None; 2 * n];
    let mut seen = alloc::vec![false; 2 * n];
    let mut queue = VecDeque::new();
    for x in q.a.iter() {
        seen[slot(x, Dir::Up)] = true;
        queue.push_back((x, Dir::Up));
    }
    while let Some((v, dir)) = queue.pop_front() {
        let here = slot(v, dir);
        if q.b.contains(v) {
            let mut path = alloc::vec![v];
            let mut at = here;
            while let Some(p) = prev[at] {
                let node = SymbolId::new(p / 2).expect("valid slot");
                if path.last() != Some(&node) {
                    path.push(node);
                }
                at = p;
            }
            path.reverse();
            return Ok(Some(path));
        }
        let mut visit = |u: SymbolId, d: Dir, queue: &mut VecDeque<(SymbolId, Dir)>| {
            let s = slot(u, d);
            if !seen[s] {
                seen[s] = true;
                prev[s] = Some(here);
                queue.push_back((u, d));
            }
        };
        let observed = q.c.contains(v);
        match dir {
            Dir::Up if !observed => {
                for p in dag.parents(v).iter() {
                    visit(p, Dir::Up, &mut queue);
                }
                for c in dag.children(v).iter() {
                    visit(c, Dir::Down, &mut queue);
                }
            }
            Dir::Up => {}
            Dir::Down => {
                if !observed {
                    for c in dag.children(v).iter() {
                        visit(c, Dir::Down, &mut queue);
                    }
                }
                if with_evidence_below.contains(v) {
                    for p in dag.parents(v).iter() {
                        visit(p, Dir::Up, &mut queue);
                    }
                }
            }
        }
    }
    Ok(None)
}

/// True iff every trail between `q.a` and `q.b` is blocked by `q.c`.
pub fn d_separated(dag: &Dag, q: &CIQuery) -> Result<bool, GraphError> {
    Ok(active_trail(dag, q)?.is_none())
}

/// The local Markov statements `v ⫫ nd(v) \ pa(v) | pa(v)` for every node
/// with a non-empty non-descendant remainder, as a set (two nodes may
/// yield the same canonical statement). Statements are over the graph's
/// universe.
pub fn local_markov_basis(dag: &Dag) -> Vec<CIStatement> {
    let all = dag.universe().all();
    let mut out: Vec<CIStatement> = dag
        .nodes()
        .filter_map(|v| {
            let parents = dag.parents(v);
            let rest = all
                .difference(dag.descendants(v))
                .without(v)
                .difference(parents);
            normalize(VarSet::singleton(v), rest, parents).ok()
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
