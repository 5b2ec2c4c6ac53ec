//! Spec files: one TOML document per run.
//!
//! Parsing happens in two passes. The raw document is first checked for
//! its `version`, then deserialized strictly (unknown keys are errors) and
//! finally resolved: statements are parsed against the symbols they may
//! use, graphs are built, and models are validated. A [`Spec`] therefore
//! only holds references that resolve.

use std::path::Path;

use modcoh_core::ci::{CIStatement, CiError, Determinism, FunctionalDependency, Universe};
use modcoh_core::graph::{build_dag, Dag, GraphError, NodeKind};
use modcoh_core::panels::{BetaParams, DirichletParams, Factor, FactorSpec, PanelError, TwoByTwo};
use modcoh_core::protocol::{build_system, CommonSeparation, ConditionKind, Overrides, PanelSystem, ProtocolError};
use serde::Deserialize;

pub const SPEC_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown spec version `{0}` (supported: \"1\")")]
    UnknownVersion(String),
    #[error("unresolved symbol `{symbol}` in {location}")]
    UnresolvedSymbol { symbol: String, location: String },
    #[error("missing section [{section}], required by `{command}`")]
    MissingSection { section: &'static str, command: &'static str },
    #[error("invalid {location}: {message}")]
    Invalid { location: String, message: String },
}

impl SpecError {
    fn invalid(location: impl Into<String>, message: impl ToString) -> SpecError {
        SpecError::Invalid {
            location: location.into(),
            message: message.to_string(),
        }
    }

    fn from_ci(location: impl Into<String>, e: CiError) -> SpecError {
        match e {
            CiError::UnknownSymbol(symbol) => SpecError::UnresolvedSymbol {
                symbol,
                location: location.into(),
            },
            other => SpecError::invalid(location, other),
        }
    }

    fn from_graph(location: impl Into<String>, e: GraphError) -> SpecError {
        match e {
            GraphError::UnknownEndpoint(symbol) | GraphError::UnknownSymbol(symbol) => SpecError::UnresolvedSymbol {
                symbol,
                location: location.into(),
            },
            other => SpecError::invalid(location, other),
        }
    }

    fn from_protocol(location: impl Into<String>, e: ProtocolError) -> SpecError {
        match e {
            ProtocolError::Graph(g) => SpecError::from_graph(location, g),
            ProtocolError::Ci(c) => SpecError::from_ci(location, c),
            other => SpecError::invalid(location, other),
        }
    }

    fn from_panel(location: impl Into<String>, e: PanelError) -> SpecError {
        SpecError::invalid(location, e)
    }
}

// Raw, strictly deserialized document.

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[allow(dead_code)]
    version: String,
    protocol: Option<RawProtocol>,
    statements: Option<RawStatements>,
    graph: Option<RawGraph>,
    #[serde(default)]
    derive: Vec<RawDerive>,
    #[serde(default)]
    query: Vec<RawQuery>,
    model: Option<RawModel>,
    run: Option<RawRun>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    panels: usize,
    #[serde(default)]
    epoch: u64,
    common_separation: Option<String>,
    #[serde(default = "yes")]
    conditions: bool,
    #[serde(default)]
    exclude: Vec<String>,
    #[serde(default)]
    statements: Vec<String>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStatements {
    symbols: Vec<String>,
    #[serde(default)]
    base: Vec<String>,
    #[serde(default)]
    deps: Vec<RawDep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDep {
    determined: String,
    by: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    extends: Option<String>,
    #[serde(default)]
    nodes: Vec<RawNode>,
    #[serde(default)]
    edges: Vec<[String; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    kind: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDerive {
    goal: String,
    #[serde(default)]
    via: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuery {
    a: Vec<String>,
    b: Vec<String>,
    #[serde(default)]
    c: Vec<String>,
    expect: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    mode: Option<String>,
    grid: Option<usize>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    budget: Option<usize>,
    samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawModel {
    Table {
        table: [[u64; 2]; 2],
        margin_prior: Option<RawPrior>,
        cell_prior: Option<RawPrior>,
        psi: Option<RawPsi>,
    },
    Factors {
        #[serde(default)]
        panel: Vec<RawPanel>,
        #[serde(default)]
        factor: Vec<RawFactor>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawPsi {
    Value(f64),
    Named(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
enum RawPrior {
    Uniform,
    Beta([f64; 2]),
    Dirichlet(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPanel {
    prior: RawPrior,
    resolution: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
enum RawFactor {
    Bernoulli {
        block: usize,
        successes: u64,
        trials: u64,
    },
    Categorical {
        block: usize,
        counts: Vec<u64>,
    },
    Interaction {
        blocks: [usize; 2],
        psi: f64,
        n11: u64,
        total: u64,
    },
    Bilinear {
        blocks: [usize; 2],
        lambda: f64,
    },
}

// Resolved spec.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    Axiomatic,
    Graphical,
}

impl ModeChoice {
    pub fn name(self) -> &'static str {
        match self {
            ModeChoice::Axiomatic => "axiomatic",
            ModeChoice::Graphical => "graphical",
        }
    }

    pub fn from_name(name: &str) -> Option<ModeChoice> {
        match name {
            "axiomatic" => Some(ModeChoice::Axiomatic),
            "graphical" => Some(ModeChoice::Graphical),
            _ => None,
        }
    }
}

/// Run options from the `[run]` section; command-line flags override them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub mode: Option<ModeChoice>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub budget: Option<usize>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ProtocolSpec {
    pub system: PanelSystem,
    /// Asserted statements: the generated conditions (minus exclusions)
    /// followed by any explicit extras, deduplicated.
    pub base: Vec<CIStatement>,
}

/// A free-standing CI problem over declared symbols.
#[derive(Debug, Clone)]
pub struct StatementsSpec {
    pub universe: Universe,
    pub base: Vec<CIStatement>,
    pub determinism: Determinism,
}

#[derive(Debug, Clone)]
pub struct DeriveSpec {
    pub goal: CIStatement,
    pub via: Vec<CIStatement>,
}

#[derive(Debug, Clone)]
pub struct QuerySpec {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
    pub expect: Option<bool>,
}

#[derive(Debug, Clone)]
pub enum PriorSpec {
    Uniform,
    Beta(BetaParams),
    Dirichlet(DirichletParams),
}

#[derive(Debug, Clone)]
pub struct PanelPriorSpec {
    pub prior: PriorSpec,
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum ModelSpec {
    Table {
        table: TwoByTwo,
        margin_prior: BetaParams,
        cell_prior: BetaParams,
        /// `None` stands for the sample odds ratio.
        psi: Option<f64>,
    },
    Factors {
        panels: Vec<PanelPriorSpec>,
        factors: FactorSpec,
    },
}

#[derive(Debug, Clone)]
pub struct Spec {
    pub protocol: Option<ProtocolSpec>,
    pub statements: Option<StatementsSpec>,
    pub graph: Option<Dag>,
    pub derive: Vec<DeriveSpec>,
    pub queries: Vec<QuerySpec>,
    pub model: Option<ModelSpec>,
    pub run: RunOptions,
}

pub fn parse_spec(path: &Path) -> Result<Spec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec_str(&text)
}

pub fn parse_spec_str(text: &str) -> Result<Spec, SpecError> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| SpecError::Parse(e.to_string()))?;
    match doc.get("version") {
        Some(toml::Value::String(v)) if v == SPEC_VERSION => {}
        Some(toml::Value::String(v)) => return Err(SpecError::UnknownVersion(v.clone())),
        Some(other) => return Err(SpecError::UnknownVersion(other.to_string())),
        None => return Err(SpecError::Parse("missing top-level key `version`".into())),
    }
    let raw: RawSpec = toml::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))?;
    resolve(raw)
}

fn resolve(raw: RawSpec) -> Result<Spec, SpecError> {
    if raw.protocol.is_some() && raw.statements.is_some() {
        return Err(SpecError::invalid(
            "[statements]",
            "cannot be combined with [protocol]; list extra statements under protocol.statements",
        ));
    }
    let protocol = raw.protocol.map(resolve_protocol).transpose()?;
    let statements = raw.statements.map(resolve_statements).transpose()?;
    let graph = raw.graph.map(|g| resolve_graph(g, protocol.as_ref())).transpose()?;

    let universe = protocol
        .as_ref()
        .map(|p| p.system.universe())
        .or(statements.as_ref().map(|s| &s.universe));
    let derive = raw
        .derive
        .into_iter()
        .enumerate()
        .map(|(k, d)| {
            let u = universe.ok_or(SpecError::MissingSection {
                section: "protocol] or [statements",
                command: "derive",
            })?;
            let location = format!("derive[{k}]");
            Ok(DeriveSpec {
                goal: parse_statement(u, &d.goal, &location)?,
                via: d
                    .via
                    .iter()
                    .map(|s| parse_statement(u, s, &location))
                    .collect::<Result<_, _>>()?,
            })
        })
        .collect::<Result<Vec<_>, SpecError>>()?;

    let queries = raw
        .query
        .into_iter()
        .enumerate()
        .map(|(k, q)| resolve_query(k, q, graph.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;

    let model = raw.model.map(resolve_model).transpose()?;
    let run = raw.run.map(resolve_run).transpose()?.unwrap_or_default();
    Ok(Spec {
        protocol,
        statements,
        graph,
        derive,
        queries,
        model,
        run,
    })
}

fn parse_statement(u: &Universe, text: &str, location: &str) -> Result<CIStatement, SpecError> {
    u.parse_statement(text)
        .map_err(|e| SpecError::from_ci(format!("{location}: `{text}`"), e))
}

fn resolve_protocol(p: RawProtocol) -> Result<ProtocolSpec, SpecError> {
    let common_separation = match p.common_separation.as_deref() {
        None => CommonSeparation::default(),
        Some(name) => CommonSeparation::from_name(name)
            .ok_or_else(|| SpecError::invalid("protocol.common_separation", format!("unknown value `{name}`")))?,
    };
    let excluded = p
        .exclude
        .iter()
        .map(|name| {
            ConditionKind::from_name(name)
                .ok_or_else(|| SpecError::invalid("protocol.exclude", format!("unknown condition `{name}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let system = build_system(
        p.panels,
        p.epoch,
        Overrides {
            common_separation,
            excluded,
        },
    )
    .map_err(|e| SpecError::from_protocol("protocol.panels", e))?;

    let mut base = if p.conditions {
        system.axiomatic_base()
    } else {
        Vec::new()
    };
    for (k, text) in p.statements.iter().enumerate() {
        let s = parse_statement(system.universe(), text, &format!("protocol.statements[{k}]"))?;
        if !base.contains(&s) {
            base.push(s);
        }
    }
    Ok(ProtocolSpec { system, base })
}

fn resolve_statements(s: RawStatements) -> Result<StatementsSpec, SpecError> {
    let universe = Universe::from_labels(&s.symbols).map_err(|e| SpecError::from_ci("statements.symbols", e))?;
    let base = s
        .base
        .iter()
        .enumerate()
        .map(|(k, t)| parse_statement(&universe, t, &format!("statements.base[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let deps = s
        .deps
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let by: Vec<&str> = d.by.iter().map(String::as_str).collect();
            FunctionalDependency::parse(&universe, &d.determined, &by)
                .map_err(|e| SpecError::from_ci(format!("statements.deps[{k}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StatementsSpec {
        universe,
        base,
        determinism: Determinism::new(deps),
    })
}

fn node_kind(location: &str, name: &str) -> Result<NodeKind, SpecError> {
    NodeKind::from_name(name).ok_or_else(|| SpecError::invalid(location, format!("unknown node kind `{name}`")))
}

fn resolve_graph(g: RawGraph, protocol: Option<&ProtocolSpec>) -> Result<Dag, SpecError> {
    let nodes = g
        .nodes
        .iter()
        .enumerate()
        .map(|(k, n)| Ok((n.id.as_str(), node_kind(&format!("graph.nodes[{k}]"), &n.kind)?)))
        .collect::<Result<Vec<_>, SpecError>>()?;
    let edges: Vec<(&str, &str)> = g.edges.iter().map(|[x, y]| (x.as_str(), y.as_str())).collect();
    match g.extends.as_deref() {
        None => build_dag(&nodes, &edges).map_err(|e| SpecError::from_graph("[graph]", e)),
        Some("reference") => {
            let p = protocol.ok_or(SpecError::MissingSection {
                section: "protocol",
                command: "graph.extends = \"reference\"",
            })?;
            p.system
                .try_dag_with(&nodes, &edges)
                .map_err(|e| SpecError::from_protocol("[graph]", e))
        }
        Some(other) => Err(SpecError::invalid(
            "graph.extends",
            format!("unknown base graph `{other}` (supported: \"reference\")"),
        )),
    }
}

fn resolve_query(k: usize, q: RawQuery, graph: Option<&Dag>) -> Result<QuerySpec, SpecError> {
    let dag = graph.ok_or(SpecError::MissingSection {
        section: "graph",
        command: "query",
    })?;
    let location = format!("query[{k}]");
    for label in q.a.iter().chain(&q.b).chain(&q.c) {
        if dag.universe().id(label).is_none() {
            return Err(SpecError::UnresolvedSymbol {
                symbol: label.clone(),
                location,
            });
        }
    }
    modcoh_core::graph::CIQuery::from_labels(dag, &q.a, &q.b, &q.c)
        .map_err(|e| SpecError::from_graph(location, e))?;
    Ok(QuerySpec {
        a: q.a,
        b: q.b,
        c: q.c,
        expect: q.expect,
    })
}

fn beta_prior(location: &str, p: Option<RawPrior>) -> Result<BetaParams, SpecError> {
    match p {
        None | Some(RawPrior::Uniform) => Ok(BetaParams::uniform()),
        Some(RawPrior::Beta([a, b])) => BetaParams::new(a, b).map_err(|e| SpecError::from_panel(location, e)),
        Some(RawPrior::Dirichlet(_)) => Err(SpecError::invalid(location, "a Beta prior is required here")),
    }
}

fn resolve_model(m: RawModel) -> Result<ModelSpec, SpecError> {
    match m {
        RawModel::Table {
            table,
            margin_prior,
            cell_prior,
            psi,
        } => {
            let psi = match psi {
                None => None,
                Some(RawPsi::Named(name)) if name == "odds-ratio" => None,
                Some(RawPsi::Named(name)) => {
                    return Err(SpecError::invalid(
                        "model.psi",
                        format!("expected a number or \"odds-ratio\", found `{name}`"),
                    ))
                }
                Some(RawPsi::Value(v)) if v.is_finite() && v > 0.0 => Some(v),
                Some(RawPsi::Value(v)) => return Err(SpecError::invalid("model.psi", format!("{v} is not positive"))),
            };
            let table = TwoByTwo::new(table);
            if psi.is_none() && table.odds_ratio().is_none() {
                return Err(SpecError::invalid(
                    "model.psi",
                    "the sample odds ratio is undefined for a table with an empty cell; give psi explicitly",
                ));
            }
            if table.total() == 0 {
                return Err(SpecError::invalid("model.table", "the table is empty"));
            }
            Ok(ModelSpec::Table {
                table,
                margin_prior: beta_prior("model.margin_prior", margin_prior)?,
                cell_prior: beta_prior("model.cell_prior", cell_prior)?,
                psi,
            })
        }
        RawModel::Factors { panel, factor } => {
            if panel.is_empty() {
                return Err(SpecError::invalid("model.panel", "at least one panel is required"));
            }
            let panels = panel
                .into_iter()
                .enumerate()
                .map(|(k, p)| {
                    let location = format!("model.panel[{k}]");
                    let prior = match p.prior {
                        RawPrior::Uniform => PriorSpec::Uniform,
                        RawPrior::Beta([a, b]) => {
                            PriorSpec::Beta(BetaParams::new(a, b).map_err(|e| SpecError::from_panel(&location, e))?)
                        }
                        RawPrior::Dirichlet(alpha) => PriorSpec::Dirichlet(
                            DirichletParams::new(alpha).map_err(|e| SpecError::from_panel(&location, e))?,
                        ),
                    };
                    Ok(PanelPriorSpec {
                        prior,
                        resolution: p.resolution,
                    })
                })
                .collect::<Result<Vec<_>, SpecError>>()?;
            let factors = factor
                .into_iter()
                .enumerate()
                .map(|(k, f)| resolve_factor(k, f, &panels))
                .collect::<Result<Vec<_>, _>>()?;
            let factors =
                FactorSpec::new(panels.len(), factors).map_err(|e| SpecError::from_panel("model.factor", e))?;
            Ok(ModelSpec::Factors { panels, factors })
        }
    }
}

fn resolve_factor(k: usize, f: RawFactor, panels: &[PanelPriorSpec]) -> Result<Factor, SpecError> {
    let location = format!("model.factor[{k}]");
    let block_kind = |b: usize| {
        panels
            .get(b)
            .map(|p| &p.prior)
            .ok_or_else(|| SpecError::invalid(&location, format!("block {b} does not exist")))
    };
    match f {
        RawFactor::Bernoulli {
            block,
            successes,
            trials,
        } => {
            if matches!(block_kind(block)?, PriorSpec::Dirichlet(_)) {
                return Err(SpecError::invalid(&location, "bernoulli data needs a unit-interval block"));
            }
            Factor::bernoulli(block, 0, successes, trials).map_err(|e| SpecError::from_panel(&location, e))
        }
        RawFactor::Categorical { block, counts } => match block_kind(block)? {
            PriorSpec::Dirichlet(d) if d.categories() == counts.len() => Ok(Factor::categorical(block, counts)),
            PriorSpec::Dirichlet(d) => Err(SpecError::invalid(
                &location,
                format!("{} counts for a {}-category block", counts.len(), d.categories()),
            )),
            _ => Err(SpecError::invalid(&location, "categorical data needs a dirichlet block")),
        },
        RawFactor::Interaction { blocks, psi, n11, total } => {
            for b in blocks {
                block_kind(b)?;
            }
            Factor::loglinear_interaction(blocks[0], blocks[1], psi, n11, total)
                .map_err(|e| SpecError::from_panel(&location, e))
        }
        RawFactor::Bilinear { blocks, lambda } => {
            for b in blocks {
                block_kind(b)?;
            }
            if !lambda.is_finite() {
                return Err(SpecError::invalid(&location, "lambda must be finite"));
            }
            Ok(Factor::bilinear(blocks[0], blocks[1], lambda))
        }
    }
}

fn resolve_run(r: RawRun) -> Result<RunOptions, SpecError> {
    let mode = r
        .mode
        .as_deref()
        .map(|m| ModeChoice::from_name(m).ok_or_else(|| SpecError::invalid("run.mode", format!("unknown mode `{m}`"))))
        .transpose()?;
    if let Some(t) = r.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(SpecError::invalid("run.tolerance", "must be a finite non-negative number"));
        }
    }
    if r.grid == Some(0) || r.budget == Some(0) || r.samples == Some(0) {
        return Err(SpecError::invalid("[run]", "grid, budget and samples must be positive"));
    }
    Ok(RunOptions {
        mode,
        grid: r.grid,
        seed: r.seed,
        tolerance: r.tolerance,
        budget: r.budget,
        samples: r.samples,
    })
}
