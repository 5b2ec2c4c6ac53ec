//! Subcommand dispatch: turns a resolved [`Spec`] into a [`Report`].

use modcoh_core::ci::{derive, derive_via, CIStatement, DeriveError, Determinism, Proof, StepInput, Universe, DEFAULT_BUDGET};
use modcoh_core::graph::{active_trail, CIQuery, Dag};
use modcoh_core::panels::{
    compare_table, distributed_from_factors, divergence, joint_oracle, separability_check_numeric,
    separability_check_symbolic, BlockGrid, FactorSpec, GridDensity, JointGridPosterior, NumericOptions,
    NumericSeparability, PanelError, Separability, DEFAULT_RESOLUTION,
};
use modcoh_core::protocol::{
    ablate, graph_check, verify_distributed, ConditionKind, Evidence, Goal, Mode, PanelSystem, ProtocolError, Status,
    Verdict,
};

use crate::report::{Cell, Check, ProofTrace, Report, Table, TraceStep};
use crate::spec::{ModeChoice, ModelSpec, PanelPriorSpec, PriorSpec, ProtocolSpec, Spec, SpecError};

/// Default lattice resolution for simplex-valued blocks.
pub const DEFAULT_SIMPLEX_RESOLUTION: usize = 30;
/// Default acceptance threshold on total variation for `simulate`.
pub const DEFAULT_DIVERGENCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Check,
    Derive,
    Dsep,
    Ablate,
    Simulate,
    Separability,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Check => "check",
            Subcommand::Derive => "derive",
            Subcommand::Dsep => "dsep",
            Subcommand::Ablate => "ablate",
            Subcommand::Simulate => "simulate",
            Subcommand::Separability => "separability",
        }
    }
}

/// Command-line overrides of the spec file's `[run]` section.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Flags {
    pub mode: Option<ModeChoice>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub quiet: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("protocol error: {0}")]
    Protocol(#[from] ProtocolError),
    #[error("numeric error: {0}")]
    Panel(#[from] PanelError),
    #[error("derivation error: {0}")]
    Derive(DeriveError),
}

struct Settings {
    mode: ModeChoice,
    grid: usize,
    seed: u64,
    tolerance: Option<f64>,
    budget: usize,
    samples: usize,
}

fn missing(section: &'static str, sub: Subcommand) -> RunError {
    RunError::Spec(SpecError::MissingSection {
        section,
        command: sub.name(),
    })
}

pub fn run(sub: Subcommand, spec: &Spec, spec_label: &str, flags: &Flags) -> Result<Report, RunError> {
    let settings = Settings {
        mode: flags.mode.or(spec.run.mode).unwrap_or(ModeChoice::Axiomatic),
        grid: flags.grid.or(spec.run.grid).unwrap_or(DEFAULT_RESOLUTION),
        seed: flags.seed.or(spec.run.seed).unwrap_or(0),
        tolerance: flags.tolerance.or(spec.run.tolerance),
        budget: spec.run.budget.unwrap_or(DEFAULT_BUDGET),
        samples: spec.run.samples.unwrap_or(NumericOptions::default().samples_per_pair),
    };
    if settings.grid == 0 {
        return Err(SpecError::Invalid {
            location: "--grid".into(),
            message: "must be positive".into(),
        }
        .into());
    }
    let mut report = Report::new(sub.name(), spec_label);
    match sub {
        Subcommand::Check => run_check(spec, &settings, &mut report)?,
        Subcommand::Derive => run_derive(spec, &settings, &mut report)?,
        Subcommand::Dsep => run_dsep(spec, &mut report)?,
        Subcommand::Ablate => run_ablate(spec, &settings, &mut report)?,
        Subcommand::Simulate => run_simulate(spec, &settings, &mut report)?,
        Subcommand::Separability => run_separability(spec, &settings, &mut report)?,
    }
    echo_options(sub, &settings, flags.quiet, &mut report);
    if flags.quiet {
        report.truncate();
    }
    report.settle();
    Ok(report)
}

fn echo_options(sub: Subcommand, s: &Settings, quiet: bool, report: &mut Report) {
    let opts = &mut report.command.options;
    match sub {
        Subcommand::Check => {
            opts.insert("mode".into(), s.mode.name().into());
            opts.insert("budget".into(), s.budget.into());
        }
        Subcommand::Derive | Subcommand::Ablate => {
            opts.insert("budget".into(), s.budget.into());
        }
        Subcommand::Dsep => {}
        Subcommand::Simulate => {
            opts.insert("grid".into(), s.grid.into());
            opts.insert(
                "tolerance".into(),
                s.tolerance.unwrap_or(DEFAULT_DIVERGENCE_TOLERANCE).into(),
            );
        }
        Subcommand::Separability => {
            opts.insert("grid".into(), s.grid.into());
            opts.insert("seed".into(), Cell::Number(s.seed as f64));
            opts.insert("samples".into(), s.samples.into());
            opts.insert(
                "tolerance".into(),
                s.tolerance.unwrap_or(NumericOptions::default().tolerance).into(),
            );
        }
    }
    opts.insert("quiet".into(), quiet.into());
}

pub fn proof_trace(proof: &Proof, universe: &Universe) -> ProofTrace {
    ProofTrace {
        goal: proof.goal.display(universe),
        base: proof.base.iter().map(|s| s.display(universe)).collect(),
        steps: proof
            .steps
            .iter()
            .map(|step| TraceStep {
                rule: step.rule.name().to_string(),
                premises: step
                    .inputs
                    .iter()
                    .map(|i| match i {
                        StepInput::Base(k) => format!("b{k}"),
                        StepInput::Step(k) => format!("s{k}"),
                    })
                    .collect(),
                selection: universe.set_labels(step.selection),
                output: step.output.display(universe),
            })
            .collect(),
    }
}

fn evidence_text(e: &Evidence) -> String {
    match e {
        Evidence::Asserted => "asserted".into(),
        Evidence::Proof(p) => format!("derived in {} steps from {} base statements", p.steps.len(), p.base.len()),
        Evidence::DSeparated { conditioning } => {
            format!("d-separated given {{{}}} (closed under determinism)", conditioning.join(", "))
        }
        Evidence::ActiveTrail(t) => format!("active trail {}", t.join(" - ")),
        Evidence::NotDerivable { closure_size } => format!(
            "not derivable: closure saturated at {closure_size} statements without it (relative to the rule system)"
        ),
        Evidence::BudgetExhausted { explored } => format!("inconclusive: budget exhausted after {explored} statements"),
    }
}

fn panel_suffix(panel: Option<usize>) -> String {
    panel.map(|i| format!("[{}]", i + 1)).unwrap_or_default()
}

fn passes(status: Status) -> bool {
    matches!(status, Status::Holds | Status::Vacuous)
}

fn protocol_of(spec: &Spec, sub: Subcommand) -> Result<&ProtocolSpec, RunError> {
    spec.protocol.as_ref().ok_or_else(|| missing("protocol", sub))
}

fn verdict_checks(sys: &PanelSystem, v: &Verdict, report: &mut Report) {
    let u = sys.universe();
    for c in &v.conditions {
        report.checks.push(Check {
            name: format!("condition/{}{}", c.kind.name(), panel_suffix(c.panel)),
            subject: c.statement.map(|s| s.display(u)),
            status: c.status.name().into(),
            passed: passes(c.status),
            evidence: c.evidence.as_ref().map(evidence_text),
        });
    }
    for g in &v.goals {
        report.checks.push(Check {
            name: format!("goal/{}{}", g.goal.name(), panel_suffix(Some(g.panel))),
            subject: g.statement.map(|s| s.display(u)),
            status: g.status.name().into(),
            passed: passes(g.status),
            evidence: g.evidence.as_ref().map(evidence_text),
        });
        if let Some(p) = g.proof() {
            report.proofs.push(proof_trace(p, u));
        }
    }
}

fn system_metrics(sys: &PanelSystem, report: &mut Report) {
    report.metric("panels", sys.panels());
    report.metric("epoch", Cell::Number(sys.epoch() as f64));
    report.metric("symbols", sys.universe().len());
    report.metric("common_separation", sys.overrides().common_separation.name());
}

fn run_check(spec: &Spec, s: &Settings, report: &mut Report) -> Result<(), RunError> {
    let p = protocol_of(spec, Subcommand::Check)?;
    let mode = match s.mode {
        ModeChoice::Axiomatic => Mode::Axiomatic(&p.base),
        ModeChoice::Graphical => Mode::Graphical(spec.graph.as_ref().ok_or_else(|| missing("graph", Subcommand::Check))?),
    };
    let verdict = verify_distributed(&p.system, mode, s.budget)?;
    verdict_checks(&p.system, &verdict, report);
    report.checks.push(Check {
        name: "sound-and-distributed".into(),
        subject: None,
        status: if verdict.sound_and_distributed { "holds" } else { "not-established" }.into(),
        passed: verdict.sound_and_distributed,
        evidence: None,
    });
    system_metrics(&p.system, report);
    report.metric("sound_and_distributed", verdict.sound_and_distributed);
    report.metric("all_conditions_hold", verdict.all_conditions_hold());
    if !p.system.overrides().excluded.is_empty() {
        report.notes.push(format!(
            "conditions excluded by the spec file: {}",
            names(&p.system.overrides().excluded)
        ));
    }
    Ok(())
}

fn names(kinds: &[ConditionKind]) -> String {
    kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
}

struct Problem<'a> {
    universe: &'a Universe,
    base: &'a [CIStatement],
    det: &'a Determinism,
}

fn run_derive(spec: &Spec, s: &Settings, report: &mut Report) -> Result<(), RunError> {
    let problem = match (&spec.protocol, &spec.statements) {
        (Some(p), _) => Problem {
            universe: p.system.universe(),
            base: &p.base,
            det: p.system.determinism(),
        },
        (None, Some(st)) => Problem {
            universe: &st.universe,
            base: &st.base,
            det: &st.determinism,
        },
        (None, None) => return Err(missing("protocol", Subcommand::Derive)),
    };
    // Without explicit goals, derive the two goals for every panel.
    let mut goals: Vec<(String, CIStatement, Vec<CIStatement>)> = spec
        .derive
        .iter()
        .enumerate()
        .map(|(k, d)| (format!("derive[{k}]"), d.goal, d.via.clone()))
        .collect();
    if goals.is_empty() {
        let Some(p) = &spec.protocol else {
            return Err(missing("derive", Subcommand::Derive));
        };
        for i in 0..p.system.panels() {
            for goal in Goal::ALL {
                if let Some(g) = p.system.goal_statement(goal, i)? {
                    goals.push((format!("goal/{}[{}]", goal.name(), i + 1), g, p.system.lemmas(goal, i)?));
                }
            }
        }
    }
    let mut derived = 0;
    for (name, goal, via) in goals {
        let routed = if via.is_empty() {
            None
        } else {
            derive_via(problem.base, problem.det, &via, &goal, s.budget).ok()
        };
        let outcome = match routed {
            Some(p) => Ok(p),
            None => derive(problem.base, problem.det, &goal, s.budget),
        };
        let (status, evidence) = match &outcome {
            Ok(p) => {
                derived += 1;
                report.proofs.push(proof_trace(p, problem.universe));
                (Status::Holds, Evidence::Proof(p.clone()))
            }
            Err(DeriveError::NotDerivable { closure_size }) => (
                Status::NotEstablished,
                Evidence::NotDerivable {
                    closure_size: *closure_size,
                },
            ),
            Err(DeriveError::BudgetExhausted { explored }) => {
                (Status::Inconclusive, Evidence::BudgetExhausted { explored: *explored })
            }
            Err(e @ DeriveError::Invalid(_)) => return Err(RunError::Derive(e.clone())),
        };
        report.checks.push(Check {
            name,
            subject: Some(goal.display(problem.universe)),
            status: status.name().into(),
            passed: status == Status::Holds,
            evidence: Some(evidence_text(&evidence)),
        });
    }
    report.metric("base_statements", problem.base.len());
    report.metric("derived", derived);
    Ok(())
}

fn run_dsep(spec: &Spec, report: &mut Report) -> Result<(), RunError> {
    let dag = spec.graph.as_ref().ok_or_else(|| missing("graph", Subcommand::Dsep))?;
    if spec.queries.is_empty() {
        return Err(missing("query", Subcommand::Dsep));
    }
    let mut closed = false;
    for (k, q) in spec.queries.iter().enumerate() {
        let subject = format_query(&q.a, &q.b, &q.c);
        let (separated, evidence) = match system_statement(spec, &q.a, &q.b, &q.c) {
            Some((sys, st)) => {
                closed = true;
                let (status, ev) = graph_check(sys, dag, &st)?;
                (status == Status::Holds, evidence_text(&ev))
            }
            None => plain_dsep(dag, &q.a, &q.b, &q.c)?,
        };
        report.checks.push(Check {
            name: format!("query[{k}]"),
            subject: Some(subject),
            status: if separated { "d-separated" } else { "d-connected" }.into(),
            passed: q.expect.map_or(separated, |e| e == separated),
            evidence: Some(match q.expect {
                Some(e) => format!("{evidence}; expected {}", if e { "d-separated" } else { "d-connected" }),
                None => evidence,
            }),
        });
    }
    report.metric("nodes", dag.len());
    report.metric("edges", dag.edges().count());
    if closed {
        report
            .notes
            .push("queries over panel-system symbols close their conditioning set under the determinism facts".into());
    }
    Ok(())
}

fn format_query(a: &[String], b: &[String], c: &[String]) -> String {
    if c.is_empty() {
        format!("{} ⫫ {}", a.join(", "), b.join(", "))
    } else {
        format!("{} ⫫ {} | {}", a.join(", "), b.join(", "), c.join(", "))
    }
}

fn system_statement<'a>(
    spec: &'a Spec,
    a: &[String],
    b: &[String],
    c: &[String],
) -> Option<(&'a PanelSystem, CIStatement)> {
    let sys = &spec.protocol.as_ref()?.system;
    let u = sys.universe();
    let st = CIStatement::new(u.set(a).ok()?, u.set(b).ok()?, u.set(c).ok()?).ok()?;
    Some((sys, st))
}

fn plain_dsep(dag: &Dag, a: &[String], b: &[String], c: &[String]) -> Result<(bool, String), RunError> {
    let q = CIQuery::from_labels(dag, a, b, c).map_err(|e| RunError::Protocol(ProtocolError::Graph(e)))?;
    let trail = active_trail(dag, &q).map_err(|e| RunError::Protocol(ProtocolError::Graph(e)))?;
    Ok(match trail {
        None => (true, "no active trail".into()),
        Some(t) => {
            let labels: Vec<&str> = t.into_iter().map(|v| dag.label(v)).collect();
            (false, format!("active trail {}", labels.join(" - ")))
        }
    })
}

fn run_ablate(spec: &Spec, s: &Settings, report: &mut Report) -> Result<(), RunError> {
    let p = protocol_of(spec, Subcommand::Ablate)?;
    let rows = ablate(&p.system, &p.base, s.budget)?;
    let u = p.system.universe();
    let mut table = Table {
        name: "ablation".into(),
        columns: ["dropped", "sound_and_distributed", "failing_goals", "certificate"]
            .map(String::from)
            .to_vec(),
        rows: Vec::new(),
    };
    for row in &rows {
        let failing: Vec<_> = row.verdict.goals.iter().filter(|g| !passes(g.status)).collect();
        let failing_names: Vec<String> = failing
            .iter()
            .map(|g| format!("{}[{}]", g.goal.name(), g.panel + 1))
            .collect();
        let certificate = failing
            .first()
            .and_then(|g| g.evidence.as_ref())
            .map(evidence_text)
            .unwrap_or_else(|| "-".into());
        let sound = row.verdict.sound_and_distributed;
        match row.dropped {
            None => {
                report.checks.push(Check {
                    name: "control".into(),
                    subject: None,
                    status: if sound { "holds" } else { "not-established" }.into(),
                    passed: sound,
                    evidence: Some("all conditions asserted".into()),
                });
                report.metric("control_sound_and_distributed", sound);
            }
            Some(kind) => {
                for g in &failing {
                    if let Some(Evidence::Proof(pr)) = &g.evidence {
                        report.proofs.push(proof_trace(pr, u));
                    }
                }
                report.checks.push(Check {
                    name: format!("necessity/{}", kind.name()),
                    subject: failing.first().and_then(|g| g.statement).map(|st| st.display(u)),
                    status: if sound { "not-necessary" } else { "necessary" }.into(),
                    passed: !sound,
                    evidence: Some(if failing_names.is_empty() {
                        "every goal still derives".into()
                    } else {
                        format!("fails {}; {certificate}", failing_names.join(", "))
                    }),
                });
                table.rows.push(vec![
                    kind.name().into(),
                    sound.into(),
                    failing_names.join(" ").into(),
                    certificate.into(),
                ]);
            }
        }
    }
    report.tables.push(table);
    system_metrics(&p.system, report);
    report
        .notes
        .push("non-derivability is relative to the rule system, which is incomplete for probabilistic independence".into());
    Ok(())
}

fn block_grid(p: &PanelPriorSpec, grid: usize) -> Result<GridDensity, PanelError> {
    match &p.prior {
        PriorSpec::Uniform => Ok(GridDensity::uniform(BlockGrid::unit_interval(p.resolution.unwrap_or(grid))?)),
        PriorSpec::Beta(b) => GridDensity::from_beta(b, BlockGrid::unit_interval(p.resolution.unwrap_or(grid))?),
        PriorSpec::Dirichlet(d) => GridDensity::from_dirichlet(
            d,
            BlockGrid::simplex(d.categories(), p.resolution.unwrap_or(DEFAULT_SIMPLEX_RESOLUTION))?,
        ),
    }
}

fn product_of_firsts(p: &[&[f64]]) -> f64 {
    p.iter().map(|b| b[0]).product()
}

fn posterior_table(name: &str, d: &JointGridPosterior, j: &JointGridPosterior) -> Result<Table, PanelError> {
    let mut rows = Vec::new();
    for b in 0..d.blocks().len() {
        let (md, mj) = (d.marginal(b)?, j.marginal(b)?);
        for c in 0..d.blocks()[b].dim() {
            rows.push(vec![
                Cell::from(b + 1),
                Cell::from(c + 1),
                md.mean(c).into(),
                mj.mean(c).into(),
            ]);
        }
    }
    Ok(Table {
        name: name.into(),
        columns: ["block", "coordinate", "distributed_mean", "joint_mean"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

fn divergence_check(report: &mut Report, d: &JointGridPosterior, j: &JointGridPosterior, tol: f64) -> Result<(), PanelError> {
    let div = divergence(d, j)?;
    report.metric("max_abs_divergence", div.max_abs);
    report.metric("total_variation", div.total_variation);
    let passed = div.total_variation <= tol;
    report.checks.push(Check {
        name: "distributed-equals-joint".into(),
        subject: None,
        status: if passed { "holds" } else { "diverges" }.into(),
        passed,
        evidence: Some(format!(
            "total variation {:e}, max abs {:e}, tolerance {tol:e}",
            div.total_variation, div.max_abs
        )),
    });
    Ok(())
}

fn run_simulate(spec: &Spec, s: &Settings, report: &mut Report) -> Result<(), RunError> {
    let model = spec.model.as_ref().ok_or_else(|| missing("model", Subcommand::Simulate))?;
    let tol = s.tolerance.unwrap_or(DEFAULT_DIVERGENCE_TOLERANCE);
    match model {
        ModelSpec::Table {
            table,
            margin_prior,
            cell_prior,
            psi,
        } => {
            let psi = psi.or(table.odds_ratio()).expect("validated at parse time");
            let r = compare_table(table, *margin_prior, *cell_prior, psi, s.grid)?;
            report.metric("distributed_closed_form", r.distributed_closed_form);
            report.metric("distributed_grid", r.distributed_grid);
            report.metric("joint_cell_mean", r.joint_cell_mean);
            report.metric("ratio", r.ratio);
            report.metric("psi", psi);
            // Under the log-linear model the joint cell is θ1 θ2 ψ / (1 + θ1 θ2 (ψ - 1)).
            let dependent_cell = r.dependent.expectation(|p| {
                let t = p[0][0] * p[1][0];
                t * psi / (1.0 + t * (psi - 1.0))
            });
            report.metric("dependent_cell_mean", dependent_cell);
            report.tables.push(Table {
                name: "estimates of P(Y1 = 1, Y2 = 1)".into(),
                columns: ["pipeline", "estimate"].map(String::from).to_vec(),
                rows: vec![
                    vec!["distributed (closed form)".into(), r.distributed_closed_form.into()],
                    vec!["distributed (grid)".into(), r.distributed_grid.into()],
                    vec!["joint cell".into(), r.joint_cell_mean.into()],
                    vec!["log-linear model (grid)".into(), dependent_cell.into()],
                ],
            });
            report
                .tables
                .push(posterior_table("block posterior means", &r.distributed, &r.dependent)?);
            report.notes.push(
                "the joint posterior is the margins-plus-interaction model on the same grid; with psi = 1 it equals the distributed one"
                    .into(),
            );
            divergence_check(report, &r.distributed, &r.dependent, tol)?;
        }
        ModelSpec::Factors { panels, factors } => {
            let priors = panels
                .iter()
                .map(|p| block_grid(p, s.grid))
                .collect::<Result<Vec<_>, _>>()?;
            let distributed = distributed_from_factors(&priors, factors)?;
            let joint = joint_oracle(&priors, |p| factors.log_likelihood(p))?;
            report.metric("symbolic_separability", symbolic_name(factors));
            report.metric("cells", joint.len());
            report.metric("distributed_expectation", distributed.expectation(product_of_firsts));
            report.metric("joint_expectation", joint.expectation(product_of_firsts));
            report.tables.push(posterior_table("block posterior means", &distributed, &joint)?);
            divergence_check(report, &distributed, &joint, tol)?;
        }
    }
    Ok(())
}

fn symbolic_name(f: &FactorSpec) -> &'static str {
    match separability_check_symbolic(f) {
        Separability::Separable { .. } => "separable",
        Separability::NotSeparable { .. } => "not-separable",
    }
}

fn run_separability(spec: &Spec, s: &Settings, report: &mut Report) -> Result<(), RunError> {
    let model = spec.model.as_ref().ok_or_else(|| missing("model", Subcommand::Separability))?;
    let (factors, grids) = match model {
        ModelSpec::Table { table, psi, .. } => {
            let psi = psi.or(table.odds_ratio()).expect("validated at parse time");
            let g = BlockGrid::unit_interval(s.grid)?;
            (table.dependent_model(psi)?, vec![g.clone(), g])
        }
        ModelSpec::Factors { panels, factors } => {
            let grids = panels
                .iter()
                .map(|p| block_grid(p, s.grid).map(|d| d.grid().clone()))
                .collect::<Result<Vec<_>, _>>()?;
            (factors.clone(), grids)
        }
    };

    let symbolic = separability_check_symbolic(&factors);
    let (passed, evidence) = match &symbolic {
        Separability::Separable { partition } => {
            let parts: Vec<String> = partition
                .iter()
                .enumerate()
                .map(|(b, fs)| format!("block {}: {}", b + 1, factor_labels(&factors, fs)))
                .collect();
            (true, parts.join("; "))
        }
        Separability::NotSeparable { offending } => {
            (false, format!("coupling factors: {}", factor_labels(&factors, offending)))
        }
    };
    report.checks.push(Check {
        name: "symbolic".into(),
        subject: None,
        status: if passed { "separable" } else { "not-separable" }.into(),
        passed,
        evidence: Some(evidence),
    });

    let options = NumericOptions {
        samples_per_pair: s.samples,
        tolerance: s.tolerance.unwrap_or(NumericOptions::default().tolerance),
        seed: s.seed,
    };
    let numeric = separability_check_numeric(|p| factors.log_likelihood(p), &grids, options)?;
    let quadruples = match &numeric {
        NumericSeparability::Separable { quadruples, .. } | NumericSeparability::NotSeparable { quadruples, .. } => {
            *quadruples
        }
    };
    report.metric("max_residual", numeric.max_residual());
    report.metric("quadruples", quadruples);
    let evidence = match &numeric {
        NumericSeparability::Separable { max_residual, .. } => {
            format!("max residual {max_residual:e} over {quadruples} quadruples")
        }
        NumericSeparability::NotSeparable { witness, .. } => {
            report.tables.push(Table {
                name: "witness".into(),
                columns: ["blocks", "u", "u_prime", "v", "v_prime", "residual"].map(String::from).to_vec(),
                rows: vec![vec![
                    format!("{}, {}", witness.blocks.0 + 1, witness.blocks.1 + 1).into(),
                    point_text(&witness.u).into(),
                    point_text(&witness.u_prime).into(),
                    point_text(&witness.v).into(),
                    point_text(&witness.v_prime).into(),
                    witness.residual.into(),
                ]],
            });
            format!(
                "residual {:e} between blocks {} and {}",
                witness.residual,
                witness.blocks.0 + 1,
                witness.blocks.1 + 1
            )
        }
    };
    report.checks.push(Check {
        name: "numeric".into(),
        subject: None,
        status: if numeric.is_separable() { "separable" } else { "not-separable" }.into(),
        passed: numeric.is_separable(),
        evidence: Some(evidence),
    });
    Ok(())
}

fn factor_labels(f: &FactorSpec, idx: &[usize]) -> String {
    if idx.is_empty() {
        return "none".into();
    }
    idx.iter()
        .map(|&k| format!("#{k} {}", f.factors()[k].label()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn point_text(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}
