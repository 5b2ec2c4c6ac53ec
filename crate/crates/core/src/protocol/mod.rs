//! The multi-panel admissibility protocol: symbol system, the four
//! conditions, and a verifier that derives panel independence and
//! autonomous updating from them.

mod system;
mod verify;

pub use system::{
    build_system, CommonSeparation, ConditionInstance, ConditionKind, Determination, Goal, Overrides, PanelSystem,
    ProtocolError, MAX_PANELS,
};
pub use verify::{
    ablate, check_conditions, graph_check, verify_distributed, AblationRow, ConditionCheck, Evidence, GoalCheck, Mode, Status, Verdict,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci::{CIStatement, DEFAULT_BUDGET};
    use crate::graph::{local_markov_basis, NodeKind};
    use std::string::String;
    use std::vec::Vec;

    fn sys(m: usize) -> PanelSystem {
        build_system(m, 0, Overrides::default()).unwrap()
    }

    fn st(s: &PanelSystem, text: &str) -> CIStatement {
        s.universe().parse_statement(text).unwrap()
    }

    #[test]
    fn two_panel_universe() {
        let s = sys(2);
        assert_eq!(s.universe().len(), 9);
        assert_eq!(
            s.universe().labels(),
            ["theta_1", "theta_2", "I_0", "I_11", "I_12", "I_21", "I_22", "I_plus", "I_star"]
        );
        let d = s.determinism();
        let u = s.universe();
        assert!(d.determines(u.set(&["I_11", "I_22"]).unwrap(), u.lookup("I_star").unwrap()));
        assert!(d.determines(u.set(&["I_star"]).unwrap(), u.lookup("I_11").unwrap()));
        assert!(d.determines(u.set(&["I_plus"]).unwrap(), u.lookup("I_21").unwrap()));
        assert!(!d.determines(u.set(&["I_star"]).unwrap(), u.lookup("I_12").unwrap()));
    }

    #[test]
    fn panel_count_bounds() {
        assert_eq!(build_system(0, 0, Overrides::default()), Err(ProtocolError::InvalidPanelCount));
        assert!(build_system(MAX_PANELS, 0, Overrides::default()).is_ok());
        assert_eq!(
            build_system(MAX_PANELS + 1, 0, Overrides::default()),
            Err(ProtocolError::TooManyPanels(MAX_PANELS + 1))
        );
        assert_eq!(sys(3).universe().len(), 15);
    }

    #[test]
    fn condition_statements_for_two_panels() {
        let s = sys(2);
        let cases = [
            (ConditionKind::Delegable, 0, "I_plus ⫫ theta_1, theta_2 | I_0, I_star"),
            (ConditionKind::SeparatelyInformed, 0, "I_11 ⫫ theta_2 | I_0, theta_1"),
            (ConditionKind::SeparatelyInformed, 1, "I_22 ⫫ theta_1 | I_0, theta_2"),
            (ConditionKind::Cutting, 1, "I_star ⫫ theta_2 | I_0, I_22, theta_1"),
            (ConditionKind::CommonlySeparated, 0, "theta_1 ⫫ theta_2 | I_0"),
        ];
        for (kind, i, text) in cases {
            assert_eq!(s.condition_statement(kind, i).unwrap(), Some(st(&s, text)), "{kind:?} {i}");
        }
        assert_eq!(
            s.condition_statement(ConditionKind::Cutting, 2),
            Err(ProtocolError::IndexOutOfRange { panel: 2, panels: 2 })
        );
        assert_eq!(s.axiomatic_base().len(), 6);
    }

    #[test]
    fn single_panel_is_mostly_vacuous() {
        let s = sys(1);
        assert!(s.condition_statement(ConditionKind::CommonlySeparated, 0).unwrap().is_none());
        assert!(s.condition_statement(ConditionKind::SeparatelyInformed, 0).unwrap().is_none());
        assert!(s.goal_statement(Goal::PanelIndependence, 0).unwrap().is_none());
        let v = verify_distributed(&s, Mode::Axiomatic(&s.axiomatic_base()), DEFAULT_BUDGET).unwrap();
        assert!(v.sound_and_distributed);
        assert_eq!(v.goal(Goal::PanelIndependence, 0).unwrap().status, Status::Vacuous);
        assert_eq!(v.goal(Goal::AutonomousUpdating, 0).unwrap().status, Status::Holds);
    }

    fn derived_goals_hold(m: usize) {
        let s = sys(m);
        let base = s.axiomatic_base();
        let v = verify_distributed(&s, Mode::Axiomatic(&base), DEFAULT_BUDGET).unwrap();
        assert!(v.all_conditions_hold());
        assert!(v.sound_and_distributed);
        for g in &v.goals {
            let p = g.proof().expect("derived");
            p.replay(s.determinism()).unwrap();
            assert_eq!(Some(p.goal), g.statement);
        }
    }

    #[test]
    fn proofs_pass_through_standard_lemmas() {
        for m in [2, 3] {
            let s = sys(m);
            let v = verify_distributed(&s, Mode::Axiomatic(&s.axiomatic_base()), DEFAULT_BUDGET).unwrap();
            for g in &v.goals {
                let p = g.proof().unwrap();
                for lemma in s.lemmas(g.goal, g.panel).unwrap() {
                    assert!(p.mentions(&lemma), "m = {m} {:?} {}", g.goal, lemma.display(s.universe()));
                }
            }
        }
    }

    #[test]
    fn proof_steps_hold_in_reference_graph() {
        for m in [2, 3] {
            let s = sys(m);
            let dag = s.canonical_dag();
            let v = verify_distributed(&s, Mode::Axiomatic(&s.axiomatic_base()), DEFAULT_BUDGET).unwrap();
            for g in &v.goals {
                for t in g.proof().unwrap().statements() {
                    let (status, _) = graph_check(&s, &dag, t).unwrap();
                    assert_eq!(status, Status::Holds, "{}", t.display(s.universe()));
                }
            }
        }
    }

    #[test]
    fn theorem_holds_for_two_panels() {
        derived_goals_hold(2);
    }

    #[test]
    fn theorem_holds_for_three_panels() {
        derived_goals_hold(3);
    }

    #[test]
    fn verdict_ignores_epoch() {
        let a = build_system(2, 0, Overrides::default()).unwrap();
        let b = build_system(2, 17, Overrides::default()).unwrap();
        let va = verify_distributed(&a, Mode::Axiomatic(&a.axiomatic_base()), DEFAULT_BUDGET).unwrap();
        let vb = verify_distributed(&b, Mode::Axiomatic(&b.axiomatic_base()), DEFAULT_BUDGET).unwrap();
        assert_eq!(va, vb);
    }

    #[test]
    fn foreign_base_is_rejected() {
        let s = sys(1);
        let two = sys(2);
        let base = two.axiomatic_base();
        assert!(matches!(
            verify_distributed(&s, Mode::Axiomatic(&base), DEFAULT_BUDGET),
            Err(ProtocolError::UniverseMismatch(_))
        ));
    }

    #[test]
    fn canonical_dag_satisfies_every_condition() {
        for m in 1..=3 {
            let s = sys(m);
            let dag = s.canonical_dag();
            let v = verify_distributed(&s, Mode::Graphical(&dag), DEFAULT_BUDGET).unwrap();
            assert!(v.all_conditions_hold(), "m = {m}: {:?}", v.conditions);
            assert!(v.sound_and_distributed, "m = {m}");
        }
    }

    #[test]
    fn hidden_confounder_breaks_common_separation() {
        let s = sys(2);
        let dag = s.dag_with(&[("H", NodeKind::Parameter)], &[("H", "theta_1"), ("H", "theta_2")]);
        let checks = check_conditions(&s, Mode::Graphical(&dag), DEFAULT_BUDGET).unwrap();
        let cs: Vec<&ConditionCheck> = checks
            .iter()
            .filter(|c| c.kind == ConditionKind::CommonlySeparated)
            .collect();
        assert_eq!(cs.len(), 2);
        for c in cs {
            assert_eq!(c.status, Status::NotEstablished);
            let Some(Evidence::ActiveTrail(trail)) = &c.evidence else {
                panic!("expected a trail")
            };
            assert!(trail.iter().any(|n| n == "H"), "{trail:?}");
        }
        let v = verify_distributed(&s, Mode::Graphical(&dag), DEFAULT_BUDGET).unwrap();
        assert!(!v.sound_and_distributed);
    }

    #[test]
    fn missing_graph_node_is_a_mismatch() {
        let s = sys(2);
        let one = sys(1).canonical_dag();
        assert!(matches!(
            check_conditions(&s, Mode::Graphical(&one), DEFAULT_BUDGET),
            Err(ProtocolError::UniverseMismatch(_))
        ));
    }

    #[test]
    fn markov_basis_of_reference_graph_yields_goals() {
        let s = sys(2);
        let dag = s.canonical_dag();
        // Reference graph labels coincide with system labels but ids differ.
        let relabel = |t: &CIStatement| {
            let map = |set| {
                s.universe()
                    .set(&dag.universe().set_labels(set))
                    .unwrap()
            };
            crate::ci::normalize(map(t.a()), map(t.b()), map(t.c())).unwrap()
        };
        let basis: Vec<CIStatement> = local_markov_basis(&dag).iter().map(relabel).collect();
        let v = verify_distributed(&s, Mode::Axiomatic(&basis), DEFAULT_BUDGET).unwrap();
        assert!(v.sound_and_distributed);
    }

    #[test]
    fn ablation_of_two_panels() {
        let s = sys(2);
        let rows = ablate(&s, &s.axiomatic_base(), DEFAULT_BUDGET).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows[0].dropped.is_none() && rows[0].verdict.sound_and_distributed);
        for row in &rows[1..] {
            let v = &row.verdict;
            assert!(!v.sound_and_distributed, "{:?}", row.dropped);
            assert!(v
                .goals
                .iter()
                .all(|g| g.status != Status::Inconclusive));
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ConditionKind::ALL {
            assert_eq!(ConditionKind::from_name(k.name()), Some(k));
        }
        let names: Vec<String> = Goal::ALL.iter().map(|g| g.name().into()).collect();
        assert_eq!(names, ["panel-independence", "autonomous-updating"]);
    }
}
