mod common;

use proptest::prelude::*;

use common::gen;
use paw_core::equiv;
use paw_core::kernel::{normalize, ProcessDef};
use paw_core::syntax::{parse_process, parse_spec, print_process_module};

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn expressions_round_trip(e in gen::syntax_expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse_process(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn modules_round_trip(e in gen::syntax_expr()) {
        let text = print_process_module("M", &["Data".to_string()], &[ProcessDef::new("P", e.clone())]);
        let ms = parse_spec(&text).unwrap();
        let m = &ms.modules[0];
        prop_assert_eq!(&m.definitions[0].body, &e, "{}", text);
        prop_assert_eq!(&m.exports, &vec!["P".to_string()]);
    }

    #[test]
    fn normalize_is_idempotent(e in gen::syntax_expr()) {
        let once = normalize(&e);
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn checkers_agree_with_oracle((l1, l2) in gen::lts_pair()) {
        if let Err(e) = gen::agrees_with_oracle(&l1, &l2) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn relations_are_ordered((l1, l2) in gen::lts_pair()) {
        let strong = equiv::strong_bisim(&l1, &l2).related;
        let rooted = equiv::rooted_weak_bisim(&l1, &l2).related;
        let weak = equiv::weak_bisim(&l1, &l2).related;
        let traces = equiv::weak_trace_included(&l1, &l2, None).related && equiv::weak_trace_included(&l2, &l1, None).related;
        prop_assert!(!strong || rooted);
        prop_assert!(!rooted || weak);
        prop_assert!(!weak || traces);
    }

    #[test]
    fn trace_counterexamples_are_genuine((l1, l2) in gen::lts_pair()) {
        let r = equiv::weak_trace_included(&l1, &l2, None);
        if let Some(cx) = r.counterexample {
            prop_assert!(common::oracle::has_trace(&l1, &cx.trace));
            prop_assert!(!common::oracle::has_trace(&l2, &cx.trace));
            prop_assert!(common::oracle::has_trace(&l2, &cx.trace[..cx.trace.len() - 1]));
        }
    }

    #[test]
    fn every_relation_is_reflexive(l in gen::lts(20)) {
        for rel in [equiv::Relation::Strong, equiv::Relation::Weak, equiv::Relation::RootedWeak, equiv::Relation::Trace] {
            prop_assert!(equiv::check(rel, &l, &l).related, "{}", rel);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(100) })]

    #[test]
    fn tau_suffix_law(x in gen::finite_term(4, 3)) {
        if let Err(e) = gen::law_holds(&x) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn refinement_is_sound(c in gen::refine_case()) {
        if let Err(e) = gen::refinement_sound(&c) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn constraining_is_sound(c in gen::constrain_case()) {
        if let Err(e) = gen::constraining_sound(&c) {
            prop_assert!(false, "{}", e);
        }
    }
}
