mod common;

use paw_core::kernel::{normalize, Bounds, ProcessDef, ProcessExpr};
use paw_core::refine::{apply_mapping, vertical_check, Mapping, RefineError};
use paw_core::syntax::{load, parse_process};

fn expr(s: &str) -> ProcessExpr {
    parse_process(s).unwrap()
}

#[test]
fn parses_example_mapping() {
    let m = Mapping::parse(&common::corpus("example.map")).unwrap();
    assert_eq!(m.refinements.len(), 5);
    assert_eq!(m.refinements[1].to.len(), 2);
    assert_eq!(m.refinements[2].from.to_string(), "snd-quit");
    assert_eq!(m.renamings.len(), 2);
    assert_eq!(
        m.renamings[1].to.to_string(),
        "tb-rec-event(T1, tbterm(quit))"
    );
    assert_eq!(m.process_renames["Component1"], "PT1");
    assert_eq!(m.module.as_deref(), Some("ToolBusComponents"));
}

#[test]
fn empty_mapping_is_identity() {
    let m = Mapping::parse("-- nothing\n").unwrap();
    assert!(m.is_empty());
    let d = ProcessDef::new("P", expr("a . (b + c) . P"));
    let out = apply_mapping(std::slice::from_ref(&d), &m).unwrap();
    assert_eq!(out.defs, vec![d]);
}

#[test]
fn overlapping_domains_rejected() {
    let e = Mapping::parse("refine a -> c . d\nrename a -> e\n").unwrap_err();
    assert!(matches!(e, RefineError::Overlap(..)), "{e}");
}

#[test]
fn ambiguous_match_rejected() {
    let m = Mapping::parse("variables x : D\nrefine f(x) -> c\n  f(d) -> e\n").unwrap();
    let err = apply_mapping(&[ProcessDef::new("P", expr("f(d)"))], &m).unwrap_err();
    assert!(matches!(err, RefineError::Ambiguous { .. }), "{err}");
}

#[test]
fn pattern_variables_cover_all_instances() {
    let m = Mapping::parse("variables x : D\nrefine f(x) -> g(x) . h\n").unwrap();
    let out = apply_mapping(&[ProcessDef::new("P", expr("f(d) . f(e)"))], &m).unwrap();
    assert_eq!(
        normalize(&out.defs[0].body),
        normalize(&expr("g(d) . h . g(e) . h"))
    );
}

#[test]
fn sequence_refinement_gives_q() {
    let m = Mapping::parse("refine a -> c . d\nrename b -> e\n").unwrap();
    let out = apply_mapping(&[ProcessDef::new("P", expr("a . b"))], &m).unwrap();
    assert_eq!(normalize(&out.defs[0].body), normalize(&expr("c . d . e")));
    assert!(out.warnings.is_empty());
}

#[test]
fn unmapped_actions_pass_through_with_warning() {
    let m = Mapping::parse("refine a -> c\n").unwrap();
    let out = apply_mapping(&[ProcessDef::new("P", expr("a . z"))], &m).unwrap();
    assert_eq!(normalize(&out.defs[0].body), normalize(&expr("c . z")));
    assert_eq!(out.warnings.len(), 1);
}

#[test]
fn component1_maps_to_pt1() {
    let spec = common::load(&["arch.psf"], None);
    let m = Mapping::parse(&common::corpus("example.map")).unwrap();
    let c1 = spec.def("Component1").unwrap().clone();
    let out = apply_mapping(&[c1], &m).unwrap();
    let pt1 = &out.defs[0];
    assert_eq!(pt1.name, "PT1");
    let expected = expr(
        "tb-rec-event(T1, tbterm(message)) . tb-snd-msg(t1, t2, tbterm(message)) . \
         tb-rec-msg(t2, t1, tbterm(ack)) . tb-snd-ack-event(T1, tbterm(message)) . PT1 \
         + tb-rec-event(T1, tbterm(quit)) . snd-tb-shutdown",
    );
    assert_eq!(
        normalize(&pt1.body).to_string(),
        normalize(&expected).to_string()
    );
}

fn fig2(conc: &str) -> paw_core::refine::VerticalReport {
    let src = format!(
        "process module M begin atoms a b c d e processes P Q definitions P = a . b  Q = {conc} end M"
    );
    let spec = load(&src, "M").unwrap();
    let m = Mapping::parse("refine a -> c . d\nrename b -> e\n").unwrap();
    vertical_check(
        &spec,
        &ProcessExpr::call("P"),
        &ProcessExpr::call("Q"),
        &m,
        Bounds::default(),
    )
    .unwrap()
}

#[test]
fn fig2_instance_related() {
    let r = fig2("c . d . e");
    assert!(r.related, "{r}");
}

#[test]
fn reordered_refinement_not_related() {
    let r = fig2("c . e . d");
    assert!(!r.related);
    let cx = r.ordering.counterexample.as_ref().unwrap();
    assert!(cx.trace.len() <= 2, "{:?}", cx.trace);
}

fn refined_corpus() -> (paw_core::kernel::FlatSpec, Mapping) {
    let spec = common::load(&["arch.psf"], None);
    let m = Mapping::parse(&common::corpus("example.map")).unwrap();
    let defs = vec![
        spec.def("Component1").unwrap().clone(),
        spec.def("Component2").unwrap().clone(),
    ];
    let applied = apply_mapping(&defs, &m).unwrap();
    let text = paw_core::refine::emit_module(&applied, &m);
    let mut ms = common::modules(&["arch.psf", "tbdata.psf"]);
    ms.extend(paw_core::syntax::parse_spec(&text).unwrap());
    (paw_core::syntax::flatten_roots(&ms, None).unwrap(), m)
}

#[test]
fn component1_vertically_implemented_by_pt1() {
    let (spec, m) = refined_corpus();
    let r = vertical_check(
        &spec,
        &ProcessExpr::call("Component1"),
        &ProcessExpr::call("PT1"),
        &m,
        Bounds::default(),
    )
    .unwrap();
    assert!(r.related, "{r}");
    assert_eq!(r.abstract_view.tau_count(), 3);
    assert_eq!(r.concrete_view.tau_count(), 4);
    let r2 = vertical_check(
        &spec,
        &ProcessExpr::call("Component2"),
        &ProcessExpr::call("PT2"),
        &m,
        Bounds::default(),
    )
    .unwrap();
    assert!(r2.related, "{r2}");
}
