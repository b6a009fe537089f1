mod common;

use paw_core::equiv::strong_bisim;
use paw_core::kernel::{Bounds, FlatSpec, ProcessExpr, Semantics};
use paw_core::scriptgen::{
    gen_script, parse_script, script_for, to_iterable, to_recursive, ScriptError, ToolTable,
};
use paw_core::syntax::load;

fn spec() -> FlatSpec {
    common::load(&["data.psf", "tbdata.psf", "toolbus-components.psf"], None)
}

fn tools() -> ToolTable {
    ToolTable::parse(&common::corpus("tools.cfg")).unwrap()
}

fn script() -> String {
    script_for(&spec(), &["PT1".into(), "PT2".into()], &tools()).unwrap()
}

#[test]
fn script_has_expected_structure() {
    let s = script();
    let lines: Vec<&str> = s.lines().map(str::trim).collect();
    for want in [
        "process PT1 is",
        "let T1: tool1adapter",
        "execute(tool1adapter, T1?) .",
        "rec-event(T1, message) .",
        "snd-ack-event(T1, message)",
        "+ rec-event(T1, quit) .",
        "shutdown(\"\")",
        ") * delta",
        "endlet",
        "snd-eval(T2, eval(message)) .",
        "rec-value(T2, value(ack)) .",
        "tool tool1adapter is { command = \"wish-adapter -script tool1adapter.tcl\" }",
        "toolbus(PT1, PT2)",
    ] {
        assert!(lines.contains(&want), "missing line {want:?} in\n{s}");
    }
}

#[test]
fn output_is_deterministic() {
    assert_eq!(script(), script());
}

#[test]
fn back_translation_is_strongly_bisimilar() {
    let spec = spec();
    let parsed = parse_script(&script()).unwrap();
    assert_eq!(parsed.toolbus, vec!["PT1", "PT2"]);
    assert_eq!(parsed.tools.tools.len(), 2);
    for form in &parsed.processes {
        let back = to_recursive(form);
        let mut ext = spec.clone();
        let renamed = format!("{}Back", back.name);
        let body = back.body.map_bottom_up(&mut |e| match e {
            ProcessExpr::Call(n, a) if n == back.name => ProcessExpr::Call(renamed.clone(), a),
            other => other,
        });
        ext.add_def(paw_core::kernel::ProcessDef::new(renamed.clone(), body));
        let sem = Semantics::new(&ext, Bounds::default());
        let l1 = sem.build_lts(&ProcessExpr::call(&form.process)).unwrap();
        let l2 = sem.build_lts(&ProcessExpr::call(&renamed)).unwrap();
        let r = strong_bisim(&l1, &l2);
        assert!(r.related, "{}: {r}", form.process);
    }
}

#[test]
fn iterable_form_of_pt1() {
    let spec = spec();
    let f = to_iterable(&spec, spec.def("PT1").unwrap(), &tools()).unwrap();
    assert_eq!(
        f.tool_vars,
        vec![("T1".to_string(), "tool1adapter".to_string())]
    );
    assert_eq!(f.alternatives.len(), 2);
    assert!(f.alternatives[0].loops);
    assert!(!f.alternatives[1].loops);
}

#[test]
fn state_bearing_recursion_rejected() {
    let spec = load(
        "data module N begin exports begin sorts NAT functions zero : -> NAT succ : NAT -> NAT end end N \
         process module M begin imports N atoms a processes P : NAT definitions P(n) = a . P(succ(n)) end M",
        "M",
    )
    .unwrap();
    let e = to_iterable(&spec, spec.def("P").unwrap(), &ToolTable::default()).unwrap_err();
    assert!(matches!(e, ScriptError::StateBearing { .. }), "{e}");
}

#[test]
fn non_tail_recursion_rejected() {
    let spec = load(
        "process module M begin atoms a processes P definitions P = P . a end M",
        "M",
    )
    .unwrap();
    let e = to_iterable(&spec, spec.def("P").unwrap(), &ToolTable::default()).unwrap_err();
    assert!(matches!(e, ScriptError::NotIterable { .. }), "{e}");
}

#[test]
fn empty_process_list_rejected() {
    assert_eq!(
        gen_script(&[], &ToolTable::default()).unwrap_err(),
        ScriptError::Empty
    );
}

#[test]
fn missing_tool_reported() {
    let e = script_for(&spec(), &["PT1".into()], &ToolTable::default()).unwrap_err();
    assert_eq!(e, ScriptError::MissingTool("T1".into()));
}
