mod common;

use paw_core::kernel::{FuncDecl, ProcessExpr};
use paw_core::syntax::{
    flatten_roots, load, parse_process, parse_spec, FlattenError, ModuleKind, SpecError,
};

#[test]
fn data_module_declarations() {
    let ms = common::modules(&["arch.psf"]);
    let data = ms.get("Data").unwrap();
    assert_eq!(data.kind, ModuleKind::Data);
    let funcs: Vec<&FuncDecl> = data.functions.iter().map(|(f, _)| f).collect();
    assert_eq!(funcs.len(), 5);
    assert_eq!(
        funcs[0],
        &FuncDecl {
            name: "message".into(),
            args: vec![],
            result: "DATA".into()
        }
    );
    assert_eq!(funcs[4].result, "ID");
    assert_eq!(data.imports.len(), 1);
    assert_eq!(data.imports[0].module, "ArchitectureTypes");
}

#[test]
fn empty_input_has_no_modules() {
    assert!(parse_spec("").unwrap().modules.is_empty());
    assert!(parse_spec("  -- only a comment\n")
        .unwrap()
        .modules
        .is_empty());
}

#[test]
fn parameter_binding_and_renaming() {
    let ms = common::modules(&["arch.psf"]);
    let app = ms.get("Application").unwrap();
    let imp = &app.imports[0];
    assert_eq!(imp.module, "Architecture");
    assert_eq!(imp.bindings.len(), 1);
    assert_eq!(imp.bindings[0].param, "System");
    assert_eq!(
        imp.bindings[0].map,
        vec![("System".to_string(), "ApplicationSystem".to_string())]
    );
    assert_eq!(imp.bindings[0].actual, "ApplicationSystem");
    assert_eq!(
        imp.renamings,
        vec![("Architecture".to_string(), "Application".to_string())]
    );
}

#[test]
fn flattened_application_runs_both_components() {
    let spec = common::load(&["arch.psf"], Some("Application"));
    assert_eq!(spec.entry.as_deref(), Some("Application"));
    let sys = spec.def("ApplicationSystem").unwrap();
    assert_eq!(
        sys.body,
        ProcessExpr::par(vec![
            ProcessExpr::call("Component1"),
            ProcessExpr::call("Component2")
        ])
    );
    assert!(spec
        .def("Application")
        .unwrap()
        .body
        .to_string()
        .contains("ApplicationSystem"));
    assert!(spec.def("Architecture").is_none());
    for a in ["snd", "rec", "comm", "send-message", "stop"] {
        assert!(spec.atoms.contains_key(a), "{a}");
    }
    assert_eq!(
        flatten_roots(&common::modules(&["arch.psf"]), None).unwrap(),
        spec
    );
}

#[test]
fn module_without_imports_flattens_to_itself() {
    let spec = load(
        "process module M begin atoms a b processes P definitions P = a . b . P end M",
        "M",
    )
    .unwrap();
    assert_eq!(spec.atoms.keys().collect::<Vec<_>>(), ["a", "b"]);
    assert_eq!(spec.process_defs.len(), 1);
    assert_eq!(spec.def("P").unwrap().body.to_string(), "a . b . P");
    assert!(spec.sorts.is_empty() && spec.comms.is_empty());
}

const LIB: &str = "process module Lib begin parameters X begin processes X end X exports begin processes L end definitions L = X end Lib ";

#[test]
fn missing_binding_is_reported() {
    let text = format!("{LIB} process module U begin imports Lib end U");
    match load(&text, "U") {
        Err(SpecError::Flatten(FlattenError::UnboundParameter { param, .. })) => {
            assert_eq!(param, "X")
        }
        other => panic!("{other:?}"),
    }
    let text = format!(
        "{LIB} process module U begin imports Lib {{ X bound by [X -> Foo] to Nowhere }} end U"
    );
    assert!(load(&text, "U").is_err());
}

#[test]
fn resolution_errors() {
    let r = load("process module A begin imports B end A", "A");
    assert!(
        matches!(
            r,
            Err(SpecError::Flatten(FlattenError::UnresolvedImport { .. }))
        ),
        "{r:?}"
    );
    let r = load(
        "process module A begin imports B end A process module B begin imports A end B",
        "A",
    );
    assert!(
        matches!(r, Err(SpecError::Flatten(FlattenError::ImportCycle(_)))),
        "{r:?}"
    );
    let r = load(
        "process module A begin atoms a processes P definitions P = b end A",
        "A",
    );
    assert!(
        matches!(r, Err(SpecError::Flatten(FlattenError::Undeclared { .. }))),
        "{r:?}"
    );
    let r = load("process module A begin atoms a : D end A", "A");
    assert!(r.is_err());
    assert!(matches!(
        load("", "A"),
        Err(SpecError::Flatten(FlattenError::NoSuchModule(_)))
    ));
}

#[test]
fn syntax_errors_carry_positions() {
    let e = parse_spec("process module M\nbegin\n  definitions\n    P = a .\nend M").unwrap_err();
    assert_eq!(e.line, 5, "{e}");
    assert!(parse_spec("process module M begin end N").is_err());
}

#[test]
fn printing() {
    assert_eq!(ProcessExpr::atom("a").to_string(), "a");
    let e = parse_process("a . (b + c) || d").unwrap();
    assert_eq!(parse_process(&e.to_string()).unwrap(), e);
    let spec = common::load(&["data.psf", "tbdata.psf", "toolbus-components.psf"], None);
    let pt1 = spec.def("PT1").unwrap();
    let text: String = pt1
        .body
        .to_string()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    assert_eq!(
        text,
        "tb-rec-event(T1, tbterm(message)) . tb-snd-msg(t1, t2, tbterm(message)) . tb-rec-msg(t2, t1, tbterm(ack)) . tb-snd-ack-event(T1, tbterm(message)) . PT1 \
         + tb-rec-event(T1, tbterm(quit)) . snd-tb-shutdown"
    );
}
