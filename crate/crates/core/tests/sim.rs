mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Cursor;
use std::net::TcpListener;

use paw_core::kernel::{Bounds, FlatSpec, Lts, Semantics};
use paw_core::sim::{
    anim_model, serve_stdio, serve_websocket, ClientMsg, ServerMsg, Session, SimError, Simulator,
};
use paw_core::syntax::load;

fn arch() -> FlatSpec {
    common::load(&["arch.psf"], None)
}

fn arch_sim() -> Simulator {
    Simulator::new(arch(), None, Bounds::default()).unwrap()
}

fn toolbus_app() -> FlatSpec {
    common::load(
        &[
            "data.psf",
            "tbdata.psf",
            "toolbus-components.psf",
            "tools.psf",
            "adapted-tool1.psf",
            "ptool1.psf",
            "ptool2.psf",
            "toolbus-app.psf",
        ],
        None,
    )
}

fn labels(sim: &Simulator) -> BTreeSet<String> {
    sim.enabled().iter().map(|s| s.label.to_string()).collect()
}

fn choose(sim: &mut Simulator, label: &str) {
    let i = sim
        .enabled()
        .iter()
        .position(|s| s.label.to_string() == label)
        .unwrap_or_else(|| panic!("{label} not enabled in {:?}", labels(sim)));
    sim.step(i).unwrap();
}

#[test]
fn arch_starts_with_component_choices() {
    let sim = arch_sim();
    assert_eq!(
        labels(&sim),
        BTreeSet::from(["send-message".to_string(), "stop".to_string()])
    );
    assert!(sim.enabled().iter().all(|s| s.participants == ["n.0.0"]));
}

#[test]
fn arch_message_round() {
    let mut sim = arch_sim();
    choose(&mut sim, "send-message");
    choose(&mut sim, "comm(c1 >> c2, message)");
    assert_eq!(
        labels(&sim),
        BTreeSet::from(["comm(c2 >> c1, ack)".to_string()])
    );
    let ack = &sim.enabled()[0];
    assert!(
        ack.participants.contains(&"n.0.1".to_string()),
        "Component2 takes part in the ack"
    );
    choose(&mut sim, "comm(c2 >> c1, ack)");
    assert_eq!(sim.current(), sim.initial());
}

#[test]
fn component2_ready_to_acknowledge() {
    let mut sim = arch_sim();
    choose(&mut sim, "send-message");
    choose(&mut sim, "comm(c1 >> c2, message)");
    let ready = sim.ready().unwrap();
    let c2: Vec<String> = ready
        .iter()
        .find(|(id, _)| id == "n.0.1")
        .unwrap()
        .1
        .iter()
        .map(|l| l.to_string())
        .collect();
    assert_eq!(c2, ["snd(c2 >> c1, ack)"]);
    let c1: Vec<String> = ready
        .iter()
        .find(|(id, _)| id == "n.0.0")
        .unwrap()
        .1
        .iter()
        .map(|l| l.to_string())
        .collect();
    assert_eq!(c1, ["rec(c2 >> c1, ack)"]);
}

#[test]
fn arch_stop_shuts_everything_down() {
    let mut sim = arch_sim();
    choose(&mut sim, "stop");
    choose(&mut sim, "comm-quit");
    choose(&mut sim, "shutdown");
    assert!(sim.is_terminated());
    assert!(sim.enabled().is_empty());
    assert!(matches!(sim.step(0), Err(SimError::Terminated)));
}

#[test]
fn bad_choice_and_deadlock() {
    let mut sim = arch_sim();
    assert!(matches!(
        sim.step(99),
        Err(SimError::OutOfRange {
            choice: 99,
            enabled: 2
        })
    ));
    assert_eq!(sim.step_no(), 0);
    let spec = load(
        "process module M begin atoms a processes D definitions D = delta end M",
        "M",
    )
    .unwrap();
    let mut d = Simulator::new(spec, Some("D"), Bounds::default()).unwrap();
    assert!(d.is_deadlocked());
    assert!(matches!(d.step(0), Err(SimError::Deadlock)));
    assert!(matches!(
        Simulator::new(arch(), Some("Nope"), Bounds::default()),
        Err(SimError::Kernel(_))
    ));
}

#[test]
fn random_runs_are_seeded_and_replayable() {
    for seed in 0..50u64 {
        let mut a = arch_sim();
        let mut b = arch_sim();
        let ra = a.run_random(40, seed).unwrap();
        let rb = b.run_random(40, seed).unwrap();
        assert_eq!(ra, rb);
        let end = a.current().clone();
        let choices = a.choices();
        let mut c = arch_sim();
        c.replay(&choices).unwrap();
        assert_eq!(c.current(), &end);
        assert_eq!(c.trace(), a.trace());
    }
}

/// Every simulated configuration is an LTS state with the same outgoing
/// labels, and every event is an LTS edge.
fn agrees_with_lts(spec: FlatSpec, seeds: u64, steps: usize) {
    let lts: Lts = Semantics::new(&spec, Bounds::default())
        .build_entry(spec.entry.as_deref().unwrap())
        .unwrap();
    let index: BTreeMap<&str, usize> = lts
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let state = |sim: &Simulator| {
        *index
            .get(sim.current().to_string().as_str())
            .expect("simulated state is in the LTS")
    };
    for seed in 0..seeds {
        let mut sim = Simulator::new(spec.clone(), None, Bounds::default()).unwrap();
        assert_eq!(state(&sim), lts.initial);
        let mut rng = seed;
        for _ in 0..steps {
            let s = state(&sim);
            let out: BTreeSet<String> = lts.outgoing(s).map(|t| t.label.to_string()).collect();
            assert_eq!(labels(&sim), out);
            if sim.enabled().is_empty() {
                assert_eq!(sim.is_terminated(), lts.terminating.contains(&s));
                break;
            }
            rng = rng
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let ev = sim
                .step((rng >> 33) as usize % sim.enabled().len())
                .unwrap();
            let t = state(&sim);
            assert!(lts.outgoing(s).any(|tr| tr.label == ev.label && tr.to == t));
        }
    }
}

#[test]
fn arch_traces_follow_the_lts() {
    agrees_with_lts(arch(), 30, 25);
}

#[test]
fn toolbus_traces_follow_the_lts() {
    agrees_with_lts(toolbus_app(), 30, 40);
}

#[test]
fn arch_model_has_boxes_and_components() {
    let sim = arch_sim();
    let m = anim_model(sim.spec(), sim.initial());
    assert_eq!(m.boxes.len(), 2);
    assert_eq!(m.nodes.len(), 4);
    let names: BTreeSet<&str> = m.nodes.iter().map(|n| n.name.as_str()).collect();
    assert!(names.contains("Component1") && names.contains("Component2"));
    let inner = &m.boxes[1];
    assert_eq!(inner.parent.as_deref(), Some("b0"));
    for c in ["Component1", "Component2"] {
        assert_eq!(
            m.nodes.iter().find(|n| n.name == c).unwrap().box_id,
            inner.id
        );
    }
    assert!(m.edges.iter().any(|e| e.from == "n.0.0" && e.to == "n.0.1"));
}

#[test]
fn toolbus_model_nests_adapter_with_tool() {
    let spec = toolbus_app();
    let sim = Simulator::new(spec, None, Bounds::default()).unwrap();
    let m = anim_model(sim.spec(), sim.initial());
    let box_of = |name: &str| {
        m.nodes
            .iter()
            .find(|n| n.name == name)
            .unwrap_or_else(|| panic!("{name}"))
            .box_id
            .clone()
    };
    assert_eq!(box_of("AdapterTool1"), box_of("Tool1"));
    assert_ne!(box_of("AdapterTool1"), box_of("PT1"));
    assert_eq!(box_of("PT2"), box_of("Tool2"));
}

fn decode(out: &[u8]) -> Vec<ServerMsg> {
    String::from_utf8(out.to_vec())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{l}: {e}")))
        .collect()
}

fn kind(m: &ServerMsg) -> &'static str {
    match m {
        ServerMsg::Model { .. } => "model",
        ServerMsg::State { .. } => "state",
        ServerMsg::Event { .. } => "event",
        ServerMsg::Error { .. } => "error",
    }
}

#[test]
fn stdio_protocol_sequence() {
    let input = [
        r#"{"type":"step","idx":0}"#,
        r#"{"type":"step","idx":7}"#,
        "not json",
        r#"{"type":"reset"}"#,
        r#"{"type":"auto","steps":3,"seed":1}"#,
    ]
    .join("\n");
    let mut out = Vec::new();
    serve_stdio(arch_sim(), Cursor::new(input), &mut out).unwrap();
    let msgs = decode(&out);
    let kinds: Vec<&str> = msgs.iter().map(kind).collect();
    assert_eq!(
        kinds,
        [
            "model", "state", "event", "state", "error", "error", "state", "event", "event",
            "event", "state"
        ]
    );
    match &msgs[1] {
        ServerMsg::State {
            step_no,
            enabled,
            highlighted,
            terminated,
        } => {
            assert_eq!(*step_no, 0);
            assert_eq!(enabled.len(), 2);
            assert_eq!(enabled[0].idx, 0);
            assert_eq!(highlighted, &["n.0.0"]);
            assert!(!terminated);
        }
        m => panic!("{m:?}"),
    }
    match &msgs[2] {
        ServerMsg::Event {
            label,
            participants,
        } => {
            assert_eq!(label, "send-message");
            assert_eq!(participants, &["n.0.0"]);
        }
        m => panic!("{m:?}"),
    }
    match &msgs[6] {
        ServerMsg::State { step_no, .. } => assert_eq!(*step_no, 0),
        m => panic!("{m:?}"),
    }
    match msgs.last().unwrap() {
        ServerMsg::State { step_no, .. } => assert_eq!(*step_no, 3),
        m => panic!("{m:?}"),
    }
}

#[test]
fn wire_format_field_names() {
    let s = Session::new(arch_sim());
    let v: serde_json::Value = serde_json::to_value(s.state_msg()).unwrap();
    assert_eq!(v["type"], "state");
    assert_eq!(v["stepNo"], 0);
    assert_eq!(v["enabled"][1]["label"], "stop");
    let m: serde_json::Value = serde_json::to_value(s.model_msg()).unwrap();
    assert_eq!(m["type"], "model");
    assert_eq!(m["nodes"][0]["box"], "b1");
    let c: ClientMsg = serde_json::from_str(r#"{"type":"auto","steps":2,"seed":9}"#).unwrap();
    assert_eq!(c, ClientMsg::Auto { steps: 2, seed: 9 });
    assert_eq!(
        serde_json::from_str::<ClientMsg>(r#"{"type":"reset"}"#).unwrap(),
        ClientMsg::Reset {}
    );
}

#[test]
fn websocket_session() {
    use tungstenite::Message;
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let server = std::thread::spawn(move || serve_websocket(listener, || Ok(arch_sim()), Some(1)));
    let (mut ws, _) = tungstenite::connect(format!("ws://{addr}")).unwrap();
    let recv = |ws: &mut tungstenite::WebSocket<_>| loop {
        if let Message::Text(t) = ws.read().unwrap() {
            return serde_json::from_str::<ServerMsg>(&t).unwrap();
        }
    };
    assert_eq!(kind(&recv(&mut ws)), "model");
    assert_eq!(kind(&recv(&mut ws)), "state");
    ws.send(Message::text(r#"{"type":"step","idx":1}"#))
        .unwrap();
    let got = [recv(&mut ws), recv(&mut ws)];
    assert_eq!(
        got[0],
        ServerMsg::Event {
            label: "stop".into(),
            participants: vec!["n.0.0".into()]
        }
    );
    assert_eq!(kind(&got[1]), "state");
    ws.close(None).unwrap();
    while ws.read().is_ok() {}
    server.join().unwrap().unwrap();
}
