//! Newline-delimited JSON messages between the simulator and a front end,
//! over standard streams or a WebSocket.

use std::io::{BufRead, Write};
use std::net::TcpListener;

use serde::{Deserialize, Serialize};

use super::{anim_model, AnimModel, BoxInfo, Edge, Node, SimError, Simulator};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnabledInfo {
    pub idx: usize,
    pub label: String,
    pub participants: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ServerMsg {
    Model {
        boxes: Vec<BoxInfo>,
        nodes: Vec<Node>,
        edges: Vec<Edge>,
    },
    State {
        #[serde(rename = "stepNo")]
        step_no: usize,
        enabled: Vec<EnabledInfo>,
        highlighted: Vec<String>,
        terminated: bool,
    },
    Event {
        label: String,
        participants: Vec<String>,
    },
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClientMsg {
    Step { idx: usize },
    Reset {},
    Auto { steps: usize, seed: u64 },
}

/// One client's view of a simulator. Messages are handled strictly one at
/// a time.
pub struct Session {
    sim: Simulator,
    model: AnimModel,
}

impl Session {
    pub fn new(sim: Simulator) -> Session {
        let model = anim_model(sim.spec(), sim.initial());
        Session { sim, model }
    }

    pub fn simulator(&self) -> &Simulator {
        &self.sim
    }

    pub fn model_msg(&self) -> ServerMsg {
        let m = self.model.clone();
        ServerMsg::Model {
            boxes: m.boxes,
            nodes: m.nodes,
            edges: m.edges,
        }
    }

    pub fn state_msg(&self) -> ServerMsg {
        let enabled: Vec<EnabledInfo> = self
            .sim
            .enabled()
            .iter()
            .enumerate()
            .map(|(idx, s)| EnabledInfo {
                idx,
                label: s.label.to_string(),
                participants: s.participants.clone(),
            })
            .collect();
        let mut highlighted: Vec<String> = enabled
            .iter()
            .flat_map(|e| e.participants.iter().cloned())
            .collect();
        highlighted.sort();
        highlighted.dedup();
        ServerMsg::State {
            step_no: self.sim.step_no(),
            enabled,
            highlighted,
            terminated: self.sim.is_terminated(),
        }
    }

    /// What a client sees on connecting: the model, then the state.
    pub fn open(&self) -> Vec<ServerMsg> {
        vec![self.model_msg(), self.state_msg()]
    }

    fn error(e: impl ToString) -> Vec<ServerMsg> {
        vec![ServerMsg::Error {
            message: e.to_string(),
        }]
    }

    /// `step` answers with `event` then `state`, or a single `error`;
    /// `reset` with `state`; `auto` with one `event` per fired step and a
    /// final `state`.
    pub fn handle(&mut self, msg: ClientMsg) -> Vec<ServerMsg> {
        match msg {
            ClientMsg::Step { idx } => match self.sim.step(idx) {
                Ok(ev) => vec![
                    ServerMsg::Event {
                        label: ev.label.to_string(),
                        participants: ev.participants,
                    },
                    self.state_msg(),
                ],
                Err(e) => Self::error(e),
            },
            ClientMsg::Reset {} => match self.sim.reset() {
                Ok(()) => vec![self.state_msg()],
                Err(e) => Self::error(e),
            },
            ClientMsg::Auto { steps, seed } => match self.sim.run_random(steps, seed) {
                Ok(evs) => {
                    let mut out: Vec<ServerMsg> = evs
                        .into_iter()
                        .map(|ev| ServerMsg::Event {
                            label: ev.label.to_string(),
                            participants: ev.participants,
                        })
                        .collect();
                    out.push(self.state_msg());
                    out
                }
                Err(e) => Self::error(e),
            },
        }
    }

    /// Parses and handles one line of input.
    pub fn handle_line(&mut self, line: &str) -> Vec<ServerMsg> {
        match serde_json::from_str::<ClientMsg>(line) {
            Ok(m) => self.handle(m),
            Err(e) => Self::error(format!("bad message: {e}")),
        }
    }
}

fn encode(m: &ServerMsg) -> String {
    serde_json::to_string(m).expect("server messages always serialize")
}

/// Runs one session over a reader/writer pair until end of input.
pub fn serve_stdio(
    sim: Simulator,
    input: impl BufRead,
    mut output: impl Write,
) -> std::io::Result<()> {
    let mut session = Session::new(sim);
    for m in session.open() {
        writeln!(output, "{}", encode(&m))?;
    }
    output.flush()?;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for m in session.handle_line(&line) {
            writeln!(output, "{}", encode(&m))?;
        }
        output.flush()?;
    }
    Ok(())
}

/// Accepts WebSocket clients one after another; each gets a fresh
/// simulator from `make`. Stops after `max_sessions` sessions if given.
pub fn serve_websocket(
    listener: TcpListener,
    make: impl Fn() -> Result<Simulator, SimError>,
    max_sessions: Option<usize>,
) -> std::io::Result<()> {
    use tungstenite::Message;
    let mut served = 0;
    for stream in listener.incoming() {
        let stream = stream?;
        let peer = stream
            .peer_addr()
            .map(|a| a.to_string())
            .unwrap_or_default();
        let mut ws = match tungstenite::accept(stream) {
            Ok(ws) => ws,
            Err(e) => {
                log::warn!("handshake with {peer} failed: {e}");
                continue;
            }
        };
        log::info!("session with {peer} opened");
        let result = (|| -> Result<(), String> {
            let sim = make().map_err(|e| e.to_string())?;
            let mut session = Session::new(sim);
            for m in session.open() {
                ws.send(Message::text(encode(&m)))
                    .map_err(|e| e.to_string())?;
            }
            loop {
                let msg = match ws.read() {
                    Ok(m) => m,
                    Err(tungstenite::Error::ConnectionClosed) => return Ok(()),
                    Err(e) => return Err(e.to_string()),
                };
                let text = match msg {
                    Message::Text(t) => t.to_string(),
                    Message::Close(_) => return Ok(()),
                    _ => continue,
                };
                for line in text.lines().filter(|l| !l.trim().is_empty()) {
                    for m in session.handle_line(line) {
                        ws.send(Message::text(encode(&m)))
                            .map_err(|e| e.to_string())?;
                    }
                }
            }
        })();
        match result {
            Ok(()) => log::info!("session with {peer} closed"),
            Err(e) => log::warn!("session with {peer} ended: {e}"),
        }
        served += 1;
        if max_sessions.is_some_and(|m| served >= m) {
            break;
        }
    }
    Ok(())
}
