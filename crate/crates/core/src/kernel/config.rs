//! Runtime configurations: a process term split along its static structure.

use std::fmt;

use super::expr::{ActionSet, ProcessExpr, RenameMap};

/// A configuration keeps parallel components, encapsulations, hidings and
/// renamings as explicit nodes so that components keep a stable position
/// (their node id) while they evolve. Sequential behaviour lives in
/// `Thread` leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Config {
    Thread {
        origin: Option<String>,
        expr: ProcessExpr,
    },
    /// Terminated components stay as `Done` so that sibling ids do not shift.
    Par(Vec<Config>),
    Encaps {
        set: ActionSet,
        name: Option<String>,
        body: Box<Config>,
    },
    Hide(ActionSet, Box<Config>),
    Rename(RenameMap, Box<Config>),
    /// A structured configuration followed by a sequential continuation.
    Seq(Box<Config>, ProcessExpr),
    Done,
}

pub const ROOT_ID: &str = "n";

impl Config {
    pub fn is_done(&self) -> bool {
        matches!(self, Config::Done)
    }

    pub(crate) fn par(children: Vec<Config>) -> Config {
        if children.iter().all(Config::is_done) {
            Config::Done
        } else {
            Config::Par(children)
        }
    }

    /// Leaves with their ids, in left-to-right order.
    pub fn threads(&self) -> Vec<(String, &Config)> {
        let mut out = Vec::new();
        self.collect_threads(ROOT_ID.to_string(), &mut out);
        out
    }

    fn collect_threads<'a>(&'a self, id: String, out: &mut Vec<(String, &'a Config)>) {
        match self {
            Config::Thread { .. } => out.push((id, self)),
            Config::Par(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    c.collect_threads(format!("{id}.{i}"), out);
                }
            }
            Config::Encaps { body, .. } | Config::Hide(_, body) | Config::Rename(_, body) => {
                body.collect_threads(id, out)
            }
            Config::Seq(c, _) => c.collect_threads(id, out),
            Config::Done => {}
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::Thread { expr, .. } => write!(f, "{expr}"),
            Config::Par(cs) => {
                f.write_str("[")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" || ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
            Config::Encaps { set, body, .. } => write!(f, "encaps({set}, {body})"),
            Config::Hide(set, body) => write!(f, "hide({set}, {body})"),
            Config::Rename(map, body) => write!(f, "rename({map}, {body})"),
            Config::Seq(c, rest) => write!(f, "[{c}] . {rest}"),
            Config::Done => f.write_str("<done>"),
        }
    }
}
