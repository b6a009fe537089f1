use std::fmt;

use serde::{Serialize, Serializer};

use super::term::{fmt_args, Term};

/// The label of a transition.
///
/// Ordering is total (name, then arguments, then flags) and τ sorts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionLabel {
    pub name: String,
    pub args: Vec<Term>,
    pub tau: bool,
    /// Firing this action ends the whole configuration.
    pub shutdown: bool,
}

impl ActionLabel {
    pub fn new(name: impl Into<String>, args: Vec<Term>) -> Self {
        ActionLabel {
            name: name.into(),
            args,
            tau: false,
            shutdown: false,
        }
    }

    pub fn tau() -> Self {
        ActionLabel {
            name: String::new(),
            args: Vec::new(),
            tau: true,
            shutdown: false,
        }
    }

    pub fn is_tau(&self) -> bool {
        self.tau
    }

    /// Same action without the shutdown flag; equivalences compare these.
    pub fn observable(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tau {
            return f.write_str("tau");
        }
        f.write_str(&self.name)?;
        fmt_args(f, &self.args)
    }
}

impl Serialize for ActionLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
