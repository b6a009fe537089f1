//! The communication function: which pairs of actions synchronise, and into what.

use std::fmt;

use super::expr::ActPattern;
use super::term::{Subst, Term};

/// `left | right = result`.
///
/// When all three patterns are bare names the entry is positional: the two
/// actions communicate iff their argument lists are equal, and the result
/// carries that list. Otherwise the patterns are matched with a shared
/// substitution over `vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommEntry {
    pub left: ActPattern,
    pub right: ActPattern,
    pub result: ActPattern,
    pub vars: Vec<(String, String)>,
}

impl CommEntry {
    pub fn simple(left: &str, right: &str, result: &str) -> Self {
        CommEntry {
            left: ActPattern::any(left),
            right: ActPattern::any(right),
            result: ActPattern::any(result),
            vars: Vec::new(),
        }
    }

    pub fn is_positional(&self) -> bool {
        self.left.args.is_none() && self.right.args.is_none()
    }

    fn try_ordered(
        &self,
        p: &ActPattern,
        q: &ActPattern,
        a: (&str, &[Term]),
        b: (&str, &[Term]),
    ) -> Option<(String, Vec<Term>)> {
        if self.is_positional() {
            if p.name == a.0 && q.name == b.0 && a.1 == b.1 {
                return Some(self.result.instantiate(&Subst::new(), a.1));
            }
            return None;
        }
        let mut s = Subst::new();
        if p.matches_into(a.0, a.1, &mut s) && q.matches_into(b.0, b.1, &mut s) {
            return Some(self.result.instantiate(&s, a.1));
        }
        None
    }

    /// Symmetric lookup: `γ(a, b) = γ(b, a)`.
    pub fn apply(&self, a: (&str, &[Term]), b: (&str, &[Term])) -> Option<(String, Vec<Term>)> {
        self.try_ordered(&self.left, &self.right, a, b)
            .or_else(|| self.try_ordered(&self.right, &self.left, a, b))
    }
}

impl fmt::Display for CommEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {} = {}", self.left, self.right, self.result)?;
        if !self.vars.is_empty() {
            f.write_str(" for ")?;
            for (i, (v, s)) in self.vars.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v} in {s}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CommTable {
    pub entries: Vec<CommEntry>,
}

impl CommTable {
    pub fn new(entries: Vec<CommEntry>) -> Self {
        let mut t = CommTable::default();
        for e in entries {
            t.push(e);
        }
        t
    }

    /// Adds an entry unless an identical one is present.
    pub fn push(&mut self, e: CommEntry) {
        if !self.entries.contains(&e) {
            self.entries.push(e);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All results of communicating `a` with `b`, deduplicated, in table order.
    pub fn communicate(&self, a: (&str, &[Term]), b: (&str, &[Term])) -> Vec<(String, Vec<Term>)> {
        let mut out: Vec<(String, Vec<Term>)> = Vec::new();
        for e in &self.entries {
            if let Some(r) = e.apply(a, b) {
                if !out.contains(&r) {
                    out.push(r);
                }
            }
        }
        out
    }

    /// Action names occurring on either side of some entry.
    pub fn participants(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.entries {
            for n in [&e.left.name, &e.right.name] {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
        }
        out
    }
}
