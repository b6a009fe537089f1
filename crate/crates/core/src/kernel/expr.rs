//! Process terms and the action sets / renamings the operators carry.

use std::collections::BTreeSet;
use std::fmt;

use super::term::{fmt_args, match_terms, Subst, Term};

/// An action pattern. `args == None` matches every instance of the action;
/// otherwise arguments are matched positionally (variables bind).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActPattern {
    pub name: String,
    pub args: Option<Vec<Term>>,
}

impl ActPattern {
    pub fn any(name: impl Into<String>) -> Self {
        ActPattern {
            name: name.into(),
            args: None,
        }
    }

    pub fn exact(name: impl Into<String>, args: Vec<Term>) -> Self {
        ActPattern {
            name: name.into(),
            args: Some(args),
        }
    }

    pub fn matches(&self, name: &str, args: &[Term]) -> Option<Subst> {
        let mut s = Subst::new();
        self.matches_into(name, args, &mut s).then_some(s)
    }

    /// Matches against an action, extending an existing substitution.
    pub fn matches_into(&self, name: &str, args: &[Term], s: &mut Subst) -> bool {
        if self.name != name {
            return false;
        }
        match &self.args {
            None => true,
            Some(pats) => match_terms(pats, args, s),
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in self.args.iter().flatten() {
            a.collect_vars(&mut out);
        }
        out
    }

    /// Builds the concrete action for this template. A template without
    /// arguments forwards `forwarded`.
    pub fn instantiate(&self, s: &Subst, forwarded: &[Term]) -> (String, Vec<Term>) {
        let args = match &self.args {
            None => forwarded.to_vec(),
            Some(a) => a.iter().map(|t| t.subst(s)).collect(),
        };
        (self.name.clone(), args)
    }
}

impl fmt::Display for ActPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        match &self.args {
            None => Ok(()),
            Some(args) if args.is_empty() => Ok(()),
            Some(args) => fmt_args(f, args),
        }
    }
}

/// A set of actions (for encapsulation and hiding). Kept sorted and
/// duplicate-free so that structurally equal sets compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ActionSet(Vec<ActPattern>);

impl ActionSet {
    pub fn new(items: impl IntoIterator<Item = ActPattern>) -> Self {
        let set: BTreeSet<ActPattern> = items.into_iter().collect();
        ActionSet(set.into_iter().collect())
    }

    pub fn names(names: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self::new(names.into_iter().map(ActPattern::any))
    }

    pub fn items(&self) -> &[ActPattern] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, name: &str, args: &[Term]) -> bool {
        self.0.iter().any(|p| p.matches(name, args).is_some())
    }

    pub fn union(&self, other: &ActionSet) -> ActionSet {
        ActionSet::new(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.0.iter().any(|p| p.name == name)
    }
}

impl fmt::Display for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RenameRule {
    pub from: ActPattern,
    pub to: ActPattern,
}

/// An action renaming; the first matching rule wins.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RenameMap(pub Vec<RenameRule>);

impl RenameMap {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, name: &str, args: &[Term]) -> Option<(String, Vec<Term>)> {
        self.0.iter().find_map(|r| {
            r.from
                .matches(name, args)
                .map(|s| r.to.instantiate(&s, args))
        })
    }
}

impl fmt::Display for RenameMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} -> {}", r.from, r.to)?;
        }
        f.write_str("}")
    }
}

/// A process term.
///
/// `Seq`, `Alt` and `Par` are n-ary; [`normalize`](super::normalize::normalize)
/// flattens nested occurrences and orders the operands of the commutative ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcessExpr {
    Atom(String, Vec<Term>),
    /// The silent step.
    Skip,
    Delta,
    Seq(Vec<ProcessExpr>),
    Alt(Vec<ProcessExpr>),
    Par(Vec<ProcessExpr>),
    Encaps(ActionSet, Box<ProcessExpr>),
    Hide(ActionSet, Box<ProcessExpr>),
    Rename(RenameMap, Box<ProcessExpr>),
    Call(String, Vec<Term>),
    /// `sum(var in sort, body)`
    Sum(String, String, Box<ProcessExpr>),
}

impl ProcessExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        ProcessExpr::Atom(name.into(), Vec::new())
    }

    pub fn call(name: impl Into<String>) -> Self {
        ProcessExpr::Call(name.into(), Vec::new())
    }

    pub fn seq(items: Vec<ProcessExpr>) -> Self {
        if items.len() == 1 {
            items.into_iter().next().unwrap()
        } else {
            ProcessExpr::Seq(items)
        }
    }

    pub fn alt(items: Vec<ProcessExpr>) -> Self {
        match items.len() {
            0 => ProcessExpr::Delta,
            1 => items.into_iter().next().unwrap(),
            _ => ProcessExpr::Alt(items),
        }
    }

    pub fn par(items: Vec<ProcessExpr>) -> Self {
        if items.len() == 1 {
            items.into_iter().next().unwrap()
        } else {
            ProcessExpr::Par(items)
        }
    }

    /// Substitutes data variables; `Sum` binders shadow.
    pub fn subst(&self, s: &Subst) -> ProcessExpr {
        use ProcessExpr::*;
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Atom(n, args) => Atom(n.clone(), args.iter().map(|a| a.subst(s)).collect()),
            Call(n, args) => Call(n.clone(), args.iter().map(|a| a.subst(s)).collect()),
            Skip | Delta => self.clone(),
            Seq(xs) => Seq(xs.iter().map(|x| x.subst(s)).collect()),
            Alt(xs) => Alt(xs.iter().map(|x| x.subst(s)).collect()),
            Par(xs) => Par(xs.iter().map(|x| x.subst(s)).collect()),
            Encaps(h, b) => Encaps(h.clone(), Box::new(b.subst(s))),
            Hide(h, b) => Hide(h.clone(), Box::new(b.subst(s))),
            Rename(r, b) => Rename(r.clone(), Box::new(b.subst(s))),
            Sum(v, sort, b) => {
                let mut inner = s.clone();
                inner.remove(v);
                Sum(v.clone(), sort.clone(), Box::new(b.subst(&inner)))
            }
        }
    }

    /// Bottom-up rewrite of every node.
    pub fn map_bottom_up(&self, f: &mut dyn FnMut(ProcessExpr) -> ProcessExpr) -> ProcessExpr {
        use ProcessExpr::*;
        let rebuilt = match self {
            Atom(..) | Call(..) | Skip | Delta => self.clone(),
            Seq(xs) => Seq(xs.iter().map(|x| x.map_bottom_up(f)).collect()),
            Alt(xs) => Alt(xs.iter().map(|x| x.map_bottom_up(f)).collect()),
            Par(xs) => Par(xs.iter().map(|x| x.map_bottom_up(f)).collect()),
            Encaps(h, b) => Encaps(h.clone(), Box::new(b.map_bottom_up(f))),
            Hide(h, b) => Hide(h.clone(), Box::new(b.map_bottom_up(f))),
            Rename(r, b) => Rename(r.clone(), Box::new(b.map_bottom_up(f))),
            Sum(v, s, b) => Sum(v.clone(), s.clone(), Box::new(b.map_bottom_up(f))),
        };
        f(rebuilt)
    }

    /// Visits every node, parents before children.
    pub fn visit(&self, f: &mut dyn FnMut(&ProcessExpr)) {
        use ProcessExpr::*;
        f(self);
        match self {
            Seq(xs) | Alt(xs) | Par(xs) => xs.iter().for_each(|x| x.visit(f)),
            Encaps(_, b) | Hide(_, b) | Rename(_, b) | Sum(_, _, b) => b.visit(f),
            _ => {}
        }
    }

    pub fn atom_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| match e {
            ProcessExpr::Atom(n, _) => {
                out.insert(n.clone());
            }
            ProcessExpr::Rename(r, _) => out.extend(r.0.iter().map(|rule| rule.to.name.clone())),
            _ => {}
        });
        out
    }

    pub fn called_processes(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let ProcessExpr::Call(n, _) = e {
                out.insert(n.clone());
            }
        });
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            ProcessExpr::Alt(_) => 1,
            ProcessExpr::Par(_) => 2,
            ProcessExpr::Seq(_) => 3,
            _ => 4,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        if self.precedence() <= parent {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for ProcessExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ProcessExpr::*;
        let join =
            |f: &mut fmt::Formatter<'_>, xs: &[ProcessExpr], sep: &str, prec: u8| -> fmt::Result {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    x.fmt_operand(f, prec)?;
                }
                Ok(())
            };
        match self {
            Atom(n, args) | Call(n, args) => {
                f.write_str(n)?;
                fmt_args(f, args)
            }
            Skip => f.write_str("skip"),
            Delta => f.write_str("delta"),
            Seq(xs) if xs.is_empty() => f.write_str("skip"),
            Alt(xs) | Par(xs) if xs.is_empty() => f.write_str("delta"),
            Seq(xs) => join(f, xs, " . ", 3),
            Alt(xs) => join(f, xs, " + ", 1),
            Par(xs) => join(f, xs, " || ", 2),
            Encaps(h, b) => write!(f, "encaps({h}, {b})"),
            Hide(h, b) => write!(f, "hide({h}, {b})"),
            Rename(r, b) => write!(f, "rename({r}, {b})"),
            Sum(v, s, b) => write!(f, "sum({v} in {s}, {b})"),
        }
    }
}

/// `name(params) = body`, with parameter sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProcessDef {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub body: ProcessExpr,
}

impl ProcessDef {
    pub fn new(name: impl Into<String>, body: ProcessExpr) -> Self {
        ProcessDef {
            name: name.into(),
            params: Vec::new(),
            body,
        }
    }

    /// The definition laid out one alternative per line and one sequential
    /// operand per line, the way specifications are usually written.
    pub fn layout(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.name);
        if !self.params.is_empty() {
            out.push('(');
            out.push_str(
                &self
                    .params
                    .iter()
                    .map(|(v, _)| v.as_str())
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            out.push(')');
        }
        out.push_str(" =\n");
        let alternatives: Vec<&ProcessExpr> = match &self.body {
            ProcessExpr::Alt(xs) => xs.iter().collect(),
            other => vec![other],
        };
        for (i, alt) in alternatives.iter().enumerate() {
            let lead = if i == 0 { "    " } else { "  + " };
            let steps: Vec<String> = match alt {
                ProcessExpr::Seq(xs) => xs
                    .iter()
                    .map(|x| {
                        if x.precedence() <= 3 {
                            format!("({x})")
                        } else {
                            x.to_string()
                        }
                    })
                    .collect(),
                ProcessExpr::Alt(_) => vec![format!("({alt})")],
                other => vec![other.to_string()],
            };
            for (j, step) in steps.iter().enumerate() {
                out.push_str(if j == 0 { lead } else { "    " });
                out.push_str(step);
                if j + 1 < steps.len() {
                    out.push_str(" .");
                }
                out.push('\n');
            }
        }
        out
    }
}
