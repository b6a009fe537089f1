//! First-order data terms, substitutions and syntactic matching.

use std::collections::BTreeMap;
use std::fmt;

/// The only infix function symbol the language knows about.
pub const CONNECT: &str = ">>";

/// A data term: a variable or a function symbol applied to arguments.
///
/// Constants are applications with no arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

pub type Subst = BTreeMap<String, Term>;

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn connect(from: Term, to: Term) -> Self {
        Term::App(CONNECT.to_string(), vec![from, to])
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn subst(&self, s: &Subst) -> Term {
        match self {
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(s)).collect()),
        }
    }

    /// Renames function symbols (not variables).
    pub fn rename_symbols(&self, f: &dyn Fn(&str) -> Option<String>) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App(name, args) => Term::App(
                f(name).unwrap_or_else(|| name.clone()),
                args.iter().map(|a| a.rename_symbols(f)).collect(),
            ),
        }
    }

    /// Turns the named constants into variables.
    pub fn bind_vars(&self, vars: &[String]) -> Term {
        match self {
            Term::App(name, args) if args.is_empty() && vars.contains(name) => {
                Term::Var(name.clone())
            }
            Term::App(name, args) => Term::App(
                name.clone(),
                args.iter().map(|a| a.bind_vars(vars)).collect(),
            ),
            Term::Var(_) => self.clone(),
        }
    }
}

/// One-way matching: extends `s` so that `pattern.subst(s) == term`.
///
/// Variables of `term` are treated as opaque constants.
pub fn match_term(pattern: &Term, term: &Term, s: &mut Subst) -> bool {
    match pattern {
        Term::Var(v) => match s.get(v) {
            Some(bound) => bound == term,
            None => {
                s.insert(v.clone(), term.clone());
                true
            }
        },
        Term::App(f, pargs) => match term {
            Term::App(g, targs) if f == g && pargs.len() == targs.len() => {
                pargs.iter().zip(targs).all(|(p, t)| match_term(p, t, s))
            }
            _ => false,
        },
    }
}

pub fn match_terms(patterns: &[Term], terms: &[Term], s: &mut Subst) -> bool {
    patterns.len() == terms.len() && patterns.iter().zip(terms).all(|(p, t)| match_term(p, t, s))
}

/// Whether two terms could become equal under some instantiation of the
/// variables of either side. Used for overlap diagnostics only.
pub fn unifiable(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Var(_), _) | (_, Term::Var(_)) => true,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unifiable(x, y))
        }
    }
}

pub fn fmt_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(name, args) if name == CONNECT && args.len() == 2 => {
                write!(f, "{}", args[0])?;
                f.write_str(" >> ")?;
                // `>>` associates to the left
                match &args[1] {
                    Term::App(n, a) if n == CONNECT && a.len() == 2 => write!(f, "({})", args[1]),
                    other => write!(f, "{other}"),
                }
            }
            Term::App(name, args) => {
                f.write_str(name)?;
                fmt_args(f, args)
            }
        }
    }
}
