//! Leftmost-innermost term rewriting.

use std::fmt;

use super::term::{match_term, Subst, Term};
use super::KernelError;

/// An oriented equation `lhs = rhs`; variables are `Term::Var`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

pub struct Rewriter<'a> {
    rules: &'a [Equation],
    budget: usize,
    used: usize,
}

impl<'a> Rewriter<'a> {
    pub fn new(rules: &'a [Equation], budget: usize) -> Self {
        Rewriter {
            rules,
            budget,
            used: 0,
        }
    }

    pub fn steps_used(&self) -> usize {
        self.used
    }

    pub fn normalize(&mut self, t: &Term) -> Result<Term, KernelError> {
        if self.rules.is_empty() {
            return Ok(t.clone());
        }
        let t = match t {
            Term::Var(_) => return Ok(t.clone()),
            Term::App(f, args) => {
                let args = args
                    .iter()
                    .map(|a| self.normalize(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Term::App(f.clone(), args)
            }
        };
        for rule in self.rules {
            let mut s = Subst::new();
            if match_term(&rule.lhs, &t, &mut s) {
                self.used += 1;
                if self.used > self.budget {
                    return Err(KernelError::RewriteBudget {
                        term: t.to_string(),
                        limit: self.budget,
                    });
                }
                return self.normalize(&rule.rhs.subst(&s));
            }
        }
        Ok(t)
    }
}
