//! Process terms, data rewriting, operational semantics and LTS construction.

pub mod comm;
pub mod config;
pub mod expr;
pub mod label;
pub mod lts;
pub mod normalize;
pub mod rewrite;
pub mod sos;
pub mod spec;
pub mod term;

pub use comm::{CommEntry, CommTable};
pub use config::Config;
pub use expr::{ActPattern, ActionSet, ProcessDef, ProcessExpr, RenameMap, RenameRule};
pub use label::ActionLabel;
pub use lts::{Lts, Transition};
pub use normalize::normalize;
pub use rewrite::{Equation, Rewriter};
pub use sos::{Semantics, Step};
pub use spec::{FlatSpec, FuncDecl};
pub use term::{Subst, Term};

use thiserror::Error;

/// Exploration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: usize,
    pub max_rewrite_steps: usize,
    pub max_unfold_depth: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_states: 100_000,
            max_rewrite_steps: 10_000,
            max_unfold_depth: 5_000,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("rewrite budget of {limit} steps exceeded while normalizing {term} (non-terminating equations?)")]
    RewriteBudget { term: String, limit: usize },
    #[error("unfold depth {limit} exceeded at process {process} (unguarded recursion?)")]
    UnfoldDepth { process: String, limit: usize },
    #[error("recursion through {0} is not guarded by an action")]
    Unguarded(String),
    #[error("unknown process {0}")]
    UnknownProcess(String),
    #[error("process {name} expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("sort {sort} is recursive; cannot enumerate it for a sum")]
    UnboundedData { sort: String },
    #[error("sort {sort} has no constructors")]
    EmptySort { sort: String },
    #[error("state budget of {limit} exceeded ({frontier} state(s) still unexplored)")]
    StateBudget { limit: usize, frontier: usize },
    #[error("LTS text, line {line}: {message}")]
    LtsFormat { line: usize, message: String },
}
