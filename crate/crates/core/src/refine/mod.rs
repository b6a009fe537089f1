//! Vertical implementation: action refinement by mappings, and the check
//! that a concrete component implements an abstract one.

mod mapping;

pub use mapping::{Mapping, Refinement};

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::equiv::{rooted_weak_bisim, VerdictReport};
use crate::kernel::{
    ActionSet, Bounds, FlatSpec, KernelError, Lts, ProcessDef, ProcessExpr, Semantics,
};
use crate::syntax::ParseError;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RefineError {
    #[error("mapping syntax error at {0}")]
    Parse(#[from] ParseError),
    #[error("`{0}` is both refined and renamed (overlaps `{1}`)")]
    Overlap(String, String),
    #[error("{0}")]
    Invalid(String),
    #[error("action {action} matches more than one mapping rule: {rules}")]
    Ambiguous { action: String, rules: String },
    #[error("unknown process {0}")]
    UnknownProcess(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Result of applying a mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applied {
    pub defs: Vec<ProcessDef>,
    /// Actions left unchanged, and other non-fatal findings.
    pub warnings: Vec<String>,
}

fn map_action(
    name: &str,
    args: &[crate::kernel::Term],
    m: &Mapping,
) -> Result<Option<ProcessExpr>, RefineError> {
    let mut hits: Vec<(String, ProcessExpr)> = Vec::new();
    for r in &m.refinements {
        if let Some(s) = r.from.matches(name, args) {
            let seq =
                r.to.iter()
                    .map(|t| {
                        let (n, a) = t.instantiate(&s, args);
                        ProcessExpr::Atom(n, a)
                    })
                    .collect();
            hits.push((r.from.to_string(), ProcessExpr::seq(seq)));
        }
    }
    for r in &m.renamings {
        if let Some(s) = r.from.matches(name, args) {
            let (n, a) = r.to.instantiate(&s, args);
            hits.push((r.from.to_string(), ProcessExpr::Atom(n, a)));
        }
    }
    match hits.len() {
        0 => Ok(None),
        1 => Ok(hits.pop().map(|h| h.1)),
        _ => Err(RefineError::Ambiguous {
            action: ProcessExpr::Atom(name.to_string(), args.to_vec()).to_string(),
            rules: hits
                .iter()
                .map(|h| h.0.as_str())
                .collect::<Vec<_>>()
                .join(", "),
        }),
    }
}

fn apply_expr(
    e: &ProcessExpr,
    m: &Mapping,
    renames: &IndexMap<String, String>,
    warnings: &mut BTreeSet<String>,
) -> Result<ProcessExpr, RefineError> {
    use ProcessExpr::*;
    Ok(match e {
        Atom(n, args) => match map_action(n, args, m)? {
            Some(x) => x,
            None => {
                warnings.insert(format!(
                    "action {e} is not mapped and passes through unchanged"
                ));
                e.clone()
            }
        },
        Call(n, args) => Call(
            renames.get(n).cloned().unwrap_or_else(|| n.clone()),
            args.clone(),
        ),
        Skip | Delta => e.clone(),
        Seq(xs) => {
            let mut items = Vec::with_capacity(xs.len());
            for x in xs {
                match (x, apply_expr(x, m, renames, warnings)?) {
                    (Atom(..), Seq(inner)) => items.extend(inner),
                    (_, y) => items.push(y),
                }
            }
            Seq(items)
        }
        Alt(xs) => Alt(xs
            .iter()
            .map(|x| apply_expr(x, m, renames, warnings))
            .collect::<Result<_, _>>()?),
        Par(xs) => Par(xs
            .iter()
            .map(|x| apply_expr(x, m, renames, warnings))
            .collect::<Result<_, _>>()?),
        Encaps(h, b) | Hide(h, b) => {
            note_set(h, m, warnings);
            let b = Box::new(apply_expr(b, m, renames, warnings)?);
            if matches!(e, Encaps(..)) {
                Encaps(h.clone(), b)
            } else {
                Hide(h.clone(), b)
            }
        }
        Rename(r, b) => {
            let set = ActionSet::new(r.0.iter().map(|x| x.from.clone()));
            note_set(&set, m, warnings);
            Rename(r.clone(), Box::new(apply_expr(b, m, renames, warnings)?))
        }
        Sum(v, s, b) => Sum(
            v.clone(),
            s.clone(),
            Box::new(apply_expr(b, m, renames, warnings)?),
        ),
    })
}

fn note_set(h: &ActionSet, m: &Mapping, warnings: &mut BTreeSet<String>) {
    for p in h.items() {
        let mapped = m.refinements.iter().any(|r| r.from.name == p.name)
            || m.renamings.iter().any(|r| r.from.name == p.name);
        if mapped {
            warnings.insert(format!(
                "operator set mentions mapped action {}; the set is left unchanged",
                p.name
            ));
        }
    }
}

/// Replaces every mapped action by its refinement (or renaming) and renames
/// processes. Everything else is kept as written.
pub fn apply_mapping(defs: &[ProcessDef], m: &Mapping) -> Result<Applied, RefineError> {
    apply_with(defs, m, &m.process_renames)
}

fn apply_with(
    defs: &[ProcessDef],
    m: &Mapping,
    renames: &IndexMap<String, String>,
) -> Result<Applied, RefineError> {
    let mut warnings = BTreeSet::new();
    let mut out = Vec::with_capacity(defs.len());
    for d in defs {
        out.push(ProcessDef {
            name: renames
                .get(&d.name)
                .cloned()
                .unwrap_or_else(|| d.name.clone()),
            params: d.params.clone(),
            body: apply_expr(&d.body, m, renames, &mut warnings)?,
        });
    }
    Ok(Applied {
        defs: out,
        warnings: warnings.into_iter().collect(),
    })
}

/// Definitions reachable from `e`, in discovery order.
pub fn reachable_defs(spec: &FlatSpec, e: &ProcessExpr) -> Result<Vec<ProcessDef>, RefineError> {
    let mut order: Vec<String> = Vec::new();
    let mut stack: Vec<String> = e.called_processes().into_iter().collect();
    while let Some(n) = stack.pop() {
        if order.contains(&n) {
            continue;
        }
        let d = spec
            .def(&n)
            .ok_or_else(|| RefineError::UnknownProcess(n.clone()))?;
        stack.extend(d.body.called_processes());
        order.push(n);
    }
    Ok(order.iter().filter_map(|n| spec.def(n).cloned()).collect())
}

#[derive(Debug, Clone)]
pub struct VerticalReport {
    pub related: bool,
    /// Rooted weak bisimilarity of the two hidden views.
    pub hidden: VerdictReport,
    /// Whether the concrete process is, up to τ, the mapped abstract one.
    /// This catches reorderings inside a refinement, which the hidden views
    /// cannot see.
    pub ordering: VerdictReport,
    /// The abstract process with refined actions hidden and local actions renamed.
    pub abstract_view: Lts,
    /// The concrete process with all refinement-body actions hidden.
    pub concrete_view: Lts,
    pub warnings: Vec<String>,
}

impl VerticalReport {
    pub fn summary(&self) -> String {
        if self.related {
            "related (vertical bisimulation)".to_string()
        } else if !self.hidden.related {
            format!(
                "not related: hidden views differ, {}",
                self.hidden.summary()
            )
        } else {
            format!(
                "not related: refinement order differs, {}",
                self.ordering.summary()
            )
        }
    }
}

impl fmt::Display for VerticalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary())?;
        writeln!(
            f,
            "  abstract view: {} states, {} transitions ({} tau)",
            self.abstract_view.num_states(),
            self.abstract_view.transitions.len(),
            self.abstract_view.tau_count()
        )?;
        writeln!(
            f,
            "  concrete view: {} states, {} transitions ({} tau)",
            self.concrete_view.num_states(),
            self.concrete_view.transitions.len(),
            self.concrete_view.tau_count()
        )?;
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

/// `hide(refined, rename(renamings, abs))` against `hide(bodies, conc)` up
/// to rooted weak bisimilarity, plus the ordering check.
pub fn vertical_check(
    spec: &FlatSpec,
    abs: &ProcessExpr,
    conc: &ProcessExpr,
    m: &Mapping,
    bounds: Bounds,
) -> Result<VerticalReport, RefineError> {
    let sem = Semantics::new(spec, bounds);
    let s_prime = ProcessExpr::Hide(
        m.refined_set(),
        Box::new(ProcessExpr::Rename(m.rename_map(), Box::new(abs.clone()))),
    );
    let i_prime = ProcessExpr::Hide(m.body_set(), Box::new(conc.clone()));
    let abstract_view = sem.build_lts(&s_prime)?;
    let concrete_view = sem.build_lts(&i_prime)?;
    let hidden = rooted_weak_bisim(&abstract_view, &concrete_view);

    // abs with the mapping applied, under fresh process names
    let mut ext = spec.clone();
    let defs = reachable_defs(spec, abs)?;
    let mut fresh: IndexMap<String, String> = IndexMap::new();
    for d in &defs {
        let mut n = format!("{}'", d.name);
        while spec.def(&n).is_some() {
            n.push('\'');
        }
        fresh.insert(d.name.clone(), n);
    }
    let applied = apply_with(&defs, m, &fresh)?;
    for d in applied.defs {
        ext.add_def(d);
    }
    let mut w = BTreeSet::new();
    let mapped_abs = apply_expr(abs, m, &fresh, &mut w)?;
    let ext_sem = Semantics::new(&ext, bounds);
    let ordering = rooted_weak_bisim(&ext_sem.build_lts(&mapped_abs)?, &sem.build_lts(conc)?);

    let mut warnings: Vec<String> = applied.warnings;
    let body = m.body_set();
    let abs_lts = sem.build_lts(abs)?;
    for t in &abs_lts.transitions {
        if !t.label.is_tau() && body.contains(&t.label.name, &t.label.args) {
            let msg = format!(
                "abstract action {} also occurs in a refinement body",
                t.label
            );
            if !warnings.contains(&msg) {
                warnings.push(msg);
            }
        }
    }
    for r in &m.renamings {
        if body.mentions(&r.to.name) {
            warnings.push(format!(
                "renaming target {} also occurs in a refinement body and is hidden",
                r.to
            ));
        }
    }
    Ok(VerticalReport {
        related: hidden.related && ordering.related,
        hidden,
        ordering,
        abstract_view,
        concrete_view,
        warnings,
    })
}

/// The refined definitions as a module that imports what the mapping lists.
pub fn emit_module(applied: &Applied, m: &Mapping) -> String {
    let name = m.module.clone().unwrap_or_else(|| "Refined".to_string());
    crate::syntax::print_process_module(&name, &m.imports, &applied.defs)
}
