//! Horizontal implementation: constraining a process by superimposing
//! another one on it, and checking the result against the original.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::equiv::{rooted_weak_bisim, weak_trace_included, Relation, VerdictReport};
use crate::kernel::{
    ActPattern, ActionLabel, ActionSet, Bounds, CommEntry, CommTable, FlatSpec, KernelError, Lts,
    ProcessExpr, RenameMap, RenameRule, Semantics,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConstrainError {
    #[error("communication `{entry}` mentions {action}, which neither operand performs")]
    AbsentAction { entry: String, action: String },
    #[error("unknown process {0}")]
    UnknownProcess(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Action names a process can perform, found syntactically through the
/// definitions it calls.
pub fn static_alphabet(
    spec: &FlatSpec,
    e: &ProcessExpr,
) -> Result<BTreeSet<String>, ConstrainError> {
    let mut names = e.atom_names();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut stack: Vec<String> = e.called_processes().into_iter().collect();
    while let Some(p) = stack.pop() {
        if !seen.insert(p.clone()) {
            continue;
        }
        let d = spec
            .def(&p)
            .ok_or_else(|| ConstrainError::UnknownProcess(p.clone()))?;
        names.extend(d.body.atom_names());
        stack.extend(d.body.called_processes());
    }
    Ok(names)
}

#[derive(Debug, Clone)]
pub struct Constrained {
    /// The input specification with any extra communications added.
    pub spec: FlatSpec,
    /// `encaps(H, proc || constraint)`.
    pub expr: ProcessExpr,
    pub encapsulated: ActionSet,
    /// Communications between the process and the constraint.
    pub interface: Vec<CommEntry>,
    /// Communications inside the constraint.
    pub internal: Vec<CommEntry>,
    pub warnings: Vec<String>,
}

/// Superimposes `constraint` on `proc`.
///
/// The communications considered are those of `spec` plus
/// `extra`; an entry is relevant when one side belongs to the constraint.
/// Both sides of every relevant entry are encapsulated, so they can only
/// happen together.
pub fn constrain(
    spec: &FlatSpec,
    proc: &ProcessExpr,
    constraint: &ProcessExpr,
    extra: &CommTable,
) -> Result<Constrained, ConstrainError> {
    let pa = static_alphabet(spec, proc)?;
    let ca = static_alphabet(spec, constraint)?;
    for e in &extra.entries {
        for side in [&e.left.name, &e.right.name] {
            if !pa.contains(side) && !ca.contains(side) {
                return Err(ConstrainError::AbsentAction {
                    entry: e.to_string(),
                    action: side.clone(),
                });
            }
        }
    }
    let mut out = spec.clone();
    for e in &extra.entries {
        out.comms.push(e.clone());
    }
    let mut interface = Vec::new();
    let mut internal = Vec::new();
    for e in &out.comms.entries {
        let (l, r) = (&e.left.name, &e.right.name);
        if ca.contains(l) && ca.contains(r) {
            internal.push(e.clone());
        } else if (ca.contains(l) && pa.contains(r)) || (pa.contains(l) && ca.contains(r)) {
            interface.push(e.clone());
        }
    }
    let names: BTreeSet<&String> = interface
        .iter()
        .chain(&internal)
        .flat_map(|e| [&e.left.name, &e.right.name])
        .collect();
    let encapsulated = ActionSet::names(names.into_iter().cloned());
    let mut warnings = Vec::new();
    let shared: Vec<&String> = pa.intersection(&ca).collect();
    if !shared.is_empty() {
        let list: Vec<&str> = shared.iter().map(|s| s.as_str()).collect();
        warnings.push(format!(
            "process and constraint share action(s) {} outside any communication",
            list.join(", ")
        ));
    }
    if interface.is_empty() {
        warnings.push("the constraint does not communicate with the process".to_string());
    }
    let expr = ProcessExpr::Encaps(
        encapsulated.clone(),
        Box::new(ProcessExpr::Par(vec![proc.clone(), constraint.clone()])),
    );
    Ok(Constrained {
        spec: out,
        expr,
        encapsulated,
        interface,
        internal,
        warnings,
    })
}

/// How implementation labels are made comparable with the abstract process.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interface {
    /// Communication results renamed back to the abstract process's action.
    pub renames: RenameMap,
    /// Names hidden in the implementation besides the user-given set.
    pub hidden: BTreeSet<String>,
}

impl Interface {
    /// Derived from a communication table and the abstract process's
    /// action names: a result is renamed to the side that process performs,
    /// when exactly one side is its own.
    pub fn derive(comms: &[CommEntry], spec_names: &BTreeSet<String>) -> Interface {
        let mut rules = Vec::new();
        for e in comms {
            let l = spec_names.contains(&e.left.name);
            let r = spec_names.contains(&e.right.name);
            let side = match (l, r) {
                (true, false) => &e.left,
                (false, true) => &e.right,
                _ => continue,
            };
            if spec_names.contains(&e.result.name) {
                continue;
            }
            let to = if e.is_positional() {
                ActPattern::any(side.name.clone())
            } else {
                side.clone()
            };
            let rule = RenameRule {
                from: e.result.clone(),
                to,
            };
            if !rules.contains(&rule) {
                rules.push(rule);
            }
        }
        Interface {
            renames: RenameMap(rules),
            hidden: BTreeSet::new(),
        }
    }

    /// For a result of [`constrain`]: constraint-local actions and the
    /// constraint's internal communications are hidden as well.
    pub fn for_constrained(
        c: &Constrained,
        spec_names: &BTreeSet<String>,
        constraint_names: &BTreeSet<String>,
    ) -> Interface {
        let mut i = Interface::derive(&c.interface, spec_names);
        i.hidden.extend(
            constraint_names
                .iter()
                .filter(|n| !spec_names.contains(*n))
                .cloned(),
        );
        i.hidden
            .extend(c.internal.iter().map(|e| e.result.name.clone()));
        i
    }
}

#[derive(Debug, Clone)]
pub struct HorizontalReport {
    pub verdict: VerdictReport,
    /// The implementation after renaming and hiding.
    pub impl_view: Lts,
    pub spec_lts: Lts,
    pub warnings: Vec<String>,
}

impl HorizontalReport {
    pub fn related(&self) -> bool {
        self.verdict.related
    }
}

impl fmt::Display for HorizontalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.verdict)?;
        writeln!(
            f,
            "  implementation view: {} states, {} transitions ({} tau)",
            self.impl_view.num_states(),
            self.impl_view.transitions.len(),
            self.impl_view.tau_count()
        )?;
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

/// Whether `imp` implements `spec_expr`: after renaming communication
/// results back and hiding `hidden` plus the interface's hidden names, every
/// trace of the implementation is one of `spec_expr`
/// (`Relation::Trace`), or the two are rooted weakly bisimilar
/// (`Relation::RootedWeak`).
pub fn horizontal_check(
    spec: &FlatSpec,
    spec_expr: &ProcessExpr,
    imp: &ProcessExpr,
    interface: &Interface,
    hidden: &ActionSet,
    relation: Relation,
    bounds: Bounds,
) -> Result<HorizontalReport, ConstrainError> {
    let sem = Semantics::new(spec, bounds);
    let spec_lts = sem.build_lts(spec_expr)?;
    let raw = sem.build_lts(&ProcessExpr::Rename(
        interface.renames.clone(),
        Box::new(imp.clone()),
    ))?;
    let impl_view = raw.map_labels(|l| {
        if !l.is_tau() && (interface.hidden.contains(&l.name) || hidden.contains(&l.name, &l.args))
        {
            ActionLabel {
                shutdown: l.shutdown,
                ..ActionLabel::tau()
            }
        } else {
            l.clone()
        }
    });
    let mut warnings = Vec::new();
    let spec_names: BTreeSet<&String> =
        spec_lts.transitions.iter().map(|t| &t.label.name).collect();
    let touched: BTreeSet<&String> = impl_view
        .transitions
        .iter()
        .filter(|t| !t.label.is_tau() && !spec_names.contains(&t.label.name))
        .map(|t| &t.label.name)
        .collect();
    if !touched.is_empty() {
        let list: Vec<&str> = touched.iter().map(|s| s.as_str()).collect();
        warnings.push(format!(
            "implementation performs action(s) outside the abstract interface: {}",
            list.join(", ")
        ));
    }
    let verdict = match relation {
        Relation::RootedWeak => rooted_weak_bisim(&impl_view, &spec_lts),
        _ => weak_trace_included(&impl_view, &spec_lts, None),
    };
    Ok(HorizontalReport {
        verdict,
        impl_view,
        spec_lts,
        warnings,
    })
}
