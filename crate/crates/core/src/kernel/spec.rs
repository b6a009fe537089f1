//! The flattened specification every back end works on.

use std::collections::BTreeSet;

use indexmap::IndexMap;

use super::comm::CommTable;
use super::expr::{ActionSet, ProcessDef, ProcessExpr};
use super::rewrite::Equation;
use super::term::Term;
use super::KernelError;

/// `name : S1 # S2 -> S`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FuncDecl {
    pub name: String,
    pub args: Vec<String>,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlatSpec {
    pub sorts: Vec<String>,
    pub functions: IndexMap<String, FuncDecl>,
    pub variables: IndexMap<String, String>,
    pub equations: Vec<Equation>,
    /// Atom name to parameter sorts.
    pub atoms: IndexMap<String, Vec<String>>,
    pub sets: IndexMap<String, ActionSet>,
    pub process_defs: IndexMap<String, ProcessDef>,
    pub comms: CommTable,
    /// Actions whose firing ends the whole configuration.
    pub disrupts: Vec<String>,
    pub entry: Option<String>,
}

impl FlatSpec {
    /// Constructors of `sort`, in declaration order.
    pub fn constructors(&self, sort: &str) -> Vec<&FuncDecl> {
        self.functions
            .values()
            .filter(|f| f.result == sort)
            .collect()
    }

    pub fn def(&self, name: &str) -> Option<&ProcessDef> {
        self.process_defs.get(name)
    }

    pub fn is_disrupt(&self, action: &str) -> bool {
        self.disrupts.iter().any(|d| d == action)
    }

    /// All ground terms of `sort` built from its constructors. Fails for
    /// recursive or empty sorts, which cannot be summed over.
    pub fn enumerate_sort(&self, sort: &str) -> Result<Vec<Term>, KernelError> {
        let mut stack = Vec::new();
        self.enumerate_inner(sort, &mut stack)
    }

    fn enumerate_inner(
        &self,
        sort: &str,
        stack: &mut Vec<String>,
    ) -> Result<Vec<Term>, KernelError> {
        if stack.iter().any(|s| s == sort) {
            return Err(KernelError::UnboundedData {
                sort: sort.to_string(),
            });
        }
        let ctors = self.constructors(sort);
        if ctors.is_empty() {
            return Err(KernelError::EmptySort {
                sort: sort.to_string(),
            });
        }
        stack.push(sort.to_string());
        let mut out = Vec::new();
        for c in ctors {
            let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
            for arg in &c.args {
                let values = self.enumerate_inner(arg, stack)?;
                combos = combos
                    .into_iter()
                    .flat_map(|prefix| {
                        values.iter().map(move |v| {
                            let mut p = prefix.clone();
                            p.push(v.clone());
                            p
                        })
                    })
                    .collect();
            }
            out.extend(
                combos
                    .into_iter()
                    .map(|args| Term::App(c.name.clone(), args)),
            );
        }
        stack.pop();
        Ok(out)
    }

    /// A process that can reach itself through calls without performing
    /// an action first, if any.
    pub fn unguarded_process(&self) -> Option<String> {
        fn heads(e: &ProcessExpr, out: &mut Vec<String>) {
            match e {
                ProcessExpr::Call(n, _) => out.push(n.clone()),
                ProcessExpr::Seq(xs) => {
                    if let Some(x) = xs.first() {
                        heads(x, out);
                    }
                }
                ProcessExpr::Alt(xs) | ProcessExpr::Par(xs) => {
                    xs.iter().for_each(|x| heads(x, out))
                }
                ProcessExpr::Encaps(_, b)
                | ProcessExpr::Hide(_, b)
                | ProcessExpr::Rename(_, b)
                | ProcessExpr::Sum(_, _, b) => heads(b, out),
                ProcessExpr::Atom(..) | ProcessExpr::Skip | ProcessExpr::Delta => {}
            }
        }
        fn visit<'a>(
            spec: &'a FlatSpec,
            name: &'a str,
            path: &mut Vec<&'a str>,
            done: &mut BTreeSet<&'a str>,
        ) -> Option<String> {
            if path.contains(&name) {
                return Some(name.to_string());
            }
            if done.contains(name) {
                return None;
            }
            let (key, def) = spec.process_defs.get_key_value(name)?;
            path.push(key);
            let mut next = Vec::new();
            heads(&def.body, &mut next);
            for n in &next {
                if let Some(k) = spec
                    .process_defs
                    .get_key_value(n.as_str())
                    .map(|(k, _)| k.as_str())
                {
                    if let Some(p) = visit(spec, k, path, done) {
                        return Some(p);
                    }
                }
            }
            path.pop();
            done.insert(key);
            None
        }
        let mut done = BTreeSet::new();
        self.process_defs
            .keys()
            .find_map(|k| visit(self, k, &mut Vec::new(), &mut done))
    }

    /// Adds a process definition, keeping declaration order.
    pub fn add_def(&mut self, def: ProcessDef) {
        self.process_defs.insert(def.name.clone(), def);
    }

    /// Every action name that some definition can perform directly.
    pub fn action_alphabet(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for d in self.process_defs.values() {
            for a in d.body.atom_names() {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }

    /// Action names `e` can perform, following calls; unknown processes
    /// are skipped.
    pub fn reachable_atoms(&self, e: &ProcessExpr) -> BTreeSet<String> {
        let mut names = e.atom_names();
        let mut seen = BTreeSet::new();
        let mut stack: Vec<String> = e.called_processes().into_iter().collect();
        while let Some(p) = stack.pop() {
            if !seen.insert(p.clone()) {
                continue;
            }
            if let Some(d) = self.def(&p) {
                names.extend(d.body.atom_names());
                stack.extend(d.body.called_processes());
            }
        }
        names
    }

    pub fn entry_expr(&self) -> Option<ProcessExpr> {
        self.entry.as_ref().map(|e| ProcessExpr::call(e.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn func(name: &str, args: &[&str], result: &str) -> FuncDecl {
        FuncDecl {
            name: name.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
            result: result.into(),
        }
    }

    #[test]
    fn enumerates_product_sorts() {
        let mut fs = FlatSpec::default();
        for f in [
            func("c1", &[], "ID"),
            func("c2", &[], "ID"),
            func(">>", &["ID", "ID"], "CONN"),
        ] {
            fs.functions.insert(f.name.clone(), f);
        }
        assert_eq!(fs.enumerate_sort("ID").unwrap().len(), 2);
        let conns = fs.enumerate_sort("CONN").unwrap();
        assert_eq!(conns.len(), 4);
        assert_eq!(conns[1].to_string(), "c1 >> c2");
    }

    #[test]
    fn recursive_sort_is_unbounded() {
        let mut fs = FlatSpec::default();
        for f in [func("zero", &[], "NAT"), func("succ", &["NAT"], "NAT")] {
            fs.functions.insert(f.name.clone(), f);
        }
        assert!(matches!(
            fs.enumerate_sort("NAT"),
            Err(KernelError::UnboundedData { .. })
        ));
        assert!(matches!(
            fs.enumerate_sort("BOOL"),
            Err(KernelError::EmptySort { .. })
        ));
    }
}
