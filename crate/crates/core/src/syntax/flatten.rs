//! Import resolution, parameter binding and name resolution.

use indexmap::IndexMap;
use thiserror::Error;

use super::ast::{Module, ModuleSet, Pos};
use crate::kernel::{
    ActPattern, ActionSet, CommEntry, CommTable, Equation, FlatSpec, FuncDecl, ProcessDef,
    ProcessExpr, RenameMap, RenameRule, Term,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FlattenError {
    #[error("no module named {0}")]
    NoSuchModule(String),
    #[error("{importer} ({pos}): imported module {module} not found")]
    UnresolvedImport {
        module: String,
        importer: String,
        pos: Pos,
    },
    #[error("module {module}: parameter {param} is not bound{detail}")]
    UnboundParameter {
        module: String,
        param: String,
        detail: String,
    },
    #[error("import cycle: {}", .0.join(" -> "))]
    ImportCycle(Vec<String>),
    #[error("{context}: {name} expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        context: String,
    },
    #[error("{context}: undeclared {kind} {name}")]
    Undeclared {
        kind: &'static str,
        name: String,
        context: String,
    },
    #[error("conflicting declarations of {kind} {name}")]
    Conflict { kind: &'static str, name: String },
    #[error("{context}: sort {sort} has no constructors")]
    EmptySort { sort: String, context: String },
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, FlattenError>;

#[derive(Debug, Clone, PartialEq, Eq)]
struct RawDef {
    params: Vec<String>,
    body: ProcessExpr,
}

#[derive(Debug, Clone, Default)]
struct Fragment {
    sorts: Vec<String>,
    functions: IndexMap<String, FuncDecl>,
    variables: IndexMap<String, String>,
    equations: Vec<(Term, Term)>,
    atoms: IndexMap<String, Vec<String>>,
    processes: IndexMap<String, Vec<String>>,
    sets: IndexMap<String, Vec<ActPattern>>,
    comms: Vec<CommEntry>,
    disrupts: Vec<String>,
    defs: IndexMap<String, (RawDef, String)>,
}

fn insert_unique<V: PartialEq>(
    map: &mut IndexMap<String, V>,
    kind: &'static str,
    name: String,
    v: V,
) -> Result<()> {
    match map.get(&name) {
        Some(old) if *old != v => Err(FlattenError::Conflict { kind, name }),
        Some(_) => Ok(()),
        None => {
            map.insert(name, v);
            Ok(())
        }
    }
}

impl Fragment {
    fn from_module(m: &Module) -> Result<Fragment> {
        let mut f = Fragment::default();
        for (s, _) in &m.sorts {
            if !f.sorts.contains(s) {
                f.sorts.push(s.clone());
            }
        }
        for (func, _) in &m.functions {
            insert_unique(
                &mut f.functions,
                "function",
                func.name.clone(),
                func.clone(),
            )?;
        }
        for (v, s, _) in &m.variables {
            insert_unique(&mut f.variables, "variable", v.clone(), s.clone())?;
        }
        f.equations = m
            .equations
            .iter()
            .map(|e| (e.lhs.clone(), e.rhs.clone()))
            .collect();
        for a in &m.atoms {
            insert_unique(&mut f.atoms, "atom", a.name.clone(), a.sorts.clone())?;
        }
        for p in &m.processes {
            insert_unique(&mut f.processes, "process", p.name.clone(), p.sorts.clone())?;
        }
        for s in &m.sets {
            insert_unique(&mut f.sets, "set", s.name.clone(), s.items.clone())?;
        }
        f.comms = m.comms.iter().map(|(c, _)| c.clone()).collect();
        f.disrupts = m.disrupts.iter().map(|(d, _)| d.clone()).collect();
        for d in &m.definitions {
            let raw = RawDef {
                params: d.params.clone(),
                body: d.body.clone(),
            };
            let context = format!("definition of {} ({}, {})", d.name, m.name, d.pos);
            f.defs.insert(d.name.clone(), (raw, context));
        }
        Ok(f)
    }

    fn merge(&mut self, other: Fragment) -> Result<()> {
        for s in other.sorts {
            if !self.sorts.contains(&s) {
                self.sorts.push(s);
            }
        }
        for (k, v) in other.functions {
            insert_unique(&mut self.functions, "function", k, v)?;
        }
        for (k, v) in other.variables {
            insert_unique(&mut self.variables, "variable", k, v)?;
        }
        for e in other.equations {
            if !self.equations.contains(&e) {
                self.equations.push(e);
            }
        }
        for (k, v) in other.atoms {
            insert_unique(&mut self.atoms, "atom", k, v)?;
        }
        for (k, v) in other.processes {
            insert_unique(&mut self.processes, "process", k, v)?;
        }
        for (k, v) in other.sets {
            insert_unique(&mut self.sets, "set", k, v)?;
        }
        for c in other.comms {
            if !self.comms.contains(&c) {
                self.comms.push(c);
            }
        }
        for d in other.disrupts {
            if !self.disrupts.contains(&d) {
                self.disrupts.push(d);
            }
        }
        for (k, (def, ctx)) in other.defs {
            match self.defs.get(&k) {
                Some((old, _)) if *old != def => {
                    return Err(FlattenError::Conflict {
                        kind: "definition",
                        name: k,
                    })
                }
                Some(_) => {}
                None => {
                    self.defs.insert(k, (def, ctx));
                }
            }
        }
        Ok(())
    }

    fn rename(&mut self, f: &dyn Fn(&str) -> Option<String>) {
        let name = |s: &str| f(s).unwrap_or_else(|| s.to_string());
        let sorts = |v: &[String]| v.iter().map(|s| name(s)).collect::<Vec<_>>();
        self.sorts = self.sorts.iter().map(|s| name(s)).collect();
        self.functions = self
            .functions
            .values()
            .map(|d| {
                (
                    name(&d.name),
                    FuncDecl {
                        name: name(&d.name),
                        args: sorts(&d.args),
                        result: name(&d.result),
                    },
                )
            })
            .collect();
        self.variables = self
            .variables
            .iter()
            .map(|(k, v)| (k.clone(), name(v)))
            .collect();
        self.equations = self
            .equations
            .iter()
            .map(|(l, r)| (l.rename_symbols(f), r.rename_symbols(f)))
            .collect();
        self.atoms = self
            .atoms
            .iter()
            .map(|(k, v)| (name(k), sorts(v)))
            .collect();
        self.processes = self
            .processes
            .iter()
            .map(|(k, v)| (name(k), sorts(v)))
            .collect();
        self.sets = self
            .sets
            .iter()
            .map(|(k, v)| (name(k), v.iter().map(|p| rename_pattern(p, f)).collect()))
            .collect();
        self.comms = self
            .comms
            .iter()
            .map(|c| CommEntry {
                left: rename_pattern(&c.left, f),
                right: rename_pattern(&c.right, f),
                result: rename_pattern(&c.result, f),
                vars: c.vars.iter().map(|(v, s)| (v.clone(), name(s))).collect(),
            })
            .collect();
        self.disrupts = self.disrupts.iter().map(|d| name(d)).collect();
        self.defs = self
            .defs
            .iter()
            .map(|(k, (d, ctx))| {
                (
                    name(k),
                    (
                        RawDef {
                            params: d.params.clone(),
                            body: rename_expr(&d.body, f),
                        },
                        ctx.clone(),
                    ),
                )
            })
            .collect();
    }
}

fn rename_pattern(p: &ActPattern, f: &dyn Fn(&str) -> Option<String>) -> ActPattern {
    ActPattern {
        name: f(&p.name).unwrap_or_else(|| p.name.clone()),
        args: p
            .args
            .as_ref()
            .map(|a| a.iter().map(|t| t.rename_symbols(f)).collect()),
    }
}

fn rename_expr(e: &ProcessExpr, f: &dyn Fn(&str) -> Option<String>) -> ProcessExpr {
    let name = |s: &str| f(s).unwrap_or_else(|| s.to_string());
    e.map_bottom_up(&mut |x| match x {
        ProcessExpr::Atom(n, args) => {
            ProcessExpr::Atom(name(&n), args.iter().map(|t| t.rename_symbols(f)).collect())
        }
        ProcessExpr::Call(n, args) => {
            ProcessExpr::Call(name(&n), args.iter().map(|t| t.rename_symbols(f)).collect())
        }
        ProcessExpr::Encaps(h, b) => ProcessExpr::Encaps(
            ActionSet::new(h.items().iter().map(|p| rename_pattern(p, f))),
            b,
        ),
        ProcessExpr::Hide(h, b) => ProcessExpr::Hide(
            ActionSet::new(h.items().iter().map(|p| rename_pattern(p, f))),
            b,
        ),
        ProcessExpr::Rename(r, b) => ProcessExpr::Rename(
            RenameMap(
                r.0.iter()
                    .map(|rule| RenameRule {
                        from: rename_pattern(&rule.from, f),
                        to: rename_pattern(&rule.to, f),
                    })
                    .collect(),
            ),
            b,
        ),
        ProcessExpr::Sum(v, s, b) => ProcessExpr::Sum(v, name(&s), b),
        other => other,
    })
}

struct Resolver<'a> {
    set: &'a ModuleSet,
    builtins: Vec<Module>,
}

impl Resolver<'_> {
    fn lookup(&self, name: &str) -> Option<&Module> {
        self.set
            .get(name)
            .or_else(|| self.builtins.iter().find(|m| m.name == name))
    }

    fn instantiate(
        &self,
        name: &str,
        bindings: &[super::ast::Binding],
        renamings: &[(String, String)],
        stack: &mut Vec<String>,
    ) -> Result<Fragment> {
        if let Some(i) = stack.iter().position(|s| s == name) {
            let mut chain = stack[i..].to_vec();
            chain.push(name.to_string());
            return Err(FlattenError::ImportCycle(chain));
        }
        let m = self
            .lookup(name)
            .ok_or_else(|| FlattenError::NoSuchModule(name.to_string()))?;
        stack.push(name.to_string());
        let mut frag = Fragment::from_module(m)?;

        for b in bindings {
            if !m.parameters.iter().any(|p| p.name == b.param) {
                return Err(FlattenError::Invalid(format!(
                    "module {name} has no parameter {}",
                    b.param
                )));
            }
        }
        for p in &m.parameters {
            let b = bindings.iter().find(|b| b.param == p.name).ok_or_else(|| {
                FlattenError::UnboundParameter {
                    module: name.to_string(),
                    param: p.name.clone(),
                    detail: String::new(),
                }
            })?;
            if self.lookup(&b.actual).is_none() {
                return Err(FlattenError::UnresolvedImport {
                    module: b.actual.clone(),
                    importer: name.to_string(),
                    pos: b.pos,
                });
            }
            let actual = self.instantiate(&b.actual, &[], &[], stack)?;
            let mut formal_map: Vec<(String, String)> = Vec::new();
            for formal in p.processes.iter().chain(p.atoms.iter()) {
                let target = b
                    .map
                    .iter()
                    .find(|(f, _)| *f == formal.name)
                    .map(|(_, a)| a.clone())
                    .unwrap_or_else(|| formal.name.clone());
                let provided =
                    actual.defs.contains_key(&target) || actual.atoms.contains_key(&target);
                if !provided {
                    return Err(FlattenError::UnboundParameter {
                        module: name.to_string(),
                        param: p.name.clone(),
                        detail: format!(": {} does not provide {target}", b.actual),
                    });
                }
                formal_map.push((formal.name.clone(), target));
            }
            frag.rename(&|s: &str| {
                formal_map
                    .iter()
                    .find(|(f, _)| f == s)
                    .map(|(_, a)| a.clone())
            });
            frag.merge(actual)?;
        }
        for imp in &m.imports {
            if self.lookup(&imp.module).is_none() {
                return Err(FlattenError::UnresolvedImport {
                    module: imp.module.clone(),
                    importer: name.to_string(),
                    pos: imp.pos,
                });
            }
            let sub = self.instantiate(&imp.module, &imp.bindings, &imp.renamings, stack)?;
            frag.merge(sub)?;
        }
        if !renamings.is_empty() {
            frag.rename(&|s: &str| {
                renamings
                    .iter()
                    .find(|(f, _)| f == s)
                    .map(|(_, a)| a.clone())
            });
        }
        stack.pop();
        Ok(frag)
    }
}

/// Resolves imports of `root` and produces the flat specification.
pub fn flatten(ms: &ModuleSet, root: &str) -> Result<FlatSpec> {
    let resolver = Resolver {
        set: ms,
        builtins: crate::levels::builtin_modules(),
    };
    let m = resolver
        .lookup(root)
        .ok_or_else(|| FlattenError::NoSuchModule(root.to_string()))?;
    let exports = m.exports.clone();
    let frag = resolver.instantiate(root, &[], &[], &mut Vec::new())?;
    let mut fs = finish(frag)?;
    fs.entry = if fs.process_defs.contains_key(root) {
        Some(root.to_string())
    } else {
        let exported: Vec<&String> = exports
            .iter()
            .filter(|e| fs.process_defs.contains_key(*e))
            .collect();
        if exported.len() == 1 {
            Some(exported[0].clone())
        } else {
            None
        }
    };
    Ok(fs)
}

struct Scope<'a> {
    fs: &'a FlatSpec,
    processes: &'a IndexMap<String, Vec<String>>,
    context: String,
}

impl Scope<'_> {
    fn term(&self, t: &Term, vars: &[String]) -> Result<Term> {
        match t {
            Term::Var(_) => Ok(t.clone()),
            Term::App(n, args) if args.is_empty() && vars.contains(n) => Ok(Term::Var(n.clone())),
            Term::App(n, args) => {
                let decl = self
                    .fs
                    .functions
                    .get(n)
                    .ok_or_else(|| FlattenError::Undeclared {
                        kind: "function",
                        name: n.clone(),
                        context: self.context.clone(),
                    })?;
                if decl.args.len() != args.len() {
                    return Err(FlattenError::Arity {
                        name: n.clone(),
                        expected: decl.args.len(),
                        found: args.len(),
                        context: self.context.clone(),
                    });
                }
                Ok(Term::App(
                    n.clone(),
                    args.iter()
                        .map(|a| self.term(a, vars))
                        .collect::<Result<_>>()?,
                ))
            }
        }
    }

    fn atom_pattern(&self, p: &ActPattern, vars: &[String]) -> Result<ActPattern> {
        let sorts = self
            .fs
            .atoms
            .get(&p.name)
            .ok_or_else(|| FlattenError::Undeclared {
                kind: "atom",
                name: p.name.clone(),
                context: self.context.clone(),
            })?;
        match &p.args {
            None => Ok(p.clone()),
            Some(args) => {
                if args.len() != sorts.len() {
                    return Err(FlattenError::Arity {
                        name: p.name.clone(),
                        expected: sorts.len(),
                        found: args.len(),
                        context: self.context.clone(),
                    });
                }
                if args.is_empty() {
                    return Ok(ActPattern::any(p.name.clone()));
                }
                Ok(ActPattern::exact(
                    p.name.clone(),
                    args.iter()
                        .map(|a| self.term(a, vars))
                        .collect::<Result<_>>()?,
                ))
            }
        }
    }

    fn set(
        &self,
        h: &ActionSet,
        raw_sets: &IndexMap<String, Vec<ActPattern>>,
    ) -> Result<ActionSet> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.expand_set(h.items(), raw_sets, &mut stack, &mut out)?;
        Ok(ActionSet::new(out))
    }

    fn expand_set(
        &self,
        items: &[ActPattern],
        raw_sets: &IndexMap<String, Vec<ActPattern>>,
        stack: &mut Vec<String>,
        out: &mut Vec<ActPattern>,
    ) -> Result<()> {
        for p in items {
            match raw_sets.get(&p.name) {
                Some(inner) if p.args.is_none() => {
                    if self.fs.atoms.contains_key(&p.name) {
                        return Err(FlattenError::Conflict {
                            kind: "set/atom name",
                            name: p.name.clone(),
                        });
                    }
                    if stack.contains(&p.name) {
                        return Err(FlattenError::Invalid(format!(
                            "set {} is defined in terms of itself",
                            p.name
                        )));
                    }
                    stack.push(p.name.clone());
                    self.expand_set(inner, raw_sets, stack, out)?;
                    stack.pop();
                }
                _ => out.push(self.atom_pattern(p, &[])?),
            }
        }
        Ok(())
    }

    fn check_sort(&self, sort: &str) -> Result<()> {
        if !self.fs.sorts.iter().any(|s| s == sort) {
            return Err(FlattenError::Undeclared {
                kind: "sort",
                name: sort.to_string(),
                context: self.context.clone(),
            });
        }
        if self.fs.constructors(sort).is_empty() {
            return Err(FlattenError::EmptySort {
                sort: sort.to_string(),
                context: self.context.clone(),
            });
        }
        Ok(())
    }

    fn expr(
        &self,
        e: &ProcessExpr,
        vars: &mut Vec<String>,
        raw_sets: &IndexMap<String, Vec<ActPattern>>,
    ) -> Result<ProcessExpr> {
        use ProcessExpr::*;
        Ok(match e {
            Atom(n, args) | Call(n, args) => {
                let targs = args
                    .iter()
                    .map(|a| self.term(a, vars))
                    .collect::<Result<Vec<_>>>()?;
                let (expected, is_proc) = if let Some(sorts) = self.processes.get(n) {
                    (sorts.len(), true)
                } else if let Some(sorts) = self.fs.atoms.get(n) {
                    (sorts.len(), false)
                } else {
                    return Err(FlattenError::Undeclared {
                        kind: "atom or process",
                        name: n.clone(),
                        context: self.context.clone(),
                    });
                };
                if expected != targs.len() {
                    return Err(FlattenError::Arity {
                        name: n.clone(),
                        expected,
                        found: targs.len(),
                        context: self.context.clone(),
                    });
                }
                if is_proc {
                    Call(n.clone(), targs)
                } else {
                    Atom(n.clone(), targs)
                }
            }
            Skip | Delta => e.clone(),
            Seq(xs) => Seq(xs
                .iter()
                .map(|x| self.expr(x, vars, raw_sets))
                .collect::<Result<_>>()?),
            Alt(xs) => Alt(xs
                .iter()
                .map(|x| self.expr(x, vars, raw_sets))
                .collect::<Result<_>>()?),
            Par(xs) => Par(xs
                .iter()
                .map(|x| self.expr(x, vars, raw_sets))
                .collect::<Result<_>>()?),
            Encaps(h, b) => Encaps(
                self.set(h, raw_sets)?,
                Box::new(self.expr(b, vars, raw_sets)?),
            ),
            Hide(h, b) => Hide(
                self.set(h, raw_sets)?,
                Box::new(self.expr(b, vars, raw_sets)?),
            ),
            Rename(r, b) => {
                let mut rules = Vec::new();
                for rule in &r.0 {
                    rules.push(RenameRule {
                        from: self.atom_pattern(&rule.from, &[])?,
                        to: self.atom_pattern(&rule.to, &[])?,
                    });
                }
                Rename(RenameMap(rules), Box::new(self.expr(b, vars, raw_sets)?))
            }
            Sum(v, sort, b) => {
                self.check_sort(sort)?;
                vars.push(v.clone());
                let body = self.expr(b, vars, raw_sets);
                vars.pop();
                Sum(v.clone(), sort.clone(), Box::new(body?))
            }
        })
    }
}

fn finish(frag: Fragment) -> Result<FlatSpec> {
    let mut fs = FlatSpec {
        sorts: frag.sorts.clone(),
        functions: frag.functions.clone(),
        variables: frag.variables.clone(),
        atoms: frag.atoms.clone(),
        disrupts: frag.disrupts.clone(),
        ..FlatSpec::default()
    };
    let scope = |context: String| Scope {
        fs: &fs,
        processes: &frag.processes,
        context,
    };

    let mut checks: Vec<(String, String)> = Vec::new();
    for f in fs.functions.values() {
        for s in f.args.iter().chain(std::iter::once(&f.result)) {
            checks.push((s.clone(), format!("function {}", f.name)));
        }
    }
    for (a, sorts) in &fs.atoms {
        for s in sorts {
            checks.push((s.clone(), format!("atom {a}")));
        }
    }
    for (v, s) in &fs.variables {
        checks.push((s.clone(), format!("variable {v}")));
    }
    for (s, context) in checks {
        if !fs.sorts.contains(&s) {
            return Err(FlattenError::Undeclared {
                kind: "sort",
                name: s,
                context,
            });
        }
    }

    let var_names: Vec<String> = fs.variables.keys().cloned().collect();
    let mut equations = Vec::new();
    for (lhs, rhs) in &frag.equations {
        let sc = scope(format!("equation {lhs} = {rhs}"));
        let l = sc.term(lhs, &var_names)?;
        let r = sc.term(rhs, &var_names)?;
        let (mut lv, mut rv) = (Vec::new(), Vec::new());
        l.collect_vars(&mut lv);
        r.collect_vars(&mut rv);
        if let Some(v) = rv.iter().find(|v| !lv.contains(v)) {
            return Err(FlattenError::Invalid(format!(
                "equation {lhs} = {rhs}: variable {v} does not occur on the left"
            )));
        }
        if matches!(l, Term::Var(_)) {
            return Err(FlattenError::Invalid(format!(
                "equation {lhs} = {rhs}: left-hand side is a variable"
            )));
        }
        equations.push(Equation { lhs: l, rhs: r });
    }

    let mut sets = IndexMap::new();
    for (name, items) in &frag.sets {
        let set =
            scope(format!("set {name}")).set(&ActionSet::new(items.iter().cloned()), &frag.sets)?;
        sets.insert(name.clone(), set);
    }

    let mut comms = CommTable::default();
    for c in &frag.comms {
        let sc = scope(format!("communication {c}"));
        let vars: Vec<String> = c.vars.iter().map(|(v, _)| v.clone()).collect();
        for (_, s) in &c.vars {
            if !sc.fs.sorts.contains(s) {
                return Err(FlattenError::Undeclared {
                    kind: "sort",
                    name: s.clone(),
                    context: sc.context.clone(),
                });
            }
        }
        let entry = CommEntry {
            left: sc.atom_pattern(&c.left, &vars)?,
            right: sc.atom_pattern(&c.right, &vars)?,
            result: sc.atom_pattern(&c.result, &vars)?,
            vars: c.vars.clone(),
        };
        let mut bound = entry.left.vars();
        bound.extend(entry.right.vars());
        if let Some(v) = entry.result.vars().iter().find(|v| !bound.contains(v)) {
            return Err(FlattenError::Invalid(format!(
                "communication {c}: result variable {v} is not bound by either side"
            )));
        }
        comms.push(entry);
    }

    for d in &fs.disrupts {
        if !fs.atoms.contains_key(d) {
            return Err(FlattenError::Undeclared {
                kind: "atom",
                name: d.clone(),
                context: "disrupts".into(),
            });
        }
    }

    for name in frag.processes.keys() {
        if !frag.defs.contains_key(name) {
            return Err(FlattenError::Invalid(format!(
                "process {name} is declared but never defined"
            )));
        }
    }
    let mut defs = IndexMap::new();
    for (name, (raw, context)) in &frag.defs {
        let sorts = frag
            .processes
            .get(name)
            .ok_or_else(|| FlattenError::Undeclared {
                kind: "process",
                name: name.clone(),
                context: context.clone(),
            })?;
        if sorts.len() != raw.params.len() {
            return Err(FlattenError::Arity {
                name: name.clone(),
                expected: sorts.len(),
                found: raw.params.len(),
                context: context.clone(),
            });
        }
        let sc = scope(context.clone());
        for s in sorts {
            sc.check_sort(s)?;
        }
        let mut vars = raw.params.clone();
        let body = sc.expr(&raw.body, &mut vars, &frag.sets)?;
        let params = raw
            .params
            .iter()
            .cloned()
            .zip(sorts.iter().cloned())
            .collect();
        defs.insert(
            name.clone(),
            ProcessDef {
                name: name.clone(),
                params,
                body,
            },
        );
    }

    fs.equations = equations;
    fs.sets = sets;
    fs.comms = comms;
    fs.process_defs = defs;
    Ok(fs)
}
