//! `.map` files: action refinements, renamings and process renames.

use std::fmt;

use indexmap::IndexMap;

use crate::kernel::{ActPattern, ActionSet, RenameMap, RenameRule, Term};
use crate::syntax::lexer::Tok;
use crate::syntax::{ParseError, Parser};

use super::RefineError;

/// One abstract action and the concrete actions it becomes, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub from: ActPattern,
    pub to: Vec<ActPattern>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Mapping {
    pub refinements: Vec<Refinement>,
    pub renamings: Vec<RenameRule>,
    pub process_renames: IndexMap<String, String>,
    /// Pattern variables and their sorts.
    pub variables: Vec<(String, String)>,
    /// Modules the refined components need, for the emitted module.
    pub imports: Vec<String>,
    /// Name of the emitted module.
    pub module: Option<String>,
}

const SECTIONS: &[&str] = &[
    "module",
    "imports",
    "variables",
    "refine",
    "rename",
    "process",
];

fn at_section(p: &Parser) -> bool {
    matches!(p.peek(), Tok::Ident(w) if SECTIONS.contains(&w.as_str()))
        && !matches!(p.peek_at(1), Tok::Arrow | Tok::LParen | Tok::Dot)
}

fn pattern(p: &mut Parser, vars: &[String]) -> Result<ActPattern, ParseError> {
    let mut pat = p.pattern()?;
    if let Some(args) = &mut pat.args {
        for a in args.iter_mut() {
            *a = a.bind_vars(vars);
        }
    }
    Ok(pat)
}

impl Mapping {
    pub fn is_empty(&self) -> bool {
        self.refinements.is_empty() && self.renamings.is_empty() && self.process_renames.is_empty()
    }

    pub fn parse(text: &str) -> Result<Mapping, RefineError> {
        let mut p = Parser::new(text)?;
        let mut m = Mapping::default();
        let mut var_names: Vec<String> = Vec::new();
        while !p.at_eof() {
            let section = p.ident()?;
            match section.as_str() {
                "module" => m.module = Some(p.ident()?),
                "imports" => loop {
                    m.imports.push(p.ident()?);
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                },
                "variables" => {
                    while !p.at_eof() && !at_section(&p) {
                        let mut names = vec![p.ident()?];
                        while p.eat(&Tok::Comma) {
                            names.push(p.ident()?);
                        }
                        p.expect(&Tok::Colon)?;
                        p.eat(&Tok::Arrow);
                        let sort = p.ident()?;
                        for n in names {
                            var_names.push(n.clone());
                            m.variables.push((n, sort.clone()));
                        }
                    }
                }
                "refine" => {
                    while !p.at_eof() && !at_section(&p) {
                        let pos = p.pos();
                        let from = pattern(&mut p, &var_names)?;
                        p.expect(&Tok::Arrow)?;
                        let mut to = vec![pattern(&mut p, &var_names)?];
                        while p.eat(&Tok::Dot) {
                            to.push(pattern(&mut p, &var_names)?);
                        }
                        p.eat(&Tok::Comma);
                        for t in &mut to {
                            fix_target(&from, t);
                        }
                        check_linear(&from).map_err(|v| {
                            ParseError::new(
                                pos.line,
                                pos.col,
                                format!("variable {v} occurs twice in {from}"),
                            )
                        })?;
                        m.refinements.push(Refinement { from, to });
                    }
                }
                "rename" => {
                    while !p.at_eof() && !at_section(&p) {
                        let from = pattern(&mut p, &var_names)?;
                        p.expect(&Tok::Arrow)?;
                        let to = pattern(&mut p, &var_names)?;
                        if p.eat(&Tok::Dot) {
                            return Err(p.error("a renaming maps to a single action; use the refine section for sequences").into());
                        }
                        p.eat(&Tok::Comma);
                        let mut to = to;
                        fix_target(&from, &mut to);
                        m.renamings.push(RenameRule { from, to });
                    }
                }
                "process" => {
                    while !p.at_eof() && !at_section(&p) {
                        let from = p.ident()?;
                        p.expect(&Tok::Arrow)?;
                        let to = p.ident()?;
                        p.eat(&Tok::Comma);
                        m.process_renames.insert(from, to);
                    }
                }
                other => return Err(p.error(format!("unknown mapping section `{other}`")).into()),
            }
        }
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), RefineError> {
        for r in &self.refinements {
            for q in &self.renamings {
                if overlaps(&r.from, &q.from) {
                    return Err(RefineError::Overlap(r.from.to_string(), q.from.to_string()));
                }
            }
        }
        for q in &self.renamings {
            check_linear(&q.from).map_err(|v| {
                RefineError::Invalid(format!("variable {v} occurs twice in {}", q.from))
            })?;
        }
        Ok(())
    }

    /// Abstract actions that are refined (hidden on the abstract side).
    pub fn refined_set(&self) -> ActionSet {
        ActionSet::new(self.refinements.iter().map(|r| r.from.clone()))
    }

    /// Every action occurring in some refinement body.
    pub fn body_set(&self) -> ActionSet {
        ActionSet::new(self.refinements.iter().flat_map(|r| r.to.iter().cloned()))
    }

    pub fn rename_map(&self) -> RenameMap {
        RenameMap(self.renamings.clone())
    }
}

/// A bare target keeps the arguments of a bare source; after a source with
/// explicit arguments it means the action without arguments.
fn fix_target(from: &ActPattern, to: &mut ActPattern) {
    if from.args.is_some() && to.args.is_none() {
        to.args = Some(Vec::new());
    }
}

fn overlaps(a: &ActPattern, b: &ActPattern) -> bool {
    if a.name != b.name {
        return false;
    }
    match (&a.args, &b.args) {
        (Some(x), Some(y)) => {
            x.len() == y.len()
                && x.iter()
                    .zip(y)
                    .all(|(s, t)| crate::kernel::term::unifiable(s, t))
        }
        _ => true,
    }
}

fn check_linear(p: &ActPattern) -> Result<(), String> {
    let mut seen: Vec<String> = Vec::new();
    fn walk(t: &Term, seen: &mut Vec<String>) -> Result<(), String> {
        match t {
            Term::Var(v) if seen.contains(v) => Err(v.clone()),
            Term::Var(v) => {
                seen.push(v.clone());
                Ok(())
            }
            Term::App(_, args) => args.iter().try_for_each(|a| walk(a, seen)),
        }
    }
    p.args.iter().flatten().try_for_each(|a| walk(a, &mut seen))
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(m) = &self.module {
            writeln!(f, "module {m}")?;
        }
        if !self.imports.is_empty() {
            writeln!(f, "imports {}", self.imports.join(", "))?;
        }
        if !self.variables.is_empty() {
            writeln!(f, "variables")?;
            for (v, s) in &self.variables {
                writeln!(f, "  {v} : {s}")?;
            }
        }
        if !self.refinements.is_empty() {
            writeln!(f, "refine")?;
            for r in &self.refinements {
                let to: Vec<String> = r.to.iter().map(|t| t.to_string()).collect();
                writeln!(f, "  {} -> {}", r.from, to.join(" . "))?;
            }
        }
        if !self.renamings.is_empty() {
            writeln!(f, "rename")?;
            for r in &self.renamings {
                writeln!(f, "  {} -> {}", r.from, r.to)?;
            }
        }
        if !self.process_renames.is_empty() {
            writeln!(f, "process")?;
            for (a, b) in &self.process_renames {
                writeln!(f, "  {a} -> {b}")?;
            }
        }
        Ok(())
    }
}
