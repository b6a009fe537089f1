//! The specification language: lexer, parser, flattener and printer.

pub mod ast;
pub mod flatten;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::{Module, ModuleKind, ModuleSet, Pos};
pub use flatten::{flatten, FlattenError};
pub use parser::Parser;
pub use pretty::{print_def, print_flat_spec, print_process_module};

use thiserror::Error;

use crate::kernel::{ProcessExpr, Term};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// Errors from reading a specification, whichever stage fails.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Flatten(#[from] FlattenError),
}

pub fn parse_spec(text: &str) -> Result<ModuleSet, ParseError> {
    Parser::new(text)?.module_set()
}

fn whole<T>(
    text: &str,
    f: impl FnOnce(&mut Parser) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let mut p = Parser::new(text)?;
    let v = f(&mut p)?;
    if !p.at_eof() {
        return Err(p.expected("end of input"));
    }
    Ok(v)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    whole(text, |p| p.term())
}

/// A single process expression; names are left unresolved (every
/// identifier is an `Atom`).
pub fn parse_process(text: &str) -> Result<ProcessExpr, ParseError> {
    whole(text, |p| p.process())
}

/// An action such as `comm(c1 >> c2, message)`.
pub fn parse_action(text: &str) -> Result<(String, Vec<Term>), ParseError> {
    whole(text, |p| {
        let name = p.ident()?;
        let args = if *p.peek() == lexer::Tok::LParen {
            p.term_args()?
        } else {
            Vec::new()
        };
        Ok((name, args))
    })
}

/// Parses and flattens in one go.
pub fn load(text: &str, root: &str) -> Result<crate::kernel::FlatSpec, SpecError> {
    Ok(flatten(&parse_spec(text)?, root)?)
}

/// Unparameterised modules that no other module in the set imports or
/// binds to a parameter.
pub fn root_modules(ms: &ModuleSet) -> Vec<String> {
    let imported: std::collections::BTreeSet<&str> = ms
        .import_bindings()
        .flat_map(|(_, i)| {
            std::iter::once(i.module.as_str()).chain(i.bindings.iter().map(|b| b.actual.as_str()))
        })
        .collect();
    ms.modules
        .iter()
        .filter(|m| m.parameters.is_empty() && !imported.contains(m.name.as_str()))
        .map(|m| m.name.clone())
        .collect()
}

/// Flattens `root`, or every root module together when `root` is `None`.
///
/// With several roots the entry is left unset unless exactly one of them
/// provides one.
pub fn flatten_roots(
    ms: &ModuleSet,
    root: Option<&str>,
) -> Result<crate::kernel::FlatSpec, FlattenError> {
    if let Some(r) = root {
        return flatten(ms, r);
    }
    let roots = root_modules(ms);
    match roots.len() {
        0 => Err(FlattenError::Invalid(
            "no root module (every module is imported by another)".into(),
        )),
        1 => flatten(ms, &roots[0]),
        _ => {
            let mut name = "Combined".to_string();
            while ms.get(&name).is_some() {
                name.push('_');
            }
            let mut combined = Module::new(ModuleKind::Process, name.clone());
            combined.imports = roots.iter().map(ast::Import::plain).collect();
            let mut all = ms.clone();
            all.modules.push(combined);
            let mut fs = flatten(&all, &name)?;
            let entries: Vec<String> = roots
                .iter()
                .filter_map(|r| flatten(ms, r).ok().and_then(|f| f.entry))
                .collect();
            fs.entry = if entries.len() == 1 {
                entries.into_iter().next()
            } else {
                None
            };
            Ok(fs)
        }
    }
}
