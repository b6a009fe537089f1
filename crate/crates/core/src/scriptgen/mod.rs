//! ToolBus scripts from ToolBus-level process definitions.
//!
//! Specifications loop by tail recursion; scripts loop by iteration
//! (`P * delta`). Only the tail-recursive fragment is translated.

mod script;

pub use script::{parse_script, Script};

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::kernel::{FlatSpec, ProcessDef, ProcessExpr, Term};
use crate::syntax::lexer::Tok;
use crate::syntax::{ParseError, Parser};

/// Sort of tool identifiers at the ToolBus level.
pub const TOOL_ID_SORT: &str = "TID";
const TERM_WRAPPER: &str = "tbterm";
const SHUTDOWN: &str = "snd-tb-shutdown";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ScriptError {
    #[error("{process}: parameter {param} would carry state across iterations; only parameterless processes are translated")]
    StateBearing { process: String, param: String },
    #[error("{process}: {detail}")]
    NotIterable { process: String, detail: String },
    #[error("{process}: {action} is not a ToolBus action")]
    NotToolBus { process: String, action: String },
    #[error("no tool declared for {0} (add `for {0}` to a tool line)")]
    MissingTool(String),
    #[error("no command given for tool {0}")]
    MissingCommand(String),
    #[error("nothing to coordinate: no processes")]
    Empty,
    #[error("unknown process {0}")]
    UnknownProcess(String),
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
}

/// An action as it appears in a script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptAction {
    Action {
        name: String,
        args: Vec<Term>,
    },
    /// `execute(tool, VAR?)`
    Execute {
        tool: String,
        var: String,
    },
    /// `shutdown("")`
    Shutdown,
}

impl fmt::Display for ScriptAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScriptAction::Action { name, args } => {
                write!(f, "{}", ProcessExpr::Atom(name.clone(), args.clone()))
            }
            ScriptAction::Execute { tool, var } => write!(f, "execute({tool}, {var}?)"),
            ScriptAction::Shutdown => f.write_str("shutdown(\"\")"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alternative {
    pub actions: Vec<ScriptAction>,
    /// Whether the alternative goes round the loop again (otherwise it
    /// ends with a shutdown).
    pub loops: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterableForm {
    pub process: String,
    /// `(variable, tool)` pairs bound by `let`.
    pub tool_vars: Vec<(String, String)>,
    pub prefix: Vec<ScriptAction>,
    pub alternatives: Vec<Alternative>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolDecl {
    pub name: String,
    pub command: Option<String>,
    /// The tool identifier this tool instance is bound to.
    pub id: Option<String>,
}

/// Contents of a tool configuration file:
/// `tool <name> = "<command>" [for <TID>]` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ToolTable {
    pub tools: Vec<ToolDecl>,
}

impl ToolTable {
    pub fn parse(text: &str) -> Result<ToolTable, ScriptError> {
        let mut p = Parser::new(text)?;
        let mut t = ToolTable::default();
        while !p.at_eof() {
            p.expect_word("tool")?;
            let name = p.ident()?;
            let command = if p.eat(&Tok::Eq) {
                Some(p.string()?)
            } else {
                None
            };
            let id = if p.eat_word("for") {
                Some(p.ident()?)
            } else {
                None
            };
            t.tools.push(ToolDecl { name, command, id });
        }
        Ok(t)
    }

    pub fn tool_for(&self, id: &str) -> Option<&ToolDecl> {
        self.tools.iter().find(|d| d.id.as_deref() == Some(id))
    }
}

fn strip_wrapper(t: &Term) -> Option<Term> {
    match t {
        Term::App(f, args) if f == TERM_WRAPPER && args.len() == 1 => Some(args[0].clone()),
        _ => None,
    }
}

/// ToolBus-level action to script action.
pub fn translate_action(
    process: &str,
    name: &str,
    args: &[Term],
) -> Result<ScriptAction, ScriptError> {
    if name == SHUTDOWN {
        return Ok(ScriptAction::Shutdown);
    }
    let bad = || ScriptError::NotToolBus {
        process: process.to_string(),
        action: ProcessExpr::Atom(name.to_string(), args.to_vec()).to_string(),
    };
    let short = name.strip_prefix("tb-").ok_or_else(bad)?;
    let (last, ids) = args.split_last().ok_or_else(bad)?;
    let mut out: Vec<Term> = ids.to_vec();
    let payload = strip_wrapper(last).ok_or_else(bad)?;
    out.push(match short {
        "snd-eval" => Term::app("eval", vec![payload]),
        "rec-value" => Term::app("value", vec![payload]),
        _ => payload,
    });
    Ok(ScriptAction::Action {
        name: short.to_string(),
        args: out,
    })
}

/// Script action back to the ToolBus-level action.
pub fn untranslate_action(a: &ScriptAction) -> Option<(String, Vec<Term>)> {
    match a {
        ScriptAction::Execute { .. } => None,
        ScriptAction::Shutdown => Some((SHUTDOWN.to_string(), Vec::new())),
        ScriptAction::Action { name, args } => {
            let mut args = args.clone();
            let last = args.pop()?;
            let payload = match (name.as_str(), &last) {
                ("snd-eval", Term::App(f, a)) if f == "eval" && a.len() == 1 => a[0].clone(),
                ("rec-value", Term::App(f, a)) if f == "value" && a.len() == 1 => a[0].clone(),
                _ => last,
            };
            args.push(Term::app(TERM_WRAPPER, vec![payload]));
            Some((format!("tb-{name}"), args))
        }
    }
}

fn collect_ids(spec: &FlatSpec, t: &Term, out: &mut Vec<String>) {
    if let Term::App(f, args) = t {
        if args.is_empty()
            && spec
                .functions
                .get(f)
                .is_some_and(|d| d.result == TOOL_ID_SORT && d.args.is_empty())
            && !out.contains(f)
        {
            out.push(f.clone());
        }
        for a in args {
            collect_ids(spec, a, out);
        }
    }
}

/// Converts a tail-recursive definition into a loop.
pub fn to_iterable(
    spec: &FlatSpec,
    def: &ProcessDef,
    tools: &ToolTable,
) -> Result<IterableForm, ScriptError> {
    let process = def.name.clone();
    if let Some((param, _)) = def.params.first() {
        return Err(ScriptError::StateBearing {
            process,
            param: param.clone(),
        });
    }
    let not_iterable = |detail: String| ScriptError::NotIterable {
        process: def.name.clone(),
        detail,
    };
    let alts: Vec<&ProcessExpr> = match &def.body {
        ProcessExpr::Alt(xs) => xs.iter().collect(),
        other => vec![other],
    };
    let mut alternatives = Vec::new();
    let mut ids: Vec<String> = Vec::new();
    for alt in alts {
        let steps: Vec<&ProcessExpr> = match alt {
            ProcessExpr::Seq(xs) => xs.iter().collect(),
            other => vec![other],
        };
        let mut actions = Vec::new();
        let mut loops = false;
        for (i, s) in steps.iter().enumerate() {
            match s {
                ProcessExpr::Atom(n, args) => {
                    for a in args {
                        collect_ids(spec, a, &mut ids);
                    }
                    actions.push(translate_action(&process, n, args)?);
                }
                ProcessExpr::Call(n, _) if *n == process && i + 1 == steps.len() && i > 0 => {
                    loops = true
                }
                ProcessExpr::Call(n, _) if *n == process => {
                    return Err(not_iterable(format!(
                        "recursion on {n} is not in tail position after an action"
                    )))
                }
                ProcessExpr::Call(n, _) => {
                    return Err(not_iterable(format!("calls another process ({n})")))
                }
                other => return Err(not_iterable(format!("unsupported construct `{other}`"))),
            }
        }
        if !loops && actions.last() != Some(&ScriptAction::Shutdown) {
            return Err(not_iterable(format!(
                "alternative `{alt}` neither recurses nor ends in {SHUTDOWN}"
            )));
        }
        alternatives.push(Alternative { actions, loops });
    }
    let mut tool_vars = Vec::new();
    let mut prefix = Vec::new();
    for id in ids {
        let tool = tools
            .tool_for(&id)
            .ok_or_else(|| ScriptError::MissingTool(id.clone()))?;
        tool_vars.push((id.clone(), tool.name.clone()));
        prefix.push(ScriptAction::Execute {
            tool: tool.name.clone(),
            var: id,
        });
    }
    Ok(IterableForm {
        process,
        tool_vars,
        prefix,
        alternatives,
    })
}

/// The recursive definition a loop stands for. `execute` actions start
/// tools and have no counterpart in the process definitions, so they are dropped.
pub fn to_recursive(form: &IterableForm) -> ProcessDef {
    let alts = form
        .alternatives
        .iter()
        .map(|alt| {
            let mut items: Vec<ProcessExpr> = alt
                .actions
                .iter()
                .filter_map(untranslate_action)
                .map(|(n, a)| ProcessExpr::Atom(n, a))
                .collect();
            if alt.loops {
                items.push(ProcessExpr::call(form.process.clone()));
            }
            ProcessExpr::seq(items)
        })
        .collect();
    ProcessDef::new(form.process.clone(), ProcessExpr::alt(alts))
}

fn write_form(out: &mut String, f: &IterableForm) {
    let _ = writeln!(out, "process {} is", f.process);
    let indent = if f.tool_vars.is_empty() {
        "  "
    } else {
        let vars: Vec<String> = f
            .tool_vars
            .iter()
            .map(|(v, t)| format!("{v}: {t}"))
            .collect();
        let _ = writeln!(out, "let {}", vars.join(", "));
        out.push_str("in\n");
        "  "
    };
    for a in &f.prefix {
        let _ = writeln!(out, "{indent}{a} .");
    }
    let _ = writeln!(out, "{indent}(");
    for (i, alt) in f.alternatives.iter().enumerate() {
        let lead = if i == 0 { "  " } else { "+ " };
        if alt.actions.is_empty() {
            let _ = writeln!(out, "{indent}{lead}delta");
        }
        for (j, a) in alt.actions.iter().enumerate() {
            let sep = if j + 1 < alt.actions.len() { " ." } else { "" };
            let l = if j == 0 { lead } else { "  " };
            let _ = writeln!(out, "{indent}{l}{a}{sep}");
        }
    }
    let _ = writeln!(out, "{indent}) * delta");
    if !f.tool_vars.is_empty() {
        out.push_str("endlet\n");
    }
}

/// The complete script: process blocks, tool blocks, then the `toolbus`
/// line listing the processes in the given order.
pub fn gen_script(forms: &[IterableForm], tools: &ToolTable) -> Result<String, ScriptError> {
    if forms.is_empty() {
        return Err(ScriptError::Empty);
    }
    let mut out = String::new();
    for f in forms {
        write_form(&mut out, f);
        out.push('\n');
    }
    let mut used: Vec<&str> = Vec::new();
    for f in forms {
        for (_, t) in &f.tool_vars {
            if !used.contains(&t.as_str()) {
                used.push(t);
            }
        }
    }
    for t in &used {
        let decl = tools
            .tools
            .iter()
            .find(|d| d.name == *t)
            .ok_or_else(|| ScriptError::MissingCommand(t.to_string()))?;
        let cmd = decl
            .command
            .as_ref()
            .ok_or_else(|| ScriptError::MissingCommand(t.to_string()))?;
        let _ = writeln!(out, "tool {t} is {{ command = {cmd:?} }}");
    }
    if !used.is_empty() {
        out.push('\n');
    }
    let names: Vec<&str> = forms.iter().map(|f| f.process.as_str()).collect();
    let _ = writeln!(out, "toolbus({})", names.join(", "));
    Ok(out)
}

/// Converts the named definitions and emits the script.
pub fn script_for(
    spec: &FlatSpec,
    processes: &[String],
    tools: &ToolTable,
) -> Result<String, ScriptError> {
    let mut forms = Vec::new();
    for p in processes {
        let def = spec
            .def(p)
            .ok_or_else(|| ScriptError::UnknownProcess(p.clone()))?;
        forms.push(to_iterable(spec, def, tools)?);
    }
    gen_script(&forms, tools)
}
