//! Abstraction levels: primitive libraries and environment generators.

use std::fmt::Write as _;
use std::sync::OnceLock;

use thiserror::Error;

use crate::kernel::{CommEntry, FlatSpec, FuncDecl, ProcessExpr, Term};
use crate::syntax::{self, lexer::Tok, Module, ModuleSet, ParseError, Parser, SpecError};

/// A level: its data signature, primitive actions, the communications its
/// environment enforces and the action that asks for shutdown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDef {
    pub name: String,
    /// Module and process names of the library start with this.
    pub prefix: String,
    pub sorts: Vec<String>,
    pub functions: Vec<FuncDecl>,
    pub primitives: Vec<(String, Vec<String>)>,
    pub comms: Vec<CommEntry>,
    /// `snd-quit | rec-quit = comm-quit`: components perform the left side,
    /// the generated control process the right.
    pub trigger: CommEntry,
    /// Actions blocked around the system; defaults to every action that
    /// occurs in a communication rule.
    pub encapsulate: Vec<String>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LevelError {
    #[error("level file {0}")]
    Parse(#[from] ParseError),
    #[error("level {0} has no shutdown trigger")]
    MissingShutdown(String),
    #[error("level {level}: {message}")]
    Invalid { level: String, message: String },
    #[error("unknown level {0}")]
    Unknown(String),
    #[error("no components given")]
    NoComponents,
    #[error("component {0} is not defined")]
    UnknownComponent(String),
    #[error("component {component} uses {action}, which is not an action of level {level}")]
    Violation {
        component: String,
        action: String,
        level: String,
    },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

pub const SHUTDOWN_SEND: &str = "snd-shutdown";
pub const SHUTDOWN_RECV: &str = "rec-shutdown";
pub const SHUTDOWN: &str = "shutdown";

const BUILTIN_SOURCES: &[&str] = &[include_str!("arch.lvl"), include_str!("toolbus.lvl")];

pub fn parse_level(text: &str) -> Result<LevelDef, LevelError> {
    let mut p = Parser::new(text)?;
    p.expect_word("level")?;
    let name = p.ident()?;
    p.expect_word("begin")?;
    let mut level = LevelDef {
        name: name.clone(),
        prefix: String::new(),
        sorts: Vec::new(),
        functions: Vec::new(),
        primitives: Vec::new(),
        comms: Vec::new(),
        trigger: CommEntry::simple("", "", ""),
        encapsulate: Vec::new(),
    };
    let mut trigger = None;
    let sections = [
        "prefix",
        "sorts",
        "functions",
        "primitives",
        "communications",
        "shutdown",
        "encapsulate",
        "end",
    ];
    let at_end = |p: &Parser| match p.peek() {
        Tok::Ident(s) => sections.contains(&s.as_str()),
        _ => true,
    };
    let names = |p: &mut Parser| -> Result<Vec<String>, ParseError> {
        let mut out = vec![p.ident()?];
        while p.eat(&Tok::Comma) {
            out.push(p.ident()?);
        }
        Ok(out)
    };
    let sort_list = |p: &mut Parser| -> Result<Vec<String>, ParseError> {
        let mut out = vec![p.ident()?];
        while p.eat(&Tok::Hash) {
            out.push(p.ident()?);
        }
        Ok(out)
    };
    loop {
        let pos = p.pos();
        let word = p.ident()?;
        match word.as_str() {
            "end" => break,
            "prefix" => level.prefix = p.ident()?,
            "sorts" => {
                while !at_end(&p) {
                    level.sorts.extend(names(&mut p)?);
                }
            }
            "functions" => {
                while !at_end(&p) {
                    let fnames = if p.is_word("_") {
                        p.bump();
                        p.expect(&Tok::Shr)?;
                        p.expect_word("_")?;
                        vec![crate::kernel::term::CONNECT.to_string()]
                    } else {
                        names(&mut p)?
                    };
                    p.expect(&Tok::Colon)?;
                    let args = if *p.peek() == Tok::Arrow {
                        Vec::new()
                    } else {
                        sort_list(&mut p)?
                    };
                    p.expect(&Tok::Arrow)?;
                    let result = p.ident()?;
                    for name in fnames {
                        level.functions.push(FuncDecl {
                            name,
                            args: args.clone(),
                            result: result.clone(),
                        });
                    }
                }
            }
            "primitives" => {
                while !at_end(&p) {
                    let pnames = names(&mut p)?;
                    let sorts = if p.eat(&Tok::Colon) {
                        sort_list(&mut p)?
                    } else {
                        Vec::new()
                    };
                    for n in pnames {
                        level.primitives.push((n, sorts.clone()));
                    }
                }
            }
            "communications" | "shutdown" => {
                while !at_end(&p) {
                    let left = p.pattern()?;
                    p.expect(&Tok::Bar)?;
                    let right = p.pattern()?;
                    p.expect(&Tok::Eq)?;
                    let result = p.pattern()?;
                    let mut vars = Vec::new();
                    if p.eat_word("for") {
                        loop {
                            let v = p.ident()?;
                            p.expect_word("in")?;
                            vars.push((v, p.ident()?));
                            if !p.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    let vars_names: Vec<String> = vars.iter().map(|(v, _)| v.clone()).collect();
                    let bind = |pat: crate::kernel::ActPattern| crate::kernel::ActPattern {
                        name: pat.name,
                        args: pat
                            .args
                            .map(|a| a.iter().map(|t| t.bind_vars(&vars_names)).collect()),
                    };
                    let entry = CommEntry {
                        left: bind(left),
                        right: bind(right),
                        result: bind(result),
                        vars,
                    };
                    if word == "shutdown" {
                        trigger = Some(entry);
                    } else {
                        level.comms.push(entry);
                    }
                }
            }
            "encapsulate" => {
                while !at_end(&p) {
                    level.encapsulate.extend(names(&mut p)?);
                }
            }
            other => {
                return Err(ParseError::new(
                    pos.line,
                    pos.col,
                    format!("unknown keyword `{other}`"),
                )
                .into())
            }
        }
    }
    let close = p.ident()?;
    if close != name {
        return Err(p
            .error(format!("level {name} closed by `end {close}`"))
            .into());
    }
    level.trigger = trigger.ok_or_else(|| LevelError::MissingShutdown(name.clone()))?;
    if level.prefix.is_empty() {
        level.prefix = capitalize(&name);
    }
    if level.encapsulate.is_empty() {
        for c in &level.comms {
            for n in [&c.left.name, &c.right.name] {
                if !level.encapsulate.contains(n) {
                    level.encapsulate.push(n.clone());
                }
            }
        }
    }
    level.validate()?;
    Ok(level)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

impl LevelDef {
    fn validate(&self) -> Result<(), LevelError> {
        let invalid = |message: String| LevelError::Invalid {
            level: self.name.clone(),
            message,
        };
        for c in &self.comms {
            for side in [&c.left, &c.right] {
                if !self.primitives.iter().any(|(n, _)| *n == side.name) {
                    return Err(invalid(format!(
                        "communication {c} uses undeclared primitive {}",
                        side.name
                    )));
                }
            }
        }
        for n in &self.encapsulate {
            if !self.primitives.iter().any(|(p, _)| p == n) {
                return Err(invalid(format!(
                    "encapsulated action {n} is not a primitive"
                )));
            }
        }
        Ok(())
    }

    pub fn types_module(&self) -> String {
        format!("{}Types", self.prefix)
    }

    pub fn primitives_module(&self) -> String {
        format!("{}Primitives", self.prefix)
    }

    pub fn control_process(&self) -> String {
        format!("{}Control", self.prefix)
    }

    pub fn shutdown_process(&self) -> String {
        format!("{}Shutdown", self.prefix)
    }

    fn result_sorts(&self, c: &CommEntry) -> Vec<String> {
        let side_sorts = |n: &str| {
            self.primitives
                .iter()
                .find(|(p, _)| p == n)
                .map(|(_, s)| s.clone())
                .unwrap_or_default()
        };
        match &c.result.args {
            None => side_sorts(&c.left.name),
            Some(args) => args
                .iter()
                .map(|a| match a {
                    Term::Var(v) => c
                        .vars
                        .iter()
                        .find(|(x, _)| x == v)
                        .map(|(_, s)| s.clone())
                        .unwrap_or_default(),
                    Term::App(f, _) => self
                        .functions
                        .iter()
                        .find(|d| d.name == *f)
                        .map(|d| d.result.clone())
                        .unwrap_or_default(),
                })
                .collect(),
        }
    }

    /// Every action name this level defines (primitives, communication
    /// results, shutdown machinery).
    pub fn action_names(&self) -> Vec<String> {
        let mut out: Vec<String> = self.primitives.iter().map(|(n, _)| n.clone()).collect();
        for c in self.comms.iter().chain(std::iter::once(&self.trigger)) {
            for n in [&c.left.name, &c.right.name, &c.result.name] {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
        }
        out
    }

    /// Source of the three library modules: `<P>Types`, `<P>Primitives`
    /// and the parameterised environment `<P>`.
    pub fn library_source(&self) -> String {
        let p = &self.prefix;
        let mut out = String::new();
        let _ = writeln!(out, "data module {p}Types\nbegin\n  exports\n  begin");
        if !self.sorts.is_empty() {
            let _ = writeln!(out, "    sorts\n      {}", self.sorts.join(", "));
        }
        if !self.functions.is_empty() {
            out.push_str("    functions\n");
            for f in &self.functions {
                let name = if f.name == crate::kernel::term::CONNECT {
                    "_ >> _"
                } else {
                    &f.name
                };
                if f.args.is_empty() {
                    let _ = writeln!(out, "      {name} : -> {}", f.result);
                } else {
                    let _ = writeln!(out, "      {name} : {} -> {}", f.args.join(" # "), f.result);
                }
            }
        }
        let _ = writeln!(out, "  end\nend {p}Types\n");

        let mut atoms: Vec<(String, Vec<String>)> = self.primitives.clone();
        for c in &self.comms {
            if !atoms.iter().any(|(n, _)| *n == c.result.name) {
                atoms.push((c.result.name.clone(), self.result_sorts(c)));
            }
        }
        for n in [
            &self.trigger.left.name,
            &self.trigger.right.name,
            &self.trigger.result.name,
        ] {
            if !atoms.iter().any(|(a, _)| a == n) {
                atoms.push((n.clone(), Vec::new()));
            }
        }
        for n in [SHUTDOWN_SEND, SHUTDOWN_RECV, SHUTDOWN] {
            atoms.push((n.to_string(), Vec::new()));
        }
        let _ = writeln!(
            out,
            "process module {p}Primitives\nbegin\n  exports\n  begin\n    atoms"
        );
        for (n, sorts) in &atoms {
            if sorts.is_empty() {
                let _ = writeln!(out, "      {n}");
            } else {
                let _ = writeln!(out, "      {n} : {}", sorts.join(" # "));
            }
        }
        let _ = writeln!(out, "  end\n  imports\n    {p}Types\n  communications");
        for c in self.comms.iter().chain(std::iter::once(&self.trigger)) {
            let _ = writeln!(out, "    {c}");
        }
        let _ = writeln!(out, "    {SHUTDOWN_SEND} | {SHUTDOWN_RECV} = {SHUTDOWN}");
        let _ = writeln!(out, "  disrupts\n    {SHUTDOWN}\nend {p}Primitives\n");

        let control_set = [&self.trigger.left.name, &self.trigger.right.name]
            .into_iter()
            .cloned()
            .chain([SHUTDOWN_SEND.to_string(), SHUTDOWN_RECV.to_string()])
            .collect::<Vec<_>>();
        let _ = writeln!(
            out,
            "process module {p}\nbegin\n  parameters\n    System\n    begin\n      processes\n        System\n    end System\n  exports\n  begin\n    processes\n      {p}\n  end\n  imports\n    {p}Primitives\n  processes\n    {p}Control\n    {p}Shutdown"
        );
        let _ = writeln!(
            out,
            "  sets\n    of atoms\n      {p}SystemSet = {{{}}}",
            self.encapsulate.join(", ")
        );
        let _ = writeln!(out, "      {p}ControlSet = {{{}}}", control_set.join(", "));
        let _ = writeln!(out, "  definitions");
        let _ = writeln!(out, "    {p} = encaps({p}ControlSet, encaps({p}SystemSet, System) || {p}Control || {p}Shutdown)");
        let _ = writeln!(
            out,
            "    {p}Control = {} . {SHUTDOWN_SEND}",
            self.trigger.right.name
        );
        let _ = writeln!(out, "    {p}Shutdown = {SHUTDOWN_RECV}");
        let _ = writeln!(out, "end {p}");
        out
    }

    pub fn library_modules(&self) -> ModuleSet {
        syntax::parse_spec(&self.library_source()).expect("generated library parses")
    }
}

fn builtins() -> &'static [LevelDef] {
    static LEVELS: OnceLock<Vec<LevelDef>> = OnceLock::new();
    LEVELS.get_or_init(|| {
        BUILTIN_SOURCES
            .iter()
            .map(|s| parse_level(s).expect("builtin level parses"))
            .collect()
    })
}

/// `arch` or `toolbus`.
pub fn builtin(name: &str) -> Option<LevelDef> {
    builtins().iter().find(|l| l.name == name).cloned()
}

pub fn builtin_names() -> Vec<String> {
    builtins().iter().map(|l| l.name.clone()).collect()
}

/// Library modules of every builtin level; the flattener falls back to
/// these for imports the user does not define.
pub fn builtin_modules() -> Vec<Module> {
    static MODULES: OnceLock<Vec<Module>> = OnceLock::new();
    MODULES
        .get_or_init(|| {
            builtins()
                .iter()
                .flat_map(|l| l.library_modules().modules)
                .collect()
        })
        .clone()
}

/// The output of an environment generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedEnv {
    /// Generated source: the system module and the root module, preceded by
    /// the level library when the level is not builtin.
    pub source: String,
    pub modules: ModuleSet,
    /// Flattened user modules plus the generated ones, rooted at the application.
    pub spec: FlatSpec,
}

fn called_names(e: &ProcessExpr, out: &mut Vec<String>) {
    e.visit(&mut |x| {
        if let ProcessExpr::Atom(n, _) | ProcessExpr::Call(n, _) = x {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
    });
}

fn check_level(level: &LevelDef, user: &ModuleSet, component: &str) -> Result<(), LevelError> {
    let own = level.action_names();
    let mut foreign: Vec<String> = Vec::new();
    for other in builtins().iter().filter(|l| l.name != level.name) {
        foreign.extend(
            other
                .action_names()
                .into_iter()
                .filter(|n| !own.contains(n)),
        );
    }
    let declared_locally = |n: &str| {
        user.modules
            .iter()
            .any(|m| m.atoms.iter().any(|a| a.name == n))
    };
    let defs: Vec<&syntax::ast::Definition> = user
        .modules
        .iter()
        .flat_map(|m| m.definitions.iter())
        .collect();
    let mut seen = vec![component.to_string()];
    let mut i = 0;
    while i < seen.len() {
        if let Some(d) = defs.iter().find(|d| d.name == seen[i]) {
            let mut names = Vec::new();
            called_names(&d.body, &mut names);
            for n in names {
                if defs.iter().any(|d| d.name == n) {
                    if !seen.contains(&n) {
                        seen.push(n);
                    }
                } else if foreign.contains(&n) && !declared_locally(&n) {
                    return Err(LevelError::Violation {
                        component: component.to_string(),
                        action: n,
                        level: level.name.clone(),
                    });
                }
            }
        }
        i += 1;
    }
    Ok(())
}

/// Puts `components` in parallel as `<app>System` and binds that to the
/// level's environment, renamed to `<app>`.
pub fn gen_env(
    level: &LevelDef,
    user: &ModuleSet,
    components: &[String],
    app: &str,
) -> Result<GeneratedEnv, LevelError> {
    if components.is_empty() {
        return Err(LevelError::NoComponents);
    }
    let mut homes: Vec<String> = Vec::new();
    for c in components {
        let home = user
            .modules
            .iter()
            .find(|m| m.definition(c).is_some())
            .ok_or_else(|| LevelError::UnknownComponent(c.clone()))?;
        check_level(level, user, c)?;
        if !homes.contains(&home.name) {
            homes.push(home.name.clone());
        }
    }
    let system = format!("{app}System");
    let p = &level.prefix;
    let mut source = String::new();
    let builtin = builtins().iter().any(|l| l == level);
    if !builtin {
        source.push_str(&level.library_source());
        source.push('\n');
    }
    let _ = writeln!(
        source,
        "process module {system}\nbegin\n  exports\n  begin\n    processes\n      {system}\n  end\n  imports\n    {}\n  definitions\n    {system} = {}\nend {system}\n",
        homes.join(",\n    "),
        components.join(" || ")
    );
    let _ = writeln!(
        source,
        "process module {app}\nbegin\n  imports\n    {p} {{\n      System bound by [System -> {system}] to {system}\n      renamed by [{p} -> {app}]\n    }}\nend {app}"
    );
    let modules = syntax::parse_spec(&source).map_err(SpecError::from)?;
    let mut all = user.clone();
    all.extend(modules.clone());
    let spec = syntax::flatten(&all, app).map_err(SpecError::from)?;
    Ok(GeneratedEnv {
        source,
        modules,
        spec,
    })
}

pub fn gen_arch_env(
    user: &ModuleSet,
    components: &[String],
    app: &str,
) -> Result<GeneratedEnv, LevelError> {
    gen_env(&builtin("arch").expect("builtin"), user, components, app)
}

pub fn gen_tb_env(
    user: &ModuleSet,
    components: &[String],
    app: &str,
) -> Result<GeneratedEnv, LevelError> {
    gen_env(&builtin("toolbus").expect("builtin"), user, components, app)
}

/// A builtin level name or the text of a `.lvl` file.
pub fn resolve(name_or_text: &str) -> Result<LevelDef, LevelError> {
    match builtin(name_or_text) {
        Some(l) => Ok(l),
        None if name_or_text.trim_start().starts_with("level") || name_or_text.contains('\n') => {
            parse_level(name_or_text)
        }
        None => Err(LevelError::Unknown(name_or_text.to_string())),
    }
}
