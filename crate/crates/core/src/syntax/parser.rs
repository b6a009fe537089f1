//! Recursive-descent parser.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;
use crate::kernel::{
    ActPattern, ActionSet, CommEntry, FuncDecl, ProcessExpr, RenameMap, RenameRule, Term,
};

const SECTIONS: &[&str] = &[
    "exports",
    "imports",
    "parameters",
    "sorts",
    "functions",
    "variables",
    "equations",
    "atoms",
    "processes",
    "sets",
    "communications",
    "disrupts",
    "definitions",
];

/// Token cursor shared by every parser in the crate.
pub struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            at: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn pos(&self) -> Pos {
        let t = &self.toks[self.at];
        Pos {
            line: t.line,
            col: t.col,
        }
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        let p = self.pos();
        ParseError::new(p.line, p.col, msg)
    }

    pub fn expected(&self, what: &str) -> ParseError {
        self.error(format!("expected {what}, found {}", self.peek()))
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.expected(&t.to_string()))
        }
    }

    pub fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    pub fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.expected(&format!("`{w}`")))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.expected("an identifier")),
        }
    }

    pub fn string(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.expected("a string")),
        }
    }

    // ---- data terms ----

    pub fn term(&mut self) -> Result<Term, ParseError> {
        let mut t = self.term_app()?;
        while self.eat(&Tok::Shr) {
            let r = self.term_app()?;
            t = Term::connect(t, r);
        }
        Ok(t)
    }

    fn term_app(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::LParen) {
            let t = self.term()?;
            self.expect(&Tok::RParen)?;
            return Ok(t);
        }
        let name = self.ident()?;
        let args = if *self.peek() == Tok::LParen {
            self.term_args()?
        } else {
            Vec::new()
        };
        Ok(Term::App(name, args))
    }

    pub fn term_args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            self.expect(&Tok::Comma)?;
        }
    }

    /// `name` (any arguments) or `name(t1, ..)`.
    pub fn pattern(&mut self) -> Result<ActPattern, ParseError> {
        let name = self.ident()?;
        if *self.peek() == Tok::LParen {
            Ok(ActPattern::exact(name, self.term_args()?))
        } else {
            Ok(ActPattern::any(name))
        }
    }

    // ---- process expressions ----

    pub fn process(&mut self) -> Result<ProcessExpr, ParseError> {
        let mut alts = vec![self.par()?];
        while self.eat(&Tok::Plus) {
            alts.push(self.par()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            ProcessExpr::Alt(alts)
        })
    }

    fn par(&mut self) -> Result<ProcessExpr, ParseError> {
        let mut xs = vec![self.seq()?];
        while self.eat(&Tok::BarBar) {
            xs.push(self.seq()?);
        }
        Ok(if xs.len() == 1 {
            xs.pop().unwrap()
        } else {
            ProcessExpr::Par(xs)
        })
    }

    fn seq(&mut self) -> Result<ProcessExpr, ParseError> {
        let mut xs = vec![self.prim()?];
        while self.eat(&Tok::Dot) {
            xs.push(self.prim()?);
        }
        Ok(if xs.len() == 1 {
            xs.pop().unwrap()
        } else {
            ProcessExpr::Seq(xs)
        })
    }

    fn prim(&mut self) -> Result<ProcessExpr, ParseError> {
        if self.eat(&Tok::LParen) {
            let e = self.process()?;
            self.expect(&Tok::RParen)?;
            return Ok(e);
        }
        let name = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.expected("a process expression")),
        };
        let operator = *self.peek_at(1) == Tok::LParen;
        match name.as_str() {
            "delta" => {
                self.bump();
                Ok(ProcessExpr::Delta)
            }
            "skip" => {
                self.bump();
                Ok(ProcessExpr::Skip)
            }
            "encaps" | "hide" if operator => {
                self.bump();
                self.bump();
                let set = self.action_set()?;
                self.expect(&Tok::Comma)?;
                let body = Box::new(self.process()?);
                self.expect(&Tok::RParen)?;
                Ok(if name == "encaps" {
                    ProcessExpr::Encaps(set, body)
                } else {
                    ProcessExpr::Hide(set, body)
                })
            }
            "rename" if operator => {
                self.bump();
                self.bump();
                let map = self.rename_map()?;
                self.expect(&Tok::Comma)?;
                let body = Box::new(self.process()?);
                self.expect(&Tok::RParen)?;
                Ok(ProcessExpr::Rename(map, body))
            }
            "sum" if operator => {
                self.bump();
                self.bump();
                let var = self.ident()?;
                self.expect_word("in")?;
                let sort = self.ident()?;
                self.expect(&Tok::Comma)?;
                let body = Box::new(self.process()?);
                self.expect(&Tok::RParen)?;
                Ok(ProcessExpr::Sum(var, sort, body))
            }
            _ => {
                self.bump();
                let args = if operator {
                    self.term_args()?
                } else {
                    Vec::new()
                };
                Ok(ProcessExpr::Atom(name, args))
            }
        }
    }

    /// `{a, b(x)}` or a set name; names are resolved during flattening.
    pub fn action_set(&mut self) -> Result<ActionSet, ParseError> {
        let mut items = Vec::new();
        loop {
            if self.eat(&Tok::LBrace) {
                if !self.eat(&Tok::RBrace) {
                    loop {
                        items.push(self.pattern()?);
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        self.expect(&Tok::Comma)?;
                    }
                }
            } else {
                items.push(ActPattern::any(self.ident()?));
            }
            if !self.eat(&Tok::Plus) {
                return Ok(ActionSet::new(items));
            }
        }
    }

    pub fn rename_map(&mut self) -> Result<RenameMap, ParseError> {
        self.expect(&Tok::LBrace)?;
        let mut rules = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(RenameMap(rules));
        }
        loop {
            let from = self.pattern()?;
            self.expect(&Tok::Arrow)?;
            let to = self.pattern()?;
            rules.push(RenameRule { from, to });
            if self.eat(&Tok::RBrace) {
                return Ok(RenameMap(rules));
            }
            self.expect(&Tok::Comma)?;
        }
    }

    // ---- modules ----

    fn at_section_end(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => s == "end" || SECTIONS.contains(&s.as_str()),
            _ => true,
        }
    }

    fn names(&mut self) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = vec![(String::new(), self.pos())];
        out[0].0 = self.ident()?;
        while self.eat(&Tok::Comma) {
            let p = self.pos();
            out.push((self.ident()?, p));
        }
        Ok(out)
    }

    fn sort_list(&mut self) -> Result<Vec<String>, ParseError> {
        let mut out = vec![self.ident()?];
        while self.eat(&Tok::Hash) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn signatures(&mut self) -> Result<Vec<Signature>, ParseError> {
        let mut out = Vec::new();
        while !self.at_section_end() {
            let names = self.names()?;
            let sorts = if self.eat(&Tok::Colon) {
                self.sort_list()?
            } else {
                Vec::new()
            };
            for (name, pos) in names {
                out.push(Signature {
                    name,
                    sorts: sorts.clone(),
                    pos,
                });
            }
        }
        Ok(out)
    }

    fn rename_pairs(&mut self) -> Result<Vec<(String, String)>, ParseError> {
        self.expect(&Tok::LBrack)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RBrack) {
            return Ok(out);
        }
        loop {
            let a = self.ident()?;
            self.expect(&Tok::Arrow)?;
            let b = self.ident()?;
            out.push((a, b));
            if self.eat(&Tok::RBrack) {
                return Ok(out);
            }
            self.eat(&Tok::Comma);
        }
    }

    fn import(&mut self) -> Result<Import, ParseError> {
        let pos = self.pos();
        let module = self.ident()?;
        let mut imp = Import {
            module,
            pos,
            bindings: Vec::new(),
            renamings: Vec::new(),
        };
        if self.eat(&Tok::LBrace) {
            while !self.eat(&Tok::RBrace) {
                if self.eat_word("renamed") {
                    self.expect_word("by")?;
                    imp.renamings.extend(self.rename_pairs()?);
                    continue;
                }
                let pos = self.pos();
                let param = self.ident()?;
                self.expect_word("bound")?;
                self.expect_word("by")?;
                let map = self.rename_pairs()?;
                self.expect_word("to")?;
                let actual = self.ident()?;
                imp.bindings.push(Binding {
                    param,
                    map,
                    actual,
                    pos,
                });
                self.eat(&Tok::Comma);
            }
        }
        Ok(imp)
    }

    fn section(&mut self, m: &mut Module, exported: bool) -> Result<(), ParseError> {
        let pos = self.pos();
        let word = self.ident()?;
        let mut exports: Vec<String> = Vec::new();
        match word.as_str() {
            "exports" => {
                if exported {
                    return Err(ParseError::new(pos.line, pos.col, "nested exports block"));
                }
                self.expect_word("begin")?;
                while !self.is_word("end") {
                    if self.at_eof() {
                        return Err(self.expected("`end`"));
                    }
                    self.section(m, true)?;
                }
                self.expect_word("end")?;
            }
            "imports" => loop {
                m.imports.push(self.import()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            },
            "parameters" => {
                while !self.at_section_end() {
                    let pos = self.pos();
                    let name = self.ident()?;
                    let mut p = Parameter {
                        name: name.clone(),
                        pos,
                        processes: Vec::new(),
                        atoms: Vec::new(),
                    };
                    self.expect_word("begin")?;
                    loop {
                        if self.eat_word("processes") {
                            p.processes.extend(self.signatures()?);
                        } else if self.eat_word("atoms") {
                            p.atoms.extend(self.signatures()?);
                        } else {
                            break;
                        }
                    }
                    self.expect_word("end")?;
                    let close = self.ident()?;
                    if close != name {
                        return Err(self.error(format!("parameter {name} closed by `end {close}`")));
                    }
                    m.parameters.push(p);
                }
            }
            "sorts" => {
                while !self.at_section_end() {
                    for (s, p) in self.names()? {
                        exports.push(s.clone());
                        m.sorts.push((s, p));
                    }
                }
            }
            "functions" => {
                while !self.at_section_end() {
                    let pos = self.pos();
                    let names: Vec<String> = if self.is_word("_") && *self.peek_at(1) == Tok::Shr {
                        self.bump();
                        self.bump();
                        self.expect_word("_")?;
                        vec![crate::kernel::term::CONNECT.to_string()]
                    } else {
                        self.names()?.into_iter().map(|(n, _)| n).collect()
                    };
                    self.expect(&Tok::Colon)?;
                    let args = if *self.peek() == Tok::Arrow {
                        Vec::new()
                    } else {
                        self.sort_list()?
                    };
                    self.expect(&Tok::Arrow)?;
                    let result = self.ident()?;
                    for name in names {
                        exports.push(name.clone());
                        m.functions.push((
                            FuncDecl {
                                name,
                                args: args.clone(),
                                result: result.clone(),
                            },
                            pos,
                        ));
                    }
                }
            }
            "variables" => {
                while !self.at_section_end() {
                    let names = self.names()?;
                    self.expect(&Tok::Colon)?;
                    self.eat(&Tok::Arrow);
                    let sort = self.ident()?;
                    for (n, p) in names {
                        m.variables.push((n, sort.clone(), p));
                    }
                }
            }
            "equations" => {
                while *self.peek() == Tok::LBrack || !self.at_section_end() {
                    let pos = self.pos();
                    let label = if self.eat(&Tok::LBrack) {
                        let l = self.ident()?;
                        self.expect(&Tok::RBrack)?;
                        Some(l)
                    } else {
                        None
                    };
                    let lhs = self.term()?;
                    self.expect(&Tok::Eq)?;
                    let rhs = self.term()?;
                    m.equations.push(EquationAst {
                        label,
                        lhs,
                        rhs,
                        pos,
                    });
                }
            }
            "atoms" => {
                let sigs = self.signatures()?;
                exports.extend(sigs.iter().map(|s| s.name.clone()));
                m.atoms.extend(sigs);
            }
            "processes" => {
                let sigs = self.signatures()?;
                exports.extend(sigs.iter().map(|s| s.name.clone()));
                m.processes.extend(sigs);
            }
            "sets" => {
                while !self.at_section_end() {
                    if self.eat_word("of") {
                        self.expect_word("atoms")?;
                        continue;
                    }
                    let pos = self.pos();
                    let name = self.ident()?;
                    self.expect(&Tok::Eq)?;
                    let set = self.action_set()?;
                    exports.push(name.clone());
                    m.sets.push(SetDecl {
                        name,
                        items: set.items().to_vec(),
                        pos,
                    });
                }
            }
            "communications" => {
                while !self.at_section_end() {
                    let pos = self.pos();
                    let left = self.pattern()?;
                    self.expect(&Tok::Bar)?;
                    let right = self.pattern()?;
                    self.expect(&Tok::Eq)?;
                    let result = self.pattern()?;
                    let mut vars = Vec::new();
                    if self.eat_word("for") {
                        loop {
                            let v = self.ident()?;
                            self.expect_word("in")?;
                            let s = self.ident()?;
                            vars.push((v, s));
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    m.comms.push((
                        CommEntry {
                            left,
                            right,
                            result,
                            vars,
                        },
                        pos,
                    ));
                }
            }
            "disrupts" => {
                while !self.at_section_end() {
                    m.disrupts.extend(self.names()?);
                }
            }
            "definitions" => {
                while !self.at_section_end() {
                    let pos = self.pos();
                    let name = self.ident()?;
                    let mut params = Vec::new();
                    if self.eat(&Tok::LParen) {
                        loop {
                            params.push(self.ident()?);
                            if self.eat(&Tok::RParen) {
                                break;
                            }
                            self.expect(&Tok::Comma)?;
                        }
                    }
                    self.expect(&Tok::Eq)?;
                    let body = self.process()?;
                    m.definitions.push(Definition {
                        name,
                        params,
                        body,
                        pos,
                    });
                }
            }
            other => {
                return Err(ParseError::new(
                    pos.line,
                    pos.col,
                    format!("unknown keyword `{other}`"),
                ))
            }
        }
        if exported {
            m.exports.extend(exports);
        }
        Ok(())
    }

    fn module(&mut self) -> Result<Module, ParseError> {
        let pos = self.pos();
        let kind = if self.eat_word("data") {
            ModuleKind::Data
        } else if self.eat_word("process") {
            ModuleKind::Process
        } else {
            return Err(self.expected("`data module` or `process module`"));
        };
        self.expect_word("module")?;
        let name = self.ident()?;
        let mut m = Module::new(kind, name.clone());
        m.pos = pos;
        self.expect_word("begin")?;
        while !self.is_word("end") {
            if self.at_eof() {
                return Err(self.error(format!("module {name} is missing `end {name}`")));
            }
            self.section(&mut m, false)?;
        }
        self.expect_word("end")?;
        let close = self.ident()?;
        if close != name {
            return Err(self.error(format!("module {name} closed by `end {close}`")));
        }
        check_duplicates(&m)?;
        Ok(m)
    }

    pub fn module_set(&mut self) -> Result<ModuleSet, ParseError> {
        let mut ms = ModuleSet::default();
        while !self.at_eof() {
            let m = self.module()?;
            if let Some(prev) = ms.get(&m.name) {
                return Err(ParseError::new(
                    m.pos.line,
                    m.pos.col,
                    format!(
                        "duplicate module {} (first defined at {})",
                        m.name, prev.pos
                    ),
                ));
            }
            ms.modules.push(m);
        }
        Ok(ms)
    }
}

fn check_duplicates(m: &Module) -> Result<(), ParseError> {
    fn dup<'a>(kind: &str, items: impl Iterator<Item = (&'a str, Pos)>) -> Result<(), ParseError> {
        let mut seen: Vec<&str> = Vec::new();
        for (name, pos) in items {
            if seen.contains(&name) {
                return Err(ParseError::new(
                    pos.line,
                    pos.col,
                    format!("duplicate {kind} {name}"),
                ));
            }
            seen.push(name);
        }
        Ok(())
    }
    dup("sort", m.sorts.iter().map(|(s, p)| (s.as_str(), *p)))?;
    dup(
        "function",
        m.functions.iter().map(|(f, p)| (f.name.as_str(), *p)),
    )?;
    dup(
        "variable",
        m.variables.iter().map(|(v, _, p)| (v.as_str(), *p)),
    )?;
    dup("atom", m.atoms.iter().map(|s| (s.name.as_str(), s.pos)))?;
    dup(
        "process",
        m.processes.iter().map(|s| (s.name.as_str(), s.pos)),
    )?;
    dup("set", m.sets.iter().map(|s| (s.name.as_str(), s.pos)))?;
    dup(
        "definition",
        m.definitions.iter().map(|d| (d.name.as_str(), d.pos)),
    )?;
    dup(
        "parameter",
        m.parameters.iter().map(|p| (p.name.as_str(), p.pos)),
    )?;
    Ok(())
}
