//! Reading back the scripts [`gen_script`](super::gen_script) writes.

use crate::syntax::lexer::Tok;
use crate::syntax::Parser;

use super::{Alternative, IterableForm, ScriptAction, ScriptError, ToolDecl, ToolTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub processes: Vec<IterableForm>,
    pub tools: ToolTable,
    pub toolbus: Vec<String>,
}

fn action(p: &mut Parser) -> Result<ScriptAction, ScriptError> {
    let name = p.ident()?;
    if name == "shutdown" {
        p.expect(&Tok::LParen)?;
        p.string()?;
        p.expect(&Tok::RParen)?;
        return Ok(ScriptAction::Shutdown);
    }
    if name == "execute" {
        p.expect(&Tok::LParen)?;
        let tool = p.ident()?;
        p.expect(&Tok::Comma)?;
        let var = p.ident()?;
        p.expect(&Tok::Question)?;
        p.expect(&Tok::RParen)?;
        return Ok(ScriptAction::Execute { tool, var });
    }
    let args = if *p.peek() == Tok::LParen {
        p.term_args()?
    } else {
        Vec::new()
    };
    Ok(ScriptAction::Action { name, args })
}

fn sequence(p: &mut Parser) -> Result<Vec<ScriptAction>, ScriptError> {
    if p.eat_word("delta") {
        return Ok(Vec::new());
    }
    let mut v = vec![action(p)?];
    while p.eat(&Tok::Dot) {
        v.push(action(p)?);
    }
    Ok(v)
}

fn process(p: &mut Parser) -> Result<IterableForm, ScriptError> {
    let name = p.ident()?;
    p.expect_word("is")?;
    let mut tool_vars = Vec::new();
    let has_let = p.eat_word("let");
    if has_let {
        loop {
            let v = p.ident()?;
            p.expect(&Tok::Colon)?;
            tool_vars.push((v, p.ident()?));
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
        p.expect_word("in")?;
    }
    let mut prefix = Vec::new();
    while *p.peek() != Tok::LParen {
        prefix.push(action(p)?);
        p.expect(&Tok::Dot)?;
    }
    p.expect(&Tok::LParen)?;
    let mut alternatives = Vec::new();
    loop {
        let actions = sequence(p)?;
        let loops = actions.last() != Some(&ScriptAction::Shutdown);
        alternatives.push(Alternative { actions, loops });
        if !p.eat(&Tok::Plus) {
            break;
        }
    }
    p.expect(&Tok::RParen)?;
    p.expect(&Tok::Star)?;
    p.expect_word("delta")?;
    if has_let {
        p.expect_word("endlet")?;
    }
    Ok(IterableForm {
        process: name,
        tool_vars,
        prefix,
        alternatives,
    })
}

pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    let mut p = Parser::new(text)?;
    let mut s = Script {
        processes: Vec::new(),
        tools: ToolTable::default(),
        toolbus: Vec::new(),
    };
    while !p.at_eof() {
        if p.eat_word("process") {
            s.processes.push(process(&mut p)?);
        } else if p.eat_word("tool") {
            let name = p.ident()?;
            p.expect_word("is")?;
            p.expect(&Tok::LBrace)?;
            p.expect_word("command")?;
            p.expect(&Tok::Eq)?;
            let command = Some(p.string()?);
            p.expect(&Tok::RBrace)?;
            s.tools.tools.push(ToolDecl {
                name,
                command,
                id: None,
            });
        } else if p.eat_word("toolbus") {
            p.expect(&Tok::LParen)?;
            loop {
                s.toolbus.push(p.ident()?);
                if !p.eat(&Tok::Comma) {
                    break;
                }
            }
            p.expect(&Tok::RParen)?;
        } else {
            return Err(p.expected("`process`, `tool` or `toolbus`").into());
        }
    }
    Ok(s)
}
