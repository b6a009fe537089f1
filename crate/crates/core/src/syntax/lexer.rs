//! Tokens for `.psf`, `.map`, `.lvl`, tool configuration and script sources.

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Plus,
    Bar,
    BarBar,
    Eq,
    Colon,
    Hash,
    Arrow,
    Shr,
    Star,
    Question,
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Str(s) => return write!(f, "string {s:?}"),
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Plus => "`+`",
            Tok::Bar => "`|`",
            Tok::BarBar => "`||`",
            Tok::Eq => "`=`",
            Tok::Colon => "`:`",
            Tok::Hash => "`#`",
            Tok::Arrow => "`->`",
            Tok::Shr => "`>>`",
            Tok::Star => "`*`",
            Tok::Question => "`?`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let (start_line, start_col) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Token {
                tok,
                line: start_line,
                col: start_col,
            });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '-' if next == Some('-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '-' if next == Some('>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '>' if next == Some('>') => push(Tok::Shr, 2, &mut i, &mut col),
            '|' if next == Some('|') => push(Tok::BarBar, 2, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '[' => push(Tok::LBrack, 1, &mut i, &mut col),
            ']' => push(Tok::RBrack, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '|' => push(Tok::Bar, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '#' => push(Tok::Hash, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            '?' => push(Tok::Question, 1, &mut i, &mut col),
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(ParseError::new(
                                start_line,
                                start_col,
                                "unterminated string literal",
                            ));
                        }
                        Some('"') => break,
                        Some('\\') if matches!(chars.get(j + 1), Some('"') | Some('\\')) => {
                            s.push(chars[j + 1]);
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                let len = j + 1 - i;
                push(Tok::Str(s), len, &mut i, &mut col);
            }
            c if ident_char(c) => {
                let mut j = i;
                while j < chars.len() {
                    let d = chars[j];
                    if ident_char(d)
                        || (d == '-' && chars.get(j + 1).is_some_and(|n| n.is_alphanumeric()))
                    {
                        j += 1;
                    } else {
                        break;
                    }
                }
                let word: String = chars[i..j].iter().collect();
                let len = j - i;
                push(Tok::Ident(word), len, &mut i, &mut col);
            }
            other => {
                return Err(ParseError::new(
                    line,
                    col,
                    format!("unexpected character {other:?}"),
                ))
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
