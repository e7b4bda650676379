//! Lexer and parser for program text: files and REPL lines.
//!
//! Atoms are classified into numbers, strings, parameters, and variables.
//! A bare `!` or `?` at the top level is a mode switch consumed by the
//! REPL/loader; inside a list the same characters are ordinary parameters.

use crate::expr::{Expr, Num};
use std::ops::Range;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    OpenParen,
    CloseParen,
    Atom,
    StringLit,
    ModeSwitch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Range<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Assert,
    Query,
}

/// One top-level form of a program or input line.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Switch(Mode),
    Expr(Expr),
}

#[derive(Debug, Error, PartialEq)]
pub enum ReadError {
    #[error("unterminated string literal starting at byte {0}")]
    UnterminatedString(usize),
    #[error("unbalanced `)` at byte {0}")]
    UnbalancedClose(usize),
    #[error("unclosed `(` opened at byte {0}")]
    UnclosedOpen(usize),
}

fn is_atom_char(c: char) -> bool {
    !c.is_whitespace() && c != '(' && c != ')' && c != ';' && c != '\''
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, ReadError> {
    let mut tokens = Vec::new();
    let mut chars = source.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == ';' {
            // comment to end of line
            while let Some(&(_, c2)) = chars.peek() {
                chars.next();
                if c2 == '\n' {
                    break;
                }
            }
        } else if c == '(' {
            chars.next();
            tokens.push(Token {
                kind: TokenKind::OpenParen,
                text: "(".into(),
                span: pos..pos + 1,
            });
        } else if c == ')' {
            chars.next();
            tokens.push(Token {
                kind: TokenKind::CloseParen,
                text: ")".into(),
                span: pos..pos + 1,
            });
        } else if c == '\'' {
            chars.next();
            let mut end = None;
            for (p2, c2) in chars.by_ref() {
                if c2 == '\'' {
                    end = Some(p2 + c2.len_utf8());
                    break;
                }
            }
            match end {
                Some(end) => tokens.push(Token {
                    kind: TokenKind::StringLit,
                    text: source[pos..end].to_string(),
                    span: pos..end,
                }),
                None => return Err(ReadError::UnterminatedString(pos)),
            }
        } else {
            let start = pos;
            let mut end = pos;
            while let Some(&(p2, c2)) = chars.peek() {
                if is_atom_char(c2) {
                    end = p2 + c2.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let text = &source[start..end];
            let kind = if text == "!" || text == "?" {
                TokenKind::ModeSwitch
            } else {
                TokenKind::Atom
            };
            tokens.push(Token {
                kind,
                text: text.to_string(),
                span: start..end,
            });
        }
    }
    Ok(tokens)
}

/// Classify one atom's characters into a constant, parameter, or variable.
pub fn classify_atom(text: &str) -> Expr {
    if text.starts_with('\'') && text.ends_with('\'') && text.len() >= 2 {
        return Expr::Text(text[1..text.len() - 1].to_string());
    }
    if let Some(num) = parse_number(text) {
        return Expr::Num(num);
    }
    // A lone `*` is the multiplication operator, not a variable.
    if text.starts_with('*') && text.len() > 1 {
        Expr::Var(text.to_string())
    } else {
        Expr::Param(text.to_string())
    }
}

fn parse_number(text: &str) -> Option<Num> {
    if let Ok(i) = text.parse::<i64>() {
        return Some(Num::Int(i));
    }
    // Restrict float syntax so atoms like `-`, `inf`, or `1..2` stay symbols.
    let mut has_digit = false;
    for (i, c) in text.chars().enumerate() {
        match c {
            '0'..='9' => has_digit = true,
            '.' | 'e' | 'E' => {}
            '+' | '-' if i == 0 || text.as_bytes()[i - 1].eq_ignore_ascii_case(&b'e') => {}
            _ => return None,
        }
    }
    if !has_digit {
        return None;
    }
    text.parse::<f64>().ok().filter(|f| f.is_finite()).map(Num::Float)
}

pub fn parse(tokens: &[Token]) -> Result<Vec<Form>, ReadError> {
    let mut forms = Vec::new();
    let mut idx = 0;
    while idx < tokens.len() {
        let tok = &tokens[idx];
        match tok.kind {
            TokenKind::ModeSwitch => {
                let mode = if tok.text == "!" { Mode::Assert } else { Mode::Query };
                forms.push(Form::Switch(mode));
                idx += 1;
            }
            TokenKind::CloseParen => return Err(ReadError::UnbalancedClose(tok.span.start)),
            _ => {
                let (expr, next) = parse_expr(tokens, idx)?;
                forms.push(Form::Expr(expr));
                idx = next;
            }
        }
    }
    Ok(forms)
}

fn parse_expr(tokens: &[Token], idx: usize) -> Result<(Expr, usize), ReadError> {
    let tok = &tokens[idx];
    match tok.kind {
        TokenKind::Atom | TokenKind::StringLit => Ok((classify_atom(&tok.text), idx + 1)),
        // inside a list `!`/`?` are ordinary parameters
        TokenKind::ModeSwitch => Ok((Expr::Param(tok.text.clone()), idx + 1)),
        TokenKind::OpenParen => {
            let open_at = tok.span.start;
            let mut items = Vec::new();
            let mut i = idx + 1;
            loop {
                match tokens.get(i) {
                    None => return Err(ReadError::UnclosedOpen(open_at)),
                    Some(t) if t.kind == TokenKind::CloseParen => return Ok((Expr::List(items), i + 1)),
                    Some(_) => {
                        let (e, next) = parse_expr(tokens, i)?;
                        items.push(e);
                        i = next;
                    }
                }
            }
        }
        TokenKind::CloseParen => Err(ReadError::UnbalancedClose(tok.span.start)),
    }
}

/// Tokenize and parse a whole source text.
pub fn read_forms(source: &str) -> Result<Vec<Form>, ReadError> {
    parse(&tokenize(source)?)
}

/// Parse a source text expected to contain exactly one expression.
pub fn read_one(source: &str) -> Result<Expr, ReadError> {
    let forms = read_forms(source)?;
    match forms.into_iter().next() {
        Some(Form::Expr(e)) => Ok(e),
        _ => Err(ReadError::UnclosedOpen(0)),
    }
}
