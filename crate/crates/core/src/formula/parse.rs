//! Reader for the `.gxw` surface syntax.
//!
//! ```text
//! input a, b;  output x;
//! let edge = !a & X a;
//! assume !(a & b);
//! S1: G(edge -> X(x W b));
//! ```

use std::collections::HashMap;
use std::fmt;

use super::ast::{Formula, Io};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Input,
    Output,
    Let,
    Assume,
    True,
    False,
    G,
    X,
    W,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Eq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Input => "`input`",
            Tok::Output => "`output`",
            Tok::Let => "`let`",
            Tok::Assume => "`assume`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::G => "`G`",
            Tok::X => "`X`",
            Tok::W => "`W`",
            Tok::Not => "`!`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Implies => "`->`",
            Tok::Iff => "`<->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Colon => "`:`",
            Tok::Eq => "`=`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, message: String| ParseError { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l0, c0) = (line, col);
        let mut push = |tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: l0,
                col: c0,
            });
            *i += len;
            *col += len;
        };
        match c {
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '!' => push(Tok::Not, 1, &mut i, &mut col),
            '&' => push(Tok::And, 1, &mut i, &mut col),
            '|' => push(Tok::Or, 1, &mut i, &mut col),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut i, &mut col),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::Iff, 3, &mut i, &mut col)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = match word.as_str() {
                    "input" => Tok::Input,
                    "output" => Tok::Output,
                    "let" => Tok::Let,
                    "assume" => Tok::Assume,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "G" => Tok::G,
                    "X" => Tok::X,
                    "W" => Tok::W,
                    "U" | "F" | "R" => {
                        return Err(err(
                            l0,
                            c0,
                            format!(
                                "unsupported temporal operator `{word}`: only G, X and W are allowed"
                            ),
                        ))
                    }
                    _ => Tok::Ident(word),
                };
                out.push(Spanned {
                    tok,
                    line: l0,
                    col: c0,
                });
            }
            other => return Err(err(l0, c0, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// One item of a `.gxw` file after macro expansion.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Assume(Formula),
    Formula { label: Option<String>, formula: Formula },
}

/// The raw content of a `.gxw` file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpecFile {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub items: Vec<Item>,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    vars: HashMap<String, Io>,
    macros: HashMap<String, Formula>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.error(format!("expected identifier, found {t}"))),
        }
    }

    fn declare(&mut self, name: String, io: Io) -> Result<(), ParseError> {
        if self.vars.contains_key(&name) || self.macros.contains_key(&name) {
            return Err(self.error(format!("`{name}` declared twice")));
        }
        self.vars.insert(name, io);
        Ok(())
    }

    fn file(&mut self) -> Result<SpecFile, ParseError> {
        let mut spec = SpecFile::default();
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Input | Tok::Output => {
                    let io = if *self.peek() == Tok::Input {
                        Io::Input
                    } else {
                        Io::Output
                    };
                    self.bump();
                    loop {
                        let name = self.ident()?;
                        self.declare(name.clone(), io)?;
                        match io {
                            Io::Input => spec.inputs.push(name),
                            Io::Output => spec.outputs.push(name),
                        }
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::Semi)?;
                }
                Tok::Let => {
                    self.bump();
                    let name = self.ident()?;
                    if self.vars.contains_key(&name) || self.macros.contains_key(&name) {
                        return Err(self.error(format!("`{name}` declared twice")));
                    }
                    self.expect(Tok::Eq)?;
                    let body = self.expr()?;
                    self.expect(Tok::Semi)?;
                    self.macros.insert(name, body);
                }
                Tok::Assume => {
                    self.bump();
                    let body = self.expr()?;
                    self.expect(Tok::Semi)?;
                    spec.items.push(Item::Assume(body));
                }
                _ => {
                    let label = if matches!(self.peek(), Tok::Ident(_)) && *self.peek2() == Tok::Colon {
                        let l = self.ident()?;
                        self.bump();
                        Some(l)
                    } else {
                        None
                    };
                    let formula = self.expr()?;
                    self.expect(Tok::Semi)?;
                    spec.items.push(Item::Formula { label, formula });
                }
            }
        }
        Ok(spec)
    }

    fn expr(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::G {
            self.bump();
            return Ok(Formula::globally(self.expr()?));
        }
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.until()?;
        match self.peek() {
            Tok::Implies => {
                self.bump();
                Ok(Formula::implies(lhs, self.expr()?))
            }
            Tok::Iff => {
                self.bump();
                Ok(Formula::iff(lhs, self.expr()?))
            }
            _ => Ok(lhs),
        }
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::W {
            self.bump();
            let rhs = if *self.peek() == Tok::G {
                self.expr()?
            } else {
                self.until()?
            };
            return Ok(Formula::weak_until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::X => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Tok::G => {
                self.bump();
                Ok(Formula::globally(self.expr()?))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(io) = self.vars.get(&name) {
                    let io = *io;
                    self.bump();
                    Ok(Formula::Var { name, io })
                } else if let Some(body) = self.macros.get(&name) {
                    let body = body.clone();
                    self.bump();
                    Ok(body)
                } else {
                    Err(self.error(format!("undeclared identifier `{name}`")))
                }
            }
            t => Err(self.error(format!("expected a formula, found {t}"))),
        }
    }
}

/// Parses a `.gxw` file, expanding `let` macros.
pub fn parse_file(src: &str) -> Result<SpecFile, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        vars: HashMap::new(),
        macros: HashMap::new(),
    };
    p.file()
}

/// Parses one formula against given declarations.
pub fn parse_formula(src: &str, inputs: &[&str], outputs: &[&str]) -> Result<Formula, ParseError> {
    let mut vars = HashMap::new();
    for v in inputs {
        vars.insert(v.to_string(), Io::Input);
    }
    for v in outputs {
        vars.insert(v.to_string(), Io::Output);
    }
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        vars,
        macros: HashMap::new(),
    };
    let f = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("trailing input at {}", p.peek())));
    }
    Ok(f)
}
