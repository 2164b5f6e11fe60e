//! Finite presentations and the `.fp` text format.
//!
//! The accepted grammar is the group-presentation fragment of Magma:
//!
//! ```text
//! [Name := Group] < a, b, ... | rel, rel, ... > [;]
//! rel    := factor ( "*" factor )*
//! factor := atom [ "^" exp ]
//! atom   := name | "(" rel ")"
//! exp    := int | "{" int "}"
//! ```
//!
//! Whitespace and newlines are insignificant.

use std::collections::HashMap;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::word::{Letter, Word};

/// Largest exponent magnitude accepted by the parser.
pub const DEFAULT_EXPONENT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("relator {index} uses a letter outside the {ngens} generators")]
    LetterOutOfRange { index: usize, ngens: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownGenerator(String),
    MalformedExponent(String),
    Unbalanced(char),
    DuplicateGenerator(String),
    Unexpected { found: String, expected: &'static str },
    UnexpectedEnd { expected: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnknownGenerator(n) => write!(f, "unknown generator `{n}`"),
            ParseErrorKind::MalformedExponent(s) => write!(f, "malformed exponent `{s}`"),
            ParseErrorKind::Unbalanced(c) => write!(f, "unbalanced `{c}`"),
            ParseErrorKind::DuplicateGenerator(n) => write!(f, "duplicate generator `{n}`"),
            ParseErrorKind::Unexpected { found, expected } => {
                write!(f, "expected {expected}, found `{found}`")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "expected {expected}, found end of input")
            }
        }
    }
}

/// Generator names plus relators over the alphabet `1..=names.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<Word>,
}

pub fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Presentation {
    pub fn new(names: Vec<String>, relators: Vec<Word>) -> Result<Self, PresentationError> {
        let mut seen = HashMap::new();
        for name in &names {
            if !is_valid_name(name) {
                return Err(PresentationError::InvalidName(name.clone()));
            }
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(PresentationError::DuplicateGenerator(name.clone()));
            }
        }
        let ngens = names.len();
        for (index, r) in relators.iter().enumerate() {
            if r.check_alphabet(ngens).is_err() {
                return Err(PresentationError::LetterOutOfRange { index, ngens });
            }
        }
        let relators = relators.into_iter().filter(|r| !r.is_identity()).collect();
        Ok(Presentation { names, relators })
    }

    /// Presentation with generators `a, b, c, ...` (or `x1, x2, ...` past 26).
    pub fn with_default_names(ngens: usize, relators: Vec<Word>) -> Result<Self, PresentationError> {
        Presentation::new(default_names(ngens), relators)
    }

    pub fn free(ngens: usize) -> Self {
        Presentation::with_default_names(ngens, Vec::new()).expect("default names are valid")
    }

    pub fn ngens(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<Word>) {
        (self.names, self.relators)
    }

    /// Sum of relator lengths.
    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    pub fn format_word(&self, w: &Word) -> String {
        format_word(&self.names, w)
    }

    /// SHA-256 of the printed form.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(print_presentation(self).as_bytes()))
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn format_word(names: &[String], w: &Word) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    let letters = w.letters();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut run = 1;
        while i + run < letters.len() && letters[i + run] == l {
            run += 1;
        }
        let name = &names[l.generator()];
        let e = if l.is_inverse() { -(run as i64) } else { run as i64 };
        parts.push(if e == 1 { name.clone() } else { format!("{name}^{e}") });
        i += run;
    }
    parts.join("*")
}

/// Print in the same grammar the parser accepts.
pub fn print_presentation(p: &Presentation) -> String {
    let rels: Vec<String> = p.relators.iter().map(|r| format_word(&p.names, r)).collect();
    if rels.is_empty() {
        format!("< {} | >", p.names.join(", "))
    } else {
        format!("< {} | {} >", p.names.join(", "), rels.join(", "))
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_presentation(self))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    Assign,
    Lt,
    Gt,
    Bar,
    Comma,
    Star,
    Caret,
    Minus,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Int(s) => s.clone(),
            Tok::Assign => ":=".into(),
            Tok::Lt => "<".into(),
            Tok::Gt => ">".into(),
            Tok::Bar => "|".into(),
            Tok::Comma => ",".into(),
            Tok::Star => "*".into(),
            Tok::Caret => "^".into(),
            Tok::Minus => "-".into(),
            Tok::LBrace => "{".into(),
            Tok::RBrace => "}".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Semi => ";".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        let single = |tok| Spanned { tok, line: l0, column: c0 };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(single(Tok::Ident(s)));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(single(Tok::Int(s)));
            continue;
        }
        let tok = match c {
            ':' if chars.get(i + 1) == Some(&'=') => {
                i += 1;
                column += 1;
                Tok::Assign
            }
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '|' => Tok::Bar,
            ',' => Tok::Comma,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '-' => Tok::Minus,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ';' => Tok::Semi,
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::Unexpected {
                        found: other.to_string(),
                        expected: "a presentation token",
                    },
                    line: l0,
                    column: c0,
                })
            }
        };
        i += 1;
        column += 1;
        out.push(single(tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
    gens: HashMap<String, usize>,
    exponent_cap: u64,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.end)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.here();
        ParseError { kind, line, column }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(ParseErrorKind::Unexpected {
                found: t.text(),
                expected,
            }),
            None => self.error(ParseErrorKind::UnexpectedEnd { expected }),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn presentation(&mut self) -> Result<Presentation, ParseError> {
        // Optional `Name := Group` prefix.
        if let (Some(Tok::Ident(_)), Some(Tok::Assign)) =
            (self.toks.get(self.pos).map(|s| &s.tok), self.toks.get(self.pos + 1).map(|s| &s.tok))
        {
            self.pos += 2;
            match self.peek() {
                Some(Tok::Ident(s)) if s == "Group" => self.pos += 1,
                _ => return Err(self.unexpected("`Group`")),
            }
        }
        self.expect(Tok::Lt, "`<`")?;
        let mut names = Vec::new();
        if !matches!(self.peek(), Some(Tok::Bar) | Some(Tok::Gt)) {
            loop {
                match self.peek().cloned() {
                    Some(Tok::Ident(name)) => {
                        if self.gens.contains_key(&name) {
                            return Err(self.error(ParseErrorKind::DuplicateGenerator(name)));
                        }
                        self.gens.insert(name.clone(), names.len());
                        names.push(name);
                        self.pos += 1;
                    }
                    _ => return Err(self.unexpected("a generator name")),
                }
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        let mut relators = Vec::new();
        match self.peek() {
            Some(Tok::Bar) => {
                self.pos += 1;
                if self.peek() != Some(&Tok::Gt) {
                    loop {
                        relators.push(self.word()?);
                        if self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
            }
            Some(Tok::Gt) => {}
            None => return Err(self.error(ParseErrorKind::Unbalanced('<'))),
            _ => return Err(self.unexpected("`|` or `>`")),
        }
        match self.peek() {
            Some(Tok::Gt) => self.pos += 1,
            None => return Err(self.error(ParseErrorKind::Unbalanced('<'))),
            _ => return Err(self.unexpected("`,` or `>`")),
        }
        if self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
        }
        if self.peek().is_some() {
            return Err(self.unexpected("end of input"));
        }
        Ok(Presentation::new(names, relators).expect("parser validates names and letters"))
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        let mut w = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let f = self.factor()?;
            w = w.concat(&f);
        }
        Ok(w)
    }

    fn factor(&mut self) -> Result<Word, ParseError> {
        let base = match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                let Some(&g) = self.gens.get(&name) else {
                    return Err(self.error(ParseErrorKind::UnknownGenerator(name)));
                };
                self.pos += 1;
                Word::from_letter(Letter::gen(g))
            }
            Some(Tok::Int(s)) if s == "1" => {
                self.pos += 1;
                Word::identity()
            }
            Some(Tok::LParen) => {
                let open = self.here();
                self.pos += 1;
                let w = self.word()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(ParseError {
                        kind: ParseErrorKind::Unbalanced('('),
                        line: open.0,
                        column: open.1,
                    });
                }
                self.pos += 1;
                w
            }
            _ => return Err(self.unexpected("a generator")),
        };
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let e = self.exponent()?;
        Ok(base.pow(e))
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let braced = self.peek() == Some(&Tok::LBrace);
        let open = self.here();
        if braced {
            self.pos += 1;
        }
        let start = self.here();
        let negative = self.peek() == Some(&Tok::Minus);
        if negative {
            self.pos += 1;
        }
        let digits = match self.peek().cloned() {
            Some(Tok::Int(s)) => {
                self.pos += 1;
                s
            }
            Some(t) => {
                return Err(ParseError {
                    kind: ParseErrorKind::MalformedExponent(t.text()),
                    line: start.0,
                    column: start.1,
                })
            }
            None => return Err(self.error(ParseErrorKind::UnexpectedEnd { expected: "an exponent" })),
        };
        let magnitude = digits
            .parse::<u64>()
            .ok()
            .filter(|&m| m <= self.exponent_cap)
            .ok_or_else(|| ParseError {
                kind: ParseErrorKind::MalformedExponent(digits.clone()),
                line: start.0,
                column: start.1,
            })?;
        if braced {
            if self.peek() != Some(&Tok::RBrace) {
                return Err(ParseError {
                    kind: ParseErrorKind::Unbalanced('{'),
                    line: open.0,
                    column: open.1,
                });
            }
            self.pos += 1;
        }
        let m = magnitude as i64;
        Ok(if negative { -m } else { m })
    }
}

/// Parse a presentation with the default exponent cap.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    parse_presentation_with_cap(text, DEFAULT_EXPONENT_CAP)
}

pub fn parse_presentation_with_cap(text: &str, exponent_cap: u64) -> Result<Presentation, ParseError> {
    let toks = lex(text)?;
    let lines: Vec<&str> = text.split('\n').collect();
    let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
    let mut p = Parser {
        toks,
        pos: 0,
        end,
        gens: HashMap::new(),
        exponent_cap,
    };
    p.presentation()
}
