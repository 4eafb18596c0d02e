//! A small s-expression reader.
//!
//! Used by the logical-form parser in [`crate::logic`] and by every document
//! format the companion crate loads (knowledge base, corpus, gold files).
//! Supports lists, bare symbols, double-quoted strings with `\"` and `\\`
//! escapes, and `;` line comments.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Position of a token in the source text. Lines and columns are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub offset: usize,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    List(Vec<Sexp>, Pos),
    Symbol(String, Pos),
    Str(String, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::List(_, p) | Sexp::Symbol(_, p) | Sexp::Str(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Sexp::Str(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }

    /// Short description of the node kind, for error messages.
    pub fn kind(&self) -> &'static str {
        match self {
            Sexp::List(..) => "list",
            Sexp::Symbol(..) => "symbol",
            Sexp::Str(..) => "string",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReadError {
    #[error("unexpected end of input at {0}")]
    UnexpectedEof(Pos),
    #[error("unexpected ')' at {0}")]
    UnexpectedClose(Pos),
    #[error("unterminated string starting at {0}")]
    UnterminatedString(Pos),
    #[error("invalid escape '\\{1}' at {0}")]
    BadEscape(Pos, char),
    #[error("expected a single form, found trailing input at {0}")]
    Trailing(Pos),
}

impl ReadError {
    pub fn pos(&self) -> Pos {
        match self {
            ReadError::UnexpectedEof(p)
            | ReadError::UnexpectedClose(p)
            | ReadError::UnterminatedString(p)
            | ReadError::BadEscape(p, _)
            | ReadError::Trailing(p) => *p,
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    offset: usize,
    line: u32,
    column: u32,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Reader { src, offset: 0, line: 1, column: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { offset: self.offset, line: self.line, column: self.column }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, ReadError> {
        self.skip_trivia();
        let start = self.pos();
        match self.peek() {
            None => Ok(None),
            Some(')') => Err(ReadError::UnexpectedClose(start)),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(ReadError::UnexpectedEof(self.pos())),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List(items, start)));
                        }
                        Some(_) => {
                            // read() only yields None at end of input, handled above
                            if let Some(item) = self.read()? {
                                items.push(item);
                            }
                        }
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut text = String::new();
                loop {
                    match self.bump() {
                        None => return Err(ReadError::UnterminatedString(start)),
                        Some('"') => return Ok(Some(Sexp::Str(text, start))),
                        Some('\\') => {
                            let at = self.pos();
                            match self.bump() {
                                Some('"') => text.push('"'),
                                Some('\\') => text.push('\\'),
                                Some('n') => text.push('\n'),
                                Some(other) => return Err(ReadError::BadEscape(at, other)),
                                None => return Err(ReadError::UnterminatedString(start)),
                            }
                        }
                        Some(c) => text.push(c),
                    }
                }
            }
            Some(_) => {
                let begin = self.offset;
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';') {
                        break;
                    }
                    self.bump();
                }
                Ok(Some(Sexp::Symbol(String::from(&self.src[begin..self.offset]), start)))
            }
        }
    }
}

/// Read every top-level form in `src`.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, ReadError> {
    let mut reader = Reader::new(src);
    let mut out = Vec::new();
    while let Some(form) = reader.read()? {
        out.push(form);
    }
    Ok(out)
}

/// Read exactly one form; anything but trivia after it is an error.
pub fn read_one(src: &str) -> Result<Sexp, ReadError> {
    let mut reader = Reader::new(src);
    let form = reader.read()?.ok_or(ReadError::UnexpectedEof(reader.pos()))?;
    reader.skip_trivia();
    if reader.peek().is_some() {
        return Err(ReadError::Trailing(reader.pos()));
    }
    Ok(form)
}

/// Quote `s` as a string literal readable by this module.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
