//! Readers and writers for the s-expression document formats.

use std::collections::BTreeMap;

use sense_bridge_core::kb::KbError;
use sense_bridge_core::sexpr::{read_all, Pos, ReadError, Sexp};

mod corpus;
mod gold;
mod kb;
mod script;

pub use corpus::parse_corpus;
pub use gold::{parse_frame_predictions, parse_gold};
pub use kb::{dump_kb, parse_kb, parse_kb_unchecked};
pub use script::parse_script;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {}, column {}: {message}", .pos.line, .pos.column)]
    Syntax { pos: Pos, message: String },
    #[error(transparent)]
    Kb(#[from] KbError),
}

impl From<ReadError> for FormatError {
    fn from(e: ReadError) -> Self {
        FormatError::Syntax { pos: e.pos(), message: e.to_string() }
    }
}

pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { pos, message: message.into() }
}

/// Split a top-level record into its head symbol and the remaining items.
pub(crate) fn head(form: &Sexp) -> Result<(&str, &[Sexp]), FormatError> {
    let items = form.as_list().ok_or_else(|| syntax(form.pos(), format!("expected a list, found {}", form.kind())))?;
    let (first, rest) = items.split_first().ok_or_else(|| syntax(form.pos(), "empty record"))?;
    let name = first.as_symbol().ok_or_else(|| syntax(first.pos(), "record must start with a symbol"))?;
    Ok((name, rest))
}

pub(crate) fn read_forms(src: &str) -> Result<Vec<Sexp>, FormatError> {
    Ok(read_all(src)?)
}

pub(crate) fn symbol<'a>(item: Option<&'a Sexp>, at: Pos, what: &str) -> Result<&'a str, FormatError> {
    match item {
        Some(s) => s.as_symbol().ok_or_else(|| syntax(s.pos(), format!("{what} must be a symbol"))),
        None => Err(syntax(at, format!("missing {what}"))),
    }
}

pub(crate) fn string<'a>(item: Option<&'a Sexp>, at: Pos, what: &str) -> Result<&'a str, FormatError> {
    match item {
        Some(s) => s.as_str().ok_or_else(|| syntax(s.pos(), format!("{what} must be a quoted string"))),
        None => Err(syntax(at, format!("missing {what}"))),
    }
}

pub(crate) fn integer<T: std::str::FromStr>(item: Option<&Sexp>, at: Pos, what: &str) -> Result<T, FormatError> {
    let s = symbol(item, at, what)?;
    s.parse().map_err(|_| syntax(item.map_or(at, Sexp::pos), format!("{what} must be a non-negative integer")))
}

/// `:key value` pairs following the positional items of a record.
pub(crate) struct Keywords<'a> {
    values: BTreeMap<&'a str, &'a Sexp>,
    at: Pos,
}

impl<'a> Keywords<'a> {
    pub(crate) fn parse(items: &'a [Sexp], at: Pos, allowed: &[&str]) -> Result<Self, FormatError> {
        if !items.len().is_multiple_of(2) {
            let last = &items[items.len() - 1];
            return Err(syntax(last.pos(), "keyword without a value"));
        }
        let mut values = BTreeMap::new();
        for pair in items.chunks(2) {
            let key = pair[0]
                .as_symbol()
                .and_then(|s| s.strip_prefix(':'))
                .ok_or_else(|| syntax(pair[0].pos(), "expected a :keyword"))?;
            if !allowed.contains(&key) {
                return Err(syntax(pair[0].pos(), format!("unknown keyword :{key}")));
            }
            if values.insert(key, &pair[1]).is_some() {
                return Err(syntax(pair[0].pos(), format!("keyword :{key} given twice")));
            }
        }
        Ok(Keywords { values, at })
    }

    pub(crate) fn get(&self, key: &str) -> Option<&'a Sexp> {
        self.values.get(key).copied()
    }

    pub(crate) fn require(&self, key: &str) -> Result<&'a Sexp, FormatError> {
        self.get(key).ok_or_else(|| syntax(self.at, format!("missing :{key}")))
    }

    pub(crate) fn list(&self, key: &str) -> Result<Option<&'a [Sexp]>, FormatError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.as_list().map(Some).ok_or_else(|| syntax(v.pos(), format!(":{key} must be a list"))),
        }
    }
}
