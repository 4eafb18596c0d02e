//! Template-based rendering of logical forms as English option text.
//!
//! Each predicate may carry a template such as `{2} is acted on during
//! {1:past}`. Slots are 1-based argument positions with an optional form:
//! `base` (the default), `past` or `gloss`. `{{` and `}}` stand for literal
//! braces. Atoms whose predicate has no template are skipped, and the
//! remaining fragments of a candidate are joined with `"; "`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::kb::KnowledgeBase;
use crate::logic::{Atom, LogicalForm, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotForm {
    Base,
    Past,
    Gloss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemplateSlot {
    /// 1-based.
    pub arg_position: usize,
    pub form: SlotForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Text(String),
    Slot(TemplateSlot),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pieces: Vec<Piece>,
}

impl Template {
    pub fn slots(&self) -> impl Iterator<Item = &TemplateSlot> {
        self.pieces.iter().filter_map(|p| match p {
            Piece::Slot(s) => Some(s),
            Piece::Text(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("unclosed slot at byte {0}")]
    Unclosed(usize),
    #[error("unmatched '}}' at byte {0}")]
    StrayClose(usize),
    #[error("bad slot '{{{0}}}'")]
    BadSlot(String),
}

pub fn parse_template(src: &str) -> Result<Template, TemplateError> {
    let mut pieces = Vec::new();
    let mut text = String::new();
    let mut chars = src.char_indices().peekable();
    while let Some((at, c)) = chars.next() {
        match c {
            '{' if chars.peek().map(|&(_, n)| n) == Some('{') => {
                chars.next();
                text.push('{');
            }
            '}' if chars.peek().map(|&(_, n)| n) == Some('}') => {
                chars.next();
                text.push('}');
            }
            '}' => return Err(TemplateError::StrayClose(at)),
            '{' => {
                let mut body = String::new();
                loop {
                    match chars.next() {
                        Some((_, '}')) => break,
                        Some((_, ch)) => body.push(ch),
                        None => return Err(TemplateError::Unclosed(at)),
                    }
                }
                if !text.is_empty() {
                    pieces.push(Piece::Text(core::mem::take(&mut text)));
                }
                pieces.push(Piece::Slot(parse_slot(&body)?));
            }
            c => text.push(c),
        }
    }
    if !text.is_empty() {
        pieces.push(Piece::Text(text));
    }
    Ok(Template { pieces })
}

fn parse_slot(body: &str) -> Result<TemplateSlot, TemplateError> {
    let bad = || TemplateError::BadSlot(String::from(body));
    let (num, form) = match body.split_once(':') {
        Some((n, f)) => (n, f),
        None => (body, "base"),
    };
    let arg_position: usize = num.parse().map_err(|_| bad())?;
    if arg_position == 0 {
        return Err(bad());
    }
    let form = match form {
        "base" => SlotForm::Base,
        "past" => SlotForm::Past,
        "gloss" => SlotForm::Gloss,
        _ => return Err(bad()),
    };
    Ok(TemplateSlot { arg_position, form })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerbalizeError {
    #[error("template of '{predicate}' is invalid: {source}")]
    Template { predicate: String, source: TemplateError },
    #[error("template of '{predicate}': slot {slot} cannot render {term} as {form}")]
    Form { predicate: String, slot: usize, term: String, form: &'static str },
    #[error("template of '{predicate}': slot {slot} has no argument")]
    MissingArgument { predicate: String, slot: usize },
    #[error("unknown concept '{0}'")]
    UnknownConcept(String),
    #[error("no atom of {0} can be verbalized")]
    Unverbalizable(String),
}

fn form_name(form: SlotForm) -> &'static str {
    match form {
        SlotForm::Base => "base",
        SlotForm::Past => "past",
        SlotForm::Gloss => "gloss",
    }
}

fn render_term(
    kb: &KnowledgeBase,
    predicate: &str,
    slot: &TemplateSlot,
    term: &Term,
) -> Result<String, VerbalizeError> {
    let unavailable = || VerbalizeError::Form {
        predicate: String::from(predicate),
        slot: slot.arg_position,
        term: format!("{term}"),
        form: form_name(slot.form),
    };
    match (term, slot.form) {
        (Term::Var(v), SlotForm::Base) => Ok(kb.surface_of(v.lemma())),
        (Term::Var(v), SlotForm::Past) => Ok(kb.past_of(v.lemma())),
        (Term::Concept(c), SlotForm::Gloss) => {
            kb.concept(c).map(|c| c.gloss.clone()).ok_or_else(|| VerbalizeError::UnknownConcept(c.clone()))
        }
        (Term::Concept(c) | Term::Predicate(c), SlotForm::Base) => Ok(c.clone()),
        _ => Err(unavailable()),
    }
}

/// Render one atom; `None` when its predicate has no template.
pub fn verbalize_atom(kb: &KnowledgeBase, atom: &Atom) -> Result<Option<String>, VerbalizeError> {
    let Some(source) = kb.predicate(atom.predicate()).and_then(|p| p.template.as_deref()) else {
        return Ok(None);
    };
    let template = parse_template(source)
        .map_err(|source| VerbalizeError::Template { predicate: String::from(atom.predicate()), source })?;
    let mut out = String::new();
    for piece in &template.pieces {
        match piece {
            Piece::Text(t) => out.push_str(t),
            Piece::Slot(slot) => {
                let term = atom.args().get(slot.arg_position - 1).ok_or_else(|| VerbalizeError::MissingArgument {
                    predicate: String::from(atom.predicate()),
                    slot: slot.arg_position,
                })?;
                out.push_str(&render_term(kb, atom.predicate(), slot, term)?);
            }
        }
    }
    let trimmed = out.trim().trim_end_matches('.').trim_end();
    Ok(Some(String::from(trimmed)))
}

/// Verbalizable fragments in atom order, joined by `"; "`.
pub fn verbalize_candidate(kb: &KnowledgeBase, form: &LogicalForm) -> Result<String, VerbalizeError> {
    let mut fragments = Vec::new();
    for atom in form.atoms() {
        if let Some(text) = verbalize_atom(kb, atom)? {
            if !text.is_empty() {
                fragments.push(text);
            }
        }
    }
    if fragments.is_empty() {
        return Err(VerbalizeError::Unverbalizable(format!("{form}")));
    }
    Ok(fragments.join("; "))
}
