//! Logical forms: discourse variables, ground atoms and conjunctive
//! candidate meanings, with a byte-exact s-expression rendering.
//!
//! Rendering rules: a one-atom form prints as the bare atom, longer forms as
//! `(and <atom> ...)`, tokens separated by single spaces. A discourse
//! variable prints as its lemma immediately followed by its index
//! (`traffic-light38442`).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::kb::{KnowledgeBase, PredicateDef, Role, SenseTemplate, SlotArg};
use crate::sexpr::{self, Pos, ReadError, Sexp};

/// A per-analysis discourse identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiscourseVar {
    lemma: String,
    index: u64,
}

impl DiscourseVar {
    /// `None` when the index is zero or the lemma would not survive a
    /// render/parse round trip (empty, or ending in a digit).
    pub fn new(lemma: &str, index: u64) -> Option<Self> {
        let ok = index > 0
            && !lemma.is_empty()
            && !lemma.ends_with(|c: char| c.is_ascii_digit())
            && !lemma.contains(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';'));
        ok.then(|| DiscourseVar { lemma: String::from(lemma), index })
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Split a rendered name at its maximal trailing digit run.
    pub fn parse_name(name: &str) -> Option<Self> {
        let split = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (lemma, digits) = name.split_at(split);
        if digits.is_empty() || digits.starts_with('0') {
            return None;
        }
        let index = digits.parse().ok()?;
        DiscourseVar::new(lemma, index)
    }
}

impl fmt::Display for DiscourseVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.lemma, self.index)
    }
}

impl Serialize for DiscourseVar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(DiscourseVar),
    Concept(String),
    /// Predicate used as an argument, as in
    /// `(relationInstanceExists infoTransferred turn38450 Document)`.
    Predicate(String),
}

impl Term {
    pub fn as_var(&self) -> Option<&DiscourseVar> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => v.fmt(f),
            Term::Concept(c) | Term::Predicate(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    predicate: String,
    args: Vec<Term>,
}

impl Atom {
    /// Build an atom, rejecting argument lists that do not match the
    /// predicate's arity.
    pub fn new(def: &PredicateDef, args: Vec<Term>) -> Result<Self, LogicError> {
        if def.arity != args.len() {
            return Err(LogicError::Arity { predicate: def.name.clone(), expected: def.arity, found: args.len() });
        }
        Ok(Atom { predicate: def.name.clone(), args })
    }

    /// Build an atom without a predicate definition to check against.
    pub fn untyped(predicate: &str, args: Vec<Term>) -> Self {
        Atom { predicate: String::from(predicate), args }
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A conjunction of ground atoms whose first atom is
/// `(isa <head> <Concept>)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogicalForm {
    atoms: Vec<Atom>,
}

impl LogicalForm {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, LogicError> {
        let first = atoms.first().ok_or(LogicError::Shape("empty conjunction"))?;
        if first.predicate != "isa" || first.args.len() != 2 {
            return Err(LogicError::Shape("first atom must be (isa <var> <Concept>)"));
        }
        if first.args[0].as_var().is_none() {
            return Err(LogicError::Shape("first isa argument must be a discourse variable"));
        }
        if !matches!(first.args[1], Term::Concept(_)) {
            return Err(LogicError::Shape("second isa argument must be a concept"));
        }
        Ok(LogicalForm { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Variable standing for the ambiguous word.
    pub fn head_var(&self) -> &DiscourseVar {
        match &self.atoms[0].args[0] {
            Term::Var(v) => v,
            _ => unreachable!("checked in LogicalForm::new"),
        }
    }

    pub fn head_concept(&self) -> &str {
        match &self.atoms[0].args[1] {
            Term::Concept(c) => c,
            _ => unreachable!("checked in LogicalForm::new"),
        }
    }
}

impl fmt::Display for LogicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [only] = self.atoms.as_slice() {
            return only.fmt(f);
        }
        f.write_str("(and")?;
        for a in &self.atoms {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// One reading of an ambiguous word: the instantiated logical form plus the
/// sense and frame it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateMeaning {
    pub sense_id: String,
    pub frame: Option<String>,
    pub form: LogicalForm,
}

impl CandidateMeaning {
    pub fn head_var(&self) -> &DiscourseVar {
        self.form.head_var()
    }

    pub fn head_concept(&self) -> &str {
        self.form.head_concept()
    }

    pub fn atoms(&self) -> &[Atom] {
        self.form.atoms()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("no binding for role {0}")]
    MissingBinding(Role),
    #[error("'{predicate}' takes {expected} arguments, found {found}")]
    Arity { predicate: String, expected: usize, found: usize },
    #[error("unknown predicate '{0}'")]
    UnknownPredicate(String),
    #[error("unknown constant '{0}'")]
    UnknownConstant(String),
    #[error("cannot name a discourse variable after '{0}'")]
    BadVariable(String),
    #[error("malformed logical form: {0}")]
    Shape(&'static str),
    #[error("parse error: {0}")]
    Read(#[from] ReadError),
    #[error("parse error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
}

/// Per-sentence discourse-variable allocator.
///
/// Indices come from a monotonic counter. A lemma may have one pinned index,
/// used by the first variable allocated for it; counter values that would
/// repeat a name already handed out are skipped.
#[derive(Debug, Clone)]
pub struct IdGen {
    next: u64,
    pinned: BTreeMap<String, u64>,
    used: BTreeSet<(String, u64)>,
}

impl Default for IdGen {
    fn default() -> Self {
        IdGen::starting_at(1)
    }
}

impl IdGen {
    pub fn starting_at(start: u64) -> Self {
        IdGen { next: start.max(1), pinned: BTreeMap::new(), used: BTreeSet::new() }
    }

    pub fn with_pinned(mut self, pinned: impl IntoIterator<Item = (String, u64)>) -> Self {
        self.pinned.extend(pinned);
        self
    }

    pub fn fresh(&mut self, lemma: &str) -> Result<DiscourseVar, LogicError> {
        if let Some(index) = self.pinned.remove(lemma) {
            if self.used.insert((String::from(lemma), index)) {
                return DiscourseVar::new(lemma, index).ok_or_else(|| LogicError::BadVariable(String::from(lemma)));
            }
        }
        loop {
            let index = self.next;
            self.next += 1;
            if self.used.insert((String::from(lemma), index)) {
                return DiscourseVar::new(lemma, index).ok_or_else(|| LogicError::BadVariable(String::from(lemma)));
            }
        }
    }
}

/// Role fillers for instantiation.
pub type Bindings = BTreeMap<Role, Term>;

/// Instantiate `template` with a fresh head variable for `EVENT`.
pub fn instantiate_sense(
    kb: &KnowledgeBase,
    template: &SenseTemplate,
    bindings: &Bindings,
    idgen: &mut IdGen,
) -> Result<CandidateMeaning, LogicError> {
    // Check bindings before consuming an index.
    if let Some(role) = template.required_roles().into_iter().find(|r| !bindings.contains_key(r)) {
        return Err(LogicError::MissingBinding(role));
    }
    let head = idgen.fresh(&template.lemma)?;
    instantiate_with_head(kb, template, head, bindings)
}

/// Instantiate `template` with `head` standing for `EVENT`. All candidates of
/// one word share the head variable this way.
pub fn instantiate_with_head(
    kb: &KnowledgeBase,
    template: &SenseTemplate,
    head: DiscourseVar,
    bindings: &Bindings,
) -> Result<CandidateMeaning, LogicError> {
    let mut atoms = Vec::with_capacity(template.atoms.len());
    for skel in &template.atoms {
        let def = kb.predicate(&skel.predicate).ok_or_else(|| LogicError::UnknownPredicate(skel.predicate.clone()))?;
        let mut args = Vec::with_capacity(skel.args.len());
        for arg in &skel.args {
            let term = match arg {
                SlotArg::Role(Role::Event) => Term::Var(head.clone()),
                SlotArg::Role(role) => bindings.get(role).cloned().ok_or(LogicError::MissingBinding(*role))?,
                SlotArg::Const(c) => constant(kb, c)?,
            };
            args.push(term);
        }
        atoms.push(Atom::new(def, args)?);
    }
    Ok(CandidateMeaning {
        sense_id: template.sense_id.clone(),
        frame: template.frame.clone(),
        form: LogicalForm::new(atoms)?,
    })
}

fn constant(kb: &KnowledgeBase, symbol: &str) -> Result<Term, LogicError> {
    if kb.concept(symbol).is_some() {
        Ok(Term::Concept(String::from(symbol)))
    } else if kb.predicate(symbol).is_some() {
        Ok(Term::Predicate(String::from(symbol)))
    } else {
        Err(LogicError::UnknownConstant(String::from(symbol)))
    }
}

pub fn render_sexpr(form: &LogicalForm) -> String {
    format!("{form}")
}

/// Parse a rendered logical form without a knowledge base.
///
/// Argument symbols with a trailing digit run are discourse variables;
/// otherwise a capitalized symbol is a concept and anything else a
/// predicate constant. Arity is not checked.
pub fn parse_sexpr(text: &str) -> Result<LogicalForm, LogicError> {
    parse_with(text, None)
}

/// Parse a rendered logical form, resolving constants and checking arity
/// against `kb`.
pub fn parse_sexpr_checked(text: &str, kb: &KnowledgeBase) -> Result<LogicalForm, LogicError> {
    parse_with(text, Some(kb))
}

fn parse_with(text: &str, kb: Option<&KnowledgeBase>) -> Result<LogicalForm, LogicError> {
    let form = sexpr::read_one(text)?;
    let items = form.as_list().ok_or_else(|| syntax(&form, "expected a list"))?;
    let is_and = items.first().and_then(Sexp::as_symbol) == Some("and");
    let atoms = if is_and {
        items[1..].iter().map(|a| parse_atom(a, kb)).collect::<Result<Vec<_>, _>>()?
    } else {
        alloc::vec![parse_atom(&form, kb)?]
    };
    LogicalForm::new(atoms)
}

fn syntax(at: &Sexp, message: &str) -> LogicError {
    LogicError::Syntax { pos: at.pos(), message: String::from(message) }
}

fn parse_atom(form: &Sexp, kb: Option<&KnowledgeBase>) -> Result<Atom, LogicError> {
    let items = form.as_list().ok_or_else(|| syntax(form, "expected an atom"))?;
    let (head, rest) = items.split_first().ok_or_else(|| syntax(form, "empty atom"))?;
    let predicate = head.as_symbol().ok_or_else(|| syntax(head, "expected a predicate name"))?;
    let mut args = Vec::with_capacity(rest.len());
    for arg in rest {
        let sym = arg.as_symbol().ok_or_else(|| syntax(arg, "expected a symbol argument"))?;
        args.push(parse_term(sym, kb)?);
    }
    match kb {
        Some(kb) => {
            let def = kb.predicate(predicate).ok_or_else(|| LogicError::UnknownPredicate(String::from(predicate)))?;
            Atom::new(def, args)
        }
        None => Ok(Atom::untyped(predicate, args)),
    }
}

fn parse_term(sym: &str, kb: Option<&KnowledgeBase>) -> Result<Term, LogicError> {
    if let Some(kb) = kb {
        if let Ok(term) = constant(kb, sym) {
            return Ok(term);
        }
        return DiscourseVar::parse_name(sym)
            .map(Term::Var)
            .ok_or_else(|| LogicError::UnknownConstant(String::from(sym)));
    }
    if sym.ends_with(|c: char| c.is_ascii_digit()) {
        return DiscourseVar::parse_name(sym).map(Term::Var).ok_or_else(|| LogicError::BadVariable(String::from(sym)));
    }
    if sym.starts_with(|c: char| c.is_uppercase()) {
        Ok(Term::Concept(String::from(sym)))
    } else {
        Ok(Term::Predicate(String::from(sym)))
    }
}
