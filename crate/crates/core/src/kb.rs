//! Fixture knowledge base: ontology, predicates with verbalization templates,
//! frames, the sense lexicon and surface-form tables.
//!
//! A [`KnowledgeBase`] is assembled through [`KbBuilder`] and is immutable
//! afterwards. Cross references may be declared in any order; they are only
//! resolved when the builder is finished. [`validate_kb`] reports every
//! broken invariant as data, and [`KbBuilder::build`] refuses to produce a
//! knowledge base while error-level findings remain.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::Serialize;

use crate::verbalize::parse_template;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub id: String,
    pub gloss: String,
    pub parents: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDef {
    pub name: String,
    pub arity: usize,
    /// Verbalization template; atoms of untemplated predicates are skipped
    /// when verbalizing.
    pub template: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub id: String,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartOfSpeech {
    Verb,
    Noun,
}

impl PartOfSpeech {
    pub fn as_str(self) -> &'static str {
        match self {
            PartOfSpeech::Verb => "verb",
            PartOfSpeech::Noun => "noun",
        }
    }
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartOfSpeech {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "verb" | "v" => Ok(PartOfSpeech::Verb),
            "noun" | "n" => Ok(PartOfSpeech::Noun),
            other => Err(format!("unknown part of speech '{other}' (expected verb or noun)")),
        }
    }
}

/// Argument roles of a sense template.
///
/// `Event` is the discourse variable of the ambiguous word itself (for nouns
/// it denotes the entity). `Subj` and `Obj` are filled from the target's
/// argument links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Role {
    Event,
    Subj,
    Obj,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Event => "EVENT",
            Role::Subj => "SUBJ",
            Role::Obj => "OBJ",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Role> {
        match s {
            "EVENT" => Some(Role::Event),
            "SUBJ" => Some(Role::Subj),
            "OBJ" => Some(Role::Obj),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One argument slot of an atom skeleton: a role to bind at instantiation,
/// or a constant (concept or predicate name).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotArg {
    Role(Role),
    Const(String),
}

impl SlotArg {
    pub fn from_symbol(s: &str) -> SlotArg {
        match Role::from_symbol(s) {
            Some(role) => SlotArg::Role(role),
            None => SlotArg::Const(String::from(s)),
        }
    }
}

impl fmt::Display for SlotArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotArg::Role(r) => f.write_str(r.as_str()),
            SlotArg::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSkeleton {
    pub predicate: String,
    pub args: Vec<SlotArg>,
}

impl AtomSkeleton {
    pub fn new(predicate: &str, args: &[&str]) -> Self {
        AtomSkeleton {
            predicate: String::from(predicate),
            args: args.iter().map(|a| SlotArg::from_symbol(a)).collect(),
        }
    }

    pub fn roles(&self) -> impl Iterator<Item = Role> + '_ {
        self.args.iter().filter_map(|a| match a {
            SlotArg::Role(r) => Some(*r),
            SlotArg::Const(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseTemplate {
    pub sense_id: String,
    pub lemma: String,
    pub pos: PartOfSpeech,
    pub head_concept: String,
    /// Pre-established frame binding, if the sense has one.
    pub frame: Option<String>,
    pub atoms: Vec<AtomSkeleton>,
    /// Required concept for the filler of each constrained role.
    pub role_constraints: BTreeMap<Role, String>,
}

impl SenseTemplate {
    /// Roles other than `EVENT` that the atom skeletons mention.
    pub fn required_roles(&self) -> BTreeSet<Role> {
        self.atoms.iter().flat_map(|a| a.roles()).filter(|r| *r != Role::Event).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexeme {
    pub lemma: String,
    pub past: Option<String>,
    pub surface: Option<String>,
}

impl Lexeme {
    pub fn new(lemma: &str) -> Self {
        Lexeme { lemma: String::from(lemma), past: None, surface: None }
    }

    /// Base surface form: the declared surface, or the lemma with hyphens
    /// read as spaces.
    pub fn surface_form(&self) -> String {
        match &self.surface {
            Some(s) => s.clone(),
            None => lemma_surface(&self.lemma),
        }
    }

    /// Past form, falling back to the surface form plus "ed".
    pub fn past_form(&self) -> String {
        match &self.past {
            Some(p) => p.clone(),
            None => format!("{}ed", self.surface_form()),
        }
    }
}

/// `traffic-light` → `traffic light`.
pub fn lemma_surface(lemma: &str) -> String {
    lemma.replace('-', " ")
}

/// What kind of item a finding or duplicate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemKind {
    Concept,
    Predicate,
    Frame,
    Lexeme,
    Entity,
    Sense,
}

impl fmt::Display for ItemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ItemKind::Concept => "concept",
            ItemKind::Predicate => "predicate",
            ItemKind::Frame => "frame",
            ItemKind::Lexeme => "lexeme",
            ItemKind::Entity => "entity",
            ItemKind::Sense => "sense",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KbError {
    #[error("duplicate {kind} '{id}'{}", line_suffix(*.line))]
    Duplicate { kind: ItemKind, id: String, line: Option<u32> },
    #[error("invalid knowledge base: {}", .0.first_error().map(|f| f.to_string()).unwrap_or_default())]
    Invalid(ValidationReport),
    #[error("unknown concept '{0}'")]
    UnknownConcept(String),
}

fn line_suffix(line: Option<u32>) -> String {
    match line {
        Some(l) => format!(" at line {l}"),
        None => String::new(),
    }
}

/// Immutable, fully indexed knowledge base.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    concepts: Vec<Concept>,
    concept_index: BTreeMap<String, usize>,
    predicates: Vec<PredicateDef>,
    predicate_index: BTreeMap<String, usize>,
    frames: Vec<Frame>,
    frame_index: BTreeMap<String, usize>,
    lexemes: Vec<Lexeme>,
    lexeme_index: BTreeMap<String, usize>,
    entities: Vec<(String, String)>,
    entity_index: BTreeMap<String, usize>,
    senses: Vec<SenseTemplate>,
    sense_index: BTreeMap<String, usize>,
    by_lemma: BTreeMap<(String, PartOfSpeech), Vec<usize>>,
    lines: BTreeMap<(ItemKind, String), u32>,
}

impl KnowledgeBase {
    pub fn builder() -> KbBuilder {
        KbBuilder::default()
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concept_index.get(id).map(|&i| &self.concepts[i])
    }

    pub fn predicates(&self) -> &[PredicateDef] {
        &self.predicates
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDef> {
        self.predicate_index.get(name).map(|&i| &self.predicates[i])
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, id: &str) -> Option<&Frame> {
        self.frame_index.get(id).map(|&i| &self.frames[i])
    }

    pub fn lexemes(&self) -> &[Lexeme] {
        &self.lexemes
    }

    pub fn lexeme(&self, lemma: &str) -> Option<&Lexeme> {
        self.lexeme_index.get(lemma).map(|&i| &self.lexemes[i])
    }

    /// `(lemma, concept)` pairs of the entity-type table in declaration order.
    pub fn entities(&self) -> &[(String, String)] {
        &self.entities
    }

    /// Known concept type of a noun lemma, used for selectional filtering.
    pub fn entity_type(&self, lemma: &str) -> Option<&str> {
        self.entity_index.get(lemma).map(|&i| self.entities[i].1.as_str())
    }

    /// All senses in declaration order.
    pub fn senses(&self) -> &[SenseTemplate] {
        &self.senses
    }

    pub fn sense(&self, sense_id: &str) -> Option<&SenseTemplate> {
        self.sense_index.get(sense_id).map(|&i| &self.senses[i])
    }

    /// Declaration-ordered senses for `(lemma, pos)`; empty when unknown.
    pub fn lookup_senses(&self, lemma: &str, pos: PartOfSpeech) -> Vec<&SenseTemplate> {
        self.by_lemma
            .get(&(String::from(lemma), pos))
            .map(|ids| ids.iter().map(|&i| &self.senses[i]).collect())
            .unwrap_or_default()
    }

    pub fn has_senses(&self, lemma: &str, pos: PartOfSpeech) -> bool {
        self.by_lemma.contains_key(&(String::from(lemma), pos))
    }

    /// Source line an item was declared on, when loaded from a document.
    pub fn line_of(&self, kind: ItemKind, id: &str) -> Option<u32> {
        self.lines.get(&(kind, String::from(id))).copied()
    }

    /// True iff `ancestor` is reachable from `child` over zero or more
    /// parent links.
    pub fn is_subconcept(&self, child: &str, ancestor: &str) -> Result<bool, KbError> {
        for id in [child, ancestor] {
            if self.concept(id).is_none() {
                return Err(KbError::UnknownConcept(String::from(id)));
            }
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![child];
        while let Some(id) = stack.pop() {
            if id == ancestor {
                return Ok(true);
            }
            if !seen.insert(id) {
                continue;
            }
            if let Some(c) = self.concept(id) {
                stack.extend(c.parents.iter().map(String::as_str));
            }
        }
        Ok(false)
    }

    /// Surface form of a lemma: the lexeme's if declared, else the lemma
    /// with hyphens as spaces.
    pub fn surface_of(&self, lemma: &str) -> String {
        match self.lexeme(lemma) {
            Some(lx) => lx.surface_form(),
            None => lemma_surface(lemma),
        }
    }

    pub fn past_of(&self, lemma: &str) -> String {
        match self.lexeme(lemma) {
            Some(lx) => lx.past_form(),
            None => format!("{}ed", lemma_surface(lemma)),
        }
    }
}

/// Accumulates knowledge-base items; duplicates are rejected on insert.
#[derive(Debug, Default)]
pub struct KbBuilder {
    kb: KnowledgeBase,
    line: Option<u32>,
}

impl KbBuilder {
    /// Record `line` as the source line of the items added next.
    pub fn at_line(&mut self, line: u32) -> &mut Self {
        self.line = Some(line);
        self
    }

    fn claim(&mut self, kind: ItemKind, id: &str) -> Result<(), KbError> {
        let taken = match kind {
            ItemKind::Concept => self.kb.concept_index.contains_key(id),
            ItemKind::Predicate => self.kb.predicate_index.contains_key(id),
            ItemKind::Frame => self.kb.frame_index.contains_key(id),
            ItemKind::Lexeme => self.kb.lexeme_index.contains_key(id),
            ItemKind::Entity => self.kb.entity_index.contains_key(id),
            ItemKind::Sense => self.kb.sense_index.contains_key(id),
        };
        if taken {
            return Err(KbError::Duplicate { kind, id: String::from(id), line: self.line });
        }
        if let Some(line) = self.line {
            self.kb.lines.insert((kind, String::from(id)), line);
        }
        Ok(())
    }

    pub fn concept(&mut self, concept: Concept) -> Result<&mut Self, KbError> {
        self.claim(ItemKind::Concept, &concept.id)?;
        self.kb.concept_index.insert(concept.id.clone(), self.kb.concepts.len());
        self.kb.concepts.push(concept);
        Ok(self)
    }

    pub fn predicate(&mut self, predicate: PredicateDef) -> Result<&mut Self, KbError> {
        self.claim(ItemKind::Predicate, &predicate.name)?;
        self.kb.predicate_index.insert(predicate.name.clone(), self.kb.predicates.len());
        self.kb.predicates.push(predicate);
        Ok(self)
    }

    pub fn frame(&mut self, frame: Frame) -> Result<&mut Self, KbError> {
        self.claim(ItemKind::Frame, &frame.id)?;
        self.kb.frame_index.insert(frame.id.clone(), self.kb.frames.len());
        self.kb.frames.push(frame);
        Ok(self)
    }

    pub fn lexeme(&mut self, lexeme: Lexeme) -> Result<&mut Self, KbError> {
        self.claim(ItemKind::Lexeme, &lexeme.lemma)?;
        self.kb.lexeme_index.insert(lexeme.lemma.clone(), self.kb.lexemes.len());
        self.kb.lexemes.push(lexeme);
        Ok(self)
    }

    pub fn entity(&mut self, lemma: &str, concept: &str) -> Result<&mut Self, KbError> {
        self.claim(ItemKind::Entity, lemma)?;
        self.kb.entity_index.insert(String::from(lemma), self.kb.entities.len());
        self.kb.entities.push((String::from(lemma), String::from(concept)));
        Ok(self)
    }

    pub fn sense(&mut self, sense: SenseTemplate) -> Result<&mut Self, KbError> {
        self.claim(ItemKind::Sense, &sense.sense_id)?;
        let idx = self.kb.senses.len();
        self.kb.sense_index.insert(sense.sense_id.clone(), idx);
        self.kb.by_lemma.entry((sense.lemma.clone(), sense.pos)).or_default().push(idx);
        self.kb.senses.push(sense);
        Ok(self)
    }

    /// Finish without validating. Useful for constructing deliberately
    /// broken knowledge bases.
    pub fn build_unchecked(self) -> KnowledgeBase {
        self.kb
    }

    /// Finish, failing if [`validate_kb`] reports any error-level finding.
    pub fn build(self) -> Result<KnowledgeBase, KbError> {
        let report = validate_kb(&self.kb);
        if report.has_errors() {
            return Err(KbError::Invalid(report));
        }
        Ok(self.kb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Location {
    pub kind: ItemKind,
    pub id: String,
    pub line: Option<u32>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} '{}'", self.kind, self.id)?;
        if let Some(line) = self.line {
            write!(f, " (line {line})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FindingKind {
    /// A reference to an undeclared item.
    DanglingReference {
        target_kind: ItemKind,
        target: String,
    },
    /// Concepts that reach themselves over parent links.
    OntologyCycle {
        ids: Vec<String>,
    },
    EmptyGloss,
    ZeroArity,
    BadTemplate {
        message: String,
    },
    BadFrameId,
    BadLemma {
        message: String,
    },
    BadSenseShape {
        message: String,
    },
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    MissingPastForm,
}

impl fmt::Display for FindingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FindingKind::DanglingReference { target_kind, target } => {
                write!(f, "dangling reference to {target_kind} '{target}'")
            }
            FindingKind::OntologyCycle { ids } => write!(f, "ontology cycle through {}", ids.join(", ")),
            FindingKind::EmptyGloss => f.write_str("empty gloss"),
            FindingKind::ZeroArity => f.write_str("arity must be at least 1"),
            FindingKind::BadTemplate { message } => write!(f, "bad template: {message}"),
            FindingKind::BadFrameId => f.write_str("frame id must start with FN_"),
            FindingKind::BadLemma { message } => write!(f, "bad lemma: {message}"),
            FindingKind::BadSenseShape { message } => write!(f, "malformed sense: {message}"),
            FindingKind::ArityMismatch { predicate, expected, found } => {
                write!(f, "'{predicate}' takes {expected} arguments, found {found}")
            }
            FindingKind::MissingPastForm => f.write_str("verb lexeme without a past form"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub location: Location,
    pub finding: FindingKind,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}: {}", self.location, self.finding)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.first_error().is_some()
    }

    pub fn first_error(&self) -> Option<&Finding> {
        self.findings.iter().find(|f| f.severity == Severity::Error)
    }
}

struct Validator<'a> {
    kb: &'a KnowledgeBase,
    findings: Vec<Finding>,
}

impl Validator<'_> {
    fn push(&mut self, severity: Severity, kind: ItemKind, id: &str, finding: FindingKind) {
        let location = Location { kind, id: String::from(id), line: self.kb.line_of(kind, id) };
        self.findings.push(Finding { severity, location, finding });
    }

    fn error(&mut self, kind: ItemKind, id: &str, finding: FindingKind) {
        self.push(Severity::Error, kind, id, finding);
    }

    fn require(&mut self, kind: ItemKind, id: &str, target_kind: ItemKind, target: &str) {
        let found = match target_kind {
            ItemKind::Concept => self.kb.concept(target).is_some(),
            ItemKind::Frame => self.kb.frame(target).is_some(),
            ItemKind::Predicate => self.kb.predicate(target).is_some(),
            ItemKind::Lexeme => self.kb.lexeme(target).is_some(),
            ItemKind::Sense => self.kb.sense(target).is_some(),
            ItemKind::Entity => self.kb.entity_type(target).is_some(),
        };
        if !found {
            self.error(kind, id, FindingKind::DanglingReference { target_kind, target: String::from(target) });
        }
    }

    fn concepts(&mut self) {
        for c in &self.kb.concepts {
            if c.gloss.trim().is_empty() {
                self.error(ItemKind::Concept, &c.id, FindingKind::EmptyGloss);
            }
            for p in &c.parents {
                self.require(ItemKind::Concept, &c.id, ItemKind::Concept, p);
            }
        }
        for cycle in concept_cycles(self.kb) {
            let first = cycle[0].clone();
            self.error(ItemKind::Concept, &first, FindingKind::OntologyCycle { ids: cycle });
        }
    }

    fn predicates(&mut self) {
        for p in &self.kb.predicates {
            if p.arity == 0 {
                self.error(ItemKind::Predicate, &p.name, FindingKind::ZeroArity);
            }
            if let Some(tpl) = &p.template {
                match parse_template(tpl) {
                    Ok(t) => {
                        if let Some(slot) = t.slots().find(|s| s.arg_position > p.arity) {
                            let message = format!("slot {{{}}} exceeds arity {}", slot.arg_position, p.arity);
                            self.error(ItemKind::Predicate, &p.name, FindingKind::BadTemplate { message });
                        }
                    }
                    Err(e) => {
                        self.error(ItemKind::Predicate, &p.name, FindingKind::BadTemplate { message: e.to_string() });
                    }
                }
            }
        }
    }

    fn frames(&mut self) {
        for fr in &self.kb.frames {
            if !fr.id.starts_with("FN_") {
                self.error(ItemKind::Frame, &fr.id, FindingKind::BadFrameId);
            }
        }
    }

    fn lexicon(&mut self) {
        for lx in &self.kb.lexemes {
            if let Some(message) = lemma_problem(&lx.lemma) {
                self.error(ItemKind::Lexeme, &lx.lemma, FindingKind::BadLemma { message });
            }
            let is_verb = self.kb.has_senses(&lx.lemma, PartOfSpeech::Verb);
            if is_verb && lx.past.as_deref().is_none_or(str::is_empty) {
                self.push(Severity::Warning, ItemKind::Lexeme, &lx.lemma, FindingKind::MissingPastForm);
            }
        }
        for (lemma, concept) in &self.kb.entities {
            if let Some(message) = lemma_problem(lemma) {
                self.error(ItemKind::Entity, lemma, FindingKind::BadLemma { message });
            }
            self.require(ItemKind::Entity, lemma, ItemKind::Concept, concept);
        }
    }

    fn senses(&mut self) {
        for s in &self.kb.senses {
            let id = s.sense_id.as_str();
            if let Some(message) = lemma_problem(&s.lemma) {
                self.error(ItemKind::Sense, id, FindingKind::BadLemma { message });
            }
            self.require(ItemKind::Sense, id, ItemKind::Concept, &s.head_concept);
            if let Some(frame) = &s.frame {
                self.require(ItemKind::Sense, id, ItemKind::Frame, frame);
            }
            let head_ok = s.atoms.first().is_some_and(|a| {
                a.predicate == "isa"
                    && a.args.len() == 2
                    && a.args[0] == SlotArg::Role(Role::Event)
                    && a.args[1] == SlotArg::Const(s.head_concept.clone())
            });
            if !head_ok {
                let message = format!("first atom must be (isa EVENT {})", s.head_concept);
                self.error(ItemKind::Sense, id, FindingKind::BadSenseShape { message });
            }
            for atom in &s.atoms {
                match self.kb.predicate(&atom.predicate) {
                    None => self.require(ItemKind::Sense, id, ItemKind::Predicate, &atom.predicate),
                    Some(def) if def.arity != atom.args.len() => self.error(
                        ItemKind::Sense,
                        id,
                        FindingKind::ArityMismatch {
                            predicate: atom.predicate.clone(),
                            expected: def.arity,
                            found: atom.args.len(),
                        },
                    ),
                    Some(_) => {}
                }
                for arg in &atom.args {
                    if let SlotArg::Const(c) = arg {
                        if self.kb.concept(c).is_none() && self.kb.predicate(c).is_none() {
                            self.require(ItemKind::Sense, id, ItemKind::Concept, c);
                        }
                    }
                }
            }
            for (role, concept) in &s.role_constraints {
                if *role == Role::Event {
                    let message = String::from("EVENT cannot carry a role constraint");
                    self.error(ItemKind::Sense, id, FindingKind::BadSenseShape { message });
                }
                self.require(ItemKind::Sense, id, ItemKind::Concept, concept);
            }
        }
    }
}

fn lemma_problem(lemma: &str) -> Option<String> {
    if lemma.is_empty() {
        return Some(String::from("empty"));
    }
    if lemma.chars().any(|c| c.is_uppercase() || c.is_whitespace()) {
        return Some(format!("'{lemma}' must be lowercase without spaces"));
    }
    if lemma.ends_with(|c: char| c.is_ascii_digit()) {
        return Some(format!("'{lemma}' ends in a digit"));
    }
    None
}

/// Strongly connected components of the parent graph that contain a cycle,
/// each listed in declaration order.
fn concept_cycles(kb: &KnowledgeBase) -> Vec<Vec<String>> {
    // Iterative Tarjan over declaration order.
    let n = kb.concepts.len();
    let edges: Vec<Vec<usize>> = kb
        .concepts
        .iter()
        .map(|c| c.parents.iter().filter_map(|p| kb.concept_index.get(p).copied()).collect())
        .collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0usize;
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&(v, edge)) = work.last() {
            if edge == 0 && index[v] == usize::MAX {
                index[v] = next;
                low[v] = next;
                next += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = edges[v].get(edge) {
                if let Some(top) = work.last_mut() {
                    top.1 += 1;
                }
                if index[w] == usize::MAX {
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                let cyclic = comp.len() > 1 || edges[v].contains(&v);
                if cyclic {
                    comp.sort_unstable();
                    sccs.push(comp);
                }
            }
        }
    }
    sccs.sort();
    sccs.into_iter().map(|comp| comp.into_iter().map(|i| kb.concepts[i].id.clone()).collect()).collect()
}

/// Check every knowledge-base invariant. Findings are data, never failures.
pub fn validate_kb(kb: &KnowledgeBase) -> ValidationReport {
    let mut v = Validator { kb, findings: Vec::new() };
    v.concepts();
    v.predicates();
    v.frames();
    v.lexicon();
    v.senses();
    ValidationReport { findings: v.findings }
}
