//! Choice-set generation: one ordered set of candidate meanings per
//! ambiguous word, after selectional filtering against known entity types.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::kb::{KnowledgeBase, PartOfSpeech, Role, SenseTemplate};
use crate::logic::{instantiate_with_head, Bindings, CandidateMeaning, IdGen, LogicError, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetWord {
    pub token_index: usize,
    pub surface: String,
    pub lemma: String,
    pub pos: PartOfSpeech,
    /// Argument links: role → lemma of the filler (hyphenated multiword).
    pub links: BTreeMap<Role, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotatedSentence {
    pub sentence_id: String,
    pub text: String,
    pub targets: Vec<TargetWord>,
    /// Discourse-variable indices pinned per lemma, for reproducing
    /// published renderings.
    pub pinned_ids: BTreeMap<String, u64>,
}

impl AnnotatedSentence {
    pub fn new(sentence_id: &str, text: &str) -> Self {
        AnnotatedSentence {
            sentence_id: String::from(sentence_id),
            text: String::from(text),
            targets: Vec::new(),
            pinned_ids: BTreeMap::new(),
        }
    }

    /// Id generator for this sentence, honouring pinned indices.
    pub fn id_gen(&self, start: u64) -> IdGen {
        IdGen::starting_at(start).with_pinned(self.pinned_ids.clone())
    }

    pub fn target(&self, token_index: usize) -> Option<&TargetWord> {
        self.targets.iter().find(|t| t.token_index == token_index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "index", rename_all = "lowercase")]
pub enum ChoiceStatus {
    Open,
    /// 0-based index into the candidate list.
    Committed(usize),
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceSet {
    pub target: TargetWord,
    pub candidates: Vec<CandidateMeaning>,
    pub status: ChoiceStatus,
}

/// Lowercased word tokens with surrounding punctuation stripped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric() && c != '-' && c != '\'').trim_matches('\'').to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FormKind {
    Base,
    Past,
}

/// Surface forms of every lemma the KB knows, as token sequences.
fn lexicon_forms(kb: &KnowledgeBase) -> BTreeMap<Vec<String>, (String, FormKind)> {
    let mut forms = BTreeMap::new();
    let mut add = |text: &str, lemma: &str, kind: FormKind| {
        let toks = tokenize(text);
        if !toks.is_empty() {
            forms.entry(toks).or_insert_with(|| (String::from(lemma), kind));
        }
    };
    for lx in kb.lexemes() {
        add(&lx.surface_form(), &lx.lemma, FormKind::Base);
        if let Some(p) = &lx.past {
            add(p, &lx.lemma, FormKind::Past);
        }
    }
    for s in kb.senses() {
        add(&crate::kb::lemma_surface(&s.lemma), &s.lemma, FormKind::Base);
    }
    for (lemma, _) in kb.entities() {
        add(&crate::kb::lemma_surface(lemma), lemma, FormKind::Base);
    }
    forms
}

/// Best-effort stand-in for a parser: match raw text against the lexicon
/// and link each verb to its nearest preceding (SUBJ) and following (OBJ)
/// entity.
pub fn link_arguments(sentence_id: &str, text: &str, kb: &KnowledgeBase) -> AnnotatedSentence {
    let mut out = AnnotatedSentence::new(sentence_id, text);
    let tokens = tokenize(text);
    let forms = lexicon_forms(kb);
    let longest = forms.keys().map(Vec::len).max().unwrap_or(0);

    struct Match {
        token_index: usize,
        surface: String,
        lemma: String,
        kind: FormKind,
    }
    let mut matches = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut found = None;
        for len in (1..=longest.min(tokens.len() - i)).rev() {
            if let Some((lemma, kind)) = forms.get(&tokens[i..i + len]) {
                found = Some((len, lemma.clone(), *kind));
                break;
            }
        }
        match found {
            Some((len, lemma, kind)) => {
                matches.push(Match { token_index: i, surface: tokens[i..i + len].join(" "), lemma, kind });
                i += len;
            }
            None => i += 1,
        }
    }

    let pos_of = |m: &Match| -> Option<PartOfSpeech> {
        let verb = kb.has_senses(&m.lemma, PartOfSpeech::Verb);
        let noun = kb.has_senses(&m.lemma, PartOfSpeech::Noun);
        match (verb, noun) {
            (true, _) if m.kind == FormKind::Past => Some(PartOfSpeech::Verb),
            (_, true) => Some(PartOfSpeech::Noun),
            (true, false) => Some(PartOfSpeech::Verb),
            (false, false) => None,
        }
    };
    let is_entity = |m: &Match| kb.entity_type(&m.lemma).is_some() || pos_of(m) == Some(PartOfSpeech::Noun);

    for (k, m) in matches.iter().enumerate() {
        let Some(pos) = pos_of(m) else { continue };
        let mut links = BTreeMap::new();
        if pos == PartOfSpeech::Verb {
            if let Some(subj) = matches[..k].iter().rev().find(|n| is_entity(n)) {
                links.insert(Role::Subj, subj.lemma.clone());
            }
            if let Some(obj) = matches[k + 1..].iter().find(|n| is_entity(n)) {
                links.insert(Role::Obj, obj.lemma.clone());
            }
        }
        out.targets.push(TargetWord {
            token_index: m.token_index,
            surface: m.surface.clone(),
            lemma: m.lemma.clone(),
            pos,
            links,
        });
    }
    out
}

/// A selectional constraint a sense violates given the sentence links: the
/// role, the required concept and the filler's known type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintViolation {
    pub role: Role,
    pub required: String,
    pub filler_type: String,
}

/// First role constraint of `sense` that a linked filler with a known entity
/// type fails. Fillers without a known type never violate anything.
pub fn constraint_violation(
    kb: &KnowledgeBase,
    sense: &SenseTemplate,
    links: &BTreeMap<Role, String>,
) -> Option<ConstraintViolation> {
    sense.role_constraints.iter().find_map(|(role, required)| {
        let filler = links.get(role)?;
        let filler_type = kb.entity_type(filler)?;
        match kb.is_subconcept(filler_type, required) {
            Ok(true) => None,
            _ => Some(ConstraintViolation {
                role: *role,
                required: required.clone(),
                filler_type: String::from(filler_type),
            }),
        }
    })
}

/// One choice set per target whose lemma has senses for its part of speech.
///
/// Every candidate of a word shares the word's head variable. Fillers are
/// given one variable per lemma; a filler that is itself a target reuses
/// that target's head variable. Senses are dropped when they violate a
/// selectional constraint or mention a role the target has no link for.
pub fn generate_choice_sets(
    kb: &KnowledgeBase,
    sentence: &AnnotatedSentence,
    idgen: &mut IdGen,
) -> Result<Vec<ChoiceSet>, LogicError> {
    let known: Vec<&TargetWord> = sentence.targets.iter().filter(|t| kb.has_senses(&t.lemma, t.pos)).collect();

    let mut heads = Vec::with_capacity(known.len());
    let mut vars: BTreeMap<String, Term> = BTreeMap::new();
    for t in &known {
        let head = idgen.fresh(&t.lemma)?;
        vars.entry(t.lemma.clone()).or_insert_with(|| Term::Var(head.clone()));
        heads.push(head);
    }
    for t in &known {
        for filler in t.links.values() {
            if !vars.contains_key(filler) {
                let v = idgen.fresh(filler)?;
                vars.insert(filler.clone(), Term::Var(v));
            }
        }
    }

    let mut out = Vec::with_capacity(known.len());
    for (t, head) in known.into_iter().zip(heads) {
        let bindings: Bindings =
            t.links.iter().filter_map(|(role, lemma)| Some((*role, vars.get(lemma)?.clone()))).collect();
        let mut candidates = Vec::new();
        for sense in kb.lookup_senses(&t.lemma, t.pos) {
            if constraint_violation(kb, sense, &t.links).is_some() {
                continue;
            }
            if sense.required_roles().iter().any(|r| !bindings.contains_key(r)) {
                continue;
            }
            candidates.push(instantiate_with_head(kb, sense, head.clone(), &bindings)?);
        }
        let status = if candidates.is_empty() { ChoiceStatus::Exhausted } else { ChoiceStatus::Open };
        out.push(ChoiceSet { target: t.clone(), candidates, status });
    }
    Ok(out)
}
