//! Per-sentence truth maintenance and the end-to-end pipeline.
//!
//! A [`DisambiguationState`] holds one choice set per ambiguous word, the
//! commitments made so far and a log of pruned candidates. Every commitment
//! and every prune carries a [`Justification`]. Propagation prunes
//! candidates that violate a selectional constraint against a committed
//! word and auto-commits words left with a single candidate; retraction
//! undoes a commitment together with everything that depended on it.
//!
//! Conflict rule: candidates `a` of word `x` and `b` of word `y` conflict
//! when `a`'s sense constrains role `R`, `x` links `R` to `y`'s lemma, and
//! `b`'s head concept is not a subconcept of the constraint (or the same
//! with `x` and `y` swapped).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use crate::candgen::{generate_choice_sets, AnnotatedSentence, ChoiceSet, ChoiceStatus};
use crate::kb::{KnowledgeBase, PartOfSpeech, Role};
use crate::logic::render_sexpr;
use crate::oracle::{ask, prepare_prompt, Oracle, PromptStyle, PromptText};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Justification {
    OracleSelection,
    SingletonAutocommit,
    /// Pruned because it conflicts with the commitment of word `with`
    /// (a token index) over `role`, which requires `required`.
    SelectionalConflict {
        with: usize,
        role: Role,
        required: String,
    },
}

impl Justification {
    pub fn source_word(&self) -> Option<usize> {
        match self {
            Justification::SelectionalConflict { with, .. } => Some(*with),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Commitment {
    /// 0-based index into the word's candidate list.
    pub candidate: usize,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PruneEntry {
    pub token_index: usize,
    pub candidate: usize,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TmsError {
    #[error("no choice set for token {0}")]
    UnknownToken(usize),
    #[error("token {0} is already committed")]
    AlreadyCommitted(usize),
    #[error("token {0} has no candidates left")]
    Exhausted(usize),
    #[error("candidate {candidate} of token {token_index} is out of bounds")]
    OutOfBounds { token_index: usize, candidate: usize },
    #[error("candidate {candidate} of token {token_index} has been pruned")]
    Pruned { token_index: usize, candidate: usize },
    #[error("token {0} is not committed")]
    NotCommitted(usize),
}

/// What one call to [`DisambiguationState::propagate`] changed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropagationDelta {
    pub pruned: Vec<PruneEntry>,
    pub auto_committed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisambiguationState {
    sentence: AnnotatedSentence,
    choice_sets: Vec<ChoiceSet>,
    commitments: BTreeMap<usize, Commitment>,
    pruned: Vec<PruneEntry>,
}

impl DisambiguationState {
    /// Fresh state. Singleton sets stay open until the first propagation.
    pub fn new(sentence: AnnotatedSentence, choice_sets: Vec<ChoiceSet>) -> Self {
        let mut state = DisambiguationState { sentence, choice_sets, commitments: BTreeMap::new(), pruned: Vec::new() };
        for i in 0..state.choice_sets.len() {
            state.refresh(i);
        }
        state
    }

    pub fn sentence(&self) -> &AnnotatedSentence {
        &self.sentence
    }

    pub fn choice_sets(&self) -> &[ChoiceSet] {
        &self.choice_sets
    }

    pub fn choice_set(&self, token_index: usize) -> Option<&ChoiceSet> {
        self.choice_sets.iter().find(|s| s.target.token_index == token_index)
    }

    pub fn commitments(&self) -> &BTreeMap<usize, Commitment> {
        &self.commitments
    }

    pub fn prune_log(&self) -> &[PruneEntry] {
        &self.pruned
    }

    pub fn is_pruned(&self, token_index: usize, candidate: usize) -> bool {
        self.pruned.iter().any(|p| p.token_index == token_index && p.candidate == candidate)
    }

    /// Indices of the candidates of `token_index` that have not been pruned.
    pub fn survivors(&self, token_index: usize) -> Vec<usize> {
        match self.choice_set(token_index) {
            Some(set) => (0..set.candidates.len()).filter(|&c| !self.is_pruned(token_index, c)).collect(),
            None => Vec::new(),
        }
    }

    /// Some word lost every candidate to pruning.
    pub fn inconsistent_token(&self) -> Option<usize> {
        self.choice_sets
            .iter()
            .find(|s| !s.candidates.is_empty() && s.status == ChoiceStatus::Exhausted)
            .map(|s| s.target.token_index)
    }

    /// Every set that still has candidates is committed.
    pub fn is_complete(&self) -> bool {
        self.choice_sets.iter().all(|s| s.status != ChoiceStatus::Open) && self.inconsistent_token().is_none()
    }

    /// Copy with the prune log in sorted order, for comparing states reached
    /// along different histories.
    pub fn canonical(&self) -> Self {
        let mut c = self.clone();
        c.pruned.sort();
        c
    }

    fn set_index(&self, token_index: usize) -> Option<usize> {
        self.choice_sets.iter().position(|s| s.target.token_index == token_index)
    }

    fn refresh(&mut self, i: usize) {
        let token = self.choice_sets[i].target.token_index;
        let status = match self.commitments.get(&token) {
            Some(c) => ChoiceStatus::Committed(c.candidate),
            None if self.survivors(token).is_empty() => ChoiceStatus::Exhausted,
            None => ChoiceStatus::Open,
        };
        self.choice_sets[i].status = status;
    }

    pub fn commit_selection(
        &mut self,
        token_index: usize,
        candidate: usize,
        justification: Justification,
    ) -> Result<(), TmsError> {
        let i = self.set_index(token_index).ok_or(TmsError::UnknownToken(token_index))?;
        match self.choice_sets[i].status {
            ChoiceStatus::Committed(_) => return Err(TmsError::AlreadyCommitted(token_index)),
            ChoiceStatus::Exhausted => return Err(TmsError::Exhausted(token_index)),
            ChoiceStatus::Open => {}
        }
        if candidate >= self.choice_sets[i].candidates.len() {
            return Err(TmsError::OutOfBounds { token_index, candidate });
        }
        if self.is_pruned(token_index, candidate) {
            return Err(TmsError::Pruned { token_index, candidate });
        }
        self.commitments.insert(token_index, Commitment { candidate, justification });
        self.refresh(i);
        Ok(())
    }

    /// Conflicts between the commitment of `committed` and the surviving
    /// candidates of other open words, as prune entries.
    fn conflicts_with(&self, kb: &KnowledgeBase, committed: usize) -> Vec<PruneEntry> {
        let mut out = Vec::new();
        let (Some(xi), Some(commit)) = (self.set_index(committed), self.commitments.get(&committed)) else {
            return out;
        };
        let xset = &self.choice_sets[xi];
        let xcand = &xset.candidates[commit.candidate];
        let xsense = kb.sense(&xcand.sense_id);
        for other in &self.choice_sets {
            let token = other.target.token_index;
            if token == committed || other.status != ChoiceStatus::Open {
                continue;
            }
            for j in self.survivors(token) {
                let cand = &other.candidates[j];
                let mut why = None;
                // the committed sense constrains a role filled by this word
                if let Some(xsense) = xsense {
                    why = xsense.role_constraints.iter().find_map(|(role, required)| {
                        let filler = xset.target.links.get(role)?;
                        (filler == &other.target.lemma && !subconcept(kb, cand.head_concept(), required))
                            .then(|| (*role, required.clone()))
                    });
                }
                // this candidate constrains a role filled by the committed word
                if why.is_none() {
                    if let Some(sense) = kb.sense(&cand.sense_id) {
                        why = other.target.links.iter().find_map(|(role, filler)| {
                            if filler != &xset.target.lemma {
                                return None;
                            }
                            let required = sense.role_constraints.get(role)?;
                            (!subconcept(kb, xcand.head_concept(), required)).then(|| (*role, required.clone()))
                        });
                    }
                }
                if let Some((role, required)) = why {
                    out.push(PruneEntry {
                        token_index: token,
                        candidate: j,
                        justification: Justification::SelectionalConflict { with: committed, role, required },
                    });
                }
            }
        }
        out
    }

    /// Prune and auto-commit to a fixpoint.
    ///
    /// Pruning runs to exhaustion before the leftmost singleton word is
    /// auto-committed, one word at a time.
    pub fn propagate(&mut self, kb: &KnowledgeBase) -> PropagationDelta {
        let mut delta = PropagationDelta::default();
        loop {
            let mut changed = false;
            let committed: Vec<usize> = self.commitments.keys().copied().collect();
            for x in committed {
                for entry in self.conflicts_with(kb, x) {
                    if self.is_pruned(entry.token_index, entry.candidate) {
                        continue;
                    }
                    self.pruned.push(entry.clone());
                    if let Some(i) = self.set_index(entry.token_index) {
                        self.refresh(i);
                    }
                    delta.pruned.push(entry);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            let singleton = self.choice_sets.iter().find_map(|s| {
                let token = s.target.token_index;
                let alive = self.survivors(token);
                (s.status == ChoiceStatus::Open && alive.len() == 1).then(|| (token, alive[0]))
            });
            match singleton {
                Some((token, candidate)) => {
                    if let Some(i) = self.set_index(token) {
                        self.commitments
                            .insert(token, Commitment { candidate, justification: Justification::SingletonAutocommit });
                        self.refresh(i);
                    }
                    delta.auto_committed.push(token);
                }
                None => break,
            }
        }
        delta
    }

    /// Withdraw the commitment of `token_index` and everything that rests on
    /// it, then re-propagate what the remaining commitments still support.
    pub fn retract_selection(&mut self, kb: &KnowledgeBase, token_index: usize) -> Result<(), TmsError> {
        if !self.commitments.contains_key(&token_index) {
            return Err(TmsError::NotCommitted(token_index));
        }
        let mut queue = alloc::vec![token_index];
        let mut withdrawn = BTreeSet::new();
        while let Some(t) = queue.pop() {
            if !withdrawn.insert(t) {
                continue;
            }
            self.commitments.remove(&t);
            let mut restored = BTreeSet::new();
            self.pruned.retain(|p| {
                let depends = p.justification.source_word() == Some(t);
                if depends {
                    restored.insert(p.token_index);
                }
                !depends
            });
            for s in restored {
                let auto =
                    self.commitments.get(&s).is_some_and(|c| c.justification == Justification::SingletonAutocommit);
                if auto {
                    queue.push(s);
                }
            }
        }
        for i in 0..self.choice_sets.len() {
            self.refresh(i);
        }
        self.propagate(kb);
        Ok(())
    }

    /// Re-check a prune entry against the ontology: some commitment and role
    /// must witness the conflict it claims.
    pub fn verify_prune(&self, kb: &KnowledgeBase, entry: &PruneEntry) -> bool {
        let Justification::SelectionalConflict { with, role, required } = &entry.justification else {
            return false;
        };
        let (Some(x), Some(y)) = (self.choice_set(*with), self.choice_set(entry.token_index)) else {
            return false;
        };
        let Some(commit) = self.commitments.get(with) else { return false };
        let (Some(xcand), Some(ycand)) = (x.candidates.get(commit.candidate), y.candidates.get(entry.candidate)) else {
            return false;
        };
        let forward = kb.sense(&xcand.sense_id).is_some_and(|s| s.role_constraints.get(role) == Some(required))
            && x.target.links.get(role) == Some(&y.target.lemma)
            && kb.is_subconcept(ycand.head_concept(), required) == Ok(false);
        let backward = kb.sense(&ycand.sense_id).is_some_and(|s| s.role_constraints.get(role) == Some(required))
            && y.target.links.get(role) == Some(&x.target.lemma)
            && kb.is_subconcept(xcand.head_concept(), required) == Ok(false);
        forward || backward
    }
}

fn subconcept(kb: &KnowledgeBase, child: &str, ancestor: &str) -> bool {
    kb.is_subconcept(child, ancestor).unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub retries: u32,
    /// First discourse-variable index of each sentence.
    pub id_start: u64,
    pub prompt_style: PromptStyle,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { retries: 2, id_start: 1, prompt_style: PromptStyle::default() }
    }
}

/// A prompt about to be sent, as seen by a pipeline observer.
#[derive(Debug, Clone, Copy)]
pub struct PromptEvent<'a> {
    pub sentence_id: &'a str,
    pub token_index: usize,
    pub word: &'a str,
    pub prompt: &'a PromptText,
    pub n_options: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetOutcome {
    pub lemma: String,
    pub token_index: usize,
    pub pos: PartOfSpeech,
    /// Number of candidates generated for the word.
    pub candidates: usize,
    pub sense_id: Option<String>,
    pub frame: Option<String>,
    pub sexpr: Option<String>,
    /// 1-based position among the generated candidates.
    pub candidate_number: Option<usize>,
    /// 1-based option number over the survivors offered to the oracle.
    pub option_index: Option<usize>,
    pub options_offered: Option<usize>,
    pub attempts: u32,
    pub raw_reply: Option<String>,
    pub justification: Option<Justification>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PruneRecord {
    pub token_index: usize,
    pub lemma: String,
    pub candidate_number: usize,
    pub sense_id: String,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FailureReason {
    Inconsistent { token_index: usize },
    Oracle { token_index: usize, message: String },
    Generation { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum AnalysisStatus {
    Complete,
    Failed { reason: FailureReason },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceAnalysis {
    pub sentence_id: String,
    pub targets: Vec<TargetOutcome>,
    pub prune_log: Vec<PruneRecord>,
    pub status: AnalysisStatus,
    pub oracle_calls: u32,
}

impl SentenceAnalysis {
    pub fn is_complete(&self) -> bool {
        self.status == AnalysisStatus::Complete
    }

    pub fn target(&self, token_index: usize) -> Option<&TargetOutcome> {
        self.targets.iter().find(|t| t.token_index == token_index)
    }
}

#[derive(Debug, Clone, Default)]
struct OracleRecord {
    option_index: usize,
    options_offered: usize,
    attempts: u32,
    raw_reply: String,
}

/// Run the whole pipeline on one sentence.
pub fn disambiguate_sentence<O: Oracle + ?Sized>(
    kb: &KnowledgeBase,
    oracle: &O,
    sentence: &AnnotatedSentence,
    config: &PipelineConfig,
) -> SentenceAnalysis {
    disambiguate_sentence_observed(kb, oracle, sentence, config, &mut |_| {})
}

/// [`disambiguate_sentence`], reporting every prompt to `observer` before it
/// is sent.
pub fn disambiguate_sentence_observed<O: Oracle + ?Sized>(
    kb: &KnowledgeBase,
    oracle: &O,
    sentence: &AnnotatedSentence,
    config: &PipelineConfig,
    observer: &mut dyn FnMut(&PromptEvent<'_>),
) -> SentenceAnalysis {
    let mut ids = sentence.id_gen(config.id_start);
    let sets = match generate_choice_sets(kb, sentence, &mut ids) {
        Ok(sets) => sets,
        Err(e) => {
            return SentenceAnalysis {
                sentence_id: sentence.sentence_id.clone(),
                targets: Vec::new(),
                prune_log: Vec::new(),
                status: AnalysisStatus::Failed { reason: FailureReason::Generation { message: e.to_string() } },
                oracle_calls: 0,
            }
        }
    };
    let mut state = DisambiguationState::new(sentence.clone(), sets);
    state.propagate(kb);

    let mut records: BTreeMap<usize, OracleRecord> = BTreeMap::new();
    let mut calls = 0u32;
    let status = loop {
        if let Some(token_index) = state.inconsistent_token() {
            break AnalysisStatus::Failed { reason: FailureReason::Inconsistent { token_index } };
        }
        let next = state
            .choice_sets()
            .iter()
            .find(|s| s.status == ChoiceStatus::Open && state.survivors(s.target.token_index).len() >= 2);
        let Some(set) = next else { break AnalysisStatus::Complete };
        let token_index = set.target.token_index;
        let word = set.target.lemma.clone();
        let alive = state.survivors(token_index);
        let offered: Vec<_> = alive.iter().map(|&c| &set.candidates[c]).collect();

        let prompt = match prepare_prompt(kb, &sentence.text, &word, &offered, config.prompt_style) {
            Ok(p) => p,
            Err(e) => {
                break AnalysisStatus::Failed { reason: FailureReason::Oracle { token_index, message: e.to_string() } }
            }
        };
        observer(&PromptEvent {
            sentence_id: &sentence.sentence_id,
            token_index,
            word: &word,
            prompt: &prompt,
            n_options: alive.len(),
        });
        calls += 1;
        let selection = match ask(oracle, &sentence.sentence_id, &word, &prompt, alive.len(), config.retries) {
            Ok(s) => s,
            Err(e) => {
                break AnalysisStatus::Failed { reason: FailureReason::Oracle { token_index, message: e.to_string() } }
            }
        };
        let candidate = alive[selection.option_index - 1];
        if let Err(e) = state.commit_selection(token_index, candidate, Justification::OracleSelection) {
            break AnalysisStatus::Failed {
                reason: FailureReason::Oracle { token_index, message: format!("commit failed: {e}") },
            };
        }
        records.insert(
            token_index,
            OracleRecord {
                option_index: selection.option_index,
                options_offered: alive.len(),
                attempts: selection.attempts,
                raw_reply: selection.raw_reply,
            },
        );
        state.propagate(kb);
    };

    let targets = state
        .choice_sets()
        .iter()
        .map(|set| {
            let token_index = set.target.token_index;
            let commit = state.commitments().get(&token_index);
            let record = records.get(&token_index);
            let chosen = commit.map(|c| &set.candidates[c.candidate]);
            TargetOutcome {
                lemma: set.target.lemma.clone(),
                token_index,
                pos: set.target.pos,
                candidates: set.candidates.len(),
                sense_id: chosen.map(|c| c.sense_id.clone()),
                frame: chosen.and_then(|c| kb.sense(&c.sense_id)).and_then(|s| s.frame.clone()),
                sexpr: chosen.map(|c| render_sexpr(&c.form)),
                candidate_number: commit.map(|c| c.candidate + 1),
                option_index: record.map(|r| r.option_index),
                options_offered: record.map(|r| r.options_offered),
                attempts: record.map_or(0, |r| r.attempts),
                raw_reply: record.map(|r| r.raw_reply.clone()),
                justification: commit.map(|c| c.justification.clone()),
            }
        })
        .collect();
    let prune_log = state
        .prune_log()
        .iter()
        .map(|p| {
            let set = state.choice_set(p.token_index);
            PruneRecord {
                token_index: p.token_index,
                lemma: set.map(|s| s.target.lemma.clone()).unwrap_or_default(),
                candidate_number: p.candidate + 1,
                sense_id: set.map(|s| s.candidates[p.candidate].sense_id.clone()).unwrap_or_default(),
                justification: p.justification.clone(),
            }
        })
        .collect();
    SentenceAnalysis { sentence_id: sentence.sentence_id.clone(), targets, prune_log, status, oracle_calls: calls }
}
