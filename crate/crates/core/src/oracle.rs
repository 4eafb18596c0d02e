//! Selection oracles: the prompt, reply parsing, the retry loop and the
//! offline oracle implementations.
//!
//! Prompt layout, lines joined by a single `\n` with no trailing newline:
//!
//! ```text
//! Sentence: "<sentence>" Please select the most appropriate meaning for the word "<word>"
//! Options:
//! 1. <option 1>
//! ...
//! Reply only with the option number.
//! ```

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use serde::Serialize;

use crate::kb::KnowledgeBase;
use crate::logic::CandidateMeaning;
use crate::rng::keyed_rng;
use crate::verbalize::{verbalize_candidate, VerbalizeError};

/// Exact bytes sent to an oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PromptText(String);

impl PromptText {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PromptText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PromptStyle {
    /// Wrap the target word in markdown bold markers.
    pub bold_word: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("no options to offer")]
    NoOptions,
    #[error("option {0} is empty")]
    EmptyOption(usize),
}

pub fn build_prompt(sentence_text: &str, word: &str, options: &[String]) -> Result<PromptText, PromptError> {
    build_prompt_styled(sentence_text, word, options, PromptStyle::default())
}

pub fn build_prompt_styled(
    sentence_text: &str,
    word: &str,
    options: &[String],
    style: PromptStyle,
) -> Result<PromptText, PromptError> {
    if options.is_empty() {
        return Err(PromptError::NoOptions);
    }
    if let Some(k) = options.iter().position(|o| o.is_empty()) {
        return Err(PromptError::EmptyOption(k + 1));
    }
    let word = if style.bold_word { format!("**{word}**") } else { String::from(word) };
    let mut lines = Vec::with_capacity(options.len() + 3);
    lines.push(format!(
        "Sentence: \"{sentence_text}\" Please select the most appropriate meaning for the word \"{word}\""
    ));
    lines.push(String::from("Options:"));
    for (k, option) in options.iter().enumerate() {
        lines.push(format!("{}. {option}", k + 1));
    }
    lines.push(String::from("Reply only with the option number."));
    Ok(PromptText(lines.join("\n")))
}

/// Extract the first maximal run of decimal digits; `None` unless it lies in
/// `1..=n_options`.
pub fn parse_response(reply: &str, n_options: usize) -> Option<usize> {
    let start = reply.find(|c: char| c.is_ascii_digit())?;
    let digits = &reply[start..];
    let end = digits.find(|c: char| !c.is_ascii_digit()).unwrap_or(digits.len());
    let value: usize = digits[..end].parse().ok()?;
    (1..=n_options).contains(&value).then_some(value)
}

/// Everything an oracle may look at for one query.
#[derive(Debug, Clone, Copy)]
pub struct OracleRequest<'a> {
    pub sentence_id: &'a str,
    pub word: &'a str,
    pub prompt: &'a PromptText,
    pub n_options: usize,
    /// 0 for the first query of a selection, incremented on each retry.
    pub attempt: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("no scripted reply for word '{word}' in sentence '{sentence_id}'")]
    Unscripted { sentence_id: String, word: String },
    #[error("oracle transport error: {0}")]
    Transport(String),
    #[error("oracle gave no valid option after {attempts} attempts (last reply {last_reply:?})")]
    Exhausted { attempts: u32, last_reply: String },
    #[error("cannot offer candidates: {0}")]
    Verbalize(#[from] VerbalizeError),
    #[error("cannot build prompt: {0}")]
    Prompt(#[from] PromptError),
}

/// Anything that can answer a prompt with (hopefully) an option number.
pub trait Oracle {
    fn query(&self, request: &OracleRequest<'_>) -> Result<String, OracleError>;
}

impl<T: Oracle + ?Sized> Oracle for &T {
    fn query(&self, request: &OracleRequest<'_>) -> Result<String, OracleError> {
        (**self).query(request)
    }
}

/// Replies looked up by `(sentence_id, word)`. Retry `k` gets the `k`-th
/// scripted reply, or the last one once the script runs out.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScriptedOracle {
    replies: BTreeMap<(String, String), Vec<String>>,
}

impl ScriptedOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sentence_id: &str, word: &str, replies: Vec<String>) {
        self.replies.insert((String::from(sentence_id), String::from(word)), replies);
    }

    pub fn with(mut self, sentence_id: &str, word: &str, replies: &[&str]) -> Self {
        self.insert(sentence_id, word, replies.iter().map(|r| r.to_string()).collect());
        self
    }

    pub fn len(&self) -> usize {
        self.replies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replies.is_empty()
    }
}

impl Oracle for ScriptedOracle {
    fn query(&self, request: &OracleRequest<'_>) -> Result<String, OracleError> {
        let key = (String::from(request.sentence_id), String::from(request.word));
        let unscripted = || OracleError::Unscripted {
            sentence_id: String::from(request.sentence_id),
            word: String::from(request.word),
        };
        let replies = self.replies.get(&key).ok_or_else(unscripted)?;
        let k = (request.attempt as usize).min(replies.len().saturating_sub(1));
        replies.get(k).cloned().ok_or_else(unscripted)
    }
}

/// Uniform choice over the offered options, drawn from a stream keyed by
/// `(seed, sentence_id, word, attempt)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformRandomOracle {
    pub seed: u64,
}

impl Oracle for UniformRandomOracle {
    fn query(&self, request: &OracleRequest<'_>) -> Result<String, OracleError> {
        let attempt = request.attempt.to_le_bytes();
        let mut rng = keyed_rng(self.seed, &[request.sentence_id.as_bytes(), request.word.as_bytes(), &attempt]);
        let n = request.n_options.max(1);
        Ok(rng.random_range(1..=n).to_string())
    }
}

/// Always answers "1".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FirstOptionOracle;

impl Oracle for FirstOptionOracle {
    fn query(&self, _request: &OracleRequest<'_>) -> Result<String, OracleError> {
        Ok(String::from("1"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    HttpChat,
    Scripted,
    UniformRandom,
    FirstOption,
}

impl OracleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleKind::HttpChat => "http-chat",
            OracleKind::Scripted => "scripted",
            OracleKind::UniformRandom => "uniform-random",
            OracleKind::FirstOption => "first-option",
        }
    }
}

impl core::str::FromStr for OracleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "http-chat" => Ok(OracleKind::HttpChat),
            "scripted" => Ok(OracleKind::Scripted),
            "uniform-random" => Ok(OracleKind::UniformRandom),
            "first-option" => Ok(OracleKind::FirstOption),
            other => {
                Err(format!("unknown oracle '{other}' (expected http-chat, scripted, uniform-random or first-option)"))
            }
        }
    }
}

/// Oracle settings as configured by a caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub kind: OracleKind,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub retries: u32,
    pub timeout_secs: u64,
    pub seed: Option<u64>,
}

impl OracleConfig {
    pub fn new(kind: OracleKind) -> Self {
        OracleConfig { kind, endpoint: None, model: None, retries: 2, timeout_secs: 60, seed: None }
    }

    pub fn validate(&self) -> Result<(), String> {
        match (self.kind, &self.endpoint) {
            (OracleKind::HttpChat, None) => return Err(String::from("http-chat needs an endpoint")),
            (OracleKind::HttpChat, Some(_)) => {}
            (_, Some(_)) => return Err(format!("{} takes no endpoint", self.kind.as_str())),
            (_, None) => {}
        }
        if self.kind == OracleKind::HttpChat && self.model.is_none() {
            return Err(String::from("http-chat needs a model name"));
        }
        if self.kind == OracleKind::UniformRandom && self.seed.is_none() {
            return Err(String::from("uniform-random needs a seed"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Selection {
    /// 1-based over the offered options.
    pub option_index: usize,
    pub raw_reply: String,
    pub attempts: u32,
}

/// Verbalize candidates in order, build the prompt and ask `oracle`,
/// re-asking with the identical prompt up to `retries` times on a malformed
/// reply or a transport failure.
#[allow(clippy::too_many_arguments)]
pub fn select_meaning<O: Oracle + ?Sized>(
    oracle: &O,
    kb: &KnowledgeBase,
    sentence_id: &str,
    sentence_text: &str,
    word: &str,
    candidates: &[&CandidateMeaning],
    retries: u32,
    style: PromptStyle,
) -> Result<(PromptText, Selection), OracleError> {
    let prompt = prepare_prompt(kb, sentence_text, word, candidates, style)?;
    let selection = ask(oracle, sentence_id, word, &prompt, candidates.len(), retries)?;
    Ok((prompt, selection))
}

/// Verbalize `candidates` in order and lay them out as a prompt.
pub fn prepare_prompt(
    kb: &KnowledgeBase,
    sentence_text: &str,
    word: &str,
    candidates: &[&CandidateMeaning],
    style: PromptStyle,
) -> Result<PromptText, OracleError> {
    let options = candidates.iter().map(|c| verbalize_candidate(kb, &c.form)).collect::<Result<Vec<_>, _>>()?;
    Ok(build_prompt_styled(sentence_text, word, &options, style)?)
}

/// The retry loop on its own, for callers that already hold a prompt.
pub fn ask<O: Oracle + ?Sized>(
    oracle: &O,
    sentence_id: &str,
    word: &str,
    prompt: &PromptText,
    n_options: usize,
    retries: u32,
) -> Result<Selection, OracleError> {
    let mut last_reply = String::new();
    for attempt in 0..=retries {
        let request = OracleRequest { sentence_id, word, prompt, n_options, attempt };
        match oracle.query(&request) {
            Ok(reply) => {
                if let Some(option_index) = parse_response(&reply, n_options) {
                    return Ok(Selection { option_index, raw_reply: reply, attempts: attempt + 1 });
                }
                last_reply = reply;
            }
            Err(OracleError::Transport(msg)) => last_reply = format!("<transport error: {msg}>"),
            Err(other) => return Err(other),
        }
    }
    Err(OracleError::Exhausted { attempts: retries + 1, last_reply })
}
