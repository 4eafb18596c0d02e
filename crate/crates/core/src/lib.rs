//! Core of a hybrid word sense disambiguation pipeline.
//!
//! A symbolic knowledge base proposes candidate meanings for each ambiguous
//! word as logical forms ([`candgen`], [`logic`]). The candidates are
//! rendered as short English options ([`verbalize`]) and a selection oracle,
//! typically a language model, picks one ([`oracle`]). A truth-maintenance
//! state ([`tms`]) records each choice, prunes candidates that no longer fit
//! and can retract choices. [`eval`] scores the results at frame and sense
//! granularity.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, HTTP and the
//! command line live in the `sense-bridge` crate.

#![no_std]

extern crate alloc;

pub mod candgen;
pub mod eval;
pub mod kb;
pub mod logic;
pub mod oracle;
pub mod rng;
pub mod sexpr;
pub mod tms;
pub mod verbalize;

pub use candgen::{generate_choice_sets, link_arguments, AnnotatedSentence, ChoiceSet, ChoiceStatus, TargetWord};
pub use eval::{score, EvalReport, GoldAnnotation};
pub use kb::{validate_kb, KnowledgeBase, PartOfSpeech, Role};
pub use logic::{parse_sexpr, render_sexpr, CandidateMeaning, LogicalForm};
pub use oracle::{Oracle, OracleError, ScriptedOracle};
pub use tms::{disambiguate_sentence, DisambiguationState, PipelineConfig, SentenceAnalysis};
