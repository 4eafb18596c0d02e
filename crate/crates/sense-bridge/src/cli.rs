//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 on input or usage errors, 2 when the oracle
//! fails to produce a selection.

use std::cell::Cell;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use sense_bridge_core::candgen::AnnotatedSentence;
use sense_bridge_core::eval::score;
use sense_bridge_core::kb::{validate_kb, KnowledgeBase, PartOfSpeech};
use sense_bridge_core::logic::parse_sexpr_checked;
use sense_bridge_core::oracle::{
    FirstOptionOracle, Oracle, OracleConfig, OracleError, OracleKind, OracleRequest, PromptStyle, UniformRandomOracle,
};
use sense_bridge_core::tms::{
    disambiguate_sentence_observed, AnalysisStatus, FailureReason, PipelineConfig, SentenceAnalysis,
};
use sense_bridge_core::verbalize::verbalize_candidate;

use crate::formats::{self, FormatError};
use crate::http::{HttpChatOracle, API_KEY_VAR, ENDPOINT_VAR};
use crate::report::{self, Format};
use crate::runner;

#[derive(Debug, Parser)]
#[command(
    name = "sense-bridge",
    version,
    about = "Word sense disambiguation with a symbolic knowledge base and a selection oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Knowledge-base maintenance.
    Kb {
        #[command(subcommand)]
        command: KbCommand,
    },
    /// List the senses of a lemma in declaration order.
    Senses { kb: PathBuf, lemma: String, pos: PartOfSpeech },
    /// Verbalize a logical form given as an s-expression.
    Verbalize { kb: PathBuf, sexpr: String },
    /// Print the exact prompt sent for one target word.
    Prompt {
        kb: PathBuf,
        corpus: PathBuf,
        sentence_id: String,
        token_index: usize,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Disambiguate every sentence of a corpus.
    Disambiguate {
        kb: PathBuf,
        corpus: PathBuf,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Disambiguate a corpus and score it against gold annotations.
    Eval {
        kb: PathBuf,
        corpus: PathBuf,
        gold: PathBuf,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Random choice within externally predicted frames.
    Baseline {
        kb: PathBuf,
        corpus: PathBuf,
        gold: PathBuf,
        #[arg(long)]
        frame_preds: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        id_base: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Subcommand)]
enum KbCommand {
    /// Check a knowledge base and list its findings.
    Validate {
        kb: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// http-chat, scripted, uniform-random or first-option.
    #[arg(long)]
    oracle: Option<OracleKind>,
    /// Reply script for the scripted oracle.
    #[arg(long)]
    script: Option<PathBuf>,
    /// Seed for the uniform-random oracle.
    #[arg(long)]
    seed: Option<u64>,
    /// Model name sent to the http-chat endpoint.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value_t = 2)]
    retries: u32,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Wrap the target word in bold markers inside the prompt.
    #[arg(long)]
    bold_word: bool,
    /// First discourse-variable index of each sentence.
    #[arg(long, default_value_t = 1)]
    id_base: u64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Oracle(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Oracle(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Oracle(m) => m,
        }
    }
}

type Oracles = Box<dyn Oracle + Send + Sync>;

/// Run with `argv` (program name first); returns the exit code.
pub fn run_cli<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let _ = write!(stderr, "{}", e.render());
            return 1;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, CliError> {
    let src = read(path)?;
    in_file(path, formats::parse_kb(&src))
}

fn load_corpus(path: &Path) -> Result<Vec<AnnotatedSentence>, CliError> {
    let src = read(path)?;
    in_file(path, formats::parse_corpus(&src))
}

fn emit(stdout: &mut dyn Write, out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Input(format!("stdout: {e}"))),
    }
}

fn build_oracle(args: &OracleArgs, default: Option<OracleKind>) -> Result<Oracles, CliError> {
    let kind = args.oracle.or(default).ok_or_else(|| CliError::Input(String::from("--oracle is required")))?;
    let mut config = OracleConfig::new(kind);
    config.retries = args.retries;
    config.timeout_secs = args.timeout;
    config.seed = args.seed;
    config.model = args.model.clone();
    if kind == OracleKind::HttpChat {
        config.endpoint = std::env::var(ENDPOINT_VAR).ok().filter(|s| !s.is_empty());
        if config.endpoint.is_none() {
            return Err(CliError::Input(format!("http-chat needs the endpoint in ${ENDPOINT_VAR}")));
        }
    }
    config.validate().map_err(CliError::Input)?;
    if kind != OracleKind::Scripted && args.script.is_some() {
        return Err(CliError::Input(String::from("--script only applies to the scripted oracle")));
    }
    Ok(match kind {
        OracleKind::Scripted => {
            let path = args
                .script
                .as_deref()
                .ok_or_else(|| CliError::Input(String::from("the scripted oracle needs --script")))?;
            let src = read(path)?;
            Box::new(in_file(path, formats::parse_script(&src))?)
        }
        OracleKind::UniformRandom => Box::new(UniformRandomOracle { seed: config.seed.unwrap_or_default() }),
        OracleKind::FirstOption => Box::new(FirstOptionOracle),
        OracleKind::HttpChat => Box::new(HttpChatOracle::new(
            config.endpoint.as_deref().unwrap_or_default(),
            config.model.as_deref().unwrap_or_default(),
            std::env::var(API_KEY_VAR).ok().filter(|s| !s.is_empty()),
            Duration::from_secs(config.timeout_secs),
        )),
    })
}

fn pipeline_config(oracle: &OracleArgs, pipeline: &PipelineArgs) -> PipelineConfig {
    PipelineConfig {
        retries: oracle.retries,
        id_start: pipeline.id_base,
        prompt_style: PromptStyle { bold_word: pipeline.bold_word },
    }
}

fn oracle_failures(analyses: &[SentenceAnalysis]) -> Vec<String> {
    analyses
        .iter()
        .filter_map(|a| match &a.status {
            AnalysisStatus::Failed { reason: FailureReason::Oracle { token_index, message } } => {
                Some(format!("{} token {token_index}: {message}", a.sentence_id))
            }
            _ => None,
        })
        .collect()
}

fn oracle_status(analyses: &[SentenceAnalysis], stderr: &mut dyn Write) -> i32 {
    let failures = oracle_failures(analyses);
    for f in &failures {
        let _ = writeln!(stderr, "oracle failure: {f}");
    }
    if failures.is_empty() {
        0
    } else {
        2
    }
}

/// Passes queries through until `stop` is set.
struct Gate<'a> {
    inner: &'a dyn Oracle,
    stop: &'a Cell<bool>,
}

impl Oracle for Gate<'_> {
    fn query(&self, request: &OracleRequest<'_>) -> Result<String, OracleError> {
        if self.stop.get() {
            return Err(OracleError::Unscripted {
                sentence_id: request.sentence_id.to_string(),
                word: request.word.to_string(),
            });
        }
        self.inner.query(request)
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Kb { command: KbCommand::Validate { kb, format } } => {
            let src = read(&kb)?;
            let parsed = in_file(&kb, formats::parse_kb_unchecked(&src))?;
            let report = validate_kb(&parsed);
            let text = match format {
                Format::Text => report::validation_text(&report),
                Format::Json => report::to_json(&report),
            };
            emit(stdout, None, &text)?;
            Ok(if report.has_errors() { 1 } else { 0 })
        }
        Command::Senses { kb, lemma, pos } => {
            let kb = load_kb(&kb)?;
            let mut text = String::new();
            for (k, s) in kb.lookup_senses(&lemma, pos).iter().enumerate() {
                let frame = s.frame.as_deref().unwrap_or("-");
                let _ = writeln!(text, "{}. {}  concept {}  frame {frame}", k + 1, s.sense_id, s.head_concept);
                for a in &s.atoms {
                    let args: Vec<String> = a.args.iter().map(|x| x.to_string()).collect();
                    let _ = writeln!(text, "     ({} {})", a.predicate, args.join(" "));
                }
                for (role, c) in &s.role_constraints {
                    let _ = writeln!(text, "     requires {role} {c}");
                }
            }
            emit(stdout, None, &text)?;
            Ok(0)
        }
        Command::Verbalize { kb, sexpr } => {
            let kb = load_kb(&kb)?;
            let form = parse_sexpr_checked(&sexpr, &kb).map_err(|e| CliError::Input(e.to_string()))?;
            let text = verbalize_candidate(&kb, &form).map_err(|e| CliError::Input(e.to_string()))?;
            emit(stdout, None, &format!("{text}\n"))?;
            Ok(0)
        }
        Command::Prompt { kb, corpus, sentence_id, token_index, oracle, pipeline, out } => {
            let kb = load_kb(&kb)?;
            let sentences = load_corpus(&corpus)?;
            let sentence = sentences
                .iter()
                .find(|s| s.sentence_id == sentence_id)
                .ok_or_else(|| CliError::Input(format!("no sentence \"{sentence_id}\" in {}", corpus.display())))?;
            if sentence.target(token_index).is_none() {
                return Err(CliError::Input(format!("token {token_index} is not a target of \"{sentence_id}\"")));
            }
            let inner = build_oracle(&oracle, Some(OracleKind::FirstOption))?;
            let config = pipeline_config(&oracle, &pipeline);
            let stop = Cell::new(false);
            let gate = Gate { inner: inner.as_ref(), stop: &stop };
            let mut captured = None;
            let analysis = disambiguate_sentence_observed(&kb, &gate, sentence, &config, &mut |event| {
                if event.token_index == token_index && captured.is_none() {
                    captured = Some(event.prompt.clone());
                    stop.set(true);
                }
            });
            match captured {
                Some(prompt) => {
                    emit(stdout, out.as_deref(), prompt.as_str())?;
                    Ok(0)
                }
                None => match analysis.status {
                    AnalysisStatus::Failed { reason: FailureReason::Oracle { token_index: t, message } } => {
                        Err(CliError::Oracle(format!(
                            "oracle failed at token {t} before reaching token {token_index}: {message}"
                        )))
                    }
                    _ => Err(CliError::Input(format!(
                        "no prompt is sent for token {token_index}: it is resolved without the oracle"
                    ))),
                },
            }
        }
        Command::Disambiguate { kb, corpus, oracle, pipeline, output } => {
            let kb = load_kb(&kb)?;
            let sentences = load_corpus(&corpus)?;
            let o = build_oracle(&oracle, None)?;
            let config = pipeline_config(&oracle, &pipeline);
            let analyses = runner::disambiguate_corpus(&kb, o.as_ref(), &sentences, &config, output.jobs);
            let text = match output.format {
                Format::Json => report::to_json(&analyses),
                Format::Text => report::analyses_text(&analyses),
            };
            emit(stdout, output.out.as_deref(), &text)?;
            Ok(oracle_status(&analyses, stderr))
        }
        Command::Eval { kb, corpus, gold, oracle, pipeline, output } => {
            let kb = load_kb(&kb)?;
            let sentences = load_corpus(&corpus)?;
            let gold_src = read(&gold)?;
            let gold_items = in_file(&gold, formats::parse_gold(&gold_src))?;
            let o = build_oracle(&oracle, None)?;
            let config = pipeline_config(&oracle, &pipeline);
            let analyses = runner::disambiguate_corpus(&kb, o.as_ref(), &sentences, &config, output.jobs);
            let report = score(&analyses, &gold_items, &kb).map_err(|e| CliError::Input(e.to_string()))?;
            let text = match output.format {
                Format::Json => report::to_json(&report),
                Format::Text => report::eval_text(&report),
            };
            emit(stdout, output.out.as_deref(), &text)?;
            Ok(oracle_status(&analyses, stderr))
        }
        Command::Baseline { kb, corpus, gold, frame_preds, seed, trials, id_base, output } => {
            let kb = load_kb(&kb)?;
            let sentences = load_corpus(&corpus)?;
            let gold_src = read(&gold)?;
            let gold_items = in_file(&gold, formats::parse_gold(&gold_src))?;
            let preds_src = read(&frame_preds)?;
            let preds = in_file(&frame_preds, formats::parse_frame_predictions(&preds_src))?;
            let sets =
                runner::candidate_senses(&kb, &sentences, id_base).map_err(|e| CliError::Input(e.to_string()))?;
            let report = runner::baseline(&sets, &preds, &gold_items, &kb, seed, trials, output.jobs)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let text = match output.format {
                Format::Json => report::to_json(&report),
                Format::Text => report::baseline_text(&report),
            };
            emit(stdout, output.out.as_deref(), &text)?;
            Ok(0)
        }
    }
}
