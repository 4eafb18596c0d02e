//! Acceptance criteria. Runs as a plain binary and prints one verdict line
//! per criterion; exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use common::{cli, cli_env, fixture, fx, read_fixture, stdout};
use sense_bridge::formats::{parse_corpus, parse_frame_predictions, parse_gold, parse_kb};
use sense_bridge::runner;
use sense_bridge_core::candgen::{generate_choice_sets, AnnotatedSentence, ChoiceStatus, TargetWord};
use sense_bridge_core::eval::score;
use sense_bridge_core::kb::{KnowledgeBase, Role};
use sense_bridge_core::logic::{
    instantiate_with_head, parse_sexpr, parse_sexpr_checked, render_sexpr, Atom, Bindings, CandidateMeaning,
    DiscourseVar, LogicalForm, Term,
};
use sense_bridge_core::oracle::{ask, parse_response, OracleError, ScriptedOracle, UniformRandomOracle};
use sense_bridge_core::tms::{
    disambiguate_sentence, disambiguate_sentence_observed, AnalysisStatus, DisambiguationState, FailureReason,
    Justification, PipelineConfig, SentenceAnalysis, TargetOutcome,
};
use sense_bridge_core::verbalize::verbalize_candidate;

enum Verdict {
    Pass(String),
    Skip(String),
}

type Outcome = Result<Verdict, String>;

type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn traffic_kb() -> KnowledgeBase {
    parse_kb(&read_fixture("traffic.kb")).unwrap()
}

fn mini_sentence(id: &str) -> AnnotatedSentence {
    parse_corpus(&read_fixture("mini.corpus")).unwrap().into_iter().find(|s| s.sentence_id == id).unwrap()
}

const TURN_SEXPRS: [&str; 3] = [
    "(and (isa turn38450 TurningSomethingIntoSomethingElse) (objectActedOn turn38450 traffic-light38442))",
    "(and (isa turn38450 IntrinsicStateChangeEvent) (objectActedOn turn38450 traffic-light38442))",
    "(and (isa turn38450 SubmittingSomething) (relationInstanceExists infoTransferred turn38450 Document))",
];

const TURN_TEXTS: [&str; 3] = [
    "turn is a turning; traffic light is acted on during turned",
    "turn is a becoming; traffic light is acted on during turned",
    "turn is a submitting",
];

fn ac1_candidates() -> Outcome {
    let kb = traffic_kb();
    let s01 = mini_sentence("s01");
    let sets = generate_choice_sets(&kb, &s01, &mut s01.id_gen(1)).map_err(|e| e.to_string())?;
    let turn = sets.iter().find(|s| s.target.token_index == 3).ok_or("no choice set for turn")?;
    let rendered: Vec<String> = turn.candidates.iter().map(|c| render_sexpr(&c.form)).collect();
    ensure!(rendered == TURN_SEXPRS, "renderings differ: {rendered:#?}");
    let texts: Vec<String> = turn
        .candidates
        .iter()
        .map(|c| verbalize_candidate(&kb, &c.form))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure!(texts == TURN_TEXTS, "verbalizations differ: {texts:#?}");
    Ok(Verdict::Pass(format!("{} candidates byte-equal", rendered.len())))
}

fn ac2_prompt() -> Outcome {
    let golden = std::fs::read(fixture("golden/traffic-light.prompt")).unwrap();
    let out = cli(&["prompt", &fx("traffic.kb"), &fx("mini.corpus"), "s01", "3"]);
    ensure!(out.status.code() == Some(0), "exit {:?}", out.status.code());
    ensure!(out.stdout == golden, "prompt bytes differ:\n{}", stdout(&out));
    ensure!(golden.ends_with(b"Reply only with the option number."), "golden has the wrong ending");

    // the pipeline sends the same bytes
    let kb = traffic_kb();
    let mut sent = Vec::new();
    let oracle = ScriptedOracle::new().with("s01", "turn", &["2"]);
    disambiguate_sentence_observed(&kb, &oracle, &mini_sentence("s01"), &PipelineConfig::default(), &mut |e| {
        sent.push(e.prompt.as_str().as_bytes().to_vec())
    });
    ensure!(sent == [golden.clone()], "pipeline prompt differs from the command output");
    Ok(Verdict::Pass(format!("{} bytes", golden.len())))
}

fn ac3_headline_arithmetic() -> Outcome {
    let kb = parse_kb(&read_fixture("headline.kb")).unwrap();
    let gold = parse_gold(&read_fixture("headline.gold")).unwrap();
    ensure!(gold.len() == 114, "{} gold items", gold.len());

    // a synthetic result set: 18 items in the wrong frame, 2 more with the
    // wrong sense inside the right frame
    let mut analyses: BTreeMap<String, SentenceAnalysis> = BTreeMap::new();
    for (i, g) in gold.iter().enumerate() {
        let lemma = g.gold_sense_id.split('.').next().unwrap().to_string();
        let (suffix, frame) = match i {
            0..=17 => ("C", "FN_Secondary"),
            18..=19 => ("B", "FN_Primary"),
            _ => ("A", "FN_Primary"),
        };
        let a = analyses.entry(g.sentence_id.clone()).or_insert_with(|| SentenceAnalysis {
            sentence_id: g.sentence_id.clone(),
            targets: vec![],
            prune_log: vec![],
            status: AnalysisStatus::Complete,
            oracle_calls: 0,
        });
        a.targets.push(TargetOutcome {
            lemma: lemma.clone(),
            token_index: g.token_index,
            pos: sense_bridge_core::kb::PartOfSpeech::Noun,
            candidates: 3,
            sense_id: Some(format!("{lemma}.n/{suffix}")),
            frame: Some(frame.to_string()),
            sexpr: None,
            candidate_number: None,
            option_index: None,
            options_offered: None,
            attempts: 1,
            raw_reply: None,
            justification: Some(Justification::OracleSelection),
        });
    }
    let analyses: Vec<SentenceAnalysis> = analyses.into_values().collect();
    let report = score(&analyses, &gold, &kb).map_err(|e| e.to_string())?;
    ensure!(
        (report.n_items, report.coarse.correct, report.fine.correct) == (114, 96, 94),
        "counts {}/{}/{}",
        report.n_items,
        report.coarse.correct,
        report.fine.correct
    );
    ensure!(report.coarse_percent == "84.2%", "coarse {}", report.coarse_percent);
    ensure!(report.fine_percent == "82.5%", "fine {}", report.fine_percent);

    let out = cli(&[
        "eval",
        &fx("headline.kb"),
        &fx("headline.corpus"),
        &fx("headline.gold"),
        "--oracle",
        "scripted",
        "--script",
        &fx("headline.script"),
    ]);
    let text = stdout(&out);
    ensure!(out.status.code() == Some(0), "eval exit {:?}", out.status.code());
    ensure!(text.contains("Items: 114"), "item count missing:\n{text}");
    ensure!(text.contains("84.2%") && text.contains("82.5%"), "percentages missing:\n{text}");
    Ok(Verdict::Pass(String::from("114/96/94 -> 84.2% / 82.5%")))
}

fn ac4_baseline() -> Outcome {
    let kb = parse_kb(&read_fixture("baseline.kb")).unwrap();
    let corpus = parse_corpus(&read_fixture("baseline.corpus")).unwrap();
    let gold = parse_gold(&read_fixture("baseline.gold")).unwrap();
    let preds = parse_frame_predictions(&read_fixture("baseline.frames")).unwrap();
    let sets = runner::candidate_senses(&kb, &corpus, 1).map_err(|e| e.to_string())?;

    let analytic =
        sense_bridge_core::eval::analytic_random_expectation(&sets, &preds, &gold, &kb).map_err(|e| e.to_string())?;
    ensure!((*analytic.numer(), *analytic.denom()) == (1, 4), "analytic expectation {analytic}");

    let mut notes = Vec::new();
    for (trials, tolerance) in [(10_000u64, 0.02), (100_000, 0.01)] {
        let reports: Vec<_> = [1, 2, 4]
            .into_iter()
            .map(|jobs| runner::baseline(&sets, &preds, &gold, &kb, 42, trials, jobs))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ensure!(reports.windows(2).all(|w| w[0] == w[1]), "reports differ across jobs at {trials} trials");
        let again = runner::baseline(&sets, &preds, &gold, &kb, 42, trials, 1).map_err(|e| e.to_string())?;
        ensure!(again == reports[0], "rerun differs at {trials} trials");
        let mean = reports[0].mean_fine_f64();
        let within = (mean - 0.25).abs() <= tolerance;
        ensure!(within, "mean {mean} at {trials} trials is outside ±{tolerance}");
        notes.push(format!("{trials}: {mean:.4}"));
    }

    let run = |jobs: &str| {
        cli(&[
            "baseline",
            &fx("baseline.kb"),
            &fx("baseline.corpus"),
            &fx("baseline.gold"),
            "--frame-preds",
            &fx("baseline.frames"),
            "--seed",
            "42",
            "--trials",
            "10000",
            "--jobs",
            jobs,
        ])
    };
    let (a, b) = (run("1"), run("4"));
    ensure!(a.status.code() == Some(0) && a.stdout == b.stdout, "command output differs across jobs");
    Ok(Verdict::Pass(format!("expectation 1/4; {}", notes.join(", "))))
}

fn var_strategy() -> impl Strategy<Value = DiscourseVar> {
    ("[a-z]{1,7}(-[a-z]{1,5})?", 1u64..100_000_000).prop_map(|(l, i)| DiscourseVar::new(&l, i).unwrap())
}

/// Meanings instantiated from the fixture senses with random variables.
fn kb_meaning(kb: &KnowledgeBase) -> impl Strategy<Value = CandidateMeaning> + '_ {
    (0..kb.senses().len(), var_strategy(), var_strategy(), var_strategy()).prop_map(move |(i, head, s, o)| {
        let sense = &kb.senses()[i];
        let bindings: Bindings = BTreeMap::from([(Role::Subj, Term::Var(s)), (Role::Obj, Term::Var(o))]);
        instantiate_with_head(kb, sense, head, &bindings).unwrap()
    })
}

/// Meanings over arbitrary symbols.
fn free_meaning() -> impl Strategy<Value = CandidateMeaning> {
    let concept = "[A-Z][A-Za-z]{0,9}(-[A-Z][a-z]{0,5})?";
    let predicate = "[a-z][A-Za-z]{0,12}".prop_filter("reserved", |p| p != "and");
    let term = prop_oneof![
        var_strategy().prop_map(Term::Var),
        concept.prop_map(Term::Concept),
        predicate.clone().prop_map(Term::Predicate),
    ];
    let extra = (predicate, proptest::collection::vec(term, 0..3));
    (var_strategy(), concept, proptest::collection::vec(extra, 0..4)).prop_map(|(head, c, rest)| {
        let mut atoms = vec![Atom::untyped("isa", vec![Term::Var(head.clone()), Term::Concept(c)])];
        for (p, mut args) in rest {
            args.insert(0, Term::Var(head.clone()));
            atoms.push(Atom::untyped(&p, args));
        }
        CandidateMeaning { sense_id: String::from("free"), frame: None, form: LogicalForm::new(atoms).unwrap() }
    })
}

fn seeded_runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config::with_cases(cases), TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn ac5_round_trip() -> Outcome {
    let kb = traffic_kb();
    let mut runner = seeded_runner(500);
    let result = runner.run(&kb_meaning(&kb), |m| {
        let back = parse_sexpr_checked(&render_sexpr(&m.form), &kb).unwrap();
        prop_assert_eq!(back, m.form);
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    let mut runner = seeded_runner(500);
    runner
        .run(&free_meaning(), |m| {
            let back = parse_sexpr(&render_sexpr(&m.form)).unwrap();
            prop_assert_eq!(back, m.form);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(Verdict::Pass(String::from("1000 meanings (500 from fixture senses, 500 free)")))
}

/// Lemma and part of speech of every fixture word with senses, plus the
/// entity lemmas a random link may point at.
fn scenario_pool(kb: &KnowledgeBase) -> (Vec<(String, sense_bridge_core::kb::PartOfSpeech)>, Vec<String>) {
    let mut words: Vec<_> = kb.senses().iter().map(|s| (s.lemma.clone(), s.pos)).collect();
    words.sort();
    words.dedup();
    let entities = kb.entities().iter().map(|(l, _)| l.clone()).collect();
    (words, entities)
}

#[derive(Debug, Clone)]
struct ScenarioSpec {
    words: Vec<usize>,
    /// Per word and role: None, a link to another word, or to an entity.
    links: Vec<[Option<(bool, usize)>; 2]>,
    seed: u64,
}

fn scenario_strategy(n_words: usize, n_entities: usize) -> impl Strategy<Value = ScenarioSpec> {
    let link = proptest::option::weighted(0.7, (prop::bool::weighted(0.8), 0..64usize));
    (2usize..=3)
        .prop_flat_map(move |k| {
            (
                proptest::collection::btree_set(0..n_words, k),
                proptest::collection::vec([link.clone(), link.clone()], k),
                any::<u64>(),
            )
        })
        .prop_map(move |(words, links, seed)| {
            let words: Vec<usize> = words.into_iter().collect();
            let k = words.len();
            let links = links
                .into_iter()
                .enumerate()
                .map(|(i, roles)| {
                    roles.map(|l| {
                        l.map(
                            |(to_word, n)| {
                                if to_word {
                                    (true, (i + 1 + n % (k - 1)) % k)
                                } else {
                                    (false, n % n_entities)
                                }
                            },
                        )
                    })
                })
                .collect();
            ScenarioSpec { words, links, seed }
        })
}

fn build_scenario(
    spec: &ScenarioSpec,
    words: &[(String, sense_bridge_core::kb::PartOfSpeech)],
    entities: &[String],
) -> Option<AnnotatedSentence> {
    let lemmas: Vec<&str> = spec.words.iter().map(|&w| words[w].0.as_str()).collect();
    let mut unique = lemmas.clone();
    unique.sort();
    unique.dedup();
    if unique.len() != lemmas.len() {
        return None;
    }
    let mut sentence = AnnotatedSentence::new(&format!("x{}", spec.seed), &lemmas.join(" "));
    for (i, &w) in spec.words.iter().enumerate() {
        let mut links = BTreeMap::new();
        for (role, link) in [Role::Subj, Role::Obj].into_iter().zip(spec.links[i]) {
            if let Some((to_word, j)) = link {
                let filler = if to_word { lemmas[j].to_string() } else { entities[j].clone() };
                links.insert(role, filler);
            }
        }
        sentence.targets.push(TargetWord {
            token_index: i,
            surface: lemmas[i].to_string(),
            lemma: lemmas[i].to_string(),
            pos: words[w].1,
            links,
        });
    }
    Some(sentence)
}

fn check_state(kb: &KnowledgeBase, st: &DisambiguationState) -> Result<(), String> {
    let mut again = st.clone();
    let delta = again.propagate(kb);
    ensure!(delta.pruned.is_empty() && delta.auto_committed.is_empty(), "propagate is not idempotent");
    ensure!(&again == st, "second propagate changed the state");
    for entry in st.prune_log() {
        ensure!(st.verify_prune(kb, entry), "prune {entry:?} does not re-verify");
    }
    Ok(())
}

fn ac6_tms() -> Outcome {
    let kb = traffic_kb();
    let (words, entities) = scenario_pool(&kb);
    let mut runner = seeded_runner(200);
    let stats = std::cell::RefCell::new((0usize, 0usize, 0usize, 0usize));
    runner
        .run(&scenario_strategy(words.len(), entities.len()), |spec| {
            let Some(sentence) = build_scenario(&spec, &words, &entities) else { return Ok(()) };
            let sets = generate_choice_sets(&kb, &sentence, &mut sentence.id_gen(1)).unwrap();
            let mut base = DisambiguationState::new(sentence.clone(), sets);
            base.propagate(&kb);
            check_state(&kb, &base).map_err(TestCaseError::fail)?;

            let open: Vec<(usize, Vec<usize>)> = base
                .choice_sets()
                .iter()
                .filter(|c| c.status == ChoiceStatus::Open && base.survivors(c.target.token_index).len() >= 2)
                .map(|c| (c.target.token_index, base.survivors(c.target.token_index)))
                .collect();
            for (token, alive) in open {
                for pick in alive {
                    let mut st = base.clone();
                    st.commit_selection(token, pick, Justification::OracleSelection).unwrap();
                    st.propagate(&kb);
                    check_state(&kb, &st).map_err(TestCaseError::fail)?;
                    stats.borrow_mut().1 += usize::from(!st.prune_log().is_empty());
                    st.retract_selection(&kb, token).unwrap();
                    prop_assert_eq!(&st, &base, "retraction did not restore the state");
                    stats.borrow_mut().2 += 1;
                }
            }

            let analysis = disambiguate_sentence(
                &kb,
                &UniformRandomOracle { seed: spec.seed },
                &sentence,
                &PipelineConfig::default(),
            );
            let committed =
                analysis.targets.iter().filter(|t| t.justification == Some(Justification::OracleSelection)).count();
            prop_assert_eq!(analysis.oracle_calls as usize, committed);
            if let AnalysisStatus::Failed { reason } = &analysis.status {
                let inconsistent = matches!(reason, FailureReason::Inconsistent { .. });
                prop_assert!(inconsistent, "unexpected failure {:?}", reason);
            }
            stats.borrow_mut().0 += 1;
            stats.borrow_mut().3 += analysis.oracle_calls as usize;
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    let (scenarios, pruning, retractions, calls) = stats.into_inner();
    ensure!(scenarios >= 150, "only {scenarios} usable scenarios");
    ensure!(pruning >= 20, "only {pruning} commitments pruned anything");
    Ok(Verdict::Pass(format!(
        "{scenarios} scenarios, {retractions} commit/retract pairs ({pruning} with prunes), {calls} oracle calls"
    )))
}

fn eval_mini() -> std::process::Output {
    cli(&[
        "eval",
        &fx("traffic.kb"),
        &fx("mini.corpus"),
        &fx("mini.gold"),
        "--oracle",
        "scripted",
        "--script",
        &fx("mini.script"),
    ])
}

fn ac7_end_to_end() -> Outcome {
    let golden = read_fixture("golden/mini-eval.txt");
    let (a, b) = (eval_mini(), eval_mini());
    ensure!(a.status.code() == Some(0), "eval exit {:?}", a.status.code());
    ensure!(a.stdout == b.stdout, "two runs differ");
    ensure!(stdout(&a) == golden, "report differs from the golden file:\n{}", stdout(&a));

    let corpus = parse_corpus(&read_fixture("mini.corpus")).unwrap();
    ensure!(corpus.len() >= 10, "{} sentences", corpus.len());
    let out = cli(&[
        "disambiguate",
        &fx("traffic.kb"),
        &fx("mini.corpus"),
        "--oracle",
        "scripted",
        "--script",
        &fx("mini.script"),
        "--format",
        "json",
    ]);
    ensure!(stdout(&out) == read_fixture("golden/mini-analyses.json"), "analyses differ from the golden file");
    let analyses: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let complaint = analyses
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["sentence_id"] == "s03")
        .and_then(|a| a["targets"].as_array()?.iter().find(|t| t["lemma"] == "complaint").cloned())
        .ok_or("no complaint target")?;
    let sexpr = complaint["sexpr"].as_str().unwrap_or_default();
    ensure!(
        sexpr == "(and (isa complaint57061 Complaint) (recipientOfInfo complaint57061 store-manager57126))",
        "complaint selected {sexpr}"
    );
    Ok(Verdict::Pass(format!("{} sentences, report and analyses match golden files", corpus.len())))
}

fn ac8_oracle_robustness() -> Outcome {
    let kb = traffic_kb();
    let s01 = mini_sentence("s01");
    let config = PipelineConfig::default();

    let retried = ScriptedOracle::new().with("s01", "turn", &["Let me think.", "**2**"]);
    let a = disambiguate_sentence(&kb, &retried, &s01, &config);
    let t = a.target(3).ok_or("no turn target")?;
    ensure!(a.is_complete() && t.attempts == 2 && t.option_index == Some(2), "retry path: {t:?}");

    let hopeless = ScriptedOracle::new().with("s01", "turn", &["hmm", "none of these", "9"]);
    let a = disambiguate_sentence(&kb, &hopeless, &s01, &config);
    match &a.status {
        AnalysisStatus::Failed { reason: FailureReason::Oracle { token_index: 3, message } }
            if message.contains("after 3 attempts") => {}
        other => return Err(format!("exhaustion path: {other:?}")),
    }
    let prompt = sense_bridge_core::oracle::build_prompt("S.", "w", &["a".into(), "b".into()]).unwrap();
    let err = ask(&hopeless, "s01", "turn", &prompt, 2, 2).unwrap_err();
    ensure!(matches!(err, OracleError::Exhausted { attempts: 3, .. }), "{err:?}");

    let mut checked = 0u32;
    for n in 1..=99usize {
        for k in 1..=n {
            for reply in [format!("{k}"), format!("Option {k}."), format!(" {k}\n"), format!("I pick {k} because")] {
                ensure!(parse_response(&reply, n) == Some(k), "parse_response({reply:?}, {n})");
                checked += 1;
            }
        }
        ensure!(parse_response(&format!("{}", n + 1), n).is_none(), "accepted {} for n={n}", n + 1);
        ensure!(parse_response("0", n).is_none(), "accepted 0");
    }
    Ok(Verdict::Pass(format!("retry and exhaustion paths; {checked} replies parsed")))
}

fn ac9_live() -> Outcome {
    let Ok(endpoint) = std::env::var("SENSE_BRIDGE_ENDPOINT") else {
        return Ok(Verdict::Skip(String::from("SENSE_BRIDGE_ENDPOINT is not set")));
    };
    let model = std::env::var("SENSE_BRIDGE_MODEL").unwrap_or_else(|_| String::from("gpt-4o-mini"));
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("traffic.corpus");
    std::fs::write(
        &corpus,
        "(sentence \"s01\" :text \"The traffic light turned yellow.\" \
         :targets ((3 turn verb :subj traffic-light)) :ids ((turn 38450) (traffic-light 38442)))\n",
    )
    .unwrap();
    let mut env = vec![("SENSE_BRIDGE_ENDPOINT", endpoint.as_str())];
    let key = std::env::var("SENSE_BRIDGE_API_KEY").unwrap_or_default();
    if !key.is_empty() {
        env.push(("SENSE_BRIDGE_API_KEY", key.as_str()));
    }
    let out = cli_env(
        &[
            "disambiguate",
            &fx("traffic.kb"),
            corpus.to_str().unwrap(),
            "--oracle",
            "http-chat",
            "--model",
            &model,
            "--format",
            "json",
        ],
        &env,
    );
    ensure!(out.status.code() == Some(0), "exit {:?}: {}", out.status.code(), common::stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let option = v[0]["targets"][0]["option_index"].as_u64().ok_or("no option index")?;
    ensure!((1..=3).contains(&option), "option {option}");
    Ok(Verdict::Pass(format!("{model} chose option {option}")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1", "candidate renderings and verbalizations", Duration::from_secs(1), ac1_candidates),
        ("AC2", "prompt bytes", Duration::from_secs(1), ac2_prompt),
        ("AC3", "headline accuracy arithmetic", Duration::from_secs(1), ac3_headline_arithmetic),
        ("AC4", "random-within-frame baseline", Duration::from_secs(10), ac4_baseline),
        ("AC5", "render/parse round trip", Duration::from_secs(5), ac5_round_trip),
        ("AC6", "truth maintenance properties", Duration::from_secs(10), ac6_tms),
        ("AC7", "end-to-end determinism", Duration::from_secs(5), ac7_end_to_end),
        ("AC8", "oracle robustness", Duration::from_secs(5), ac8_oracle_robustness),
        ("AC9", "live oracle smoke", Duration::from_secs(300), ac9_live),
    ];
    let mut failures = 0;
    for (id, title, limit, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let timing = format!("{:.2}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs());
        match outcome {
            Ok(Verdict::Pass(detail)) if elapsed <= limit => println!("PASS {id} {title} ({timing}): {detail}"),
            Ok(Verdict::Pass(detail)) => {
                failures += 1;
                println!("FAIL {id} {title} ({timing}): too slow; {detail}");
            }
            Ok(Verdict::Skip(why)) => println!("SKIP {id} {title}: {why}"),
            Err(why) => {
                failures += 1;
                println!("FAIL {id} {title} ({timing}): {why}");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
