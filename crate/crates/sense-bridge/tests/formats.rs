mod common;

use common::read_fixture;
use sense_bridge::formats::{
    dump_kb, parse_corpus, parse_frame_predictions, parse_gold, parse_kb, parse_kb_unchecked, parse_script, FormatError,
};
use sense_bridge_core::eval::ErrorCategory;
use sense_bridge_core::kb::{validate_kb, FindingKind, PartOfSpeech, Role};
use sense_bridge_core::oracle::{build_prompt, Oracle, OracleRequest};

#[test]
fn fixture_kb_is_clean() {
    let kb = parse_kb(&read_fixture("traffic.kb")).unwrap();
    assert!(validate_kb(&kb).is_clean());
    let turn: Vec<&str> = kb.lookup_senses("turn", PartOfSpeech::Verb).iter().map(|s| s.sense_id.as_str()).collect();
    assert_eq!(
        turn,
        [
            "turn.v/TurningSomethingIntoSomethingElse",
            "turn.v/IntrinsicStateChangeEvent",
            "turn.v/SubmittingSomething",
            "turn.v/FlippingSomething",
        ]
    );
    assert!(kb.lookup_senses("turn", PartOfSpeech::Noun).is_empty());
    assert!(kb.is_subconcept("TrafficLight", "PhysicalObject").unwrap());
    assert!(!kb.is_subconcept("TrafficLight", "InformationBearingThing").unwrap());
}

#[test]
fn dump_is_a_fixpoint() {
    let kb = parse_kb(&read_fixture("traffic.kb")).unwrap();
    let dumped = dump_kb(&kb);
    let again = parse_kb(&dumped).unwrap();
    assert_eq!(dump_kb(&again), dumped);
    assert_eq!(again.senses().len(), kb.senses().len());
}

#[test]
fn forward_references_load_like_ordered_ones() {
    let ordered = "(concept Thing :gloss \"thing\" :parents ())\n\
                   (concept Plant :gloss \"plant\" :parents (Thing))\n\
                   (predicate isa :arity 2 :template \"{1} is a {2:gloss}\")\n\
                   (frame FN_Plants :desc \"Plants.\")\n\
                   (sense grass.n/Plant :lemma grass :pos noun :concept Plant :frame FN_Plants :atoms ((isa EVENT Plant)))\n";
    let reversed: String = ordered.lines().rev().map(|l| format!("{l}\n")).collect();
    let a = parse_kb(ordered).unwrap();
    let b = parse_kb(&reversed).unwrap();
    assert_eq!(dump_kb(&a), dump_kb(&b));
}

#[test]
fn unrelated_additions_do_not_change_lookup() {
    let base = read_fixture("traffic.kb");
    let kb = parse_kb(&base).unwrap();
    let extended = format!(
        "{base}\n(concept Zeppelin :gloss \"zeppelin\" :parents (Device))\n\
         (sense airship.n/Zeppelin :lemma airship :pos noun :concept Zeppelin :atoms ((isa EVENT Zeppelin)))\n"
    );
    let kb2 = parse_kb(&extended).unwrap();
    for lemma in ["turn", "grass", "complaint", "window"] {
        for pos in [PartOfSpeech::Noun, PartOfSpeech::Verb] {
            assert_eq!(kb.lookup_senses(lemma, pos), kb2.lookup_senses(lemma, pos));
        }
    }
}

#[test]
fn syntax_errors_carry_positions() {
    let err = parse_kb("(concept Thing :gloss \"thing\" :parents ())\n(concept Plant :gloss").unwrap_err();
    match err {
        FormatError::Syntax { pos, .. } => assert_eq!(pos.line, 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(parse_kb("(widget X)").is_err());
    assert!(parse_kb("(concept Thing :gloss \"t\" :parents () :colour red)").is_err());
}

#[test]
fn semantic_errors_carry_source_lines() {
    let src = "(concept Thing :gloss \"thing\" :parents ())\n\
               (concept Loop :gloss \"loop\" :parents (Ghost))\n";
    let kb = parse_kb_unchecked(src).unwrap();
    let report = validate_kb(&kb);
    let finding = report.first_error().unwrap();
    assert_eq!(finding.location.line, Some(2));
    assert!(matches!(finding.finding, FindingKind::DanglingReference { .. }));
    assert!(matches!(parse_kb(src), Err(FormatError::Kb(_))));
}

#[test]
fn corpus_records() {
    let corpus = parse_corpus(&read_fixture("mini.corpus")).unwrap();
    assert_eq!(corpus.len(), 12);
    let s03 = corpus.iter().find(|s| s.sentence_id == "s03").unwrap();
    let complaint = s03.target(4).unwrap();
    assert_eq!(complaint.lemma, "complaint");
    assert_eq!(complaint.surface, "complaint");
    assert_eq!(complaint.links.get(&Role::Obj).map(String::as_str), Some("store-manager"));
    assert_eq!(s03.pinned_ids.get("complaint"), Some(&57061));

    assert!(parse_corpus("(sentence \"a\" :text \"x y\" :targets ((5 y noun)))").is_err());
    assert!(parse_corpus("(sentence \"a\" :text \"x y\" :targets ((1 y noun) (0 x noun)))").is_err());
    let dup = "(sentence \"a\" :text \"x\" :targets ())\n(sentence \"a\" :text \"y\" :targets ())";
    assert!(parse_corpus(dup).is_err());
}

#[test]
fn gold_and_prediction_records() {
    let gold = parse_gold(&read_fixture("mini.gold")).unwrap();
    assert_eq!(gold.len(), 20);
    let window = gold.iter().find(|g| g.sentence_id == "s04" && g.token_index == 7).unwrap();
    assert_eq!(window.error_category, Some(ErrorCategory::PhysicalContext));
    let shadow = gold.iter().find(|g| g.sentence_id == "s02" && g.token_index == 4).unwrap();
    assert_eq!(shadow.gold_frame, None);

    let preds = parse_frame_predictions(&read_fixture("baseline.frames")).unwrap();
    assert_eq!(preds.len(), 3);
    let none = parse_frame_predictions("(frame-pred \"b\" 2 none)").unwrap();
    assert_eq!(none[0].predicted_frame, None);
}

#[test]
fn script_records() {
    let script = parse_script(&read_fixture("mini.script")).unwrap();
    let prompt = build_prompt("x", "tolerate", &["a".into(), "b".into()]).unwrap();
    let req = |attempt| OracleRequest { sentence_id: "s07", word: "tolerate", prompt: &prompt, n_options: 2, attempt };
    assert_eq!(script.query(&req(0)).unwrap(), "I am not sure.");
    assert_eq!(script.query(&req(1)).unwrap(), "2");
    assert_eq!(script.query(&req(5)).unwrap(), "2");
    assert!(parse_script("(reply \"a\" w \"1\")\n(reply \"a\" w \"2\")").is_err());
}
