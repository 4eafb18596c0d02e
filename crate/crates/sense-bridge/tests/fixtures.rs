mod common;

use std::collections::BTreeSet;

use common::read_fixture;
use sense_bridge::formats::{parse_corpus, parse_kb};
use sense_bridge_core::candgen::generate_choice_sets;
use sense_bridge_core::verbalize::{verbalize_atom, verbalize_candidate};

const PAIRS: [(&str, &str); 3] =
    [("traffic.kb", "mini.corpus"), ("headline.kb", "headline.corpus"), ("baseline.kb", "baseline.corpus")];

#[test]
fn choice_set_verbalizations_are_distinct_and_clean() {
    for (kb_file, corpus_file) in PAIRS {
        let kb = parse_kb(&read_fixture(kb_file)).unwrap();
        for sentence in parse_corpus(&read_fixture(corpus_file)).unwrap() {
            for set in generate_choice_sets(&kb, &sentence, &mut sentence.id_gen(1)).unwrap() {
                let mut seen = BTreeSet::new();
                for cand in &set.candidates {
                    let text = verbalize_candidate(&kb, &cand.form).unwrap();
                    assert!(!text.ends_with('.') && !text.ends_with(char::is_whitespace), "{text:?}");
                    assert!(
                        seen.insert(text.clone()),
                        "{} {}: duplicate option {text:?}",
                        sentence.sentence_id,
                        set.target.lemma
                    );
                    for atom in cand.form.atoms() {
                        if let Some(fragment) = verbalize_atom(&kb, atom).unwrap() {
                            assert!(!fragment.contains("; "), "{fragment:?}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn every_mini_target_has_candidates() {
    let kb = parse_kb(&read_fixture("traffic.kb")).unwrap();
    for sentence in parse_corpus(&read_fixture("mini.corpus")).unwrap() {
        let sets = generate_choice_sets(&kb, &sentence, &mut sentence.id_gen(1)).unwrap();
        assert_eq!(sets.len(), sentence.targets.len(), "{}", sentence.sentence_id);
        assert!(sets.iter().all(|s| !s.candidates.is_empty()), "{}", sentence.sentence_id);
    }
}
