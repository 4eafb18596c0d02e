use std::collections::BTreeSet;

use proptest::prelude::*;
use sense_bridge_core::kb::{Concept, KbError, KnowledgeBase};

/// A random DAG: concept `i` may have any subset of `0..i` as parents.
fn dag() -> impl Strategy<Value = Vec<Vec<usize>>> {
    (1usize..14).prop_flat_map(|n| {
        (0..n)
            .map(|i| {
                proptest::collection::btree_set(0..i.max(1), 0..=i.min(3)).prop_map(move |s| {
                    if i == 0 {
                        vec![]
                    } else {
                        s.into_iter().collect()
                    }
                })
            })
            .collect::<Vec<_>>()
    })
}

fn build(parents: &[Vec<usize>]) -> KnowledgeBase {
    let mut b = KnowledgeBase::builder();
    for (i, ps) in parents.iter().enumerate() {
        b.concept(Concept {
            id: format!("C{i}"),
            gloss: format!("c{i}"),
            parents: ps.iter().map(|p| format!("C{p}")).collect(),
        })
        .unwrap();
    }
    b.build_unchecked()
}

fn ancestors(parents: &[Vec<usize>], i: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([i]);
    let mut stack = vec![i];
    while let Some(c) = stack.pop() {
        for &p in &parents[c] {
            if seen.insert(p) {
                stack.push(p);
            }
        }
    }
    seen
}

proptest! {
    #[test]
    fn subconcept_matches_reflexive_transitive_closure(parents in dag()) {
        let kb = build(&parents);
        for i in 0..parents.len() {
            let up = ancestors(&parents, i);
            for j in 0..parents.len() {
                let got = kb.is_subconcept(&format!("C{i}"), &format!("C{j}")).unwrap();
                prop_assert_eq!(got, up.contains(&j), "C{} under C{}", i, j);
            }
        }
    }
}

#[test]
fn unknown_concepts_are_reported() {
    let kb = build(&[vec![], vec![0]]);
    assert!(matches!(kb.is_subconcept("C1", "Nope"), Err(KbError::UnknownConcept(_))));
    assert!(matches!(kb.is_subconcept("Nope", "C0"), Err(KbError::UnknownConcept(_))));
}
