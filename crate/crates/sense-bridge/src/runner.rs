//! Batch execution over a bounded worker pool. Results always come back in
//! input order.

use std::collections::BTreeMap;

use rayon::prelude::*;

use sense_bridge_core::candgen::{generate_choice_sets, AnnotatedSentence};
use sense_bridge_core::eval::{
    assemble_baseline, draw_item, plan_baseline, BaselineReport, CandidateSense, EvalError, FramePrediction,
    GoldAnnotation, ItemKey,
};
use sense_bridge_core::kb::KnowledgeBase;
use sense_bridge_core::logic::LogicError;
use sense_bridge_core::oracle::Oracle;
use sense_bridge_core::tms::{disambiguate_sentence, PipelineConfig, SentenceAnalysis};

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool")
}

pub fn disambiguate_corpus<O: Oracle + Sync + ?Sized>(
    kb: &KnowledgeBase,
    oracle: &O,
    sentences: &[AnnotatedSentence],
    config: &PipelineConfig,
    jobs: usize,
) -> Vec<SentenceAnalysis> {
    pool(jobs).install(|| sentences.par_iter().map(|s| disambiguate_sentence(kb, oracle, s, config)).collect())
}

/// Generated candidates of every target, keyed by `(sentence_id, token)`.
pub fn candidate_senses(
    kb: &KnowledgeBase,
    sentences: &[AnnotatedSentence],
    id_start: u64,
) -> Result<BTreeMap<ItemKey, Vec<CandidateSense>>, LogicError> {
    let mut out = BTreeMap::new();
    for s in sentences {
        let mut ids = s.id_gen(id_start);
        for set in generate_choice_sets(kb, s, &mut ids)? {
            let senses = set
                .candidates
                .iter()
                .map(|c| CandidateSense { sense_id: c.sense_id.clone(), frame: c.frame.clone() })
                .collect();
            out.insert((s.sentence_id.clone(), set.target.token_index), senses);
        }
    }
    Ok(out)
}

/// Random-within-frame baseline with items drawn in parallel. Each item
/// has its own keyed stream, so the report does not depend on `jobs`.
pub fn baseline(
    choice_sets: &BTreeMap<ItemKey, Vec<CandidateSense>>,
    frame_preds: &[FramePrediction],
    gold: &[GoldAnnotation],
    kb: &KnowledgeBase,
    seed: u64,
    trials: u64,
    jobs: usize,
) -> Result<BaselineReport, EvalError> {
    if trials == 0 {
        return Err(EvalError::ZeroTrials);
    }
    let plan = plan_baseline(choice_sets, frame_preds, gold, kb)?;
    let draws: Vec<_> = pool(jobs).install(|| plan.items.par_iter().map(|i| draw_item(seed, i, trials)).collect());
    Ok(assemble_baseline(&plan, &draws, seed, trials))
}
