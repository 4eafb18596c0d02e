//! Scoring against gold annotations, the random-within-frame baseline and
//! error breakdowns.
//!
//! Accuracies are kept as exact counts; rounding happens only when a percent
//! is rendered, half away from zero.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;

use crate::kb::KnowledgeBase;
use crate::rng::keyed_rng;
use crate::tms::SentenceAnalysis;

/// `(sentence_id, token_index)`.
pub type ItemKey = (String, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorCategory {
    PhysicalContext,
    Action,
    SocialRole,
    Emotion,
    StateChange,
    Uncategorized,
}

impl ErrorCategory {
    pub const LABELLED: [ErrorCategory; 5] = [
        ErrorCategory::PhysicalContext,
        ErrorCategory::Action,
        ErrorCategory::SocialRole,
        ErrorCategory::Emotion,
        ErrorCategory::StateChange,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::PhysicalContext => "physical-context",
            ErrorCategory::Action => "action",
            ErrorCategory::SocialRole => "social-role",
            ErrorCategory::Emotion => "emotion",
            ErrorCategory::StateChange => "state-change",
            ErrorCategory::Uncategorized => "uncategorized",
        }
    }

    /// Human label, e.g. "Physical context".
    pub fn title(self) -> &'static str {
        match self {
            ErrorCategory::PhysicalContext => "Physical context",
            ErrorCategory::Action => "Action",
            ErrorCategory::SocialRole => "Social role",
            ErrorCategory::Emotion => "Emotion",
            ErrorCategory::StateChange => "State change",
            ErrorCategory::Uncategorized => "Uncategorized",
        }
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for ErrorCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ErrorCategory::LABELLED
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown error category '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldAnnotation {
    pub sentence_id: String,
    pub token_index: usize,
    pub gold_sense_id: String,
    pub gold_frame: Option<String>,
    pub error_category: Option<ErrorCategory>,
}

impl GoldAnnotation {
    pub fn key(&self) -> ItemKey {
        (self.sentence_id.clone(), self.token_index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FramePrediction {
    pub sentence_id: String,
    pub token_index: usize,
    pub predicted_frame: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("no gold annotations to score")]
    EmptyGold,
    #[error("duplicate gold annotation for {0:?}")]
    DuplicateGold(ItemKey),
    #[error("duplicate frame prediction for {0:?}")]
    DuplicatePrediction(ItemKey),
    #[error("gold sense '{sense_id}' of {key:?} is not in the knowledge base")]
    UnknownGoldSense { key: ItemKey, sense_id: String },
    #[error("gold frame {gold:?} of {key:?} disagrees with the knowledge base binding {bound:?}")]
    FrameMismatch { key: ItemKey, gold: Option<String>, bound: Option<String> },
    #[error("gold items without a matching analysis target: {0:?}")]
    MissingItems(Vec<ItemKey>),
    #[error("gold items without a frame prediction: {0:?}")]
    MissingPredictions(Vec<ItemKey>),
    #[error("gold items without a choice set: {0:?}")]
    MissingChoiceSets(Vec<ItemKey>),
    #[error("trial count must be positive")]
    ZeroTrials,
}

/// `num/den` as a percent with one decimal, half away from zero.
pub fn percent_one_decimal(num: u64, den: u64) -> String {
    if den == 0 {
        return String::from("n/a");
    }
    let (num, den) = (num as u128, den as u128);
    let tenths = (2 * 1000 * num + den) / (2 * den);
    format!("{}.{}%", tenths / 10, tenths % 10)
}

/// `num/den` as a whole percent, half away from zero.
pub fn percent_whole(num: u64, den: u64) -> u64 {
    if den == 0 {
        return 0;
    }
    let (num, den) = (num as u128, den as u128);
    ((2 * 100 * num + den) / (2 * den)) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Accuracy {
    pub correct: u64,
    pub total: u64,
}

impl Accuracy {
    /// Exact ratio; `None` when there are no items.
    pub fn ratio(&self) -> Option<Ratio<u64>> {
        (self.total > 0).then(|| Ratio::new(self.correct, self.total))
    }

    pub fn percent(&self) -> String {
        percent_one_decimal(self.correct, self.total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemVerdict {
    pub sentence_id: String,
    pub token_index: usize,
    pub lemma: Option<String>,
    pub gold_sense_id: String,
    pub gold_frame: Option<String>,
    pub predicted_sense_id: Option<String>,
    pub predicted_frame: Option<String>,
    pub coarse_correct: bool,
    pub fine_correct: bool,
    pub analysis_failed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryShare {
    pub category: ErrorCategory,
    pub errors: u64,
    /// Whole percent of all fine-grained errors.
    pub percent: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub n_items: u64,
    pub coarse: Accuracy,
    pub fine: Accuracy,
    pub coarse_percent: String,
    pub fine_percent: String,
    pub error_breakdown: Vec<CategoryShare>,
    pub items: Vec<ItemVerdict>,
}

/// Check gold keys are unique, gold senses resolve and gold frames agree
/// with the KB bindings. Returns the annotations keyed.
pub fn index_gold<'a>(
    gold: &'a [GoldAnnotation],
    kb: &KnowledgeBase,
) -> Result<BTreeMap<ItemKey, &'a GoldAnnotation>, EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    let mut out = BTreeMap::new();
    for g in gold {
        let key = g.key();
        let Some(sense) = kb.sense(&g.gold_sense_id) else {
            return Err(EvalError::UnknownGoldSense { key, sense_id: g.gold_sense_id.clone() });
        };
        if let (Some(gf), Some(bound)) = (&g.gold_frame, &sense.frame) {
            if gf != bound {
                return Err(EvalError::FrameMismatch { key, gold: g.gold_frame.clone(), bound: sense.frame.clone() });
            }
        }
        if out.insert(key.clone(), g).is_some() {
            return Err(EvalError::DuplicateGold(key));
        }
    }
    Ok(out)
}

/// Score analyses against gold. Items are reported in key order whatever
/// the order of the inputs.
pub fn score(
    analyses: &[SentenceAnalysis],
    gold: &[GoldAnnotation],
    kb: &KnowledgeBase,
) -> Result<EvalReport, EvalError> {
    let gold = index_gold(gold, kb)?;
    let by_sentence: BTreeMap<&str, &SentenceAnalysis> = analyses.iter().map(|a| (a.sentence_id.as_str(), a)).collect();

    let mut missing = Vec::new();
    let mut items = Vec::with_capacity(gold.len());
    for (key, g) in &gold {
        let Some(analysis) = by_sentence.get(key.0.as_str()) else {
            missing.push(key.clone());
            continue;
        };
        let target = analysis.target(key.1);
        let failed = !analysis.is_complete();
        if target.is_none() && !failed {
            missing.push(key.clone());
            continue;
        }
        let (predicted_sense_id, predicted_frame) = match (failed, target) {
            (false, Some(t)) => (t.sense_id.clone(), t.frame.clone()),
            _ => (None, None),
        };
        let coarse_correct = !failed && predicted_sense_id.is_some() && predicted_frame == g.gold_frame;
        let fine_correct = !failed && predicted_sense_id.as_deref() == Some(g.gold_sense_id.as_str());
        items.push(ItemVerdict {
            sentence_id: key.0.clone(),
            token_index: key.1,
            lemma: target.map(|t| t.lemma.clone()),
            gold_sense_id: g.gold_sense_id.clone(),
            gold_frame: g.gold_frame.clone(),
            predicted_sense_id,
            predicted_frame,
            coarse_correct,
            fine_correct,
            analysis_failed: failed,
        });
    }
    if !missing.is_empty() {
        return Err(EvalError::MissingItems(missing));
    }

    let n = items.len() as u64;
    let coarse = Accuracy { correct: items.iter().filter(|i| i.coarse_correct).count() as u64, total: n };
    let fine = Accuracy { correct: items.iter().filter(|i| i.fine_correct).count() as u64, total: n };
    let mut report = EvalReport {
        n_items: n,
        coarse,
        fine,
        coarse_percent: coarse.percent(),
        fine_percent: fine.percent(),
        error_breakdown: Vec::new(),
        items,
    };
    report.error_breakdown = error_breakdown(&report, gold.values().copied());
    Ok(report)
}

/// Share of fine-grained errors per category, nonzero categories only.
/// Errors whose gold item carries no label count as uncategorized.
pub fn error_breakdown<'a>(
    report: &EvalReport,
    gold: impl IntoIterator<Item = &'a GoldAnnotation>,
) -> Vec<CategoryShare> {
    let labels: BTreeMap<ItemKey, Option<ErrorCategory>> =
        gold.into_iter().map(|g| (g.key(), g.error_category)).collect();
    let mut counts: BTreeMap<ErrorCategory, u64> = BTreeMap::new();
    let mut errors = 0u64;
    for item in report.items.iter().filter(|i| !i.fine_correct) {
        let key = (item.sentence_id.clone(), item.token_index);
        let category = labels.get(&key).copied().flatten().unwrap_or(ErrorCategory::Uncategorized);
        *counts.entry(category).or_default() += 1;
        errors += 1;
    }
    counts
        .into_iter()
        .map(|(category, n)| CategoryShare { category, errors: n, percent: percent_whole(n, errors) })
        .collect()
}

/// Sense and frame of one generated candidate, as seen by the baseline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateSense {
    pub sense_id: String,
    pub frame: Option<String>,
}

/// One gold item prepared for random drawing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlannedItem {
    pub sentence_id: String,
    pub token_index: usize,
    pub frame_correct: bool,
    /// Candidates whose frame equals the predicted frame.
    pub in_frame: u64,
    /// Position of the gold sense among the in-frame candidates.
    pub gold_position: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaselinePlan {
    pub items: Vec<PlannedItem>,
}

impl BaselinePlan {
    /// Frame-correct items with no candidate in the predicted frame.
    pub fn flagged(&self) -> Vec<ItemKey> {
        self.items
            .iter()
            .filter(|i| i.frame_correct && i.in_frame == 0)
            .map(|i| (i.sentence_id.clone(), i.token_index))
            .collect()
    }
}

pub fn plan_baseline(
    choice_sets: &BTreeMap<ItemKey, Vec<CandidateSense>>,
    frame_preds: &[FramePrediction],
    gold: &[GoldAnnotation],
    kb: &KnowledgeBase,
) -> Result<BaselinePlan, EvalError> {
    let gold = index_gold(gold, kb)?;
    let mut preds = BTreeMap::new();
    for p in frame_preds {
        let key = (p.sentence_id.clone(), p.token_index);
        if preds.insert(key.clone(), p.predicted_frame.clone()).is_some() {
            return Err(EvalError::DuplicatePrediction(key));
        }
    }
    let no_pred: Vec<_> = gold.keys().filter(|k| !preds.contains_key(*k)).cloned().collect();
    if !no_pred.is_empty() {
        return Err(EvalError::MissingPredictions(no_pred));
    }
    let no_set: Vec<_> = gold.keys().filter(|k| !choice_sets.contains_key(*k)).cloned().collect();
    if !no_set.is_empty() {
        return Err(EvalError::MissingChoiceSets(no_set));
    }
    let items = gold
        .iter()
        .map(|(key, g)| {
            let predicted = &preds[key];
            let frame_correct = predicted == &g.gold_frame;
            let in_frame: Vec<&CandidateSense> = choice_sets[key].iter().filter(|c| &c.frame == predicted).collect();
            let gold_position = in_frame.iter().position(|c| c.sense_id == g.gold_sense_id).map(|p| p as u64);
            PlannedItem {
                sentence_id: key.0.clone(),
                token_index: key.1,
                frame_correct,
                in_frame: if frame_correct { in_frame.len() as u64 } else { 0 },
                gold_position: if frame_correct { gold_position } else { None },
            }
        })
        .collect();
    Ok(BaselinePlan { items })
}

/// Outcome of all trials for one item.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ItemDraws {
    pub hits: u64,
    pub first_trial_hit: bool,
}

/// Draw `trials` times for one item from its own keyed stream, so results
/// do not depend on which items are drawn first or on which thread.
pub fn draw_item(seed: u64, item: &PlannedItem, trials: u64) -> ItemDraws {
    let (true, Some(gold)) = (item.frame_correct, item.gold_position) else {
        return ItemDraws::default();
    };
    if item.in_frame == 0 {
        return ItemDraws::default();
    }
    let token = (item.token_index as u64).to_le_bytes();
    let mut rng = keyed_rng(seed, &[item.sentence_id.as_bytes(), &token]);
    let mut out = ItemDraws::default();
    for t in 0..trials {
        let hit = rng.random_range(0..item.in_frame) == gold;
        if hit {
            out.hits += 1;
        }
        if t == 0 {
            out.first_trial_hit = hit;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaselineReport {
    pub n_items: u64,
    pub seed: u64,
    pub trials: u64,
    pub coarse: Accuracy,
    pub coarse_percent: String,
    /// Correct draws summed over items and trials.
    pub fine_hits: u64,
    pub mean_fine: Ratio<u64>,
    pub mean_fine_percent: String,
    /// The fine accuracy of trial 0 alone.
    pub first_trial_fine: Accuracy,
    pub first_trial_percent: String,
    pub analytic_expectation: Ratio<u128>,
    pub analytic_percent: String,
    pub flagged: Vec<ItemKey>,
}

impl BaselineReport {
    pub fn mean_fine_f64(&self) -> f64 {
        *self.mean_fine.numer() as f64 / *self.mean_fine.denom() as f64
    }
}

/// (1/N) times the sum over frame-correct items of 1/(in-frame count),
/// counting only items whose gold sense is among the in-frame candidates.
pub fn expectation_of_plan(plan: &BaselinePlan) -> Ratio<u128> {
    let n = plan.items.len().max(1) as u128;
    let sum = plan
        .items
        .iter()
        .filter(|i| i.frame_correct && i.gold_position.is_some() && i.in_frame > 0)
        .fold(Ratio::from_integer(0u128), |acc, i| acc + Ratio::new(1, i.in_frame as u128));
    sum / Ratio::from_integer(n)
}

pub fn analytic_random_expectation(
    choice_sets: &BTreeMap<ItemKey, Vec<CandidateSense>>,
    frame_preds: &[FramePrediction],
    gold: &[GoldAnnotation],
    kb: &KnowledgeBase,
) -> Result<Ratio<u128>, EvalError> {
    Ok(expectation_of_plan(&plan_baseline(choice_sets, frame_preds, gold, kb)?))
}

/// Combine per-item draws (in plan order) into a report.
pub fn assemble_baseline(plan: &BaselinePlan, draws: &[ItemDraws], seed: u64, trials: u64) -> BaselineReport {
    let n = plan.items.len() as u64;
    let coarse = Accuracy { correct: plan.items.iter().filter(|i| i.frame_correct).count() as u64, total: n };
    let fine_hits: u64 = draws.iter().map(|d| d.hits).sum();
    let first = Accuracy { correct: draws.iter().filter(|d| d.first_trial_hit).count() as u64, total: n };
    let denom = (n * trials).max(1);
    let analytic = expectation_of_plan(plan);
    let analytic_percent = {
        // one-decimal rendering of an exact u128 ratio
        let (a, b) = (*analytic.numer(), *analytic.denom());
        let tenths = (2 * 1000 * a + b) / (2 * b);
        format!("{}.{}%", tenths / 10, tenths % 10)
    };
    BaselineReport {
        n_items: n,
        seed,
        trials,
        coarse,
        coarse_percent: coarse.percent(),
        fine_hits,
        mean_fine: Ratio::new(fine_hits, denom),
        mean_fine_percent: percent_one_decimal(fine_hits, denom),
        first_trial_fine: first,
        first_trial_percent: first.percent(),
        analytic_expectation: analytic,
        analytic_percent,
        flagged: plan.flagged(),
    }
}

/// Random-within-frame baseline, drawing items sequentially.
pub fn random_within_frame_baseline(
    choice_sets: &BTreeMap<ItemKey, Vec<CandidateSense>>,
    frame_preds: &[FramePrediction],
    gold: &[GoldAnnotation],
    kb: &KnowledgeBase,
    seed: u64,
    trials: u64,
) -> Result<BaselineReport, EvalError> {
    if trials == 0 {
        return Err(EvalError::ZeroTrials);
    }
    let plan = plan_baseline(choice_sets, frame_preds, gold, kb)?;
    let draws: Vec<ItemDraws> = plan.items.iter().map(|i| draw_item(seed, i, trials)).collect();
    Ok(assemble_baseline(&plan, &draws, seed, trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percent_rounding() {
        assert_eq!(percent_one_decimal(96, 114), "84.2%");
        assert_eq!(percent_one_decimal(94, 114), "82.5%");
        assert_eq!(percent_one_decimal(1, 1), "100.0%");
        assert_eq!(percent_one_decimal(0, 3), "0.0%");
        // 1/8 = 12.5% exactly, 1/16 = 6.25% -> 6.3%
        assert_eq!(percent_one_decimal(1, 8), "12.5%");
        assert_eq!(percent_one_decimal(1, 16), "6.3%");
        assert_eq!(percent_whole(6, 20), 30);
        assert_eq!(percent_whole(1, 8), 13);
    }

    #[test]
    fn category_labels_round_trip() {
        for c in ErrorCategory::LABELLED {
            assert_eq!(c.as_str().parse::<ErrorCategory>().unwrap(), c);
        }
        assert!("uncategorized".parse::<ErrorCategory>().is_err());
    }

    #[test]
    fn forced_draw_always_hits() {
        let item = PlannedItem {
            sentence_id: "s".into(),
            token_index: 0,
            frame_correct: true,
            in_frame: 1,
            gold_position: Some(0),
        };
        assert_eq!(draw_item(9, &item, 50), ItemDraws { hits: 50, first_trial_hit: true });
    }
}
