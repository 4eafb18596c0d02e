//! JSON and plain-text renderings of analyses and reports.

use std::fmt::Write as _;

use serde::Serialize;

use sense_bridge_core::eval::{BaselineReport, EvalReport};
use sense_bridge_core::kb::ValidationReport;
use sense_bridge_core::tms::{AnalysisStatus, FailureReason, Justification, SentenceAnalysis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    Json,
    #[default]
    Text,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Left-aligned columns separated by two spaces; trailing blanks trimmed.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let _ = write!(line, "{cell:<w$}", w = widths[c]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn row<const N: usize>(cells: [&str; N]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

pub fn eval_text(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Items: {}\n", report.n_items);
    out.push_str(&table(&[
        row(["", "Coarse-grained", "Fine-grained"]),
        row(["Accuracy", &report.coarse_percent, &report.fine_percent]),
        row(["Correct", &report.coarse.correct.to_string(), &report.fine.correct.to_string()]),
    ]));
    let errors = report.n_items - report.fine.correct;
    let _ = writeln!(out, "\nFine-grained errors: {errors}");
    if !report.error_breakdown.is_empty() {
        let mut rows = vec![row(["Error type", "Percentage", "Count"])];
        for share in &report.error_breakdown {
            rows.push(row([share.category.title(), &format!("{}%", share.percent), &share.errors.to_string()]));
        }
        out.push('\n');
        out.push_str(&table(&rows));
    }
    out.push('\n');
    let mut rows = vec![row(["Item", "Gold", "Predicted", "Coarse", "Fine"])];
    for item in &report.items {
        let predicted = match (&item.predicted_sense_id, item.analysis_failed) {
            (_, true) => String::from("(failed)"),
            (Some(s), false) => s.clone(),
            (None, false) => String::from("-"),
        };
        rows.push(vec![
            format!("{}:{}", item.sentence_id, item.token_index),
            item.gold_sense_id.clone(),
            predicted,
            mark(item.coarse_correct),
            mark(item.fine_correct),
        ]);
    }
    out.push_str(&table(&rows));
    out
}

fn mark(ok: bool) -> String {
    String::from(if ok { "ok" } else { "wrong" })
}

pub fn baseline_text(report: &BaselineReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Items: {}  Seed: {}  Trials: {}\n", report.n_items, report.seed, report.trials);
    out.push_str(&table(&[
        row(["", "Coarse-grained", "Fine-grained"]),
        row(["Random in frame (mean)", &report.coarse_percent, &report.mean_fine_percent]),
        row(["Random in frame (trial 0)", &report.coarse_percent, &report.first_trial_percent]),
        row(["Random in frame (expected)", &report.coarse_percent, &report.analytic_percent]),
    ]));
    let _ = writeln!(
        out,
        "\nExpected fine-grained accuracy: {}/{}",
        report.analytic_expectation.numer(),
        report.analytic_expectation.denom()
    );
    if !report.flagged.is_empty() {
        out.push_str("\nFrame-correct items with no candidate in the predicted frame:\n");
        for (sid, tok) in &report.flagged {
            let _ = writeln!(out, "  {sid}:{tok}");
        }
    }
    out
}

fn justification_text(j: &Justification) -> String {
    match j {
        Justification::OracleSelection => String::from("oracle"),
        Justification::SingletonAutocommit => String::from("only candidate"),
        Justification::SelectionalConflict { with, role, required } => {
            format!("conflicts with token {with}: {role} must be {required}")
        }
    }
}

pub fn analyses_text(analyses: &[SentenceAnalysis]) -> String {
    let mut out = String::new();
    for a in analyses {
        let status = match &a.status {
            AnalysisStatus::Complete => String::from("complete"),
            AnalysisStatus::Failed { reason: FailureReason::Inconsistent { token_index } } => {
                format!("failed: no consistent candidate left for token {token_index}")
            }
            AnalysisStatus::Failed { reason: FailureReason::Oracle { token_index, message } } => {
                format!("failed at token {token_index}: {message}")
            }
            AnalysisStatus::Failed { reason: FailureReason::Generation { message } } => format!("failed: {message}"),
        };
        let calls = if a.oracle_calls == 1 { "call" } else { "calls" };
        let _ = writeln!(out, "{}  {status}  ({} oracle {calls})", a.sentence_id, a.oracle_calls);
        for t in &a.targets {
            match (&t.sense_id, &t.justification) {
                (Some(sense), Some(j)) => {
                    let frame = t.frame.as_deref().unwrap_or("no frame");
                    let choice = match (t.option_index, t.options_offered) {
                        (Some(k), Some(n)) => format!(", option {k} of {n}"),
                        _ => String::new(),
                    };
                    let _ = writeln!(
                        out,
                        "  {} {}  {sense} [{frame}]  ({}{choice})",
                        t.token_index,
                        t.lemma,
                        justification_text(j)
                    );
                    if let Some(sexpr) = &t.sexpr {
                        let _ = writeln!(out, "      {sexpr}");
                    }
                }
                _ => {
                    let _ = writeln!(out, "  {} {}  unresolved ({} candidates)", t.token_index, t.lemma, t.candidates);
                }
            }
        }
        for p in &a.prune_log {
            let _ = writeln!(
                out,
                "  pruned {} {} #{} {}  ({})",
                p.token_index,
                p.lemma,
                p.candidate_number,
                p.sense_id,
                justification_text(&p.justification)
            );
        }
    }
    out
}

pub fn validation_text(report: &ValidationReport) -> String {
    let mut out = String::new();
    for f in &report.findings {
        let _ = writeln!(out, "{f}");
    }
    let n = report.findings.len();
    let _ = writeln!(out, "{n} finding{}", if n == 1 { "" } else { "s" });
    out
}
