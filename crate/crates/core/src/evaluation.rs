//! Forced-decision accuracy and ranked-decision ROC / PR areas over labeled
//! pair collections, plus the harness that scores a whole benchmark.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::decide;
use crate::error::{Error, Result};
use crate::pair::{Direction, LabeledPair};
use crate::scoring::aggregate_score;
use crate::seeding::derive_seed;

/// How pairs are ordered for the ranked-decision curves.
///
/// `Confidence` ranks by max(s, 1-s) with label "decision was correct";
/// `Raw` ranks by the score itself with label "truth is x->y".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankingMode {
    Confidence,
    Raw,
}

impl Default for RankingMode {
    fn default() -> Self {
        RankingMode::Confidence
    }
}

/// Forced-decision credit: 1 for a correct direction, 0 for a wrong one,
/// 0.5 for an abstention.
pub fn forced_decision_credit(decision: Direction, truth: Direction) -> f64 {
    if decision == Direction::Undecided {
        0.5
    } else if decision == truth {
        1.0
    } else {
        0.0
    }
}

/// Weighted forced-decision accuracy over per-pair credits.
pub fn accuracy(decisions: &[Direction], truths: &[Direction], weights: &[f64]) -> Result<f64> {
    if decisions.is_empty() {
        return Err(Error::EmptyInput("accuracy over zero pairs"));
    }
    if decisions.len() != truths.len() || decisions.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: decisions.len(),
            right: truths.len().max(weights.len()),
        });
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidWeights);
    }
    let hit: f64 = decisions
        .iter()
        .zip(truths)
        .zip(weights)
        .map(|((d, t), w)| w * forced_decision_credit(*d, *t))
        .sum();
    Ok(hit / total)
}

/// ROC area via the Mann-Whitney statistic with ties counted half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let pos = labels.iter().filter(|l| **l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Average ranks over tie groups, then sum the positive ranks.
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            if labels[k] {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let p = pos as f64;
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * neg as f64))
}

/// PR area from the step-wise precision-recall curve with rectangular
/// interpolation (threshold sweep over distinct scores, descending).
pub fn pr_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let pos = labels.iter().filter(|l| **l).count();
    if pos == 0 {
        return Err(Error::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut auc = 0.0;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let tp_before = tp;
        for &k in &order[i..j] {
            if labels[k] {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        if tp > tp_before {
            let precision = tp as f64 / (tp + fp) as f64;
            let recall_step = (tp - tp_before) as f64 / pos as f64;
            auc += recall_step * precision;
        }
        i = j;
    }
    Ok(auc)
}

/// Outcome of one scored pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairRecord {
    pub id: String,
    pub score: f64,
    pub confidence: f64,
    pub decision: Direction,
    pub truth: Direction,
    pub weight: f64,
    /// Forced-decision credit: 1, 0, or 0.5.
    pub correct: f64,
}

/// A pair that failed to score, with the reason.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedPair {
    pub id: String,
    pub message: String,
}

/// Scores, decisions, and summary metrics for a benchmark run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub records: Vec<PairRecord>,
    pub failures: Vec<FailedPair>,
    pub ranking_mode: RankingMode,
    pub accuracy: f64,
    /// Areas under the selected ranking mode; `None` when that ranking is
    /// degenerate (single class).
    pub roc_auc: Option<f64>,
    pub pr_auc: Option<f64>,
    /// Both conventions, always reported.
    pub roc_auc_confidence: Option<f64>,
    pub pr_auc_confidence: Option<f64>,
    pub roc_auc_raw: Option<f64>,
    pub pr_auc_raw: Option<f64>,
    pub wall_time_secs: f64,
}

impl BenchmarkResult {
    pub fn n_pairs(&self) -> usize {
        self.records.len()
    }
}

/// Score every pair with `aggregate_score`, decide each, and compute the
/// summary metrics. Pair seeds derive from `seed` and the pair index, so
/// results are identical for any worker count.
pub fn run_benchmark(
    pairs: &[LabeledPair],
    m: usize,
    seed: u64,
    ranking_mode: RankingMode,
    workers: Option<usize>,
) -> Result<BenchmarkResult> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("benchmark without pairs"));
    }
    let start = Instant::now();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    let scores: Vec<crate::error::Result<f64>> = pool.install(|| {
        pairs
            .par_iter()
            .enumerate()
            .map(|(k, lp)| aggregate_score(&lp.pair, m, derive_seed(seed, k as u64)))
            .collect()
    });

    let mut records = Vec::with_capacity(pairs.len());
    let mut failures = Vec::new();
    for (lp, outcome) in pairs.iter().zip(scores) {
        match outcome.and_then(decide) {
            Ok(d) => records.push(PairRecord {
                id: lp.id.clone(),
                score: d.score,
                confidence: d.confidence,
                decision: d.direction,
                truth: lp.truth,
                weight: lp.weight,
                correct: forced_decision_credit(d.direction, lp.truth),
            }),
            Err(e) => failures.push(FailedPair {
                id: lp.id.clone(),
                message: e.to_string(),
            }),
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("every pair failed to score"));
    }

    let decisions: Vec<Direction> = records.iter().map(|r| r.decision).collect();
    let truths: Vec<Direction> = records.iter().map(|r| r.truth).collect();
    let weights: Vec<f64> = records.iter().map(|r| r.weight).collect();
    let accuracy = accuracy(&decisions, &truths, &weights)?;

    let conf_scores: Vec<f64> = records.iter().map(|r| r.confidence).collect();
    let conf_labels: Vec<bool> = records.iter().map(|r| r.correct == 1.0).collect();
    let raw_scores: Vec<f64> = records.iter().map(|r| r.score).collect();
    let raw_labels: Vec<bool> = records.iter().map(|r| r.truth == Direction::XToY).collect();

    let roc_auc_confidence = roc_auc(&conf_scores, &conf_labels).ok();
    let pr_auc_confidence = pr_auc(&conf_scores, &conf_labels).ok();
    let roc_auc_raw = roc_auc(&raw_scores, &raw_labels).ok();
    let pr_auc_raw = pr_auc(&raw_scores, &raw_labels).ok();
    let (roc_sel, pr_sel) = match ranking_mode {
        RankingMode::Confidence => (roc_auc_confidence, pr_auc_confidence),
        RankingMode::Raw => (roc_auc_raw, pr_auc_raw),
    };

    Ok(BenchmarkResult {
        records,
        failures,
        ranking_mode,
        accuracy,
        roc_auc: roc_sel,
        pr_auc: pr_sel,
        roc_auc_confidence,
        pr_auc_confidence,
        roc_auc_raw,
        pr_auc_raw,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
