//! Evaluation: rank scores over held-out edges, classification error, and
//! degree-binned percentile summaries written as TSV reports.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{degree_bin_bounds, BipartiteGraph};
use crate::model::Posterior;
use crate::predict::{like_probability, score, ScoreMode};
use crate::sampling::ItemHistogram;

/// One held-out edge's evaluation record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord {
    pub user: u32,
    pub item: u32,
    pub rank_score: f64,
    pub like_probability: f64,
    /// Degree of the user in the training graph.
    pub user_degree: u32,
    /// Degree of the item in the training graph.
    pub item_degree: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mode: ScoreMode,
    pub records: Vec<EdgeRecord>,
}

/// S = |{n absent : s(n') > s(n)}| / |absent| with strict inequality, so
/// ties and n' itself contribute nothing.
pub fn rank_score(scores: &[(u32, f64)], n_prime: u32) -> Result<f64> {
    let s_prime = scores
        .iter()
        .find(|&&(n, _)| n == n_prime)
        .map(|&(_, s)| s)
        .ok_or_else(|| {
            Error::Contract(format!("held-out item {n_prime} not in the absent set"))
        })?;
    let wins = scores
        .iter()
        .filter(|&&(n, s)| n != n_prime && s_prime > s)
        .count();
    Ok(wins as f64 / scores.len() as f64)
}

/// Score every absent item (not liked by `m` in train) with `score_fn`
/// and return the rank score of `n_prime`, which must itself be absent.
pub fn rank_score_for_edge(
    train: &BipartiteGraph,
    m: u32,
    n_prime: u32,
    score_fn: impl Fn(u32) -> f64,
) -> Result<f64> {
    if train.has_edge(m, n_prime) {
        return Err(Error::Contract(format!(
            "held-out edge ({m}, {n_prime}) is present in train"
        )));
    }
    let scores: Vec<(u32, f64)> = (0..train.num_items() as u32)
        .filter(|&n| !train.has_edge(m, n))
        .map(|n| (n, score_fn(n)))
        .collect();
    rank_score(&scores, n_prime)
}

/// Evaluate a posterior on held-out edges. `test_edges` pairs reference
/// train-graph indices; users must exist in train.
pub fn evaluate(
    train: &BipartiteGraph,
    test_edges: &[(u32, u32)],
    q: &Posterior,
    mode: ScoreMode,
    hist: Option<&ItemHistogram>,
) -> Result<EvalReport> {
    let records: Vec<EdgeRecord> = test_edges
        .par_iter()
        .map(|&(m, n)| {
            let s = rank_score_for_edge(train, m, n, |cand| {
                score(q, m, cand, mode, hist).unwrap_or(f64::NEG_INFINITY)
            })?;
            Ok(EdgeRecord {
                user: m,
                item: n,
                rank_score: s,
                like_probability: like_probability(q.moments(m, n)),
                user_degree: train.user_degree(m),
                item_degree: train.item_degree(n),
            })
        })
        .collect::<Result<_>>()?;
    Ok(EvalReport { mode, records })
}

/// Evaluate arbitrary scores (e.g. a BPR model) the same way.
pub fn evaluate_with(
    train: &BipartiteGraph,
    test_edges: &[(u32, u32)],
    score_fn: impl Fn(u32, u32) -> f64 + Sync,
    like_fn: impl Fn(u32, u32) -> f64 + Sync,
    mode: ScoreMode,
) -> Result<EvalReport> {
    let records: Vec<EdgeRecord> = test_edges
        .par_iter()
        .map(|&(m, n)| {
            let s = rank_score_for_edge(train, m, n, |cand| score_fn(m, cand))?;
            Ok(EdgeRecord {
                user: m,
                item: n,
                rank_score: s,
                like_probability: like_fn(m, n),
                user_degree: train.user_degree(m),
                item_degree: train.item_degree(n),
            })
        })
        .collect::<Result<_>>()?;
    Ok(EvalReport { mode, records })
}

/// Nearest-rank percentile of sorted data: the ceil(p/100 * len)-th value.
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinSummary {
    pub bin_lo: u32,
    pub bin_hi: u32,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub p5: f64,
    pub p25: f64,
    pub p75: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeAxis {
    User,
    Item,
}

/// Bin rank scores by power-of-2 degree bins along either axis; empty
/// bins are omitted.
pub fn group_by_degree(records: &[EdgeRecord], axis: DegreeAxis) -> Vec<BinSummary> {
    let mut by_bin: std::collections::BTreeMap<(u32, u32), Vec<f64>> = Default::default();
    for r in records {
        let d = match axis {
            DegreeAxis::User => r.user_degree,
            DegreeAxis::Item => r.item_degree,
        };
        by_bin
            .entry(degree_bin_bounds(d))
            .or_default()
            .push(r.rank_score);
    }
    by_bin
        .into_iter()
        .map(|((lo, hi), mut vals)| {
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            BinSummary {
                bin_lo: lo,
                bin_hi: hi,
                count: vals.len(),
                mean,
                median: percentile_nearest_rank(&vals, 50.0),
                p5: percentile_nearest_rank(&vals, 5.0),
                p25: percentile_nearest_rank(&vals, 25.0),
                p75: percentile_nearest_rank(&vals, 75.0),
                p95: percentile_nearest_rank(&vals, 95.0),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationBin {
    pub bin_lo: u32,
    pub bin_hi: u32,
    pub count: usize,
    pub error_rate: f64,
    /// 20-bucket histogram of like probabilities over [0, 1].
    pub probability_histogram: [usize; 20],
}

/// Per-user-train-degree-bin classification error on held-out positives:
/// probability >= 0.5 predicts like, anything lower is an error.
pub fn classification_error(records: &[EdgeRecord]) -> Vec<ClassificationBin> {
    let mut by_bin: std::collections::BTreeMap<(u32, u32), Vec<f64>> = Default::default();
    for r in records {
        by_bin
            .entry(degree_bin_bounds(r.user_degree))
            .or_default()
            .push(r.like_probability);
    }
    by_bin
        .into_iter()
        .map(|((lo, hi), probs)| {
            let errors = probs.iter().filter(|&&p| p < 0.5).count();
            let mut hist = [0usize; 20];
            for &p in &probs {
                let idx = ((p * 20.0) as usize).min(19);
                hist[idx] += 1;
            }
            ClassificationBin {
                bin_lo: lo,
                bin_hi: hi,
                count: probs.len(),
                error_rate: errors as f64 / probs.len() as f64,
                probability_histogram: hist,
            }
        })
        .collect()
}

pub fn global_classification_error(records: &[EdgeRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let errors = records.iter().filter(|r| r.like_probability < 0.5).count();
    errors as f64 / records.len() as f64
}

pub fn mean_rank_score(records: &[EdgeRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().map(|r| r.rank_score).sum::<f64>() / records.len() as f64
}

pub fn median_rank_score(records: &[EdgeRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let mut vals: Vec<f64> = records.iter().map(|r| r.rank_score).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    percentile_nearest_rank(&vals, 50.0)
}

fn write_bin_table(w: &mut impl Write, rows: &[BinSummary]) -> std::io::Result<()> {
    writeln!(
        w,
        "# bin_lo\tbin_hi\tcount\tmean\tmedian\tp5\tp25\tp75\tp95"
    )?;
    for b in rows {
        writeln!(
            w,
            "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            b.bin_lo, b.bin_hi, b.count, b.mean, b.median, b.p5, b.p25, b.p75, b.p95
        )?;
    }
    Ok(())
}

pub fn write_rank_by_user_bin(w: &mut impl Write, report: &EvalReport) -> std::io::Result<()> {
    write_bin_table(w, &group_by_degree(&report.records, DegreeAxis::User))
}

pub fn write_rank_by_item_bin(w: &mut impl Write, report: &EvalReport) -> std::io::Result<()> {
    write_bin_table(w, &group_by_degree(&report.records, DegreeAxis::Item))
}

pub fn write_classification_by_user_bin(
    w: &mut impl Write,
    report: &EvalReport,
) -> std::io::Result<()> {
    writeln!(w, "# bin_lo\tbin_hi\tcount\terror_rate")?;
    for b in classification_error(&report.records) {
        writeln!(
            w,
            "{}\t{}\t{}\t{:.6}",
            b.bin_lo, b.bin_hi, b.count, b.error_rate
        )?;
    }
    Ok(())
}

pub fn write_like_histograms(w: &mut impl Write, report: &EvalReport) -> std::io::Result<()> {
    writeln!(
        w,
        "# bin_lo\tbin_hi\tbucket_lo\tbucket_hi\tcount (20 probability buckets per degree bin)"
    )?;
    for b in classification_error(&report.records) {
        for (i, &c) in b.probability_histogram.iter().enumerate() {
            writeln!(
                w,
                "{}\t{}\t{:.2}\t{:.2}\t{}",
                b.bin_lo,
                b.bin_hi,
                i as f64 / 20.0,
                (i + 1) as f64 / 20.0,
                c
            )?;
        }
    }
    Ok(())
}
