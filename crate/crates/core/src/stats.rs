//! Rank-based significance tests for the tournament tables.
//!
//! `friedman_test` asks whether any of k algorithms differ across n
//! datasets; `wilcoxon_signed_rank` compares one matched pair of result
//! columns. Both rank with midranks (tied values share the average of the
//! positions they span). The Friedman statistic is the classic chi-squared
//! form without a tie-correction term; with the coarse win-rate data this
//! errs on the conservative side.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of the positive differences (`W+`).
    pub statistic: f64,
    pub p_value: f64,
    /// Pairs remaining after zero differences are dropped.
    pub n_used: usize,
}

/// Ranks from 1 with ties sharing the average of their positions.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) hold one tie group.
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &slot in &order[i..=j] {
            ranks[slot] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Friedman's chi-squared test on an n-by-k matrix: rows are datasets,
/// columns are the algorithms being compared.
pub fn friedman_test(rows: &[Vec<f64>]) -> Result<FriedmanResult, StatsError> {
    let n = rows.len();
    if n < 2 {
        return Err(StatsError::DegenerateInput("need at least two datasets".into()));
    }
    let k = rows[0].len();
    if k < 2 {
        return Err(StatsError::DegenerateInput("need at least two algorithms".into()));
    }
    for row in rows {
        if row.len() != k {
            return Err(StatsError::DegenerateInput("ragged matrix".into()));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::DegenerateInput("non-finite value".into()));
        }
    }
    let mut rank_sums = vec![0.0; k];
    for row in rows {
        for (j, r) in midranks(row).into_iter().enumerate() {
            rank_sums[j] += r;
        }
    }
    let centre = (k + 1) as f64 / 2.0;
    let spread: f64 = rank_sums
        .iter()
        .map(|s| {
            let mean = s / n as f64;
            (mean - centre) * (mean - centre)
        })
        .sum();
    let statistic = (12.0 * n as f64 / (k as f64 * (k + 1) as f64) * spread).max(0.0);
    let dof = k - 1;
    let chi = ChiSquared::new(dof as f64).expect("dof >= 1");
    let p_value = (1.0 - chi.cdf(statistic)).clamp(0.0, 1.0);
    Ok(FriedmanResult { statistic, dof, p_value })
}

/// Two-sided Wilcoxon signed-rank test on matched samples.
///
/// Zero differences are dropped. Up to 20 nonzero pairs the p-value is exact
/// (full distribution of `W+` over sign assignments, ties included); beyond
/// that a tie-corrected normal approximation with continuity correction is
/// used.
pub fn wilcoxon_signed_rank(xs: &[f64], ys: &[f64]) -> Result<WilcoxonResult, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::DegenerateInput("mismatched sample lengths".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(StatsError::DegenerateInput("non-finite value".into()));
    }
    let diffs: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Err(StatsError::DegenerateInput("all differences are zero".into()));
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let w_plus: f64 =
        diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| *r).sum();

    let p_value = if n <= 20 {
        exact_two_sided_p(&ranks, w_plus)
    } else {
        // Tie-corrected normal approximation.
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let mut var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0;
        let mut sorted = abs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
                j += 1;
            }
            let t = (j - i + 1) as f64;
            var -= (t * t * t - t) / 48.0;
            i = j + 1;
        }
        let sigma = var.sqrt();
        if sigma == 0.0 {
            return Err(StatsError::DegenerateInput("zero variance after ties".into()));
        }
        let shift = (w_plus - mean).abs() - 0.5;
        let z = shift.max(0.0) / sigma;
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        (2.0 * (1.0 - normal.cdf(z))).clamp(0.0, 1.0)
    };
    Ok(WilcoxonResult { statistic: w_plus, p_value, n_used: n })
}

/// Exact two-sided p by dynamic programming over the doubled ranks (midranks
/// are halves, so doubling makes every rank an integer and the convolution
/// exact).
fn exact_two_sided_p(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks
        .iter()
        .map(|r| {
            let d = (r * 2.0).round();
            debug_assert_eq!(d, r * 2.0, "midranks are multiples of one half");
            d as usize
        })
        .collect();
    let total: usize = doubled.iter().sum();
    // counts[s] = number of sign assignments whose positive doubled ranks sum to s
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &d in &doubled {
        for s in (d..=total).rev() {
            counts[s] += counts[s - d];
        }
    }
    let patterns = 2u64.pow(ranks.len() as u32) as f64;
    let w2 = (w_plus * 2.0).round() as usize;
    let below: u64 = counts[..=w2].iter().sum();
    let above: u64 = counts[w2..].iter().sum();
    let p_low = below as f64 / patterns;
    let p_high = above as f64 / patterns;
    (2.0 * p_low.min(p_high)).min(1.0)
}
