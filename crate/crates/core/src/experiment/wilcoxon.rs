//! Paired Wilcoxon signed-rank test.
//!
//! Zero differences are dropped. Tied absolute differences get midranks.
//! Up to [`EXACT_LIMIT`] pairs the null distribution of W+ is enumerated
//! exactly by dynamic programming over doubled ranks (which are integers even
//! with midranks); above that a normal approximation with tie-corrected
//! variance and no continuity correction is used.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

pub const EXACT_LIMIT: usize = 20;
pub const MIN_PAIRS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WilcoxonError {
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("only {0} non-zero differences; at least {MIN_PAIRS} are required")]
    InsufficientPairs(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Number of non-zero differences.
    pub n: usize,
    /// Sum of ranks of positive differences.
    pub w_plus: f64,
    /// Sum of ranks of negative differences.
    pub w_minus: f64,
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub p_value: f64,
    pub method: Method,
}

/// Midranks (1-based) of `values`.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Two-tailed test of `a - b`.
pub fn wilcoxon_paired(a: &[f64], b: &[f64]) -> Result<WilcoxonResult, WilcoxonError> {
    if a.len() != b.len() {
        return Err(WilcoxonError::LengthMismatch(a.len(), b.len()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n < MIN_PAIRS {
        return Err(WilcoxonError::InsufficientPairs(n));
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let w_plus: f64 = ranks.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;

    let (p_value, method) = if n <= EXACT_LIMIT {
        (exact_p(&ranks, w_plus), Method::Exact)
    } else {
        (normal_p(&abs, &ranks, w_plus), Method::Normal)
    };
    Ok(WilcoxonResult {
        n,
        w_plus,
        w_minus,
        statistic: w_plus.min(w_minus),
        p_value,
        method,
    })
}

fn exact_p(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    // counts[s] = number of sign assignments whose doubled W+ equals s
    let mut counts = vec![0f64; max + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let observed = (w_plus * 2.0).round() as usize;
    let total: f64 = counts.iter().sum();
    let lower: f64 = counts[..=observed].iter().sum();
    let upper: f64 = counts[observed..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

fn normal_p(abs: &[f64], ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = abs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|v| **v == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (w_plus - mean) / var.sqrt();
    let std_normal = Normal::new(0.0, 1.0).expect("valid parameters");
    (2.0 * std_normal.cdf(-z.abs())).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn identical_samples_are_insufficient() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(wilcoxon_paired(&a, &a), Err(WilcoxonError::InsufficientPairs(0)));
    }

    #[test]
    fn all_one_signed_ten_pairs() {
        let b: Vec<f64> = (0..10).map(|i| i as f64 * 1.5).collect();
        let a: Vec<f64> = b.iter().map(|x| x + 2.0).collect();
        let r = wilcoxon_paired(&a, &b).unwrap();
        assert_eq!(r.method, Method::Exact);
        assert!((r.p_value - 2.0 / 1024.0).abs() < 1e-12);
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn large_samples_use_normal_approximation() {
        let a: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| i as f64 + if i % 3 == 0 { 1.5 } else { -0.5 }).collect();
        let r = wilcoxon_paired(&a, &b).unwrap();
        assert_eq!(r.method, Method::Normal);
        assert!(r.p_value > 0.0 && r.p_value <= 1.0);
    }
}
