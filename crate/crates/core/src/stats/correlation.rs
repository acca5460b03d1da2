use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub r: f64,
    /// two-sided, only computed for `n >= 4`
    pub p: Option<f64>,
    pub n: usize,
}

fn check_lengths(a: usize, b: usize) -> Result<usize, StatsError> {
    if a != b {
        return Err(StatsError::Usage(format!("length mismatch: {a} vs {b}")));
    }
    if a < 2 {
        return Err(StatsError::Usage(format!("need at least 2 observations, got {a}")));
    }
    Ok(a)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample Pearson correlation; `None` when either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks, ties share the mean of the positions they occupy.
pub fn midranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided p-value from the Student-t approximation with `n - 2` degrees
/// of freedom.
pub fn t_test_p(r: f64, n: usize) -> Option<f64> {
    if n < 4 {
        return None;
    }
    if r.abs() >= 1.0 {
        return Some(0.0);
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    Some((2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0))
}

/// Rank correlation. Zero variance in either argument gives `r = 0` and
/// `p = 1`.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult, StatsError> {
    let n = check_lengths(xs.len(), ys.len())?;
    match pearson(&midranks(xs), &midranks(ys)) {
        Some(r) => Ok(CorrelationResult { r, p: t_test_p(r, n), n }),
        None => Ok(CorrelationResult {
            r: 0.0,
            p: (n >= 4).then_some(1.0),
            n,
        }),
    }
}

/// Point-biserial correlation between 0/1 labels and values.
pub fn point_biserial(labels: &[u8], values: &[f64]) -> Result<CorrelationResult, StatsError> {
    let n = check_lengths(labels.len(), values.len())?;
    if let Some(bad) = labels.iter().find(|&&l| l > 1) {
        return Err(StatsError::Usage(format!("label {bad} is not 0 or 1")));
    }
    let n1 = labels.iter().filter(|&&l| l == 1).count();
    let n0 = n - n1;
    if n1 == 0 || n0 == 0 {
        return Err(StatsError::Undefined("only one class present".into()));
    }
    let m = mean(values);
    let sd = (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64).sqrt();
    if sd == 0.0 {
        return Err(StatsError::Undefined("values have zero variance".into()));
    }
    let class_mean = |c: u8, k: usize| {
        labels
            .iter()
            .zip(values)
            .filter(|(l, _)| **l == c)
            .map(|(_, v)| v)
            .sum::<f64>()
            / k as f64
    };
    let (m1, m0) = (class_mean(1, n1), class_mean(0, n0));
    let nf = n as f64;
    let r = ((m1 - m0) / sd * ((n1 * n0) as f64 / (nf * nf)).sqrt()).clamp(-1.0, 1.0);
    Ok(CorrelationResult { r, p: t_test_p(r, n), n })
}
