//! Small descriptive statistics shared by the feature extractors.

use alloc::vec::Vec;

/// Arithmetic mean, accumulated as offsets from the first value so that a
/// constant series returns that value exactly.
pub fn mean(values: &[f64]) -> f64 {
    match values.first() {
        None => 0.0,
        Some(&x0) => x0 + values.iter().map(|v| v - x0).sum::<f64>() / values.len() as f64,
    }
}

/// Sample standard deviation (divides by `n - 1`). Zero for fewer than two
/// values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mu = mean(values);
    let ss: f64 = values.iter().map(|v| (v - mu) * (v - mu)).sum();
    libm::sqrt(ss / (values.len() - 1) as f64)
}

/// Mean after one pass of removing values more than two sample standard
/// deviations from the mean. Falls back to the plain mean when the spread is
/// zero or nothing survives.
pub fn trimmed_mean(values: &[f64]) -> f64 {
    let mu = mean(values);
    let sigma = sample_std(values);
    if sigma == 0.0 {
        return mu;
    }
    let limit = 2.0 * sigma;
    let kept: Vec<f64> = values
        .iter()
        .copied()
        .filter(|v| libm::fabs(*v - mu) <= limit)
        .collect();
    if kept.is_empty() {
        mu
    } else {
        mean(&kept)
    }
}
