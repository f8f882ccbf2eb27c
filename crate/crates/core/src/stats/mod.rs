//! Descriptive statistics, inequality and normality measures, correlations.

mod correlation;
mod descriptive;
mod normality;
mod rank;

pub use correlation::{kendall_tau_b, pearson, spearman, CorrelationKind, CorrelationResult};
pub use descriptive::{
    describe, describe_with, quantile, DescribeOptions, DescriptiveSummary, GiniVariant,
    MomentEstimator,
};
pub use normality::{shapiro_wilk, NormalityResult};
pub use rank::{mid_ranks, tie_correction_sum};

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (divisor `n − 1`). Zero for `n < 2`.
pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile(&sorted, 0.5)
}
