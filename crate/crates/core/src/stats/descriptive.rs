use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Estimator used for skewness and excess kurtosis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentEstimator {
    /// Adjusted Fisher-Pearson `G1` and the sample-adjusted `G2`.
    #[default]
    SampleAdjusted,
    /// Plain moment ratios `g1 = m3/m2^1.5`, `g2 = m4/m2² − 3`.
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GiniVariant {
    /// `Σᵢ Σⱼ |xᵢ − xⱼ| / (2 n² x̄)`
    #[default]
    Population,
    /// Population value times `n / (n − 1)`.
    SmallSampleCorrected,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescribeOptions {
    pub moments: MomentEstimator,
    pub gini: GiniVariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub cv: Option<f64>,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub gini: Option<f64>,
}

impl DescriptiveSummary {
    pub fn cv(&self) -> Result<f64> {
        self.cv
            .ok_or_else(|| Error::DegenerateInput("coefficient of variation needs a non-zero mean".into()))
    }

    pub fn skewness(&self) -> Result<f64> {
        self.skewness
            .ok_or_else(|| Error::DegenerateInput("skewness undefined for zero variance or n < 3".into()))
    }

    pub fn excess_kurtosis(&self) -> Result<f64> {
        self.excess_kurtosis
            .ok_or_else(|| Error::DegenerateInput("kurtosis undefined for zero variance or n < 4".into()))
    }

    pub fn gini(&self) -> Result<f64> {
        self.gini.ok_or_else(|| {
            Error::DegenerateInput("gini needs non-negative values with a positive mean".into())
        })
    }
}

/// Linear-interpolation quantile on a sorted slice, position `(n − 1)·p`.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn describe(values: &[f64]) -> Result<DescriptiveSummary> {
    describe_with(values, DescribeOptions::default())
}

pub fn describe_with(values: &[f64], opts: DescribeOptions) -> Result<DescriptiveSummary> {
    let n = values.len();
    if n < 2 {
        return Err(Error::DegenerateInput(format!(
            "at least 2 values required, got {n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite value".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mean = sorted.iter().sum::<f64>() / nf;

    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in &sorted {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let sd = (m2 / (nf - 1.0)).sqrt();
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    // Relative threshold so that constant vectors with rounding noise in the
    // mean still count as zero-variance.
    let zero_var = m2 <= f64::EPSILON * mean.abs().max(1.0).powi(2);
    let (skewness, excess_kurtosis) = if zero_var {
        (None, None)
    } else {
        let g1 = m3 / m2.powf(1.5);
        let g2 = m4 / (m2 * m2) - 3.0;
        match opts.moments {
            MomentEstimator::Population => (Some(g1), Some(g2)),
            MomentEstimator::SampleAdjusted => {
                let skew = (n >= 3).then(|| g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0));
                let kurt = (n >= 4)
                    .then(|| (nf - 1.0) / ((nf - 2.0) * (nf - 3.0)) * ((nf + 1.0) * g2 + 6.0));
                (skew, kurt)
            }
        }
    };

    let cv = (mean != 0.0).then(|| sd / mean);
    let gini = (mean > 0.0 && sorted[0] >= 0.0).then(|| {
        // Σᵢ Σⱼ |xᵢ − xⱼ| = 2 Σᵢ (2i − n − 1) x₍ᵢ₎ over sorted values.
        let abs_diff_sum: f64 = sorted
            .iter()
            .enumerate()
            .map(|(i, x)| (2.0 * (i + 1) as f64 - nf - 1.0) * x)
            .sum::<f64>()
            * 2.0;
        let g = abs_diff_sum / (2.0 * nf * nf * mean);
        match opts.gini {
            GiniVariant::Population => g,
            GiniVariant::SmallSampleCorrected => g * nf / (nf - 1.0),
        }
    });

    let q1 = quantile(&sorted, 0.25);
    let q3 = quantile(&sorted, 0.75);
    Ok(DescriptiveSummary {
        n,
        mean,
        median: quantile(&sorted, 0.5),
        sd,
        min: sorted[0],
        max: sorted[n - 1],
        range: sorted[n - 1] - sorted[0],
        q1,
        q3,
        iqr: q3 - q1,
        cv,
        skewness,
        excess_kurtosis,
        gini,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_vector() {
        let s = describe(&[5.0; 4]).unwrap();
        assert_eq!(s.sd, 0.0);
        assert_eq!(s.gini, Some(0.0));
        assert_eq!(s.cv, Some(0.0));
        assert!(matches!(s.skewness(), Err(Error::DegenerateInput(_))));
        assert!(s.excess_kurtosis().is_err());
        assert_eq!(s.median, 5.0);
    }

    #[test]
    fn too_short() {
        assert!(matches!(describe(&[1.0]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn zero_mean_has_no_cv_or_gini() {
        let s = describe(&[-1.0, 1.0]).unwrap();
        assert!(s.cv().is_err());
        assert!(s.gini().is_err());
    }

    #[test]
    fn two_point_gini() {
        for a in [0.5, 3.0, 100.0] {
            let s = describe(&[0.0, a]).unwrap();
            assert_eq!(s.gini, Some(0.5));
        }
    }

    #[test]
    fn quantiles_interpolate() {
        let s = describe(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.q3, 3.25);
        assert_eq!(s.iqr, 1.5);
    }

    #[test]
    fn moment_estimators_on_small_sample() {
        // x = 1,2,3,10: mean 4, deviations -3,-2,-1,6.
        // m2 = 50/4, m3 = 180/4, m4 = 1394/4.
        let x = [1.0, 2.0, 3.0, 10.0];
        let pop = describe_with(
            &x,
            DescribeOptions {
                moments: MomentEstimator::Population,
                ..Default::default()
            },
        )
        .unwrap();
        let m2: f64 = 12.5;
        let g1 = 45.0 / m2.powf(1.5);
        let g2 = 348.5 / (m2 * m2) - 3.0;
        assert!((pop.skewness.unwrap() - g1).abs() < 1e-12);
        assert!((pop.excess_kurtosis.unwrap() - g2).abs() < 1e-12);
        let adj = describe(&x).unwrap();
        assert!((adj.skewness.unwrap() - g1 * 12f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((adj.excess_kurtosis.unwrap() - 3.0 / 2.0 * (5.0 * g2 + 6.0)).abs() < 1e-12);
    }
}
