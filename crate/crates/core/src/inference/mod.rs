//! Hypothesis tests and effect sizes: paired t / Wilcoxon signed-rank,
//! Mann-Whitney U, Kruskal-Wallis H, and the CDFs their p-values need.
//!
//! The rank-based tests use normal (or chi-square) approximations with tie
//! corrections and no continuity correction.

pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{mean, mid_ranks, sample_sd, tie_correction_sum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Distribution {
    StandardNormal,
    StudentT { df: f64 },
    ChiSquare { df: f64 },
}

impl Distribution {
    fn check(self, x: f64) -> Result<Self> {
        if x.is_nan() {
            return Err(Error::InvalidArgument("distribution evaluated at NaN".into()));
        }
        match self {
            Distribution::StandardNormal => Ok(self),
            Distribution::StudentT { df } | Distribution::ChiSquare { df } => {
                if df.is_finite() && df >= 1.0 {
                    Ok(self)
                } else {
                    Err(Error::InvalidDf(df))
                }
            }
        }
    }

    pub fn cdf(self, x: f64) -> Result<f64> {
        Ok(match self.check(x)? {
            Distribution::StandardNormal => 0.5 * special::erfc(-x / std::f64::consts::SQRT_2),
            Distribution::StudentT { df } => {
                let tail = student_t_tail(df, x);
                if x > 0.0 {
                    1.0 - tail
                } else {
                    tail
                }
            }
            Distribution::ChiSquare { df } => special::gamma_p(df / 2.0, x.max(0.0) / 2.0),
        })
    }

    /// Survival function `1 − CDF`, computed directly so far tails keep
    /// their precision.
    pub fn sf(self, x: f64) -> Result<f64> {
        Ok(match self.check(x)? {
            Distribution::StandardNormal => 0.5 * special::erfc(x / std::f64::consts::SQRT_2),
            Distribution::StudentT { df } => {
                let tail = student_t_tail(df, x);
                if x > 0.0 {
                    tail
                } else {
                    1.0 - tail
                }
            }
            Distribution::ChiSquare { df } => special::gamma_q(df / 2.0, x.max(0.0) / 2.0),
        })
    }
}

// P(T > |t|).
fn student_t_tail(df: f64, t: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    0.5 * special::beta_inc(df / 2.0, 0.5, df / (df + t * t))
}

pub fn dist_cdf(kind: Distribution, x: f64) -> Result<f64> {
    kind.cdf(x)
}

/// Two-sided p-value for a standard-normal z.
pub fn two_sided_normal_p(z: f64) -> f64 {
    (2.0 * 0.5 * special::erfc(z.abs() / std::f64::consts::SQRT_2)).min(1.0)
}

/// Two-sided p-value for a Student-t statistic.
pub fn two_sided_t_p(t: f64, df: f64) -> Result<f64> {
    Distribution::StudentT { df }.check(t)?;
    Ok((2.0 * student_t_tail(df, t)).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedTestResult {
    pub n: usize,
    pub mean_diff: f64,
    pub t_statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub cohens_d: f64,
    /// `min(W⁺, W⁻)` over the non-zero differences.
    pub wilcoxon_w: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub wilcoxon_p: f64,
    /// `(W⁺ − W⁻) / (W⁺ + W⁻)`; positive when `a` tends to exceed `b`.
    pub matched_rank_biserial: f64,
    /// Pairs dropped from the signed-rank test because `a == b`.
    pub zero_differences: usize,
}

/// Paired t-test, Cohen's d and Wilcoxon signed-rank on `a − b`.
pub fn paired_gap_test(a: &[f64], b: &[f64]) -> Result<PairedTestResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 3 {
        return Err(Error::TooFewObservations { needed: 3, got: n });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let nonzero: Vec<f64> = d.iter().copied().filter(|v| *v != 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::AllZeroDifferences);
    }
    let mean_diff = mean(&d);
    let sd = sample_sd(&d);
    if sd == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let t = mean_diff / (sd / (n as f64).sqrt());
    let df = n - 1;
    let p_value = two_sided_t_p(t, df as f64)?;

    let abs: Vec<f64> = nonzero.iter().map(|v| v.abs()).collect();
    let ranks = mid_ranks(&abs);
    let (mut w_plus, mut w_minus) = (0.0, 0.0);
    for (v, r) in nonzero.iter().zip(&ranks) {
        if *v > 0.0 {
            w_plus += r;
        } else {
            w_minus += r;
        }
    }
    let m = nonzero.len() as f64;
    let expected = m * (m + 1.0) / 4.0;
    let var = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - tie_correction_sum(&abs) / 48.0;
    let w = w_plus.min(w_minus);
    let wilcoxon_p = if var > 0.0 {
        two_sided_normal_p((w - expected) / var.sqrt())
    } else {
        1.0
    };

    Ok(PairedTestResult {
        n,
        mean_diff,
        t_statistic: t,
        df,
        p_value,
        cohens_d: mean_diff / sd,
        wilcoxon_w: w,
        w_plus,
        w_minus,
        wilcoxon_p,
        matched_rank_biserial: (w_plus - w_minus) / (w_plus + w_minus),
        zero_differences: n - nonzero.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    MannWhitneyU,
    KruskalWallisH,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectKind {
    RankBiserial,
    EtaSquared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTestResult {
    pub statistic: f64,
    pub statistic_kind: StatisticKind,
    pub df: Option<usize>,
    pub p_value: f64,
    pub effect_size: f64,
    pub effect_kind: EffectKind,
    pub group_sizes: Vec<usize>,
    pub group_means: Vec<f64>,
}

/// Mann-Whitney U for `group_a`, with rank-biserial `2U/(n₁n₂) − 1`.
///
/// A negative rank-biserial means `group_a` tends to score lower.
pub fn mann_whitney(group_a: &[f64], group_b: &[f64]) -> Result<GroupTestResult> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let (n1, n2) = (group_a.len() as f64, group_b.len() as f64);
    let pooled: Vec<f64> = group_a.iter().chain(group_b).copied().collect();
    let ranks = mid_ranks(&pooled);
    let rank_sum_a: f64 = ranks[..group_a.len()].iter().sum();
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;

    let n = n1 + n2;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_correction_sum(&pooled) / (n * (n - 1.0)));
    let p_value = if var > 0.0 {
        two_sided_normal_p((u - n1 * n2 / 2.0) / var.sqrt())
    } else {
        1.0
    };

    Ok(GroupTestResult {
        statistic: u,
        statistic_kind: StatisticKind::MannWhitneyU,
        df: None,
        p_value,
        effect_size: 2.0 * u / (n1 * n2) - 1.0,
        effect_kind: EffectKind::RankBiserial,
        group_sizes: vec![group_a.len(), group_b.len()],
        group_means: vec![mean(group_a), mean(group_b)],
    })
}

/// Kruskal-Wallis H with tie correction and `η² = (H − k + 1)/(n − k)`.
pub fn kruskal_wallis<G: AsRef<[f64]>>(groups: &[G]) -> Result<GroupTestResult> {
    let k = groups.len();
    if k < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: k });
    }
    if groups.iter().any(|g| g.as_ref().is_empty()) {
        return Err(Error::EmptyGroup);
    }
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.as_ref().iter().copied()).collect();
    let n = pooled.len();
    if n < k + 2 {
        return Err(Error::TooFewObservations { needed: k + 2, got: n });
    }
    let ranks = mid_ranks(&pooled);
    let nf = n as f64;
    let mut offset = 0;
    let mut between = 0.0;
    for g in groups {
        let len = g.as_ref().len();
        let r: f64 = ranks[offset..offset + len].iter().sum();
        between += r * r / len as f64;
        offset += len;
    }
    let raw = 12.0 / (nf * (nf + 1.0)) * between - 3.0 * (nf + 1.0);
    let correction = 1.0 - tie_correction_sum(&pooled) / (nf * nf * nf - nf);
    // All observations tied: no rank variation, hence no group effect.
    let h = if correction > 0.0 { (raw / correction).max(0.0) } else { 0.0 };
    let df = k - 1;
    let p_value = Distribution::ChiSquare { df: df as f64 }.sf(h)?;

    Ok(GroupTestResult {
        statistic: h,
        statistic_kind: StatisticKind::KruskalWallisH,
        df: Some(df),
        p_value,
        effect_size: (h - k as f64 + 1.0) / (nf - k as f64),
        effect_kind: EffectKind::EtaSquared,
        group_sizes: groups.iter().map(|g| g.as_ref().len()).collect(),
        group_means: groups.iter().map(|g| mean(g.as_ref())).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_spot_values() {
        assert_eq!(dist_cdf(Distribution::StandardNormal, 0.0).unwrap(), 0.5);
        let t1 = dist_cdf(Distribution::StudentT { df: 1.0 }, 1.0).unwrap();
        assert!((t1 - 0.75).abs() < 1e-12);
        let c2 = dist_cdf(Distribution::ChiSquare { df: 2.0 }, 2.0 * 2f64.ln()).unwrap();
        assert!((c2 - 0.5).abs() < 1e-12);
        assert_eq!(
            dist_cdf(Distribution::StudentT { df: 0.5 }, 1.0),
            Err(Error::InvalidDf(0.5))
        );
        assert!(dist_cdf(Distribution::ChiSquare { df: f64::NAN }, 1.0).is_err());
    }

    #[test]
    fn paired_constant_shift_is_degenerate() {
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        let a: Vec<f64> = b.iter().map(|x| x + 1.0).collect();
        assert_eq!(paired_gap_test(&a, &b), Err(Error::DegenerateVariance));
        assert_eq!(paired_gap_test(&b, &b), Err(Error::AllZeroDifferences));
    }

    #[test]
    fn paired_small_by_hand() {
        // diffs (2, 0, 2): zero dropped, |d| ranks (1.5, 1.5), all positive.
        let r = paired_gap_test(&[3.0, 1.0, 4.0], &[1.0, 1.0, 2.0]).unwrap();
        assert!((r.mean_diff - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.w_plus, 3.0);
        assert_eq!(r.w_minus, 0.0);
        assert_eq!(r.wilcoxon_w, 0.0);
        assert_eq!(r.matched_rank_biserial, 1.0);
        assert_eq!(r.zero_differences, 1);
        assert_eq!(r.df, 2);
    }

    #[test]
    fn mann_whitney_small() {
        let r = mann_whitney(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.effect_size, -1.0);
        let r = mann_whitney(&[1.0, 3.0], &[2.0, 4.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert_eq!(mann_whitney(&[], &[1.0]), Err(Error::EmptyGroup));
    }

    #[test]
    fn kruskal_identical_groups() {
        let g = vec![vec![1.0, 2.0, 3.0]; 3];
        let r = kruskal_wallis(&g).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert_eq!(r.df, Some(2));
    }

    #[test]
    fn kruskal_errors() {
        assert_eq!(
            kruskal_wallis(&[vec![1.0], vec![]]),
            Err(Error::EmptyGroup)
        );
        assert!(matches!(
            kruskal_wallis(&[vec![1.0], vec![2.0]]),
            Err(Error::TooFewObservations { .. })
        ));
        let all_tied = kruskal_wallis(&[vec![5.0, 5.0], vec![5.0, 5.0]]).unwrap();
        assert_eq!(all_tied.statistic, 0.0);
    }
}
