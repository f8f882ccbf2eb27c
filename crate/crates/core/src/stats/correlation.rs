use serde::{Deserialize, Serialize};

use super::rank::{mid_ranks, tie_group_sizes};
use crate::error::{Error, Result};
use crate::inference::{two_sided_normal_p, two_sided_t_p};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Pearson,
    SpearmanRho,
    KendallTauB,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub coefficient: f64,
    pub kind: CorrelationKind,
    pub n: usize,
    /// Two-sided.
    pub p_value: f64,
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            got: x.len(),
        });
    }
    let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::ConstantVector);
    }
    Ok(())
}

fn product_moment(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

fn t_test_p(r: f64, n: usize) -> Result<f64> {
    if r.abs() >= 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    two_sided_t_p(r * (df / (1.0 - r * r)).sqrt(), df)
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    check_pair(x, y)?;
    let r = product_moment(x, y);
    Ok(CorrelationResult {
        coefficient: r,
        kind: CorrelationKind::Pearson,
        n: x.len(),
        p_value: t_test_p(r, x.len())?,
    })
}

/// Pearson correlation of mid-ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    check_pair(x, y)?;
    let r = product_moment(&mid_ranks(x), &mid_ranks(y));
    Ok(CorrelationResult {
        coefficient: r,
        kind: CorrelationKind::SpearmanRho,
        n: x.len(),
        p_value: t_test_p(r, x.len())?,
    })
}

/// Kendall's tau-b by pair enumeration; the p-value uses the normal
/// approximation with the tie-corrected variance of `S = C − D`.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    check_pair(x, y)?;
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = (x[i] - x[j]).signum() * ((x[i] != x[j]) as i32 as f64);
            let dy = (y[i] - y[j]).signum() * ((y[i] != y[j]) as i32 as f64);
            s += dx * dy;
        }
    }
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        tie_group_sizes(&s)
    };
    let tx = sorted(x);
    let ty = sorted(y);
    let nf = n as f64;
    let n0 = nf * (nf - 1.0) / 2.0;
    let pairs = |t: &[usize]| t.iter().map(|&t| (t * (t - 1) / 2) as f64).sum::<f64>();
    let tau = (s / ((n0 - pairs(&tx)) * (n0 - pairs(&ty))).sqrt()).clamp(-1.0, 1.0);

    let sum_of = |t: &[usize], f: &dyn Fn(f64) -> f64| t.iter().map(|&t| f(t as f64)).sum::<f64>();
    let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
    let vt = sum_of(&tx, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = sum_of(&ty, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let v1 = sum_of(&tx, &|t| t * (t - 1.0)) * sum_of(&ty, &|t| t * (t - 1.0));
    let v2 = sum_of(&tx, &|t| t * (t - 1.0) * (t - 2.0)) * sum_of(&ty, &|t| t * (t - 1.0) * (t - 2.0));
    let var = (v0 - vt - vu) / 18.0
        + v1 / (2.0 * nf * (nf - 1.0))
        + v2 / (9.0 * nf * (nf - 1.0) * (nf - 2.0));
    let p_value = if var > 0.0 {
        two_sided_normal_p(s / var.sqrt())
    } else {
        1.0
    };

    Ok(CorrelationResult {
        coefficient: tau,
        kind: CorrelationKind::KendallTauB,
        n,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_correlation() {
        let x = [1.0, 4.0, 2.0, 8.0, 5.0];
        assert!((pearson(&x, &x).unwrap().coefficient - 1.0).abs() < 1e-12);
        assert_eq!(pearson(&x, &x).unwrap().p_value, 0.0);
        assert_eq!(kendall_tau_b(&x, &x).unwrap().coefficient, 1.0);
        assert!((spearman(&x, &x).unwrap().coefficient - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_extremes_and_swap() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let rev = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert!((spearman(&x, &rev).unwrap().coefficient + 1.0).abs() < 1e-12);
        // Σd² = 2, 1 − 12/120
        let y = [1.0, 2.0, 3.0, 5.0, 4.0];
        assert!((spearman(&x, &y).unwrap().coefficient - 0.9).abs() < 1e-12);
    }

    #[test]
    fn kendall_three_points() {
        let t = kendall_tau_b(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap();
        assert!((t.coefficient - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert_eq!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ConstantVector)
        );
        assert_eq!(
            spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::LengthMismatch(2, 3))
        );
        assert!(kendall_tau_b(&[1.0, 2.0], &[2.0, 1.0]).is_err());
    }
}
