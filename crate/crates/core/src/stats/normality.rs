//! Shapiro-Wilk W with Royston's (1995) approximations for the coefficients
//! and for the null distribution of W (algorithm AS R94).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::special::{erfc, normal_quantile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityResult {
    pub w_statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

// c[0] + c[1]·x + c[2]·x² + …
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, coef| acc * x + coef)
}

/// Half-vector of Shapiro-Wilk coefficients `a₁ ≥ a₂ ≥ … ≥ a_{n/2} > 0`.
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let nf = n as f64;
    // Expected normal order statistics (lower half, negative).
    let m: Vec<f64> = (1..=half)
        .map(|i| normal_quantile((i as f64 - 0.375) / (nf + 0.25)))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / nf.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; half];
    let (start, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        a[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    a[0] = a1;
    for i in start..half {
        a[i] = -m[i] / fac;
    }
    a
}

pub fn shapiro_wilk(values: &[f64]) -> Result<NormalityResult> {
    let n = values.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::SampleSizeOutOfRange(n));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite value".into()));
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    if x[n - 1] - x[0] == 0.0 {
        return Err(Error::DegenerateInput("all values identical".into()));
    }

    let a = coefficients(n);
    let mean = x.iter().sum::<f64>() / n as f64;
    let ssq: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let b: f64 = a
        .iter()
        .enumerate()
        .map(|(i, ai)| ai * (x[n - 1 - i] - x[i]))
        .sum();
    let w = (b * b / ssq).min(1.0);

    let nf = n as f64;
    let p_value = if n == 3 {
        let pi6 = 6.0 / std::f64::consts::PI;
        let stqr = std::f64::consts::FRAC_PI_3;
        (pi6 * (w.sqrt().asin() - stqr)).max(0.0)
    } else {
        let w1 = (1.0 - w).ln();
        let (z, mu, sigma) = if n <= 11 {
            let gamma = poly(&G, nf);
            if w1 >= gamma {
                return Ok(NormalityResult {
                    w_statistic: w,
                    p_value: 1e-99,
                    n,
                });
            }
            (-(gamma - w1).ln(), poly(&C3, nf), poly(&C4, nf).exp())
        } else {
            let ln_n = nf.ln();
            (w1, poly(&C5, ln_n), poly(&C6, ln_n).exp())
        };
        // upper tail of the standard normal
        0.5 * erfc((z - mu) / sigma / std::f64::consts::SQRT_2)
    };

    Ok(NormalityResult {
        w_statistic: w,
        p_value: p_value.clamp(0.0, 1.0),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_limits() {
        assert_eq!(shapiro_wilk(&[1.0, 2.0]), Err(Error::SampleSizeOutOfRange(2)));
        assert_eq!(
            shapiro_wilk(&vec![1.0; 5001]),
            Err(Error::SampleSizeOutOfRange(5001))
        );
        assert!(shapiro_wilk(&[2.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn coefficients_are_normalized() {
        for n in [4, 5, 6, 11, 12, 31, 200] {
            let a = coefficients(n);
            let ss = 2.0 * a.iter().map(|v| v * v).sum::<f64>();
            assert!((ss - 1.0).abs() < 1e-10, "n = {n}: {ss}");
            assert!(a.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn three_points_equally_spaced() {
        // W = 1 for equally spaced triples, p = 1.
        let r = shapiro_wilk(&[1.0, 2.0, 3.0]).unwrap();
        assert!((r.w_statistic - 1.0).abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-9);
    }
}
