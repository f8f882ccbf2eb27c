//! Principal component analysis over category columns and pairwise
//! correlation matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ScoreMatrix;
use crate::stats::{self, CorrelationKind};

const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching unit
/// eigenvectors as rows.
pub fn symmetric_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    // columns of v are eigenvectors
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = a
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1.0);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off < OFF_DIAGONAL_TOLERANCE * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                // Rows p and q are both updated, so index rather than iterate.
                #[allow(clippy::needless_range_loop)]
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (values, vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub categories: Vec<String>,
    pub standardized: bool,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// One row per component, one column per category. Each row's
    /// largest-magnitude entry is positive.
    pub loadings: Vec<Vec<f64>>,
    pub component_count: usize,
}

pub fn pca(matrix: &ScoreMatrix, standardized: bool) -> Result<PcaResult> {
    if matrix.len() < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            got: matrix.len(),
        });
    }
    let ids: Vec<String> = matrix.category_ids().iter().map(|s| s.to_string()).collect();
    let columns: Vec<Vec<f64>> = ids
        .iter()
        .map(|id| matrix.column(id))
        .collect::<Result<_>>()?;
    let dispersion = if standardized {
        for (id, col) in ids.iter().zip(&columns) {
            if stats::sample_sd(col) == 0.0 {
                return Err(Error::ConstantColumn(id.clone()));
            }
        }
        correlation_of_columns(&columns)
    } else {
        covariance_of_columns(&columns)
    };

    let (eigenvalues, mut loadings) = symmetric_eigen(&dispersion);
    for row in loadings.iter_mut() {
        let pivot = row
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        if pivot < 0.0 {
            row.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let clipped: Vec<f64> = eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let explained_variance_ratio = clipped.iter().map(|v| v / total).collect();

    Ok(PcaResult {
        component_count: ids.len(),
        categories: ids,
        standardized,
        eigenvalues,
        explained_variance_ratio,
        loadings,
    })
}

fn covariance_of_columns(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = columns.len();
    let n = columns[0].len() as f64;
    let means: Vec<f64> = columns.iter().map(|c| stats::mean(c)).collect();
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let s: f64 = columns[i]
                .iter()
                .zip(&columns[j])
                .map(|(a, b)| (a - means[i]) * (b - means[j]))
                .sum();
            out[i][j] = s / (n - 1.0);
            out[j][i] = out[i][j];
        }
    }
    out
}

fn correlation_of_columns(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cov = covariance_of_columns(columns);
    let k = cov.len();
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            out[i][j] = if i == j {
                1.0
            } else {
                cov[i][j] / (cov[i][i] * cov[j][j]).sqrt()
            };
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub kind: CorrelationKind,
    pub categories: Vec<String>,
    pub coefficients: Vec<Vec<f64>>,
    pub p_values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    /// Upper-triangle pairs `(i, j, r, p)` with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        let k = self.categories.len();
        (0..k).flat_map(move |i| {
            ((i + 1)..k).map(move |j| (i, j, self.coefficients[i][j], self.p_values[i][j]))
        })
    }

    pub fn get(&self, a: &str, b: &str) -> Option<(f64, f64)> {
        let i = self.categories.iter().position(|c| c == a)?;
        let j = self.categories.iter().position(|c| c == b)?;
        Some((self.coefficients[i][j], self.p_values[i][j]))
    }
}

/// Pairwise correlations of all category columns. `kind` must be Pearson or
/// Spearman.
pub fn correlation_matrix(matrix: &ScoreMatrix, kind: CorrelationKind) -> Result<CorrelationMatrix> {
    if matrix.len() < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            got: matrix.len(),
        });
    }
    let pair_fn = match kind {
        CorrelationKind::Pearson => stats::pearson,
        CorrelationKind::SpearmanRho => stats::spearman,
        CorrelationKind::KendallTauB => stats::kendall_tau_b,
    };
    let ids: Vec<String> = matrix.category_ids().iter().map(|s| s.to_string()).collect();
    let columns: Vec<Vec<f64>> = ids
        .iter()
        .map(|id| matrix.column(id))
        .collect::<Result<_>>()?;
    let k = ids.len();
    let mut coefficients = vec![vec![1.0; k]; k];
    let mut p_values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let r = pair_fn(&columns[i], &columns[j])?;
            coefficients[i][j] = r.coefficient;
            coefficients[j][i] = r.coefficient;
            p_values[i][j] = r.p_value;
            p_values[j][i] = r.p_value;
        }
    }
    Ok(CorrelationMatrix {
        kind,
        categories: ids,
        coefficients,
        p_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        // [[2, 1], [1, 2]] has eigenvalues 3 and 1.
        let (vals, vecs) = symmetric_eigen(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((vecs[0][0].abs() - h).abs() < 1e-12);
        assert!((vecs[0][0] - vecs[0][1]).abs() < 1e-12);
    }

    #[test]
    fn diagonal_input_is_untouched() {
        let (vals, _) = symmetric_eigen(&[vec![1.0, 0.0, 0.0], vec![0.0, 5.0, 0.0], vec![0.0, 0.0, 3.0]]);
        assert_eq!(vals, vec![5.0, 3.0, 1.0]);
    }
}
