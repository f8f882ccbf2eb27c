//! Overall scores, tier assignment and display rankings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{JurisdictionRecord, ScoreMatrix, TierScheme, WeightScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMethod {
    WeightedArithmetic,
    WeightedGeometric,
}

impl AggregationMethod {
    pub fn label(self) -> &'static str {
        match self {
            AggregationMethod::WeightedArithmetic => "arithmetic",
            AggregationMethod::WeightedGeometric => "geometric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingEntry {
    pub rank: usize,
    pub jurisdiction: String,
    pub overall: f64,
    pub tier: String,
    pub category_scores: Vec<(String, f64)>,
}

/// Weighted arithmetic (`Σ wᵢcᵢ`) or geometric (`Π cᵢ^wᵢ`) mean of a record's
/// category scores.
pub fn aggregate_overall(
    record: &JurisdictionRecord,
    weights: &WeightScheme,
    method: AggregationMethod,
) -> Result<f64> {
    match method {
        AggregationMethod::WeightedArithmetic => weights
            .weights
            .iter()
            .map(|(id, w)| record.score(id).map(|s| w * s))
            .sum(),
        AggregationMethod::WeightedGeometric => {
            let mut log_sum = 0.0;
            for (id, w) in &weights.weights {
                let s = record.score(id)?;
                if s <= 0.0 {
                    // A zero-weight category cannot move the product, but a
                    // zero score is still reported: the method is undefined on it.
                    return Err(Error::GeometricZeroScore {
                        jurisdiction: record.name.clone(),
                        category: id.clone(),
                    });
                }
                log_sum += w * s.ln();
            }
            Ok(log_sum.exp())
        }
    }
}

/// Tier name for `score`.
pub fn tier_of(score: f64, tiers: &TierScheme) -> &str {
    &tiers.tier_of(score).name
}

/// Overall scores in matrix row order.
pub fn overall_scores(
    matrix: &ScoreMatrix,
    weights: &WeightScheme,
    method: AggregationMethod,
) -> Result<Vec<f64>> {
    weights.validate_for(matrix.categories())?;
    matrix
        .jurisdictions()
        .iter()
        .map(|j| aggregate_overall(j, weights, method))
        .collect()
}

/// Descending ranking. Ties in the overall score fall back to name order.
pub fn rank_matrix(
    matrix: &ScoreMatrix,
    weights: &WeightScheme,
    method: AggregationMethod,
    tiers: &TierScheme,
    use_reported: bool,
) -> Result<Vec<RankingEntry>> {
    let overall = if use_reported {
        matrix.reported_overall()?
    } else {
        overall_scores(matrix, weights, method)?
    };
    rank_scores(matrix, &overall, tiers)
}

/// Ranks precomputed overall scores (row order of `matrix`).
pub fn rank_scores(
    matrix: &ScoreMatrix,
    overall: &[f64],
    tiers: &TierScheme,
) -> Result<Vec<RankingEntry>> {
    let rows = matrix.jurisdictions();
    if overall.len() != rows.len() {
        return Err(Error::LengthMismatch(overall.len(), rows.len()));
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        overall[b]
            .total_cmp(&overall[a])
            .then_with(|| rows[a].name.cmp(&rows[b].name))
    });
    order
        .into_iter()
        .enumerate()
        .map(|(pos, i)| {
            let record = &rows[i];
            Ok(RankingEntry {
                rank: pos + 1,
                jurisdiction: record.name.clone(),
                overall: overall[i],
                tier: tier_of(overall[i], tiers).to_string(),
                category_scores: matrix
                    .categories()
                    .iter()
                    .map(|c| record.score(&c.id).map(|s| (c.id.clone(), s)))
                    .collect::<Result<_>>()?,
            })
        })
        .collect()
}

/// Rank of each matrix row, in row order.
pub fn ranks_in_row_order(matrix: &ScoreMatrix, ranking: &[RankingEntry]) -> Vec<usize> {
    matrix
        .jurisdictions()
        .iter()
        .map(|j| {
            ranking
                .iter()
                .find(|e| e.jurisdiction == j.name)
                .map(|e| e.rank)
                .expect("ranking covers every row")
        })
        .collect()
}

/// Number of jurisdictions per tier, in tier-scheme order.
pub fn tier_counts(ranking: &[RankingEntry], tiers: &TierScheme) -> Vec<(String, usize)> {
    tiers
        .names()
        .map(|name| {
            (
                name.to_string(),
                ranking.iter().filter(|e| e.tier == name).count(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_sri_config, CategorySpec, SRI_CATEGORY_IDS};

    fn sri_record(name: &str, scores: [f64; 6]) -> JurisdictionRecord {
        JurisdictionRecord::new(name, SRI_CATEGORY_IDS.iter().copied().zip(scores))
    }

    #[test]
    fn uk_arithmetic() {
        let (w, _) = default_sri_config();
        let uk = sri_record("United Kingdom", [55.0, 35.0, 70.0, 20.0, 40.0, 75.0]);
        // 11 + 5.25 + 10.5 + 4 + 6 + 11.25
        let s = aggregate_overall(&uk, &w, AggregationMethod::WeightedArithmetic).unwrap();
        assert!((s - 48.0).abs() < 1e-12);
    }

    #[test]
    fn eu_within_rounding_bound() {
        let (w, _) = default_sri_config();
        let eu = sri_record("European Union", [55.0, 25.0, 70.0, 20.0, 40.0, 75.0]);
        let s = aggregate_overall(&eu, &w, AggregationMethod::WeightedArithmetic).unwrap();
        assert!((s - 46.5).abs() < 1e-12);
        assert!((s - 46.75).abs() <= 2.0);
    }

    #[test]
    fn constant_vector_is_fixed_point() {
        let (w, _) = default_sri_config();
        let r = sri_record("c", [50.0; 6]);
        for m in [
            AggregationMethod::WeightedArithmetic,
            AggregationMethod::WeightedGeometric,
        ] {
            assert!((aggregate_overall(&r, &w, m).unwrap() - 50.0).abs() < 1e-9);
        }
    }

    #[test]
    fn geometric_zero_is_an_error() {
        let (w, _) = default_sri_config();
        let r = sri_record("z", [50.0, 0.0, 50.0, 50.0, 50.0, 50.0]);
        let err = aggregate_overall(&r, &w, AggregationMethod::WeightedGeometric).unwrap_err();
        assert_eq!(err.kind(), "GeometricZeroScore");
        assert!(aggregate_overall(&r, &w, AggregationMethod::WeightedArithmetic).is_ok());
    }

    #[test]
    fn ties_break_by_name() {
        let cats = vec![CategorySpec::new("a", 0.5), CategorySpec::new("b", 0.5)];
        let rows = vec![
            JurisdictionRecord::new("Zed", [("a", 40.0), ("b", 40.0)]),
            JurisdictionRecord::new("Alpha", [("a", 40.0), ("b", 40.0)]),
            JurisdictionRecord::new("Mid", [("a", 10.0), ("b", 10.0)]),
        ];
        let m = ScoreMatrix::new(cats, rows);
        let r = rank_matrix(
            &m,
            &m.baseline_weights(),
            AggregationMethod::WeightedArithmetic,
            &TierScheme::default(),
            false,
        )
        .unwrap();
        let names: Vec<_> = r.iter().map(|e| (e.rank, e.jurisdiction.as_str())).collect();
        assert_eq!(names, vec![(1, "Alpha"), (2, "Zed"), (3, "Mid")]);
        assert_eq!(ranks_in_row_order(&m, &r), vec![2, 1, 3]);
    }

    #[test]
    fn use_reported_requires_values() {
        let cats = vec![CategorySpec::new("a", 0.5), CategorySpec::new("b", 0.5)];
        let rows = vec![
            JurisdictionRecord::new("A", [("a", 40.0), ("b", 40.0)]).with_reported(41.0),
            JurisdictionRecord::new("B", [("a", 40.0), ("b", 40.0)]),
            JurisdictionRecord::new("C", [("a", 40.0), ("b", 40.0)]).with_reported(12.0),
        ];
        let m = ScoreMatrix::new(cats, rows);
        let err = rank_matrix(
            &m,
            &m.baseline_weights(),
            AggregationMethod::WeightedArithmetic,
            &TierScheme::default(),
            true,
        )
        .unwrap_err();
        assert_eq!(err, Error::MissingReportedOverall("B".into()));
    }
}
