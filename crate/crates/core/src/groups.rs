//! Paired category gaps, tag-based group comparisons, category-set
//! differentials and within-jurisdiction imbalance.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::aggregate::{overall_scores, AggregationMethod};
use crate::error::{Error, Result};
use crate::inference::{kruskal_wallis, mann_whitney, paired_gap_test, GroupTestResult, PairedTestResult};
use crate::model::{JurisdictionRecord, ScoreMatrix};
use crate::stats::{self, mean, median};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub jurisdiction: String,
    pub a: f64,
    pub b: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapAnalysis {
    pub cat_a: String,
    pub cat_b: String,
    /// Matrix row order.
    pub rows: Vec<GapRow>,
    pub mean_gap: f64,
    pub median_gap: f64,
    pub min_gap: f64,
    pub min_jurisdictions: Vec<String>,
    pub max_gap: f64,
    pub max_jurisdictions: Vec<String>,
    pub positive: usize,
    pub test: Option<PairedTestResult>,
    /// Why `test` is absent, e.g. every difference is zero.
    #[serde(serialize_with = "error_text")]
    pub degenerate: Option<Error>,
}

fn error_text<S: serde::Serializer>(err: &Option<Error>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match err {
        Some(e) => s.serialize_some(&format!("{}: {e}", e.kind())),
        None => s.serialize_none(),
    }
}

impl GapAnalysis {
    pub fn gaps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gap).collect()
    }

    /// Rows sorted by gap, largest first, ties by name.
    pub fn sorted_by_gap(&self) -> Vec<&GapRow> {
        let mut rows: Vec<&GapRow> = self.rows.iter().collect();
        rows.sort_by(|x, y| {
            y.gap
                .total_cmp(&x.gap)
                .then_with(|| x.jurisdiction.cmp(&y.jurisdiction))
        });
        rows
    }
}

pub fn gap_analysis(matrix: &ScoreMatrix, cat_a: &str, cat_b: &str) -> Result<GapAnalysis> {
    let a = matrix.column(cat_a)?;
    let b = matrix.column(cat_b)?;
    if a.is_empty() {
        return Err(Error::EmptyData);
    }
    let rows: Vec<GapRow> = matrix
        .jurisdictions()
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(j, (&a, &b))| GapRow {
            jurisdiction: j.name.clone(),
            a,
            b,
            gap: a - b,
        })
        .collect();
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max_gap = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let names_at = |v: f64| {
        rows.iter()
            .filter(|r| r.gap == v)
            .map(|r| r.jurisdiction.clone())
            .collect::<Vec<_>>()
    };
    let (test, degenerate) = match paired_gap_test(&a, &b) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e)),
    };
    Ok(GapAnalysis {
        cat_a: cat_a.to_string(),
        cat_b: cat_b.to_string(),
        mean_gap: mean(&gaps),
        median_gap: median(&gaps),
        min_jurisdictions: names_at(min_gap),
        max_jurisdictions: names_at(max_gap),
        min_gap,
        max_gap,
        positive: gaps.iter().filter(|g| **g > 0.0).count(),
        test,
        degenerate,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: String,
    pub size: usize,
    pub members: Vec<String>,
    pub mean_overall: f64,
    /// Matrix category order.
    pub category_means: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupBreakdown {
    pub dimension: String,
    /// Largest group first, ties by label.
    pub groups: Vec<GroupSummary>,
    pub untagged: Vec<String>,
    /// Mann-Whitney for two groups (U of the first, larger group),
    /// Kruskal-Wallis otherwise.
    pub test: GroupTestResult,
    /// `n₁n₂ − U`, the second group's U; two-group dimensions only.
    pub u_complement: Option<f64>,
    /// First group's category mean minus the second's; two-group
    /// dimensions only.
    pub differentials: Option<Vec<(String, f64)>>,
}

impl GroupBreakdown {
    pub fn group(&self, label: &str) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.label == label)
    }

    pub fn tagged_count(&self) -> usize {
        self.groups.iter().map(|g| g.size).sum()
    }
}

/// Overall scores used for group comparisons: reported values when every
/// record carries one, otherwise the weighted arithmetic mean under the
/// matrix's own weights.
pub fn group_overall(matrix: &ScoreMatrix) -> Result<Vec<f64>> {
    matrix.reported_overall().or_else(|_| {
        overall_scores(
            matrix,
            &matrix.baseline_weights(),
            AggregationMethod::WeightedArithmetic,
        )
    })
}

pub fn group_breakdown(matrix: &ScoreMatrix, dimension: &str) -> Result<GroupBreakdown> {
    group_breakdown_with(matrix, dimension, &group_overall(matrix)?)
}

/// Group comparison over caller-supplied overall scores (matrix row order).
pub fn group_breakdown_with(
    matrix: &ScoreMatrix,
    dimension: &str,
    overall: &[f64],
) -> Result<GroupBreakdown> {
    let rows = matrix.jurisdictions();
    if overall.len() != rows.len() {
        return Err(Error::LengthMismatch(overall.len(), rows.len()));
    }
    if !rows.iter().any(|j| j.tags.contains_key(dimension)) {
        return Err(Error::UnknownDimension(dimension.to_string()));
    }
    let labels: BTreeSet<&str> = rows.iter().filter_map(|j| j.tag(dimension)).collect();
    if labels.len() < 2 {
        return Err(Error::SingleGroup(dimension.to_string()));
    }
    let untagged = rows
        .iter()
        .filter(|j| j.tag(dimension).is_none())
        .map(|j| j.name.clone())
        .collect();

    let mut groups: Vec<(GroupSummary, Vec<f64>)> = labels
        .into_iter()
        .map(|label| {
            let idx: Vec<usize> = (0..rows.len())
                .filter(|&i| rows[i].tag(dimension) == Some(label))
                .collect();
            let values: Vec<f64> = idx.iter().map(|&i| overall[i]).collect();
            let category_means = matrix
                .categories()
                .iter()
                .map(|c| {
                    let col = idx
                        .iter()
                        .map(|&i| rows[i].score(&c.id))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((c.id.clone(), mean(&col)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((
                GroupSummary {
                    label: label.to_string(),
                    size: idx.len(),
                    members: idx.iter().map(|&i| rows[i].name.clone()).collect(),
                    mean_overall: mean(&values),
                    category_means,
                },
                values,
            ))
        })
        .collect::<Result<_>>()?;
    groups.sort_by(|(a, _), (b, _)| b.size.cmp(&a.size).then_with(|| a.label.cmp(&b.label)));

    let (test, u_complement, differentials) = if groups.len() == 2 {
        let (first, second) = (&groups[0], &groups[1]);
        let test = mann_whitney(&first.1, &second.1)?;
        let complement = (first.1.len() * second.1.len()) as f64 - test.statistic;
        let diffs = first
            .0
            .category_means
            .iter()
            .zip(&second.0.category_means)
            .map(|((id, a), (_, b))| (id.clone(), a - b))
            .collect();
        (test, Some(complement), Some(diffs))
    } else {
        let samples: Vec<&[f64]> = groups.iter().map(|(_, v)| v.as_slice()).collect();
        (kruskal_wallis(&samples)?, None, None)
    };

    Ok(GroupBreakdown {
        dimension: dimension.to_string(),
        groups: groups.into_iter().map(|(g, _)| g).collect(),
        untagged,
        test,
        u_complement,
        differentials,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetDifferential {
    pub mean_a: f64,
    pub mean_b: f64,
    /// `mean_b − mean_a`.
    pub differential: f64,
}

/// Mean of the per-category means within each set.
pub fn category_group_differential<S: AsRef<str>>(
    matrix: &ScoreMatrix,
    set_a: &[S],
    set_b: &[S],
) -> Result<SetDifferential> {
    if set_a.is_empty() || set_b.is_empty() {
        return Err(Error::InvalidArgument("category sets must be non-empty".into()));
    }
    if let Some(shared) = set_a
        .iter()
        .find(|a| set_b.iter().any(|b| b.as_ref() == a.as_ref()))
    {
        return Err(Error::OverlappingSets(shared.as_ref().to_string()));
    }
    let set_mean = |set: &[S]| -> Result<f64> {
        let means = set
            .iter()
            .map(|id| matrix.column(id.as_ref()).map(|c| mean(&c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(mean(&means))
    };
    let mean_a = set_mean(set_a)?;
    let mean_b = set_mean(set_b)?;
    Ok(SetDifferential {
        mean_a,
        mean_b,
        differential: mean_b - mean_a,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceProfile {
    pub jurisdiction: String,
    pub mean: f64,
    pub sd: f64,
    /// `sd / mean`; `None` when the mean is zero.
    pub cv: Option<f64>,
    pub spread: f64,
}

pub fn imbalance_profile(record: &JurisdictionRecord) -> Result<ImbalanceProfile> {
    let scores: Vec<f64> = record.category_scores.values().copied().collect();
    if scores.len() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: scores.len(),
        });
    }
    let m = mean(&scores);
    let sd = stats::sample_sd(&scores);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ImbalanceProfile {
        jurisdiction: record.name.clone(),
        mean: m,
        sd,
        cv: (m != 0.0).then(|| sd / m),
        spread: max - min,
    })
}

/// Imbalance profiles for every row, most imbalanced (highest CV) first.
pub fn imbalance_profiles(matrix: &ScoreMatrix) -> Result<Vec<ImbalanceProfile>> {
    let mut out = matrix
        .jurisdictions()
        .iter()
        .map(imbalance_profile)
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| {
        b.cv.unwrap_or(f64::INFINITY)
            .total_cmp(&a.cv.unwrap_or(f64::INFINITY))
            .then_with(|| a.jurisdiction.cmp(&b.jurisdiction))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CategorySpec;

    fn toy() -> ScoreMatrix {
        let cats = vec![CategorySpec::new("a", 0.5), CategorySpec::new("b", 0.5)];
        let rows = [
            ("P", 10.0, 5.0, "x"),
            ("Q", 20.0, 12.0, "x"),
            ("R", 30.0, 10.0, "y"),
            ("S", 40.0, 41.0, "y"),
            ("T", 50.0, 20.0, ""),
        ];
        ScoreMatrix::new(
            cats,
            rows.iter()
                .map(|(n, a, b, g)| {
                    JurisdictionRecord::new(*n, [("a", *a), ("b", *b)]).with_tag("g", *g)
                })
                .collect(),
        )
    }

    #[test]
    fn gaps_negate_when_swapped() {
        let m = toy();
        let ab = gap_analysis(&m, "a", "b").unwrap();
        let ba = gap_analysis(&m, "b", "a").unwrap();
        for (x, y) in ab.rows.iter().zip(&ba.rows) {
            assert_eq!(x.gap, -y.gap);
        }
        assert_eq!(ab.min_jurisdictions, vec!["S"]);
        assert_eq!(ab.max_gap, 30.0);
        assert_eq!(ab.positive, 4);
    }

    #[test]
    fn self_gap_is_flagged() {
        let g = gap_analysis(&toy(), "a", "a").unwrap();
        assert!(g.test.is_none());
        assert_eq!(g.degenerate, Some(Error::AllZeroDifferences));
        assert!(g.gaps().iter().all(|v| *v == 0.0));
        assert_eq!(
            gap_analysis(&toy(), "a", "zz").unwrap_err(),
            Error::UnknownCategory("zz".into())
        );
    }

    #[test]
    fn two_groups_and_untagged() {
        let b = group_breakdown(&toy(), "g").unwrap();
        assert_eq!(b.untagged, vec!["T"]);
        assert_eq!(b.tagged_count(), 4);
        assert_eq!(b.groups[0].label, "x");
        let d = b.differentials.as_ref().unwrap();
        assert_eq!(d[0], ("a".to_string(), 15.0 - 35.0));
        assert_eq!(b.test.statistic + b.u_complement.unwrap(), 4.0);
    }

    #[test]
    fn group_errors() {
        let m = toy();
        assert_eq!(
            group_breakdown(&m, "nope").unwrap_err(),
            Error::UnknownDimension("nope".into())
        );
        let cats = m.categories().to_vec();
        let single = ScoreMatrix::new(
            cats,
            m.jurisdictions()
                .iter()
                .cloned()
                .map(|j| j.with_tag("g", "same"))
                .collect(),
        );
        assert_eq!(
            group_breakdown(&single, "g").unwrap_err(),
            Error::SingleGroup("g".into())
        );
    }

    #[test]
    fn set_differential() {
        let m = toy();
        let d = category_group_differential(&m, &["a"], &["b"]).unwrap();
        assert_eq!(d.mean_a, 30.0);
        assert_eq!(d.mean_b, 17.6);
        assert!(matches!(
            category_group_differential(&m, &["a"], &["a"]),
            Err(Error::OverlappingSets(_))
        ));
    }

    #[test]
    fn constant_profile() {
        let r = JurisdictionRecord::new("C", [("a", 42.0), ("b", 42.0), ("c", 42.0)]);
        let p = imbalance_profile(&r).unwrap();
        assert_eq!(p.cv, Some(0.0));
        assert_eq!(p.spread, 0.0);
    }
}
