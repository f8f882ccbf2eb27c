//! Weight-sensitivity sweeps, arithmetic-vs-geometric comparison and
//! multi-run scoring stability.
//!
//! Every comparison re-aggregates from category scores; reported overall
//! values never enter a sweep.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::{rank_matrix, ranks_in_row_order, AggregationMethod, RankingEntry};
use crate::error::{Error, Result};
use crate::model::{MultiRunRecord, ScoreMatrix, TierScheme, WeightScheme};
use crate::stats::{self, kendall_tau_b, spearman};

/// How a perturbation's offset is absorbed by the non-target categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Redistribution {
    /// Equal share per non-target category.
    #[default]
    Equal,
    /// Shares proportional to the non-targets' base weights.
    Proportional,
}

fn pp_label(delta: f64) -> String {
    let pp = delta * 100.0;
    if (pp - pp.round()).abs() < 1e-9 {
        format!("{:+}pp", pp.round() as i64)
    } else {
        format!("{pp:+.2}pp")
    }
}

fn shifted(
    base: &WeightScheme,
    targets: &[&str],
    shifts: &[(&str, f64)],
    policy: Redistribution,
) -> Result<WeightScheme> {
    let others: Vec<&(String, f64)> = base
        .weights
        .iter()
        .filter(|(id, _)| !targets.contains(&id.as_str()))
        .collect();
    if others.is_empty() {
        return Err(Error::InvalidArgument(
            "every category is a target; nothing can absorb the offset".into(),
        ));
    }
    let offset: f64 = shifts.iter().map(|(_, d)| d).sum();
    let other_total: f64 = others.iter().map(|(_, w)| w).sum();
    let name = shifts
        .iter()
        .map(|(id, d)| format!("{id}{}", pp_label(*d)))
        .collect::<Vec<_>>()
        .join("/");

    let weights = base
        .weights
        .iter()
        .map(|(id, w)| {
            let new = if let Some((_, d)) = shifts.iter().find(|(t, _)| t == id) {
                w + d
            } else if targets.contains(&id.as_str()) {
                *w
            } else {
                match policy {
                    Redistribution::Equal => w - offset / others.len() as f64,
                    Redistribution::Proportional if other_total > 0.0 => {
                        w - offset * w / other_total
                    }
                    Redistribution::Proportional => w - offset / others.len() as f64,
                }
            };
            if new < -1e-12 {
                return Err(Error::NegativeWeightProduced(id.clone()));
            }
            Ok((id.clone(), new.max(0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightScheme::new(name, weights))
}

/// ±`delta` shifts of each target on its own, plus every joint sign
/// combination when there are two or more targets (8 schemes for 2 targets).
pub fn perturbation_family(
    base: &WeightScheme,
    targets: &[&str],
    delta: f64,
) -> Result<Vec<WeightScheme>> {
    perturbation_family_with(base, targets, delta, Redistribution::Equal)
}

pub fn perturbation_family_with(
    base: &WeightScheme,
    targets: &[&str],
    delta: f64,
    policy: Redistribution,
) -> Result<Vec<WeightScheme>> {
    base.validate()?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "perturbation delta must be positive, got {delta}"
        )));
    }
    if targets.is_empty() {
        return Err(Error::InvalidArgument("no target categories".into()));
    }
    let mut seen = HashSet::new();
    for t in targets {
        if base.weight_of(t).is_none() {
            return Err(Error::UnknownCategory(t.to_string()));
        }
        if !seen.insert(*t) {
            return Err(Error::InvalidArgument(format!("target {t:?} repeated")));
        }
    }

    let mut out = Vec::new();
    for t in targets {
        for sign in [1.0, -1.0] {
            out.push(shifted(base, targets, &[(t, sign * delta)], policy)?);
        }
    }
    if targets.len() >= 2 {
        for mask in 0..(1usize << targets.len()) {
            let shifts: Vec<(&str, f64)> = targets
                .iter()
                .enumerate()
                .map(|(i, t)| (*t, if mask & (1 << i) == 0 { delta } else { -delta }))
                .collect();
            out.push(shifted(base, targets, &shifts, policy)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mover {
    pub jurisdiction: String,
    pub old_rank: usize,
    pub new_rank: usize,
}

impl Mover {
    /// Positive when the jurisdiction moved up (towards rank 1).
    pub fn change(&self) -> i64 {
        self.old_rank as i64 - self.new_rank as i64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeComparison {
    pub scheme_name: String,
    pub spearman_vs_baseline: f64,
    pub spearman_p: f64,
    pub kendall_vs_baseline: f64,
    pub kendall_p: f64,
    pub tier_changes: usize,
    pub mean_abs_rank_change: f64,
    pub max_abs_rank_change: f64,
    /// Jurisdictions with a non-zero rank change, largest move first.
    pub movers: Vec<Mover>,
    pub ranking: Vec<RankingEntry>,
}

fn rank_correlation(a: &[f64], b: &[f64]) -> Result<(f64, f64, f64, f64)> {
    if a == b {
        return Ok((1.0, 0.0, 1.0, 0.0));
    }
    let rho = spearman(a, b)?;
    let tau = kendall_tau_b(a, b)?;
    Ok((rho.coefficient, rho.p_value, tau.coefficient, tau.p_value))
}

fn compare_rankings(
    matrix: &ScoreMatrix,
    name: &str,
    baseline: &[RankingEntry],
    alternative: Vec<RankingEntry>,
) -> Result<SchemeComparison> {
    let base_ranks = ranks_in_row_order(matrix, baseline);
    let alt_ranks = ranks_in_row_order(matrix, &alternative);
    let as_f64 = |r: &[usize]| r.iter().map(|&x| x as f64).collect::<Vec<_>>();
    let (rho, rho_p, tau, tau_p) = rank_correlation(&as_f64(&base_ranks), &as_f64(&alt_ranks))?;

    let tier_of = |ranking: &[RankingEntry], name: &str| {
        ranking
            .iter()
            .find(|e| e.jurisdiction == name)
            .map(|e| e.tier.clone())
    };
    let tier_changes = matrix
        .jurisdictions()
        .iter()
        .filter(|j| tier_of(baseline, &j.name) != tier_of(&alternative, &j.name))
        .count();

    let mut movers: Vec<Mover> = matrix
        .jurisdictions()
        .iter()
        .zip(base_ranks.iter().zip(&alt_ranks))
        .filter(|(_, (a, b))| a != b)
        .map(|(j, (&old_rank, &new_rank))| Mover {
            jurisdiction: j.name.clone(),
            old_rank,
            new_rank,
        })
        .collect();
    movers.sort_by(|a, b| {
        b.change()
            .abs()
            .cmp(&a.change().abs())
            .then_with(|| a.old_rank.cmp(&b.old_rank))
    });
    let changes: Vec<f64> = base_ranks
        .iter()
        .zip(&alt_ranks)
        .map(|(&a, &b)| (a as f64 - b as f64).abs())
        .collect();

    Ok(SchemeComparison {
        scheme_name: name.to_string(),
        spearman_vs_baseline: rho,
        spearman_p: rho_p,
        kendall_vs_baseline: tau,
        kendall_p: tau_p,
        tier_changes,
        mean_abs_rank_change: stats::mean(&changes),
        max_abs_rank_change: changes.iter().copied().fold(0.0, f64::max),
        movers,
        ranking: alternative,
    })
}

/// Each alternative scheme's ranking against the baseline scheme's.
/// Output order follows `alternatives`.
pub fn compare_schemes(
    matrix: &ScoreMatrix,
    baseline: &WeightScheme,
    alternatives: &[WeightScheme],
    method: AggregationMethod,
    tiers: &TierScheme,
) -> Result<Vec<SchemeComparison>> {
    let base = rank_matrix(matrix, baseline, method, tiers, false)?;
    alternatives
        .par_iter()
        .map(|scheme| {
            let alt = rank_matrix(matrix, scheme, method, tiers, false)?;
            compare_rankings(matrix, &scheme.name, &base, alt)
        })
        .collect()
}

/// Arithmetic ranking (baseline) against the geometric ranking under the
/// same weights.
pub fn compare_aggregation(
    matrix: &ScoreMatrix,
    weights: &WeightScheme,
    tiers: &TierScheme,
) -> Result<SchemeComparison> {
    let arith = rank_matrix(matrix, weights, AggregationMethod::WeightedArithmetic, tiers, false)?;
    let geo = rank_matrix(matrix, weights, AggregationMethod::WeightedGeometric, tiers, false)?;
    compare_rankings(matrix, "geometric", &arith, geo)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JurisdictionStability {
    pub jurisdiction: String,
    pub run_count: usize,
    pub mean: f64,
    /// Sample SD across runs; `None` for a single run.
    pub sd: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    /// Distinct tiers reached across runs, in tier-scheme order.
    pub tiers: Vec<String>,
    pub included: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub runs_threshold: usize,
    pub jurisdictions: Vec<JurisdictionStability>,
    pub qualifying: usize,
    /// Mean within-jurisdiction SD over jurisdictions with at least
    /// `runs_threshold` runs.
    pub mean_sd: Option<f64>,
}

pub fn stability(
    runs: &[MultiRunRecord],
    runs_threshold: usize,
    tiers: &TierScheme,
) -> Result<StabilityReport> {
    if runs_threshold < 2 {
        return Err(Error::InvalidArgument(format!(
            "runs threshold must be at least 2, got {runs_threshold}"
        )));
    }
    let mut rows = Vec::with_capacity(runs.len());
    for record in runs {
        record.validate()?;
        let scores = record.scores();
        let n = scores.len();
        let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let reached: HashSet<&str> = scores.iter().map(|s| tiers.tier_of(*s).name.as_str()).collect();
        rows.push(JurisdictionStability {
            jurisdiction: record.jurisdiction.clone(),
            run_count: n,
            mean: stats::mean(&scores),
            sd: (n >= 2).then(|| stats::sample_sd(&scores)),
            min,
            max,
            range: max - min,
            tiers: tiers
                .names()
                .filter(|t| reached.contains(t))
                .map(str::to_string)
                .collect(),
            included: n >= runs_threshold,
        });
    }
    let qualifying: Vec<f64> = rows
        .iter()
        .filter(|r| r.included)
        .filter_map(|r| r.sd)
        .collect();
    Ok(StabilityReport {
        runs_threshold,
        qualifying: qualifying.len(),
        mean_sd: (!qualifying.is_empty()).then(|| stats::mean(&qualifying)),
        jurisdictions: rows,
    })
}
