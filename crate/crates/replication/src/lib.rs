//! End-to-end reproduction checks against the published SRI figures.
//!
//! Every target value and tolerance lives here, once. The CLI's
//! `report --full` and the acceptance test suite both run these checks.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sri_core::aggregate::{aggregate_overall, rank_matrix, tier_counts, AggregationMethod};
use sri_core::error::{Error, Result};
use sri_core::groups::{category_group_differential, gap_analysis, group_breakdown, imbalance_profile};
use sri_core::inference::{dist_cdf, mann_whitney, Distribution};
use sri_core::io;
use sri_core::model::{
    default_sri_config, validate_matrix, CategorySpec, JurisdictionRecord, MultiRunRecord,
    ScoreMatrix, TierScheme, WeightScheme, ADAPTIVE_CAPACITY, INSTITUTIONAL_ENGAGEMENT,
    POLICY_ENVIRONMENT, PROFESSIONAL_READINESS, PUBLIC_DISCOURSE, RESEARCH_ENVIRONMENT,
};
use sri_core::multivariate::{correlation_matrix, pca, symmetric_eigen};
use sri_core::report::{render_chart, ChartData};
use sri_core::robustness::{compare_aggregation, compare_schemes, perturbation_family, stability};
use sri_core::stats::{self, describe, describe_with, mid_ranks, pearson, shapiro_wilk, spearman};
use sri_core::stats::{CorrelationKind, DescribeOptions, MomentEstimator};

/// Published ranking order, rank 1 first.
pub const PUBLISHED_ORDER: [&str; 31] = [
    "United Kingdom",
    "European Union",
    "United States",
    "Japan",
    "Germany",
    "Australia",
    "Canada",
    "France",
    "Austria",
    "Spain",
    "Switzerland",
    "Norway",
    "Sweden",
    "South Korea",
    "Mexico",
    "Denmark",
    "Poland",
    "Belgium",
    "Netherlands",
    "Brazil",
    "China",
    "UAE",
    "Indonesia",
    "Italy",
    "Thailand",
    "Saudi Arabia",
    "Argentina",
    "India",
    "Nigeria",
    "Russia",
    "Turkey",
];

/// Published category statistics: mean, median, SD, min, max, range, IQR, CV.
const CATEGORY_TABLE: [(&str, [f64; 8]); 6] = [
    (RESEARCH_ENVIRONMENT, [50.16, 55.0, 15.14, 20.0, 75.0, 55.0, 25.0, 0.30]),
    (ADAPTIVE_CAPACITY, [49.94, 50.0, 13.70, 18.0, 75.0, 57.0, 15.5, 0.27]),
    (POLICY_ENVIRONMENT, [38.16, 35.0, 11.88, 15.0, 62.0, 47.0, 16.0, 0.31]),
    (PUBLIC_DISCOURSE, [24.06, 25.0, 9.61, 5.0, 40.0, 35.0, 15.0, 0.40]),
    (INSTITUTIONAL_ENGAGEMENT, [20.39, 20.0, 10.61, 5.0, 45.0, 40.0, 11.0, 0.52]),
    (PROFESSIONAL_READINESS, [16.52, 15.0, 5.44, 5.0, 30.0, 25.0, 5.0, 0.33]),
];

/// Seed for the randomized property checks.
pub const PROPERTY_SEED: u64 = 0x5eed_2025;
pub const PROPERTY_CASES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub observed: String,
    pub expected: String,
    pub pass: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: observed {}, expected {}",
            if self.pass { "ok" } else { "MISS" },
            self.label,
            self.observed,
            self.expected
        )
    }
}

fn approx(label: impl Into<String>, observed: f64, expected: f64, tol: f64) -> Check {
    Check {
        label: label.into(),
        observed: format!("{observed:.4}"),
        expected: format!("{expected} ± {tol}"),
        pass: (observed - expected).abs() <= tol + 1e-12,
    }
}

fn exact(label: impl Into<String>, observed: f64, expected: f64) -> Check {
    Check {
        label: label.into(),
        observed: format!("{observed}"),
        expected: format!("{expected} exactly"),
        pass: (observed - expected).abs() < 1e-9,
    }
}

fn holds(label: impl Into<String>, pass: bool, observed: impl Into<String>, expected: impl Into<String>) -> Check {
    Check {
        label: label.into(),
        observed: observed.into(),
        expected: expected.into(),
        pass,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub note: Option<String>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// One line: `criterion 3 PASS distribution statistics (9/9 checks)`.
    pub fn summary_line(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.pass).count();
        format!(
            "criterion {:>2} {} {} ({ok}/{} checks)",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checks.len()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationReport {
    pub criteria: Vec<Criterion>,
}

impl ReplicationReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(Criterion::passed)
    }

    pub fn criterion(&self, id: u8) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.id == id)
    }
}

pub const CRITERIA: [(u8, &str); 14] = [
    (1, "ranking reproduction"),
    (2, "rounding-policy bound"),
    (3, "distribution statistics"),
    (4, "category statistics table"),
    (5, "research-professional gap"),
    (6, "category correlations"),
    (7, "principal components"),
    (8, "weight robustness"),
    (9, "aggregation robustness"),
    (10, "group comparisons"),
    (11, "category-group differential"),
    (12, "imbalance profiles"),
    (13, "scoring stability substitutes"),
    (14, "property suites"),
];

/// Runs one criterion. Analysis errors become a failing check rather than
/// aborting the report.
pub fn run_criterion(id: u8, matrix: &ScoreMatrix) -> Criterion {
    let title = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, t)| *t)
        .unwrap_or("unknown criterion");
    let outcome = match id {
        1 => ranking(matrix),
        2 => rounding_bound(matrix),
        3 => distribution(matrix),
        4 => category_table(matrix),
        5 => gap(matrix),
        6 => correlations(matrix),
        7 => components(matrix),
        8 => weight_robustness(matrix),
        9 => aggregation_robustness(matrix),
        10 => group_comparisons(matrix),
        11 => set_differential(matrix),
        12 => profiles(matrix),
        13 => stability_substitutes(),
        14 => property_suites(PROPERTY_SEED, PROPERTY_CASES),
        _ => Err(Error::InvalidArgument(format!("no criterion {id}"))),
    };
    let (checks, note) = match outcome {
        Ok((checks, note)) => (checks, note),
        Err(e) => (
            vec![holds("analysis completed", false, format!("{}: {e}", e.kind()), "no error")],
            None,
        ),
    };
    Criterion {
        id,
        title,
        checks,
        note,
    }
}

pub fn run_all(matrix: &ScoreMatrix) -> ReplicationReport {
    ReplicationReport {
        criteria: CRITERIA.iter().map(|(id, _)| run_criterion(*id, matrix)).collect(),
    }
}

type Outcome = Result<(Vec<Check>, Option<String>)>;

fn sri() -> (WeightScheme, TierScheme) {
    default_sri_config()
}

fn rank_of(ranking: &[sri_core::aggregate::RankingEntry], name: &str) -> Option<usize> {
    ranking.iter().find(|e| e.jurisdiction == name).map(|e| e.rank)
}

fn ranking(matrix: &ScoreMatrix) -> Outcome {
    let (w, tiers) = sri();
    let mut checks = vec![holds(
        "dataset validates",
        validate_matrix(matrix).is_empty(),
        format!("{} violation(s)", validate_matrix(matrix).len()),
        "0 violations",
    )];
    let r = rank_matrix(matrix, &w, AggregationMethod::WeightedArithmetic, &tiers, true)?;
    let order: Vec<&str> = r.iter().map(|e| e.jurisdiction.as_str()).collect();
    let mismatches = order
        .iter()
        .zip(PUBLISHED_ORDER.iter())
        .filter(|(a, b)| a != b)
        .count()
        + order.len().abs_diff(PUBLISHED_ORDER.len());
    checks.push(holds(
        "rank order matches the published table",
        mismatches == 0,
        format!("{mismatches} position(s) differ"),
        "0",
    ));
    let first = &r[0];
    checks.push(holds(
        "rank 1",
        first.jurisdiction == "United Kingdom" && first.tier == "Partially Prepared",
        format!("{} ({})", first.jurisdiction, first.tier),
        "United Kingdom (Partially Prepared)",
    ));
    checks.push(exact("rank 1 overall", first.overall, 49.0));
    let last = &r[r.len() - 1];
    checks.push(holds(
        format!("rank {}", last.rank),
        last.rank == 31 && last.jurisdiction == "Turkey" && last.tier == "Unprepared",
        format!("{} {} ({})", last.rank, last.jurisdiction, last.tier),
        "31 Turkey (Unprepared)",
    ));
    checks.push(exact("rank 31 overall", last.overall, 14.25));
    let counts = tier_counts(&r, &tiers);
    let count = |name: &str| counts.iter().find(|(n, _)| n == name).map(|(_, c)| *c).unwrap_or(0);
    for (tier, expected) in [
        ("Partially Prepared", 8),
        ("Minimally Prepared", 21),
        ("Unprepared", 2),
        ("Moderately Prepared", 0),
        ("Well Prepared", 0),
    ] {
        checks.push(exact(format!("{tier} count"), count(tier) as f64, expected as f64));
    }
    let dense: BTreeSet<usize> = r.iter().map(|e| e.rank).collect();
    checks.push(holds(
        "ranks are 1..N",
        dense.len() == r.len() && dense.iter().next() == Some(&1) && dense.iter().last() == Some(&r.len()),
        format!("{} distinct ranks", dense.len()),
        format!("1..{}", r.len()),
    ));
    Ok((checks, None))
}

fn rounding_bound(matrix: &ScoreMatrix) -> Outcome {
    let (w, _) = sri();
    let mut breaches = Vec::new();
    let mut worst: f64 = 0.0;
    for j in matrix.jurisdictions() {
        let reported = j
            .reported_overall
            .ok_or_else(|| Error::MissingReportedOverall(j.name.clone()))?;
        let recomputed = aggregate_overall(j, &w, AggregationMethod::WeightedArithmetic)?;
        let dev = (recomputed - reported).abs();
        worst = worst.max(dev);
        if dev > 2.0 {
            breaches.push(format!("{} ({recomputed:.2} vs {reported:.2})", j.name));
        }
    }
    let checks = vec![
        holds(
            "every |recomputed − reported| ≤ 2.0",
            breaches.is_empty(),
            if breaches.is_empty() {
                "none above 2.0".to_string()
            } else {
                format!("breaches: {}", breaches.join(", "))
            },
            "no breaches",
        ),
        holds("largest deviation", worst <= 2.0, format!("{worst:.2}"), "≤ 2.0"),
    ];
    let note = (!breaches.is_empty()).then(|| {
        "The published table's own category scores and overall scores disagree by more than 2 points for the listed rows; the bound is reported as measured.".to_string()
    });
    Ok((checks, note))
}

fn distribution(matrix: &ScoreMatrix) -> Outcome {
    let overall = matrix.reported_overall()?;
    let s = describe(&overall)?;
    let pop = describe_with(
        &overall,
        DescribeOptions {
            moments: MomentEstimator::Population,
            ..Default::default()
        },
    )?;
    let sw = shapiro_wilk(&overall)?;
    let either = |label: &str, adjusted: f64, population: f64, target: f64| {
        let best = if (adjusted - target).abs() <= (population - target).abs() {
            adjusted
        } else {
            population
        };
        Check {
            label: label.to_string(),
            observed: format!("sample-adjusted {adjusted:.3}, population {population:.3}"),
            expected: format!("{target} ± 0.03 under either"),
            pass: (best - target).abs() <= 0.03,
        }
    };
    let checks = vec![
        approx("mean", s.mean, 33.03, 0.01),
        approx("SD", s.sd, 9.12, 0.01),
        exact("median", s.median, 35.25),
        approx("Gini", s.gini()?, 0.155, 0.005),
        approx("Shapiro-Wilk W", sw.w_statistic, 0.970, 0.005),
        approx("Shapiro-Wilk p", sw.p_value, 0.512, 0.05),
        either("skewness", s.skewness()?, pop.skewness()?, -0.265),
        either("excess kurtosis", s.excess_kurtosis()?, pop.excess_kurtosis()?, -0.816),
    ];
    Ok((checks, None))
}

fn category_table(matrix: &ScoreMatrix) -> Outcome {
    let mut checks = Vec::new();
    for (id, [mean, median, sd, min, max, range, iqr, cv]) in CATEGORY_TABLE {
        let s = describe(&matrix.column(id)?)?;
        let name = sri_core::model::display_name_for(id);
        checks.push(approx(format!("{name} mean"), s.mean, mean, 0.01));
        checks.push(approx(format!("{name} median"), s.median, median, 0.01));
        checks.push(approx(format!("{name} SD"), s.sd, sd, 0.01));
        checks.push(approx(format!("{name} min"), s.min, min, 0.01));
        checks.push(approx(format!("{name} max"), s.max, max, 0.01));
        checks.push(approx(format!("{name} range"), s.range, range, 0.01));
        checks.push(approx(format!("{name} IQR"), s.iqr, iqr, 1.0));
        checks.push(approx(format!("{name} CV"), s.cv()?, cv, 0.01));
    }
    Ok((checks, None))
}

fn gap(matrix: &ScoreMatrix) -> Outcome {
    let g = gap_analysis(matrix, RESEARCH_ENVIRONMENT, PROFESSIONAL_READINESS)?;
    let t = g.test.as_ref().ok_or_else(|| g.degenerate.clone().unwrap_or(Error::EmptyData))?;
    let max: BTreeSet<&str> = g.max_jurisdictions.iter().map(String::as_str).collect();
    let checks = vec![
        exact("positive gaps", g.positive as f64, matrix.len() as f64),
        approx("mean gap", g.mean_gap, 33.65, 0.05),
        exact("median gap", g.median_gap, 35.0),
        approx("paired t", t.t_statistic, 16.03, 0.05),
        exact("df", t.df as f64, 30.0),
        approx("Cohen's d", t.cohens_d, 2.88, 0.02),
        exact("Wilcoxon W", t.wilcoxon_w, 0.0),
        approx("matched rank-biserial", t.matched_rank_biserial, 1.0, 0.005),
        holds(
            "minimum gap",
            g.min_gap == 15.0 && g.min_jurisdictions == ["Russia"],
            format!("{} ({})", g.min_gap, g.min_jurisdictions.join(", ")),
            "15 (Russia)",
        ),
        holds(
            "maximum gap",
            g.max_gap == 52.0 && max == BTreeSet::from(["Canada", "Japan"]),
            format!("{} ({})", g.max_gap, g.max_jurisdictions.join(", ")),
            "52 (Japan, Canada)",
        ),
    ];
    Ok((checks, None))
}

fn correlations(matrix: &ScoreMatrix) -> Outcome {
    let c = correlation_matrix(matrix, CorrelationKind::Pearson)?;
    let r = |a: &str, b: &str| c.get(a, b).map(|(r, _)| r).ok_or_else(|| Error::UnknownCategory(b.into()));
    let p: Vec<f64> = c.pairs().map(|(_, _, _, p)| p).collect();
    let below = |cut: f64| p.iter().filter(|v| **v < cut).count();
    let checks = vec![
        approx("r(RE, PD)", r(RESEARCH_ENVIRONMENT, PUBLIC_DISCOURSE)?, 0.876, 0.005),
        approx("r(IE, PD)", r(INSTITUTIONAL_ENGAGEMENT, PUBLIC_DISCOURSE)?, 0.767, 0.005),
        approx("r(IE, AC)", r(INSTITUTIONAL_ENGAGEMENT, ADAPTIVE_CAPACITY)?, 0.423, 0.005),
        exact("pairs with p < .05", below(0.05) as f64, 15.0),
        holds("pairs with p < .001", below(0.001) >= 11, below(0.001).to_string(), "≥ 11"),
    ];
    Ok((checks, None))
}

fn components(matrix: &ScoreMatrix) -> Outcome {
    let p = pca(matrix, true)?;
    let idx = |id: &str| p.categories.iter().position(|c| c == id).ok_or_else(|| Error::UnknownCategory(id.into()));
    let pc1 = &p.loadings[0];
    let pc2 = &p.loadings[1];
    let one_sign = pc1.iter().all(|v| *v > 0.0) || pc1.iter().all(|v| *v < 0.0);
    let sign = |v: f64| v.signum();
    let (pe, ac, ie, pr) = (
        pc2[idx(POLICY_ENVIRONMENT)?],
        pc2[idx(ADAPTIVE_CAPACITY)?],
        pc2[idx(INSTITUTIONAL_ENGAGEMENT)?],
        pc2[idx(PROFESSIONAL_READINESS)?],
    );
    let separated = sign(pe) == sign(ac) && sign(ie) == sign(pr) && sign(pe) != sign(ie);
    let checks = vec![
        approx("PC1 explained variance", p.explained_variance_ratio[0], 0.707, 0.01),
        holds("PC1 loadings share one sign", one_sign, format!("{pc1:.3?}"), "all one sign"),
        approx("PC2 explained variance", p.explained_variance_ratio[1], 0.104, 0.01),
        holds(
            "PC2 separates {PE, AC} from {IE, PR}",
            separated,
            format!("PE {pe:.3}, AC {ac:.3}, IE {ie:.3}, PR {pr:.3}"),
            "sign(PE) = sign(AC) ≠ sign(IE) = sign(PR)",
        ),
    ];
    Ok((checks, None))
}

const TOP_TWO: [&str; 2] = ["United Kingdom", "European Union"];
const BOTTOM_TWO: [&str; 2] = ["Russia", "Turkey"];

fn ends(ranking: &[sri_core::aggregate::RankingEntry]) -> (BTreeSet<String>, BTreeSet<String>) {
    let n = ranking.len();
    let top = ranking.iter().take(2).map(|e| e.jurisdiction.clone()).collect();
    let bottom = ranking.iter().skip(n.saturating_sub(2)).map(|e| e.jurisdiction.clone()).collect();
    (top, bottom)
}

fn extreme_scheme() -> WeightScheme {
    WeightScheme::new(
        "extreme",
        vec![
            (POLICY_ENVIRONMENT.into(), 0.10),
            (INSTITUTIONAL_ENGAGEMENT.into(), 0.10),
            (RESEARCH_ENVIRONMENT.into(), 0.30),
            (PROFESSIONAL_READINESS.into(), 0.10),
            (PUBLIC_DISCOURSE.into(), 0.10),
            (ADAPTIVE_CAPACITY.into(), 0.30),
        ],
    )
}

fn weight_robustness(matrix: &ScoreMatrix) -> Outcome {
    let (w, tiers) = sri();
    let family = perturbation_family(&w, &[POLICY_ENVIRONMENT, PROFESSIONAL_READINESS], 0.05)?;
    let equal = WeightScheme::equal("equal", &matrix.category_ids());
    let mut all = family.clone();
    all.push(equal);
    all.push(extreme_scheme());
    let cmp = compare_schemes(matrix, &w, &all, AggregationMethod::WeightedArithmetic, &tiers)?;
    let (fam, rest) = cmp.split_at(family.len());
    let min_rho = fam.iter().map(|c| c.spearman_vs_baseline).fold(f64::INFINITY, f64::min);
    let max_changes = fam.iter().map(|c| c.tier_changes).max().unwrap_or(0);
    let top: BTreeSet<String> = TOP_TWO.iter().map(|s| s.to_string()).collect();
    let bottom: BTreeSet<String> = BOTTOM_TWO.iter().map(|s| s.to_string()).collect();
    let baseline = rank_matrix(matrix, &w, AggregationMethod::WeightedArithmetic, &tiers, false)?;
    let end_breaks: Vec<&str> = std::iter::once(("baseline", &baseline))
        .chain(cmp.iter().map(|c| (c.scheme_name.as_str(), &c.ranking)))
        .filter(|(_, r)| ends(r) != (top.clone(), bottom.clone()))
        .map(|(n, _)| n)
        .collect();
    let checks = vec![
        exact("family size", fam.len() as f64, 8.0),
        holds("family: every Spearman > 0.99", min_rho > 0.99, format!("min {min_rho:.4}"), "> 0.99"),
        holds("family: tier changes ≤ 2", max_changes <= 2, format!("max {max_changes}"), "≤ 2"),
        approx("equal weights: Spearman", rest[0].spearman_vs_baseline, 0.995, 0.005),
        approx("equal weights: tier changes", rest[0].tier_changes as f64, 1.0, 1.0),
        approx("extreme scheme: Spearman", rest[1].spearman_vs_baseline, 0.957, 0.01),
        approx("extreme scheme: tier changes", rest[1].tier_changes as f64, 10.0, 2.0),
        holds(
            "top-2 and bottom-2 sets invariant",
            end_breaks.is_empty(),
            if end_breaks.is_empty() { "invariant".to_string() } else { format!("broken in {}", end_breaks.join(", ")) },
            "{UK, EU} top, {Russia, Turkey} bottom in every scheme",
        ),
    ];
    Ok((checks, None))
}

fn aggregation_robustness(matrix: &ScoreMatrix) -> Outcome {
    let (w, tiers) = sri();
    let c = compare_aggregation(matrix, &w, &tiers)?;
    let arith = rank_matrix(matrix, &w, AggregationMethod::WeightedArithmetic, &tiers, false)?;
    let top_abs = c.movers.first().map(|m| m.change().abs()).unwrap_or(0);
    let italy = c.movers.iter().find(|m| m.jurisdiction == "Italy");
    let italy_is_max = italy.is_some_and(|m| m.change().abs() == top_abs);
    let france_old = rank_of(&arith, "France");
    let france_new = rank_of(&c.ranking, "France");
    let fixed: Vec<String> = TOP_TWO
        .iter()
        .chain(BOTTOM_TWO.iter())
        .filter(|n| rank_of(&arith, n) != rank_of(&c.ranking, n))
        .map(|n| n.to_string())
        .collect();
    let checks = vec![
        approx("Spearman", c.spearman_vs_baseline, 0.982, 0.01),
        approx("Kendall", c.kendall_vs_baseline, 0.906, 0.015),
        approx("mean |rank change|", c.mean_abs_rank_change, 1.13, 0.15),
        approx("max |rank change|", c.max_abs_rank_change, 5.0, 1.0),
        holds(
            "Italy is the largest mover",
            italy_is_max,
            c.movers
                .first()
                .map(|m| format!("{} moved {}", m.jurisdiction, m.change().abs()))
                .unwrap_or_default(),
            "Italy",
        ),
        approx("Italy arithmetic rank", italy.map_or(0.0, |m| m.old_rank as f64), 24.0, 1.0),
        approx("Italy geometric rank", italy.map_or(0.0, |m| m.new_rank as f64), 29.0, 1.0),
        holds(
            "France improves under geometric",
            matches!((france_old, france_new), (Some(a), Some(b)) if b < a),
            format!("{france_old:?} -> {france_new:?}"),
            "rank improves by ≥ 1",
        ),
        holds(
            "top-2 and bottom-2 ranks unchanged",
            fixed.is_empty(),
            if fixed.is_empty() { "unchanged".to_string() } else { format!("moved: {}", fixed.join(", ")) },
            "UK, EU, Russia, Turkey unchanged",
        ),
    ];
    Ok((checks, None))
}

fn group_comparisons(matrix: &ScoreMatrix) -> Outcome {
    let mut checks = Vec::new();
    let gov = group_breakdown(matrix, "governance")?;
    let mean_of = |b: &sri_core::groups::GroupBreakdown, label: &str| {
        b.group(label)
            .map(|g| g.mean_overall)
            .ok_or_else(|| Error::InvalidArgument(format!("no group {label:?}")))
    };
    checks.push(approx("democracy mean", mean_of(&gov, "democracy")?, 36.13, 0.01));
    checks.push(approx("hybrid/authoritarian mean", mean_of(&gov, "hybrid/authoritarian")?, 22.39, 0.01));
    checks.push(exact("Mann-Whitney U", gov.test.statistic, 156.0));
    checks.push(approx("|rank-biserial|", gov.test.effect_size.abs(), 0.857, 0.005));
    let diffs = gov.differentials.clone().unwrap_or_default();
    let all_positive = diffs.len() == 6 && diffs.iter().all(|(_, d)| *d > 0.0);
    checks.push(holds(
        "all six differentials positive",
        all_positive,
        format!("{:?}", diffs.iter().map(|(_, d)| (d * 100.0).round() / 100.0).collect::<Vec<_>>()),
        "all > 0",
    ));
    let diff = |id: &str| diffs.iter().find(|(c, _)| c == id).map(|(_, d)| *d).unwrap_or(f64::NAN);
    checks.push(approx("RE differential", diff(RESEARCH_ENVIRONMENT), 22.35, 0.05));
    checks.push(approx("AC differential", diff(ADAPTIVE_CAPACITY), 18.37, 0.05));
    checks.push(approx("PD differential", diff(PUBLIC_DISCOURSE), 13.37, 0.05));

    let region = group_breakdown(matrix, "region")?;
    checks.push(approx("regional H", region.test.statistic, 12.95, 0.1));
    checks.push(exact("regional n", region.tagged_count() as f64, 30.0));
    checks.push(approx("regional eta squared", region.test.effect_size, 0.358, 0.012));
    for (label, target) in [
        ("North America", 40.70),
        ("Europe", 37.46),
        ("Asia-Pacific", 31.51),
        ("Middle East & Africa", 21.81),
        ("Latin America", 26.65),
    ] {
        checks.push(approx(format!("{label} mean"), mean_of(&region, label)?, target, 0.01));
    }

    let income = group_breakdown(matrix, "income")?;
    checks.push(approx("income H", income.test.statistic, 14.31, 0.1));
    checks.push(approx("income eta squared", income.test.effect_size, 0.44, 0.01));
    for (label, target) in [("high", 37.35), ("upper-middle", 24.64), ("lower-middle", 22.38)] {
        checks.push(approx(format!("{label} income mean"), mean_of(&income, label)?, target, 0.01));
    }
    Ok((checks, None))
}

fn set_differential(matrix: &ScoreMatrix) -> Outcome {
    let d = category_group_differential(
        matrix,
        &[INSTITUTIONAL_ENGAGEMENT, PROFESSIONAL_READINESS, PUBLIC_DISCOURSE],
        &[POLICY_ENVIRONMENT, RESEARCH_ENVIRONMENT, ADAPTIVE_CAPACITY],
    )?;
    Ok((
        vec![
            approx("novel-category mean", d.mean_a, 20.32, 0.02),
            approx("overlap-category mean", d.mean_b, 46.09, 0.02),
            approx("differential", d.differential, 25.76, 0.02),
        ],
        None,
    ))
}

fn profiles(matrix: &ScoreMatrix) -> Outcome {
    let find = |name: &str| {
        matrix
            .jurisdiction(name)
            .ok_or_else(|| Error::InvalidArgument(format!("{name} missing from dataset")))
    };
    let nl = imbalance_profile(find("Netherlands")?)?;
    let italy = find("Italy")?;
    let ie = italy.score(INSTITUTIONAL_ENGAGEMENT)?;
    let pd = italy.score(PUBLIC_DISCOURSE)?;
    let ie_min = stats::describe(&matrix.column(INSTITUTIONAL_ENGAGEMENT)?)?.min;
    let pd_min = stats::describe(&matrix.column(PUBLIC_DISCOURSE)?)?.min;
    Ok((
        vec![
            approx("Netherlands CV", nl.cv.unwrap_or(f64::NAN), 0.80, 0.01),
            exact("Netherlands spread", nl.spread, 62.0),
            holds(
                "Italy IE = PD = 5 at the column floor",
                ie == 5.0 && pd == 5.0 && ie_min == 5.0 && pd_min == 5.0,
                format!("IE {ie}, PD {pd}; floors {ie_min}, {pd_min}"),
                "5 and 5, both column minima",
            ),
        ],
        None,
    ))
}

/// Synthetic multi-run fixture; published run-level data does not exist.
pub fn synthetic_runs() -> Vec<MultiRunRecord> {
    let rec = |name: &str, scores: &[f64]| MultiRunRecord {
        jurisdiction: name.into(),
        run_scores: scores.iter().enumerate().map(|(i, s)| (format!("run{}", i + 1), *s)).collect(),
    };
    vec![
        rec("Alpha", &[30.4, 40.0, 50.3]),
        rec("Beta", &[42.0, 42.0, 42.0]),
        rec("Gamma", &[25.0]),
        rec("Delta", &[18.5, 21.5, 20.0, 24.0]),
    ]
}

fn stability_substitutes() -> Outcome {
    let tiers = TierScheme::default();
    let runs = synthetic_runs();
    let report = stability(&runs, 3, &tiers)?;
    let mut reversed = runs.clone();
    for r in &mut reversed {
        r.run_scores.reverse();
    }
    reversed.reverse();
    let again = stability(&reversed, 3, &tiers)?;
    let row = |name: &str| report.jurisdictions.iter().find(|j| j.jurisdiction == name);
    let alpha = row("Alpha").ok_or(Error::EmptyData)?;
    let beta = row("Beta").ok_or(Error::EmptyData)?;
    let gamma = row("Gamma").ok_or(Error::EmptyData)?;
    let mut buf = Vec::new();
    io::write_runs_csv(&runs, &mut buf)?;
    let reread = io::read_runs_csv(buf.as_slice())?;
    let sd_close = match (report.mean_sd, again.mean_sd) {
        (Some(a), Some(b)) => (a - b).abs() < 1e-12,
        _ => false,
    };
    Ok((
        vec![
            approx("synthetic range", alpha.range, 19.9, 1e-9),
            approx("synthetic SD", alpha.sd.unwrap_or(f64::NAN), 9.952_052, 1e-5),
            holds(
                "constant runs",
                beta.sd == Some(0.0) && beta.tiers.len() == 1,
                format!("SD {:?}, {} tier(s)", beta.sd, beta.tiers.len()),
                "SD 0, one tier",
            ),
            holds(
                "single run excluded",
                !gamma.included && gamma.sd.is_none(),
                format!("included {}, SD {:?}", gamma.included, gamma.sd),
                "excluded, SD undefined",
            ),
            exact("qualifying jurisdictions", report.qualifying as f64, 3.0),
            holds("aggregate SD invariant to ordering", sd_close, format!("{:?} vs {:?}", report.mean_sd, again.mean_sd), "equal"),
            holds("run file round trip", reread == runs, format!("{} records", reread.len()), "identical"),
        ],
        Some("The published per-jurisdiction stability figures rest on unpublished run data; these checks are the documented substitute.".into()),
    ))
}

fn random_matrix(rng: &mut ChaCha8Rng) -> ScoreMatrix {
    let k = rng.gen_range(2..=8);
    let n = rng.gen_range(3..=40);
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let cats: Vec<CategorySpec> = raw
        .iter()
        .enumerate()
        .map(|(i, w)| CategorySpec::new(format!("c{i}"), w / total))
        .collect();
    let labels = ["x", "y", "z", ""];
    let rows = (0..n)
        .map(|i| {
            let scores: Vec<(String, f64)> = (0..k)
                .map(|c| (format!("c{c}"), rng.gen_range(1..=10_000) as f64 / 100.0))
                .collect();
            let mut r = JurisdictionRecord::new(format!("J{i:02}"), scores)
                .with_reported(rng.gen_range(0..=10_000) as f64 / 100.0);
            let label = labels[rng.gen_range(0..labels.len())];
            if !label.is_empty() {
                r = r.with_tag("grp", label);
            }
            r
        })
        .collect();
    ScoreMatrix::new(cats, rows)
}

/// Counts `class="mark"` elements after checking the document parses.
pub fn svg_mark_count(svg: &str) -> Result<usize> {
    let doc = roxmltree::Document::parse(svg).map_err(|e| Error::Parse {
        line: e.pos().row as u64,
        column: format!("char {}", e.pos().col),
        message: e.to_string(),
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err(Error::InvalidArgument("root element is not <svg>".into()));
    }
    Ok(doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("mark"))
        .count())
}

/// Randomized and closed-form property checks, deterministic for a seed.
pub fn property_suites(seed: u64, cases: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fails: [Vec<String>; 8] = Default::default();
    let [mono, amgm, ucomp, spear, eig, roundtrip, svg, bounds] = &mut fails;
    let tiers = TierScheme::default();

    for case in 0..cases {
        let m = random_matrix(&mut rng);
        let w = m.baseline_weights();
        for method in [AggregationMethod::WeightedArithmetic, AggregationMethod::WeightedGeometric] {
            let pick = rng.gen_range(0..m.len());
            let record = &m.jurisdictions()[pick];
            let base = aggregate_overall(record, &w, method)?;
            let row = m.row(record)?;
            let (lo, hi) = row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
            if base < lo - 1e-9 || base > hi + 1e-9 {
                bounds.push(format!("case {case}: {base} outside [{lo}, {hi}]"));
            }
            let cat = &m.categories()[rng.gen_range(0..m.categories().len())].id;
            let mut bumped = record.clone();
            let v = bumped.category_scores[cat];
            bumped.category_scores.insert(cat.clone(), (v + rng.gen_range(0.0..20.0)).min(100.0));
            let after = aggregate_overall(&bumped, &w, method)?;
            if after < base - 1e-9 {
                mono.push(format!("case {case}: {} {base} -> {after}", method.label()));
            }
        }
        for record in m.jurisdictions() {
            let a = aggregate_overall(record, &w, AggregationMethod::WeightedArithmetic)?;
            let g = aggregate_overall(record, &w, AggregationMethod::WeightedGeometric)?;
            let row = m.row(record)?;
            let unequal = row.iter().any(|v| *v != row[0]);
            if g > a + 1e-9 || (unequal && g >= a) {
                amgm.push(format!("case {case}: {}: geometric {g} vs arithmetic {a}", record.name));
            }
        }

        let col = m.column("c0")?;
        let split = rng.gen_range(1..col.len());
        let (left, right) = col.split_at(split);
        let u1 = mann_whitney(left, right)?.statistic;
        let u2 = mann_whitney(right, left)?.statistic;
        if (u1 + u2 - (left.len() * right.len()) as f64).abs() > 1e-9 {
            ucomp.push(format!("case {case}: {u1} + {u2} ≠ {}", left.len() * right.len()));
        }

        let other = m.column("c1")?;
        if let (Ok(s), Ok(p)) = (spearman(&col, &other), pearson(&mid_ranks(&col), &mid_ranks(&other))) {
            if (s.coefficient - p.coefficient).abs() > 1e-12 {
                spear.push(format!("case {case}: {} vs {}", s.coefficient, p.coefficient));
            }
        }

        if let Ok(p) = pca(&m, true) {
            let k = p.categories.len();
            let sum: f64 = p.eigenvalues.iter().sum();
            let columns: Vec<Vec<f64>> = p.categories.iter().map(|id| m.column(id)).collect::<Result<_>>()?;
            let mut worst: f64 = 0.0;
            for i in 0..k {
                for j in 0..k {
                    let r = if i == j { 1.0 } else { pearson(&columns[i], &columns[j])?.coefficient };
                    let rebuilt: f64 = (0..k).map(|c| p.eigenvalues[c] * p.loadings[c][i] * p.loadings[c][j]).sum();
                    worst = worst.max((r - rebuilt).abs());
                }
            }
            let ratio_sum: f64 = p.explained_variance_ratio.iter().sum();
            if (sum - k as f64).abs() > 1e-9
                || worst > 1e-8
                || (ratio_sum - 1.0).abs() > 1e-9
                || p.eigenvalues.iter().any(|v| *v < -1e-9)
            {
                eig.push(format!("case {case}: trace {sum} (k = {k}), reconstruction error {worst:e}"));
            }
        }

        let csv = io::matrix_to_csv_string(&m)?;
        let json = io::matrix_to_json(&m)?;
        let from_csv = io::read_matrix_csv(csv.as_bytes(), &w);
        let from_json = io::read_matrix_json(&json, &w);
        for (fmt, loaded) in [("csv", from_csv), ("json", from_json)] {
            match loaded {
                Ok(back) if back == m => {}
                Ok(_) => roundtrip.push(format!("case {case}: {fmt} round trip changed the matrix")),
                Err(e) => roundtrip.push(format!("case {case}: {fmt} reload failed: {e}")),
            }
        }

        if case % 10 == 0 {
            let ranking = rank_matrix(&m, &w, AggregationMethod::WeightedArithmetic, &tiers, false)?;
            let gap = gap_analysis(&m, "c0", "c1")?;
            let mut charts = vec![
                (ChartData::lollipop(&ranking, &tiers), m.len()),
                (ChartData::heatmap(&m, &ranking)?, m.len() * m.categories().len()),
                (ChartData::dumbbell(&gap), m.len()),
            ];
            if let Ok(b) = group_breakdown(&m, "grp") {
                charts.push((ChartData::grouped_bars(&b)?, m.categories().len()));
            }
            for (data, expected) in charts {
                match render_chart(&data).and_then(|s| svg_mark_count(&s)) {
                    Ok(n) if n == expected => {}
                    Ok(n) => svg.push(format!("case {case}: {:?} has {n} marks, expected {expected}", data.kind())),
                    Err(e) => svg.push(format!("case {case}: {:?}: {e}", data.kind())),
                }
            }
        }
    }

    let mut cdf_fail = Vec::new();
    for dist in [
        Distribution::StandardNormal,
        Distribution::StudentT { df: 1.0 },
        Distribution::StudentT { df: 7.5 },
        Distribution::StudentT { df: 30.0 },
        Distribution::ChiSquare { df: 1.0 },
        Distribution::ChiSquare { df: 4.0 },
    ] {
        let mut prev = 0.0;
        for i in 0..=400 {
            let x = -10.0 + i as f64 * 0.05;
            let c = dist_cdf(dist, x)?;
            if c < prev - 1e-15 || !(0.0..=1.0).contains(&c) {
                cdf_fail.push(format!("{dist:?} not monotone at {x}"));
                break;
            }
            prev = c;
        }
    }
    let spot = [
        (Distribution::StandardNormal, 1.959_963_984_540_054, 0.975),
        (Distribution::StudentT { df: 1.0 }, 1.0, 0.75),
        // t with 2 df: F(x) = 1/2 + x / (2 sqrt(2 + x²))
        (Distribution::StudentT { df: 2.0 }, 2.0, 0.5 + 1.0 / 6f64.sqrt()),
        (Distribution::ChiSquare { df: 2.0 }, 3.0, 1.0 - (-1.5f64).exp()),
    ];
    for (dist, x, expected) in spot {
        let c = dist_cdf(dist, x)?;
        if (c - expected).abs() > 1e-9 {
            cdf_fail.push(format!("{dist:?} at {x}: {c} vs {expected}"));
        }
    }
    let (vals, _) = symmetric_eigen(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
    if (vals[0] - 3.0).abs() > 1e-12 || (vals[1] - 1.0).abs() > 1e-12 {
        eig.push(format!("closed-form 2x2 eigenvalues {vals:?}"));
    }
    if io::parse_config("")? != io::Config::default() {
        roundtrip.push("empty configuration is not the default".into());
    }

    let summarize = |label: &str, v: &[String]| {
        holds(
            label,
            v.is_empty(),
            if v.is_empty() { format!("{cases} cases") } else { format!("{} failure(s), first: {}", v.len(), v[0]) },
            "no counterexample",
        )
    };
    Ok((
        vec![
            summarize("aggregation monotonicity", mono),
            summarize("aggregation bounds", bounds),
            summarize("AM-GM dominance", amgm),
            summarize("U-complement identity", ucomp),
            summarize("Spearman equals Pearson on mid-ranks", spear),
            summarize("PCA trace and reconstruction", eig),
            summarize("CDF monotonicity and spot values", &cdf_fail),
            summarize("serializer round trips", roundtrip),
            summarize("SVG well-formedness and mark counts", svg),
        ],
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_criterion_fails_with_a_check() {
        let m = io::bundled_matrix().unwrap();
        let c = run_criterion(99, &m);
        assert!(!c.passed());
        assert_eq!(c.title, "unknown criterion");
        assert!(c.summary_line().starts_with("criterion 99 FAIL"));
    }

    #[test]
    fn empty_criterion_never_passes() {
        let c = Criterion {
            id: 1,
            title: "t",
            checks: vec![],
            note: None,
        };
        assert!(!c.passed());
    }

    #[test]
    fn check_lines_mark_misses() {
        let ok = approx("x", 1.0, 1.001, 0.01);
        let miss = exact("y", 2.0, 3.0);
        assert!(ok.pass && !miss.pass);
        assert_eq!(miss.to_string(), "[MISS] y: observed 2, expected 3 exactly");
    }

    #[test]
    fn mark_counter_requires_svg_root() {
        assert_eq!(svg_mark_count(r#"<svg><g class="mark"/><g class="mark"/><g/></svg>"#).unwrap(), 2);
        assert_eq!(svg_mark_count("<html/>").unwrap_err().kind(), "InvalidArgument");
        assert!(svg_mark_count("<svg><g></svg>").is_err());
    }

    #[test]
    fn property_suites_are_seed_deterministic() {
        let a = property_suites(7, 20).unwrap();
        let b = property_suites(7, 20).unwrap();
        assert_eq!(a, b);
        assert!(a.0.iter().all(|c| c.pass), "{:?}", a.0);
    }
}
