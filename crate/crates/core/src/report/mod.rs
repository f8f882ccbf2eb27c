//! Text rendering of analysis results (markdown, CSV, JSON) and SVG charts.

pub mod svg;

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::aggregate::RankingEntry;
use crate::error::{Error, Result};
use crate::groups::{GapAnalysis, GroupBreakdown, ImbalanceProfile};
use crate::inference::StatisticKind;
use crate::model::display_name_for;
use crate::multivariate::{CorrelationMatrix, PcaResult};
use crate::robustness::{SchemeComparison, StabilityReport};
use crate::stats::DescriptiveSummary;

pub use svg::{render_chart, write_chart, ChartData, ChartKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Markdown,
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

/// A rendered grid of cells plus free-text notes shown under markdown
/// tables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub title: Option<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl Table {
    fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    fn titled(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }
}

/// Results that have a tabular view. JSON output serializes the result
/// itself rather than the table.
pub trait Tabular: Serialize {
    fn table(&self) -> Table;
}

pub fn fmt_score(v: f64) -> String {
    format!("{v:.2}")
}

pub fn fmt_stat(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}

/// Three decimals without the leading zero, floored at `<.001`.
pub fn fmt_p(p: f64) -> String {
    if p < 0.001 {
        "<.001".to_string()
    } else {
        let s = format!("{p:.3}");
        s.strip_prefix('0').map(str::to_string).unwrap_or(s)
    }
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map(|x| fmt_stat(x, decimals)).unwrap_or_else(|| "n/a".into())
}

pub fn render_table<T: Tabular + ?Sized>(result: &T, format: TableFormat) -> Result<String> {
    match format {
        TableFormat::Json => serde_json::to_string_pretty(result)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| Error::Io(e.to_string())),
        TableFormat::Csv => {
            let t = result.table();
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(&t.headers).map_err(io)?;
            for row in &t.rows {
                w.write_record(row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
        }
        TableFormat::Markdown => Ok(markdown(&result.table())),
    }
}

fn markdown(t: &Table) -> String {
    let mut out = String::new();
    if let Some(title) = &t.title {
        let _ = writeln!(out, "## {title}\n");
    }
    let cell = |s: &str| s.replace('|', "\\|");
    let _ = writeln!(
        out,
        "| {} |",
        t.headers.iter().map(|h| cell(h)).collect::<Vec<_>>().join(" | ")
    );
    let _ = writeln!(out, "|{}", "---|".repeat(t.headers.len()));
    for row in &t.rows {
        let _ = writeln!(
            out,
            "| {} |",
            row.iter().map(|c| cell(c)).collect::<Vec<_>>().join(" | ")
        );
    }
    if !t.notes.is_empty() {
        out.push('\n');
        for n in &t.notes {
            let _ = writeln!(out, "{n}");
        }
    }
    out
}

/// A display ranking.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct RankingTable<'a>(pub &'a [RankingEntry]);

impl Tabular for RankingTable<'_> {
    fn table(&self) -> Table {
        let cats: Vec<&str> = self
            .0
            .first()
            .map(|e| e.category_scores.iter().map(|(id, _)| id.as_str()).collect())
            .unwrap_or_default();
        let mut headers = vec!["Rank".to_string(), "Jurisdiction".into(), "Overall".into(), "Tier".into()];
        headers.extend(cats.iter().map(|c| display_name_for(c)));
        let mut t = Table::new(headers).titled("Rankings");
        t.rows = self
            .0
            .iter()
            .map(|e| {
                let mut row = vec![e.rank.to_string(), e.jurisdiction.clone(), fmt_score(e.overall), e.tier.clone()];
                row.extend(e.category_scores.iter().map(|(_, s)| crate::io::format_number(*s)));
                row
            })
            .collect();
        t
    }
}

/// Per-category descriptive statistics, one row per category.
#[derive(Debug, Clone, Serialize)]
pub struct CategoryStatsTable {
    pub rows: Vec<(String, DescriptiveSummary)>,
}

impl Tabular for CategoryStatsTable {
    fn table(&self) -> Table {
        let mut t = Table::new(["Category", "Mean", "Median", "SD", "Min", "Max", "Range", "IQR", "CV"])
            .titled("Category statistics");
        t.rows = self
            .rows
            .iter()
            .map(|(id, s)| {
                vec![
                    display_name_for(id),
                    fmt_score(s.mean),
                    crate::io::format_number(s.median),
                    fmt_score(s.sd),
                    crate::io::format_number(s.min),
                    crate::io::format_number(s.max),
                    crate::io::format_number(s.range),
                    crate::io::format_number(s.iqr),
                    fmt_opt(s.cv, 2),
                ]
            })
            .collect();
        t
    }
}

/// Distribution of overall scores.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionTable {
    pub summary: DescriptiveSummary,
    pub shapiro_w: Option<f64>,
    pub shapiro_p: Option<f64>,
    pub tier_counts: Vec<(String, usize)>,
}

impl Tabular for DistributionTable {
    fn table(&self) -> Table {
        let s = &self.summary;
        let mut t = Table::new(["Statistic", "Value"]).titled("Overall score distribution");
        let mut add = |k: &str, v: String| t.rows.push(vec![k.to_string(), v]);
        add("n", s.n.to_string());
        add("Mean", fmt_score(s.mean));
        add("SD", fmt_score(s.sd));
        add("Median", fmt_score(s.median));
        add("Min", fmt_score(s.min));
        add("Max", fmt_score(s.max));
        add("Skewness", fmt_opt(s.skewness, 3));
        add("Excess kurtosis", fmt_opt(s.excess_kurtosis, 3));
        add("Gini", fmt_opt(s.gini, 3));
        add("Shapiro-Wilk W", fmt_opt(self.shapiro_w, 3));
        add("Shapiro-Wilk p", self.shapiro_p.map(fmt_p).unwrap_or_else(|| "n/a".into()));
        for (tier, count) in &self.tier_counts {
            add(&format!("Tier: {tier}"), count.to_string());
        }
        t
    }
}

impl Tabular for GapAnalysis {
    fn table(&self) -> Table {
        let a = display_name_for(&self.cat_a);
        let b = display_name_for(&self.cat_b);
        let mut t = Table::new(["Jurisdiction".to_string(), a.clone(), b.clone(), "Gap".into()])
            .titled(format!("{a} minus {b}"));
        t.rows = self
            .sorted_by_gap()
            .into_iter()
            .map(|r| {
                vec![
                    r.jurisdiction.clone(),
                    crate::io::format_number(r.a),
                    crate::io::format_number(r.b),
                    crate::io::format_number(r.gap),
                ]
            })
            .collect();
        t.notes.push(format!(
            "Mean gap {}, median {}, positive in {}/{}; min {} ({}), max {} ({}).",
            fmt_score(self.mean_gap),
            fmt_score(self.median_gap),
            self.positive,
            self.rows.len(),
            crate::io::format_number(self.min_gap),
            self.min_jurisdictions.join(", "),
            crate::io::format_number(self.max_gap),
            self.max_jurisdictions.join(", "),
        ));
        match (&self.test, &self.degenerate) {
            (Some(r), _) => t.notes.push(format!(
                "Paired t({}) = {}, p {}; Cohen's d = {}; Wilcoxon W = {}, p {}, matched rank-biserial = {}.",
                r.df,
                fmt_stat(r.t_statistic, 2),
                fmt_p(r.p_value),
                fmt_stat(r.cohens_d, 2),
                crate::io::format_number(r.wilcoxon_w),
                fmt_p(r.wilcoxon_p),
                fmt_stat(r.matched_rank_biserial, 2),
            )),
            (None, Some(e)) => t.notes.push(format!("Paired tests not computed: {e}.")),
            (None, None) => {}
        }
        t
    }
}

impl Tabular for CorrelationMatrix {
    fn table(&self) -> Table {
        let label = match self.kind {
            crate::stats::CorrelationKind::Pearson => "r",
            crate::stats::CorrelationKind::SpearmanRho => "rho",
            crate::stats::CorrelationKind::KendallTauB => "tau_b",
        };
        let mut t = Table::new(["Category A", "Category B", label, "p"]).titled("Pairwise correlations");
        t.rows = self
            .pairs()
            .map(|(i, j, r, p)| {
                vec![
                    display_name_for(&self.categories[i]),
                    display_name_for(&self.categories[j]),
                    fmt_stat(r, 3),
                    fmt_p(p),
                ]
            })
            .collect();
        let sig = |cut: f64| self.pairs().filter(|(_, _, _, p)| *p < cut).count();
        t.notes.push(format!(
            "{} of {} pairs with p < .05; {} with p < .001.",
            sig(0.05),
            self.pairs().count(),
            sig(0.001)
        ));
        t
    }
}

impl Tabular for PcaResult {
    fn table(&self) -> Table {
        let mut headers = vec!["Component".to_string(), "Eigenvalue".into(), "Explained".into()];
        headers.extend(self.categories.iter().map(|c| display_name_for(c)));
        let mut t = Table::new(headers).titled(if self.standardized {
            "Principal components (correlation matrix)"
        } else {
            "Principal components (covariance matrix)"
        });
        t.rows = (0..self.component_count)
            .map(|k| {
                let mut row = vec![
                    format!("PC{}", k + 1),
                    fmt_stat(self.eigenvalues[k], 3),
                    fmt_stat(self.explained_variance_ratio[k], 3),
                ];
                row.extend(self.loadings[k].iter().map(|v| fmt_stat(*v, 3)));
                row
            })
            .collect();
        t
    }
}

impl Tabular for GroupBreakdown {
    fn table(&self) -> Table {
        let cats: Vec<&str> = self
            .groups
            .first()
            .map(|g| g.category_means.iter().map(|(id, _)| id.as_str()).collect())
            .unwrap_or_default();
        let mut headers = vec!["Group".to_string(), "n".into(), "Mean overall".into()];
        headers.extend(cats.iter().map(|c| display_name_for(c)));
        let mut t = Table::new(headers).titled(format!("Groups by {}", self.dimension));
        t.rows = self
            .groups
            .iter()
            .map(|g| {
                let mut row = vec![g.label.clone(), g.size.to_string(), fmt_score(g.mean_overall)];
                row.extend(g.category_means.iter().map(|(_, m)| fmt_score(*m)));
                row
            })
            .collect();
        if let Some(diffs) = &self.differentials {
            let mut row = vec!["Differential".to_string(), String::new(), fmt_score(
                self.groups[0].mean_overall - self.groups[1].mean_overall,
            )];
            row.extend(diffs.iter().map(|(_, d)| format!("{d:+.2}")));
            t.rows.push(row);
        }
        let r = &self.test;
        t.notes.push(match r.statistic_kind {
            StatisticKind::MannWhitneyU => format!(
                "Mann-Whitney U = {} (complement {}), p {}, rank-biserial r = {}.",
                crate::io::format_number(r.statistic),
                self.u_complement.map(crate::io::format_number).unwrap_or_default(),
                fmt_p(r.p_value),
                fmt_stat(r.effect_size, 3),
            ),
            StatisticKind::KruskalWallisH => format!(
                "Kruskal-Wallis H({}) = {}, p {}, eta squared = {}, n = {}.",
                r.df.unwrap_or(0),
                fmt_stat(r.statistic, 2),
                fmt_p(r.p_value),
                fmt_stat(r.effect_size, 3),
                self.tagged_count(),
            ),
        });
        if !self.untagged.is_empty() {
            t.notes.push(format!("Untagged, excluded: {}.", self.untagged.join(", ")));
        }
        t
    }
}

/// Weight or aggregation comparisons against one baseline.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct ComparisonTable<'a>(pub &'a [SchemeComparison]);

impl Tabular for ComparisonTable<'_> {
    fn table(&self) -> Table {
        let mut t = Table::new([
            "Scheme",
            "Spearman",
            "Kendall",
            "Tier changes",
            "Mean |rank change|",
            "Max |rank change|",
            "Largest mover",
        ])
        .titled("Comparison with baseline");
        t.rows = self
            .0
            .iter()
            .map(|c| {
                vec![
                    c.scheme_name.clone(),
                    fmt_stat(c.spearman_vs_baseline, 3),
                    fmt_stat(c.kendall_vs_baseline, 3),
                    c.tier_changes.to_string(),
                    fmt_stat(c.mean_abs_rank_change, 2),
                    crate::io::format_number(c.max_abs_rank_change),
                    c.movers
                        .first()
                        .map(|m| format!("{} ({} -> {})", m.jurisdiction, m.old_rank, m.new_rank))
                        .unwrap_or_else(|| "none".into()),
                ]
            })
            .collect();
        t
    }
}

impl Tabular for StabilityReport {
    fn table(&self) -> Table {
        let mut t = Table::new(["Jurisdiction", "Runs", "Mean", "SD", "Min", "Max", "Range", "Tiers", "Included"])
            .titled("Scoring stability");
        t.rows = self
            .jurisdictions
            .iter()
            .map(|j| {
                vec![
                    j.jurisdiction.clone(),
                    j.run_count.to_string(),
                    fmt_score(j.mean),
                    fmt_opt(j.sd, 2),
                    fmt_score(j.min),
                    fmt_score(j.max),
                    fmt_score(j.range),
                    j.tiers.join("; "),
                    if j.included { "yes" } else { "no" }.to_string(),
                ]
            })
            .collect();
        t.notes.push(format!(
            "Mean within-jurisdiction SD over {} jurisdiction(s) with at least {} runs: {}.",
            self.qualifying,
            self.runs_threshold,
            fmt_opt(self.mean_sd, 2)
        ));
        t
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct ProfileTable<'a>(pub &'a [ImbalanceProfile]);

impl Tabular for ProfileTable<'_> {
    fn table(&self) -> Table {
        let mut t = Table::new(["Jurisdiction", "Mean", "SD", "CV", "Spread"]).titled("Category imbalance");
        t.rows = self
            .0
            .iter()
            .map(|p| {
                vec![
                    p.jurisdiction.clone(),
                    fmt_score(p.mean),
                    fmt_score(p.sd),
                    fmt_opt(p.cv, 2),
                    crate::io::format_number(p.spread),
                ]
            })
            .collect();
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_formatting() {
        assert_eq!(fmt_p(0.0123), ".012");
        assert_eq!(fmt_p(0.0012), ".001");
        assert_eq!(fmt_p(0.0009), "<.001");
        assert_eq!(fmt_p(1.0), "1.000");
        assert_eq!(fmt_score(49.0), "49.00");
    }

    #[test]
    fn markdown_escapes_pipes() {
        let t = Table {
            title: None,
            headers: vec!["a".into()],
            rows: vec![vec!["x|y".into()]],
            notes: vec![],
        };
        assert_eq!(markdown(&t), "| a |\n|---|\n| x\\|y |\n");
    }

    #[test]
    fn format_names() {
        assert_eq!("md".parse::<TableFormat>().unwrap(), TableFormat::Markdown);
        assert!("xml".parse::<TableFormat>().is_err());
    }
}
