use std::fs;
use std::io::Write;
use std::process::ExitCode;

use sri_core::aggregate::{overall_scores, rank_scores, tier_counts, AggregationMethod};
use sri_core::groups::{gap_analysis, group_breakdown_with, imbalance_profiles};
use sri_core::io::{self, Config};
use sri_core::model::{ScoreMatrix, WeightScheme};
use sri_core::multivariate::{correlation_matrix, pca};
use sri_replication::{run_all, ReplicationReport};
use sri_core::report::{
    render_chart, render_table, CategoryStatsTable, ChartData, ComparisonTable, DistributionTable,
    ProfileTable, TableFormat, Tabular,
};
use sri_core::robustness::{compare_aggregation, compare_schemes, perturbation_family_with, stability};
use sri_core::stats::{describe_with, shapiro_wilk, CorrelationKind, DescribeOptions};
use sri_core::{Error, Result};

use crate::{Aggregation, Cli, Command, Format, Kind, Method};

struct Context {
    config: Config,
    matrix: ScoreMatrix,
    use_reported: bool,
}

impl Context {
    fn load(cli: &Cli) -> Result<Self> {
        let config = match &cli.global.config {
            Some(path) => io::load_config(path)?,
            None => Config::default(),
        };
        let source = io::resolve_data(cli.global.data.as_deref())?;
        let matrix = io::load_source(&source, &config.weights)?;
        Ok(Self {
            config,
            matrix,
            use_reported: cli.global.use_reported,
        })
    }

    fn overall(&self, method: AggregationMethod) -> Result<Vec<f64>> {
        if self.use_reported {
            self.matrix.reported_overall()
        } else {
            overall_scores(&self.matrix, &self.config.weights, method)
        }
    }

    fn describe_options(&self) -> DescribeOptions {
        DescribeOptions {
            moments: self.config.options.moments,
            gini: self.config.options.gini,
        }
    }
}

fn table_format(format: Format) -> TableFormat {
    match format {
        Format::Markdown => TableFormat::Markdown,
        Format::Csv => TableFormat::Csv,
        Format::Json => TableFormat::Json,
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.global.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let written = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
            // A closed pipe (`sri ... | head`) is not a failure of the analysis.
            match written {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn render<T: Tabular + ?Sized>(cli: &Cli, result: &T) -> Result<String> {
    render_table(result, table_format(cli.global.format))
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let ctx = Context::load(cli)?;
    let method = ctx.config.aggregation;
    let text = match &cli.command {
        Command::Validate => format!(
            "OK: {} jurisdictions, {} categories, no violations\n",
            ctx.matrix.len(),
            ctx.matrix.categories().len()
        ),
        Command::Score { aggregation } => {
            let method = match aggregation {
                Some(Aggregation::Arithmetic) => AggregationMethod::WeightedArithmetic,
                Some(Aggregation::Geometric) => AggregationMethod::WeightedGeometric,
                None => method,
            };
            let ranking = rank_scores(&ctx.matrix, &ctx.overall(method)?, &ctx.config.tiers)?;
            render(cli, &sri_core::report::RankingTable(&ranking))?
        }
        Command::Stats => stats_text(cli, &ctx, method)?,
        Command::Gap { a, b } => render(cli, &gap_analysis(&ctx.matrix, a, b)?)?,
        Command::Correlations { method: m } => {
            let kind = match m {
                Method::Pearson => CorrelationKind::Pearson,
                Method::Spearman => CorrelationKind::SpearmanRho,
                Method::Kendall => CorrelationKind::KendallTauB,
            };
            render(cli, &correlation_matrix(&ctx.matrix, kind)?)?
        }
        Command::Pca { covariance } => render(cli, &pca(&ctx.matrix, !covariance)?)?,
        Command::Groups { dimension } => {
            let overall = ctx.overall(method)?;
            render(cli, &group_breakdown_with(&ctx.matrix, dimension, &overall)?)?
        }
        Command::Robustness {
            weights: _,
            aggregation,
            delta,
            targets,
        } => {
            let comparisons = if *aggregation {
                vec![compare_aggregation(&ctx.matrix, &ctx.config.weights, &ctx.config.tiers)?]
            } else {
                weight_sweep(&ctx, *delta, targets, method)?
            };
            render(cli, &ComparisonTable(&comparisons))?
        }
        Command::Stability { runs, threshold } => {
            let runs = io::load_runs(runs)?;
            let threshold = threshold.unwrap_or(ctx.config.options.runs_threshold);
            render(cli, &stability(&runs, threshold, &ctx.config.tiers)?)?
        }
        Command::Chart { kind, dimension } => chart(&ctx, *kind, dimension, method)?,
        Command::Report { full } => {
            let mut text = analysis_report(cli, &ctx, method)?;
            if *full {
                let report = run_all(&ctx.matrix);
                text.push_str(&replication_text(cli, &report)?);
                emit(cli, &text)?;
                if !report.all_passed() {
                    let failed: Vec<String> = report
                        .criteria
                        .iter()
                        .filter(|c| !c.passed())
                        .map(|c| c.id.to_string())
                        .collect();
                    eprintln!(
                        "ERROR:ReplicationMismatch: criteria not reproduced: {}",
                        failed.join(", ")
                    );
                    return Ok(ExitCode::from(1));
                }
                return Ok(ExitCode::SUCCESS);
            }
            text
        }
    };
    emit(cli, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn stats_text(cli: &Cli, ctx: &Context, method: AggregationMethod) -> Result<String> {
    let opts = ctx.describe_options();
    let mut rows = ctx
        .matrix
        .categories()
        .iter()
        .map(|c| Ok((c.id.clone(), describe_with(&ctx.matrix.column(&c.id)?, opts)?)))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.1.mean.total_cmp(&a.1.mean));
    let categories = CategoryStatsTable { rows };

    let overall = ctx.overall(method)?;
    let ranking = rank_scores(&ctx.matrix, &overall, &ctx.config.tiers)?;
    let sw = shapiro_wilk(&overall).ok();
    let distribution = DistributionTable {
        summary: describe_with(&overall, opts)?,
        shapiro_w: sw.as_ref().map(|r| r.w_statistic),
        shapiro_p: sw.as_ref().map(|r| r.p_value),
        tier_counts: tier_counts(&ranking, &ctx.config.tiers),
    };
    join_sections(cli, &[&categories, &distribution])
}

/// Renders several results into one document: markdown sections, CSV
/// blocks separated by a blank line, or a JSON array.
fn join_sections(cli: &Cli, parts: &[&dyn ErasedTabular]) -> Result<String> {
    let format = table_format(cli.global.format);
    if format == TableFormat::Json {
        let values = parts
            .iter()
            .map(|p| p.json())
            .collect::<Result<Vec<_>>>()?;
        return serde_json::to_string_pretty(&values)
            .map(|s| s + "\n")
            .map_err(|e| Error::Io(e.to_string()));
    }
    let rendered = parts
        .iter()
        .map(|p| p.render(format))
        .collect::<Result<Vec<_>>>()?;
    Ok(rendered.join("\n"))
}

/// Object-safe view of a tabular result.
trait ErasedTabular {
    fn render(&self, format: TableFormat) -> Result<String>;
    fn json(&self) -> Result<serde_json::Value>;
}

impl<T: Tabular> ErasedTabular for T {
    fn render(&self, format: TableFormat) -> Result<String> {
        render_table(self, format)
    }

    fn json(&self) -> Result<serde_json::Value> {
        serde_json::to_value(self).map_err(|e| Error::Io(e.to_string()))
    }
}

fn weight_sweep(
    ctx: &Context,
    delta_pp: Option<f64>,
    targets: &[String],
    method: AggregationMethod,
) -> Result<Vec<sri_core::robustness::SchemeComparison>> {
    let base = &ctx.config.weights;
    let delta = delta_pp.map(|pp| pp / 100.0).unwrap_or(ctx.config.options.delta);
    let targets: Vec<String> = if targets.is_empty() {
        let mut ranked: Vec<(usize, &(String, f64))> = base.weights.iter().enumerate().collect();
        ranked.sort_by(|(i, a), (j, b)| b.1.total_cmp(&a.1).then(i.cmp(j)));
        let mut top: Vec<(usize, String)> = ranked.iter().take(2).map(|(i, (id, _))| (*i, id.clone())).collect();
        top.sort();
        top.into_iter().map(|(_, id)| id).collect()
    } else {
        targets.to_vec()
    };
    let target_refs: Vec<&str> = targets.iter().map(String::as_str).collect();
    let mut schemes = perturbation_family_with(base, &target_refs, delta, ctx.config.options.redistribution)?;
    schemes.push(WeightScheme::equal("equal", &ctx.matrix.category_ids()));
    compare_schemes(&ctx.matrix, base, &schemes, method, &ctx.config.tiers)
}

fn chart(ctx: &Context, kind: Kind, dimension: &str, method: AggregationMethod) -> Result<String> {
    let tiers = &ctx.config.tiers;
    let data = match kind {
        Kind::Lollipop => {
            let ranking = rank_scores(&ctx.matrix, &ctx.overall(method)?, tiers)?;
            ChartData::lollipop(&ranking, tiers)
        }
        Kind::Heatmap => {
            let ranking = rank_scores(&ctx.matrix, &ctx.overall(method)?, tiers)?;
            ChartData::heatmap(&ctx.matrix, &ranking)?
        }
        Kind::Dumbbell => {
            let ids = ctx.matrix.category_ids();
            let (a, b) = if ids.contains(&"research_environment") && ids.contains(&"professional_readiness") {
                ("research_environment", "professional_readiness")
            } else {
                (ids[0], ids[1])
            };
            ChartData::dumbbell(&gap_analysis(&ctx.matrix, a, b)?)
        }
        Kind::GroupedBars => {
            let overall = ctx.overall(method)?;
            ChartData::grouped_bars(&group_breakdown_with(&ctx.matrix, dimension, &overall)?)?
        }
    };
    render_chart(&data)
}

fn analysis_report(cli: &Cli, ctx: &Context, method: AggregationMethod) -> Result<String> {
    if cli.global.format == Format::Csv {
        return Err(Error::InvalidArgument("report renders as markdown or json".into()));
    }
    let overall = ctx.overall(method)?;
    let ranking = rank_scores(&ctx.matrix, &overall, &ctx.config.tiers)?;
    let ids = ctx.matrix.category_ids();
    let ranking_table = sri_core::report::RankingTable(&ranking);
    let correlations = correlation_matrix(&ctx.matrix, CorrelationKind::Pearson)?;
    let components = pca(&ctx.matrix, true)?;
    let profiles = imbalance_profiles(&ctx.matrix)?;
    let profile_table = ProfileTable(&profiles);
    let aggregation = [compare_aggregation(&ctx.matrix, &ctx.config.weights, &ctx.config.tiers)?];
    let aggregation_table = ComparisonTable(&aggregation);
    let mut parts: Vec<&dyn ErasedTabular> = vec![&ranking_table, &correlations, &components, &profile_table, &aggregation_table];

    let gap = if ids.contains(&"research_environment") && ids.contains(&"professional_readiness") {
        Some(gap_analysis(&ctx.matrix, "research_environment", "professional_readiness")?)
    } else {
        None
    };
    if let Some(g) = &gap {
        parts.push(g);
    }
    let groups = ctx
        .matrix
        .tag_dimensions()
        .iter()
        .filter_map(|d| group_breakdown_with(&ctx.matrix, d, &overall).ok())
        .collect::<Vec<_>>();
    for g in &groups {
        parts.push(g);
    }
    let stats = stats_text(cli, ctx, method)?;
    let mut text = join_sections(cli, &parts)?;
    if cli.global.format == Format::Markdown {
        text.push('\n');
        text.push_str(&stats);
    }
    Ok(text)
}

fn replication_text(cli: &Cli, report: &ReplicationReport) -> Result<String> {
    if cli.global.format == Format::Json {
        return serde_json::to_string_pretty(report)
            .map(|s| s + "\n")
            .map_err(|e| Error::Io(e.to_string()));
    }
    let mut out = String::from("\n## Reproduction checks\n\n");
    for c in &report.criteria {
        out.push_str(&c.summary_line());
        out.push('\n');
        for miss in c.failures() {
            out.push_str(&format!("    {miss}\n"));
        }
        if let Some(note) = &c.note {
            out.push_str(&format!("    note: {note}\n"));
        }
    }
    let passed = report.criteria.iter().filter(|c| c.passed()).count();
    out.push_str(&format!("\n{passed}/{} criteria PASS\n", report.criteria.len()));
    Ok(out)
}
