use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Composite-indicator scoring, statistics and robustness analysis.
#[derive(Debug, Parser)]
#[command(name = "sri", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Dataset (CSV or JSON). Defaults to the bundled sri_2025.csv.
    #[arg(long, global = true, value_name = "PATH")]
    pub data: Option<PathBuf>,

    /// JSON configuration with weights, tiers, aggregation and options.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output format for tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Markdown)]
    pub format: Format,

    /// Write results here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Use the dataset's reported overall scores instead of recomputing them.
    #[arg(long, global = true)]
    pub use_reported: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Aggregation {
    Arithmetic,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Pearson,
    Spearman,
    Kendall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Lollipop,
    Heatmap,
    Dumbbell,
    GroupedBars,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the dataset against every model invariant.
    Validate,
    /// Aggregate, assign tiers and rank.
    Score {
        /// Overrides the configured aggregation method.
        #[arg(long, value_enum)]
        aggregation: Option<Aggregation>,
    },
    /// Category statistics and the distribution of overall scores.
    Stats,
    /// Paired gap between two categories.
    Gap {
        #[arg(long, default_value = "research_environment")]
        a: String,
        #[arg(long, default_value = "professional_readiness")]
        b: String,
    },
    /// Pairwise category correlations.
    Correlations {
        #[arg(long, value_enum, default_value_t = Method::Pearson)]
        method: Method,
    },
    /// Principal components of the category columns.
    Pca {
        /// Use the covariance matrix instead of the correlation matrix.
        #[arg(long)]
        covariance: bool,
    },
    /// Compare groups along one tag dimension.
    Groups {
        #[arg(long)]
        dimension: String,
    },
    /// Weight-sensitivity or aggregation-method comparison.
    Robustness {
        /// Perturb the most heavily weighted categories and try equal weights.
        #[arg(long, conflicts_with = "aggregation", required_unless_present = "aggregation")]
        weights: bool,
        /// Compare arithmetic and geometric aggregation.
        #[arg(long)]
        aggregation: bool,
        /// Perturbation step in percentage points.
        #[arg(long, value_name = "PP")]
        delta: Option<f64>,
        /// Categories to perturb (comma separated). Defaults to the two
        /// highest-weighted categories.
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
    },
    /// Within-jurisdiction dispersion across scoring runs.
    Stability {
        #[arg(long, value_name = "PATH")]
        runs: PathBuf,
        /// Minimum runs for a jurisdiction to enter the aggregate SD.
        #[arg(long)]
        threshold: Option<usize>,
    },
    /// Render an SVG chart.
    Chart {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Tag dimension for grouped bars.
        #[arg(long, default_value = "governance")]
        dimension: String,
    },
    /// Combined analysis report; with --full, every reproduction check.
    Report {
        #[arg(long)]
        full: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("ERROR:{}: {err}", err.kind());
            if let sri_core::Error::Validation(violations) = &err {
                for v in violations {
                    eprintln!("  {v}");
                }
            }
            ExitCode::from(1)
        }
    }
}
