//! Standalone SVG 1.1 charts.
//!
//! Geometry is fixed: 20 px per row, a 180 px label gutter, a 600 px plot
//! area on a 0..100 score axis. Every data mark is an element with class
//! `mark`, so tests can count marks without knowing the drawing details.

use std::fmt::Write as _;
use std::path::Path;

use crate::aggregate::RankingEntry;
use crate::error::{Error, Result};
use crate::groups::{GapAnalysis, GroupBreakdown};
use crate::model::{display_name_for, ScoreMatrix, TierScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Lollipop,
    Heatmap,
    Dumbbell,
    GroupedBars,
}

impl std::str::FromStr for ChartKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lollipop" => Ok(ChartKind::Lollipop),
            "heatmap" => Ok(ChartKind::Heatmap),
            "dumbbell" => Ok(ChartKind::Dumbbell),
            "grouped_bars" | "grouped-bars" => Ok(ChartKind::GroupedBars),
            other => Err(Error::InvalidArgument(format!("unknown chart kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChartData {
    /// One horizontal stem per item, drawn in the given order.
    Lollipop {
        items: Vec<(String, f64)>,
        boundaries: Vec<f64>,
        mean: f64,
    },
    /// Rows × columns of scores, rows drawn in the given order.
    Heatmap {
        rows: Vec<String>,
        columns: Vec<String>,
        values: Vec<Vec<f64>>,
    },
    /// Two points per row joined by a bar.
    Dumbbell {
        label_a: String,
        label_b: String,
        rows: Vec<(String, f64, f64)>,
    },
    /// Two bars per category.
    GroupedBars {
        series: (String, String),
        categories: Vec<(String, f64, f64)>,
    },
}

impl ChartData {
    pub fn kind(&self) -> ChartKind {
        match self {
            ChartData::Lollipop { .. } => ChartKind::Lollipop,
            ChartData::Heatmap { .. } => ChartKind::Heatmap,
            ChartData::Dumbbell { .. } => ChartKind::Dumbbell,
            ChartData::GroupedBars { .. } => ChartKind::GroupedBars,
        }
    }

    /// Overall scores in ranking order with tier boundaries and the mean.
    pub fn lollipop(ranking: &[RankingEntry], tiers: &TierScheme) -> Self {
        let scores: Vec<f64> = ranking.iter().map(|e| e.overall).collect();
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // Boundaries up to the highest score, plus the next one above it.
        let mut boundaries: Vec<f64> = tiers.boundaries().into_iter().filter(|b| *b <= top).collect();
        if let Some(next) = tiers.boundaries().into_iter().find(|b| *b > top) {
            boundaries.push(next);
        }
        ChartData::Lollipop {
            items: ranking.iter().map(|e| (e.jurisdiction.clone(), e.overall)).collect(),
            boundaries,
            mean: crate::stats::mean(&scores),
        }
    }

    /// The full score matrix with rows in ranking order.
    pub fn heatmap(matrix: &ScoreMatrix, ranking: &[RankingEntry]) -> Result<Self> {
        let mut values = Vec::with_capacity(ranking.len());
        for e in ranking {
            let record = matrix
                .jurisdiction(&e.jurisdiction)
                .ok_or_else(|| Error::InvalidArgument(format!("{} not in matrix", e.jurisdiction)))?;
            values.push(matrix.row(record)?);
        }
        Ok(ChartData::Heatmap {
            rows: ranking.iter().map(|e| e.jurisdiction.clone()).collect(),
            columns: matrix.categories().iter().map(|c| display_name_for(&c.id)).collect(),
            values,
        })
    }

    /// Gap rows, largest gap first.
    pub fn dumbbell(gap: &GapAnalysis) -> Self {
        ChartData::Dumbbell {
            label_a: display_name_for(&gap.cat_a),
            label_b: display_name_for(&gap.cat_b),
            rows: gap
                .sorted_by_gap()
                .into_iter()
                .map(|r| (r.jurisdiction.clone(), r.a, r.b))
                .collect(),
        }
    }

    /// Category means of the first two groups of a breakdown.
    pub fn grouped_bars(breakdown: &GroupBreakdown) -> Result<Self> {
        let [first, second, ..] = breakdown.groups.as_slice() else {
            return Err(Error::EmptyData);
        };
        Ok(ChartData::GroupedBars {
            series: (first.label.clone(), second.label.clone()),
            categories: first
                .category_means
                .iter()
                .zip(&second.category_means)
                .map(|((id, a), (_, b))| (display_name_for(id), *a, *b))
                .collect(),
        })
    }

    fn is_empty(&self) -> bool {
        match self {
            ChartData::Lollipop { items, .. } => items.is_empty(),
            ChartData::Heatmap { rows, columns, .. } => rows.is_empty() || columns.is_empty(),
            ChartData::Dumbbell { rows, .. } => rows.is_empty(),
            ChartData::GroupedBars { categories, .. } => categories.is_empty(),
        }
    }
}

const ROW: f64 = 20.0;
const GUTTER: f64 = 180.0;
const PLOT: f64 = 600.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 50.0;
const RIGHT: f64 = 40.0;
const FONT: &str = "font-family=\"sans-serif\" font-size=\"11\"";

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Score in [0, 100] to an x coordinate in the plot area.
fn sx(score: f64) -> f64 {
    GUTTER + score.clamp(0.0, 100.0) / 100.0 * PLOT
}

fn open(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
}

fn axis(out: &mut String, y: f64) {
    let _ = writeln!(
        out,
        "<line class=\"axis\" x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#333\"/>",
        sx(0.0),
        sx(100.0)
    );
    for t in (0..=100).step_by(20) {
        let x = sx(t as f64);
        let _ = writeln!(
            out,
            "<text x=\"{x}\" y=\"{:.1}\" text-anchor=\"middle\" {FONT}>{t}</text>",
            y + 15.0
        );
    }
}

fn row_label(out: &mut String, y: f64, label: &str) {
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" {FONT}>{}</text>",
        GUTTER - 8.0,
        y + 4.0,
        escape(label)
    );
}

/// Blue ramp from pale (0) to dark (100).
fn ramp(score: f64) -> String {
    let t = score.clamp(0.0, 100.0) / 100.0;
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(247.0, 8.0), lerp(251.0, 48.0), lerp(255.0, 107.0))
}

pub fn render_chart(data: &ChartData) -> Result<String> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut out = String::new();
    match data {
        ChartData::Lollipop { items, boundaries, mean } => {
            let height = TOP + ROW * items.len() as f64 + BOTTOM;
            let width = GUTTER + PLOT + RIGHT;
            open(&mut out, width, height, "Overall scores");
            let plot_bottom = TOP + ROW * items.len() as f64;
            for b in boundaries {
                let _ = writeln!(
                    out,
                    "<line class=\"tier-boundary\" data-value=\"{b}\" x1=\"{x:.2}\" y1=\"{TOP}\" x2=\"{x:.2}\" y2=\"{plot_bottom}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>",
                    x = sx(*b)
                );
            }
            let _ = writeln!(
                out,
                "<line class=\"mean-line\" data-value=\"{mean:.2}\" x1=\"{x:.2}\" y1=\"{TOP}\" x2=\"{x:.2}\" y2=\"{plot_bottom}\" stroke=\"#c0392b\"/>",
                x = sx(*mean)
            );
            for (i, (name, score)) in items.iter().enumerate() {
                let y = TOP + ROW * (i as f64 + 0.5);
                row_label(&mut out, y, name);
                let _ = writeln!(
                    out,
                    "<g class=\"mark\" data-name=\"{}\" data-value=\"{score:.2}\"><line x1=\"{:.2}\" y1=\"{y}\" x2=\"{x:.2}\" y2=\"{y}\" stroke=\"#4a6fa5\"/><circle cx=\"{x:.2}\" cy=\"{y}\" r=\"5\" fill=\"#4a6fa5\"/></g>",
                    escape(name),
                    sx(0.0),
                    x = sx(*score)
                );
            }
            axis(&mut out, plot_bottom + 5.0);
        }
        ChartData::Heatmap { rows, columns, values } => {
            let cell_w = 70.0;
            let width = GUTTER + cell_w * columns.len() as f64 + RIGHT;
            let height = TOP + 40.0 + ROW * rows.len() as f64 + BOTTOM;
            open(&mut out, width, height, "Category scores");
            let top = TOP + 40.0;
            for (j, c) in columns.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">{}</text>",
                    GUTTER + cell_w * (j as f64 + 0.5),
                    top - 8.0,
                    escape(c)
                );
            }
            for (i, (name, row)) in rows.iter().zip(values).enumerate() {
                let y = top + ROW * i as f64;
                row_label(&mut out, y + ROW / 2.0, name);
                for (j, v) in row.iter().enumerate() {
                    let x = GUTTER + cell_w * j as f64;
                    let text_fill = if *v > 55.0 { "white" } else { "black" };
                    let _ = writeln!(
                        out,
                        "<g class=\"mark\"><rect class=\"cell\" x=\"{x}\" y=\"{y}\" width=\"{cell_w}\" height=\"{ROW}\" fill=\"{}\"/><text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" fill=\"{text_fill}\" {FONT}>{}</text></g>",
                        ramp(*v),
                        x + cell_w / 2.0,
                        y + 14.0,
                        crate::io::format_number(*v)
                    );
                }
            }
        }
        ChartData::Dumbbell { label_a, label_b, rows } => {
            let height = TOP + ROW * rows.len() as f64 + BOTTOM;
            let width = GUTTER + PLOT + RIGHT;
            open(&mut out, width, height, &format!("{label_a} vs {label_b}"));
            legend(&mut out, &[(label_a, "#2e86ab"), (label_b, "#e07a5f")]);
            for (i, (name, a, b)) in rows.iter().enumerate() {
                let y = TOP + ROW * (i as f64 + 0.5);
                row_label(&mut out, y, name);
                let _ = writeln!(
                    out,
                    "<g class=\"mark\" data-name=\"{}\" data-gap=\"{}\"><line x1=\"{:.2}\" y1=\"{y}\" x2=\"{:.2}\" y2=\"{y}\" stroke=\"#bbb\" stroke-width=\"3\"/><circle cx=\"{:.2}\" cy=\"{y}\" r=\"5\" fill=\"#2e86ab\"/><circle cx=\"{:.2}\" cy=\"{y}\" r=\"5\" fill=\"#e07a5f\"/></g>",
                    escape(name),
                    crate::io::format_number(a - b),
                    sx(*a),
                    sx(*b),
                    sx(*a),
                    sx(*b)
                );
            }
            axis(&mut out, TOP + ROW * rows.len() as f64 + 5.0);
        }
        ChartData::GroupedBars { series, categories } => {
            let band = 44.0;
            let height = TOP + band * categories.len() as f64 + BOTTOM;
            let width = GUTTER + PLOT + RIGHT;
            open(&mut out, width, height, &format!("{} vs {}", series.0, series.1));
            legend(&mut out, &[(&series.0, "#3d5a80"), (&series.1, "#ee6c4d")]);
            for (i, (name, a, b)) in categories.iter().enumerate() {
                let y = TOP + band * i as f64 + 4.0;
                row_label(&mut out, y + 18.0, name);
                let _ = writeln!(
                    out,
                    "<g class=\"mark\" data-name=\"{}\"><rect x=\"{GUTTER}\" y=\"{y}\" width=\"{:.2}\" height=\"18\" fill=\"#3d5a80\"/><rect x=\"{GUTTER}\" y=\"{:.1}\" width=\"{:.2}\" height=\"18\" fill=\"#ee6c4d\"/></g>",
                    escape(name),
                    sx(*a) - GUTTER,
                    y + 18.0,
                    sx(*b) - GUTTER
                );
            }
            axis(&mut out, TOP + band * categories.len() as f64 + 5.0);
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn legend(out: &mut String, entries: &[(&String, &str)]) {
    for (k, (label, color)) in entries.iter().enumerate() {
        let x = GUTTER + 220.0 * k as f64;
        let _ = writeln!(
            out,
            "<circle cx=\"{:.1}\" cy=\"20\" r=\"5\" fill=\"{color}\"/><text x=\"{:.1}\" y=\"24\" {FONT}>{}</text>",
            x + 5.0,
            x + 14.0,
            escape(label)
        );
    }
}

pub fn write_chart(data: &ChartData, path: &Path) -> Result<()> {
    std::fs::write(path, render_chart(data)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_rejected() {
        let d = ChartData::Dumbbell {
            label_a: "a".into(),
            label_b: "b".into(),
            rows: vec![],
        };
        assert_eq!(render_chart(&d), Err(Error::EmptyData));
    }

    #[test]
    fn labels_are_escaped() {
        let d = ChartData::Lollipop {
            items: vec![("A & <B>".into(), 10.0)],
            boundaries: vec![],
            mean: 10.0,
        };
        let svg = render_chart(&d).unwrap();
        assert!(svg.contains("A &amp; &lt;B&gt;"));
        assert!(!svg.contains("<B>"));
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(0.0), "#f7fbff");
        assert_eq!(ramp(100.0), "#08306b");
    }
}
