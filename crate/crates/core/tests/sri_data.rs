//! Bundled dataset: values frozen from an independent recomputation
//! (plain Python `statistics`/`scipy` over the same CSV), plus charts and
//! file loading.

use std::path::Path;

use sri_core::aggregate::{overall_scores, rank_matrix, AggregationMethod};
use sri_core::groups::gap_analysis;
use sri_core::io::{self, DataFormat, DataSource};
use sri_core::model::{default_sri_config, MultiRunRecord, TierScheme};
use sri_core::report::{render_chart, ChartData};
use sri_core::stats::{describe, pearson};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn recomputed_overall_matches_oracle() {
    let m = io::bundled_matrix().unwrap();
    let (w, _) = default_sri_config();
    let rec = overall_scores(&m, &w, AggregationMethod::WeightedArithmetic).unwrap();
    let s = describe(&rec).unwrap();
    assert!(close(s.mean, 32.617741935, 1e-8));
    assert!(close(s.sd, 9.048117193, 1e-8));

    let geo = overall_scores(&m, &w, AggregationMethod::WeightedGeometric).unwrap();
    assert!(close(geo[0], 43.473202876, 1e-8));
    assert!(close(describe(&geo).unwrap().mean, 29.076897991, 1e-8));
}

#[test]
fn reported_scores_disagree_beyond_rounding_only_for_sweden() {
    let m = io::bundled_matrix().unwrap();
    let (w, _) = default_sri_config();
    let rec = overall_scores(&m, &w, AggregationMethod::WeightedArithmetic).unwrap();
    let reported = m.reported_overall().unwrap();
    let mut over_one: Vec<(&str, f64)> = m
        .jurisdictions()
        .iter()
        .zip(rec.iter().zip(&reported))
        .filter(|(_, (r, p))| (*r - *p).abs() > 1.0)
        .map(|(j, (r, p))| (j.name.as_str(), ((r - p) * 100.0).round() / 100.0))
        .collect();
    over_one.sort_by(|a, b| a.0.cmp(b.0));
    assert_eq!(
        over_one,
        vec![
            ("Canada", -1.0),
            ("Denmark", -1.25),
            ("Germany", 1.05),
            ("Russia", -1.9),
            ("South Korea", 1.25),
            ("Sweden", -3.25),
            ("UAE", 1.25),
            ("United States", -1.75),
        ]
    );
    let breaches: Vec<_> = over_one.iter().filter(|(_, d)| d.abs() > 2.0).collect();
    assert_eq!(breaches, vec![&("Sweden", -3.25)]);
}

#[test]
fn research_professional_gap_matches_oracle() {
    let m = io::bundled_matrix().unwrap();
    let g = gap_analysis(&m, "research_environment", "professional_readiness").unwrap();
    let t = g.test.as_ref().unwrap();
    assert!(close(g.mean_gap, 33.645161290, 1e-8));
    assert!(close(t.cohens_d, 2.879022977, 1e-8));
    assert!(close(t.t_statistic, 16.029721529, 1e-8));
    let r = pearson(
        &m.column("research_environment").unwrap(),
        &m.column("professional_readiness").unwrap(),
    )
    .unwrap();
    assert!(close(r.coefficient, 0.741772322, 1e-8));
    assert!(close(r.p_value, 1.796064e-6, 1e-11));
}

fn marks(svg: &str) -> Vec<roxmltree::Node<'_, '_>> {
    // Leaks are fine in a test: the document must outlive the returned nodes.
    let doc = Box::leak(Box::new(roxmltree::Document::parse(svg).expect("well-formed SVG")));
    doc.descendants().filter(|n| n.attribute("class") == Some("mark")).collect()
}

fn data_values<'a>(svg: &'a str, class: &str) -> Vec<&'a str> {
    svg.split(&format!("class=\"{class}\" data-value=\""))
        .skip(1)
        .map(|rest| &rest[..rest.find('"').unwrap()])
        .collect()
}

#[test]
fn lollipop_geometry() {
    let m = io::bundled_matrix().unwrap();
    let (w, tiers) = default_sri_config();
    let ranking = rank_matrix(&m, &w, AggregationMethod::WeightedArithmetic, &tiers, true).unwrap();
    let svg = render_chart(&ChartData::lollipop(&ranking, &tiers)).unwrap();
    assert_eq!(marks(&svg).len(), 31);
    assert_eq!(data_values(&svg, "tier-boundary"), vec!["20", "40", "60"]);
    assert_eq!(data_values(&svg, "mean-line"), vec!["33.03"]);
}

#[test]
fn heatmap_dumbbell_and_bars() {
    let m = io::bundled_matrix().unwrap();
    let (w, tiers) = default_sri_config();
    let ranking = rank_matrix(&m, &w, AggregationMethod::WeightedArithmetic, &tiers, true).unwrap();
    let heat = render_chart(&ChartData::heatmap(&m, &ranking).unwrap()).unwrap();
    assert_eq!(marks(&heat).len(), 31 * 6);

    let gap = gap_analysis(&m, "research_environment", "professional_readiness").unwrap();
    let bell = render_chart(&ChartData::dumbbell(&gap)).unwrap();
    let rows = marks(&bell);
    assert_eq!(rows.len(), 31);
    let first = bell.find("Japan").unwrap().min(bell.find("Canada").unwrap());
    assert!(bell[..first].matches("class=\"mark\"").count() <= 1);

    let overall = m.reported_overall().unwrap();
    let b = sri_core::groups::group_breakdown_with(&m, "governance", &overall).unwrap();
    let bars = render_chart(&ChartData::grouped_bars(&b).unwrap()).unwrap();
    let groups = marks(&bars);
    assert_eq!(groups.len(), 6);
    assert!(groups.iter().all(|g| g.children().filter(|c| c.has_tag_name("rect")).count() == 2));
}

#[test]
fn files_load_in_either_format() {
    let dir = tempfile::tempdir().unwrap();
    let m = io::bundled_matrix().unwrap();
    let csv_path = dir.path().join("copy.csv");
    let json_path = dir.path().join("copy.json");
    std::fs::write(&csv_path, io::matrix_to_csv_string(&m).unwrap()).unwrap();
    std::fs::write(&json_path, io::matrix_to_json(&m).unwrap()).unwrap();

    for (path, fmt) in [(&csv_path, DataFormat::Csv), (&json_path, DataFormat::Json)] {
        assert_eq!(DataFormat::from_path(path), fmt);
        let back = io::load_matrix(path, fmt).unwrap();
        assert_eq!(back.jurisdictions(), m.jurisdictions());
    }
    assert_eq!(io::resolve_data(Some(&csv_path)).unwrap(), DataSource::File(csv_path.clone()));
    assert_eq!(io::resolve_data(None).unwrap(), DataSource::Bundled);
    let err = io::resolve_data(Some(Path::new("no-such-file.csv"))).unwrap_err();
    assert_eq!(err.kind(), "FileNotFound");
}

#[test]
fn malformed_files_point_at_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let text = io::BUNDLED_CSV.replacen(",70,20,40,75,", ",70,twenty,40,75,", 1);
    std::fs::write(&path, text).unwrap();
    let err = io::load_matrix(&path, DataFormat::Csv).unwrap_err();
    assert_eq!(err.kind(), "ParseError");
    assert!(err.to_string().contains("professional_readiness"), "{err}");
}

#[test]
fn run_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("runs.csv");
    let runs: Vec<MultiRunRecord> = [("Alpha", vec![30.0, 34.5, 32.0]), ("Beta", vec![50.0, 52.25])]
        .into_iter()
        .map(|(name, scores)| MultiRunRecord {
            jurisdiction: name.to_string(),
            run_scores: scores.into_iter().enumerate().map(|(i, s)| (format!("r{}", i + 1), s)).collect(),
        })
        .collect();
    let mut buf = Vec::new();
    io::write_runs_csv(&runs, &mut buf).unwrap();
    std::fs::write(&path, buf).unwrap();
    assert_eq!(io::load_runs(&path).unwrap(), runs);
    let report = sri_core::robustness::stability(&runs, 3, &TierScheme::default()).unwrap();
    assert_eq!(report.qualifying, 1);
}
