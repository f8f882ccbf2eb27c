use proptest::prelude::*;
use sri_core::aggregate::{aggregate_overall, overall_scores, AggregationMethod};
use sri_core::inference::mann_whitney;
use sri_core::io::{matrix_to_csv_string, matrix_to_json, read_matrix_csv, read_matrix_json};
use sri_core::model::{CategorySpec, JurisdictionRecord, ScoreMatrix, WeightScheme};
use sri_core::stats::{kendall_tau_b, mid_ranks, pearson, spearman};

const IDS: [&str; 3] = ["alpha", "beta", "gamma"];

fn weights() -> impl Strategy<Value = WeightScheme> {
    (1u32..100, 1u32..100, 1u32..100).prop_map(|(a, b, c)| {
        let total = (a + b + c) as f64;
        WeightScheme::new(
            "w",
            IDS.iter()
                .zip([a, b, c])
                .map(|(id, w)| (id.to_string(), w as f64 / total))
                .collect(),
        )
    })
}

/// Whole-point scores so CSV and JSON round trips are exact.
fn matrix(rows: std::ops::Range<usize>) -> impl Strategy<Value = ScoreMatrix> {
    prop::collection::vec((1u8..=100, 1u8..=100, 1u8..=100), rows).prop_map(|rows| {
        let cats = IDS.iter().map(|id| CategorySpec::new(*id, 1.0 / 3.0)).collect();
        let records = rows
            .into_iter()
            .enumerate()
            .map(|(i, (a, b, c))| {
                JurisdictionRecord::new(format!("J{i:03}"), IDS.iter().copied().zip([a as f64, b as f64, c as f64]))
                    .with_tag("bloc", if i % 2 == 0 { "even" } else { "odd" })
            })
            .collect();
        ScoreMatrix::new(cats, records)
    })
}

fn sample(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    // Coarse values so ties occur often.
    prop::collection::vec((0u8..20).prop_map(|v| v as f64 * 5.0), n)
}

proptest! {
    #[test]
    fn aggregates_stay_within_score_range(m in matrix(3..12), w in weights()) {
        for r in m.jurisdictions() {
            let row = m.row(r).unwrap();
            let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let am = aggregate_overall(r, &w, AggregationMethod::WeightedArithmetic).unwrap();
            let gm = aggregate_overall(r, &w, AggregationMethod::WeightedGeometric).unwrap();
            prop_assert!(lo - 1e-9 <= gm && gm <= am + 1e-9 && am <= hi + 1e-9);
        }
    }

    #[test]
    fn raising_one_score_never_lowers_the_overall(m in matrix(3..8), w in weights(), bump in 1u8..20) {
        let before = overall_scores(&m, &w, AggregationMethod::WeightedArithmetic).unwrap();
        let mut records = m.jurisdictions().to_vec();
        let s = records[0].category_scores.get_mut("alpha").unwrap();
        *s = (*s + bump as f64).min(100.0);
        let bumped = ScoreMatrix::new(m.categories().to_vec(), records);
        let after = overall_scores(&bumped, &w, AggregationMethod::WeightedArithmetic).unwrap();
        prop_assert!(after[0] >= before[0] - 1e-12);
        prop_assert_eq!(&after[1..], &before[1..]);
    }

    #[test]
    fn mid_ranks_preserve_rank_sum(x in sample(1..40)) {
        let n = x.len() as f64;
        let total: f64 = mid_ranks(&x).iter().sum();
        prop_assert!((total - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn spearman_is_pearson_on_mid_ranks(x in sample(8..30), y in sample(8..30)) {
        let n = x.len().min(y.len());
        let (x, y) = (&x[..n], &y[..n]);
        if let (Ok(s), Ok(p)) = (spearman(x, y), pearson(&mid_ranks(x), &mid_ranks(y))) {
            prop_assert!((s.coefficient - p.coefficient).abs() < 1e-12);
        }
    }

    #[test]
    fn kendall_is_bounded_and_symmetric(x in sample(5..30), y in sample(5..30)) {
        let n = x.len().min(y.len());
        let (x, y) = (&x[..n], &y[..n]);
        if let Ok(t) = kendall_tau_b(x, y) {
            let back = kendall_tau_b(y, x).unwrap();
            prop_assert!(t.coefficient.abs() <= 1.0 + 1e-12);
            prop_assert!((t.coefficient - back.coefficient).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&t.p_value));
        }
    }

    #[test]
    fn mann_whitney_orientation_complements(a in sample(2..15), b in sample(2..15)) {
        if let (Ok(ab), Ok(ba)) = (mann_whitney(&a, &b), mann_whitney(&b, &a)) {
            let product = (a.len() * b.len()) as f64;
            prop_assert!((ab.statistic + ba.statistic - product).abs() < 1e-9);
            prop_assert!((ab.effect_size + ba.effect_size).abs() < 1e-12);
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_and_json_round_trip(m in matrix(3..10)) {
        let w = WeightScheme::equal("equal", &IDS);
        let csv = matrix_to_csv_string(&m).unwrap();
        let from_csv = read_matrix_csv(csv.as_bytes(), &w).unwrap();
        prop_assert_eq!(from_csv.jurisdictions(), m.jurisdictions());
        let from_json = read_matrix_json(&matrix_to_json(&m).unwrap(), &w).unwrap();
        prop_assert_eq!(from_json.jurisdictions(), m.jurisdictions());
    }
}
