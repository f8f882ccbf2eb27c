//! Domain types shared by every analysis module.
//!
//! A [`ScoreMatrix`] is the central input: one [`JurisdictionRecord`] per row,
//! one [`CategorySpec`] per column. Weights and tier bands live in their own
//! types so robustness sweeps can swap them without touching the data.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on weight sums.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

pub const SCORE_MIN: f64 = 0.0;
pub const SCORE_MAX: f64 = 100.0;

pub const POLICY_ENVIRONMENT: &str = "policy_environment";
pub const INSTITUTIONAL_ENGAGEMENT: &str = "institutional_engagement";
pub const RESEARCH_ENVIRONMENT: &str = "research_environment";
pub const PROFESSIONAL_READINESS: &str = "professional_readiness";
pub const PUBLIC_DISCOURSE: &str = "public_discourse";
pub const ADAPTIVE_CAPACITY: &str = "adaptive_capacity";

/// Category ids in canonical column order.
pub const SRI_CATEGORY_IDS: [&str; 6] = [
    POLICY_ENVIRONMENT,
    INSTITUTIONAL_ENGAGEMENT,
    RESEARCH_ENVIRONMENT,
    PROFESSIONAL_READINESS,
    PUBLIC_DISCOURSE,
    ADAPTIVE_CAPACITY,
];

const SRI_WEIGHTS: [f64; 6] = [0.20, 0.15, 0.15, 0.20, 0.15, 0.15];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorySpec {
    pub id: String,
    pub display_name: String,
    pub weight: f64,
}

impl CategorySpec {
    pub fn new(id: impl Into<String>, weight: f64) -> Self {
        let id = id.into();
        let display_name = display_name_for(&id);
        Self {
            id,
            display_name,
            weight,
        }
    }
}

/// `snake_case` id to `Title Case`.
pub fn display_name_for(id: &str) -> String {
    id.split(['_', '-'])
        .filter(|w| !w.is_empty())
        .map(|w| {
            let mut chars = w.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().chain(chars).collect::<String>(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub name: String,
    pub weights: Vec<(String, f64)>,
}

impl WeightScheme {
    pub fn new(name: impl Into<String>, weights: Vec<(String, f64)>) -> Self {
        Self {
            name: name.into(),
            weights,
        }
    }

    pub fn equal<S: AsRef<str>>(name: impl Into<String>, ids: &[S]) -> Self {
        let w = 1.0 / ids.len() as f64;
        Self::new(
            name,
            ids.iter().map(|id| (id.as_ref().to_string(), w)).collect(),
        )
    }

    pub fn weight_of(&self, id: &str) -> Option<f64> {
        self.weights.iter().find(|(c, _)| c == id).map(|(_, w)| *w)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.weights.iter().map(|(id, _)| id.as_str())
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().map(|(_, w)| w).sum()
    }

    /// Checks non-negativity, unique ids and the unit sum.
    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::InvalidWeights(format!(
                "scheme {:?} has no categories",
                self.name
            )));
        }
        let mut seen = HashSet::new();
        for (id, w) in &self.weights {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidWeights(format!(
                    "category {id:?} listed twice in scheme {:?}",
                    self.name
                )));
            }
            if !w.is_finite() || *w < 0.0 || *w > 1.0 {
                return Err(Error::InvalidWeights(format!(
                    "weight {w} for {id:?} outside [0, 1]"
                )));
            }
        }
        let sum = self.sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!(
                "weights of scheme {:?} sum to {sum}, expected 1",
                self.name
            )));
        }
        Ok(())
    }

    /// Validates and additionally requires the scheme to cover exactly the
    /// given categories.
    pub fn validate_for(&self, categories: &[CategorySpec]) -> Result<()> {
        self.validate()?;
        if self.weights.len() != categories.len() {
            return Err(Error::InvalidWeights(format!(
                "scheme {:?} has {} categories, dataset has {}",
                self.name,
                self.weights.len(),
                categories.len()
            )));
        }
        for c in categories {
            if self.weight_of(&c.id).is_none() {
                return Err(Error::InvalidWeights(format!(
                    "scheme {:?} has no weight for category {:?}",
                    self.name, c.id
                )));
            }
        }
        Ok(())
    }

    /// Category specs carrying this scheme's weights, in scheme order.
    pub fn categories(&self) -> Vec<CategorySpec> {
        self.weights
            .iter()
            .map(|(id, w)| CategorySpec::new(id.clone(), *w))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JurisdictionRecord {
    pub name: String,
    pub category_scores: BTreeMap<String, f64>,
    pub reported_overall: Option<f64>,
    pub tags: BTreeMap<String, String>,
}

impl JurisdictionRecord {
    pub fn new<S: Into<String>>(name: impl Into<String>, scores: impl IntoIterator<Item = (S, f64)>) -> Self {
        Self {
            name: name.into(),
            category_scores: scores.into_iter().map(|(k, v)| (k.into(), v)).collect(),
            reported_overall: None,
            tags: BTreeMap::new(),
        }
    }

    pub fn with_reported(mut self, overall: f64) -> Self {
        self.reported_overall = Some(overall);
        self
    }

    pub fn with_tag(mut self, dimension: impl Into<String>, label: impl Into<String>) -> Self {
        self.tags.insert(dimension.into(), label.into());
        self
    }

    pub fn score(&self, category: &str) -> Result<f64> {
        self.category_scores
            .get(category)
            .copied()
            .ok_or_else(|| Error::MissingScore {
                jurisdiction: self.name.clone(),
                category: category.to_string(),
            })
    }

    pub fn tag(&self, dimension: &str) -> Option<&str> {
        self.tags
            .get(dimension)
            .map(String::as_str)
            .filter(|s| !s.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    categories: Vec<CategorySpec>,
    jurisdictions: Vec<JurisdictionRecord>,
}

impl ScoreMatrix {
    /// Builds a matrix without checking invariants; see [`validate_matrix`].
    pub fn new(categories: Vec<CategorySpec>, jurisdictions: Vec<JurisdictionRecord>) -> Self {
        Self {
            categories,
            jurisdictions,
        }
    }

    /// Builds a matrix and rejects it if any invariant is violated.
    pub fn validated(
        categories: Vec<CategorySpec>,
        jurisdictions: Vec<JurisdictionRecord>,
    ) -> Result<Self> {
        let m = Self::new(categories, jurisdictions);
        let violations = validate_matrix(&m);
        if violations.is_empty() {
            Ok(m)
        } else {
            Err(Error::Validation(violations))
        }
    }

    pub fn categories(&self) -> &[CategorySpec] {
        &self.categories
    }

    pub fn jurisdictions(&self) -> &[JurisdictionRecord] {
        &self.jurisdictions
    }

    pub fn len(&self) -> usize {
        self.jurisdictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jurisdictions.is_empty()
    }

    pub fn category_ids(&self) -> Vec<&str> {
        self.categories.iter().map(|c| c.id.as_str()).collect()
    }

    pub fn category(&self, id: &str) -> Result<&CategorySpec> {
        self.categories
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownCategory(id.to_string()))
    }

    pub fn jurisdiction(&self, name: &str) -> Option<&JurisdictionRecord> {
        self.jurisdictions
            .iter()
            .find(|j| j.name.eq_ignore_ascii_case(name))
    }

    /// One category's scores in row order.
    pub fn column(&self, id: &str) -> Result<Vec<f64>> {
        self.category(id)?;
        self.jurisdictions.iter().map(|j| j.score(id)).collect()
    }

    /// A record's scores in column order.
    pub fn row(&self, record: &JurisdictionRecord) -> Result<Vec<f64>> {
        self.categories.iter().map(|c| record.score(&c.id)).collect()
    }

    pub fn reported_overall(&self) -> Result<Vec<f64>> {
        self.jurisdictions
            .iter()
            .map(|j| {
                j.reported_overall
                    .ok_or_else(|| Error::MissingReportedOverall(j.name.clone()))
            })
            .collect()
    }

    /// The weight scheme carried by the category specs.
    pub fn baseline_weights(&self) -> WeightScheme {
        WeightScheme::new(
            "baseline",
            self.categories
                .iter()
                .map(|c| (c.id.clone(), c.weight))
                .collect(),
        )
    }

    /// Tag dimensions present on at least one record, sorted.
    pub fn tag_dimensions(&self) -> Vec<String> {
        let mut dims: Vec<String> = self
            .jurisdictions
            .iter()
            .flat_map(|j| j.tags.keys().cloned())
            .collect();
        dims.sort();
        dims.dedup();
        dims
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tier {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

/// Ordered score bands. Every band is `[lo, hi)` except the last, which is
/// closed at its upper bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierScheme {
    tiers: Vec<Tier>,
}

impl TierScheme {
    pub fn new(tiers: Vec<Tier>) -> Result<Self> {
        let scheme = Self { tiers };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn tiers(&self) -> &[Tier] {
        &self.tiers
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tiers.iter().map(|t| t.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.tiers.iter().position(|t| t.name == name)
    }

    /// Interior boundaries (every `lo` except the first).
    pub fn boundaries(&self) -> Vec<f64> {
        self.tiers.iter().skip(1).map(|t| t.lo).collect()
    }

    fn validate(&self) -> Result<()> {
        let first = self
            .tiers
            .first()
            .ok_or_else(|| Error::InvalidTiers("no tiers defined".into()))?;
        if first.lo != SCORE_MIN {
            return Err(Error::InvalidTiers(format!(
                "first tier {:?} starts at {}, expected {SCORE_MIN}",
                first.name, first.lo
            )));
        }
        let last = &self.tiers[self.tiers.len() - 1];
        if last.hi != SCORE_MAX {
            return Err(Error::InvalidTiers(format!(
                "last tier {:?} ends at {}, expected {SCORE_MAX}",
                last.name, last.hi
            )));
        }
        let mut names = HashSet::new();
        for t in &self.tiers {
            if !(t.lo.is_finite() && t.hi.is_finite()) || t.lo >= t.hi {
                return Err(Error::InvalidTiers(format!(
                    "tier {:?} has empty or invalid band [{}, {})",
                    t.name, t.lo, t.hi
                )));
            }
            if !names.insert(t.name.as_str()) {
                return Err(Error::InvalidTiers(format!("duplicate tier name {:?}", t.name)));
            }
        }
        for pair in self.tiers.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if b.lo > a.hi {
                return Err(Error::InvalidTiers(format!(
                    "gap at [{}, {}) between {:?} and {:?}",
                    a.hi, b.lo, a.name, b.name
                )));
            }
            if b.lo < a.hi {
                return Err(Error::InvalidTiers(format!(
                    "overlap at [{}, {}) between {:?} and {:?}",
                    b.lo, a.hi, a.name, b.name
                )));
            }
        }
        Ok(())
    }

    /// The band containing `score`. Scores outside `[0, 100]` clamp to the
    /// nearest band.
    pub fn tier_of(&self, score: f64) -> &Tier {
        let last = self.tiers.len() - 1;
        self.tiers
            .iter()
            .enumerate()
            .find(|(i, t)| score < t.hi || *i == last)
            .map(|(_, t)| t)
            .expect("tier scheme is non-empty")
    }
}

impl Default for TierScheme {
    fn default() -> Self {
        let bands = [
            ("Unprepared", 0.0, 20.0),
            ("Minimally Prepared", 20.0, 40.0),
            ("Partially Prepared", 40.0, 60.0),
            ("Moderately Prepared", 60.0, 80.0),
            ("Well Prepared", 80.0, 100.0),
        ];
        Self {
            tiers: bands
                .iter()
                .map(|&(name, lo, hi)| Tier {
                    name: name.to_string(),
                    lo,
                    hi,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiRunRecord {
    pub jurisdiction: String,
    pub run_scores: Vec<(String, f64)>,
}

impl MultiRunRecord {
    pub fn validate(&self) -> Result<()> {
        if self.run_scores.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "jurisdiction {:?} has no runs",
                self.jurisdiction
            )));
        }
        let mut ids = HashSet::new();
        for (id, score) in &self.run_scores {
            if !ids.insert(id.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "run id {id:?} repeated for {:?}",
                    self.jurisdiction
                )));
            }
            if !in_score_range(*score) {
                return Err(Error::InvalidArgument(format!(
                    "run {id:?} of {:?} has score {score} outside [0, 100]",
                    self.jurisdiction
                )));
            }
        }
        Ok(())
    }

    pub fn scores(&self) -> Vec<f64> {
        self.run_scores.iter().map(|(_, s)| *s).collect()
    }
}

fn in_score_range(v: f64) -> bool {
    v.is_finite() && (SCORE_MIN..=SCORE_MAX).contains(&v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    ScoreOutOfRange,
    ReportedOutOfRange,
    MissingScore,
    UnknownCategory,
    DuplicateJurisdiction,
    DuplicateCategory,
    InvalidWeight,
    WeightSum,
    TooFewJurisdictions,
    TooFewCategories,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub jurisdiction: Option<String>,
    pub category: Option<String>,
    pub detail: String,
}

impl Violation {
    fn new(kind: ViolationKind, detail: impl Into<String>) -> Self {
        Self {
            kind,
            jurisdiction: None,
            category: None,
            detail: detail.into(),
        }
    }

    fn at(mut self, jurisdiction: Option<&str>, category: Option<&str>) -> Self {
        self.jurisdiction = jurisdiction.map(str::to_string);
        self.category = category.map(str::to_string);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        match (&self.jurisdiction, &self.category) {
            (Some(j), Some(c)) => write!(f, " [{j} / {c}]")?,
            (Some(j), None) => write!(f, " [{j}]")?,
            (None, Some(c)) => write!(f, " [{c}]")?,
            (None, None) => {}
        }
        write!(f, ": {}", self.detail)
    }
}

/// Every invariant breach in `matrix`; empty when the matrix is valid.
pub fn validate_matrix(matrix: &ScoreMatrix) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    let cats = matrix.categories();

    if cats.len() < 2 {
        out.push(Violation::new(
            TooFewCategories,
            format!("{} categories, at least 2 required", cats.len()),
        ));
    }
    let mut seen_cat = HashSet::new();
    for c in cats {
        if !seen_cat.insert(c.id.as_str()) {
            out.push(Violation::new(DuplicateCategory, "category listed twice").at(None, Some(&c.id)));
        }
        if !c.weight.is_finite() || !(0.0..=1.0).contains(&c.weight) {
            out.push(
                Violation::new(InvalidWeight, format!("weight {} outside [0, 1]", c.weight))
                    .at(None, Some(&c.id)),
            );
        }
    }
    if !cats.is_empty() {
        let sum: f64 = cats.iter().map(|c| c.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            out.push(Violation::new(WeightSum, format!("weights sum to {sum}, expected 1")));
        }
    }

    if matrix.len() < 3 {
        out.push(Violation::new(
            TooFewJurisdictions,
            format!("{} jurisdictions, at least 3 required", matrix.len()),
        ));
    }

    let mut seen_names = HashSet::new();
    for j in matrix.jurisdictions() {
        let name = j.name.as_str();
        if !seen_names.insert(name.to_lowercase()) {
            out.push(
                Violation::new(DuplicateJurisdiction, "name repeats an earlier row (case-insensitive)")
                    .at(Some(name), None),
            );
        }
        for c in cats {
            match j.category_scores.get(&c.id) {
                None => out.push(Violation::new(MissingScore, "no score").at(Some(name), Some(&c.id))),
                Some(&v) if !in_score_range(v) => out.push(
                    Violation::new(ScoreOutOfRange, format!("score {v} outside [0, 100]"))
                        .at(Some(name), Some(&c.id)),
                ),
                Some(_) => {}
            }
        }
        for id in j.category_scores.keys() {
            if !seen_cat.contains(id.as_str()) {
                out.push(
                    Violation::new(UnknownCategory, "score for a category the matrix does not define")
                        .at(Some(name), Some(id)),
                );
            }
        }
        if let Some(r) = j.reported_overall {
            if !in_score_range(r) {
                out.push(
                    Violation::new(ReportedOutOfRange, format!("reported overall {r} outside [0, 100]"))
                        .at(Some(name), None),
                );
            }
        }
    }
    out
}

/// The six-category weights and the five default tier bands.
pub fn default_sri_config() -> (WeightScheme, TierScheme) {
    let weights = WeightScheme::new(
        "baseline",
        SRI_CATEGORY_IDS
            .iter()
            .zip(SRI_WEIGHTS)
            .map(|(id, w)| (id.to_string(), w))
            .collect(),
    );
    (weights, TierScheme::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ScoreMatrix {
        let cats = vec![CategorySpec::new("a", 0.5), CategorySpec::new("b", 0.5)];
        let rows = ["X", "Y", "Z"]
            .iter()
            .enumerate()
            .map(|(i, n)| JurisdictionRecord::new(*n, [("a", 10.0 * i as f64), ("b", 50.0)]))
            .collect();
        ScoreMatrix::new(cats, rows)
    }

    #[test]
    fn default_weights_sum_to_one() {
        let (w, _) = default_sri_config();
        assert_eq!(w.sum(), 1.0);
        assert_eq!(w.weight_of(POLICY_ENVIRONMENT), Some(0.20));
        w.validate().unwrap();
    }

    #[test]
    fn default_tiers() {
        let (_, t) = default_sri_config();
        assert_eq!(t.tier_of(49.0).name, "Partially Prepared");
        assert_eq!(t.tier_of(0.0).name, "Unprepared");
        assert_eq!(t.tier_of(100.0).name, "Well Prepared");
        assert_eq!(t.tier_of(16.30).name, "Unprepared");
        assert_eq!(t.tier_of(39.999).name, "Minimally Prepared");
        assert_eq!(t.tier_of(40.0).name, "Partially Prepared");
        assert_eq!(t.boundaries(), vec![20.0, 40.0, 60.0, 80.0]);
    }

    #[test]
    fn tier_gap_and_overlap_rejected() {
        let t = |n: &str, lo, hi| Tier { name: n.into(), lo, hi };
        let gap = TierScheme::new(vec![t("low", 0.0, 30.0), t("high", 40.0, 100.0)]).unwrap_err();
        assert!(matches!(gap, Error::InvalidTiers(ref m) if m.contains("gap at [30, 40)")));
        let overlap = TierScheme::new(vec![t("low", 0.0, 50.0), t("high", 40.0, 100.0)]).unwrap_err();
        assert!(matches!(overlap, Error::InvalidTiers(ref m) if m.contains("overlap")));
        assert!(TierScheme::new(vec![t("all", 0.0, 90.0)]).is_err());
        assert!(TierScheme::new(vec![]).is_err());
    }

    #[test]
    fn out_of_range_score_names_cell() {
        let mut m = tiny();
        m.jurisdictions[1].category_scores.insert("b".into(), 101.0);
        let v = validate_matrix(&m);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::ScoreOutOfRange);
        assert_eq!(v[0].jurisdiction.as_deref(), Some("Y"));
        assert_eq!(v[0].category.as_deref(), Some("b"));
    }

    #[test]
    fn case_insensitive_duplicate() {
        let mut m = tiny();
        m.jurisdictions[0].name = "UK".into();
        m.jurisdictions[1].name = "uk".into();
        let v = validate_matrix(&m);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::DuplicateJurisdiction);
    }

    #[test]
    fn missing_cell_and_small_matrix() {
        let mut m = tiny();
        m.jurisdictions[2].category_scores.remove("a");
        m.jurisdictions.pop();
        m.jurisdictions[0].category_scores.remove("a");
        let kinds: Vec<_> = validate_matrix(&m).into_iter().map(|v| v.kind).collect();
        assert_eq!(
            kinds,
            vec![ViolationKind::TooFewJurisdictions, ViolationKind::MissingScore]
        );
    }

    #[test]
    fn weight_scheme_checks() {
        let bad = WeightScheme::new("x", vec![("a".into(), 0.5), ("b".into(), 0.45)]);
        assert!(matches!(bad.validate(), Err(Error::InvalidWeights(_))));
        let neg = WeightScheme::new("x", vec![("a".into(), 1.5), ("b".into(), -0.5)]);
        assert!(neg.validate().is_err());
        let eq = WeightScheme::equal("eq", &["a", "b", "c"]);
        assert!((eq.sum() - 1.0).abs() < 1e-12);
        let cats = tiny().categories().to_vec();
        assert!(eq.validate_for(&cats).is_err());
    }

    #[test]
    fn multi_run_validation() {
        let ok = MultiRunRecord {
            jurisdiction: "X".into(),
            run_scores: vec![("r1".into(), 30.0), ("r2".into(), 40.0)],
        };
        ok.validate().unwrap();
        let dup = MultiRunRecord {
            jurisdiction: "X".into(),
            run_scores: vec![("r1".into(), 30.0), ("r1".into(), 40.0)],
        };
        assert!(dup.validate().is_err());
        let empty = MultiRunRecord {
            jurisdiction: "X".into(),
            run_scores: vec![],
        };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn display_names() {
        assert_eq!(display_name_for("policy_environment"), "Policy Environment");
        assert_eq!(display_name_for("x"), "X");
    }
}
