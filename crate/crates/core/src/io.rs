//! Dataset, configuration and run-file ingestion plus the bundled SRI
//! snapshot.
//!
//! CSV layout: a `jurisdiction` column, one column per configured category
//! id, an optional `overall` column, and any remaining columns as tag
//! dimensions. Lines starting with `#` are comments. The JSON mirror is an
//! array of flat objects with the same field names.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::aggregate::AggregationMethod;
use crate::error::{Error, Result};
use crate::model::{
    default_sri_config, JurisdictionRecord, MultiRunRecord, ScoreMatrix, Tier, TierScheme,
    WeightScheme,
};
use crate::robustness::Redistribution;
use crate::stats::{GiniVariant, MomentEstimator};

/// The bundled SRI 2025 snapshot.
pub const BUNDLED_CSV: &str = include_str!("../data/sri_2025.csv");
pub const BUNDLED_FILE_NAME: &str = "sri_2025.csv";
/// Overrides where the bundled dataset is looked up.
pub const DATA_DIR_ENV: &str = "SRI_DATA_DIR";

const JURISDICTION: &str = "jurisdiction";
const OVERALL: &str = "overall";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// Guess from the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

/// Where a dataset comes from once path resolution is done.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    File(PathBuf),
    Bundled,
}

/// Resolves `--data`. A path that exists wins; otherwise the file name is
/// looked up in `$SRI_DATA_DIR`; a request for the bundled file name falls
/// back to the embedded snapshot. With no path at all the bundled dataset
/// is used (from `$SRI_DATA_DIR` when present).
pub fn resolve_data(path: Option<&Path>) -> Result<DataSource> {
    let env_dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
    let Some(path) = path else {
        if let Some(dir) = env_dir {
            let candidate = dir.join(BUNDLED_FILE_NAME);
            if candidate.is_file() {
                return Ok(DataSource::File(candidate));
            }
        }
        return Ok(DataSource::Bundled);
    };
    if path.is_file() {
        return Ok(DataSource::File(path.to_path_buf()));
    }
    if path.is_relative() {
        if let (Some(dir), Some(name)) = (env_dir, path.file_name()) {
            let candidate = dir.join(name);
            if candidate.is_file() {
                return Ok(DataSource::File(candidate));
            }
        }
        if path.file_name().and_then(|n| n.to_str()) == Some(BUNDLED_FILE_NAME) {
            return Ok(DataSource::Bundled);
        }
    }
    Err(Error::FileNotFound(path.to_path_buf()))
}

/// The bundled dataset under the default weights.
pub fn bundled_matrix() -> Result<ScoreMatrix> {
    read_matrix_csv(BUNDLED_CSV.as_bytes(), &default_sri_config().0)
}

pub fn load_source(source: &DataSource, weights: &WeightScheme) -> Result<ScoreMatrix> {
    match source {
        DataSource::Bundled => read_matrix_csv(BUNDLED_CSV.as_bytes(), weights),
        DataSource::File(p) => load_matrix_with(p, DataFormat::from_path(p), weights),
    }
}

/// Loads and validates a dataset under the default SRI categories.
pub fn load_matrix(path: &Path, format: DataFormat) -> Result<ScoreMatrix> {
    load_matrix_with(path, format, &default_sri_config().0)
}

/// Loads and validates a dataset whose category columns are the ids of
/// `weights`.
pub fn load_matrix_with(path: &Path, format: DataFormat, weights: &WeightScheme) -> Result<ScoreMatrix> {
    let file = open(path)?;
    match format {
        DataFormat::Csv => read_matrix_csv(file, weights),
        DataFormat::Json => {
            let mut text = String::new();
            std::io::BufReader::new(file).read_to_string(&mut text)?;
            read_matrix_json(&text, weights)
        }
    }
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::from(e),
    })
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader)
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    match err.kind() {
        csv::ErrorKind::Io(e) => Error::Io(e.to_string()),
        _ => Error::Parse {
            line,
            column: String::new(),
            message: err.to_string(),
        },
    }
}

fn parse_score(cell: &str, line: u64, column: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            column: column.to_string(),
            message: format!("expected a number, found {cell:?}"),
        })
}

pub fn read_matrix_csv<R: Read>(reader: R, weights: &WeightScheme) -> Result<ScoreMatrix> {
    weights.validate()?;
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let header_line = rdr.position().line().max(1);
    let mut seen = std::collections::HashSet::new();
    for h in headers.iter() {
        if !seen.insert(h) {
            return Err(Error::Parse {
                line: header_line,
                column: h.to_string(),
                message: "duplicate column".into(),
            });
        }
    }
    let col = |name: &str| headers.iter().position(|h| h == name);
    let name_col = col(JURISDICTION).ok_or_else(|| Error::Parse {
        line: header_line,
        column: JURISDICTION.into(),
        message: "missing jurisdiction column".into(),
    })?;
    let overall_col = col(OVERALL);
    let category_cols: Vec<(String, usize)> = weights
        .ids()
        .filter_map(|id| col(id).map(|i| (id.to_string(), i)))
        .collect();
    let tag_cols: Vec<(String, usize)> = headers
        .iter()
        .enumerate()
        .filter(|(i, h)| {
            *i != name_col
                && Some(*i) != overall_col
                && !weights.ids().any(|id| id == *h)
        })
        .map(|(i, h)| (h.to_string(), i))
        .collect();

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let mut scores = BTreeMap::new();
        for (id, i) in &category_cols {
            scores.insert(id.clone(), parse_score(&row[*i], line, id)?);
        }
        let reported_overall = match overall_col {
            Some(i) if !row[i].is_empty() => Some(parse_score(&row[i], line, OVERALL)?),
            _ => None,
        };
        let tags = tag_cols
            .iter()
            .filter(|(_, i)| !row[*i].is_empty())
            .map(|(dim, i)| (dim.clone(), row[*i].to_string()))
            .collect();
        records.push(JurisdictionRecord {
            name: row[name_col].to_string(),
            category_scores: scores,
            reported_overall,
            tags,
        });
    }
    ScoreMatrix::validated(weights.categories(), records)
}

pub fn read_matrix_json(text: &str, weights: &WeightScheme) -> Result<ScoreMatrix> {
    weights.validate()?;
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line() as u64,
        column: format!("char {}", e.column()),
        message: e.to_string(),
    })?;
    let rows = doc.as_array().ok_or_else(|| Error::Parse {
        line: 1,
        column: String::new(),
        message: "expected an array of jurisdiction objects".into(),
    })?;
    let mut records = Vec::with_capacity(rows.len());
    for (idx, row) in rows.iter().enumerate() {
        // JSON rows are addressed by their 1-based position in the array.
        let line = idx as u64 + 1;
        let err = |column: &str, message: String| Error::Parse {
            line,
            column: column.to_string(),
            message,
        };
        let obj = row
            .as_object()
            .ok_or_else(|| err("", "expected an object".into()))?;
        let name = obj
            .get(JURISDICTION)
            .and_then(Value::as_str)
            .ok_or_else(|| err(JURISDICTION, "missing or non-string jurisdiction".into()))?;
        let number = |key: &str, v: &Value| {
            v.as_f64()
                .ok_or_else(|| err(key, format!("expected a number, found {v}")))
        };
        let mut scores = BTreeMap::new();
        let mut reported_overall = None;
        let mut tags = BTreeMap::new();
        for (key, v) in obj {
            if key == JURISDICTION {
                continue;
            } else if key == OVERALL {
                if !v.is_null() {
                    reported_overall = Some(number(key, v)?);
                }
            } else if weights.weight_of(key).is_some() {
                scores.insert(key.clone(), number(key, v)?);
            } else {
                match v {
                    Value::Null => {}
                    Value::String(s) if s.is_empty() => {}
                    Value::String(s) => {
                        tags.insert(key.clone(), s.clone());
                    }
                    other => return Err(err(key, format!("expected a string tag, found {other}"))),
                }
            }
        }
        records.push(JurisdictionRecord {
            name: name.to_string(),
            category_scores: scores,
            reported_overall,
            tags,
        });
    }
    ScoreMatrix::validated(weights.categories(), records)
}

/// `12.5 → "12.5"`, `55.0 → "55"`, `46.754 → "46.75"`.
pub fn format_number(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Writes the CSV layout, each `notes` entry as a leading `#` comment.
pub fn write_matrix_csv<W: Write>(matrix: &ScoreMatrix, writer: W, notes: &[&str]) -> Result<()> {
    let mut writer = writer;
    for note in notes {
        writeln!(writer, "# {note}")?;
    }
    let dims = matrix.tag_dimensions();
    let has_overall = matrix.jurisdictions().iter().any(|j| j.reported_overall.is_some());
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![JURISDICTION.to_string()];
    header.extend(matrix.category_ids().iter().map(|s| s.to_string()));
    if has_overall {
        header.push(OVERALL.into());
    }
    header.extend(dims.iter().cloned());
    w.write_record(&header).map_err(csv_error)?;
    for j in matrix.jurisdictions() {
        let mut row = vec![j.name.clone()];
        for c in matrix.categories() {
            row.push(format_number(j.score(&c.id)?));
        }
        if has_overall {
            row.push(j.reported_overall.map(|v| format!("{v:.2}")).unwrap_or_default());
        }
        for d in &dims {
            row.push(j.tag(d).unwrap_or_default().to_string());
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn matrix_to_csv_string(matrix: &ScoreMatrix) -> Result<String> {
    let mut buf = Vec::new();
    write_matrix_csv(matrix, &mut buf, &[])?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn matrix_to_json(matrix: &ScoreMatrix) -> Result<String> {
    let dims = matrix.tag_dimensions();
    let mut rows = Vec::with_capacity(matrix.len());
    for j in matrix.jurisdictions() {
        let mut obj = Map::new();
        obj.insert(JURISDICTION.into(), Value::String(j.name.clone()));
        for c in matrix.categories() {
            obj.insert(c.id.clone(), Value::from(round2(j.score(&c.id)?)));
        }
        obj.insert(
            OVERALL.into(),
            j.reported_overall.map(|v| Value::from(round2(v))).unwrap_or(Value::Null),
        );
        for d in &dims {
            if let Some(label) = j.tag(d) {
                obj.insert(d.clone(), Value::String(label.to_string()));
            }
        }
        rows.push(Value::Object(obj));
    }
    serde_json::to_string_pretty(&Value::Array(rows)).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisOptions {
    pub moments: MomentEstimator,
    pub gini: GiniVariant,
    pub redistribution: Redistribution,
    /// Perturbation step for weight sweeps, as a fraction.
    pub delta: f64,
    pub runs_threshold: usize,
}

impl AnalysisOptions {
    pub fn sri_defaults() -> Self {
        Self {
            delta: 0.05,
            runs_threshold: 3,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub weights: WeightScheme,
    pub tiers: TierScheme,
    pub aggregation: AggregationMethod,
    pub options: AnalysisOptions,
}

impl Default for Config {
    fn default() -> Self {
        let (weights, tiers) = default_sri_config();
        Self {
            weights,
            tiers,
            aggregation: AggregationMethod::WeightedArithmetic,
            options: AnalysisOptions::sri_defaults(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    weights: Option<Map<String, Value>>,
    tiers: Option<Vec<Tier>>,
    aggregation: Option<String>,
    #[serde(default)]
    options: OptionsFile,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OptionsFile {
    moments: Option<MomentEstimator>,
    gini: Option<GiniVariant>,
    redistribution: Option<Redistribution>,
    delta: Option<f64>,
    runs_threshold: Option<usize>,
}

pub fn parse_aggregation(label: &str) -> Result<AggregationMethod> {
    match label {
        "arithmetic" => Ok(AggregationMethod::WeightedArithmetic),
        "geometric" => Ok(AggregationMethod::WeightedGeometric),
        other => Err(Error::InvalidArgument(format!(
            "aggregation must be \"arithmetic\" or \"geometric\", got {other:?}"
        ))),
    }
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::from(e),
    })?;
    parse_config(&text)
}

/// Parses a JSON configuration. Absent fields keep their defaults; an empty
/// document (or `{}`) yields the default SRI configuration.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut config = Config::default();
    if text.trim().is_empty() {
        return Ok(config);
    }
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line() as u64,
        column: format!("char {}", e.column()),
        message: e.to_string(),
    })?;
    if let Some(map) = file.weights {
        let weights = map
            .into_iter()
            .map(|(id, v)| {
                v.as_f64()
                    .map(|w| (id.clone(), w))
                    .ok_or_else(|| Error::InvalidWeights(format!("weight for {id:?} is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        config.weights = WeightScheme::new("configured", weights);
        config.weights.validate()?;
    }
    if let Some(tiers) = file.tiers {
        config.tiers = TierScheme::new(tiers)?;
    }
    if let Some(label) = file.aggregation {
        config.aggregation = parse_aggregation(&label)?;
    }
    let o = file.options;
    let opts = &mut config.options;
    opts.moments = o.moments.unwrap_or(opts.moments);
    opts.gini = o.gini.unwrap_or(opts.gini);
    opts.redistribution = o.redistribution.unwrap_or(opts.redistribution);
    opts.delta = o.delta.unwrap_or(opts.delta);
    opts.runs_threshold = o.runs_threshold.unwrap_or(opts.runs_threshold);
    Ok(config)
}

/// Reads `jurisdiction,run_id,overall` rows, grouped by jurisdiction in
/// first-appearance order.
pub fn read_runs_csv<R: Read>(reader: R) -> Result<Vec<MultiRunRecord>> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            column: name.to_string(),
            message: format!("missing {name} column"),
        })
    };
    let (ji, ri, oi) = (find(JURISDICTION)?, find("run_id")?, find(OVERALL)?);
    let mut out: Vec<MultiRunRecord> = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let score = parse_score(&row[oi], line, OVERALL)?;
        let name = &row[ji];
        let run = (row[ri].to_string(), score);
        match out.iter_mut().find(|r| r.jurisdiction == name) {
            Some(r) => r.run_scores.push(run),
            None => out.push(MultiRunRecord {
                jurisdiction: name.to_string(),
                run_scores: vec![run],
            }),
        }
    }
    for r in &out {
        r.validate()?;
    }
    Ok(out)
}

pub fn load_runs(path: &Path) -> Result<Vec<MultiRunRecord>> {
    read_runs_csv(open(path)?)
}

pub fn write_runs_csv<W: Write>(runs: &[MultiRunRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([JURISDICTION, "run_id", OVERALL]).map_err(csv_error)?;
    for r in runs {
        for (id, score) in &r.run_scores {
            w.write_record([r.jurisdiction.as_str(), id.as_str(), &format_number(*score)])
                .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_matrix;

    #[test]
    fn bundled_dataset_shape() {
        let m = bundled_matrix().unwrap();
        assert_eq!(m.len(), 31);
        assert_eq!(m.categories().len(), 6);
        assert!(validate_matrix(&m).is_empty());
        assert_eq!(m.jurisdiction("russia").unwrap().tag("region"), None);
        assert_eq!(m.tag_dimensions(), vec!["governance", "income", "region"]);
    }

    #[test]
    fn text_in_score_cell() {
        let csv = "jurisdiction,policy_environment,institutional_engagement,research_environment,\
professional_readiness,public_discourse,adaptive_capacity\nA,1,2,3,4,5,6\nB,1,abc,3,4,5,6\n";
        match read_matrix_csv(csv.as_bytes(), &default_sri_config().0) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, "institutional_engagement");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_column_is_a_validation_error() {
        let csv = "jurisdiction,policy_environment,institutional_engagement,research_environment,\
professional_readiness,public_discourse\nA,1,2,3,4,5\nB,1,2,3,4,5\nC,1,2,3,4,5\n";
        let err = read_matrix_csv(csv.as_bytes(), &default_sri_config().0).unwrap_err();
        assert_eq!(err.kind(), "ValidationError");
    }

    #[test]
    fn config_parsing() {
        assert_eq!(parse_config("").unwrap(), Config::default());
        assert_eq!(parse_config("{}").unwrap(), Config::default());
        let bad = r#"{"weights": {"a": 0.5, "b": 0.45}}"#;
        assert!(matches!(parse_config(bad), Err(Error::InvalidWeights(_))));
        let gap = r#"{"tiers": [{"name": "low", "lo": 0, "hi": 30}, {"name": "high", "lo": 40, "hi": 100}]}"#;
        match parse_config(gap) {
            Err(Error::InvalidTiers(msg)) => assert!(msg.contains("gap at [30, 40)"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let geo = parse_config(r#"{"aggregation": "geometric", "options": {"delta": 0.1}}"#).unwrap();
        assert_eq!(geo.aggregation, AggregationMethod::WeightedGeometric);
        assert_eq!(geo.options.delta, 0.1);
        assert!(matches!(parse_config("{\"weights\": "), Err(Error::Parse { .. })));
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(55.0), "55");
        assert_eq!(format_number(12.5), "12.5");
        assert_eq!(format_number(46.754), "46.75");
        assert_eq!(format_number(-0.001), "0");
    }

    #[test]
    fn runs_round_trip() {
        let text = "jurisdiction,run_id,overall\nNL,r1,30.4\nNL,r2,40\nUK,r1,48\nNL,r3,50.3\n";
        let runs = read_runs_csv(text.as_bytes()).unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].scores(), vec![30.4, 40.0, 50.3]);
        let mut buf = Vec::new();
        write_runs_csv(&runs, &mut buf).unwrap();
        assert_eq!(read_runs_csv(buf.as_slice()).unwrap(), runs);
        assert!(read_runs_csv("jurisdiction,run_id,overall\nA,r1,1\nA,r1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn resolve_paths() {
        if std::env::var_os(DATA_DIR_ENV).is_none() {
            assert_eq!(resolve_data(None), Ok(DataSource::Bundled));
            assert_eq!(
                resolve_data(Some(Path::new(BUNDLED_FILE_NAME))),
                Ok(DataSource::Bundled)
            );
        }
        assert_eq!(
            resolve_data(Some(Path::new("definitely/missing.csv"))),
            Err(Error::FileNotFound(PathBuf::from("definitely/missing.csv")))
        );
    }
}
