//! Sample records and dataset manifests.
//!
//! Two on-disk formats are supported: CSV with a header row and JSON-lines
//! with one object per sample. Both use the same field names; feature vectors
//! are spread over `feature_0 .. feature_{F-1}`. See `docs/formats.md`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::Strategy;
use crate::error::{Error, Result};

/// One recorded frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub id: String,
    pub stream_id: i64,
    /// Seconds.
    pub timestamp: f64,
    /// Ground-plane position in meters.
    pub location: [f64; 2],
    /// Optional third coordinate; only used when a run enables it.
    pub elevation: Option<f64>,
    pub area_id: i64,
    pub num_boxes: u32,
    pub feature: Option<Vec<f64>>,
    pub uncertainty: Option<f64>,
    pub category_histogram: Option<BTreeMap<String, u32>>,
}

impl SampleRecord {
    pub fn new(id: impl Into<String>, stream_id: i64, timestamp: f64, location: [f64; 2], area_id: i64, num_boxes: u32) -> Self {
        SampleRecord {
            id: id.into(),
            stream_id,
            timestamp,
            location,
            elevation: None,
            area_id,
            num_boxes,
            feature: None,
            uncertainty: None,
            category_histogram: None,
        }
    }

    /// Position used for spatial distances; the third coordinate is zero unless
    /// `use_elevation` is set.
    pub fn position(&self, use_elevation: bool) -> [f64; 3] {
        let z = if use_elevation { self.elevation.unwrap_or(0.0) } else { 0.0 };
        [self.location[0], self.location[1], z]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifestFormat {
    Csv,
    Jsonl,
}

impl ManifestFormat {
    /// `.jsonl`/`.json`/`.ndjson` map to JSON-lines, anything else to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => ManifestFormat::Jsonl,
            _ => ManifestFormat::Csv,
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "csv" => Ok(ManifestFormat::Csv),
            "jsonl" => Ok(ManifestFormat::Jsonl),
            other => Err(Error::config("format", format!("unknown manifest format `{other}`"))),
        }
    }
}

/// Validated, immutable collection of samples. Index order is the canonical
/// tie-breaking order everywhere.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    samples: Vec<SampleRecord>,
    feature_dim: Option<usize>,
    source_path: String,
    index: HashMap<String, usize>,
}

impl DatasetManifest {
    /// Validates the records and indexes them by id. An empty category
    /// histogram is stored as absent.
    pub fn new(mut samples: Vec<SampleRecord>, source_path: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyManifest);
        }
        for s in &mut samples {
            if s.category_histogram.as_ref().is_some_and(BTreeMap::is_empty) {
                s.category_histogram = None;
            }
        }
        let mut index = HashMap::with_capacity(samples.len());
        for (i, s) in samples.iter().enumerate() {
            if index.insert(s.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(s.id.clone()));
            }
            check_record(s, i as u64 + 1)?;
        }
        let feature_dim = feature_dim_of(&samples)?;
        Ok(DatasetManifest {
            samples,
            feature_dim,
            source_path: source_path.into(),
            index,
        })
    }

    pub fn samples(&self) -> &[SampleRecord] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn get(&self, i: usize) -> &SampleRecord {
        &self.samples[i]
    }

    pub fn feature_dim(&self) -> Option<usize> {
        self.feature_dim
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn has_elevation(&self) -> bool {
        self.samples.iter().any(|s| s.elevation.is_some())
    }

    /// Returns a copy with feature vectors replaced for the given ids.
    /// Samples without a feature keep none unless updated; the result must
    /// still satisfy the all-or-nothing feature invariant.
    pub fn with_features(&self, ids: &[String], rows: &[Vec<f64>]) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::DimensionMismatch {
                expected: ids.len(),
                found: rows.len(),
            });
        }
        let mut samples = self.samples.clone();
        let expected = self.feature_dim.or_else(|| rows.first().map(Vec::len));
        for (id, row) in ids.iter().zip(rows) {
            let i = self.index_of(id).ok_or_else(|| Error::UnknownId(id.clone()))?;
            if let Some(f) = expected {
                if row.len() != f {
                    return Err(Error::DimensionMismatch { expected: f, found: row.len() });
                }
            }
            samples[i].feature = Some(row.clone());
        }
        DatasetManifest::new(samples, self.source_path.clone())
    }
}

fn check_record(s: &SampleRecord, line: u64) -> Result<()> {
    let bad = |message: String| Err(Error::Parse { line, message });
    if !s.timestamp.is_finite() {
        return bad(format!("sample `{}`: timestamp must be finite", s.id));
    }
    if !s.location.iter().all(|c| c.is_finite()) || !s.elevation.is_none_or(f64::is_finite) {
        return bad(format!("sample `{}`: location must be finite", s.id));
    }
    if let Some(u) = s.uncertainty {
        if !(u.is_finite() && u >= 0.0) {
            return bad(format!("sample `{}`: uncertainty must be finite and non-negative", s.id));
        }
    }
    if let Some(f) = &s.feature {
        if !f.iter().all(|v| v.is_finite()) {
            return bad(format!("sample `{}`: feature values must be finite", s.id));
        }
    }
    Ok(())
}

fn feature_dim_of(samples: &[SampleRecord]) -> Result<Option<usize>> {
    let Some(first) = samples.iter().find_map(|s| s.feature.as_ref()) else {
        return Ok(None);
    };
    let dim = first.len();
    for s in samples {
        let found = s.feature.as_ref().map_or(0, Vec::len);
        if s.feature.is_none() || found != dim {
            return Err(Error::InconsistentFeatureDim {
                id: s.id.clone(),
                expected: dim,
                found,
            });
        }
    }
    Ok(Some(dim))
}

/// Checks that the manifest carries the fields a strategy needs.
pub fn validate_for_strategy(manifest: &DatasetManifest, strategy: Strategy, lambda_f: f64) -> Result<()> {
    if strategy == Strategy::Entropy {
        if let Some(s) = manifest.samples.iter().find(|s| s.uncertainty.is_none()) {
            return Err(Error::MissingField {
                field: "uncertainty",
                id: s.id.clone(),
            });
        }
    }
    if lambda_f > 0.0 {
        if let Some(s) = manifest.samples.iter().find(|s| s.feature.is_none()) {
            return Err(Error::MissingField {
                field: "feature",
                id: s.id.clone(),
            });
        }
    }
    Ok(())
}

pub fn load_manifest(path: impl AsRef<Path>, format: ManifestFormat) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let mut text = String::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    match format {
        ManifestFormat::Csv => parse_csv(&text, source),
        ManifestFormat::Jsonl => parse_jsonl(&text, source),
    }
}

pub fn write_manifest(manifest: &DatasetManifest, path: impl AsRef<Path>, format: ManifestFormat) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        ManifestFormat::Csv => to_csv_string(manifest),
        ManifestFormat::Jsonl => to_jsonl_string(manifest),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

const REQUIRED: [&str; 6] = ["id", "stream_id", "loc_x", "loc_y", "area_id", "num_boxes"];

struct CsvColumns {
    required: [usize; 6],
    timestamp: TimestampColumn,
    loc_z: Option<usize>,
    uncertainty: Option<usize>,
    categories: Option<usize>,
    features: Vec<usize>,
}

enum TimestampColumn {
    Seconds(usize),
    Micros(usize),
}

impl CsvColumns {
    fn from_header(header: &csv::StringRecord) -> Result<Self> {
        let find = |name: &str| header.iter().position(|h| h.trim() == name);
        let mut required = [0usize; 6];
        for (slot, name) in required.iter_mut().zip(REQUIRED) {
            *slot = find(name).ok_or_else(|| Error::Schema(name.to_string()))?;
        }
        let timestamp = match (find("timestamp"), find("timestamp_us")) {
            (Some(i), _) => TimestampColumn::Seconds(i),
            (None, Some(i)) => TimestampColumn::Micros(i),
            (None, None) => return Err(Error::Schema("timestamp".to_string())),
        };
        let mut numbered: Vec<(usize, usize)> = header
            .iter()
            .enumerate()
            .filter_map(|(col, h)| h.trim().strip_prefix("feature_")?.parse().ok().map(|k: usize| (k, col)))
            .collect();
        numbered.sort_unstable();
        for (expect, (k, _)) in numbered.iter().enumerate() {
            if *k != expect {
                return Err(Error::Schema(format!("feature_{expect}")));
            }
        }
        Ok(CsvColumns {
            required,
            timestamp,
            loc_z: find("loc_z"),
            uncertainty: find("uncertainty"),
            categories: find("category_histogram"),
            features: numbered.into_iter().map(|(_, col)| col).collect(),
        })
    }
}

fn parse_num<T: std::str::FromStr>(cell: &str, column: &str, line: u64) -> Result<T> {
    cell.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("column `{column}`: cannot parse `{cell}`"),
    })
}

fn parse_optional_f64(cell: &str, column: &str, line: u64) -> Result<Option<f64>> {
    if cell.trim().is_empty() {
        Ok(None)
    } else {
        parse_num(cell, column, line).map(Some)
    }
}

fn parse_histogram(cell: &str, line: u64) -> Result<Option<BTreeMap<String, u32>>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    let mut hist = BTreeMap::new();
    for entry in cell.split(';').filter(|e| !e.is_empty()) {
        let (name, count) = entry.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("category_histogram entry `{entry}` is not name=count"),
        })?;
        hist.insert(name.to_string(), parse_num(count, "category_histogram", line)?);
    }
    Ok(Some(hist))
}

pub fn parse_csv(text: &str, source: impl Into<String>) -> Result<DatasetManifest> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    let cols = CsvColumns::from_header(&header)?;
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |i: usize| record.get(i).unwrap_or("");
        let [id, stream, lx, ly, area, boxes] = cols.required;
        let timestamp = match cols.timestamp {
            TimestampColumn::Seconds(i) => parse_num::<f64>(cell(i), "timestamp", line)?,
            TimestampColumn::Micros(i) => parse_num::<i64>(cell(i), "timestamp_us", line)? as f64 / 1e6,
        };
        let mut sample = SampleRecord::new(
            cell(id).to_string(),
            parse_num(cell(stream), "stream_id", line)?,
            timestamp,
            [parse_num(cell(lx), "loc_x", line)?, parse_num(cell(ly), "loc_y", line)?],
            parse_num(cell(area), "area_id", line)?,
            parse_num(cell(boxes), "num_boxes", line)?,
        );
        if let Some(i) = cols.loc_z {
            sample.elevation = parse_optional_f64(cell(i), "loc_z", line)?;
        }
        if let Some(i) = cols.uncertainty {
            sample.uncertainty = parse_optional_f64(cell(i), "uncertainty", line)?;
        }
        if let Some(i) = cols.categories {
            sample.category_histogram = parse_histogram(cell(i), line)?;
        }
        if !cols.features.is_empty() {
            let filled = cols.features.iter().filter(|&&c| !cell(c).trim().is_empty()).count();
            if filled == cols.features.len() {
                let mut f = Vec::with_capacity(filled);
                for (k, &c) in cols.features.iter().enumerate() {
                    f.push(parse_num(cell(c), &format!("feature_{k}"), line)?);
                }
                sample.feature = Some(f);
            } else if filled != 0 {
                return Err(Error::Parse {
                    line,
                    message: format!("sample `{}` has {filled} of {} feature values", sample.id, cols.features.len()),
                });
            }
        }
        check_record(&sample, line)?;
        samples.push(sample);
    }
    DatasetManifest::new(samples, source)
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn parse_jsonl(text: &str, source: impl Into<String>) -> Result<DatasetManifest> {
    let mut samples = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n as u64 + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(raw).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let obj = value.as_object().ok_or_else(|| Error::Parse {
            line,
            message: "expected a JSON object".to_string(),
        })?;
        let sample = sample_from_json(obj, line)?;
        check_record(&sample, line)?;
        samples.push(sample);
    }
    DatasetManifest::new(samples, source)
}

fn sample_from_json(obj: &Map<String, Value>, line: u64) -> Result<SampleRecord> {
    let field = |name: &str| obj.get(name).filter(|v| !v.is_null());
    let require = |name: &str| field(name).ok_or_else(|| Error::Schema(name.to_string()));
    let type_err = |name: &str, v: &Value| Error::Parse {
        line,
        message: format!("field `{name}`: unexpected value {v}"),
    };
    let as_f64 = |name: &str, v: &Value| v.as_f64().ok_or_else(|| type_err(name, v));
    let as_i64 = |name: &str, v: &Value| v.as_i64().ok_or_else(|| type_err(name, v));

    let id = require("id")?;
    let id = id.as_str().ok_or_else(|| type_err("id", id))?.to_string();
    let timestamp = match (field("timestamp"), field("timestamp_us")) {
        (Some(v), _) => as_f64("timestamp", v)?,
        (None, Some(v)) => as_i64("timestamp_us", v)? as f64 / 1e6,
        (None, None) => return Err(Error::Schema("timestamp".to_string())),
    };
    let boxes = require("num_boxes")?;
    let num_boxes = boxes
        .as_u64()
        .and_then(|b| u32::try_from(b).ok())
        .ok_or_else(|| type_err("num_boxes", boxes))?;
    let mut sample = SampleRecord::new(
        id,
        as_i64("stream_id", require("stream_id")?)?,
        timestamp,
        [as_f64("loc_x", require("loc_x")?)?, as_f64("loc_y", require("loc_y")?)?],
        as_i64("area_id", require("area_id")?)?,
        num_boxes,
    );
    if let Some(v) = field("loc_z") {
        sample.elevation = Some(as_f64("loc_z", v)?);
    }
    if let Some(v) = field("uncertainty") {
        sample.uncertainty = Some(as_f64("uncertainty", v)?);
    }
    if let Some(v) = field("category_histogram") {
        let map = v.as_object().ok_or_else(|| type_err("category_histogram", v))?;
        let mut hist = BTreeMap::new();
        for (k, c) in map {
            let c = c.as_u64().and_then(|c| u32::try_from(c).ok()).ok_or_else(|| type_err("category_histogram", c))?;
            hist.insert(k.clone(), c);
        }
        sample.category_histogram = Some(hist);
    }
    let mut feature = Vec::new();
    while let Some(v) = field(&format!("feature_{}", feature.len())) {
        feature.push(as_f64("feature", v)?);
    }
    if !feature.is_empty() {
        sample.feature = Some(feature);
    }
    Ok(sample)
}

fn fmt_f64(x: f64) -> String {
    // Display prints the shortest representation that parses back exactly.
    format!("{x}")
}

pub fn to_csv_string(manifest: &DatasetManifest) -> String {
    let has_z = manifest.has_elevation();
    let has_u = manifest.samples.iter().any(|s| s.uncertainty.is_some());
    let has_h = manifest.samples.iter().any(|s| s.category_histogram.is_some());
    let dim = manifest.feature_dim.unwrap_or(0);

    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header: Vec<String> = ["id", "stream_id", "timestamp", "loc_x", "loc_y"].map(String::from).to_vec();
    if has_z {
        header.push("loc_z".into());
    }
    header.extend(["area_id", "num_boxes"].map(String::from));
    if has_u {
        header.push("uncertainty".into());
    }
    if has_h {
        header.push("category_histogram".into());
    }
    header.extend((0..dim).map(|k| format!("feature_{k}")));
    writer.write_record(&header).expect("in-memory write");

    for s in &manifest.samples {
        let mut row = vec![
            s.id.clone(),
            s.stream_id.to_string(),
            fmt_f64(s.timestamp),
            fmt_f64(s.location[0]),
            fmt_f64(s.location[1]),
        ];
        if has_z {
            row.push(s.elevation.map(fmt_f64).unwrap_or_default());
        }
        row.push(s.area_id.to_string());
        row.push(s.num_boxes.to_string());
        if has_u {
            row.push(s.uncertainty.map(fmt_f64).unwrap_or_default());
        }
        if has_h {
            let mut cell = String::new();
            for (i, (k, v)) in s.category_histogram.iter().flatten().enumerate() {
                if i > 0 {
                    cell.push(';');
                }
                let _ = write!(cell, "{k}={v}");
            }
            row.push(cell);
        }
        if let Some(f) = &s.feature {
            row.extend(f.iter().copied().map(fmt_f64));
        }
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn sample_to_json(s: &SampleRecord) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("id".into(), Value::from(s.id.clone()));
    obj.insert("stream_id".into(), Value::from(s.stream_id));
    obj.insert("timestamp".into(), Value::from(s.timestamp));
    obj.insert("loc_x".into(), Value::from(s.location[0]));
    obj.insert("loc_y".into(), Value::from(s.location[1]));
    if let Some(z) = s.elevation {
        obj.insert("loc_z".into(), Value::from(z));
    }
    obj.insert("area_id".into(), Value::from(s.area_id));
    obj.insert("num_boxes".into(), Value::from(s.num_boxes));
    if let Some(u) = s.uncertainty {
        obj.insert("uncertainty".into(), Value::from(u));
    }
    if let Some(h) = &s.category_histogram {
        let map: Map<String, Value> = h.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect();
        obj.insert("category_histogram".into(), Value::Object(map));
    }
    for (k, v) in s.feature.iter().flatten().enumerate() {
        obj.insert(format!("feature_{k}"), Value::from(*v));
    }
    obj
}

pub fn to_jsonl_string(manifest: &DatasetManifest) -> String {
    let mut out = String::new();
    for s in &manifest.samples {
        out.push_str(&Value::Object(sample_to_json(s)).to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "id,stream_id,timestamp,loc_x,loc_y,area_id,num_boxes";

    #[test]
    fn csv_preserves_file_order() {
        let text = format!("{HEADER}\nc,1,0.0,0,0,0,1\na,1,1.0,1,0,0,2\nb,2,2.0,2,0,0,3\n");
        let m = parse_csv(&text, "mem").unwrap();
        let ids: Vec<_> = m.samples().iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
        assert_eq!(m.index_of("b"), Some(2));
        assert_eq!(m.feature_dim(), None);
        assert!(m.get(0).uncertainty.is_none());
    }

    #[test]
    fn duplicate_id_is_named() {
        let text = format!("{HEADER}\na,1,0,0,0,0,1\na,1,1,1,0,0,2\n");
        match parse_csv(&text, "mem") {
            Err(Error::DuplicateId(id)) => assert_eq!(id, "a"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inconsistent_feature_dims_rejected() {
        let a = format!("{{\"id\":\"a\",\"stream_id\":1,\"timestamp\":0,\"loc_x\":0,\"loc_y\":0,\"area_id\":0,\"num_boxes\":1,{}}}", (0..4).map(|k| format!("\"feature_{k}\":1.0")).collect::<Vec<_>>().join(","));
        let b = format!("{{\"id\":\"b\",\"stream_id\":1,\"timestamp\":1,\"loc_x\":1,\"loc_y\":0,\"area_id\":0,\"num_boxes\":1,{}}}", (0..5).map(|k| format!("\"feature_{k}\":1.0")).collect::<Vec<_>>().join(","));
        let err = parse_jsonl(&format!("{a}\n{b}\n"), "mem").unwrap_err();
        assert!(matches!(err, Error::InconsistentFeatureDim { expected: 4, found: 5, .. }), "{err:?}");
    }

    #[test]
    fn missing_column_is_schema_error() {
        let text = "id,stream_id,timestamp,loc_x,area_id,num_boxes\na,1,0,0,0,1\n";
        assert!(matches!(parse_csv(text, "mem"), Err(Error::Schema(c)) if c == "loc_y"));
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = format!("{HEADER}\na,1,0,0,0,0,1\nb,1,zero,0,0,0,1\n");
        match parse_csv(&text, "mem") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let neg = format!("{HEADER}\na,1,0,0,0,0,-1\n");
        assert!(matches!(parse_csv(&neg, "mem"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn microsecond_timestamps_convert_to_seconds() {
        let text = "id,stream_id,timestamp_us,loc_x,loc_y,area_id,num_boxes\na,1,1532402927647951,0,0,0,1\n";
        let m = parse_csv(text, "mem").unwrap();
        assert_eq!(m.get(0).timestamp, 1532402927.647951);
    }

    #[test]
    fn optional_columns_populate() {
        let text = "id,stream_id,timestamp,loc_x,loc_y,loc_z,area_id,num_boxes,uncertainty,category_histogram,feature_1,feature_0\n\
                    a,1,0.5,1.5,2.5,3,7,4,0.25,car=3;bus=1,20,10\n\
                    b,1,0.5,1.5,2.5,,7,4,,,21,11\n";
        let m = parse_csv(text, "mem").unwrap();
        let a = m.get(0);
        assert_eq!(a.feature.as_deref(), Some(&[10.0, 20.0][..]));
        assert_eq!(a.elevation, Some(3.0));
        assert_eq!(a.uncertainty, Some(0.25));
        assert_eq!(a.category_histogram.as_ref().unwrap()["car"], 3);
        assert_eq!(m.get(1).uncertainty, None);
        assert_eq!(m.get(1).elevation, None);
        assert_eq!(m.feature_dim(), Some(2));
    }

    #[test]
    fn strategy_validation() {
        let text = format!("{HEADER}\na,1,0,0,0,0,1\nb,1,1,1,0,0,2\n");
        let m = parse_csv(&text, "mem").unwrap();
        assert!(validate_for_strategy(&m, Strategy::Diversity, 0.0).is_ok());
        assert!(matches!(
            validate_for_strategy(&m, Strategy::Entropy, 0.0),
            Err(Error::MissingField { field: "uncertainty", ref id }) if id == "a"
        ));
        assert!(matches!(
            validate_for_strategy(&m, Strategy::Diversity, 1.0),
            Err(Error::MissingField { field: "feature", .. })
        ));
        let with_f = m.with_features(&["a".into(), "b".into()], &[vec![0.0; 3], vec![1.0; 3]]).unwrap();
        assert!(validate_for_strategy(&with_f, Strategy::Diversity, 1.0).is_ok());
    }

    #[test]
    fn feature_update_errors() {
        let text = format!("{HEADER}\na,1,0,0,0,0,1\n");
        let m = parse_csv(&text, "mem").unwrap();
        assert!(matches!(m.with_features(&["zz".into()], &[vec![1.0]]), Err(Error::UnknownId(_))));
        let m = m.with_features(&["a".into()], &[vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            m.with_features(&["a".into()], &[vec![1.0]]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(m.with_features(&[], &[]).is_ok());
    }

    #[test]
    fn empty_manifest_rejected() {
        assert!(matches!(parse_csv(&format!("{HEADER}\n"), "mem"), Err(Error::EmptyManifest)));
    }
}
