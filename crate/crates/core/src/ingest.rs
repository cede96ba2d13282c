//! CSV ingestion, sentinel removal, and train/test splitting.
//!
//! Raw observation files arrive as UTF-8 CSV with a header row and ISO-8601
//! dates. A [`SchemaMapping`] ties logical field names to whatever the file's
//! headers happen to be called. Malformed rows are counted and reported with
//! line numbers rather than silently dropped; sentinel-valued rows (the
//! upstream archive marks bad readings with values like -9.9) are removed in
//! a separate pass so the provenance ledger can tell the two apart.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One dated reservoir measurement.
///
/// `water_area_ha` and `volume_mcm` are required; gauge stage and the
/// geographic fields are optional and stay absent (never zero-filled) when
/// the source file does not carry them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRecord {
    pub date: NaiveDate,
    pub water_area_ha: f64,
    pub volume_mcm: f64,
    pub gauge_stage_m: Option<f64>,
    pub inflow_elevation_m: Option<f64>,
    pub outflow_elevation_m: Option<f64>,
    pub river_distance_m: Option<f64>,
}

/// Logical numeric fields of an observation record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericField {
    WaterArea,
    Volume,
    GaugeStage,
    InflowElevation,
    OutflowElevation,
    RiverDistance,
}

impl NumericField {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "water_area" => Ok(Self::WaterArea),
            "volume" => Ok(Self::Volume),
            "gauge_stage" => Ok(Self::GaugeStage),
            "inflow_elevation" => Ok(Self::InflowElevation),
            "outflow_elevation" => Ok(Self::OutflowElevation),
            "river_distance" => Ok(Self::RiverDistance),
            other => Err(Error::InvalidParam(format!(
                "unknown numeric field `{other}`"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::WaterArea => "water_area",
            Self::Volume => "volume",
            Self::GaugeStage => "gauge_stage",
            Self::InflowElevation => "inflow_elevation",
            Self::OutflowElevation => "outflow_elevation",
            Self::RiverDistance => "river_distance",
        }
    }
}

impl ObservationRecord {
    /// Value of a logical field, `None` when the optional field is absent.
    pub fn field(&self, f: NumericField) -> Option<f64> {
        match f {
            NumericField::WaterArea => Some(self.water_area_ha),
            NumericField::Volume => Some(self.volume_mcm),
            NumericField::GaugeStage => self.gauge_stage_m,
            NumericField::InflowElevation => self.inflow_elevation_m,
            NumericField::OutflowElevation => self.outflow_elevation_m,
            NumericField::RiverDistance => self.river_distance_m,
        }
    }

    fn numeric_values(&self) -> impl Iterator<Item = f64> + '_ {
        [
            Some(self.water_area_ha),
            Some(self.volume_mcm),
            self.gauge_stage_m,
            self.inflow_elevation_m,
            self.outflow_elevation_m,
            self.river_distance_m,
        ]
        .into_iter()
        .flatten()
    }
}

/// Maps logical field names onto the CSV header names of a particular file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemaMapping {
    pub date: String,
    pub water_area: String,
    pub volume: String,
    #[serde(default)]
    pub gauge_stage: Option<String>,
    #[serde(default)]
    pub inflow_elevation: Option<String>,
    #[serde(default)]
    pub outflow_elevation: Option<String>,
    #[serde(default)]
    pub river_distance: Option<String>,
}

impl SchemaMapping {
    /// Identity mapping: logical names are the header names.
    pub fn canonical() -> Self {
        SchemaMapping {
            date: "date".into(),
            water_area: "water_area_ha".into(),
            volume: "volume_mcm".into(),
            gauge_stage: Some("gauge_stage_m".into()),
            inflow_elevation: Some("inflow_elevation_m".into()),
            outflow_elevation: Some("outflow_elevation_m".into()),
            river_distance: Some("river_distance_m".into()),
        }
    }
}

/// A malformed row: 1-based line number in the source file plus the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowIssue {
    pub line: u64,
    pub reason: String,
}

/// Where a dataset came from and what was dropped on the way.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub raw_rows: usize,
    /// Counts of dropped rows keyed by reason (`malformed`, `sentinel`,
    /// `negative_value`, `outlier`, `missing_feature_input`).
    pub dropped: BTreeMap<String, usize>,
    /// Line-level detail for malformed rows.
    pub malformed: Vec<RowIssue>,
}

impl Provenance {
    pub fn dropped_count(&self, reason: &str) -> usize {
        self.dropped.get(reason).copied().unwrap_or(0)
    }

    pub(crate) fn add_dropped(&mut self, reason: &str, n: usize) {
        if n > 0 {
            *self.dropped.entry(reason.to_string()).or_insert(0) += n;
        }
    }

    /// Total rows accounted for: surviving + dropped must equal `raw_rows`.
    pub fn total_dropped(&self) -> usize {
        self.dropped.values().sum()
    }
}

/// An ordered, validated sequence of observations plus its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub records: Vec<ObservationRecord>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Build a dataset from pre-validated records (sorted, duplicate-free).
    pub fn from_records(records: Vec<ObservationRecord>) -> Result<Self> {
        let mut records = records;
        records.sort_by_key(|r| r.date);
        check_no_duplicate_dates(&records)?;
        let provenance = Provenance {
            source: "in-memory".into(),
            raw_rows: records.len(),
            ..Provenance::default()
        };
        Ok(Dataset {
            records,
            provenance,
        })
    }
}

fn check_no_duplicate_dates(records: &[ObservationRecord]) -> Result<()> {
    for pair in records.windows(2) {
        if pair[0].date == pair[1].date {
            return Err(Error::DuplicateDate(pair[0].date));
        }
    }
    Ok(())
}

fn parse_field(s: &str) -> std::result::Result<Option<f64>, String> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(None);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(v) => Err(format!("non-finite value `{v}`")),
        Err(_) => Err(format!("unparseable number `{t}`")),
    }
}

/// Parse observation CSV from a reader.
///
/// Every well-formed row becomes a record; malformed rows (bad date, bad
/// number, missing required value) are counted per line in the provenance.
/// A mapped column missing from the header is a schema error. Records are
/// sorted by date; duplicate dates are rejected outright.
pub fn parse_csv<R: Read>(source: R, schema: &SchemaMapping, source_label: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);

    let headers = reader.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let idx_date = find(&schema.date)?;
    let idx_area = find(&schema.water_area)?;
    let idx_volume = find(&schema.volume)?;
    let idx_gauge = schema.gauge_stage.as_deref().map(find).transpose()?;
    let idx_inflow = schema.inflow_elevation.as_deref().map(find).transpose()?;
    let idx_outflow = schema.outflow_elevation.as_deref().map(find).transpose()?;
    let idx_distance = schema.river_distance.as_deref().map(find).transpose()?;

    let mut records = Vec::new();
    let mut malformed = Vec::new();
    let mut raw_rows = 0usize;

    for row in reader.records() {
        let row = row?;
        raw_rows += 1;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let get = |i: usize| row.get(i).unwrap_or("");

        let date = match NaiveDate::parse_from_str(get(idx_date).trim(), "%Y-%m-%d") {
            Ok(d) => d,
            Err(_) => {
                malformed.push(RowIssue {
                    line,
                    reason: format!("unparseable date `{}`", get(idx_date).trim()),
                });
                continue;
            }
        };

        let required = |i: usize, what: &str| -> std::result::Result<f64, String> {
            match parse_field(get(i))? {
                Some(v) => Ok(v),
                None => Err(format!("missing required {what}")),
            }
        };
        let optional = |i: Option<usize>| -> std::result::Result<Option<f64>, String> {
            match i {
                Some(i) => parse_field(get(i)),
                None => Ok(None),
            }
        };

        let parsed = (|| -> std::result::Result<ObservationRecord, String> {
            Ok(ObservationRecord {
                date,
                water_area_ha: required(idx_area, "water area")?,
                volume_mcm: required(idx_volume, "volume")?,
                gauge_stage_m: optional(idx_gauge)?,
                inflow_elevation_m: optional(idx_inflow)?,
                outflow_elevation_m: optional(idx_outflow)?,
                river_distance_m: optional(idx_distance)?,
            })
        })();

        match parsed {
            Ok(rec) => records.push(rec),
            Err(reason) => malformed.push(RowIssue { line, reason }),
        }
    }

    records.sort_by_key(|r| r.date);
    check_no_duplicate_dates(&records)?;

    let mut provenance = Provenance {
        source: source_label.to_string(),
        raw_rows,
        ..Provenance::default()
    };
    provenance.add_dropped("malformed", malformed.len());
    provenance.malformed = malformed;

    Ok(Dataset {
        records,
        provenance,
    })
}

/// Parse an observation CSV file.
pub fn parse_csv_path(path: &Path, schema: &SchemaMapping) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    parse_csv(file, schema, &path.display().to_string())
}

/// Remove records where any numeric field equals a sentinel value exactly.
///
/// Matching is bitwise on the parsed f64 — the archive writes markers like
/// -9.9 verbatim, so no tolerance is involved.
pub fn drop_sentinels(ds: &Dataset, sentinels: &[f64]) -> Result<Dataset> {
    if sentinels.is_empty() {
        return Err(Error::EmptySentinels);
    }
    let mut out = ds.clone();
    let before = out.records.len();
    out.records.retain(|rec| {
        !rec.numeric_values()
            .any(|v| sentinels.iter().any(|&s| v == s))
    });
    out.provenance
        .add_dropped("sentinel", before - out.records.len());
    Ok(out)
}

/// Remove records with negative water area or volume.
///
/// Sentinel removal runs first; anything still negative afterwards is not a
/// known marker, just bad data, and gets its own drop reason.
pub fn drop_negative(ds: &Dataset) -> Dataset {
    let mut out = ds.clone();
    let before = out.records.len();
    out.records
        .retain(|rec| rec.water_area_ha >= 0.0 && rec.volume_mcm >= 0.0);
    out.provenance
        .add_dropped("negative_value", before - out.records.len());
    out
}

/// Split a date-ordered dataset: first ⌈n·fraction⌉ records train, rest test.
pub fn chronological_split(ds: &Dataset, train_fraction: f64) -> Result<(Dataset, Dataset)> {
    if ds.len() < 2 {
        return Err(Error::SplitTooSmall(ds.len()));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::BadSplitFraction(train_fraction));
    }
    let n_train = (ds.len() as f64 * train_fraction).ceil() as usize;
    let (a, b) = ds.records.split_at(n_train.min(ds.len()));
    let mk = |records: &[ObservationRecord]| Dataset {
        records: records.to_vec(),
        provenance: ds.provenance.clone(),
    };
    Ok((mk(a), mk(b)))
}

/// Seeded random split; each side stays sorted by date.
pub fn random_split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if ds.len() < 2 {
        return Err(Error::SplitTooSmall(ds.len()));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::BadSplitFraction(train_fraction));
    }
    let n_train = (ds.len() as f64 * train_fraction).ceil() as usize;
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let mut train_idx = idx[..n_train.min(ds.len())].to_vec();
    let mut test_idx = idx[n_train.min(ds.len())..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let mk = |ids: &[usize]| Dataset {
        records: ids.iter().map(|&i| ds.records[i].clone()).collect(),
        provenance: ds.provenance.clone(),
    };
    Ok((mk(&train_idx), mk(&test_idx)))
}

/// Write a dataset as canonical CSV (logical header names, ISO dates).
pub fn write_csv<W: std::io::Write>(ds: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "date",
        "water_area_ha",
        "volume_mcm",
        "gauge_stage_m",
        "inflow_elevation_m",
        "outflow_elevation_m",
        "river_distance_m",
    ])?;
    let fmt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in &ds.records {
        w.write_record([
            r.date.format("%Y-%m-%d").to_string(),
            r.water_area_ha.to_string(),
            r.volume_mcm.to_string(),
            fmt(r.gauge_stage_m),
            fmt(r.inflow_elevation_m),
            fmt(r.outflow_elevation_m),
            fmt(r.river_distance_m),
        ])?;
    }
    w.flush()?;
    Ok(())
}
