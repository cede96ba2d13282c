//! Error type shared across the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: missing mapped column `{0}`")]
    MissingColumn(String),

    #[error("duplicate observation date {0}")]
    DuplicateDate(chrono::NaiveDate),

    #[error("sentinel set must not be empty")]
    EmptySentinels,

    #[error("cannot split a dataset with {0} record(s); need at least 2")]
    SplitTooSmall(usize),

    #[error("split fraction {0} outside the open interval (0, 1)")]
    BadSplitFraction(f64),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("IQR filtering needs at least 4 records with `{field}`; got {got}")]
    TooFewForQuartiles { field: String, got: usize },

    #[error("feature `{feature}` requires field(s) {missing:?} absent from every record")]
    MissingFeatureInputs {
        feature: String,
        missing: Vec<String>,
    },

    #[error("record dated {date}: {reason}")]
    BadRecord {
        date: chrono::NaiveDate,
        reason: String,
    },

    #[error("unknown rendition `{0}`; valid names: base, full_capacity, geographical, full_elevation")]
    UnknownRendition(String),

    #[error("river distance must be positive; got {0}")]
    NonPositiveDistance(f64),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("design matrix is rank deficient; dependent column(s): {0:?}")]
    RankDeficient(Vec<String>),

    #[error("column schema mismatch: expected {expected:?}, got {got:?}")]
    SchemaMismatch {
        expected: Vec<String>,
        got: Vec<String>,
    },

    #[error("prediction matrix has {got} column(s); model was trained on {expected}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("length mismatch: observed {observed} vs predicted {predicted}")]
    LengthMismatch { observed: usize, predicted: usize },

    #[error("R² undefined: observed values are all equal")]
    R2Undefined,

    #[error("cross-validation fold {fold} has {rows} row(s); need at least 2")]
    FoldTooSmall { fold: usize, rows: usize },

    #[error("rating curve: {0}")]
    RatingCurve(String),

    #[error("rating curve has no inflection: no interior knot increases the segment slope")]
    NoInflection,

    #[error("volume {0} MCM outside the rating curve range [{1}, {2}]")]
    VolumeOutOfRange(f64, f64, f64),

    #[error("gauge stage missing on row {row}; gauge-stage routing has no fallback")]
    MissingGauge { row: usize },

    #[error("observed value {value} falls outside residual bin edges [{lo}, {hi}]")]
    OutsideBins { value: f64, lo: f64, hi: f64 },

    #[error("residual bin edges must be strictly increasing")]
    BadBinEdges,

    #[error("duplicate model name `{0}` in comparison report")]
    DuplicateModel(String),

    #[error("artifact format error: {0}")]
    Artifact(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
