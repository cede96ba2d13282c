//! The four nested feature renditions and matrix assembly.
//!
//! Each rendition extends the previous one's column list, so `base` ⊂
//! `full_capacity` ⊂ `geographical` ⊂ `full_elevation` holds by
//! construction. For a single dam the geographic inputs never vary, so those
//! columns come out constant — downstream fitting flags and neutralizes
//! them rather than this module second-guessing the data.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Dataset;

/// Which of the staged feature sets a model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rendition {
    Base,
    FullCapacity,
    Geographical,
    FullElevation,
}

impl Rendition {
    pub const ALL: [Rendition; 4] = [
        Rendition::Base,
        Rendition::FullCapacity,
        Rendition::Geographical,
        Rendition::FullElevation,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "base" => Ok(Self::Base),
            "full_capacity" => Ok(Self::FullCapacity),
            "geographical" => Ok(Self::Geographical),
            "full_elevation" => Ok(Self::FullElevation),
            other => Err(Error::UnknownRendition(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Base => "base",
            Self::FullCapacity => "full_capacity",
            Self::Geographical => "geographical",
            Self::FullElevation => "full_elevation",
        }
    }

    /// Ordered column list for this rendition under the given params.
    pub fn columns(&self, params: &FeatureParams) -> Vec<String> {
        let mut cols = vec!["water_area".to_string()];
        if *self >= Rendition::FullCapacity {
            cols.push("full_supply_indicator".into());
            if params.full_supply_capacity_mcm.is_some() {
                cols.push("full_supply_capacity".into());
            }
        }
        if *self >= Rendition::Geographical {
            cols.extend(
                [
                    "inflow_elevation",
                    "outflow_elevation",
                    "vertical_drop",
                    "river_distance",
                    "slope",
                ]
                .map(String::from),
            );
        }
        if *self >= Rendition::FullElevation {
            cols.push("fse_headroom".into());
            cols.push("full_supply_elevation".into());
        }
        cols
    }
}

/// Constants feeding the engineered features, configured per dam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureParams {
    /// Water area at/above which the dam counts as at full supply (ha).
    pub area_threshold_ha: f64,
    /// Optional constant full-supply-capacity column (MCM).
    pub full_supply_capacity_mcm: Option<f64>,
    /// Full supply elevation (m a.s.l.).
    pub full_supply_elevation_m: f64,
    /// Datum converting gauge stage to water-surface elevation (m).
    pub gauge_datum_m: f64,
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams {
            area_threshold_ha: 1500.0,
            full_supply_capacity_mcm: None,
            full_supply_elevation_m: 999.38,
            gauge_datum_m: 0.0,
        }
    }
}

/// 1 when the water area reaches the threshold, else 0. Closed boundary:
/// area exactly at the threshold counts as at capacity.
pub fn full_supply_indicator(water_area_ha: f64, area_threshold_ha: f64) -> f64 {
    if water_area_ha >= area_threshold_ha {
        1.0
    } else {
        0.0
    }
}

/// Vertical drop and slope from inflow/outflow elevations and river distance.
pub fn geo_features(
    inflow_elevation_m: f64,
    outflow_elevation_m: f64,
    river_distance_m: f64,
) -> Result<(f64, f64)> {
    if river_distance_m <= 0.0 {
        return Err(Error::NonPositiveDistance(river_distance_m));
    }
    let drop = inflow_elevation_m - outflow_elevation_m;
    Ok((drop, drop / river_distance_m))
}

/// Headroom below full supply elevation, in meters. Negative when the
/// surface is above full supply (flood stage).
pub fn fse_headroom(gauge_stage_m: f64, gauge_datum_m: f64, full_supply_elevation_m: f64) -> f64 {
    full_supply_elevation_m - (gauge_stage_m + gauge_datum_m)
}

/// Column-major feature matrix aligned with target volumes and dates.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    columns: Vec<String>,
    cols: Vec<Vec<f64>>,
    target: Vec<f64>,
    dates: Vec<NaiveDate>,
    gauge_stage: Vec<Option<f64>>,
    /// Rows dropped because a needed optional input was missing.
    pub dropped_missing: usize,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.cols[j]
    }

    pub fn columns_data(&self) -> &[Vec<f64>] {
        &self.cols
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn gauge_stage(&self, row: usize) -> Option<f64> {
        self.gauge_stage[row]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.cols.iter().map(|c| c[i]).collect()
    }

    /// Build a matrix directly from columns and targets. Dates are synthetic
    /// consecutive days; gauge stages are absent.
    pub fn from_parts(columns: Vec<String>, cols: Vec<Vec<f64>>, target: Vec<f64>) -> Result<Self> {
        if columns.len() != cols.len() {
            return Err(Error::InvalidParam(format!(
                "{} column names for {} columns",
                columns.len(),
                cols.len()
            )));
        }
        let n = target.len();
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidParam(
                "column lengths do not match target length".into(),
            ));
        }
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        let dates = (0..n)
            .map(|i| start + chrono::Days::new(i as u64))
            .collect();
        Ok(FeatureMatrix {
            columns,
            cols,
            target,
            dates,
            gauge_stage: vec![None; n],
            dropped_missing: 0,
        })
    }

    /// Same matrix restricted to the given row indices (in the given order).
    pub fn subset(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            columns: self.columns.clone(),
            cols: self
                .cols
                .iter()
                .map(|c| rows.iter().map(|&i| c[i]).collect())
                .collect(),
            target: rows.iter().map(|&i| self.target[i]).collect(),
            dates: rows.iter().map(|&i| self.dates[i]).collect(),
            gauge_stage: rows.iter().map(|&i| self.gauge_stage[i]).collect(),
            dropped_missing: 0,
        }
    }
}

fn required_fields(rendition: Rendition) -> Vec<&'static str> {
    let mut f = Vec::new();
    if rendition >= Rendition::Geographical {
        f.extend(["inflow_elevation", "outflow_elevation", "river_distance"]);
    }
    if rendition >= Rendition::FullElevation {
        f.push("gauge_stage");
    }
    f
}

/// Assemble the feature matrix for a rendition.
///
/// Rows missing a needed optional field are dropped and counted. If a needed
/// field is absent from every record the rendition is unbuildable and the
/// error names the missing fields.
pub fn assemble(
    ds: &Dataset,
    rendition: Rendition,
    params: &FeatureParams,
) -> Result<FeatureMatrix> {
    if rendition >= Rendition::FullCapacity && params.area_threshold_ha <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "area threshold must be positive; got {}",
            params.area_threshold_ha
        )));
    }

    let needed = required_fields(rendition);
    if !ds.records.is_empty() && !needed.is_empty() {
        let mut absent_everywhere = Vec::new();
        for &name in &needed {
            let present = ds.records.iter().any(|r| match name {
                "inflow_elevation" => r.inflow_elevation_m.is_some(),
                "outflow_elevation" => r.outflow_elevation_m.is_some(),
                "river_distance" => r.river_distance_m.is_some(),
                "gauge_stage" => r.gauge_stage_m.is_some(),
                _ => unreachable!(),
            });
            if !present {
                absent_everywhere.push(name.to_string());
            }
        }
        if !absent_everywhere.is_empty() {
            return Err(Error::MissingFeatureInputs {
                feature: rendition.name().to_string(),
                missing: absent_everywhere,
            });
        }
    }

    let columns = rendition.columns(params);
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); columns.len()];
    let mut target = Vec::new();
    let mut dates = Vec::new();
    let mut gauge = Vec::new();
    let mut dropped_missing = 0usize;

    for rec in &ds.records {
        let mut values = Vec::with_capacity(columns.len());
        values.push(rec.water_area_ha);

        if rendition >= Rendition::FullCapacity {
            values.push(full_supply_indicator(
                rec.water_area_ha,
                params.area_threshold_ha,
            ));
            if let Some(fsc) = params.full_supply_capacity_mcm {
                values.push(fsc);
            }
        }

        if rendition >= Rendition::Geographical {
            let (inflow, outflow, dist) = match (
                rec.inflow_elevation_m,
                rec.outflow_elevation_m,
                rec.river_distance_m,
            ) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                _ => {
                    dropped_missing += 1;
                    continue;
                }
            };
            let (drop, slope) = geo_features(inflow, outflow, dist).map_err(|e| {
                Error::BadRecord {
                    date: rec.date,
                    reason: e.to_string(),
                }
            })?;
            values.extend([inflow, outflow, drop, dist, slope]);
        }

        if rendition >= Rendition::FullElevation {
            let stage = match rec.gauge_stage_m {
                Some(s) => s,
                None => {
                    dropped_missing += 1;
                    continue;
                }
            };
            values.push(fse_headroom(
                stage,
                params.gauge_datum_m,
                params.full_supply_elevation_m,
            ));
            values.push(params.full_supply_elevation_m);
        }

        debug_assert_eq!(values.len(), columns.len());
        for (col, v) in cols.iter_mut().zip(values) {
            col.push(v);
        }
        target.push(rec.volume_mcm);
        dates.push(rec.date);
        gauge.push(rec.gauge_stage_m);
    }

    Ok(FeatureMatrix {
        columns,
        cols,
        target,
        dates,
        gauge_stage: gauge,
        dropped_missing,
    })
}
