//! Quantiles, IQR outlier filtering, and feature standardization.
//!
//! Quantiles use linear interpolation at position `(n-1)·p` between order
//! statistics. Standardization is population-scaled (1/n variance) so that a
//! standardized column satisfies `Σx² = n`, the convention the coordinate
//! descent updates in [`crate::linmod`] rely on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Dataset, NumericField};

/// First/third quartiles, median, and their spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuartileSummary {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub iqr: f64,
}

/// Quantile at probability `p` of an already-sorted slice,
/// linear interpolation at position `(n-1)·p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Quartile summary of a sequence (any order; a sorted copy is taken).
pub fn quartiles(values: &[f64]) -> Result<QuartileSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput("quartiles"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("quartiles input"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    Ok(QuartileSummary {
        q1,
        median,
        q3,
        iqr: q3 - q1,
    })
}

/// Outlier bounds `[q1 - k·iqr, q3 + k·iqr]`.
pub fn iqr_bounds(q: &QuartileSummary, k: f64) -> (f64, f64) {
    (q.q1 - k * q.iqr, q.q3 + k * q.iqr)
}

/// Remove records whose `field` value falls outside the IQR bounds.
///
/// Bounds come from `reference` when given (the training split, so the test
/// side sees the same cut) and from `ds` itself otherwise. Records missing an
/// optional `field` are kept: absence is not an outlier. Returns the kept
/// dataset and the number removed.
pub fn iqr_filter(
    ds: &Dataset,
    field: NumericField,
    k: f64,
    reference: Option<&Dataset>,
) -> Result<(Dataset, usize)> {
    if k <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "IQR multiplier must be positive; got {k}"
        )));
    }
    let source = reference.unwrap_or(ds);
    let values: Vec<f64> = source
        .records
        .iter()
        .filter_map(|r| r.field(field))
        .collect();
    if values.len() < 4 {
        return Err(Error::TooFewForQuartiles {
            field: field.name().to_string(),
            got: values.len(),
        });
    }
    let (lo, hi) = iqr_bounds(&quartiles(&values)?, k);

    let mut out = ds.clone();
    let before = out.records.len();
    out.records.retain(|r| match r.field(field) {
        Some(v) => v >= lo && v <= hi,
        None => true,
    });
    let removed = before - out.records.len();
    out.provenance.add_dropped("outlier", removed);
    Ok((out, removed))
}

/// Per-column centering and population-sd scaling fitted on training rows.
///
/// Constant columns are flagged; they standardize to zero and penalized
/// fits must leave their coefficients at exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    /// Population standard deviation; 1.0 is stored for constant columns so
    /// apply/invert stay exact round trips.
    pub scales: Vec<f64>,
    pub constant: Vec<bool>,
}

impl Standardizer {
    /// Fit on column-major training data. Needs at least 2 rows.
    pub fn fit(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.first().map(|c| c.len()).unwrap_or(0);
        if n < 2 {
            return Err(Error::InvalidParam(format!(
                "standardizer needs at least 2 rows; got {n}"
            )));
        }
        let mut means = Vec::with_capacity(columns.len());
        let mut scales = Vec::with_capacity(columns.len());
        let mut constant = Vec::with_capacity(columns.len());
        for col in columns {
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("standardizer input"));
            }
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            let sd = var.sqrt();
            let is_const = sd == 0.0;
            means.push(mean);
            scales.push(if is_const { 1.0 } else { sd });
            constant.push(is_const);
        }
        Ok(Standardizer {
            means,
            scales,
            constant,
        })
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    /// Center and scale column-major data.
    pub fn apply(&self, columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
        debug_assert_eq!(columns.len(), self.means.len());
        columns
            .iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(col, (&m, &s))| col.iter().map(|v| (v - m) / s).collect())
            .collect()
    }

    /// Undo `apply`.
    pub fn invert(&self, columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
        debug_assert_eq!(columns.len(), self.means.len());
        columns
            .iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(col, (&m, &s))| col.iter().map(|v| v * s + m).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Dataset, ObservationRecord};
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn day(i: usize) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(i as u64)
    }

    fn dataset_with_areas(areas: &[f64]) -> Dataset {
        let records = areas
            .iter()
            .enumerate()
            .map(|(i, &a)| ObservationRecord {
                date: day(i),
                water_area_ha: a,
                volume_mcm: 1.0,
                gauge_stage_m: None,
                inflow_elevation_m: None,
                outflow_elevation_m: None,
                river_distance_m: None,
            })
            .collect();
        Dataset::from_records(records).unwrap()
    }

    #[test]
    fn quartiles_seven_values() {
        // oracle: sort + position (n-1)·p by hand → 1.5 → 11.5, 4.5 → 13.5
        let q = quartiles(&[10.0, 11.0, 12.0, 12.0, 13.0, 14.0, 500.0]).unwrap();
        assert_eq!(q.q1, 11.5);
        assert_eq!(q.q3, 13.5);
        assert_eq!(q.iqr, 2.0);
    }

    #[test]
    fn quartiles_single_element() {
        let q = quartiles(&[5.0]).unwrap();
        assert_eq!((q.q1, q.median, q.q3, q.iqr), (5.0, 5.0, 5.0, 0.0));
    }

    #[test]
    fn quartiles_four_values_interpolate() {
        // positions 0.75 and 2.25 between order statistics
        let q = quartiles(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(q.q1, 1.75);
        assert_eq!(q.q3, 3.25);
    }

    #[test]
    fn quartiles_empty_errors() {
        assert!(quartiles(&[]).is_err());
    }

    #[test]
    fn iqr_filter_removes_extreme_area() {
        // bounds [8.5, 16.5]: oracle = quartiles + bound arithmetic
        let ds = dataset_with_areas(&[10.0, 12.0, 11.0, 13.0, 14.0, 12.0, 500.0]);
        let (kept, removed) = iqr_filter(&ds, NumericField::WaterArea, 1.5, None).unwrap();
        assert_eq!(removed, 1);
        assert_eq!(kept.len(), 6);
        assert!(kept.records.iter().all(|r| r.water_area_ha != 500.0));
    }

    #[test]
    fn iqr_filter_identical_values_noop() {
        let ds = dataset_with_areas(&[7.0; 6]);
        let (kept, removed) = iqr_filter(&ds, NumericField::WaterArea, 1.5, None).unwrap();
        assert_eq!(removed, 0);
        assert_eq!(kept.len(), 6);
    }

    #[test]
    fn iqr_filter_no_extremes_noop() {
        let ds = dataset_with_areas(&[10.0, 11.0, 12.0, 13.0, 14.0]);
        let (kept, removed) = iqr_filter(&ds, NumericField::WaterArea, 1.5, None).unwrap();
        assert_eq!(removed, 0);
        assert_eq!(kept.records, ds.records);
    }

    #[test]
    fn iqr_filter_too_few_records() {
        let ds = dataset_with_areas(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            iqr_filter(&ds, NumericField::WaterArea, 1.5, None),
            Err(Error::TooFewForQuartiles { .. })
        ));
    }

    #[test]
    fn iqr_filter_idempotent_with_reference() {
        let ds = dataset_with_areas(&[10.0, 12.0, 11.0, 13.0, 14.0, 12.0, 500.0]);
        let (once, _) = iqr_filter(&ds, NumericField::WaterArea, 1.5, Some(&ds)).unwrap();
        let (twice, removed2) = iqr_filter(&once, NumericField::WaterArea, 1.5, Some(&ds)).unwrap();
        assert_eq!(removed2, 0);
        assert_eq!(once.records, twice.records);
    }

    #[test]
    fn standardizer_two_pass_oracle() {
        // column [2,4,6]: mean 4, population sd = sqrt(8/3)
        let s = Standardizer::fit(&[vec![2.0, 4.0, 6.0]]).unwrap();
        assert_eq!(s.means[0], 4.0);
        assert!((s.scales[0] - (8.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(!s.constant[0]);
    }

    #[test]
    fn standardizer_constant_column_flagged() {
        let s = Standardizer::fit(&[vec![7.0, 7.0, 7.0]]).unwrap();
        assert!(s.constant[0]);
        let z = s.apply(&[vec![7.0, 7.0, 7.0]]);
        assert_eq!(z[0], vec![0.0, 0.0, 0.0]);
        let back = s.invert(&z);
        assert_eq!(back[0], vec![7.0, 7.0, 7.0]);
    }

    #[test]
    fn standardizer_apply_near_identity_on_standardized() {
        let col = vec![-1.0, 0.0, 1.0];
        let s = Standardizer::fit(&[col.clone()]).unwrap();
        let z = s.apply(&[col.clone()]);
        let mean: f64 = z[0].iter().sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-10);
        let sumsq: f64 = z[0].iter().map(|v| v * v).sum();
        assert!((sumsq - 3.0).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn quartiles_permutation_invariant(mut values in proptest::collection::vec(-1e6f64..1e6, 1..50), seed in 0u64..1000) {
            let q_sorted = quartiles(&values).unwrap();
            // deterministic shuffle
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            values.shuffle(&mut rng);
            let q_shuffled = quartiles(&values).unwrap();
            prop_assert_eq!(q_sorted, q_shuffled);
        }

        #[test]
        fn iqr_kept_plus_removed_is_total(areas in proptest::collection::vec(0.0f64..1e4, 4..60)) {
            let ds = dataset_with_areas(&areas);
            let (kept, removed) = iqr_filter(&ds, NumericField::WaterArea, 1.5, None).unwrap();
            prop_assert_eq!(kept.len() + removed, areas.len());
        }

        #[test]
        fn standardize_round_trip(cols in proptest::collection::vec(
            proptest::collection::vec(-1e5f64..1e5, 5), 1..4))
        {
            let s = Standardizer::fit(&cols).unwrap();
            let back = s.invert(&s.apply(&cols));
            for (a, b) in cols.iter().zip(&back) {
                for (x, y) in a.iter().zip(b) {
                    prop_assert!((x - y).abs() < 1e-10 * x.abs().max(1.0));
                }
            }
        }
    }
}
