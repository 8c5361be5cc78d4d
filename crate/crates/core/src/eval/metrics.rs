use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::GammaRecord;
use crate::error::{Error, Result};
use crate::model::GammaPrediction;

/// Mean absolute `ln γ` error per system over every available target.
pub fn system_mae(records: &[GammaRecord], preds: &[GammaPrediction]) -> Result<BTreeMap<String, f64>> {
    if records.is_empty() {
        return Err(Error::Invalid("no records to score".into()));
    }
    if records.len() != preds.len() {
        return Err(Error::Shape(format!(
            "{} records but {} predictions",
            records.len(),
            preds.len()
        )));
    }
    let mut acc: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for (r, p) in records.iter().zip(preds) {
        let pairs = [(r.ln_gamma1, p.ln_gamma1), (r.ln_gamma2, p.ln_gamma2)];
        let mut any = false;
        for (target, pred) in pairs {
            if let Some(t) = target {
                let e = acc.entry(&r.system_id).or_default();
                e.0 += (pred - t).abs();
                e.1 += 1;
                any = true;
            }
        }
        if !any {
            return Err(Error::Invalid(format!("record of {} has no target", r.system_id)));
        }
    }
    Ok(acc
        .into_iter()
        .map(|(k, (sum, n))| (k.to_string(), sum / n as f64))
        .collect())
}

/// Share of `maes` strictly below each threshold.
pub fn cumulative_fraction(maes: &[f64], thresholds: &[f64]) -> Result<Vec<f64>> {
    if maes.is_empty() {
        return Err(Error::Invalid("no MAE values".into()));
    }
    let mut sorted = maes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&t| sorted.partition_point(|&m| m < t) as f64 / n)
        .collect())
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Counts in bins `[k w, (k+1) w)` from zero up to the largest value.
pub fn histogram(values: &[f64], bin_width: f64) -> Result<Vec<HistogramBin>> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::Invalid(format!("bin width {bin_width} must be positive")));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Invalid(format!("histogram value {v} is not a finite non-negative number")));
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    let n_bins = ((max / bin_width).floor() as usize) + 1;
    let mut bins: Vec<HistogramBin> = (0..n_bins)
        .map(|k| HistogramBin {
            lo: k as f64 * bin_width,
            hi: (k + 1) as f64 * bin_width,
            count: 0,
        })
        .collect();
    for v in values {
        let k = ((v / bin_width).floor() as usize).min(n_bins - 1);
        bins[k].count += 1;
    }
    Ok(bins)
}
