use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::consistency::EmbeddedComponents;
use super::metrics::{cumulative_fraction, histogram, median, system_mae, HistogramBin};
use crate::data::{GammaRecord, StandardizedComponents};
use crate::error::{Error, Result};
use crate::model::{Composition, GammaPrediction, GeModel};

/// Predictions for every record, embedding each component once.
pub fn predict_records(model: &GeModel, records: &[GammaRecord], components: &StandardizedComponents) -> Result<Vec<GammaPrediction>> {
    let ev = model.evaluator();
    let embedded = EmbeddedComponents::new(&ev, components)?;
    records
        .iter()
        .map(|r| {
            ev.predict_embedded(
                embedded.get(&r.smiles_1)?,
                embedded.get(&r.smiles_2)?,
                r.temperature,
                Composition::new(r.x1),
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemScore {
    pub system_id: String,
    pub mae: f64,
    pub baseline_mae: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulativePoint {
    pub threshold: f64,
    pub fraction: f64,
    pub baseline_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub n_records: usize,
    pub n_systems: usize,
    pub mean_mae: f64,
    pub median_mae: f64,
    pub baseline_median_mae: Option<f64>,
    pub cumulative: Vec<CumulativePoint>,
    pub histogram: Vec<HistogramBin>,
    pub systems: Vec<SystemScore>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub bin_width: f64,
    pub thresholds: Vec<f64>,
    /// Externally computed per-system MAE of a comparison model.
    pub baseline: Option<BTreeMap<String, f64>>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            bin_width: 0.02,
            thresholds: (0..=100).map(|k| k as f64 * 0.01).collect(),
            baseline: None,
        }
    }
}

pub fn build_report(records: &[GammaRecord], preds: &[GammaPrediction], options: &ReportOptions) -> Result<EvaluationReport> {
    let maes = system_mae(records, preds)?;
    let values: Vec<f64> = maes.values().copied().collect();
    let fractions = cumulative_fraction(&values, &options.thresholds)?;

    let systems: Vec<SystemScore> = maes
        .iter()
        .map(|(id, &mae)| SystemScore {
            system_id: id.clone(),
            mae,
            baseline_mae: options.baseline.as_ref().and_then(|b| b.get(id).copied()),
        })
        .collect();
    let baseline_values: Vec<f64> = systems.iter().filter_map(|s| s.baseline_mae).collect();
    let baseline_fractions = if baseline_values.is_empty() {
        None
    } else {
        Some(cumulative_fraction(&baseline_values, &options.thresholds)?)
    };

    Ok(EvaluationReport {
        n_records: records.len(),
        n_systems: values.len(),
        mean_mae: values.iter().sum::<f64>() / values.len() as f64,
        median_mae: median(&values).unwrap_or(f64::NAN),
        baseline_median_mae: median(&baseline_values),
        cumulative: options
            .thresholds
            .iter()
            .enumerate()
            .map(|(k, &threshold)| CumulativePoint {
                threshold,
                fraction: fractions[k],
                baseline_fraction: baseline_fractions.as_ref().map(|b| b[k]),
            })
            .collect(),
        histogram: histogram(&values, options.bin_width)?,
        systems,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl EvaluationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn systems_csv(&self) -> String {
        let mut s = String::from("system_id,mae,baseline_mae\n");
        for r in &self.systems {
            let _ = writeln!(s, "{},{},{}", r.system_id, r.mae, opt(r.baseline_mae));
        }
        s
    }

    pub fn cumulative_csv(&self) -> String {
        let mut s = String::from("threshold,fraction,baseline_fraction\n");
        for c in &self.cumulative {
            let _ = writeln!(s, "{},{},{}", c.threshold, c.fraction, opt(c.baseline_fraction));
        }
        s
    }

    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("bin_lo,bin_hi,count\n");
        for b in &self.histogram {
            let _ = writeln!(s, "{},{},{}", b.lo, b.hi, b.count);
        }
        s
    }

    /// Writes `report.json`, `systems.csv`, `cumulative.csv` and
    /// `histogram.csv` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in [
            ("report.json", self.to_json()?),
            ("systems.csv", self.systems_csv()),
            ("cumulative.csv", self.cumulative_csv()),
            ("histogram.csv", self.histogram_csv()),
        ] {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

/// Reads a `system_id,mae` CSV of baseline scores.
pub fn load_baseline(path: impl AsRef<Path>) -> Result<BTreeMap<String, f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(["system_id", "mae"]) {
        return Err(Error::parse(path, 1, "expected header system_id,mae"));
    }
    let mut out = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::parse(path, line, e.to_string()))?;
        let mae: f64 = row[1]
            .parse()
            .map_err(|_| Error::parse(path, line, format!("invalid mae '{}'", &row[1])))?;
        if out.insert(row[0].to_string(), mae).is_some() {
            return Err(Error::parse(path, line, format!("duplicate system '{}'", &row[0])));
        }
    }
    Ok(out)
}
