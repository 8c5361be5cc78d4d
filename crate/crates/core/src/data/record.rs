use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DATASET_HEADER: [&str; 8] = [
    "system_id",
    "smiles_1",
    "smiles_2",
    "T_K",
    "x1",
    "ln_gamma_1",
    "ln_gamma_2",
    "source",
];

/// Optional trailing column with the total pressure of VLE-derived points.
pub const PRESSURE_COLUMN: &str = "p_bar";

/// Points measured above this total pressure are dropped on ingestion.
pub const MAX_PRESSURE_BAR: f64 = 10.0;

/// Unordered pair key: the two SMILES sorted lexicographically and joined by `|`.
pub fn system_id(a: &str, b: &str) -> String {
    if a <= b {
        format!("{a}|{b}")
    } else {
        format!("{b}|{a}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRecord {
    pub system_id: String,
    pub smiles_1: String,
    pub smiles_2: String,
    /// Temperature in K.
    pub temperature: f64,
    pub x1: f64,
    pub ln_gamma1: Option<f64>,
    pub ln_gamma2: Option<f64>,
    pub source: String,
}

impl GammaRecord {
    pub fn new(
        smiles_1: impl Into<String>,
        smiles_2: impl Into<String>,
        temperature: f64,
        x1: f64,
        ln_gamma1: Option<f64>,
        ln_gamma2: Option<f64>,
        source: impl Into<String>,
    ) -> Self {
        let (smiles_1, smiles_2) = (smiles_1.into(), smiles_2.into());
        GammaRecord {
            system_id: system_id(&smiles_1, &smiles_2),
            smiles_1,
            smiles_2,
            temperature,
            x1,
            ln_gamma1,
            ln_gamma2,
            source: source.into(),
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.ln_gamma1.is_none() && self.ln_gamma2.is_none() {
            return Err("no activity coefficient given".into());
        }
        if !(0.0..=1.0).contains(&self.x1) {
            return Err(format!("x1 = {} outside [0, 1]", self.x1));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(format!("temperature {} K is not positive", self.temperature));
        }
        for g in [self.ln_gamma1, self.ln_gamma2].into_iter().flatten() {
            if !g.is_finite() {
                return Err(format!("non-finite ln gamma {g}"));
            }
        }
        let expected = system_id(&self.smiles_1, &self.smiles_2);
        if self.system_id != expected {
            return Err(format!("system_id '{}' should be '{expected}'", self.system_id));
        }
        Ok(())
    }

    /// Number of available `ln γ` targets (1 or 2 for a valid record).
    pub fn n_targets(&self) -> usize {
        usize::from(self.ln_gamma1.is_some()) + usize::from(self.ln_gamma2.is_some())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestReport {
    pub records: Vec<GammaRecord>,
    pub rejected: Vec<Rejection>,
    pub dropped_high_pressure: usize,
}

fn opt_f64(cell: &str, path: &Path, line: usize, column: &str) -> Result<Option<f64>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::parse(path, line, format!("invalid {column} '{cell}'")))
}

/// Reads a dataset CSV.
///
/// Rows that parse but violate a record invariant are collected in
/// [`IngestReport::rejected`]; rows that cannot be parsed abort with an error.
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<IngestReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ingest_str(&text, path)
}

pub fn ingest_str(text: &str, origin: &Path) -> Result<IngestReport> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    if names.len() < DATASET_HEADER.len() || names[..DATASET_HEADER.len()] != DATASET_HEADER {
        return Err(Error::parse(
            origin,
            1,
            format!("header must be '{}'", DATASET_HEADER.join(",")),
        ));
    }
    let has_pressure = match &names[DATASET_HEADER.len()..] {
        [] => false,
        [p] if *p == PRESSURE_COLUMN => true,
        extra => {
            return Err(Error::parse(origin, 1, format!("unexpected columns {extra:?}")));
        }
    };
    let width = names.len();

    let mut report = IngestReport::default();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        if row.len() != width {
            return Err(Error::parse(
                origin,
                line,
                format!("expected {width} columns, found {}", row.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            opt_f64(&row[i], origin, line, DATASET_HEADER[i])?
                .ok_or_else(|| Error::parse(origin, line, format!("missing {}", DATASET_HEADER[i])))
        };
        let record = GammaRecord {
            system_id: row[0].trim().to_string(),
            smiles_1: row[1].trim().to_string(),
            smiles_2: row[2].trim().to_string(),
            temperature: num(3)?,
            x1: num(4)?,
            ln_gamma1: opt_f64(&row[5], origin, line, "ln_gamma_1")?,
            ln_gamma2: opt_f64(&row[6], origin, line, "ln_gamma_2")?,
            source: row[7].trim().to_string(),
        };
        if has_pressure {
            if let Some(p) = opt_f64(&row[8], origin, line, PRESSURE_COLUMN)? {
                if p > MAX_PRESSURE_BAR {
                    report.dropped_high_pressure += 1;
                    continue;
                }
            }
        }
        match record.validate() {
            Ok(()) => report.records.push(record),
            Err(reason) => report.rejected.push(Rejection { line, reason }),
        }
    }
    Ok(report)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn records_to_csv(records: &[GammaRecord]) -> String {
    let mut out = DATASET_HEADER.join(",");
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{:?},{:?},{},{},{}",
            r.system_id,
            r.smiles_1,
            r.smiles_2,
            r.temperature,
            r.x1,
            fmt_opt(r.ln_gamma1),
            fmt_opt(r.ln_gamma2),
            r.source
        );
    }
    out
}

pub fn write_records(path: impl AsRef<Path>, records: &[GammaRecord]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, records_to_csv(records)).map_err(|e| Error::io(path, e))
}
