use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pressure::{Pressure, PressureUnit};
use crate::error::{Error, Result};

pub const ANTOINE_HEADER: [&str; 7] = ["smiles", "A", "B", "C", "Tmin_K", "Tmax_K", "unit"];

/// `log10(pS / unit) = A - B / (C + T)` with `T` in K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntoineParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub unit: PressureUnit,
}

impl AntoineParams {
    pub fn validate(&self) -> Result<()> {
        if ![self.a, self.b, self.c, self.t_min, self.t_max].iter().all(|v| v.is_finite()) {
            return Err(Error::Invalid("Antoine parameters must be finite".into()));
        }
        if !(self.t_min > 0.0 && self.t_min <= self.t_max) {
            return Err(Error::Invalid(format!(
                "invalid Antoine range [{}, {}] K",
                self.t_min, self.t_max
            )));
        }
        if (self.t_min..=self.t_max).contains(&-self.c) {
            return Err(Error::Invalid(format!(
                "C + T vanishes inside [{}, {}] K",
                self.t_min, self.t_max
            )));
        }
        Ok(())
    }

    /// Vapor pressure at `t` in the declared unit. Temperatures outside the
    /// fitted range are evaluated with a warning.
    pub fn pressure(&self, t: f64) -> Result<Pressure> {
        let den = self.c + t;
        if den == 0.0 {
            return Err(Error::Domain(format!("C + T = 0 at T = {t} K")));
        }
        if !(self.t_min..=self.t_max).contains(&t) {
            log::warn!(
                "T = {t} K outside Antoine range [{}, {}] K",
                self.t_min,
                self.t_max
            );
        }
        Ok(Pressure::new(10f64.powf(self.a - self.b / den), self.unit))
    }
}

pub fn antoine_pressure(params: &AntoineParams, t: f64) -> Result<Pressure> {
    params.pressure(t)
}

/// Reads `smiles,A,B,C,Tmin_K,Tmax_K,unit`.
pub fn load_antoine(path: impl AsRef<Path>) -> Result<BTreeMap<String, AntoineParams>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_antoine(&text, path)
}

pub fn parse_antoine(text: &str, origin: &Path) -> Result<BTreeMap<String, AntoineParams>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(ANTOINE_HEADER.iter().copied()) {
        return Err(Error::parse(
            origin,
            1,
            format!("expected header {}", ANTOINE_HEADER.join(",")),
        ));
    }
    let mut out = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::parse(origin, line, e.to_string()))?;
        let num = |k: usize| -> Result<f64> {
            row[k]
                .parse::<f64>()
                .map_err(|_| Error::parse(origin, line, format!("bad {} value '{}'", ANTOINE_HEADER[k], &row[k])))
        };
        let params = AntoineParams {
            a: num(1)?,
            b: num(2)?,
            c: num(3)?,
            t_min: num(4)?,
            t_max: num(5)?,
            unit: row[6].parse().map_err(|e: Error| Error::parse(origin, line, e.to_string()))?,
        };
        params
            .validate()
            .map_err(|e| Error::parse(origin, line, e.to_string()))?;
        if out.insert(row[0].to_string(), params).is_some() {
            return Err(Error::parse(origin, line, format!("duplicate SMILES '{}'", &row[0])));
        }
    }
    Ok(out)
}

pub fn antoine_to_csv(table: &BTreeMap<String, AntoineParams>) -> String {
    let mut s = ANTOINE_HEADER.join(",");
    s.push('\n');
    for (smiles, p) in table {
        s.push_str(&format!(
            "{smiles},{:?},{:?},{:?},{:?},{:?},{}\n",
            p.a, p.b, p.c, p.t_min, p.t_max, p.unit
        ));
    }
    s
}
