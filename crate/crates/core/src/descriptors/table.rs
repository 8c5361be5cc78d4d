use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::ComponentDescriptor;
use crate::error::{Error, Result};

/// SMILES-keyed descriptor vectors sharing one dimension.
///
/// Keys are the SMILES text exactly as written; no canonicalization.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorTable {
    dim: usize,
    pub source: String,
    pub seed: Option<u64>,
    entries: Vec<ComponentDescriptor>,
    index: HashMap<String, usize>,
}

/// Non-fatal findings from [`DescriptorTable::load_with_report`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    pub warnings: Vec<String>,
}

impl DescriptorTable {
    pub fn new(dim: usize, source: impl Into<String>, seed: Option<u64>) -> Self {
        DescriptorTable {
            dim,
            source: source.into(),
            seed,
            entries: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, smiles: &str) -> Option<&ComponentDescriptor> {
        self.index.get(smiles).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, smiles: &str) -> bool {
        self.index.contains_key(smiles)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComponentDescriptor> {
        self.entries.iter()
    }

    pub fn insert(&mut self, d: ComponentDescriptor) -> Result<()> {
        if d.vector.len() != self.dim {
            return Err(Error::Shape(format!(
                "descriptor for {} has {} values, table dimension is {}",
                d.smiles,
                d.vector.len(),
                self.dim
            )));
        }
        if let Some(bad) = d.vector.iter().find(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("non-finite value {bad} in descriptor for {}", d.smiles)));
        }
        if self.index.contains_key(&d.smiles) {
            return Err(Error::Invalid(format!("duplicate descriptor key {}", d.smiles)));
        }
        self.index.insert(d.smiles.clone(), self.entries.len());
        self.entries.push(d);
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::load_with_report(path).map(|(t, _)| t)
    }

    pub fn load_with_report(path: impl AsRef<Path>) -> Result<(Self, LoadReport)> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses the CSV text; `origin` is only used in error messages.
    pub fn parse(text: &str, origin: &Path) -> Result<(Self, LoadReport)> {
        let mut report = LoadReport::default();
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(origin, 1, "missing header"))?;

        let mut fields = header.split(',');
        if fields.next() != Some("smiles") {
            return Err(Error::parse(origin, 1, "header must start with 'smiles'"));
        }
        let (mut dim, mut source, mut seed) = (None, None, None);
        for f in fields {
            let (key, value) = f
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, 1, format!("header field '{f}' is not key=value")))?;
            match key {
                "dim" => {
                    dim = Some(value.parse::<usize>().map_err(|_| {
                        Error::parse(origin, 1, format!("invalid dim '{value}'"))
                    })?)
                }
                "source" => source = Some(value.to_string()),
                "seed" => {
                    seed = Some(value.parse::<u64>().map_err(|_| {
                        Error::parse(origin, 1, format!("invalid seed '{value}'"))
                    })?)
                }
                other => report.warnings.push(format!("unknown header field '{other}'")),
            }
        }
        let dim = dim.ok_or_else(|| Error::parse(origin, 1, "header does not declare dim"))?;
        if dim == 0 {
            return Err(Error::parse(origin, 1, "dim must be positive"));
        }
        if source.is_none() {
            report.warnings.push("header does not declare a source tag".into());
        }
        if seed.is_none() {
            report.warnings.push("header does not declare a seed".into());
        }

        let mut table = DescriptorTable::new(dim, source.unwrap_or_default(), seed);
        for (line_no, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let smiles = parts.next().unwrap_or_default();
            if smiles.is_empty() {
                return Err(Error::parse(origin, line_no, "empty SMILES key"));
            }
            let vector = parts
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(origin, line_no, format!("invalid number '{p}'")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if vector.len() != dim {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("expected {dim} values, found {}", vector.len()),
                ));
            }
            if vector.iter().all(|v| *v == 0.0) {
                report.warnings.push(format!("line {line_no}: all-zero descriptor for {smiles}"));
            }
            table
                .insert(ComponentDescriptor {
                    smiles: smiles.to_string(),
                    vector,
                })
                .map_err(|e| Error::parse(origin, line_no, e.to_string()))?;
        }
        Ok((table, report))
    }

    /// Header plus one row per descriptor, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = format!("smiles,dim={},source={}", self.dim, self.source);
        if let Some(seed) = self.seed {
            let _ = write!(out, ",seed={seed}");
        }
        out.push('\n');
        for d in &self.entries {
            out.push_str(&d.smiles);
            for v in &d.vector {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}
