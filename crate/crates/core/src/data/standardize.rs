use serde::{Deserialize, Serialize};

use super::GammaRecord;
use crate::descriptors::DescriptorTable;
use crate::error::{Error, Result};

/// Per-feature z-score statistics fitted on the training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub descriptor_mean: Vec<f64>,
    pub descriptor_std: Vec<f64>,
    pub t_mean: f64,
    pub t_std: f64,
    /// Descriptor dimensions whose variance was zero; their std is set to 1.
    #[serde(default)]
    pub clamped_dims: Vec<usize>,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn is_degenerate(std: f64, mean: f64) -> bool {
    !(std > 1e-12 * mean.abs().max(1.0))
}

impl StandardizationStats {
    pub fn identity(dim: usize) -> Self {
        StandardizationStats {
            descriptor_mean: vec![0.0; dim],
            descriptor_std: vec![1.0; dim],
            t_mean: 0.0,
            t_std: 1.0,
            clamped_dims: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.descriptor_mean.len()
    }

    /// Fits statistics over the multiset of component descriptors used by
    /// `train` (both components of every record) and over record
    /// temperatures. Mole fractions are left untouched.
    pub fn fit(train: &[GammaRecord], table: &DescriptorTable) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Invalid("cannot fit standardizer on an empty training set".into()));
        }
        let mut vectors = Vec::with_capacity(2 * train.len());
        let mut missing = Vec::new();
        for r in train {
            for s in [&r.smiles_1, &r.smiles_2] {
                match table.get(s) {
                    Some(d) => vectors.push(d.vector.as_slice()),
                    None => missing.push(s.clone()),
                }
            }
        }
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(Error::MissingDescriptors(missing));
        }

        let dim = table.dim();
        let mut stats = StandardizationStats::identity(dim);
        for k in 0..dim {
            let (mean, std) = mean_std(vectors.iter().map(|v| v[k]));
            stats.descriptor_mean[k] = mean;
            if is_degenerate(std, mean) {
                stats.descriptor_std[k] = 1.0;
                stats.clamped_dims.push(k);
            } else {
                stats.descriptor_std[k] = std;
            }
        }
        if !stats.clamped_dims.is_empty() {
            log::warn!(
                "{} of {dim} descriptor dimensions have zero variance; their std is set to 1",
                stats.clamped_dims.len()
            );
        }

        let (t_mean, t_std) = mean_std(train.iter().map(|r| r.temperature));
        stats.t_mean = t_mean;
        if is_degenerate(t_std, t_mean) {
            log::warn!("training temperatures are constant; T std is set to 1");
            stats.t_std = 1.0;
        } else {
            stats.t_std = t_std;
        }
        Ok(stats)
    }

    pub fn apply_descriptor(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::Shape(format!(
                "descriptor has {} values, statistics have {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(v.iter()
            .zip(&self.descriptor_mean)
            .zip(&self.descriptor_std)
            .map(|((x, m), s)| (x - m) / s)
            .collect())
    }

    pub fn invert_descriptor(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.dim() {
            return Err(Error::Shape(format!(
                "descriptor has {} values, statistics have {}",
                z.len(),
                self.dim()
            )));
        }
        Ok(z.iter()
            .zip(&self.descriptor_mean)
            .zip(&self.descriptor_std)
            .map(|((x, m), s)| x * s + m)
            .collect())
    }

    pub fn apply_temperature(&self, t: f64) -> f64 {
        (t - self.t_mean) / self.t_std
    }

    pub fn invert_temperature(&self, t_star: f64) -> f64 {
        t_star * self.t_std + self.t_mean
    }

    pub fn validate(&self) -> Result<()> {
        if self.descriptor_std.len() != self.descriptor_mean.len() {
            return Err(Error::Shape("mean and std lengths differ".into()));
        }
        let all = self
            .descriptor_mean
            .iter()
            .chain(&self.descriptor_std)
            .chain([&self.t_mean, &self.t_std]);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite standardization statistic".into()));
        }
        if self.descriptor_std.iter().chain([&self.t_std]).any(|s| *s <= 0.0) {
            return Err(Error::Invalid("standard deviations must be positive".into()));
        }
        Ok(())
    }
}
