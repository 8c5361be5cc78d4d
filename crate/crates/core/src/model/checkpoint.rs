use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ArchitectureConfig, GeModel, Layout, ModelParameters};
use crate::data::StandardizationStats;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// One dense layer, weights row-major `(rows = out, cols = in)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Where the descriptors the model was trained on came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorSource {
    /// `featurizer` for the built-in hashed features, otherwise the file tag.
    pub kind: String,
    pub dim: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl DescriptorSource {
    pub fn is_featurizer(&self) -> bool {
        self.kind == crate::descriptors::FEATURIZER_SOURCE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_val_loss: Option<f64>,
    #[serde(default)]
    pub settings: BTreeMap<String, String>,
}

/// Serialized model. Floats are written in shortest round-trip form, so a
/// save/load cycle reproduces every weight bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCheckpoint {
    pub format_version: u32,
    pub architecture: ArchitectureConfig,
    pub standardization: StandardizationStats,
    pub layers: Vec<LayerRecord>,
    pub seed: u64,
    pub descriptor_source: DescriptorSource,
    #[serde(default)]
    pub training: Option<TrainingMetadata>,
}

impl ModelCheckpoint {
    pub fn from_model(model: &GeModel, seed: u64, descriptor_source: DescriptorSource) -> Self {
        let layers = model
            .layout
            .layers()
            .map(|l| LayerRecord {
                name: l.name.clone(),
                rows: l.rows,
                cols: l.cols,
                weights: model.params.values[l.weights()].to_vec(),
                bias: model.params.values[l.bias()].to_vec(),
            })
            .collect();
        ModelCheckpoint {
            format_version: FORMAT_VERSION,
            architecture: model.config.clone(),
            standardization: model.stats.clone(),
            layers,
            seed,
            descriptor_source,
            training: None,
        }
    }

    pub fn to_model(&self) -> Result<GeModel> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        self.architecture.validate()?;
        let layout = Layout::new(&self.architecture);
        let expected: Vec<_> = layout.layers().collect();
        if expected.len() != self.layers.len() {
            return Err(Error::Checkpoint(format!(
                "{} layers stored, architecture has {}",
                self.layers.len(),
                expected.len()
            )));
        }
        let mut values = vec![0.0; layout.n_params];
        for (want, got) in expected.iter().zip(&self.layers) {
            if want.name != got.name
                || want.rows != got.rows
                || want.cols != got.cols
                || got.weights.len() != got.rows * got.cols
                || got.bias.len() != got.rows
            {
                return Err(Error::Checkpoint(format!(
                    "layer {} has shape {}x{}, expected {} {}x{}",
                    got.name, got.rows, got.cols, want.name, want.rows, want.cols
                )));
            }
            if got.weights.iter().chain(&got.bias).any(|v| !v.is_finite()) {
                return Err(Error::Checkpoint(format!("layer {} has non-finite values", got.name)));
            }
            values[want.weights()].copy_from_slice(&got.weights);
            values[want.bias()].copy_from_slice(&got.bias);
        }
        GeModel::new(
            self.architecture.clone(),
            ModelParameters { values },
            self.standardization.clone(),
        )
        .map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses and validates; a checkpoint that does not rebuild into a model
    /// is rejected here rather than at first use.
    pub fn from_json(text: &str) -> Result<Self> {
        let ckpt: ModelCheckpoint =
            serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        ckpt.to_model()?;
        Ok(ckpt)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variant;

    fn ckpt() -> ModelCheckpoint {
        let mut stats = StandardizationStats::identity(4);
        stats.descriptor_mean = vec![0.1, -0.2, 1.0 / 3.0, 7.0];
        stats.t_mean = 310.25;
        stats.t_std = 21.0;
        let m = GeModel::random(ArchitectureConfig::new(4, 3, Variant::Hanna), stats, 9).unwrap();
        ModelCheckpoint::from_model(
            &m,
            9,
            DescriptorSource {
                kind: "featurizer".into(),
                dim: 4,
                seed: Some(5),
            },
        )
    }

    #[test]
    fn json_round_trip_is_exact() {
        let c = ckpt();
        let back = ModelCheckpoint::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_model().unwrap().params, c.to_model().unwrap().params);
    }

    #[test]
    fn nan_weight_fails_to_load() {
        let mut c = ckpt();
        c.layers[1].weights[0] = f64::NAN;
        // serde_json writes NaN as null
        let text = c.to_json().unwrap();
        assert!(matches!(ModelCheckpoint::from_json(&text), Err(Error::Checkpoint(_))));
        assert!(c.to_model().is_err());
    }

    #[test]
    fn shape_mismatch_fails() {
        let mut c = ckpt();
        c.layers[0].bias.pop();
        assert!(c.to_model().is_err());
        let mut c = ckpt();
        c.architecture.hidden = 4;
        assert!(c.to_model().is_err());
        let mut c = ckpt();
        c.format_version = 99;
        assert!(c.to_model().is_err());
    }
}
