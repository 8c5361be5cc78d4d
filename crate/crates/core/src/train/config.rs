use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ArchitectureConfig, Variant};

/// Optimizer, schedule and architecture settings for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr0: f64,
    pub lr_decay_factor: f64,
    /// Epochs without validation improvement before the LR is decayed.
    pub lr_patience: usize,
    /// Epochs without validation improvement before training stops.
    pub early_stop_patience: usize,
    pub batch_size: usize,
    pub smoothl1_beta: f64,
    /// Coupled L2 penalty added to the gradient.
    pub weight_decay: f64,
    pub max_epochs: usize,
    pub seed: u64,
    pub hidden: usize,
    pub variant: Variant,
    /// Records per split used for the per-epoch Gibbs-Duhem audit.
    pub gd_audit_points: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr0: 5e-4,
            lr_decay_factor: 0.1,
            lr_patience: 10,
            early_stop_patience: 30,
            batch_size: 512,
            smoothl1_beta: 0.25,
            weight_decay: 1e-6,
            max_epochs: 1000,
            seed: 0,
            hidden: 96,
            variant: Variant::Hanna,
            gd_audit_points: 1024,
        }
    }
}

const KEYS: [&str; 12] = [
    "lr0",
    "lr_decay_factor",
    "lr_patience",
    "early_stop_patience",
    "batch_size",
    "smoothl1_beta",
    "weight_decay",
    "max_epochs",
    "seed",
    "hidden",
    "variant",
    "gd_audit_points",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Invalid(format!("invalid value '{value}' for {key}")))
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lr0", self.lr0),
            ("lr_decay_factor", self.lr_decay_factor),
            ("smoothl1_beta", self.smoothl1_beta),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("{k} must be positive, got {v}")));
            }
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::Invalid(format!("weight_decay must be non-negative, got {}", self.weight_decay)));
        }
        if self.lr_decay_factor >= 1.0 {
            return Err(Error::Invalid("lr_decay_factor must be below 1".into()));
        }
        for (k, v) in [
            ("lr_patience", self.lr_patience),
            ("early_stop_patience", self.early_stop_patience),
            ("batch_size", self.batch_size),
            ("hidden", self.hidden),
        ] {
            if v == 0 {
                return Err(Error::Invalid(format!("{k} must be positive")));
            }
        }
        Ok(())
    }

    pub fn architecture(&self, descriptor_dim: usize) -> ArchitectureConfig {
        ArchitectureConfig::new(descriptor_dim, self.hidden, self.variant)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "lr0" => self.lr0 = parse(key, value)?,
            "lr_decay_factor" => self.lr_decay_factor = parse(key, value)?,
            "lr_patience" => self.lr_patience = parse(key, value)?,
            "early_stop_patience" => self.early_stop_patience = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "smoothl1_beta" => self.smoothl1_beta = parse(key, value)?,
            "weight_decay" => self.weight_decay = parse(key, value)?,
            "max_epochs" => self.max_epochs = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "hidden" => self.hidden = parse(key, value)?,
            "variant" => self.variant = value.parse()?,
            "gd_audit_points" => self.gd_audit_points = parse(key, value)?,
            other => {
                return Err(Error::Invalid(format!(
                    "unknown setting '{other}' (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies `key=value` lines over the current values. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn apply_kv(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, i + 1, "expected key=value"))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::parse(origin, i + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut c = TrainConfig::default();
        c.apply_kv(&text, path)?;
        c.validate()?;
        Ok(c)
    }

    pub fn settings(&self) -> BTreeMap<String, String> {
        let values = [
            self.lr0.to_string(),
            self.lr_decay_factor.to_string(),
            self.lr_patience.to_string(),
            self.early_stop_patience.to_string(),
            self.batch_size.to_string(),
            self.smoothl1_beta.to_string(),
            self.weight_decay.to_string(),
            self.max_epochs.to_string(),
            self.seed.to_string(),
            self.hidden.to_string(),
            self.variant.to_string(),
            self.gd_audit_points.to_string(),
        ];
        KEYS.iter().map(|k| k.to_string()).zip(values).collect()
    }

    pub fn to_kv(&self) -> String {
        let settings = self.settings();
        let mut s = String::new();
        for k in KEYS {
            let _ = writeln!(s, "{k}={}", settings[k]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = TrainConfig::default();
        assert_eq!(c.lr0, 0.0005);
        assert_eq!(c.batch_size, 512);
        assert_eq!(c.smoothl1_beta, 0.25);
        assert_eq!(c.weight_decay, 1e-6);
        assert_eq!(c.hidden, 96);
        assert_eq!((c.lr_patience, c.early_stop_patience), (10, 30));
        c.validate().unwrap();
    }

    #[test]
    fn kv_round_trip() {
        let mut c = TrainConfig::default();
        c.apply_kv("# tuned\nlr0 = 0.002\nbatch_size=64\n\nvariant=ablation1\n", Path::new("c")).unwrap();
        assert_eq!((c.lr0, c.batch_size, c.variant), (0.002, 64, Variant::Ablation1));
        let mut d = TrainConfig::default();
        d.apply_kv(&c.to_kv(), Path::new("d")).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn kv_errors() {
        let mut c = TrainConfig::default();
        assert!(matches!(c.apply_kv("lr0=1\nnope=3\n", Path::new("c")), Err(Error::Parse { line: 2, .. })));
        assert!(c.apply_kv("batch_size=-1", Path::new("c")).is_err());
        assert!(c.apply_kv("just words", Path::new("c")).is_err());
        c.lr0 = 0.0;
        assert!(c.validate().is_err());
    }
}
