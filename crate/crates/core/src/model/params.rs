use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ArchitectureConfig;
use crate::error::{Error, Result};

/// Position of one dense layer inside the flat parameter vector.
/// Weights are row-major `(rows = out, cols = in)` followed by the bias.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseLayout {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl DenseLayout {
    pub fn weights(&self) -> Range<usize> {
        self.offset..self.offset + self.rows * self.cols
    }

    pub fn bias(&self) -> Range<usize> {
        let start = self.offset + self.rows * self.cols;
        start..start + self.rows
    }

    pub fn len(&self) -> usize {
        self.rows * (self.cols + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub theta: Vec<DenseLayout>,
    pub alpha: Vec<DenseLayout>,
    pub phi: Vec<DenseLayout>,
    pub n_params: usize,
}

impl Layout {
    pub fn new(config: &ArchitectureConfig) -> Self {
        let mut offset = 0;
        let [theta, alpha, phi] = config.widths();
        let mut build = |prefix: &str, widths: &[usize]| -> Vec<DenseLayout> {
            widths
                .windows(2)
                .enumerate()
                .map(|(k, w)| {
                    let l = DenseLayout {
                        name: format!("{prefix}.{k}"),
                        rows: w[1],
                        cols: w[0],
                        offset,
                    };
                    offset += l.len();
                    l
                })
                .collect()
        };
        let theta = build("theta", &theta);
        let alpha = build("alpha", &alpha);
        let phi = build("phi", &phi);
        Layout {
            theta,
            alpha,
            phi,
            n_params: offset,
        }
    }

    pub fn layers(&self) -> impl Iterator<Item = &DenseLayout> {
        self.theta.iter().chain(&self.alpha).chain(&self.phi)
    }
}

/// All trainable weights in one flat vector, addressed through [`Layout`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameters {
    pub values: Vec<f64>,
}

impl ModelParameters {
    /// Uniform in `±1/√fan_in` for weights and biases.
    pub fn init(layout: &Layout, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = vec![0.0; layout.n_params];
        for l in layout.layers() {
            let bound = 1.0 / (l.cols as f64).sqrt();
            for v in &mut values[l.offset..l.offset + l.len()] {
                *v = rng.random_range(-bound..bound);
            }
        }
        ModelParameters { values }
    }

    pub fn zeros(layout: &Layout) -> Self {
        ModelParameters {
            values: vec![0.0; layout.n_params],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn validate(&self, layout: &Layout) -> Result<()> {
        if self.values.len() != layout.n_params {
            return Err(Error::Shape(format!(
                "{} parameters given, layout needs {}",
                self.values.len(),
                layout.n_params
            )));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("parameter {i} is not finite")));
        }
        Ok(())
    }
}
