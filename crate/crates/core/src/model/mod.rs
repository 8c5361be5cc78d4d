//! The hard-constraint excess Gibbs energy network and its ablations.
//!
//! For the constrained variant the prediction is
//!
//! ```text
//! gᴱ/RT = f_φ(f_α(C1) + f_α(C2)) · x1 · x2 · (1 - cos(f_θ(E1), f_θ(E2)))
//! C_i   = [f_θ(E_i), T*, x_i]
//! ln γ1 = gᴱ/RT + x2 ∂(gᴱ/RT)/∂x1
//! ln γ2 = gᴱ/RT - x1 ∂(gᴱ/RT)/∂x1
//! ```
//!
//! which vanishes for pure components and for identical components, is
//! symmetric under component exchange and satisfies Gibbs-Duhem for every
//! parameter setting.

mod checkpoint;
mod config;
pub mod network;
mod params;

pub use checkpoint::{DescriptorSource, LayerRecord, ModelCheckpoint, TrainingMetadata, FORMAT_VERSION};
pub use config::{Activation, ArchitectureConfig, Variant};
pub use network::Composition;
pub use params::{DenseLayout, Layout, ModelParameters};

use serde::{Deserialize, Serialize};

use crate::autodiff::{Dual, Eager};
use crate::data::StandardizationStats;
use crate::error::{Error, Result};

/// One state point: two raw (unstandardized) descriptors, `T` in K and the
/// composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureQuery<'a> {
    pub e1: &'a [f64],
    pub e2: &'a [f64],
    pub temperature: f64,
    pub comp: Composition,
}

impl<'a> MixtureQuery<'a> {
    pub fn new(e1: &'a [f64], e2: &'a [f64], temperature: f64, x1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x1) {
            return Err(Error::Invalid(format!("x1 = {x1} outside [0, 1]")));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::Invalid(format!("temperature {temperature} K is not positive")));
        }
        if e1.len() != e2.len() {
            return Err(Error::Shape(format!(
                "descriptor lengths differ: {} vs {}",
                e1.len(),
                e2.len()
            )));
        }
        Ok(MixtureQuery {
            e1,
            e2,
            temperature,
            comp: Composition::new(x1),
        })
    }

    pub fn x1(&self) -> f64 {
        self.comp.x1
    }

    pub fn x2(&self) -> f64 {
        self.comp.x2
    }

    /// The same mixture with component order exchanged.
    pub fn swapped(&self) -> Self {
        MixtureQuery {
            e1: self.e2,
            e2: self.e1,
            temperature: self.temperature,
            comp: self.comp.swapped(),
        }
    }

    /// Same components and temperature at another composition.
    pub fn at(&self, x1: f64) -> Result<Self> {
        MixtureQuery::new(self.e1, self.e2, self.temperature, x1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrediction {
    pub ln_gamma1: f64,
    pub ln_gamma2: f64,
    pub ge_over_rt: f64,
}

/// Cosine distance `1 - a·b/(‖a‖‖b‖)` of two plain vectors.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    let a: Vec<Dual> = a.iter().map(|&v| Dual::constant(v)).collect();
    let b: Vec<Dual> = b.iter().map(|&v| Dual::constant(v)).collect();
    Ok(network::cosine_distance(&mut Eager, &a, &b)?.value)
}

/// Network, parameters and the standardization it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct GeModel {
    pub config: ArchitectureConfig,
    pub layout: Layout,
    pub params: ModelParameters,
    pub stats: StandardizationStats,
}

impl GeModel {
    pub fn new(config: ArchitectureConfig, params: ModelParameters, stats: StandardizationStats) -> Result<Self> {
        config.validate()?;
        let layout = Layout::new(&config);
        params.validate(&layout)?;
        stats.validate()?;
        if stats.dim() != config.descriptor_dim {
            return Err(Error::Shape(format!(
                "standardization has {} dims, architecture expects {}",
                stats.dim(),
                config.descriptor_dim
            )));
        }
        Ok(GeModel {
            config,
            layout,
            params,
            stats,
        })
    }

    /// Freshly initialized weights (uniform `±1/√fan_in`).
    pub fn random(config: ArchitectureConfig, stats: StandardizationStats, seed: u64) -> Result<Self> {
        config.validate()?;
        let params = ModelParameters::init(&Layout::new(&config), seed);
        Self::new(config, params, stats)
    }

    pub fn variant(&self) -> Variant {
        self.config.variant
    }

    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator {
            model: self,
            bound: network::bind(&mut Eager, &self.params.values),
        }
    }

    /// `f_θ` of a descriptor that is already standardized.
    pub fn embed_standardized(&self, standardized: &[f64]) -> Result<Vec<f64>> {
        let e = self.evaluator();
        Ok(e.embed_standardized(standardized)?.iter().map(|d| d.value).collect())
    }

    /// `f_θ` of a raw descriptor.
    pub fn embed_component(&self, raw: &[f64]) -> Result<Vec<f64>> {
        self.embed_standardized(&self.stats.apply_descriptor(raw)?)
    }

    /// `gᴱ/RT` with its exact composition derivative. Constrained variant only.
    pub fn forward_ge(&self, q: &MixtureQuery) -> Result<Dual> {
        self.evaluator().forward_ge(q)
    }

    pub fn predict(&self, q: &MixtureQuery) -> Result<GammaPrediction> {
        self.evaluator().predict(q)
    }
}

/// Component embedding on the eager graph; `dx1` of every entry is zero.
pub type Embedding = Vec<Dual>;

/// Parameters bound once for repeated inference.
#[derive(Debug, Clone)]
pub struct Evaluator<'m> {
    model: &'m GeModel,
    bound: Vec<Dual>,
}

impl Evaluator<'_> {
    pub fn model(&self) -> &GeModel {
        self.model
    }

    pub fn embed_standardized(&self, standardized: &[f64]) -> Result<Embedding> {
        if standardized.len() != self.model.config.descriptor_dim {
            return Err(Error::Shape(format!(
                "descriptor has {} values, model expects {}",
                standardized.len(),
                self.model.config.descriptor_dim
            )));
        }
        network::embed(&mut Eager, &self.bound, &self.model.layout, standardized)
    }

    pub fn embed(&self, raw: &[f64]) -> Result<Embedding> {
        self.embed_standardized(&self.model.stats.apply_descriptor(raw)?)
    }

    fn outputs(&self, emb1: &[Dual], emb2: &[Dual], temperature: f64, comp: Composition) -> Result<network::Outputs<Dual>> {
        let t_star = self.model.stats.apply_temperature(temperature);
        network::mixture(
            &mut Eager,
            &self.bound,
            &self.model.layout,
            self.model.config.variant,
            emb1,
            emb2,
            t_star,
            comp,
        )
    }

    pub fn predict_embedded(&self, emb1: &[Dual], emb2: &[Dual], temperature: f64, comp: Composition) -> Result<GammaPrediction> {
        let o = self.outputs(emb1, emb2, temperature, comp)?;
        Ok(GammaPrediction {
            ln_gamma1: o.ln_gamma1.value,
            ln_gamma2: o.ln_gamma2.value,
            ge_over_rt: o.ge_over_rt.value,
        })
    }

    pub fn forward_ge_embedded(&self, emb1: &[Dual], emb2: &[Dual], temperature: f64, comp: Composition) -> Result<Dual> {
        if !self.model.config.variant.is_constrained() {
            return Err(Error::Invalid(format!(
                "variant {} does not model gE directly",
                self.model.config.variant
            )));
        }
        Ok(self.outputs(emb1, emb2, temperature, comp)?.ge_over_rt)
    }

    pub fn predict(&self, q: &MixtureQuery) -> Result<GammaPrediction> {
        let e1 = self.embed(q.e1)?;
        let e2 = self.embed(q.e2)?;
        self.predict_embedded(&e1, &e2, q.temperature, q.comp)
    }

    pub fn forward_ge(&self, q: &MixtureQuery) -> Result<Dual> {
        let e1 = self.embed(q.e1)?;
        let e2 = self.embed(q.e2)?;
        self.forward_ge_embedded(&e1, &e2, q.temperature, q.comp)
    }
}
