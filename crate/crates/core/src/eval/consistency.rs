use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{GammaRecord, StandardizedComponents};
use crate::error::{Error, Result};
use crate::model::{Composition, Embedding, Evaluator, GeModel, MixtureQuery, Variant};

/// Finite-difference step for every composition-derivative audit.
pub const FD_STEP: f64 = 1e-4;
/// Largest admissible Gibbs-Duhem residual in the certificate.
pub const GD_TOLERANCE: f64 = 1e-6;

/// `f_θ` outputs for a set of components, keyed by SMILES.
#[derive(Debug, Clone, Default)]
pub struct EmbeddedComponents {
    map: HashMap<String, Embedding>,
}

impl EmbeddedComponents {
    pub fn new(ev: &Evaluator, components: &StandardizedComponents) -> Result<Self> {
        let mut map = HashMap::with_capacity(components.len());
        for s in components.smiles() {
            map.insert(s.to_string(), ev.embed_standardized(components.get(s)?)?);
        }
        Ok(EmbeddedComponents { map })
    }

    pub fn get(&self, smiles: &str) -> Result<&Embedding> {
        self.map
            .get(smiles)
            .ok_or_else(|| Error::MissingDescriptors(vec![smiles.to_string()]))
    }
}

/// `x1 D1 + x2 D2` with `D_i` the central difference of `ln γ_i` at `x1`,
/// after clamping `x1` into `[h, 1 - h]`.
pub fn gd_residual_embedded(ev: &Evaluator, e1: &[crate::autodiff::Dual], e2: &[crate::autodiff::Dual], temperature: f64, x1: f64, h: f64) -> Result<f64> {
    let x = x1.clamp(h, 1.0 - h);
    let up = ev.predict_embedded(e1, e2, temperature, Composition::new(x + h))?;
    let dn = ev.predict_embedded(e1, e2, temperature, Composition::new(x - h))?;
    let d1 = (up.ln_gamma1 - dn.ln_gamma1) / (2.0 * h);
    let d2 = (up.ln_gamma2 - dn.ln_gamma2) / (2.0 * h);
    Ok(x * d1 + (1.0 - x) * d2)
}

pub fn gd_residual(model: &GeModel, q: &MixtureQuery, h: f64) -> Result<f64> {
    let ev = model.evaluator();
    let e1 = ev.embed(q.e1)?;
    let e2 = ev.embed(q.e2)?;
    gd_residual_embedded(&ev, &e1, &e2, q.temperature, q.x1(), h)
}

/// Mean squared Gibbs-Duhem residual over `queries`.
pub fn gibbs_duhem_msd(model: &GeModel, queries: &[MixtureQuery], h: f64) -> Result<f64> {
    if queries.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for q in queries {
        let r = gd_residual(model, q, h)?;
        sum += r * r;
    }
    Ok(sum / queries.len() as f64)
}

/// Mean squared Gibbs-Duhem residual at the state points of `records`.
pub fn records_gd_msd(ev: &Evaluator, embedded: &EmbeddedComponents, records: &[&GammaRecord], h: f64) -> Result<f64> {
    if records.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for r in records {
        let res = gd_residual_embedded(
            ev,
            embedded.get(&r.smiles_1)?,
            embedded.get(&r.smiles_2)?,
            r.temperature,
            r.x1,
            h,
        )?;
        sum += res * res;
    }
    Ok(sum / records.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { samples: 1000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub name: String,
    pub passed: bool,
    pub worst_residual: f64,
    /// Zero means the criterion must hold exactly.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub variant: Variant,
    pub samples: usize,
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> impl Iterator<Item = &CriterionResult> {
        self.criteria.iter().filter(|c| !c.passed)
    }
}

#[derive(Default)]
struct Worst {
    value: f64,
    /// Set when a comparison involved NaN or a non-identical bit pattern.
    broken: bool,
}

impl Worst {
    fn zero(&mut self, v: f64) {
        if v != 0.0 {
            self.broken = true;
        }
        self.observe(v.abs());
    }

    fn equal(&mut self, a: f64, b: f64) {
        if a != b {
            self.broken = true;
        }
        self.observe((a - b).abs());
    }

    fn observe(&mut self, v: f64) {
        if v.is_nan() {
            self.broken = true;
            self.value = f64::NAN;
        } else if !self.value.is_nan() {
            self.value = self.value.max(v);
        }
    }

    fn exact(self, name: &str) -> CriterionResult {
        CriterionResult {
            name: name.into(),
            passed: !self.broken,
            worst_residual: self.value,
            tolerance: 0.0,
        }
    }

    fn within(self, name: &str, tolerance: f64) -> CriterionResult {
        CriterionResult {
            name: name.into(),
            passed: !self.broken && self.value < tolerance,
            worst_residual: self.value,
            tolerance,
        }
    }
}

/// Checks pure-component limits, Gibbs-Duhem consistency, pseudo-binary
/// zeros and permutation equivariance at random state points.
///
/// Descriptors are drawn as `mean + std·z` under the model's own
/// standardization, temperatures within two standard deviations of the
/// training mean.
pub fn consistency_certificate(model: &GeModel, spec: &SampleSpec) -> Result<Certificate> {
    if spec.samples == 0 {
        return Err(Error::Invalid("at least one sample is required".into()));
    }
    let ev = model.evaluator();
    let stats = &model.stats;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let z: Vec<f64> = (0..stats.dim()).map(|_| StandardNormal.sample(rng)).collect();
        stats.invert_descriptor(&z).expect("dimension from stats")
    };
    let (mut pure, mut gd, mut pseudo, mut swap) = (Worst::default(), Worst::default(), Worst::default(), Worst::default());
    let h = FD_STEP;

    for _ in 0..spec.samples {
        let raw1 = draw(&mut rng);
        let raw2 = draw(&mut rng);
        let t = (stats.t_mean + stats.t_std * rng.random_range(-2.0..2.0)).max(1.0);
        let x: f64 = rng.random_range(0.0..1.0);
        let e1 = ev.embed(&raw1)?;
        let e2 = ev.embed(&raw2)?;

        let at1 = ev.predict_embedded(&e1, &e2, t, Composition::new(1.0))?;
        let at0 = ev.predict_embedded(&e1, &e2, t, Composition::new(0.0))?;
        pure.zero(at1.ln_gamma1);
        pure.zero(at0.ln_gamma2);

        gd.observe(gd_residual_embedded(&ev, &e1, &e2, t, x.clamp(h, 1.0 - h), h)?.abs());

        let same = ev.predict_embedded(&e1, &e1, t, Composition::new(x))?;
        pseudo.zero(same.ln_gamma1);
        pseudo.zero(same.ln_gamma2);

        let comp = Composition::new(x);
        let a = ev.predict_embedded(&e1, &e2, t, comp)?;
        let b = ev.predict_embedded(&e2, &e1, t, comp.swapped())?;
        swap.equal(a.ln_gamma1, b.ln_gamma2);
        swap.equal(a.ln_gamma2, b.ln_gamma1);
    }

    Ok(Certificate {
        variant: model.variant(),
        samples: spec.samples,
        seed: spec.seed,
        criteria: vec![
            pure.exact("pure_limits"),
            gd.within("gibbs_duhem", GD_TOLERANCE),
            pseudo.exact("pseudo_binary"),
            swap.exact("permutation"),
        ],
    })
}
