//! Synthetic activity-coefficient data from analytic oracles.
//!
//! Each component gets two latent scalars from fixed random projections of
//! its descriptor, `u = tanh(√D r_u·ê)` and `v = tanh(√D r_v·ê)` with `ê`
//! the unit-normalized descriptor. A pair is then assigned
//!
//! ```text
//! Margules  A12 = [(u1 - u2)²/2 - (v1 - v2)²/2] · T0/T
//! NRTL      τ12 = [(u1 - u2)²/2 + (v1 - v2)/2] · T0/T
//!           τ21 = [(u1 - u2)²/2 - (v1 - v2)/2] · T0/T,   α = 0.3
//! ```
//!
//! with `T0 = 298.15 K`. Both rules give zero for identical components and
//! swap consistently with the component order. The `mixed` oracle picks
//! NRTL when `tanh(√D r_m·(ê1 + ê2)/‖ê1 + ê2‖) > 0` and Margules otherwise.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ReferenceGeModel;
use crate::data::GammaRecord;
use crate::descriptors::{featurize_all, DescriptorTable, DEFAULT_FEATURE_SEED, SMALL_MOLECULES};
use crate::error::{Error, Result};

/// Seed of the projection directions; part of the oracle definition.
pub const ORACLE_SEED: u64 = 0x05ee_d0f0_ac1e;
pub const REFERENCE_TEMPERATURE: f64 = 298.15;
pub const NRTL_ALPHA: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Margules,
    Nrtl,
    #[default]
    Mixed,
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleKind::Margules => "margules",
            OracleKind::Nrtl => "nrtl",
            OracleKind::Mixed => "mixed",
        })
    }
}

impl FromStr for OracleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "margules" => Ok(OracleKind::Margules),
            "nrtl" => Ok(OracleKind::Nrtl),
            "mixed" => Ok(OracleKind::Mixed),
            other => Err(Error::Invalid(format!("unknown oracle '{other}'"))),
        }
    }
}

/// Maps a pair of descriptors and a temperature to a reference model.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticOracle {
    kind: OracleKind,
    dim: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    m: Vec<f64>,
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let r: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    r.into_iter().map(|x| x / n).collect()
}

impl SyntheticOracle {
    pub fn new(kind: OracleKind, dim: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
        let u = unit_direction(&mut rng, dim);
        let v = unit_direction(&mut rng, dim);
        let m = unit_direction(&mut rng, dim);
        SyntheticOracle { kind, dim, u, v, m }
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    fn latent(&self, dir: &[f64], e: &[f64]) -> f64 {
        let n = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return 0.0;
        }
        let dot: f64 = dir.iter().zip(e).map(|(a, b)| a * b).sum();
        ((self.dim as f64).sqrt() * dot / n).tanh()
    }

    pub fn model(&self, e1: &[f64], e2: &[f64], temperature: f64) -> Result<ReferenceGeModel> {
        if e1.len() != self.dim || e2.len() != self.dim {
            return Err(Error::Shape(format!(
                "oracle expects {}-dimensional descriptors, got {} and {}",
                self.dim,
                e1.len(),
                e2.len()
            )));
        }
        if !(temperature > 0.0) {
            return Err(Error::Invalid(format!("temperature {temperature} K is not positive")));
        }
        let du = self.latent(&self.u, e1) - self.latent(&self.u, e2);
        let dv = self.latent(&self.v, e1) - self.latent(&self.v, e2);
        let scale = REFERENCE_TEMPERATURE / temperature;
        let use_nrtl = match self.kind {
            OracleKind::Margules => false,
            OracleKind::Nrtl => true,
            OracleKind::Mixed => {
                let sum: Vec<f64> = e1.iter().zip(e2).map(|(a, b)| a / norm(e1) + b / norm(e2)).collect();
                self.latent(&self.m, &sum) > 0.0
            }
        };
        let sym = 0.5 * du * du;
        Ok(if use_nrtl {
            ReferenceGeModel::Nrtl {
                tau12: (sym + 0.5 * dv) * scale,
                tau21: (sym - 0.5 * dv) * scale,
                alpha: NRTL_ALPHA,
            }
        } else {
            ReferenceGeModel::Margules {
                a12: (sym - 0.5 * dv * dv) * scale,
            }
        })
    }

    /// Noise-free `(ln γ1, ln γ2)`.
    pub fn ln_gammas(&self, e1: &[f64], e2: &[f64], temperature: f64, x1: f64) -> Result<(f64, f64)> {
        Ok(self.model(e1, e2, temperature)?.ln_gammas(x1))
    }
}

fn norm(e: &[f64]) -> f64 {
    let n = e.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        1.0
    } else {
        n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub oracle: OracleKind,
    /// Temperatures in K.
    pub temperatures: Vec<f64>,
    pub compositions: Vec<f64>,
    /// Standard deviation of Gaussian noise added to every `ln γ`.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            oracle: OracleKind::Mixed,
            temperatures: vec![298.15, 323.15, 348.15],
            compositions: (0..=10).map(|k| k as f64 / 10.0).collect(),
            noise: 0.0,
            seed: 0,
        }
    }
}

/// One record per (pair, temperature, composition) for every unordered pair
/// of components in `table`, in table order.
pub fn synthesize_dataset(table: &DescriptorTable, spec: &SynthSpec) -> Result<Vec<GammaRecord>> {
    if table.len() < 2 {
        return Err(Error::Invalid(format!(
            "need at least two components, table has {}",
            table.len()
        )));
    }
    if spec.temperatures.is_empty() || spec.compositions.is_empty() {
        return Err(Error::Invalid("temperature and composition grids must be non-empty".into()));
    }
    if let Some(x) = spec.compositions.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Invalid(format!("composition {x} outside [0, 1]")));
    }
    if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
        return Err(Error::Invalid(format!("noise {} must be finite and non-negative", spec.noise)));
    }
    let noise = Normal::new(0.0, spec.noise).map_err(|e| Error::Invalid(e.to_string()))?;
    let oracle = SyntheticOracle::new(spec.oracle, table.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut jitter = |v: f64| {
        if spec.noise > 0.0 {
            v + noise.sample(&mut rng)
        } else {
            v
        }
    };

    let comps: Vec<_> = table.iter().collect();
    let mut out = Vec::new();
    for (i, a) in comps.iter().enumerate() {
        for b in &comps[i + 1..] {
            for &t in &spec.temperatures {
                let model = oracle.model(&a.vector, &b.vector, t)?;
                let source = format!("synthetic:{}", model.kind());
                for &x in &spec.compositions {
                    let (l1, l2) = model.ln_gammas(x);
                    let (l1, l2) = (jitter(l1), jitter(l2));
                    out.push(GammaRecord::new(&a.smiles, &b.smiles, t, x, Some(l1), Some(l2), &source));
                }
            }
        }
    }
    Ok(out)
}

/// Featurized table of the first `n` molecules of the built-in corpus.
pub fn synthetic_components(n: usize, dim: usize) -> Result<DescriptorTable> {
    if n > SMALL_MOLECULES.len() {
        return Err(Error::Invalid(format!(
            "at most {} built-in components available, {n} requested",
            SMALL_MOLECULES.len()
        )));
    }
    featurize_all(SMALL_MOLECULES[..n].iter().copied(), dim, DEFAULT_FEATURE_SEED)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn ten_components_give_45_systems() {
        let table = synthetic_components(10, 64).unwrap();
        let spec = SynthSpec::default();
        let recs = synthesize_dataset(&table, &spec).unwrap();
        let systems: BTreeSet<_> = recs.iter().map(|r| r.system_id.clone()).collect();
        assert_eq!(systems.len(), 45);
        assert_eq!(recs.len(), 45 * 3 * 11);
        assert!(recs.iter().all(|r| r.validate().is_ok()));
    }

    #[test]
    fn deterministic_given_seed() {
        let table = synthetic_components(6, 64).unwrap();
        let spec = SynthSpec {
            noise: 0.05,
            seed: 4,
            ..SynthSpec::default()
        };
        let a = synthesize_dataset(&table, &spec).unwrap();
        assert_eq!(a, synthesize_dataset(&table, &spec).unwrap());
        let b = synthesize_dataset(&table, &SynthSpec { seed: 5, ..spec }).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn oracle_is_symmetric_and_vanishes_for_identical_components() {
        let table = synthetic_components(12, 64).unwrap();
        let comps: Vec<_> = table.iter().collect();
        for kind in [OracleKind::Margules, OracleKind::Nrtl, OracleKind::Mixed] {
            let o = SyntheticOracle::new(kind, 64);
            for a in &comps {
                let same = o.model(&a.vector, &a.vector, 300.0).unwrap();
                assert_eq!(same.ln_gammas(0.3), (0.0, 0.0));
                for b in &comps {
                    let m = o.model(&a.vector, &b.vector, 300.0).unwrap();
                    assert_eq!(m.swapped(), o.model(&b.vector, &a.vector, 300.0).unwrap());
                }
            }
        }
    }

    #[test]
    fn margules_parameters_stay_bounded() {
        let table = synthetic_components(40, 384).unwrap();
        let o = SyntheticOracle::new(OracleKind::Margules, 384);
        let comps: Vec<_> = table.iter().collect();
        for a in &comps {
            for b in &comps {
                match o.model(&a.vector, &b.vector, REFERENCE_TEMPERATURE).unwrap() {
                    ReferenceGeModel::Margules { a12 } => assert!((-2.0..=2.0).contains(&a12)),
                    m => panic!("unexpected {m:?}"),
                }
            }
        }
    }

    #[test]
    fn mixed_uses_both_models() {
        let table = synthetic_components(20, 384).unwrap();
        let spec = SynthSpec::default();
        let recs = synthesize_dataset(&table, &spec).unwrap();
        let kinds: BTreeSet<_> = recs.iter().map(|r| r.source.as_str()).collect();
        assert_eq!(kinds.len(), 2, "{kinds:?}");
    }

    #[test]
    fn bad_inputs() {
        let table = synthetic_components(1, 64).unwrap();
        assert!(synthesize_dataset(&table, &SynthSpec::default()).is_err());
        let table = synthetic_components(3, 64).unwrap();
        let spec = SynthSpec {
            noise: -1.0,
            ..SynthSpec::default()
        };
        assert!(synthesize_dataset(&table, &spec).is_err());
        let spec = SynthSpec {
            temperatures: vec![],
            ..SynthSpec::default()
        };
        assert!(synthesize_dataset(&table, &spec).is_err());
        assert!(synthetic_components(1000, 64).is_err());
    }
}
