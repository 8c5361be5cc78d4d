use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GammaRecord;
use crate::error::{Error, Result};

/// Fractions of *systems* assigned to each split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train: 0.8,
            val: 0.1,
            test: 0.1,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [("train", self.train), ("val", self.val), ("test", self.test)] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Invalid(format!("{name} fraction {f} outside [0, 1]")));
            }
        }
        let sum = self.train + self.val + self.test;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("split fractions sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// `(train, val, test)` system counts for `n` systems.
    ///
    /// Train and validation are floor-rounded; the test split takes the
    /// remainder. For 35,012 systems at 0.8/0.1/0.1 this gives
    /// 28,009/3,501/3,502.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        let floor = |f: f64| ((f * n as f64) + 1e-9).floor() as usize;
        let train = floor(self.train).min(n);
        let val = floor(self.val).min(n - train);
        (train, val, n - train - val)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub val: Vec<T>,
    pub test: Vec<T>,
}

/// Assigns system ids to splits. Ids are deduplicated and sorted before the
/// seeded shuffle, so the result does not depend on input order.
pub fn split_system_ids<'a>(ids: impl IntoIterator<Item = &'a str>, spec: &SplitSpec) -> Result<Split<String>> {
    spec.validate()?;
    let unique: BTreeSet<&str> = ids.into_iter().collect();
    if unique.len() < 3 {
        return Err(Error::Invalid(format!(
            "need at least 3 systems to split, found {}",
            unique.len()
        )));
    }
    let mut ids: Vec<String> = unique.into_iter().map(String::from).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    ids.shuffle(&mut rng);

    let (n_train, n_val, _) = spec.counts(ids.len());
    let test = ids.split_off(n_train + n_val);
    let val = ids.split_off(n_train);
    Ok(Split { train: ids, val, test })
}

pub fn split_systems(records: &[GammaRecord], spec: &SplitSpec) -> Result<Split<GammaRecord>> {
    let ids = split_system_ids(records.iter().map(|r| r.system_id.as_str()), spec)?;
    let val: HashSet<&str> = ids.val.iter().map(String::as_str).collect();
    let test: HashSet<&str> = ids.test.iter().map(String::as_str).collect();
    let mut out = Split {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for r in records {
        let id = r.system_id.as_str();
        if val.contains(id) {
            out.val.push(r.clone());
        } else if test.contains(id) {
            out.test.push(r.clone());
        } else {
            out.train.push(r.clone());
        }
    }
    Ok(out)
}
