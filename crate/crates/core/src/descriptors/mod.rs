//! Component descriptors: loading externally computed embeddings and the
//! built-in hashed SMILES featurizer.
//!
//! File format (UTF-8 CSV):
//!
//! ```text
//! smiles,dim=<D>,source=<tag>,seed=<int>
//! <SMILES>,v1,...,vD
//! ```

mod corpus;
mod featurize;
mod smiles;
mod table;

use serde::{Deserialize, Serialize};

pub use corpus::SMALL_MOLECULES;
pub use featurize::{featurize, featurize_with_seed, raw_features, DEFAULT_FEATURE_SEED, MIN_DIM};
pub use smiles::{tokenize_smiles, BracketAtom, SmilesTokenStream, Token, TokenKind};
pub use table::{DescriptorTable, LoadReport};

use crate::error::Result;

pub const DEFAULT_DIM: usize = 384;
pub const FEATURIZER_SOURCE: &str = "featurizer";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDescriptor {
    pub smiles: String,
    pub vector: Vec<f64>,
}

/// Featurizes every SMILES into a fresh table; duplicates are rejected.
pub fn featurize_all<'a>(
    smiles: impl IntoIterator<Item = &'a str>,
    dim: usize,
    seed: u64,
) -> Result<DescriptorTable> {
    let mut table = DescriptorTable::new(dim, FEATURIZER_SOURCE, Some(seed));
    for s in smiles {
        table.insert(featurize_with_seed(s, dim, seed)?)?;
    }
    Ok(table)
}
