//! Dataset records, CSV ingestion, system-wise splitting and
//! standardization.

mod components;
mod record;
mod split;
mod standardize;

pub use record::{
    ingest_csv, ingest_str, records_to_csv, system_id, write_records, GammaRecord, IngestReport, Rejection,
    DATASET_HEADER, MAX_PRESSURE_BAR, PRESSURE_COLUMN,
};
pub use components::StandardizedComponents;
pub use split::{split_system_ids, split_systems, Split, SplitSpec};
pub use standardize::StandardizationStats;

use crate::descriptors::DescriptorTable;
use crate::error::{Error, Result};

/// Fails with every SMILES referenced by `records` that has no descriptor.
pub fn check_descriptors(records: &[GammaRecord], table: &DescriptorTable) -> Result<()> {
    let mut missing: Vec<String> = records
        .iter()
        .flat_map(|r| [&r.smiles_1, &r.smiles_2])
        .filter(|s| !table.contains(s))
        .cloned()
        .collect();
    if missing.is_empty() {
        return Ok(());
    }
    missing.sort();
    missing.dedup();
    Err(Error::MissingDescriptors(missing))
}
