use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::TrainConfig;
use super::fit::{fit, metrics_csv, FitResult};
use crate::data::{check_descriptors, split_systems, GammaRecord, Split, SplitSpec, StandardizationStats};
use crate::descriptors::DescriptorTable;
use crate::error::{Error, Result};
use crate::model::GeModel;

pub const CONFIG_FILE: &str = "config.txt";
pub const METRICS_FILE: &str = "metrics.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const SPLITS_FILE: &str = "splits.csv";

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub fit: FitResult,
    pub split: Split<GammaRecord>,
}

fn write(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn splits_csv(split: &Split<GammaRecord>) -> String {
    let mut s = String::from("system_id,split\n");
    for (name, records) in [("train", &split.train), ("val", &split.val), ("test", &split.test)] {
        let mut ids: Vec<&str> = records.iter().map(|r| r.system_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        for id in ids {
            let _ = writeln!(s, "{id},{name}");
        }
    }
    s
}

/// Splits `records` by system, standardizes on the training split, trains
/// and writes `config.txt`, `splits.csv`, `metrics.csv` and
/// `checkpoint.json` into `outdir`.
///
/// On divergence the last good checkpoint is still written before the error
/// is returned.
pub fn run_training(records: &[GammaRecord], table: &DescriptorTable, config: &TrainConfig, outdir: &Path) -> Result<TrainingRun> {
    config.validate()?;
    check_descriptors(records, table)?;
    let split = split_systems(
        records,
        &SplitSpec {
            seed: config.seed,
            ..SplitSpec::default()
        },
    )?;
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    write(&outdir.join(CONFIG_FILE), &config.to_kv())?;
    write(&outdir.join(SPLITS_FILE), &splits_csv(&split))?;

    let stats = StandardizationStats::fit(&split.train, table)?;
    let model = GeModel::random(config.architecture(table.dim()), stats, config.seed)?;
    let result = match fit(&split.train, &split.val, model, table, config) {
        Ok(r) => r,
        Err(Error::Diverged { epoch, last_good }) => {
            last_good.save(outdir.join(CHECKPOINT_FILE))?;
            return Err(Error::Diverged { epoch, last_good });
        }
        Err(e) => return Err(e),
    };
    write(&outdir.join(METRICS_FILE), &metrics_csv(&result.history))?;
    result.checkpoint.save(outdir.join(CHECKPOINT_FILE))?;
    Ok(TrainingRun { fit: result, split })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelCheckpoint;
    use crate::thermo::{synthesize_dataset, synthetic_components, SynthSpec};

    #[test]
    fn run_directory_contents() {
        let table = synthetic_components(10, 16).unwrap();
        let spec = SynthSpec {
            temperatures: vec![300.0],
            compositions: vec![0.25, 0.75],
            ..SynthSpec::default()
        };
        let records = synthesize_dataset(&table, &spec).unwrap();
        let config = TrainConfig {
            hidden: 4,
            max_epochs: 2,
            batch_size: 16,
            ..TrainConfig::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let run = run_training(&records, &table, &config, dir.path()).unwrap();
        assert_eq!(run.split.train.len() + run.split.val.len() + run.split.test.len(), records.len());

        let metrics = fs::read_to_string(dir.path().join(METRICS_FILE)).unwrap();
        assert_eq!(metrics.lines().count(), 3);
        let ck = ModelCheckpoint::load(dir.path().join(CHECKPOINT_FILE)).unwrap();
        assert_eq!(ck.to_model().unwrap(), run.fit.model);
        assert_eq!(ck.training.unwrap().epochs_run, 2);
        assert_eq!(
            TrainConfig::load(dir.path().join(CONFIG_FILE)).unwrap(),
            config
        );
        let splits = fs::read_to_string(dir.path().join(SPLITS_FILE)).unwrap();
        assert_eq!(splits.lines().count(), 1 + 45);
    }

    #[test]
    fn missing_descriptors_fail_before_training() {
        let table = synthetic_components(3, 16).unwrap();
        let recs = vec![GammaRecord::new("CO", "XX", 300.0, 0.5, Some(0.1), None, "t")];
        let dir = tempfile::tempdir().unwrap();
        let e = run_training(&recs, &table, &TrainConfig::default(), dir.path()).unwrap_err();
        assert!(matches!(e, Error::MissingDescriptors(ref m) if m == &["XX".to_string()]));
    }
}
