//! `gibbsnet` command-line tool.
//!
//! Exit codes: 0 success, 1 audit or validation failure, 2 usage error,
//! 3 I/O error.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gibbsnet::data::{ingest_csv, write_records, GammaRecord, StandardizedComponents};
use gibbsnet::descriptors::{featurize_all, featurize_with_seed, DescriptorTable, DEFAULT_DIM, DEFAULT_FEATURE_SEED};
use gibbsnet::eval::{build_report, consistency_certificate, load_baseline, predict_records, ReportOptions, SampleSpec};
use gibbsnet::model::{GeModel, MixtureQuery, ModelCheckpoint, Variant};
use gibbsnet::thermo::{
    bubble_point_isothermal, load_antoine, synthesize_dataset, synthetic_components, OracleKind, SynthSpec,
};
use gibbsnet::train::{run_training, TrainConfig};
use gibbsnet::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "gibbsnet", version, about = "Thermodynamically consistent neural gE model for binary mixtures")]
struct Cli {
    /// Log level for messages on stderr (error, warn, info, debug).
    #[arg(long, global = true, default_value = "warn")]
    log_level: log::LevelFilter,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a descriptor table for the SMILES in a file, one per line.
    Featurize(FeaturizeArgs),
    /// Write a synthetic activity-coefficient dataset and its descriptors.
    Synth(SynthArgs),
    /// Train a model and write config, splits, metrics and checkpoint.
    Train(TrainArgs),
    /// Predict gE/RT and ln γ for one binary mixture.
    Predict(PredictArgs),
    /// Predict an isothermal bubble-point curve with Antoine vapor pressures.
    Vle(VleArgs),
    /// Check the four consistency criteria on random queries.
    Audit(AuditArgs),
    /// Score a checkpoint on a dataset and write plot-ready tables.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct FeaturizeArgs {
    /// Text file with one SMILES per line; blank lines and `#` comments are skipped.
    #[arg(long)]
    smiles_file: PathBuf,
    /// Descriptor dimension.
    #[arg(long, default_value_t = DEFAULT_DIM)]
    dim: usize,
    /// Output descriptor CSV.
    #[arg(long)]
    out: PathBuf,
    /// Validate and subset an external embedding file instead of featurizing.
    #[arg(long, value_name = "FILE")]
    from_embeddings: Option<PathBuf>,
    /// Hashing seed of the built-in featurizer.
    #[arg(long, default_value_t = DEFAULT_FEATURE_SEED)]
    feature_seed: u64,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Number of built-in components; every unordered pair becomes a system.
    #[arg(long)]
    components: usize,
    /// Reference model family: margules, nrtl or mixed.
    #[arg(long, default_value = "mixed")]
    oracle: OracleKind,
    /// Standard deviation of Gaussian noise on every ln γ.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Seed of the noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Descriptor dimension of the built-in featurizer.
    #[arg(long, default_value_t = DEFAULT_DIM)]
    dim: usize,
    /// Temperatures in K, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "298.15,323.15,348.15")]
    temperatures: Vec<f64>,
    /// Number of evenly spaced compositions from 0 to 1.
    #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u32).range(2..))]
    grid: u32,
    /// Output dataset CSV.
    #[arg(long)]
    out: PathBuf,
    /// Output descriptor CSV [default: <out stem>.descriptors.csv].
    #[arg(long)]
    descriptors_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Dataset CSV.
    #[arg(long, required_unless_present = "print_config")]
    data: Option<PathBuf>,
    /// Descriptor CSV [default: built-in featurizer at --dim].
    #[arg(long)]
    descriptors: Option<PathBuf>,
    /// Descriptor dimension when featurizing.
    #[arg(long, default_value_t = DEFAULT_DIM)]
    dim: usize,
    /// key=value file overriding training defaults: lr0=0.0005,
    /// lr_decay_factor=0.1, lr_patience=10, early_stop_patience=30,
    /// batch_size=512, smoothl1_beta=0.25, weight_decay=0.000001,
    /// max_epochs=1000, seed=0, hidden=96, variant=hanna,
    /// gd_audit_points=1024.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, required_unless_present = "print_config")]
    outdir: Option<PathBuf>,
    /// Overrides the seed (split, initialization and shuffling).
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the variant: hanna, ablation1 or ablation2.
    #[arg(long)]
    variant: Option<Variant>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Debug, Args)]
struct MixtureArgs {
    /// Model checkpoint JSON.
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    smiles1: String,
    #[arg(long)]
    smiles2: String,
    /// Temperature in K.
    #[arg(long = "T", value_name = "KELVIN")]
    temperature: f64,
    /// Single composition (mole fraction of component 1).
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    x1: Option<f64>,
    /// N evenly spaced compositions from 0 to 1.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    grid: Option<u32>,
    /// Descriptor CSV [default: built-in featurizer when the checkpoint was trained on it].
    #[arg(long)]
    descriptors: Option<PathBuf>,
    /// Output CSV [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[command(flatten)]
    mixture: MixtureArgs,
}

#[derive(Debug, Args)]
struct VleArgs {
    #[command(flatten)]
    mixture: MixtureArgs,
    /// Antoine table CSV (smiles,A,B,C,Tmin_K,Tmax_K,unit).
    #[arg(long)]
    antoine: PathBuf,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Model checkpoint JSON.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Number of random queries per criterion.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Seed of the query sampler.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Model checkpoint JSON.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Descriptor CSV [default: built-in featurizer when the checkpoint was trained on it].
    #[arg(long)]
    descriptors: Option<PathBuf>,
    /// `splits.csv` from a training run; restricts scoring to --split.
    #[arg(long)]
    splits: Option<PathBuf>,
    /// Which split to score when --splits is given.
    #[arg(long, default_value = "test")]
    split: String,
    /// Baseline scores CSV (system_id,mae).
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Histogram bin width of per-system MAE.
    #[arg(long, default_value_t = 0.02)]
    bin_width: f64,
    /// Output directory for report.json and the CSV tables.
    #[arg(long)]
    outdir: PathBuf,
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_io() { EXIT_IO } else { EXIT_FAILURE };
        Failure::new(code, e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn write_output(path: Option<&Path>, body: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Failure::new(EXIT_IO, format!("I/O error on {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn read_smiles_file(path: &Path) -> CliResult<Vec<(usize, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("I/O error on {}: {e}", path.display())))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect())
}

fn featurize(args: &FeaturizeArgs) -> CliResult {
    let smiles = read_smiles_file(&args.smiles_file)?;
    let table = match &args.from_embeddings {
        Some(path) => {
            let (external, report) = DescriptorTable::load_with_report(path)?;
            for w in report.warnings {
                log::warn!("{}: {w}", path.display());
            }
            if external.dim() != args.dim {
                return Err(Failure::new(
                    EXIT_FAILURE,
                    format!("{} has dim={}, expected {}", path.display(), external.dim(), args.dim),
                ));
            }
            let mut out = DescriptorTable::new(external.dim(), external.source.clone(), external.seed);
            let mut missing = Vec::new();
            for (_, s) in &smiles {
                match external.get(s) {
                    Some(d) => out.insert(d.clone())?,
                    None => missing.push(s.clone()),
                }
            }
            if !missing.is_empty() {
                return Err(Error::MissingDescriptors(missing).into());
            }
            out
        }
        None => {
            let mut out = DescriptorTable::new(args.dim, gibbsnet::descriptors::FEATURIZER_SOURCE, Some(args.feature_seed));
            for (line, s) in &smiles {
                let d = featurize_with_seed(s, args.dim, args.feature_seed)
                    .map_err(|e| Failure::new(EXIT_FAILURE, format!("{}:{line}: {e}", args.smiles_file.display())))?;
                out.insert(d)
                    .map_err(|e| Failure::new(EXIT_FAILURE, format!("{}:{line}: {e}", args.smiles_file.display())))?;
            }
            out
        }
    };
    table.write(&args.out)?;
    eprintln!("wrote {} descriptors (dim {}) to {}", table.len(), table.dim(), args.out.display());
    Ok(())
}

fn evenly_spaced(n: u32) -> Vec<f64> {
    let last = f64::from(n - 1);
    (0..n).map(|k| f64::from(k) / last).collect()
}

fn synth(args: &SynthArgs) -> CliResult {
    let table = synthetic_components(args.components, args.dim)?;
    let spec = SynthSpec {
        oracle: args.oracle,
        temperatures: args.temperatures.clone(),
        compositions: evenly_spaced(args.grid),
        noise: args.noise,
        seed: args.seed,
    };
    let records = synthesize_dataset(&table, &spec)?;
    write_records(&args.out, &records)?;
    let descriptors_out = args
        .descriptors_out
        .clone()
        .unwrap_or_else(|| args.out.with_extension("descriptors.csv"));
    table.write(&descriptors_out)?;
    let systems: HashSet<&str> = records.iter().map(|r| r.system_id.as_str()).collect();
    eprintln!(
        "wrote {} records over {} systems to {} and descriptors to {}",
        records.len(),
        systems.len(),
        args.out.display(),
        descriptors_out.display()
    );
    Ok(())
}

fn load_records(path: &Path) -> CliResult<Vec<GammaRecord>> {
    let report = ingest_csv(path)?;
    for r in &report.rejected {
        log::warn!("{}:{}: rejected: {}", path.display(), r.line, r.reason);
    }
    if report.dropped_high_pressure > 0 {
        log::info!("dropped {} rows above the pressure cutoff", report.dropped_high_pressure);
    }
    if report.records.is_empty() {
        return Err(Failure::new(EXIT_FAILURE, format!("{} contains no usable records", path.display())));
    }
    Ok(report.records)
}

fn unique_smiles(records: &[GammaRecord]) -> Vec<&str> {
    let mut seen = HashSet::new();
    records
        .iter()
        .flat_map(|r| [r.smiles_1.as_str(), r.smiles_2.as_str()])
        .filter(|s| seen.insert(*s))
        .collect()
}

fn train(args: &TrainArgs) -> CliResult {
    let mut config = match &args.config {
        Some(path) => TrainConfig::load(path)?,
        None => TrainConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(variant) = args.variant {
        config.variant = variant;
    }
    config.validate()?;
    if args.print_config {
        print!("{}", config.to_kv());
        return Ok(());
    }
    let (Some(data), Some(outdir)) = (&args.data, &args.outdir) else {
        return Err(Failure::new(EXIT_USAGE, "--data and --outdir are required"));
    };
    let records = load_records(data)?;
    let table = match &args.descriptors {
        Some(path) => DescriptorTable::load(path)?,
        None => featurize_all(unique_smiles(&records), args.dim, DEFAULT_FEATURE_SEED)?,
    };
    let run = run_training(&records, &table, &config, outdir)?;
    let last = run.fit.history.last();
    println!(
        "variant={} epochs={} best_epoch={} best_val_loss={:.6} final_gd_msd_train={:.3e} checkpoint={}",
        config.variant,
        run.fit.history.len(),
        run.fit.best_epoch,
        run.fit.best_val_loss,
        last.map_or(0.0, |m| m.gd_msd_train),
        outdir.join(gibbsnet::train::CHECKPOINT_FILE).display()
    );
    Ok(())
}

/// Descriptor table for `smiles` that matches what the checkpoint was trained on.
fn descriptors_for(checkpoint: &ModelCheckpoint, smiles: &[&str], file: Option<&Path>) -> CliResult<DescriptorTable> {
    let source = &checkpoint.descriptor_source;
    let table = match file {
        Some(path) => DescriptorTable::load(path)?,
        None if source.is_featurizer() => {
            let mut seen = HashSet::new();
            let unique: Vec<&str> = smiles.iter().copied().filter(|s| seen.insert(*s)).collect();
            featurize_all(unique, source.dim, source.seed.unwrap_or(DEFAULT_FEATURE_SEED))?
        }
        None => {
            return Err(Failure::new(
                EXIT_USAGE,
                format!("checkpoint was trained on '{}' descriptors; pass --descriptors", source.kind),
            ))
        }
    };
    if table.dim() != source.dim {
        return Err(Failure::new(
            EXIT_FAILURE,
            format!("descriptors have dim {}, checkpoint expects {}", table.dim(), source.dim),
        ));
    }
    Ok(table)
}

/// `-0` prints as `0`.
fn unsigned_zero(v: f64) -> f64 {
    v + 0.0
}

struct MixtureRow {
    x1: f64,
    ge_over_rt: f64,
    ln_gamma1: f64,
    ln_gamma2: f64,
}

fn mixture_rows(args: &MixtureArgs) -> CliResult<Vec<MixtureRow>> {
    let checkpoint = ModelCheckpoint::load(&args.checkpoint)?;
    let model: GeModel = checkpoint.to_model()?;
    let smiles = [args.smiles1.as_str(), args.smiles2.as_str()];
    let table = descriptors_for(&checkpoint, &smiles, args.descriptors.as_deref())?;
    let lookup = |s: &str| {
        table
            .get(s)
            .map(|d| d.vector.clone())
            .ok_or_else(|| Failure::from(Error::MissingDescriptors(vec![s.to_string()])))
    };
    let (e1, e2) = (lookup(smiles[0])?, lookup(smiles[1])?);
    let xs = match (args.x1, args.grid) {
        (Some(x), _) => vec![x],
        (None, Some(n)) => evenly_spaced(n),
        (None, None) => return Err(Failure::new(EXIT_USAGE, "one of --x1 or --grid is required")),
    };
    let ev = model.evaluator();
    let (emb1, emb2) = (ev.embed(&e1)?, ev.embed(&e2)?);
    xs.into_iter()
        .map(|x| {
            let q = MixtureQuery::new(&e1, &e2, args.temperature, x)?;
            let p = ev.predict_embedded(&emb1, &emb2, q.temperature, q.comp)?;
            Ok(MixtureRow {
                x1: x,
                ge_over_rt: unsigned_zero(p.ge_over_rt),
                ln_gamma1: unsigned_zero(p.ln_gamma1),
                ln_gamma2: unsigned_zero(p.ln_gamma2),
            })
        })
        .collect()
}

fn predict(args: &PredictArgs) -> CliResult {
    let rows = mixture_rows(&args.mixture)?;
    let mut s = String::from("x1,ge_over_rt,ln_gamma1,ln_gamma2\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.x1, r.ge_over_rt, r.ln_gamma1, r.ln_gamma2);
    }
    write_output(args.mixture.out.as_deref(), &s)
}

fn vle(args: &VleArgs) -> CliResult {
    let m = &args.mixture;
    let antoine = load_antoine(&args.antoine)?;
    let params = |s: &str| {
        antoine
            .get(s)
            .ok_or_else(|| Failure::new(EXIT_FAILURE, format!("no Antoine parameters for {s} in {}", args.antoine.display())))
    };
    let p1 = params(&m.smiles1)?.pressure(m.temperature)?;
    let p2 = params(&m.smiles2)?.pressure(m.temperature)?;
    if p1.unit != p2.unit {
        return Err(Failure::new(
            EXIT_FAILURE,
            format!("Antoine units differ ({} vs {}); use one unit per table", p1.unit, p2.unit),
        ));
    }
    let rows = mixture_rows(m)?;
    let mut s = format!("x1,ge_over_rt,ln_gamma1,ln_gamma2,p_{},y1\n", p1.unit);
    for r in rows {
        let bp = bubble_point_isothermal(r.x1, r.ln_gamma1.exp(), r.ln_gamma2.exp(), p1, p2)?;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.x1, r.ge_over_rt, r.ln_gamma1, r.ln_gamma2, bp.p.value, bp.y1
        );
    }
    write_output(m.out.as_deref(), &s)
}

fn audit(args: &AuditArgs) -> CliResult {
    let model = ModelCheckpoint::load(&args.checkpoint)?.to_model()?;
    let samples = usize::try_from(args.samples).map_err(|_| Failure::new(EXIT_USAGE, "--samples is too large"))?;
    let cert = consistency_certificate(
        &model,
        &SampleSpec {
            samples,
            seed: args.seed,
        },
    )?;
    println!("{}", serde_json::to_string_pretty(&cert).map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?);
    if cert.passed() {
        return Ok(());
    }
    let failing: Vec<String> = cert
        .failing()
        .map(|c| format!("{} (worst {:e}, tolerance {:e})", c.name, c.worst_residual, c.tolerance))
        .collect();
    Err(Failure::new(EXIT_FAILURE, format!("failing criteria: {}", failing.join("; "))))
}

fn split_members(path: &Path, split: &str) -> CliResult<HashSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("I/O error on {}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next() != Some("system_id,split") {
        return Err(Failure::new(EXIT_FAILURE, format!("{}: expected header system_id,split", path.display())));
    }
    let mut out = HashSet::new();
    for (i, line) in lines.enumerate() {
        let (id, name) = line
            .rsplit_once(',')
            .ok_or_else(|| Failure::new(EXIT_FAILURE, format!("{}:{}: expected system_id,split", path.display(), i + 2)))?;
        if name == split {
            out.insert(id.to_string());
        }
    }
    if out.is_empty() {
        return Err(Failure::new(EXIT_FAILURE, format!("{} lists no '{split}' systems", path.display())));
    }
    Ok(out)
}

fn evaluate(args: &EvaluateArgs) -> CliResult {
    if !(args.bin_width > 0.0 && args.bin_width.is_finite()) {
        return Err(Failure::new(EXIT_USAGE, "--bin-width must be positive"));
    }
    let checkpoint = ModelCheckpoint::load(&args.checkpoint)?;
    let model = checkpoint.to_model()?;
    let mut records = load_records(&args.data)?;
    if let Some(path) = &args.splits {
        let keep = split_members(path, &args.split)?;
        records.retain(|r| keep.contains(&r.system_id));
        if records.is_empty() {
            return Err(Failure::new(EXIT_FAILURE, format!("no records of split '{}' in {}", args.split, args.data.display())));
        }
    }
    let table = descriptors_for(&checkpoint, &unique_smiles(&records), args.descriptors.as_deref())?;
    let components = StandardizedComponents::new(&model.stats, &table, &records)?;
    let preds = predict_records(&model, &records, &components)?;
    let options = ReportOptions {
        bin_width: args.bin_width,
        baseline: args.baseline.as_ref().map(load_baseline).transpose()?,
        ..ReportOptions::default()
    };
    let report = build_report(&records, &preds, &options)?;
    report.write_dir(&args.outdir)?;
    println!(
        "records={} systems={} mean_mae={:.6} median_mae={:.6} report={}",
        report.n_records,
        report.n_systems,
        report.mean_mae,
        report.median_mae,
        args.outdir.display()
    );
    Ok(())
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Featurize(a) => featurize(a),
        Command::Synth(a) => synth(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Vle(a) => vle(a),
        Command::Audit(a) => audit(a),
        Command::Evaluate(a) => evaluate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().filter_level(cli.log_level).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
