use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};

use pgm_core::io::table::require_classes;
use pgm_core::io::{
    compare_reports, fingerprint_bytes, read_rows, rows_to_csv, to_pretty_json,
    EvaluationReportFile, GridsearchReportFile, ModelEcho, ModelFile, SplitFile, Table,
    DEFAULT_LABEL_COLUMN,
};
use pgm_core::selection::{
    resolve_positive_class, run_protocol, stratified_holdout, BaseSettings, Grid, ProtocolConfig,
};
use pgm_core::{Dataset, EngineChoice, MetricReport, NormalizerKind, PgmModel, PriorsMode};

use crate::spec::ModelSpec;
use crate::UsageError;

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw stratified train/test splits for a dataset.
    Splits(SplitsArgs),
    /// Run the cross-validated grid search on every split and pick a configuration.
    Gridsearch(GridsearchArgs),
    /// Fit a model on a whole dataset.
    Train(TrainArgs),
    /// Score rows with a saved model.
    Predict(PredictArgs),
    /// Score a labeled dataset and write a metric report.
    Evaluate(EvaluateArgs),
    /// Compare two reports: win-loss fractions and metric differences.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
pub struct SplitsArgs {
    /// Dataset CSV.
    dataset: PathBuf,
    #[arg(long, default_value = DEFAULT_LABEL_COLUMN)]
    label_column: String,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    #[arg(long, default_value_t = 30)]
    repetitions: usize,
    #[arg(long)]
    seed: u64,
    /// Split file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GridsearchArgs {
    dataset: PathBuf,
    #[arg(long)]
    splits: PathBuf,
    #[arg(long, default_value = DEFAULT_LABEL_COLUMN)]
    label_column: String,
    /// `default`, or e.g. `encodings=amplit;alphas=0.5,1;copies=1,5`.
    #[arg(long, default_value = "default")]
    grid: String,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    cv_reps: usize,
    /// Prior modes to search, `/`-separated; overrides the grid's list.
    #[arg(long)]
    priors: Option<String>,
    #[arg(long, default_value = "zscore")]
    normalizer: String,
    #[arg(long, default_value = "auto")]
    engine: String,
    #[arg(long)]
    positive_class: Option<String>,
    #[arg(long)]
    seed: u64,
    /// Output directory for report.json, report.csv and chosen_config.toml.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    dataset: PathBuf,
    #[arg(long, default_value = DEFAULT_LABEL_COLUMN)]
    label_column: String,
    /// TOML model specification; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    encoding: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    copies: Option<u32>,
    #[arg(long)]
    priors: Option<String>,
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    normalizer: Option<String>,
    #[arg(long)]
    rank_tol: Option<f64>,
    #[arg(long)]
    dense_dim_limit: Option<usize>,
    #[arg(long)]
    out_model: PathBuf,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    model: PathBuf,
    dataset: PathBuf,
    /// Prediction CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    model: PathBuf,
    dataset: PathBuf,
    #[arg(long, default_value = DEFAULT_LABEL_COLUMN)]
    label_column: String,
    #[arg(long)]
    positive_class: Option<String>,
    /// Output directory for report.json and report.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Report CSV, or a directory holding report.csv.
    report_a: PathBuf,
    report_b: PathBuf,
    /// Output directory for win_loss.csv and differences.csv.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Splits(a) => splits(a),
        Command::Gridsearch(a) => gridsearch(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Compare(a) => compare(a),
    }
}

/// Reads a dataset and its fingerprint from the same bytes.
fn load_dataset(path: &Path, label_column: &str) -> Result<(Dataset, pgm_core::io::Fingerprint)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let dataset = Table::parse(&bytes)
        .and_then(|t| t.to_dataset(label_column))
        .with_context(|| format!("dataset {}", path.display()))?;
    Ok((dataset, fingerprint_bytes(&bytes)))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn splits(a: SplitsArgs) -> Result<()> {
    if !(a.test_fraction > 0.0 && a.test_fraction < 1.0) {
        return Err(UsageError(format!(
            "--test-fraction must lie strictly between 0 and 1, got {}",
            a.test_fraction
        ))
        .into());
    }
    if a.repetitions == 0 {
        return Err(UsageError("--repetitions must be at least 1".into()).into());
    }
    let (dataset, fingerprint) = load_dataset(&a.dataset, &a.label_column)?;
    require_classes(&dataset)?;
    let plans = stratified_holdout(&dataset.labels, a.test_fraction, a.repetitions, a.seed)?;
    let file = SplitFile::new(
        fingerprint,
        dataset.len(),
        Some(a.seed),
        Some(a.test_fraction),
        "stratified_holdout",
        plans,
    );

    let counts = dataset.class_counts();
    let mut test_counts = vec![0usize; dataset.n_classes()];
    for &i in &file.repetitions[0].test {
        test_counts[dataset.labels[i]] += 1;
    }
    let mut summary = format!(
        "{} rows, {} repetitions, {} test rows each\nclass,total,train,test\n",
        dataset.len(),
        file.repetitions.len(),
        file.repetitions[0].test.len()
    );
    for (c, name) in dataset.class_names.iter().enumerate() {
        writeln!(
            summary,
            "{name},{},{},{}",
            counts[c],
            counts[c] - test_counts[c],
            test_counts[c]
        )?;
    }

    write_file(&a.out, &file.to_json()?)?;
    print!("{summary}");
    Ok(())
}

fn gridsearch(a: GridsearchArgs) -> Result<()> {
    let mut grid: Grid = a.grid.parse()?;
    if let Some(p) = &a.priors {
        grid.priors = p
            .split('/')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse::<PriorsMode>)
            .collect::<pgm_core::Result<_>>()?;
        grid.validate()?;
    }
    if a.k < 2 {
        return Err(UsageError("--k must be at least 2".into()).into());
    }
    if a.cv_reps == 0 {
        return Err(UsageError("--cv-reps must be at least 1".into()).into());
    }
    let base = BaseSettings {
        normalizer: a.normalizer.parse::<NormalizerKind>()?,
        engine: a.engine.parse::<EngineChoice>()?,
        ..BaseSettings::default()
    };

    let (dataset, fingerprint) = load_dataset(&a.dataset, &a.label_column)?;
    require_classes(&dataset)?;
    resolve_positive_class(&dataset.class_names, a.positive_class.as_deref())?;
    let split_bytes =
        std::fs::read(&a.splits).with_context(|| format!("reading {}", a.splits.display()))?;
    let split_file = SplitFile::from_json(std::str::from_utf8(&split_bytes)?)
        .with_context(|| format!("split file {}", a.splits.display()))?;
    split_file
        .check_dataset(&fingerprint, dataset.len())
        .context("split file does not belong to this dataset")?;

    let config = ProtocolConfig {
        grid,
        k: a.k,
        cv_repetitions: a.cv_reps,
        base: base.clone(),
        seed: a.seed,
        positive_class: a.positive_class.clone(),
    };
    let protocol = run_protocol(&dataset, &split_file.repetitions, &config)?;
    let report = GridsearchReportFile::new(fingerprint, fingerprint_bytes(&split_bytes), protocol);

    let json = to_pretty_json(&report)?;
    let csv = rows_to_csv(&report.rows())?;
    let chosen = ModelSpec::from_point(&report.protocol.chosen, &base).to_toml()?;

    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_file(&a.out.join("report.json"), &json)?;
    write_file(&a.out.join("report.csv"), &csv)?;
    write_file(&a.out.join("chosen_config.toml"), &chosen)?;

    let p = &report.protocol;
    let points = p.config.grid.points();
    println!("split,winner,test_macro_auc,test_macro_accuracy");
    for s in &p.splits {
        println!(
            "{},{},{},{}",
            s.split_id,
            points[s.winner],
            s.test.macro_auc.map_or("NA".to_string(), |v| v.to_string()),
            s.test.macro_accuracy
        );
    }
    println!("frequency table:");
    for c in &p.selection.frequency_table {
        println!(
            "  {} x{} mean test AUC {}",
            points[c.grid_index],
            c.frequency,
            c.mean_test_auc.map_or("NA".to_string(), |v| v.to_string())
        );
    }
    println!("chosen: {} ({:?})", p.chosen, p.selection.resolved_by);
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    let file_spec = match &a.config {
        Some(path) => ModelSpec::read(path)?,
        None => ModelSpec::default(),
    };
    let spec = file_spec.overlay(ModelSpec {
        encoding: a.encoding,
        alpha: a.alpha,
        copies: a.copies,
        priors: a.priors,
        engine: a.engine,
        normalizer: a.normalizer,
        rank_tol: a.rank_tol,
        dense_dim_limit: a.dense_dim_limit,
    });
    let config = spec.resolve()?;
    let (dataset, _) = load_dataset(&a.dataset, &a.label_column)?;
    require_classes(&dataset)?;
    let model = PgmModel::fit(
        &dataset.features,
        &dataset.labels,
        dataset.n_classes(),
        &config,
    )?;
    let file = ModelFile::from_model(&model, &dataset.class_names, &dataset.feature_names)?;
    write_file(&a.out_model, &file.to_json()?)?;
    println!(
        "trained {} engine on {} rows ({} classes, {} features, n={})",
        model.engine.kind(),
        dataset.len(),
        dataset.n_classes(),
        dataset.n_features(),
        model.copies()
    );
    Ok(())
}

fn load_model(path: &Path) -> Result<(ModelFile, PgmModel)> {
    let file = ModelFile::read(path).with_context(|| format!("model {}", path.display()))?;
    let model = file
        .to_model()
        .with_context(|| format!("model {}", path.display()))?;
    Ok((file, model))
}

fn predict(a: PredictArgs) -> Result<()> {
    let (file, model) = load_model(&a.model)?;
    let table =
        Table::read(&a.dataset).with_context(|| format!("dataset {}", a.dataset.display()))?;
    let features = table
        .features(&file.feature_names)
        .with_context(|| format!("dataset {}", a.dataset.display()))?;
    let (labels, scores) = model.predict_batch(&features)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["row".to_string(), "predicted".to_string()];
    header.extend(file.class_names.iter().map(|c| format!("score_{c}")));
    w.write_record(&header)?;
    for (i, (label, s)) in labels.iter().zip(&scores).enumerate() {
        let mut record = vec![i.to_string(), file.class_names[*label].clone()];
        record.extend(s.values().iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?;
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let (file, model) = load_model(&a.model)?;
    let positive = resolve_positive_class(&file.class_names, a.positive_class.as_deref())?;
    let bytes =
        std::fs::read(&a.dataset).with_context(|| format!("reading {}", a.dataset.display()))?;
    let dataset = Table::parse(&bytes)
        .and_then(|t| {
            t.to_dataset_with_classes(&a.label_column, &file.feature_names, &file.class_names)
        })
        .with_context(|| format!("dataset {}", a.dataset.display()))?;
    if dataset.is_empty() {
        bail!(pgm_core::PgmError::EmptyEvaluation);
    }
    let (_, scores) = model.predict_batch(&dataset.features)?;
    let report = MetricReport::compute(&dataset.labels, &scores, &file.class_names, positive)?;
    let echo = ModelEcho {
        engine: model.engine.kind(),
        encoding: model.encoding.clone(),
        copies: model.copies(),
        priors: model.priors.mode.clone(),
    };
    let out = EvaluationReportFile::new(
        fingerprint_bytes(&bytes),
        echo,
        positive.map(|p| file.class_names[p].clone()),
        report,
    );
    let json = to_pretty_json(&out)?;
    let csv = rows_to_csv(&out.rows())?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_file(&a.out.join("report.json"), &json)?;
    write_file(&a.out.join("report.csv"), &csv)?;

    for row in out.rows() {
        if row.class.is_empty() {
            println!("{} = {}", row.metric, row.value);
        }
    }
    for flag in &out.report.flags {
        println!("flag: {flag}");
    }
    Ok(())
}

fn compare(a: CompareArgs) -> Result<()> {
    let ra = read_rows(&a.report_a).with_context(|| format!("report {}", a.report_a.display()))?;
    let rb = read_rows(&a.report_b).with_context(|| format!("report {}", a.report_b.display()))?;
    let comparison = compare_reports(&ra, &rb)?;
    let win_loss = comparison.win_loss_csv()?;
    let differences = comparison.differences_csv()?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_file(&a.out.join("win_loss.csv"), &win_loss)?;
    write_file(&a.out.join("differences.csv"), &differences)?;
    print!("{win_loss}");
    Ok(())
}
