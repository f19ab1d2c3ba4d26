//! `xdnn` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use xdnn::harness::SPLIT_ALGORITHM;
use xdnn::megaclouds::{
    export_viz, projection_dims, projection_grid, render_rule_file, typicality_csv,
    typicality_profile, Projection,
};
use xdnn::{
    evaluate, fit, generate_rules, load_model, predict_batch, read_features, save_model, ClassId,
    EvalConfig, Model, RuleLevel, ScaleMode, TrainingConfig,
};

#[derive(Parser)]
#[command(
    name = "xdnn",
    version,
    about = "Explainable prototype-based classifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit normalization and train a model on a feature file.
    Train(TrainArgs),
    /// Classify a feature file with a trained model.
    Predict(PredictArgs),
    /// Repeated stratified train/test evaluation on a feature file.
    #[command(long_about = format!(
        "Repeated stratified train/test evaluation on a feature file.\n\n\
         Splits are drawn with the '{SPLIT_ALGORITHM}' procedure: ChaCha8 seeded via \
         seed_from_u64(--seed); per class (ascending id), indices in file order are \
         shuffled by Fisher-Yates (swap i with next_u64() % (i+1), i from n-1 down to 1) \
         and the first round(ratio*n) go to training."
    ))]
    Evaluate(EvaluateArgs),
    /// Write the IF-THEN rules of a model, one per class.
    Rules(RulesArgs),
    /// Summarize a model's structure and optionally export plot data.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Uniform,
    PerCloud,
}

impl From<ScaleArg> for ScaleMode {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Uniform => ScaleMode::Uniform,
            ScaleArg::PerCloud => ScaleMode::PerCloud,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Megacloud,
    Prototype,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjectionArg {
    TopVariance,
    Full,
}

#[derive(Args)]
struct TrainingArgs {
    /// Initial radius of new data clouds [default: sqrt(2 - 2cos 30°)]
    #[arg(long)]
    initial_radius: Option<f64>,
}

impl TrainingArgs {
    fn config(&self) -> Result<TrainingConfig> {
        Ok(match self.initial_radius {
            Some(r) => TrainingConfig::with_initial_radius(r)?,
            None => TrainingConfig::default(),
        })
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Feature file (.xdnf binary or .csv)
    #[arg(long)]
    features: PathBuf,
    /// Model file to write
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    training: TrainingArgs,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    /// Prediction table to write [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "uniform")]
    scale_mode: ScaleArg,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 0.8)]
    train_ratio: f64,
    #[arg(long, value_enum, default_value = "uniform")]
    scale_mode: ScaleArg,
    #[command(flatten)]
    training: TrainingArgs,
    /// Machine-readable JSON report [default: printed after the table]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RulesArgs {
    #[arg(long)]
    model: PathBuf,
    /// Rule file to write [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// One antecedent per MegaCloud or one per prototype
    #[arg(long, value_enum, default_value = "megacloud")]
    level: LevelArg,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
    /// Write the prototype table (coordinates, MegaCloud, support, radius)
    #[arg(long)]
    viz: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "top-variance")]
    projection: ProjectionArg,
    /// Write typicality profiles
    #[arg(long)]
    typicality: Option<PathBuf>,
    /// Lattice resolution per axis over the two projection dimensions
    #[arg(long, default_value_t = 50)]
    grid_steps: usize,
    /// Evaluate typicality on the points of this feature file instead of a lattice
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Restrict typicality to one class
    #[arg(long)]
    class: Option<ClassId>,
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_train(args: TrainArgs) -> Result<()> {
    let dataset = read_features(&args.features)?;
    dataset.validate()?;
    let model = fit(&dataset, &args.training.config()?)?;
    save_model(&model, &args.out)?;
    eprintln!(
        "trained {} classes, {} prototypes, {} MegaClouds -> {}",
        model.classes.len(),
        model.n_clouds(),
        model.megaclouds.len(),
        args.out.display()
    );
    Ok(())
}

fn run_predict(args: PredictArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let dataset = read_features(&args.features)?;
    dataset.validate()?;
    let inputs = match &model.normalization {
        Some(params) => dataset.normalized_with(params)?,
        None => dataset.clone(),
    };
    let xs: Vec<&[f64]> = inputs
        .samples
        .iter()
        .map(|s| s.features.values.as_slice())
        .collect();
    let predictions = predict_batch(&model, &xs, args.scale_mode.into())?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "sample".to_string(),
        "source_ref".into(),
        "true_class".into(),
        "predicted".into(),
        "predicted_label".into(),
    ];
    header.extend(
        model
            .classes
            .iter()
            .map(|c| format!("lambda_{}", c.class_id)),
    );
    header.push("prototype_ref".into());
    w.write_record(&header)?;
    let mut hits = 0usize;
    for (i, (sample, p)) in dataset.samples.iter().zip(&predictions).enumerate() {
        hits += usize::from(sample.class_id == p.label);
        let mut rec = vec![
            i.to_string(),
            sample.features.ref_or_empty().to_owned(),
            sample.class_id.to_string(),
            p.label.to_string(),
            model.label_name(p.label),
        ];
        rec.extend(p.per_class_scores.iter().map(|(_, s)| s.to_string()));
        rec.push(p.winning_ref.clone());
        w.write_record(&rec)?;
    }
    let table = String::from_utf8(w.into_inner()?)?;
    write_output(args.out.as_deref(), &table)?;
    if !predictions.is_empty() {
        eprintln!(
            "{} samples, accuracy against file labels {:.2}%",
            predictions.len(),
            100.0 * hits as f64 / predictions.len() as f64
        );
    }
    Ok(())
}

fn run_evaluate(args: EvaluateArgs) -> Result<()> {
    let dataset = read_features(&args.features)?;
    let config = EvalConfig {
        repeats: args.repeats,
        train_ratio: args.train_ratio,
        seed: args.seed,
        training: args.training.config()?,
        scale_mode: args.scale_mode.into(),
    };
    let report = evaluate(&dataset, &config)?;
    print!("{}", report.render_table());
    let json = report.to_json()?;
    match &args.out {
        Some(p) => fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn run_rules(args: RulesArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let level = match args.level {
        LevelArg::Megacloud => RuleLevel::MegaCloud,
        LevelArg::Prototype => RuleLevel::Prototype,
    };
    let rules = generate_rules(&model, &model.megaclouds, level)?;
    write_output(args.out.as_deref(), &render_rule_file(&rules))
}

fn summary(model: &Model) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "dimension {}, {} classes, {} prototypes, {} MegaClouds",
        model.dim,
        model.classes.len(),
        model.n_clouds(),
        model.megaclouds.len()
    );
    let _ = writeln!(out, "config {}", model.config.fingerprint());
    for class in &model.classes {
        let mc = model
            .megaclouds
            .iter()
            .filter(|m| m.class_id == class.class_id)
            .count();
        let supports: Vec<String> = class.clouds.iter().map(|c| c.support.to_string()).collect();
        let _ = writeln!(
            out,
            "class {} ({}): P={} mc={} samples={} supports=[{}]",
            class.class_id,
            model.label_name(class.class_id),
            class.clouds.len(),
            mc,
            class.stats.count,
            supports.join(",")
        );
    }
    // squared radii live in [0, initial]; the last bin also takes anything above
    let bins = 10;
    let top = model.config.initial_radius_sq;
    let mut hist = vec![0usize; bins];
    for c in model.clouds() {
        let k = ((c.radius_sq / top) * bins as f64).floor() as usize;
        hist[k.min(bins - 1)] += 1;
    }
    let _ = writeln!(out, "squared radius histogram:");
    for (k, n) in hist.iter().enumerate() {
        let lo = top * k as f64 / bins as f64;
        let hi = top * (k + 1) as f64 / bins as f64;
        let _ = writeln!(
            out,
            "  [{lo:.4}, {hi:.4}{} {n}",
            if k + 1 == bins { "]" } else { ")" }
        );
    }
    out
}

fn run_inspect(args: InspectArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    print!("{}", summary(&model));

    if let Some(path) = &args.viz {
        let projection = match args.projection {
            ProjectionArg::TopVariance => Projection::TopVariance,
            ProjectionArg::Full => Projection::Full,
        };
        let viz = export_viz(&model, &model.megaclouds, projection)?;
        fs::write(path, viz.to_csv()?).with_context(|| format!("writing {}", path.display()))?;
    }

    if let Some(path) = &args.typicality {
        let classes: Vec<ClassId> = match args.class {
            Some(c) => {
                if model.class(c).is_none() {
                    bail!("model has no class {c}");
                }
                vec![c]
            }
            None => model.classes.iter().map(|c| c.class_id).collect(),
        };
        let custom_grid = match &args.grid {
            Some(g) => {
                let ds = read_features(g)?;
                let ds = match &model.normalization {
                    Some(params) => ds.normalized_with(params)?,
                    None => ds,
                };
                Some(
                    ds.samples
                        .into_iter()
                        .map(|s| s.features.values)
                        .collect::<Vec<_>>(),
                )
            }
            None => None,
        };
        let mut profiles = Vec::new();
        for c in classes {
            let grid = match &custom_grid {
                Some(g) => g.clone(),
                None => projection_grid(&model, c, args.grid_steps)?,
            };
            profiles.push(typicality_profile(&model, c, grid)?);
        }
        let dims = match &custom_grid {
            Some(_) => (0..model.dim).collect(),
            None => projection_dims(&model),
        };
        fs::write(path, typicality_csv(&profiles, &dims)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => run_train(a),
        Command::Predict(a) => run_predict(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::Rules(a) => run_rules(a),
        Command::Inspect(a) => run_inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
