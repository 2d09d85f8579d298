//! Command line interface: train / predict / eval / noise-sweep / cv.
//!
//! Exit codes: 0 success, 2 input or configuration error, 3 training or
//! other runtime failure. Every output file begins with its effective
//! configuration so results are reproducible from their own metadata.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use attriforest::{
    evaluate, grid_cv, load_dataset, load_model, load_signatures, run_noise_sweep, save_model,
    seed::{derive_rng, STREAM_SYNTH_SIGNATURES},
    train_model, DapModel, DatasetRole, GrowthConfig, NoiseScenario, ParamGrid, Predictor,
    RocMode, SignatureSet, SweepMethod, SweepPlan, TrainMode, TrainedModel,
};

#[derive(Parser)]
#[command(
    name = "attriforest",
    about = "Zero-shot and few-shot random forests over class-attribute signatures",
    version
)]
struct Cli {
    /// Worker thread cap (default: all cores). Falls back to the
    /// ATTRIFOREST_THREADS environment variable. Results do not depend on
    /// the worker count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train per-class forests from signatures and validation data.
    Train(TrainArgs),
    /// Predict classes for a score CSV.
    Predict(PredictArgs),
    /// Evaluate a model on class-labeled data.
    Eval(EvalArgs),
    /// Run the controlled-noise comparison sweep.
    NoiseSweep(NoiseSweepArgs),
    /// Cross-validate hyperparameters over a grid.
    Cv(CvArgs),
}

#[derive(Args, Clone)]
struct GrowthFlags {
    /// Trees per forest.
    #[arg(long, default_value_t = 100)]
    trees: usize,
    /// Maximum tree depth.
    #[arg(long, default_value_t = 9)]
    depth: usize,
    /// Attribute candidates sampled per node (#m).
    #[arg(long, default_value_t = 10)]
    attr_candidates: usize,
    /// Threshold candidates per sampled attribute (#t).
    #[arg(long, default_value_t = 7)]
    thresh_candidates: usize,
    /// Stop a branch when node mass falls below this fraction of the root.
    #[arg(long, default_value_t = 0.05)]
    min_mass_fraction: f64,
    /// Signature propagation: unreliable (ROC-aware) or basic.
    #[arg(long, default_value = "unreliable", value_parser = parse_mode)]
    mode: TrainMode,
    /// Operating point source: node-local subsets or the full set.
    #[arg(long, default_value = "node-local", value_parser = parse_roc_mode)]
    roc_mode: RocMode,
    /// Few-shot weight on the signature gain (1 = signatures only).
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Probability that an annotated-positive signature bit is truly absent.
    #[arg(long, default_value_t = 0.0)]
    flip_fraction: f64,
    /// Minimum subset positives/negatives before ROC falls back to the
    /// full validation set.
    #[arg(long, default_value_t = 10)]
    min_support: usize,
    /// Root seed for all randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GrowthFlags {
    fn to_config(&self) -> GrowthConfig {
        GrowthConfig {
            max_depth: self.depth,
            n_trees: self.trees,
            n_attr_candidates: self.attr_candidates,
            n_thresh_candidates: self.thresh_candidates,
            min_mass_fraction: self.min_mass_fraction,
            mode: self.mode,
            roc_mode: self.roc_mode,
            lambda: self.lambda,
            flip_fraction: self.flip_fraction,
            min_support: self.min_support,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Signature CSV (header: class,<attr>,...).
    #[arg(long)]
    signatures: PathBuf,
    /// Attribute-labeled validation CSV (ROC source).
    #[arg(long)]
    validation: PathBuf,
    /// Class-labeled few-shot CSV; enables the combined gain when
    /// --lambda < 1.
    #[arg(long)]
    fewshot: Option<PathBuf>,
    /// Where to write the model file.
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    growth: GrowthFlags,
}

#[derive(Args)]
struct PredictArgs {
    /// Trained model file (required for --method forest).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Signature CSV; sufficient for --method dap.
    #[arg(long)]
    signatures: Option<PathBuf>,
    /// Input CSV of attribute scores.
    #[arg(long)]
    input: PathBuf,
    /// Predictions CSV destination.
    #[arg(long)]
    output: PathBuf,
    /// forest (default) or dap.
    #[arg(long, default_value = "forest")]
    method: String,
    /// Uniform attribute prior for DAP.
    #[arg(long, default_value_t = 0.5)]
    dap_prior: f64,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    signatures: Option<PathBuf>,
    /// Class-labeled test CSV.
    #[arg(long)]
    input: PathBuf,
    /// Report JSON destination.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "forest")]
    method: String,
    #[arg(long, default_value_t = 0.5)]
    dap_prior: f64,
}

#[derive(Args)]
struct NoiseSweepArgs {
    /// Signature CSV; omitted = random signatures are generated.
    #[arg(long)]
    signatures: Option<PathBuf>,
    /// Classes for generated signatures.
    #[arg(long, default_value_t = 10)]
    classes: usize,
    /// Attributes for generated signatures.
    #[arg(long, default_value_t = 85)]
    attributes: usize,
    /// Positive-bit density for generated signatures.
    #[arg(long, default_value_t = 0.5)]
    bit_density: f64,
    /// uniform or per-attribute.
    #[arg(long, default_value = "uniform", value_parser = parse_scenario)]
    scenario: NoiseScenario,
    /// Comma-separated mean noise levels.
    #[arg(long, default_value = "0,0.05,0.1,0.2,0.3,0.4,0.5")]
    eta_grid: String,
    /// Independent trials per grid point.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Validation instances per class and trial.
    #[arg(long, default_value_t = 50)]
    n_val: usize,
    /// Test instances per class and trial.
    #[arg(long, default_value_t = 50)]
    n_test: usize,
    /// Comma-separated subset of: ours, signature-rf, dap.
    #[arg(long, default_value = "ours,signature-rf,dap")]
    methods: String,
    /// Sweep CSV destination.
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    growth: GrowthFlags,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    signatures: PathBuf,
    #[arg(long)]
    validation: PathBuf,
    /// Class-labeled data to fold; without it the validation set is folded
    /// and held-out instances are relabeled by exact signature match.
    #[arg(long)]
    labeled: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Comma-separated depth grid.
    #[arg(long)]
    grid_depths: Option<String>,
    #[arg(long)]
    grid_attr_candidates: Option<String>,
    #[arg(long)]
    grid_thresh_candidates: Option<String>,
    #[arg(long)]
    grid_lambdas: Option<String>,
    #[arg(long)]
    grid_flip_fractions: Option<String>,
    /// Best-config JSON destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    growth: GrowthFlags,
}

fn parse_mode(s: &str) -> Result<TrainMode, String> {
    match s {
        "basic" => Ok(TrainMode::Basic),
        "unreliable" => Ok(TrainMode::Unreliable),
        other => Err(format!("unknown mode `{other}` (basic|unreliable)")),
    }
}

fn parse_roc_mode(s: &str) -> Result<RocMode, String> {
    match s {
        "node-local" | "node_local" => Ok(RocMode::NodeLocal),
        "global" => Ok(RocMode::Global),
        other => Err(format!("unknown roc mode `{other}` (node-local|global)")),
    }
}

fn parse_scenario(s: &str) -> Result<NoiseScenario, String> {
    NoiseScenario::from_str(s).map_err(|e| e.to_string())
}

/// Errors tagged by phase, deciding the exit code.
enum CliError {
    /// Bad inputs or configuration: exit 2.
    Input(String),
    /// Training or other runtime failure: exit 3.
    Runtime(String),
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("ATTRIFOREST_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if n >= 1 {
            // Ignore failure: the global pool can already exist in tests.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Eval(args) => cmd_eval(args),
        Command::NoiseSweep(args) => cmd_noise_sweep(args),
        Command::Cv(args) => cmd_cv(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn config_json(config: &GrowthConfig) -> String {
    serde_json::to_string(config).expect("config serializes")
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let config = args.growth.to_config();
    config.validate().map_err(input)?;
    let signatures = load_signatures(&args.signatures).map_err(input)?;
    let val = load_dataset(&args.validation, DatasetRole::Validation, &signatures)
        .map_err(input)?;
    let fewshot = args
        .fewshot
        .as_ref()
        .map(|p| load_dataset(p, DatasetRole::FewShot, &signatures))
        .transpose()
        .map_err(input)?;

    let (model, stats) =
        train_model(&signatures, &val, &config, fewshot.as_ref()).map_err(runtime)?;
    save_model(&model, &args.output).map_err(runtime)?;

    println!("config: {}", config_json(&config));
    let skipped: Vec<&str> = stats
        .degenerate_attributes
        .iter()
        .map(|&a| signatures.attribute_names()[a].as_str())
        .collect();
    println!(
        "degenerate attributes skipped: {}",
        if skipped.is_empty() {
            "none".to_string()
        } else {
            skipped.join(",")
        }
    );
    let mut per_class = String::new();
    for (k, forest) in model.forests.iter().enumerate() {
        if k > 0 {
            per_class.push(' ');
        }
        let _ = write!(
            per_class,
            "{}={}",
            signatures.class_names()[k],
            forest.len()
        );
    }
    println!("per-class trees: {per_class}");
    println!(
        "roc fallback rate: {}/{} ({:.4})",
        stats.roc_fallbacks,
        stats.roc_evaluations,
        stats.fallback_rate()
    );
    println!("nodes: {} leaves: {}", stats.nodes, stats.leaves);
    println!("model written: {}", args.output.display());
    Ok(())
}

enum Method {
    Forest(Box<TrainedModel>),
    Dap(DapModel),
}

impl Method {
    fn signatures(&self) -> &SignatureSet {
        match self {
            Method::Forest(m) => &m.signatures,
            Method::Dap(d) => d.signatures(),
        }
    }

    fn predictor(&self) -> &dyn Predictor {
        match self {
            Method::Forest(m) => m.as_ref(),
            Method::Dap(d) => d,
        }
    }

    fn describe(&self) -> String {
        match self {
            Method::Forest(m) => format!("method=forest config={}", config_json(&m.config)),
            Method::Dap(d) => format!(
                "method=dap priors={}",
                serde_json::to_string(d.priors()).expect("priors serialize")
            ),
        }
    }
}

fn resolve_method(
    method: &str,
    model: Option<&PathBuf>,
    signatures: Option<&PathBuf>,
    dap_prior: f64,
) -> Result<Method, CliError> {
    match method {
        "forest" => {
            let path = model.ok_or_else(|| {
                CliError::Input("--model is required for --method forest".into())
            })?;
            Ok(Method::Forest(Box::new(load_model(path).map_err(input)?)))
        }
        "dap" => {
            let sigs = match (model, signatures) {
                (_, Some(path)) => load_signatures(path).map_err(input)?,
                (Some(path), None) => load_model(path).map_err(input)?.signatures,
                (None, None) => {
                    return Err(CliError::Input(
                        "--method dap needs --signatures or --model".into(),
                    ))
                }
            };
            if !(dap_prior > 0.0 && dap_prior < 1.0) {
                return Err(CliError::Input(format!(
                    "--dap-prior {dap_prior} not in (0,1)"
                )));
            }
            let m = sigs.num_attributes();
            Ok(Method::Dap(
                DapModel::new(sigs, vec![dap_prior; m]).map_err(input)?,
            ))
        }
        other => Err(CliError::Input(format!(
            "unknown method `{other}` (forest|dap)"
        ))),
    }
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let method = resolve_method(
        &args.method,
        args.model.as_ref(),
        args.signatures.as_ref(),
        args.dap_prior,
    )?;
    let signatures = method.signatures();
    let data = load_dataset(&args.input, DatasetRole::Scores, signatures).map_err(input)?;

    let mut out = String::new();
    let _ = writeln!(out, "# attriforest predict {}", method.describe());
    let _ = write!(out, "id,predicted_class");
    for name in signatures.class_names() {
        let _ = write!(out, ",posterior_{name}");
    }
    out.push('\n');
    for i in 0..data.len() {
        let (pred, posteriors) = method
            .predictor()
            .predict_row(data.score_row(i))
            .map_err(runtime)?;
        let _ = write!(out, "{},{}", data.ids()[i], signatures.class_names()[pred]);
        for p in posteriors {
            let _ = write!(out, ",{p}");
        }
        out.push('\n');
    }
    write_file(&args.output, &out)?;
    println!("{} predictions written: {}", data.len(), args.output.display());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let method = resolve_method(
        &args.method,
        args.model.as_ref(),
        args.signatures.as_ref(),
        args.dap_prior,
    )?;
    let data =
        load_dataset(&args.input, DatasetRole::Test, method.signatures()).map_err(input)?;
    let report = evaluate(method.predictor(), &data).map_err(runtime)?;
    let json = serde_json::to_string_pretty(&report).map_err(runtime)?;
    write_file(&args.output, &format!("{json}\n"))?;
    print!("{}", report.csv_summary(&args.method));
    Ok(())
}

fn parse_f64_list(raw: &str, what: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Input(format!("bad {what} entry `{s}`")))
        })
        .collect()
}

fn parse_usize_list(raw: &str, what: &str) -> Result<Vec<usize>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad {what} entry `{s}`")))
        })
        .collect()
}

fn cmd_noise_sweep(args: NoiseSweepArgs) -> Result<(), CliError> {
    let growth = args.growth.to_config();
    growth.validate().map_err(input)?;
    let signatures = match &args.signatures {
        Some(path) => load_signatures(path).map_err(input)?,
        None => {
            let mut rng = derive_rng(args.growth.seed, &[STREAM_SYNTH_SIGNATURES]);
            SignatureSet::random(args.classes, args.attributes, args.bit_density, &mut rng)
                .map_err(input)?
        }
    };
    let eta_grid = parse_f64_list(&args.eta_grid, "--eta-grid")?;
    let methods: Vec<SweepMethod> = args
        .methods
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| SweepMethod::from_str(s).map_err(input))
        .collect::<Result<_, _>>()?;
    let plan = SweepPlan {
        eta_grid,
        scenario: args.scenario,
        methods,
        trials: args.trials,
        n_val_per_class: args.n_val,
        n_test_per_class: args.n_test,
        growth: growth.clone(),
        seed: args.growth.seed,
    };
    plan.validate().map_err(input)?;

    let result = run_noise_sweep(&signatures, &plan).map_err(runtime)?;
    let metadata = vec![
        format!(
            "attriforest noise-sweep seed={} scenario={} trials={} n_val={} n_test={} classes={} attributes={}",
            plan.seed,
            plan.scenario,
            plan.trials,
            plan.n_val_per_class,
            plan.n_test_per_class,
            signatures.num_classes(),
            signatures.num_attributes()
        ),
        format!("growth config: {}", config_json(&growth)),
        format!("signature digest: {}", signatures.digest()),
    ];
    write_file(&args.output, &result.to_csv(&metadata))?;
    println!(
        "{} rows written: {}",
        result.rows.len(),
        args.output.display()
    );
    Ok(())
}

fn cmd_cv(args: CvArgs) -> Result<(), CliError> {
    let base = args.growth.to_config();
    base.validate().map_err(input)?;
    let signatures = load_signatures(&args.signatures).map_err(input)?;
    let val = load_dataset(&args.validation, DatasetRole::Validation, &signatures)
        .map_err(input)?;
    let labeled = args
        .labeled
        .as_ref()
        .map(|p| load_dataset(p, DatasetRole::FewShot, &signatures))
        .transpose()
        .map_err(input)?;

    let mut grid = ParamGrid::default();
    if let Some(raw) = &args.grid_depths {
        grid.depths = parse_usize_list(raw, "--grid-depths")?;
    }
    if let Some(raw) = &args.grid_attr_candidates {
        grid.n_attr = parse_usize_list(raw, "--grid-attr-candidates")?;
    }
    if let Some(raw) = &args.grid_thresh_candidates {
        grid.n_thresh = parse_usize_list(raw, "--grid-thresh-candidates")?;
    }
    if let Some(raw) = &args.grid_lambdas {
        grid.lambdas = parse_f64_list(raw, "--grid-lambdas")?;
    }
    if let Some(raw) = &args.grid_flip_fractions {
        grid.rhos = parse_f64_list(raw, "--grid-flip-fractions")?;
    }

    let outcome = grid_cv(&signatures, &val, labeled.as_ref(), &base, &grid, args.folds)
        .map_err(runtime)?;
    for row in &outcome.table {
        println!(
            "depth={} attr={} thresh={} lambda={} flip={} accuracy={}",
            row.max_depth,
            row.n_attr_candidates,
            row.n_thresh_candidates,
            row.lambda,
            row.flip_fraction,
            row.mean_accuracy
        );
    }
    let best = serde_json::to_string_pretty(&outcome.best).map_err(runtime)?;
    match &args.output {
        Some(path) => {
            write_file(path, &format!("{best}\n"))?;
            println!("best config written: {}", path.display());
        }
        None => println!("best config: {best}"),
    }
    Ok(())
}
