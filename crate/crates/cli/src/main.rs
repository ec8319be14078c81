use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use nss_core::bench::{
    fit_classifier, format_consistency_table, run_bench, BenchConfig, Builtin, ClassifierKind,
    DataSource, DimensionChoice,
};
use nss_core::dataio::{
    format_csv, format_libsvm, read_csv, read_csv_table, read_libsvm, write_metadata, LabelColumn,
    PcaSettings, Preprocessor, ScaleMode,
};
use nss_core::model_file::{ModelFile, TrainedModel};
use nss_core::risk::{consistency_study, StudySettings, DEFAULT_TRAIN_SIZES};
use nss_core::{default_cv_grid, nss_cross_validate, ErrorClass, LabeledDataset, NssError, Result};

#[derive(Parser)]
#[command(
    name = "nss",
    version,
    about = "Nearest subspace classification: fit, predict, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one classifier and write a model file.
    Fit(FitArgs),
    /// Label rows of a feature file with a saved model.
    Predict(PredictArgs),
    /// Repeated split / tune / fit / evaluate runs.
    Bench(BenchArgs),
    /// Risk gap of NSS against the Bayes rule over growing training sets.
    Consistency(ConsistencyArgs),
    /// Write a synthetic dataset to CSV with a `.meta` sidecar.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Libsvm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scale {
    None,
    Unit,
    Sym,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifierArg {
    Nss,
    Lda,
    Centroid,
}

impl From<ClassifierArg> for ClassifierKind {
    fn from(c: ClassifierArg) -> Self {
        match c {
            ClassifierArg::Nss => ClassifierKind::Nss,
            ClassifierArg::Lda => ClassifierKind::Lda,
            ClassifierArg::Centroid => ClassifierKind::Centroid,
        }
    }
}

#[derive(Args)]
struct DataArgs {
    /// `builtin:<name>` (gaussian-paper, subspace-paper, exp-subspace) or a file path.
    #[arg(long)]
    data: String,
    /// File format; inferred from the extension when absent (`.csv` is CSV, anything else LIBSVM).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Zero-based CSV label column (default: header `label`, else the last column).
    #[arg(long)]
    label_col: Option<usize>,
    /// Sample count for builtin generators.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct PreprocessArgs {
    #[arg(long, value_enum, default_value = "none")]
    scale: Scale,
    /// Keep principal components up to this explained-variance fraction.
    #[arg(long)]
    pca_var: Option<f64>,
    /// Cap on principal components; enables PCA at 95% when given alone.
    #[arg(long)]
    pca_max: Option<usize>,
}

impl PreprocessArgs {
    fn scale_mode(&self) -> Option<ScaleMode> {
        match self.scale {
            Scale::None => None,
            Scale::Unit => Some(ScaleMode::Unit),
            Scale::Sym => Some(ScaleMode::Symmetric),
        }
    }

    fn pca(&self) -> Option<PcaSettings> {
        if self.pca_var.is_none() && self.pca_max.is_none() {
            return None;
        }
        let d = PcaSettings::default();
        Some(PcaSettings {
            variance_target: self.pca_var.unwrap_or(d.variance_target),
            max_dim: self.pca_max.unwrap_or(d.max_dim),
        })
    }
}

#[derive(Args)]
struct DimArgs {
    /// Fixed NSS subspace dimension; otherwise chosen by cross validation.
    #[arg(long)]
    dim: Option<usize>,
    /// Candidate dimensions for cross validation, comma separated.
    #[arg(long, value_delimiter = ',')]
    cv_dims: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    folds: usize,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value = "nss")]
    classifier: ClassifierArg,
    #[command(flatten)]
    dims: DimArgs,
    #[command(flatten)]
    pre: PreprocessArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the model.
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Feature file; a label column is optional.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Predictions (and residuals) as CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-class residuals (NSS models only).
    #[arg(long)]
    residuals: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Repeatable; default nss, lda and centroid.
    #[arg(long = "classifier", value_enum)]
    classifiers: Vec<ClassifierArg>,
    #[command(flatten)]
    dims: DimArgs,
    /// Tune the NSS dimension on the first repeat only.
    #[arg(long)]
    cv_once: bool,
    #[arg(long, default_value_t = 0.8)]
    train_frac: f64,
    /// Default 200 for builtin data, 10 for files.
    #[arg(long)]
    repeats: Option<usize>,
    #[command(flatten)]
    pre: PreprocessArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-repeat rows as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report fit times; forces serial repeats.
    #[arg(long)]
    timing: bool,
    /// Run repeats one after another.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, default_value_t = 3)]
    classes: usize,
    #[arg(long, default_value_t = 20)]
    ambient_dim: usize,
    #[arg(long, default_value_t = 2)]
    intrinsic_dim: usize,
    /// Orthogonal noise precision; the noise variance per coordinate is 1/(2α).
    #[arg(long, default_value_t = 200.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

impl FamilyArgs {
    fn builtin(&self, n: usize) -> Builtin {
        Builtin::ExpSubspace {
            classes: self.classes,
            ambient_dim: self.ambient_dim,
            intrinsic_dim: self.intrinsic_dim,
            alpha: self.alpha,
            radius: self.radius,
            n,
        }
    }
}

#[derive(Args)]
struct ConsistencyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_delimiter = ',')]
    train_sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 20000)]
    n_test: usize,
    /// Monte Carlo points per class for the density bound; 0 skips it.
    #[arg(long, default_value_t = 20000)]
    mc_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// `builtin:<name>`.
    #[arg(long)]
    data: String,
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn usage(msg: impl Into<String>) -> NssError {
    NssError::InvalidConfig(msg.into())
}

fn builtin_name(data: &str) -> Option<&str> {
    data.strip_prefix("builtin:")
}

fn parse_builtin(
    name: &str,
    samples: Option<usize>,
    family: Option<&FamilyArgs>,
) -> Result<Builtin> {
    let mut b = Builtin::from_name(name).ok_or_else(|| {
        usage(format!(
            "unknown builtin {name:?}; expected one of {}",
            Builtin::NAMES.join(", ")
        ))
    })?;
    if let (Builtin::ExpSubspace { n, .. }, Some(f)) = (b, family) {
        b = f.builtin(n);
    }
    Ok(match samples {
        Some(n) => b.with_samples(n),
        None => b,
    })
}

fn infer_format(path: &Path, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Libsvm,
    })
}

fn load_dataset(args: &DataArgs, seed: u64) -> Result<(LabeledDataset, bool)> {
    if let Some(name) = builtin_name(&args.data) {
        let b = parse_builtin(name, args.samples, None)?;
        return Ok((b.generate(seed)?, true));
    }
    let path = Path::new(&args.data);
    let data = match infer_format(path, args.format) {
        Format::Csv => {
            let col = args.label_col.map_or(LabelColumn::Auto, LabelColumn::Index);
            read_csv(path, &col)?
        }
        Format::Libsvm => read_libsvm(path, None)?,
    };
    Ok((data, false))
}

fn dimension_choice(dims: &DimArgs, once: bool) -> DimensionChoice {
    match dims.dim {
        Some(d) => DimensionChoice::Fixed(d),
        None => DimensionChoice::CrossValidate {
            candidates: dims.cv_dims.clone(),
            folds: dims.folds,
            once,
        },
    }
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| NssError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let (data, _) = load_dataset(&args.data, args.seed)?;
    let pre = Preprocessor::fit(data.samples(), args.pre.scale_mode(), args.pre.pca())?;
    let train = pre.apply_dataset(&data)?;
    let kind = ClassifierKind::from(args.classifier);
    let dim = match (kind, &args.dims.dim) {
        (ClassifierKind::Nss, Some(d)) => *d,
        (ClassifierKind::Nss, None) => {
            let grid = args
                .dims
                .cv_dims
                .clone()
                .unwrap_or_else(|| default_cv_grid(train.dim()));
            let report = nss_cross_validate(&train, &grid, args.dims.folds, args.seed)?;
            for (c, d) in report.candidate_dims.iter().enumerate() {
                info!("d = {d}: mean CV accuracy {:.4}", report.mean_accuracy(c));
            }
            report.chosen_dim
        }
        _ => 0,
    };
    let model = fit_classifier(kind, &train, dim)?;
    let acc = model.as_classifier().accuracy(&train)?;
    let file = ModelFile::new(model, pre, data.label_names().to_vec())?;
    file.save(&args.model)?;
    if kind == ClassifierKind::Nss {
        println!("classifier nss, dimension {dim}");
    } else {
        println!("classifier {}", kind.name());
    }
    println!("training accuracy {:.2}%", 100.0 * acc);
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let model = ModelFile::load(&args.model)?;
    let dim = model.input_dim();
    let (features, raw_labels) = match infer_format(&args.data, args.format) {
        Format::Csv => {
            let table = read_csv_table(&args.data, &LabelColumn::None)?;
            let has_label_header = table
                .header
                .as_ref()
                .is_some_and(|h| h.iter().any(|c| c == "label"));
            if has_label_header || table.features.cols() == dim + 1 {
                let t = read_csv_table(&args.data, &LabelColumn::Auto)?;
                (t.features, t.labels)
            } else {
                (table.features, None)
            }
        }
        Format::Libsvm => {
            let d = read_libsvm(&args.data, Some(dim))?;
            let raw = d.labels().iter().map(|&l| d.label_name(l)).collect();
            (d.samples().clone(), Some(raw))
        }
    };
    if features.cols() != dim {
        return Err(NssError::DimensionMismatch {
            expected: dim,
            found: features.cols(),
        });
    }
    let k = model.label_names.len();
    let mut out = String::from("label");
    if args.residuals {
        if !matches!(model.model, TrainedModel::Nss(_)) {
            return Err(usage("--residuals needs an NSS model"));
        }
        for name in &model.label_names {
            let _ = write!(out, ",residual_{name}");
        }
    }
    out.push('\n');
    let mut hits = 0;
    for (i, x) in features.row_iter().enumerate() {
        let class = model.predict(x)?;
        let label = model.label_names[class - 1];
        let _ = write!(out, "{label}");
        if args.residuals {
            let r = model.residuals(x)?.unwrap_or_else(|| vec![f64::NAN; k]);
            for v in r {
                let _ = write!(out, ",{v}");
            }
        }
        out.push('\n');
        if raw_labels.as_ref().is_some_and(|l| l[i] == label) {
            hits += 1;
        }
    }
    match &args.out {
        Some(p) => write_output(p, &out)?,
        None => print!("{out}"),
    }
    if raw_labels.is_some() && features.rows() > 0 {
        eprintln!(
            "accuracy {:.2}% ({hits}/{})",
            100.0 * hits as f64 / features.rows() as f64,
            features.rows()
        );
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let source = match builtin_name(&args.data.data) {
        Some(name) => DataSource::Builtin(parse_builtin(name, args.data.samples, None)?),
        None => DataSource::Dataset(load_dataset(&args.data, args.seed)?.0),
    };
    let mut classifiers: Vec<ClassifierKind> = args.classifiers.iter().map(|&c| c.into()).collect();
    if classifiers.is_empty() {
        classifiers = ClassifierKind::ALL.to_vec();
    }
    let config = BenchConfig {
        source,
        classifiers,
        train_fraction: args.train_frac,
        repeats: args.repeats,
        dimension: dimension_choice(&args.dims, args.cv_once),
        scale: args.pre.scale_mode(),
        pca: args.pre.pca(),
        seed: args.seed,
        serial: args.serial || args.timing,
    };
    let result = run_bench(&config)?;
    println!("repeats {}", config.repeats());
    print!("{}", result.format_table(args.timing));
    if let Some(p) = &args.out {
        write_output(p, &result.to_csv(args.timing))?;
    }
    Ok(())
}

fn cmd_consistency(args: ConsistencyArgs) -> Result<()> {
    let spec = args
        .family
        .builtin(0)
        .subspace_spec(args.seed)?
        .expect("exp-subspace has a subspace family");
    let settings = StudySettings {
        train_sizes: args
            .train_sizes
            .unwrap_or_else(|| DEFAULT_TRAIN_SIZES.to_vec()),
        trials: args.trials,
        n_test: args.n_test,
        mc_samples: args.mc_samples,
        seed: args.seed,
    };
    let curve = consistency_study(&spec, &settings)?;
    print!("{}", format_consistency_table(&curve));
    if let Some(p) = &args.out {
        curve.write_csv(p)?;
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let name = builtin_name(&args.data).ok_or_else(|| usage("gen needs --data builtin:<name>"))?;
    let b = parse_builtin(name, args.samples, Some(&args.family))?;
    let data = b.generate(args.seed)?;
    let text = match args.format {
        Format::Csv => format_csv(&data),
        Format::Libsvm => format_libsvm(&data),
    };
    write_output(&args.out, &text)?;
    let mut meta_path = args.out.clone().into_os_string();
    meta_path.push(".meta");
    write_metadata(&b.metadata(args.seed), PathBuf::from(meta_path))?;
    println!("wrote {} samples in {} dimensions", data.len(), data.dim());
    Ok(())
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Parse => 2,
        ErrorClass::Numeric => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Consistency(a) => cmd_consistency(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
