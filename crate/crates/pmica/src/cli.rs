//! Command-line entry point: reproducible runs of the estimation pipeline.
//!
//! Subcommands: `simulate`, `whiten`, `cumulant`, `fit`, `genericity`,
//! `metrics`, `experiment`. Data moves as CSV, tensors as the `symtensor`
//! text format, results as JSON with an embedded run manifest. Exit codes:
//! 0 success, 1 error; `genericity` additionally uses 2 (not generic) and
//! 3 (unsupported order).

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;

use crate::cumulants::{cumulant_tensor, pca_reduce, whiten, DataMatrix};
use crate::error::{Error, Result};
use crate::genericity::{is_generic_diag, is_generic_pmi, GenericityReport, GENERICITY_TOL};
use crate::harness;
use crate::manifest::RunManifest;
use crate::metrics::{scorecard, sp_matched_error};
use crate::optim::{rgd_fit, FitConfig, OrthoMatrix};
use crate::samplers::{
    mix, CorrelatedEnergySpec, NoiseDist, PositiveDist, ScaleModel, SourceSampler, SourceSpec,
    TreeSpec,
};
use crate::subspace::ZeroPattern;
use crate::symtensor::SymTensor;

#[derive(Parser, Debug)]
#[command(
    name = "pmica",
    version,
    about = "Blind source separation under pairwise mean independence"
)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw samples from a built-in source distribution, optionally mixed.
    Simulate(SimulateArgs),
    /// Center and decorrelate a CSV of samples.
    Whiten(WhitenArgs),
    /// Estimate a sample cumulant tensor from CSV data.
    Cumulant(CumulantArgs),
    /// Whiten, estimate the cumulant, and fit a rotation to a zero pattern.
    Fit(FitArgs),
    /// Certify whether a patterned tensor has a unique orthogonal eigenbasis.
    Genericity(GenericityArgs),
    /// Score a given rotation against data.
    Metrics(MetricsArgs),
    /// Run a scripted synthetic experiment, writing CSV tables.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// square | l1 | alpha:<a> | dirichlet:<n> | energy[:<n>] | tree:@file
    #[arg(long)]
    dist: String,
    #[arg(long)]
    n_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the distribution's standardization default.
    #[arg(long)]
    standardize: Option<bool>,
    /// Mixing matrix CSV; output rows become A s.
    #[arg(long)]
    mix: Option<String>,
    /// Output CSV path; a manifest is written alongside.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct WhitenArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = false)]
    has_header: bool,
    /// Whitened samples CSV.
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV for the whitening transform matrix.
    #[arg(long)]
    transform_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CumulantArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = false)]
    has_header: bool,
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// Whiten before estimating.
    #[arg(long, default_value_t = false)]
    whiten: bool,
    /// Output tensor path (text format).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = false)]
    has_header: bool,
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// diag | pmi | mi | refl | kindep:<k> | custom:@file
    #[arg(long, default_value = "pmi")]
    pattern: String,
    /// Reduce to k principal components before whitening.
    #[arg(long)]
    pca: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Gradient threshold relative to the squared tensor norm.
    #[arg(long, default_value_t = 1e-9)]
    grad_tol: f64,
    #[arg(long, default_value_t = 1.0)]
    step_init: f64,
    #[arg(long, default_value_t = 0.5)]
    backtrack_ratio: f64,
    #[arg(long, default_value_t = 1e-4)]
    armijo_c: f64,
    #[arg(long, default_value_t = 10)]
    n_inits: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Result JSON path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional CSV of recovered sources X_w Q.
    #[arg(long)]
    sources_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenericityArgs {
    /// Tensor in the text format.
    #[arg(long, conflicts_with = "from_data")]
    tensor: Option<PathBuf>,
    /// Estimate the cumulant from this CSV instead (whitened, then projected
    /// onto the pattern).
    #[arg(long)]
    from_data: Option<PathBuf>,
    #[arg(long, default_value_t = false)]
    has_header: bool,
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// pmi | diag
    #[arg(long, default_value = "pmi")]
    pattern: String,
    #[arg(long, default_value_t = GENERICITY_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = false)]
    has_header: bool,
    /// Rotation matrix CSV to score.
    #[arg(long)]
    rotation: PathBuf,
    #[arg(long, default_value = "pmi")]
    pattern: String,
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// Ground-truth rotation CSV for the signed-permutation-matched error.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// fig3 | fig4 | fig5 | fig6
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    /// SweepSpec JSON file (`@` prefix accepted).
    #[arg(long)]
    spec: Option<String>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Override the base seed of the spec.
    #[arg(long)]
    seed: Option<u64>,
}

/// Parse and execute; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Whiten(args) => cmd_whiten(args),
        Command::Cumulant(args) => cmd_cumulant(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Genericity(args) => cmd_genericity(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Experiment(args) => cmd_experiment(args),
    }
}

fn parse_dist(s: &str) -> Result<SourceSpec> {
    if s == "square" {
        return Ok(SourceSpec::square());
    }
    if s == "l1" {
        return Ok(SourceSpec::l1());
    }
    if let Some(a) = s.strip_prefix("alpha:") {
        let alpha: f64 = a
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad alpha `{a}`")))?;
        return Ok(SourceSpec::alpha_mix(alpha));
    }
    if let Some(n) = s.strip_prefix("dirichlet:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad dimension `{n}`")))?;
        return Ok(SourceSpec::dirichlet(n));
    }
    if s == "energy" || s.starts_with("energy:") {
        let n = match s.strip_prefix("energy:") {
            Some(n) => n
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad dimension in `{s}`")))?,
            None => 2,
        };
        return Ok(SourceSpec::correlated_energy(CorrelatedEnergySpec {
            n,
            scales: ScaleModel::Shared(PositiveDist::Uniform { lo: 0.5, hi: 1.5 }),
            noise: NoiseDist::StdGaussian,
        }));
    }
    if let Some(path) = s.strip_prefix("tree:@") {
        let text = std::fs::read_to_string(path)?;
        let tree: TreeSpec = serde_json::from_str(&text)?;
        return Ok(SourceSpec::tree(tree));
    }
    Err(Error::InvalidArgument(format!(
        "unknown distribution `{s}`; expected square|l1|alpha:<a>|dirichlet:<n>|energy[:<n>]|tree:@file"
    )))
}

fn strip_at(s: &str) -> &str {
    s.strip_prefix('@').unwrap_or(s)
}

fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let data = DataMatrix::read_csv(path, false)?;
    Ok(DMatrix::from_row_iterator(
        data.n_samples(),
        data.n_features(),
        data.values().iter().copied(),
    ))
}

fn write_matrix_csv(m: &DMatrix<f64>, path: &Path) -> Result<()> {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect();
    DataMatrix::from_rows(rows)?.write_csv(path)
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let started = Instant::now();
    let mut spec = parse_dist(&args.dist)?;
    if let Some(flag) = args.standardize {
        spec.standardize = flag;
    }
    let sampler = SourceSampler::new(spec.clone(), args.seed)?;
    let mut data = sampler.sample(args.n_samples)?;
    let mut manifest = RunManifest::new(
        "simulate",
        serde_json::json!({
            "dist": args.dist,
            "source_spec": spec,
            "n_samples": args.n_samples,
            "standardization_scales": sampler.scales(),
            "mix": args.mix,
        }),
        args.seed,
    );
    if let Some(mix_path) = &args.mix {
        let path = PathBuf::from(strip_at(mix_path));
        let a = read_matrix_csv(&path)?;
        manifest.add_input(&path)?;
        data = mix(&data, &a)?;
    }
    data.write_csv(&args.out)?;
    manifest.set_duration(started);
    emit_json(
        &serde_json::to_value(&manifest)?,
        Some(&manifest_path(&args.out)),
    )?;
    Ok(0)
}

fn cmd_whiten(args: WhitenArgs) -> Result<i32> {
    let started = Instant::now();
    let data = DataMatrix::read_csv(&args.input, args.has_header)?;
    let result = whiten(&data)?;
    result.whitened.write_csv(&args.out)?;
    if let Some(path) = &args.transform_out {
        write_matrix_csv(&result.transform, path)?;
    }
    // deviation of the whitened covariance from the identity
    let cov = result.whitened.covariance();
    let n = cov.nrows();
    let deviation = (&cov - DMatrix::<f64>::identity(n, n)).norm();
    let mut manifest = RunManifest::new(
        "whiten",
        serde_json::json!({
            "input": args.input,
            "has_header": args.has_header,
        }),
        0,
    );
    manifest.add_input(&args.input)?;
    manifest.set_duration(started);
    let report = serde_json::json!({
        "schema_version": crate::manifest::SCHEMA_VERSION,
        "n_samples": data.n_samples(),
        "n_features": data.n_features(),
        "mean": result.mean,
        "covariance_deviation": deviation,
        "transform": matrix_rows(&result.transform),
        "covariance_sqrt": matrix_rows(&result.covariance_sqrt),
        "manifest": manifest,
    });
    emit_json(&report, None)?;
    Ok(0)
}

fn cmd_cumulant(args: CumulantArgs) -> Result<i32> {
    let started = Instant::now();
    let data = DataMatrix::read_csv(&args.input, args.has_header)?;
    let data = if args.whiten {
        whiten(&data)?.whitened
    } else {
        data
    };
    let tensor = cumulant_tensor(&data, args.order)?;
    tensor.save(&args.out)?;
    let mut manifest = RunManifest::new(
        "cumulant",
        serde_json::json!({
            "input": args.input,
            "has_header": args.has_header,
            "order": args.order,
            "whiten": args.whiten,
        }),
        0,
    );
    manifest.add_input(&args.input)?;
    manifest.set_duration(started);
    emit_json(
        &serde_json::to_value(&manifest)?,
        Some(&manifest_path(&args.out)),
    )?;
    Ok(0)
}

fn cmd_fit(args: FitArgs) -> Result<i32> {
    let started = Instant::now();
    let pattern = ZeroPattern::parse(&args.pattern)?;
    let data = DataMatrix::read_csv(&args.input, args.has_header)?;
    let (data, explained) = match args.pca {
        Some(k) => {
            let (reduced, ratio) = pca_reduce(&data, k)?;
            (reduced, Some(ratio))
        }
        None => (data, None),
    };
    let whitened = whiten(&data)?;
    let kappa = cumulant_tensor(&whitened.whitened, args.order)?;
    let cfg = FitConfig {
        max_iters: args.max_iters,
        grad_tol: args.grad_tol,
        step_init: args.step_init,
        backtrack_ratio: args.backtrack_ratio,
        armijo_c: args.armijo_c,
        n_inits: args.n_inits,
        seed: args.seed,
    };
    let fit = rgd_fit(&kappa, &pattern, &cfg)?;
    let card = scorecard(&fit.best_q, &kappa, None)?;
    let a_hat = &whitened.covariance_sqrt * fit.best_q.matrix();
    if let Some(path) = &args.sources_out {
        let n = fit.best_q.dim();
        let q = fit.best_q.matrix();
        let rows: Vec<Vec<f64>> = whitened
            .whitened
            .rows()
            .map(|r| (0..n).map(|j| (0..n).map(|i| r[i] * q[(i, j)]).sum()).collect())
            .collect();
        DataMatrix::from_rows(rows)?.write_csv(path)?;
    }
    let mut manifest = RunManifest::new(
        "fit",
        serde_json::json!({
            "input": args.input,
            "has_header": args.has_header,
            "order": args.order,
            "pattern": args.pattern,
            "pca": args.pca,
            "fit": cfg,
        }),
        args.seed,
    );
    manifest.add_input(&args.input)?;
    manifest.set_duration(started);
    let report = serde_json::json!({
        "schema_version": crate::manifest::SCHEMA_VERSION,
        "q_hat": matrix_rows(fit.best_q.matrix()),
        "a_hat": matrix_rows(&a_hat),
        "best_value": fit.best_value,
        "best_init": fit.best_init,
        "explained_variance_ratio": explained,
        "scorecard": card,
        "per_init": fit.per_init,
        "objective_trace": fit.objective_trace,
        "manifest": manifest,
    });
    emit_json(&report, args.out.as_deref())?;
    Ok(0)
}

fn cmd_genericity(args: GenericityArgs) -> Result<i32> {
    let started = Instant::now();
    let mut manifest = RunManifest::new(
        "genericity",
        serde_json::json!({
            "pattern": args.pattern,
            "order": args.order,
            "tol": args.tol,
            "tensor": args.tensor,
            "from_data": args.from_data,
        }),
        0,
    );
    let pattern = ZeroPattern::parse(&args.pattern)?;
    if !matches!(pattern, ZeroPattern::Pmi | ZeroPattern::Diag) {
        return Err(Error::InvalidArgument(
            "genericity certificates exist for patterns `pmi` and `diag`".into(),
        ));
    }
    let tensor = match (&args.tensor, &args.from_data) {
        (Some(path), None) => {
            manifest.add_input(path)?;
            SymTensor::load(path)?
        }
        (None, Some(path)) => {
            manifest.add_input(path)?;
            let data = DataMatrix::read_csv(path, args.has_header)?;
            let whitened = whiten(&data)?.whitened;
            let kappa = cumulant_tensor(&whitened, args.order)?;
            // the certificate applies to the model tensor, i.e. the estimate
            // projected onto the pattern
            pattern.project(&kappa)
        }
        _ => {
            return Err(Error::InvalidArgument(
                "provide exactly one of --tensor and --from-data".into(),
            ))
        }
    };
    let report: GenericityReport = match pattern {
        ZeroPattern::Pmi => match is_generic_pmi(&tensor, args.tol) {
            Ok(r) => r,
            Err(Error::GenericityOrderUnsupported { order }) => {
                eprintln!(
                    "error: {}",
                    Error::GenericityOrderUnsupported { order }
                );
                return Ok(3);
            }
            Err(e) => return Err(e),
        },
        _ => is_generic_diag(&tensor, args.tol)?,
    };
    manifest.set_duration(started);
    let mut value = serde_json::to_value(&report)?;
    value["manifest"] = serde_json::to_value(&manifest)?;
    value["schema_version"] = serde_json::json!(crate::manifest::SCHEMA_VERSION);
    emit_json(&value, args.out.as_deref())?;
    Ok(if report.generic { 0 } else { 2 })
}

fn cmd_metrics(args: MetricsArgs) -> Result<i32> {
    let started = Instant::now();
    let pattern = ZeroPattern::parse(&args.pattern)?;
    let data = DataMatrix::read_csv(&args.input, args.has_header)?;
    let whitened = whiten(&data)?.whitened;
    let kappa = cumulant_tensor(&whitened, args.order)?;
    let q = OrthoMatrix::new(read_matrix_csv(&args.rotation)?)?;
    let truth = match &args.truth {
        Some(path) => Some(OrthoMatrix::new(read_matrix_csv(path)?)?),
        None => None,
    };
    let card = scorecard(&q, &kappa, truth.as_ref())?;
    let pattern_distance = crate::metrics::distance_to_subspace(&q, &kappa, &pattern)?;
    let sp = match &truth {
        Some(t) => Some(sp_matched_error(&q, t)?.1),
        None => None,
    };
    let mut manifest = RunManifest::new(
        "metrics",
        serde_json::json!({
            "input": args.input,
            "rotation": args.rotation,
            "pattern": args.pattern,
            "order": args.order,
        }),
        0,
    );
    manifest.add_input(&args.input)?;
    manifest.add_input(&args.rotation)?;
    manifest.set_duration(started);
    let report = serde_json::json!({
        "schema_version": crate::manifest::SCHEMA_VERSION,
        "scorecard": card,
        "pattern": args.pattern,
        "pattern_distance": pattern_distance,
        "matched_signed_permutation": sp,
        "manifest": manifest,
    });
    emit_json(&report, args.out.as_deref())?;
    Ok(0)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<i32> {
    let started = Instant::now();
    let mut manifest_inputs: Vec<PathBuf> = Vec::new();
    let mut spec = match (&args.preset, &args.spec) {
        (Some(name), None) => harness::preset(name)?,
        (None, Some(path)) => {
            let path = PathBuf::from(strip_at(path));
            let text = std::fs::read_to_string(&path)?;
            manifest_inputs.push(path);
            serde_json::from_str::<harness::SweepSpec>(&text)?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "provide exactly one of --preset and --spec".into(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        spec.base_seed = seed;
    }
    let output = harness::run_experiment(&spec)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let mut written = Vec::new();
    for (name, table) in &output.tables {
        let path = args.out_dir.join(format!("{name}.csv"));
        table.write_csv(&path)?;
        written.push(path.display().to_string());
    }
    let mut manifest = RunManifest::new("experiment", serde_json::to_value(&spec)?, spec.base_seed);
    for path in &manifest_inputs {
        manifest.add_input(path)?;
    }
    manifest.set_duration(started);
    let report = serde_json::json!({
        "schema_version": crate::manifest::SCHEMA_VERSION,
        "tables": written,
        "meta": output.meta,
        "manifest": manifest,
    });
    let name = match spec.experiment {
        harness::ExperimentId::AlphaSweep => "alpha_sweep",
        harness::ExperimentId::Gap4Curve => "gap4_curve",
        harness::ExperimentId::DimensionSweep => "dimension_sweep",
        harness::ExperimentId::TrialsSweep => "trials_sweep",
        harness::ExperimentId::SampleComplexity => "sample_complexity",
    };
    emit_json(
        &report,
        Some(&args.out_dir.join(format!("{name}.manifest.json"))),
    )?;
    println!("wrote {} table(s) to {}", written.len(), args.out_dir.display());
    Ok(0)
}
