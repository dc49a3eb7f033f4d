use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use nnrank::bounds::{
    best_integer, bound_report, round_certificate, verify_certificate, BoundReport, Certificate,
    ReportOptions,
};
use nnrank::generators;
use nnrank::io::{read_matrix, to_csv, to_matrix_market, MatrixFormat};
use nnrank::relaxations::{build, export_sdpa, RelaxationSpec, SymmetricReduction};
use nnrank::solver::SolverSettings;
use nnrank::{weighted_gram_trace, DenseMatrix, Error, NonnegMatrix, SymWeight};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "nnrank",
    version,
    about = "Semidefinite lower bounds on the nonnegative rank"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute every lower bound for one matrix and write a JSON report.
    Bound(BoundArgs),
    /// Write one of the built-in example matrices.
    Generate(GenerateArgs),
    /// Check a certificate file against a matrix.
    Certify(CertifyArgs),
    /// Print the bounds side by side.
    Compare(BoundArgs),
    /// Write the compiled relaxation in SDPA sparse format.
    ExportSdpa(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReductionArg {
    Auto,
    On,
    Off,
}

impl From<ReductionArg> for SymmetricReduction {
    fn from(r: ReductionArg) -> Self {
        match r {
            ReductionArg::Auto => SymmetricReduction::Auto,
            ReductionArg::On => SymmetricReduction::On,
            ReductionArg::Off => SymmetricReduction::Off,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Matrix file (MatrixMarket array or CSV).
    #[arg(short, long)]
    pub input: PathBuf,
    /// Matrix file format; guessed from the extension when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<MatrixFormat>,
}

#[derive(Debug, Args)]
pub struct RelaxationArgs {
    /// Relaxation level k.
    #[arg(short = 'k', long, default_value_t = 0)]
    pub level: usize,
    /// Solver tolerance on the relative residuals.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
    /// Row weight P (defaults to the identity).
    #[arg(long)]
    pub weights_p: Option<PathBuf>,
    /// Column weight Q (defaults to the identity).
    #[arg(long)]
    pub weights_q: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReductionArg::Auto)]
    pub symmetric_reduction: ReductionArg,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub relaxation: RelaxationArgs,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub output_format: Option<OutputFormat>,
    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Also write the level-0 certificate as JSON.
    #[arg(long)]
    pub certificate_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorName {
    CohenRothblum,
    PerturbedCohenRothblum,
    BooleanRank,
    HypercubeSlack,
    Derangement,
    ScaledDiagonal,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub name: GeneratorName,
    /// Size parameter (hypercube dimension, derangement or diagonal size).
    #[arg(long)]
    pub n: Option<usize>,
    /// Perturbation for perturbed-cohen-rothblum, weight entry for scaled-diagonal.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Leading diagonal entry for scaled-diagonal (defaults to n).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    pub format: Option<MatrixFormat>,
    /// hypercube-slack: write the closed-form certificate here.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// scaled-diagonal: write the weight matrix diag(eps, 1, ..., 1) here.
    #[arg(long)]
    pub weights_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Certificate JSON file.
    #[arg(short, long)]
    pub certificate: PathBuf,
    /// Feasibility tolerance for PASS.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub relaxation: RelaxationArgs,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn parse_format(s: &str) -> std::result::Result<MatrixFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Runs one command and returns its exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Bound(args) => cmd_bound(&args, false),
        Command::Compare(args) => cmd_bound(&args, true),
        Command::Generate(args) => cmd_generate(&args).map(|_| EXIT_OK),
        Command::Certify(args) => cmd_certify(&args),
        Command::ExportSdpa(args) => cmd_export_sdpa(&args).map(|_| EXIT_OK),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> nnrank::Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })
        }
    }
}

fn load_input(args: &InputArgs) -> nnrank::Result<NonnegMatrix> {
    NonnegMatrix::new(read_matrix(&args.input, args.format)?)
}

fn load_weights(
    args: &RelaxationArgs,
    a: &DenseMatrix,
) -> nnrank::Result<Option<(SymWeight, SymWeight)>> {
    if args.weights_p.is_none() && args.weights_q.is_none() {
        return Ok(None);
    }
    let load = |path: &Option<PathBuf>, dim: usize| match path {
        Some(p) => SymWeight::new(read_matrix(p, None)?),
        None => Ok(SymWeight::identity(dim)),
    };
    Ok(Some((
        load(&args.weights_p, a.rows())?,
        load(&args.weights_q, a.cols())?,
    )))
}

fn relaxation_setup(
    args: &RelaxationArgs,
    a: &DenseMatrix,
) -> nnrank::Result<(RelaxationSpec, SolverSettings)> {
    if !(args.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    let mut spec =
        RelaxationSpec::level(args.level).with_reduction(args.symmetric_reduction.into());
    spec.weights = load_weights(args, a)?;
    let settings = SolverSettings::default()
        .with_tol(args.tol)
        .with_max_iter(args.max_iter);
    Ok((spec, settings))
}

fn cmd_bound(args: &BoundArgs, compare: bool) -> nnrank::Result<i32> {
    let a = load_input(&args.input)?;
    let (spec, settings) = relaxation_setup(&args.relaxation, &a)?;
    let opts = ReportOptions {
        spec: spec.clone(),
        settings,
        timestamp: !args.no_timestamp && !compare,
        ..ReportOptions::default()
    };
    let report = bound_report(&a, &opts)?;
    let default_format = if compare {
        OutputFormat::Text
    } else {
        OutputFormat::Json
    };
    let text = match args.output_format.unwrap_or(default_format) {
        OutputFormat::Json => report.to_json()? + "\n",
        OutputFormat::Csv => report_csv(&report),
        OutputFormat::Text => report_table(&report),
    };
    emit(args.output.as_deref(), &text)?;
    if let Some(path) = &args.certificate_out {
        let level0 = RelaxationSpec { level: 0, ..spec };
        let result = nnrank::relaxations::solve_relaxation(&a, &level0, &settings)?;
        let cert = result
            .certificate
            .ok_or_else(|| Error::InvalidArgument("no certificate for this relaxation".into()))?;
        emit(Some(path), &(cert.to_json()? + "\n"))?;
    }
    Ok(if report.converged() {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    })
}

fn report_csv(r: &BoundReport) -> String {
    let mut out = String::from("bound,value\n");
    for (name, v) in r.bounds.values() {
        writeln!(out, "{name},{v}").unwrap();
    }
    writeln!(out, "certified_value,{}", r.certified_value).unwrap();
    writeln!(out, "best_integer_bound,{}", r.best_integer_bound).unwrap();
    out
}

/// One row per bound with its value and the integer bound it implies.
pub fn report_table(r: &BoundReport) -> String {
    let mut rows: Vec<(String, String, String)> = r
        .bounds
        .values()
        .into_iter()
        .filter(|(name, _)| name != "rectangle_cover")
        .map(|(name, v)| {
            let implied = if name == "nu_plus_0_ratio" {
                r.certified_ratio
            } else {
                v
            };
            (name, format!("{v:.6}"), best_integer(implied).to_string())
        })
        .collect();
    rows.push(match r.bounds.rectangle_cover {
        Some(c) => ("rectangle_cover".into(), c.to_string(), c.to_string()),
        None => (
            "rectangle_cover".into(),
            "n/a: too large".into(),
            "-".into(),
        ),
    });
    let mut out = String::new();
    writeln!(
        out,
        "matrix {}x{}  frobenius {:.6}  status {}",
        r.m, r.n, r.frobenius, r.status
    )
    .unwrap();
    writeln!(out, "{:<18} {:>16} {:>8}", "bound", "value", "integer").unwrap();
    for (name, v, i) in rows {
        writeln!(out, "{name:<18} {v:>16} {i:>8}").unwrap();
    }
    writeln!(out, "best integer bound: {}", r.best_integer_bound).unwrap();
    out
}

fn require<T>(v: Option<T>, flag: &str, name: &str) -> nnrank::Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("{name} needs --{flag}")))
}

fn cmd_generate(args: &GenerateArgs) -> nnrank::Result<()> {
    use GeneratorName::*;
    if args.certificate.is_some() && args.name != HypercubeSlack {
        return Err(Error::InvalidArgument(
            "--certificate is only available for hypercube-slack".into(),
        ));
    }
    if args.weights_out.is_some() && args.name != ScaledDiagonal {
        return Err(Error::InvalidArgument(
            "--weights-out is only available for scaled-diagonal".into(),
        ));
    }
    let matrix = match args.name {
        CohenRothblum => generators::cohen_rothblum(),
        PerturbedCohenRothblum => generators::perturbed_cohen_rothblum(require(
            args.eps,
            "eps",
            "perturbed-cohen-rothblum",
        )?)?,
        BooleanRank => generators::boolean_rank_example(),
        HypercubeSlack => {
            let h = generators::hypercube_slack(require(args.n, "n", "hypercube-slack")?)?;
            if let Some(path) = &args.certificate {
                emit(Some(path), &(h.certificate().to_json()? + "\n"))?;
            }
            h.slack
        }
        Derangement => generators::derangement(require(args.n, "n", "derangement")?)?,
        ScaledDiagonal => {
            let n = require(args.n, "n", "scaled-diagonal")?;
            if let Some(path) = &args.weights_out {
                let (p, _) = generators::scaled_diagonal_weights(
                    n,
                    require(args.eps, "eps", "--weights-out")?,
                )?;
                emit(
                    Some(path),
                    &format_matrix(p.matrix(), args.format, Some(path)),
                )?;
            }
            generators::scaled_diagonal(n, args.beta.unwrap_or(n as f64))?
        }
    };
    emit(
        args.output.as_deref(),
        &format_matrix(&matrix, args.format, args.output.as_deref()),
    )
}

fn format_matrix(m: &DenseMatrix, format: Option<MatrixFormat>, path: Option<&Path>) -> String {
    let format =
        format.unwrap_or_else(|| path.map_or(MatrixFormat::MatrixMarket, MatrixFormat::from_path));
    match format {
        MatrixFormat::MatrixMarket => to_matrix_market(m),
        MatrixFormat::Csv => to_csv(m),
    }
}

fn cmd_certify(args: &CertifyArgs) -> nnrank::Result<i32> {
    let a = load_input(&args.input)?;
    let path = &args.certificate;
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    let cert = Certificate::from_json(&text)?;
    let check = verify_certificate(&a, &cert)?;
    let rounded = round_certificate(&a, &cert)?;
    let denominator = match &cert.weights {
        Some((p, q)) => weighted_gram_trace(&a, p, q)?.sqrt(),
        None => a.frobenius_norm(),
    };
    let ratio = (rounded.certified_value.max(0.0) / denominator).powi(2);
    let pass = check.passes(args.tol);
    let mut out = String::new();
    writeln!(
        out,
        "decomposition_residual {:.3e}",
        check.decomposition_residual
    )
    .unwrap();
    writeln!(out, "nonneg_min {:.3e}", check.nonneg_min).unwrap();
    writeln!(out, "psd_min_eigenvalue {:.3e}", check.psd_min_eigenvalue).unwrap();
    writeln!(
        out,
        "implied_psd_min_eigenvalue {:.3e}",
        check.implied_psd_min_eigenvalue
    )
    .unwrap();
    writeln!(out, "objective {:.12}", check.objective).unwrap();
    writeln!(out, "certified_value {:.12}", rounded.certified_value).unwrap();
    writeln!(out, "certified_ratio {:.9}", ratio).unwrap();
    writeln!(out, "certified_integer_bound {}", best_integer(ratio)).unwrap();
    writeln!(out, "{}", if pass { "PASS" } else { "FAIL" }).unwrap();
    emit(args.output.as_deref(), &out)?;
    Ok(if pass { EXIT_OK } else { EXIT_NUMERICAL })
}

fn cmd_export_sdpa(args: &ExportArgs) -> nnrank::Result<()> {
    let a = load_input(&args.input)?;
    let (spec, _) = relaxation_setup(&args.relaxation, &a)?;
    let compiled = build(&a, &spec)?;
    let comment = format!(
        "nnrank level-{} relaxation of a {}x{} matrix; optimal value is -nu_plus",
        spec.level,
        a.rows(),
        a.cols()
    );
    export_sdpa(&compiled.problem, &args.output, Some(&comment))
}
