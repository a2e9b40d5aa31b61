//! `l0prune` command-line interface.
//!
//! Exit codes: 0 on success (optimal), 2 when a time limit stopped a solve,
//! 1 on any error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use l0prune::bench::{run_bench, write_raw_csv, write_summary_csv, BenchConfig};
use l0prune::bnb::{solve_traced, SolveStatus, SolverConfig};
use l0prune::data::{generate, load_any, save_instance_dir, AmplitudeSign, SyntheticSpec};
use l0prune::oracle::{brute_force, DEFAULT_INNER_TOL};
use l0prune::path::{path_solve, write_path_csv, PathConfig};
use l0prune::trace::{JsonLines, TraceSink};
use l0prune::{DenseMatrix, LossKind, PenaltyKind, ProblemInstance};

#[derive(Parser)]
#[command(name = "l0prune", version, about = "Exact L0-regularized learning by branch-and-bound")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write the report as JSON.
    Solve(SolveArgs),
    /// Fit a regularization path and write one CSV row per point.
    Path(PathArgs),
    /// Run a benchmark described by a JSON config.
    Bench(BenchArgs),
    /// Generate a synthetic instance directory.
    Generate(GenerateArgs),
    /// Solve a small instance by exhaustive enumeration.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Ls,
    Logistic,
    Sqhinge,
}

#[derive(Clone, Copy, ValueEnum)]
enum PenaltyArg {
    Bigm,
    Bigml1,
    Bigml2,
}

#[derive(Args)]
struct DataArgs {
    /// Instance directory, `.csv` file or svmlight file.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    data: Option<PathBuf>,
    /// Synthetic instance as "m,n,k,rho,snr_db,seed".
    #[arg(long)]
    generate: Option<String>,
    /// Label column of a CSV input.
    #[arg(long, default_value = "y")]
    label_column: String,
    #[arg(long, value_enum, default_value = "ls")]
    loss: LossArg,
    #[arg(long, value_enum, default_value = "bigm")]
    penalty: PenaltyArg,
    /// Bound on the magnitude of every coefficient.
    #[arg(long = "M", default_value_t = 1.0)]
    big_m: f64,
    /// Weight of the L1 or L2 term.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    gap_tol: f64,
    /// Disable simultaneous pruning of direct successors.
    #[arg(long)]
    no_simpruning: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    lambda: f64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write one JSON line per node event.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Report destination; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PathArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0.7)]
    lambda_factor: f64,
    #[arg(long, default_value_t = 10)]
    max_points: usize,
    /// CSV destination; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    config: PathBuf,
    /// Per-run CSV.
    #[arg(long, default_value = "bench_raw.csv")]
    raw: PathBuf,
    /// Summary CSV.
    #[arg(long, default_value = "bench_summary.csv")]
    summary: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    /// "m,n,k,rho,snr_db,seed"
    spec: String,
    /// Alternate the signs of the true coefficients.
    #[arg(long)]
    alternating: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 16)]
    max_n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_spec(s: &str, sign: AmplitudeSign) -> Result<SyntheticSpec> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        bail!("expected \"m,n,k,rho,snr_db,seed\", got \"{s}\"");
    }
    let int = |i: usize| -> Result<usize> {
        parts[i]
            .parse()
            .with_context(|| format!("invalid integer `{}`", parts[i]))
    };
    let real = |i: usize| -> Result<f64> {
        parts[i]
            .parse()
            .with_context(|| format!("invalid number `{}`", parts[i]))
    };
    Ok(SyntheticSpec {
        m: int(0)?,
        n: int(1)?,
        k: int(2)?,
        rho: real(3)?,
        snr_db: real(4)?,
        seed: parts[5]
            .parse()
            .with_context(|| format!("invalid seed `{}`", parts[5]))?,
        amplitude_sign: sign,
    })
}

impl DataArgs {
    fn loss(&self) -> LossKind {
        match self.loss {
            LossArg::Ls => LossKind::LeastSquares,
            LossArg::Logistic => LossKind::Logistic,
            LossArg::Sqhinge => LossKind::SquaredHinge,
        }
    }

    fn penalty(&self) -> PenaltyKind {
        let (big_m, alpha) = (self.big_m, self.alpha);
        match self.penalty {
            PenaltyArg::Bigm => PenaltyKind::BigM { big_m },
            PenaltyArg::Bigml1 => PenaltyKind::BigML1 { big_m, alpha },
            PenaltyArg::Bigml2 => PenaltyKind::BigML2 { big_m, alpha },
        }
    }

    fn load(&self) -> Result<(DenseMatrix, Vec<f64>)> {
        let (a, mut y) = match (&self.data, &self.generate) {
            (Some(path), _) => {
                load_any(path, &self.label_column).with_context(|| format!("loading {}", path.display()))?
            }
            (None, Some(spec)) => {
                let inst = generate(&parse_spec(spec, AmplitudeSign::AllPositive)?)?;
                (inst.a, inst.y)
            }
            (None, None) => bail!("one of --data or --generate is required"),
        };
        if self.loss().is_classification() {
            if y.iter().all(|&v| v == 0.0 || v == 1.0) {
                y.iter_mut().for_each(|v| *v = 2.0 * *v - 1.0);
            } else if self.generate.is_some() {
                y.iter_mut().for_each(|v| *v = if *v >= 0.0 { 1.0 } else { -1.0 });
            }
        }
        Ok((a, y))
    }

    fn instance(&self, lambda: f64) -> Result<ProblemInstance> {
        let (a, y) = self.load()?;
        let inst = ProblemInstance::new(a, y, self.loss(), self.penalty(), lambda)?;
        inst.ensure_valid()?;
        Ok(inst)
    }
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            gap_tol: self.gap_tol,
            time_limit: self.time_limit,
            simultaneous_pruning: !self.no_simpruning,
            ..SolverConfig::default()
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal => 0,
        SolveStatus::TimeLimit => 2,
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8> {
    let inst = args.data.instance(args.lambda)?;
    let config = args.solver.config();
    let report = match &args.trace {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut sink = JsonLines::new(BufWriter::new(file));
            let report = solve_traced(&inst, &config, None, Some(&mut sink as &mut dyn TraceSink))?;
            sink.finish().with_context(|| format!("writing {}", path.display()))?;
            report
        }
        None => l0prune::solve(&inst, &config, None)?,
    };
    let mut out = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(status_code(report.status))
}

fn cmd_path(args: PathArgs) -> Result<u8> {
    // λ is replaced along the path; any positive placeholder passes validation.
    let inst = args.data.instance(1.0)?;
    let mut solver = args.solver.config();
    let path = PathConfig {
        lambda_factor: args.lambda_factor,
        max_points: args.max_points,
        per_point_time_limit: solver.time_limit.take(),
        total_time_limit: None,
    };
    let reports = path_solve(&inst, &path, &solver)?;
    write_path_csv(output(args.out.as_deref())?, &reports)?;
    let worst = reports.iter().map(|r| status_code(r.status)).max().unwrap_or(0);
    Ok(worst)
}

fn cmd_bench(args: BenchArgs) -> Result<u8> {
    let cfg = BenchConfig::from_json_file(&args.config)
        .with_context(|| format!("reading bench config {}", args.config.display()))?;
    let out = run_bench(&cfg)?;
    write_raw_csv(&args.raw, &out.raw)?;
    write_summary_csv(&args.summary, &out.summary)?;
    eprintln!(
        "wrote {} runs to {} and the summary to {}",
        out.raw.len(),
        args.raw.display(),
        args.summary.display()
    );
    Ok(0)
}

fn cmd_generate(args: GenerateArgs) -> Result<u8> {
    let sign = if args.alternating {
        AmplitudeSign::Alternating
    } else {
        AmplitudeSign::AllPositive
    };
    let spec = parse_spec(&args.spec, sign)?;
    let inst = generate(&spec)?;
    let meta = serde_json::to_value(spec)?;
    save_instance_dir(&args.out, &inst.a, &inst.y, Some(&inst.x_true), &meta)?;
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8> {
    let inst = args.data.instance(args.lambda)?;
    let result = brute_force(&inst, args.max_n, DEFAULT_INNER_TOL)?;
    let mut out = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &result)?;
    writeln!(out)?;
    out.flush()?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Path(a) => cmd_path(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
