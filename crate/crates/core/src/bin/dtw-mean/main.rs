//! Command-line front end for the `dtw_mean` library.
//!
//! Machine-readable results go to stdout or to files; progress and
//! human-readable summaries go to stderr. Exit codes: 0 success, 1 usage
//! error, 2 data error, 3 enumeration guard exceeded.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dtw_mean::dataset::{
    format_delimited, format_series_matrix, load_delimited, load_manifest, load_series_matrix,
    synth_sines_with, write_delimited, Dataset, Delimiter, LabelColumn, SynthParams,
};
use dtw_mean::harness::{run_protocol_a, run_protocol_b, summarize, write_outputs, ProtocolConfig};
use dtw_mean::optimality::{certify_local_min, check_necessary, global_mean_oracle, DEFAULT_TOLERANCE};
use dtw_mean::solvers::{seeded_rng, solve, Algorithm, InitStrategy, Sampling, SgStep, SolverOptions};
use dtw_mean::{dtw, Error, MeanResult, TimeSeries};

#[derive(Parser, Debug)]
#[command(name = "dtw-mean", version, about = "Sample means of time series under dynamic time warping")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Worker threads; 0 uses every available core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Output format for results printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Whether the first field of every row is an integer class label.
    #[arg(long, global = true, value_enum, default_value_t = Labels::None)]
    labels: Labels,

    /// Field separator of input files.
    #[arg(long, global = true, value_enum, default_value_t = Sep::Auto)]
    delimiter: Sep,

    /// Treat --data as a manifest of multivariate series files.
    #[arg(long, global = true, default_value_t = false)]
    manifest: bool,

    /// Z-normalize every input series before use.
    #[arg(long, global = true, default_value_t = false)]
    z_normalize: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Labels {
    None,
    First,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sep {
    Auto,
    Tab,
    Comma,
    Whitespace,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algo {
    Sg,
    Mm,
    Ssg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StepRule {
    /// Per-coordinate step; SG then coincides with MM.
    PerCoordinate,
    /// Decaying scalar step from --eta0 to --eta1.
    Scalar,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Draw {
    Permutation,
    Uniform,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Protocol {
    /// Repeated trials on the whole dataset.
    ProtocolA,
    /// Repeated trials on random subsamples of each --sizes entry.
    ProtocolB,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// DTW distance and optimal warping path between two series.
    Dtw {
        /// File holding the first series.
        a: PathBuf,
        /// File holding the second series.
        b: PathBuf,
        /// Row of A to use when A holds several series.
        #[arg(long, default_value_t = 0)]
        a_index: usize,
        /// Row of B to use when B holds several series.
        #[arg(long, default_value_t = 0)]
        b_index: usize,
        /// Read A and B as one time point per line, one column per dimension.
        #[arg(long, default_value_t = false)]
        matrix: bool,
    },
    /// Compute a sample mean.
    Mean {
        #[arg(long, value_enum)]
        algo: Algo,
        /// Dataset file.
        #[arg(long)]
        data: PathBuf,
        /// Epoch budget.
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        /// Initial step size.
        #[arg(long, default_value_t = 0.05)]
        eta0: f64,
        /// Final step size.
        #[arg(long, default_value_t = 0.005)]
        eta1: f64,
        /// Initialization: random-member, random-series, medoid,
        /// subsample-medoid=K or file=PATH (one time point per line).
        #[arg(long, default_value = "random-member")]
        init: String,
        /// Seed for initialization and sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// SG step rule.
        #[arg(long, value_enum, default_value_t = StepRule::PerCoordinate)]
        sg_step: StepRule,
        /// SSG sample selection.
        #[arg(long, value_enum, default_value_t = Draw::Permutation)]
        sampling: Draw,
        /// Stop after this many evaluated epochs without improvement.
        #[arg(long)]
        patience: Option<usize>,
        /// SSG evaluates the Fréchet function every this many epochs.
        #[arg(long, default_value_t = 1)]
        track_every: usize,
        /// Directory for solution.tsv, trace.csv and result.json; without it
        /// the result is printed to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the optimality conditions at a candidate mean.
    Verify {
        /// Dataset file.
        #[arg(long)]
        data: PathBuf,
        /// Candidate series, one time point per line.
        #[arg(long)]
        candidate: PathBuf,
        /// Tolerance of the condition checks.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Also try to certify a strict local minimum.
        #[arg(long, default_value_t = false)]
        certify: bool,
    },
    /// Exact global mean by exhaustive enumeration (tiny inputs only).
    Oracle {
        /// Dataset file.
        #[arg(long)]
        data: PathBuf,
        /// Length of the mean.
        #[arg(long)]
        length: usize,
    },
    /// Multi-trial comparison of SSG and MM.
    Bench {
        #[arg(value_enum)]
        protocol: Protocol,
        /// Dataset file.
        #[arg(long)]
        data: PathBuf,
        /// Trials per sample size.
        #[arg(long, default_value_t = 30)]
        trials: usize,
        /// Epoch budget of both solvers.
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        /// Comma-separated subsample sizes (protocol-b only).
        #[arg(long, value_delimiter = ',', default_values_t = [10, 100, 1000])]
        sizes: Vec<usize>,
        /// Master seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial SSG step size.
        #[arg(long, default_value_t = 0.05)]
        eta0: f64,
        /// Final SSG step size.
        #[arg(long, default_value_t = 0.005)]
        eta1: f64,
        /// Directory for records.csv, traces.csv and summary.json; without it
        /// the summary is printed to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic dataset of warped noisy sinusoids.
    Synth {
        /// Number of series.
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Length of each series.
        #[arg(long, default_value_t = 64)]
        length: usize,
        /// Standard deviation of the additive noise.
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        /// Seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; without it the dataset is printed to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

/// Maps a library error to an exit code, prefixing it with the flag or
/// file it came from.
fn fail(context: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let code = match e {
            Error::Guard(_) => 3,
            Error::InvalidArgument(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: format!("{context}: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads(cli.global.threads)?;
    let g = &cli.global;
    match cli.command {
        Command::Dtw {
            a,
            b,
            a_index,
            b_index,
            matrix,
        } => cmd_dtw(g, &a, a_index, &b, b_index, matrix),
        Command::Mean {
            algo,
            data,
            epochs,
            eta0,
            eta1,
            init,
            seed,
            sg_step,
            sampling,
            patience,
            track_every,
            out,
        } => {
            let opts = SolverOptions {
                algorithm: match algo {
                    Algo::Sg => Algorithm::Sg,
                    Algo::Mm => Algorithm::Mm,
                    Algo::Ssg => Algorithm::Ssg,
                },
                max_epochs: epochs,
                init: parse_init(&init, g)?,
                eta0,
                eta1,
                seed,
                track_best_every: track_every,
                no_improvement_patience: patience,
                sg_step: match sg_step {
                    StepRule::PerCoordinate => SgStep::PerCoordinate,
                    StepRule::Scalar => SgStep::Scalar { horizon: None },
                },
                sampling: match sampling {
                    Draw::Permutation => Sampling::Permutation,
                    Draw::Uniform => Sampling::Uniform,
                },
                record_iterates: false,
            };
            opts.validate().map_err(fail("mean"))?;
            cmd_mean(g, &data, &opts, out.as_deref())
        }
        Command::Verify {
            data,
            candidate,
            tol,
            certify,
        } => cmd_verify(g, &data, &candidate, tol, certify),
        Command::Oracle { data, length } => cmd_oracle(g, &data, length),
        Command::Bench {
            protocol,
            data,
            trials,
            epochs,
            sizes,
            seed,
            eta0,
            eta1,
            out,
        } => {
            let cfg = ProtocolConfig {
                trials,
                epochs,
                seed,
                eta0,
                eta1,
            };
            SolverOptions {
                max_epochs: epochs,
                eta0,
                eta1,
                ..SolverOptions::default()
            }
            .validate()
            .map_err(fail("bench"))?;
            cmd_bench(g, protocol, &data, &sizes, &cfg, out.as_deref())
        }
        Command::Synth {
            count,
            length,
            sigma,
            seed,
            out,
        } => cmd_synth(g, count, length, sigma, seed, out.as_deref()),
    }
}

fn configure_threads(threads: usize) -> CliResult<()> {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::usage(format!("--threads {threads}: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn delimiter(g: &Global) -> Delimiter {
    match g.delimiter {
        Sep::Auto => Delimiter::Auto,
        Sep::Tab => Delimiter::Tab,
        Sep::Comma => Delimiter::Comma,
        Sep::Whitespace => Delimiter::Whitespace,
    }
}

fn load_data(g: &Global, path: &Path) -> CliResult<Dataset> {
    let context = format!("--data {}", path.display());
    let data = if g.manifest {
        load_manifest(path, delimiter(g))
    } else {
        let labels = match g.labels {
            Labels::None => LabelColumn::None,
            Labels::First => LabelColumn::First,
        };
        load_delimited(path, delimiter(g), labels)
    }
    .map_err(fail(&context))?;
    Ok(if g.z_normalize { data.z_normalized() } else { data })
}

fn load_matrix(g: &Global, flag: &str, path: &Path) -> CliResult<TimeSeries> {
    let x = load_series_matrix(path, delimiter(g)).map_err(fail(&format!("{flag} {}", path.display())))?;
    Ok(if g.z_normalize { x.z_normalized() } else { x })
}

fn parse_init(text: &str, g: &Global) -> CliResult<InitStrategy> {
    let bad = || {
        Failure::usage(format!(
            "--init {text:?}: expected random-member, random-series, medoid, subsample-medoid=K or file=PATH"
        ))
    };
    Ok(match text.split_once('=') {
        None => match text {
            "random-member" => InitStrategy::RandomMember,
            "random-series" => InitStrategy::RandomSeries,
            "medoid" => InitStrategy::Medoid,
            _ => return Err(bad()),
        },
        Some(("subsample-medoid", k)) => InitStrategy::SubsampleMedoid(k.parse().map_err(|_| bad())?),
        Some(("file", path)) => InitStrategy::Given(load_matrix(g, "--init", Path::new(path))?),
        Some(_) => return Err(bad()),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn cmd_dtw(g: &Global, a: &Path, ai: usize, b: &Path, bi: usize, matrix: bool) -> CliResult<()> {
    let pick = |path: &Path, index: usize, which: &str| -> CliResult<TimeSeries> {
        if matrix {
            return load_matrix(g, which, path);
        }
        let data = load_data(g, path)?;
        if index >= data.len() {
            return Err(Failure::usage(format!(
                "--{which}-index {index}: {} holds only {} series",
                path.display(),
                data.len()
            )));
        }
        Ok(data.sample.get(index).clone())
    };
    let (x, y) = (pick(a, ai, "a")?, pick(b, bi, "b")?);
    let r = dtw(&x, &y).map_err(fail("dtw"))?;
    match g.format {
        Format::Text => print!("{}\n{}\n", r.distance, r.path),
        Format::Json => print!("{}", to_json(&r)),
    }
    Ok(())
}

fn trace_csv(result: &MeanResult) -> String {
    let mut s = String::from("epoch,variation,raw_variation,visited\n");
    for r in &result.trace {
        let raw = r.raw_variation.map_or_else(String::new, |v| v.to_string());
        writeln!(s, "{},{},{},{}", r.epoch, r.variation, raw, r.visited).unwrap();
    }
    s
}

#[derive(Serialize)]
struct MeanOutput<'a> {
    options: &'a SolverOptions,
    #[serde(flatten)]
    result: &'a MeanResult,
}

fn cmd_mean(g: &Global, data: &Path, opts: &SolverOptions, out: Option<&Path>) -> CliResult<()> {
    let ds = load_data(g, data)?;
    let result = solve(&ds.sample, opts).map_err(fail("mean"))?;
    eprintln!(
        "{}: variation {} after {} epochs ({}), {} series visited",
        opts.algorithm.name(),
        result.best_variation,
        result.epochs_run,
        result.terminated_by.tag(),
        result.visited_examples
    );
    let json = to_json(&MeanOutput { options: opts, result: &result });
    match out {
        None => match g.format {
            Format::Json => print!("{json}"),
            Format::Text => print!("{}", format_series_matrix(&result.best, Delimiter::Tab)),
        },
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure {
                code: 2,
                message: format!("--out {}: {e}", dir.display()),
            })?;
            write_file(&dir.join("solution.tsv"), &format_series_matrix(&result.best, Delimiter::Tab))?;
            write_file(&dir.join("trace.csv"), &trace_csv(&result))?;
            write_file(&dir.join("result.json"), &json)?;
        }
    }
    Ok(())
}

fn cmd_verify(g: &Global, data: &Path, candidate: &Path, tol: f64, certify: bool) -> CliResult<()> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::usage(format!("--tol {tol}: must be finite and nonnegative")));
    }
    let ds = load_data(g, data)?;
    let z = load_matrix(g, "--candidate", candidate)?;
    let report = if certify {
        certify_local_min(&z, &ds.sample, tol)
    } else {
        check_necessary(&z, &ds.sample, tol)
    }
    .map_err(fail("verify"))?;
    eprintln!(
        "variation {}: (C1) {}, (C2) {}, {:?}",
        report.variation,
        if report.c1_holds { "holds" } else { "fails" },
        if report.c2_holds { "holds" } else { "fails" },
        report.certificate
    );
    print!("{}", to_json(&report));
    Ok(())
}

fn cmd_oracle(g: &Global, data: &Path, length: usize) -> CliResult<()> {
    let ds = load_data(g, data)?;
    let r = global_mean_oracle(&ds.sample, length).map_err(fail(&format!("oracle --length {length}")))?;
    eprintln!("global mean over {} configurations: value {}", r.configurations, r.value);
    match g.format {
        Format::Json => print!("{}", to_json(&r)),
        Format::Text => print!("{}", format_series_matrix(&r.solution, Delimiter::Tab)),
    }
    Ok(())
}

fn cmd_bench(
    g: &Global,
    protocol: Protocol,
    data: &Path,
    sizes: &[usize],
    cfg: &ProtocolConfig,
    out: Option<&Path>,
) -> CliResult<()> {
    let ds = load_data(g, data)?;
    let records = match protocol {
        Protocol::ProtocolA => run_protocol_a(&ds, cfg),
        Protocol::ProtocolB => run_protocol_b(&ds, sizes, cfg),
    }
    .map_err(fail("bench"))?;
    let summary = match out {
        Some(dir) => write_outputs(dir, &records).map_err(fail(&format!("--out {}", dir.display())))?,
        None => {
            let s = summarize(&records).map_err(fail("bench"))?;
            print!("{}", to_json(&s));
            s
        }
    };
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("{} trials, variants {}", summary.trials, summary.variants.join(" "));
    for row in &summary.runtime.rows {
        eprintln!(
            "N = {}: median visited SSG-e' {} vs MM {} ({} of {} trials excluded)",
            row.size, row.median_ssg_visited, row.median_mm_visited, row.excluded, row.trials
        );
    }
    Ok(())
}

fn cmd_synth(g: &Global, count: usize, length: usize, sigma: f64, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let params = SynthParams::new(count, length, sigma);
    let ds = synth_sines_with(&params, &mut seeded_rng(seed)).map_err(fail("synth"))?;
    let sep = match g.delimiter {
        Sep::Auto => Delimiter::Tab,
        _ => delimiter(g),
    };
    match out {
        Some(path) => write_delimited(&ds, path, sep).map_err(fail(&format!("--out {}", path.display())))?,
        None => print!("{}", format_delimited(&ds, sep).map_err(fail("synth"))?),
    }
    eprintln!("{count} series of length {length}, sigma {sigma}, seed {seed}");
    Ok(())
}
