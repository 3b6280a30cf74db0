use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use hypercolor::bench::{run_bench, write_csv, Algorithm, AlgorithmParams, BenchConfig};
use hypercolor::certified::CertifiedRecolor;
use hypercolor::local_lemma::{check_local_precondition, local_stream_color, LocalConfig};
use hypercolor::recolor::StreamRecolor;
use hypercolor::sparse_vertex::{classes_to_colors, KSplit, SplitColorer};
use hypercolor::stream_io::{
    open_stream, read_coloring, read_hypergraph, write_coloring, write_generated, ColoringFile, FileSource, GenSpec,
};
use hypercolor::tape::RandomTape;
use hypercolor::{validate_coloring, Assignment, ColorOutcome, Hypergraph};

/// Exit status for a colorer that declined to return a coloring.
const EXIT_DECLARED_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "hypercolor", version, about = "Streaming two-coloring of uniform hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance as an HGS1 stream.
    Gen {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Color an HGS1 stream.
    Color {
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: ParamArgs,
        /// Universe size for the split colorers when the header has none.
        #[arg(long)]
        v: Option<u32>,
        /// Also check the instance against the local-lemma intersection bound.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Coloring file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a coloring file against an HGS1 stream.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Run repeated trials on generated instances and print CSV.
    Bench {
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: ParamArgs,
        /// Independent runs per trial; a trial succeeds if any run does.
        #[arg(long, default_value_t = 1)]
        attempts: usize,
        /// Add per-trial wall-clock times (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Delayed,
    Certified,
    Balanced,
    Kbalanced,
    Local,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Delayed => Algorithm::Delayed,
            AlgorithmArg::Certified => Algorithm::Certified,
            AlgorithmArg::Balanced => Algorithm::Balanced,
            AlgorithmArg::Kbalanced => Algorithm::KBalanced,
            AlgorithmArg::Local => Algorithm::Local,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Uniform,
    Erdos,
    Bounded,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Edge size.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    v: Option<u32>,
    #[arg(long)]
    q: Option<u64>,
    /// Vertex-count parameter of the erdos kind (N = n^2 / t).
    #[arg(long)]
    t: Option<f64>,
    /// Largest number of other edges any edge may meet (bounded kind).
    #[arg(long)]
    max_intersections: Option<usize>,
}

impl InstanceArgs {
    fn spec(&self, seed: u64) -> GenSpec {
        let n = self.n;
        match self.kind {
            Kind::Uniform => GenSpec::Uniform {
                v: required(self.v, "--v"),
                n,
                q: required(self.q, "--q"),
                seed,
            },
            Kind::Erdos => GenSpec::Erdos {
                n,
                t: required(self.t, "--t"),
                seed,
            },
            Kind::Bounded => GenSpec::Bounded {
                v: required(self.v, "--v"),
                n,
                q: required(self.q, "--q") as usize,
                max_intersections: required(self.max_intersections, "--max-intersections"),
                seed,
            },
        }
    }
}

/// Exits with a usage error when a flag required by the chosen kind is absent.
fn required<T>(value: Option<T>, flag: &str) -> T {
    value.unwrap_or_else(|| {
        Cli::command()
            .error(
                clap::error::ErrorKind::MissingRequiredArgument,
                format!("{flag} is required for this --kind"),
            )
            .exit()
    })
}

#[derive(Args)]
struct ParamArgs {
    /// Recoloring probability (default (ln n - ln ln n) / 2n).
    #[arg(long)]
    p: Option<f64>,
    /// Residual cap of the certified colorer (default n).
    #[arg(long)]
    cap: Option<usize>,
    /// Number of classes for kbalanced.
    #[arg(long, default_value_t = 3)]
    k: u32,
    /// Pass budget of the local colorer (default ceil(4 log2(v + 2))).
    #[arg(long)]
    max_passes: Option<usize>,
}

impl ParamArgs {
    fn params(&self) -> AlgorithmParams {
        AlgorithmParams {
            p: self.p,
            cap: self.cap,
            k: self.k,
            max_passes: self.max_passes,
        }
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn stream(path: &Path) -> anyhow::Result<hypercolor::stream_io::EdgeStream<BufReader<File>>> {
    open_stream(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> anyhow::Result<Hypergraph> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(read_hypergraph(BufReader::new(file))?.1)
}

/// A declared failure goes to stderr; a coloring is written out.
fn report<C: Copy + std::fmt::Display>(out: ColorOutcome<Assignment<C>>, path: Option<&Path>) -> anyhow::Result<ExitCode> {
    match out.result {
        Ok(c) => {
            write_coloring(output(path)?, &c)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(f) => {
            eprintln!("failure: {f}");
            Ok(ExitCode::from(EXIT_DECLARED_FAILURE))
        }
    }
}

/// Second pass over the file confirming a coloring from a sound colorer.
fn recheck<C: Copy + Eq>(path: &Path, out: &ColorOutcome<Assignment<C>>) -> anyhow::Result<()> {
    if let Ok(c) = &out.result {
        for e in stream(path)? {
            if hypercolor::is_monochromatic(&e?, c)? {
                bail!("internal error: colorer returned an invalid coloring");
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn color(
    algorithm: Algorithm,
    input: &Path,
    seed: u64,
    params: &AlgorithmParams,
    v: Option<u32>,
    epsilon: Option<f64>,
    out: Option<&Path>,
) -> anyhow::Result<ExitCode> {
    let mut edges = stream(input)?;
    let header = *edges.header();
    let n = header.uniformity;
    if let Some(eps) = epsilon {
        let ok = check_local_precondition(&load(input)?, eps);
        eprintln!("intersection bound at epsilon={eps}: {}", if ok { "satisfied" } else { "violated" });
    }
    let tape = RandomTape::new(seed);
    match algorithm {
        Algorithm::Delayed => {
            let mut engine = StreamRecolor::new(&tape, params.resolve_p(n)?);
            for e in edges {
                engine.push(&e?);
            }
            let (c, _) = engine.finish();
            write_coloring(output(out)?, &c)?;
            Ok(ExitCode::SUCCESS)
        }
        Algorithm::Certified => {
            let mut engine = CertifiedRecolor::new(&tape, params.resolve_p(n)?, params.cap.unwrap_or(n))?;
            for e in edges.by_ref() {
                if engine.push(&e?).is_err() {
                    break;
                }
            }
            let result = engine.finish();
            recheck(input, &result)?;
            report(result, out)
        }
        Algorithm::Balanced | Algorithm::KBalanced => {
            let Some(v) = v.or(header.universe) else {
                bail!("the split colorers need the universe size: give --v or a header with v=");
            };
            let k = if algorithm == Algorithm::Balanced { 2 } else { params.k };
            let mut colorer = SplitColorer::new(KSplit::new(v, k, seed)?, n)?;
            for e in edges.by_ref() {
                if colorer.push(&e?)?.is_err() {
                    break;
                }
            }
            let result = colorer.finish();
            recheck(input, &result)?;
            if algorithm == Algorithm::Balanced {
                let result = ColorOutcome {
                    result: result.result.map(|c| classes_to_colors(&c)),
                    stats: result.stats,
                };
                report(result, out)
            } else {
                report(result, out)
            }
        }
        Algorithm::Local => {
            drop(edges);
            let mut config = LocalConfig::new(seed);
            config.max_passes = params.max_passes;
            let result = local_stream_color(&FileSource::new(input), n, &config)?;
            recheck(input, &result)?;
            report(result, out)
        }
    }
}

fn verify(input: &Path, coloring: &Path) -> anyhow::Result<ExitCode> {
    let h = load(input)?;
    let file = File::open(coloring).with_context(|| format!("cannot open {}", coloring.display()))?;
    let bad = match read_coloring(BufReader::new(file))? {
        ColoringFile::Two(c) => validate_coloring(&h, &c)?.len(),
        ColoringFile::K(c) => validate_coloring(&h, &c)?.len(),
    };
    if bad == 0 {
        println!("valid");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("invalid: {bad} monochromatic edges");
        Ok(ExitCode::FAILURE)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gen { instance, seed, out } => {
            let spec = instance.spec(seed);
            write_generated(output(out.as_deref())?, &spec)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Color {
            algorithm,
            input,
            seed,
            params,
            v,
            epsilon,
            out,
        } => color(algorithm.into(), &input, seed, &params.params(), v, epsilon, out.as_deref()),
        Command::Verify { input, coloring } => verify(&input, &coloring),
        Command::Bench {
            algorithm,
            instance,
            trials,
            seed,
            params,
            attempts,
            timing,
        } => {
            let mut config = BenchConfig::new(algorithm.into(), instance.spec(0), trials, seed);
            config.params = params.params();
            config.attempts = attempts;
            config.timing = timing;
            let report = run_bench(&config)?;
            write_csv(io::stdout().lock(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
