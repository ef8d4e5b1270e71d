use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;

use holderlie::corpus::CorpusFile;
use holderlie::{emit_constants, run_suite, Error, SuiteConfig};

#[derive(Parser)]
#[command(name = "holderlie", version, about = "Hölder-space norms, product constants and BCH checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a JSON report.
    Run {
        /// JSON or TOML suite configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Suite to run (repeatable); replaces the configured list.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Corpus seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        kmax: Option<usize>,
        /// Multiplicative tolerance on sampled inequalities.
        #[arg(long)]
        tol: Option<f64>,
        /// Include wall-clock timings (the report is then run-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Print the constants table for the configured domain.
    Constants {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a corpus file of random polynomials.
    Corpus {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 2)]
        in_dim: usize,
        #[arg(long, default_value_t = 1)]
        out_dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn load(config: Option<&PathBuf>) -> Result<SuiteConfig, Error> {
    match config {
        Some(p) => SuiteConfig::load(p),
        None => Ok(SuiteConfig::default()),
    }
}

fn write(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exec(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Run { config, suites, seed, out, kmax, tol, timings } => {
            let mut cfg = load(config.as_ref())?;
            if !suites.is_empty() {
                cfg.suites = suites;
            }
            if let Some(s) = seed {
                cfg.corpus.seed = s;
            }
            if let Some(k) = kmax {
                cfg.k_max = k;
            }
            if let Some(t) = tol {
                cfg.tolerances.inequality = t;
            }
            cfg.timings |= timings;
            let out = out.or_else(|| cfg.output.clone().map(PathBuf::from));
            let report = run_suite(&cfg)?;
            write(out.as_ref(), &report.to_json())?;
            for name in report.suites.keys() {
                let s = &report.suites[name];
                eprintln!("{name:<11} {:>6} passed {:>6} failed", s.passed, s.failed);
            }
            for f in report.failures().take(20) {
                eprintln!("FAIL {} [{}] lhs={} rhs={}", f.check_id, f.anchor, f.lhs, f.rhs);
            }
            Ok(report.passed())
        }
        Command::Constants { config, kmax, format, out } => {
            let mut cfg = load(config.as_ref())?;
            if let Some(k) = kmax {
                cfg.k_max = k;
            }
            let table = emit_constants(&cfg)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&serde_json::to_value(&table).expect("table serializes")).expect("table serializes") + "\n",
                Format::Csv => table.to_csv(),
            };
            write(out.as_ref(), &text)?;
            Ok(true)
        }
        Command::Corpus { count, degree, in_dim, out_dim, seed, out } => {
            if in_dim == 0 || out_dim == 0 {
                return Err(Error::ConfigInvalid("corpus dimensions must be positive".into()));
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let file = CorpusFile::generate(&mut rng, count, in_dim, out_dim, degree);
            write(out.as_ref(), &(file.to_json() + "\n"))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match exec(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
