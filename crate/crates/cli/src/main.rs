use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mbm::experiment::{
    parse_config, run_bound, run_build, run_figure, run_ranks, run_simulate, run_spectrum,
    ExperimentConfig, CONFIG_KEYS,
};
use mbm::Error;

/// Environment variable naming the default output directory of `figure`.
const OUTPUT_DIR_ENV: &str = "MBM_OUTPUT_DIR";

fn config_help() -> String {
    let mut text = String::from("Config keys (`key = value`, `#` comments):\n");
    for (key, doc) in CONFIG_KEYS {
        text.push_str(&format!("  {key:<15} {doc}\n"));
    }
    text.push_str(&format!(
        "\n`figure` writes into --out-dir, else ${OUTPUT_DIR_ENV}, else ./results.\n\
         Exit codes: 0 success, 1 I/O error, 2 config error, 3 runtime cap exceeded."
    ));
    text
}

#[derive(Parser, Debug)]
#[command(name = "mbm", version, about = "MBM signal sets: build, analyse and simulate", after_help = config_help())]
struct Cli {
    /// Worker threads (recorded in every output header).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump the MAP-index codebook, symbol constellation and signal set.
    Build(Io),
    /// Euclidean distance spectrum CSV.
    Spectrum(Io),
    /// Union-bound BER curve CSV.
    Bound(Io),
    /// Difference-matrix rank profile.
    Ranks(Io),
    /// Monte-Carlo BER curve CSV.
    Simulate {
        #[command(flatten)]
        io: Io,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Canned reproduction of one result figure (3-9).
    Figure {
        number: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct Io {
    /// Config file.
    config: PathBuf,
    /// Output file; overrides `output` in the config. Stdout when neither is set.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum Failure {
    Io(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Lib(Error::Argument(format!("cannot read {}: {e}", path.display()))))?;
    Ok(parse_config(&text)?)
}

fn emit(text: &str, target: Option<PathBuf>) -> Result<(), Failure> {
    match target {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
            }
            fs::write(&path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn run_io(io: &Io, seed: Option<u64>, f: fn(&ExperimentConfig) -> mbm::Result<String>) -> Result<(), Failure> {
    let mut cfg = load(&io.config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let target = io.output.clone().or_else(|| cfg.output.clone().map(PathBuf::from));
    let text = f(&cfg)?;
    emit(&text, target)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Build(io) => run_io(io, None, run_build),
        Command::Spectrum(io) => run_io(io, None, run_spectrum),
        Command::Bound(io) => run_io(io, None, run_bound),
        Command::Ranks(io) => run_io(io, None, run_ranks),
        Command::Simulate { io, seed } => run_io(io, *seed, run_simulate),
        Command::Figure {
            number,
            seed,
            out_dir,
        } => {
            let dir = out_dir
                .clone()
                .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("results"));
            for out in run_figure(*number, *seed)? {
                let path = dir.join(&out.name);
                emit(&out.contents, Some(path.clone()))?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::CapExceeded { .. } => 3,
                _ => 2,
            })
        }
    }
}
