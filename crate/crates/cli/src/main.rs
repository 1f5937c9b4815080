use std::path::{Path, PathBuf};
use std::process::ExitCode;

use charp_cli::commands::{self, max_level_from_env};
use charp_cli::{CliError, CliResult, Options, Problem, Report};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "charp", version, about = "Exact checks for connections and differential operators in characteristic p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write one JSON record per check to this file.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Suppress the human-readable summary.
    #[arg(long, global = true)]
    quiet: bool,
    /// Record wall-clock time per check (makes reports nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args)]
struct FileArgs {
    file: PathBuf,
    /// Reinterpret the problem over another prime.
    #[arg(long)]
    prime: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature components K_ij and the Leibniz rule.
    Curvature(FileArgs),
    /// The p-curvature psi(D_i) of each coordinate derivation.
    Pcurvature(FileArgs),
    /// Taylor stratification up to a truncation level.
    Stratify {
        #[command(flatten)]
        file: FileArgs,
        #[arg(long)]
        level: Option<u32>,
    },
    /// Horizontal subbundle and its closure properties.
    Horizontal(FileArgs),
    /// Cartier descent through a frame of flat sections.
    Cartier {
        #[command(flatten)]
        file: FileArgs,
        #[arg(long)]
        degree_bound: Option<u32>,
    },
    /// Coalgebra diagrams for the divided-power-to-symmetric map.
    ThetaCheck {
        #[command(flatten)]
        file: FileArgs,
        #[arg(long)]
        level: Option<u32>,
    },
    /// Rees module of the filtration and Griffiths transversality.
    Rees(FileArgs),
    /// Deformation of a nilpotent Higgs field to a conjugate triple.
    Deform {
        #[command(flatten)]
        file: FileArgs,
        #[arg(long)]
        exponent: Option<u32>,
    },
    /// Seeded invariant suite over random fixtures.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        instances: usize,
    },
}

fn read(path: &Path) -> CliResult<Problem> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| CliError::Precondition(format!("cannot read {}: {e}", path.display())))?;
    Problem::parse(&src).map_err(|e| {
        CliError::Parse(charp_cli::ParseError { message: format!("{}: {}", path.display(), e.message), ..e })
    })
}

fn dispatch(cli: &Cli) -> CliResult<Report> {
    let mut opts = Options { timing: cli.timing, max_level: Some(max_level_from_env()?), ..Options::default() };
    let with = |opts: &mut Options, f: &FileArgs| -> CliResult<Problem> {
        opts.prime = f.prime;
        read(&f.file)
    };
    match &cli.command {
        Command::Curvature(f) => commands::curvature(with(&mut opts, f)?, &opts),
        Command::Pcurvature(f) => commands::pcurvature(with(&mut opts, f)?, &opts),
        Command::Stratify { file, level } => {
            opts.level = *level;
            commands::stratify(with(&mut opts, file)?, &opts)
        }
        Command::Horizontal(f) => commands::horizontal(with(&mut opts, f)?, &opts),
        Command::Cartier { file, degree_bound } => {
            opts.degree_bound = *degree_bound;
            commands::cartier(with(&mut opts, file)?, &opts)
        }
        Command::ThetaCheck { file, level } => {
            opts.level = *level;
            commands::theta_check(with(&mut opts, file)?, &opts)
        }
        Command::Rees(f) => commands::rees(with(&mut opts, f)?, &opts),
        Command::Deform { file, exponent } => {
            opts.exponent = *exponent;
            commands::deform(with(&mut opts, file)?, &opts)
        }
        Command::Selftest { seed, instances } => commands::run_selftest(*seed, *instances),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| dispatch(&cli));
    let code = match outcome {
        Ok(Ok(report)) => {
            if let Some(path) = &cli.json {
                if let Err(e) = report.write_json(path) {
                    eprintln!("charp: cannot write {}: {e}", path.display());
                    return ExitCode::from(3);
                }
            }
            if !cli.quiet {
                print!("{}", report.human());
            }
            if report.passed() {
                0
            } else {
                1
            }
        }
        Ok(Err(e)) => {
            eprintln!("charp: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("charp: internal invariant failure");
            4
        }
    };
    ExitCode::from(code as u8)
}
