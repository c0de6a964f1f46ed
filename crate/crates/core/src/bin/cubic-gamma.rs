use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cubic_gamma::cli::{self, Job, Overrides, RecognizeKind};
use cubic_gamma::report::{Format, Report};
use cubic_gamma::Error;

#[derive(Parser)]
#[command(name = "cubic-gamma", version, about = "Smoothed elliptic gamma values of complex cubic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Target precision in decimal digits
    #[arg(long, env = cli::DIGITS_ENV)]
    digits: Option<u32>,
    /// Guard digits on top of the target
    #[arg(long)]
    guard: Option<u32>,
    /// Cap on truncation terms per product
    #[arg(long)]
    max_terms: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Include wall time in the report
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Integer,
    Field,
    Orbit,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check listed in a config
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Smoothed values only
    Gamma {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Find a polynomial vanishing at a computed value
    Recognize {
        config: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        height: u32,
        #[arg(long, value_enum, default_value_t = Kind::Integer)]
        kind: Kind,
        /// Entry of b_list
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Recognize value^power instead (12 always suffices)
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Property suites on the given configs, or on the bundled fixtures
    Selftest {
        configs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn overrides(c: &Common) -> Overrides {
    Overrides { digits: c.digits, guard: c.guard, max_terms: c.max_terms, timing: c.timing }
}

fn format(c: &Common) -> Format {
    match c.format {
        OutFormat::Json => Format::Json,
        OutFormat::Text => Format::Text,
    }
}

fn config_error(e: Error) -> ExitCode {
    eprintln!("{e}");
    ExitCode::from(2)
}

fn emit(report: &Report, c: &Common) -> ExitCode {
    print!("{}", report.emit(format(c)));
    ExitCode::from(cli::exit_code(report) as u8)
}

fn load(path: &Path, c: &Common) -> Result<Job, Error> {
    cli::load_job(path, &overrides(c))
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let common = match &args.command {
        Command::Run { common, .. }
        | Command::Gamma { common, .. }
        | Command::Recognize { common, .. }
        | Command::Selftest { common, .. } => common.clone(),
    };
    if let Some(n) = common.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("thread pool: {e}");
        }
    }
    match args.command {
        Command::Run { config, common } => match load(&config, &common) {
            Ok(job) => emit(&cli::run(&job), &common),
            Err(e) => config_error(e),
        },
        Command::Gamma { config, common } => match load(&config, &common) {
            Ok(job) => emit(&cli::run_gamma(&job), &common),
            Err(e) => config_error(e),
        },
        Command::Recognize { config, degree, height, kind, index, power, common } => {
            let job = match load(&config, &common) {
                Ok(j) => j,
                Err(e) => return config_error(e),
            };
            let kind = match kind {
                Kind::Integer => RecognizeKind::Integer,
                Kind::Field => RecognizeKind::Field,
                Kind::Orbit => RecognizeKind::Orbit,
            };
            match cli::recognize(&job, index, power, kind, degree, height) {
                Ok(Some(p)) => {
                    println!("{}", p.display());
                    ExitCode::SUCCESS
                }
                Ok(None) => {
                    println!("none");
                    ExitCode::from(1)
                }
                Err(e @ Error::Numerical(_)) => {
                    eprintln!("{e}");
                    ExitCode::from(3)
                }
                Err(e) => config_error(e),
            }
        }
        Command::Selftest { configs, common } => {
            let mut jobs = Vec::new();
            if configs.is_empty() {
                for (name, text) in cli::FIXTURES {
                    match cli::parse_config(text).and_then(|c| cli::validate(c, &overrides(&common))) {
                        Ok(j) => jobs.push(j),
                        Err(e) => return config_error(Error::Config(format!("{name}: {e}"))),
                    }
                }
            } else {
                for p in &configs {
                    match load(p, &common) {
                        Ok(j) => jobs.push(j),
                        Err(e) => return config_error(e),
                    }
                }
            }
            let mut worst = ExitCode::SUCCESS;
            let mut worst_code = 0;
            for job in &jobs {
                let rep = cli::selftest(job);
                let code = cli::exit_code(&rep);
                print!("{}", rep.emit(format(&common)));
                if code == 1 || (code == 3 && worst_code == 0) {
                    worst_code = code;
                    worst = ExitCode::from(code as u8);
                }
            }
            worst
        }
    }
}
