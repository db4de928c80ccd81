use std::collections::HashSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use icsrs_cli::config::Strictness;
use icsrs_cli::{recipes, resolve, run_to_file, CliError};

#[derive(Parser)]
#[command(name = "icsrs", version, about = "Intercore Raman noise and QKD key-rate scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Only print errors.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a recipe or scenario file and write CSV.
    Run {
        /// Recipe name (see list-recipes) or path to a scenario file.
        target: String,
        /// Output CSV; defaults to [output] path in the scenario.
        output: Option<PathBuf>,
        #[command(flatten)]
        mode: Mode,
        /// Peak-search traversal step in km.
        #[arg(long)]
        step: Option<f64>,
        /// Also write a gnuplot script next to the CSV.
        #[arg(long)]
        gnuplot: bool,
    },
    /// List bundled recipes.
    ListRecipes,
    /// Check a scenario file and report every problem found.
    Validate {
        target: String,
        #[command(flatten)]
        mode: Mode,
    },
}

#[derive(Args)]
struct Mode {
    /// Reject unknown keys (default).
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    /// Warn about unknown keys instead of rejecting them.
    #[arg(long)]
    lenient: bool,
}

impl Mode {
    fn strictness(&self) -> Strictness {
        if self.lenient {
            Strictness::Lenient
        } else {
            Strictness::Strict
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "warn" };
    init_logging(level);

    let status = dispatch(cli.command, cli.quiet);
    let repeats = SUPPRESSED.load(Ordering::Relaxed);
    if repeats > 0 {
        log::warn!("{repeats} similar warning(s) suppressed");
    }
    match status {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

static SEEN: Mutex<Option<HashSet<String>>> = Mutex::new(None);
static SUPPRESSED: AtomicUsize = AtomicUsize::new(0);

/// A sweep can trip the same warning at every point; print the first one per
/// module and count the rest.
fn init_logging(level: &str) {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format(|buf, record| {
            if record.level() == log::Level::Warn && record.target() != module_path!() {
                let mut seen = SEEN.lock().unwrap();
                if !seen.get_or_insert_with(HashSet::new).insert(record.target().to_string()) {
                    SUPPRESSED.fetch_add(1, Ordering::Relaxed);
                    return Ok(());
                }
            }
            writeln!(buf, "{}: {}", record.level().as_str().to_lowercase(), record.args())
        })
        .init();
}

fn dispatch(command: Command, quiet: bool) -> Result<(), CliError> {
    match command {
        Command::ListRecipes => {
            for r in recipes::RECIPES {
                println!("{:<6} {}", r.name, r.summary);
            }
        }
        Command::Validate { target, mode } => {
            let config = resolve(&target, mode.strictness())?;
            if !quiet {
                println!("{}: ok ({} sweep points)", config.name, config.sweep.points);
            }
        }
        Command::Run {
            target,
            output,
            mode,
            step,
            gnuplot,
        } => {
            let mut config = resolve(&target, mode.strictness())?;
            if let Some(step) = step {
                if !(step > 0.0 && step.is_finite()) {
                    return Err(CliError::Config(icsrs_cli::config::ConfigError::Invalid(vec![
                        icsrs_cli::config::Issue {
                            key: "--step".into(),
                            message: format!("{step} must be positive"),
                        },
                    ])));
                }
                config.analysis.peak.step_km = step;
            }
            let path = output.or_else(|| config.output.clone()).ok_or(CliError::NoOutput)?;
            let out = run_to_file(&config, &path, gnuplot)?;
            if !quiet {
                println!("{}: {} rows -> {}", config.name, out.result.rows.len(), path.display());
                if let Ok(l) = out.analyses.icsrs_peak_km {
                    println!("  forward ICSRS peak: {l:.4} km");
                }
                for (mode, d) in &out.analyses.max_distance {
                    if let Ok(d) = d {
                        println!("  max secure distance ({mode}): {:.1} km", d.distance_km);
                    }
                }
            }
        }
    }
    Ok(())
}
