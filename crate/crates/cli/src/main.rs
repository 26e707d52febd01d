use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sunada_core::holonomy::Precision;
use sunada_lab::{emit, parse_config, resolve, run, Command, Overrides, RunError, EXIT_CONFIG};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    GroupCheck,
    Certificate,
    Build,
    Spectrum,
    Cover,
    Compare,
    Fingerprint,
    Snap,
    Pipeline,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::GroupCheck => Command::GroupCheck,
            Cmd::Certificate => Command::Certificate,
            Cmd::Build => Command::Build,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Cover => Command::Cover,
            Cmd::Compare => Command::Compare,
            Cmd::Fingerprint => Command::Fingerprint,
            Cmd::Snap => Command::Snap,
            Cmd::Pipeline => Command::Pipeline,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

/// Gassmann triples, Sunada covers of glued hyperbolic surfaces, and
/// their length spectra.
#[derive(Debug, Parser)]
#[command(name = "sunada-lab", version)]
struct Args {
    command: Cmd,
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the template seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    ExitCode::from(execute(args) as u8)
}

fn execute(args: Args) -> i32 {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return EXIT_CONFIG;
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    config.apply(Overrides {
        seed: args.seed,
        precision: args.precision.map(|p| match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }),
    });
    let resolved = match resolve(config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_CONFIG;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return 1;
        }
    }
    let config_dir = args.config.parent().map(|p| p.to_path_buf()).unwrap_or_default();
    let outcome = match run(args.command.into(), &resolved, &config_dir) {
        Ok(o) => o,
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
        Err(RunError::Failed(e)) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Err(e) = emit(&outcome, &args.out) {
        eprintln!("error: cannot write to {}: {e}", args.out.display());
        return 1;
    }
    print!("{}", String::from_utf8_lossy(&outcome.files["summary.txt"]));
    outcome.exit_code()
}
