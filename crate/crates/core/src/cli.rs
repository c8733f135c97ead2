//! Command-line front end: `gerbelab <subcommand> [--config FILE] [--seed N] [--out FILE]`.
//!
//! Exit status is 0 when every check passes, 1 on a failing check or a
//! runtime error, and 2 on invalid arguments or configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{defaults_toml, run, Experiment, ExperimentConfig, WindingGroup};

#[derive(Debug, Parser)]
#[command(
    name = "gerbelab",
    version,
    about = "Numerical checks for gerbes, determinant bundles and current-algebra cocycles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML config file; keys override the experiment defaults.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice Dirac eigenvalues against the twisted spectrum.
    Spectrum(#[command(flatten)] Common),
    /// Spectral flow along holonomy paths.
    SpectralFlow {
        #[command(flatten)]
        common: Common,
        /// Also write the eigenvalue tracks of the charge loop as CSV.
        #[arg(long, value_name = "FILE")]
        tracks: Option<PathBuf>,
    },
    /// Spectral-window gerbe cocycle on level covers.
    GerbeCocycle(#[command(flatten)] Common),
    /// Bockstein integers of the window cocycle.
    Bockstein(#[command(flatten)] Common),
    /// Deligne relations of random gerbe data.
    Deligne(#[command(flatten)] Common),
    /// Monopole line bundles on the 2-sphere.
    Monopole(#[command(flatten)] Common),
    /// Winding number of SU(2).
    Winding {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        group: Option<WindingGroup>,
        /// Gauss nodes per axis.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Trace cocycle of truncated operators against the loop cocycle.
    CarCocycle {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        n: Option<i64>,
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Fock-space implementers of one-particle unitaries.
    Implementer(#[command(flatten)] Common),
    /// Hilbert–Schmidt criterion for smooth and rough loops.
    HsCriterion(#[command(flatten)] Common),
    /// Associativity of the disk-group extension cocycle.
    GammaAssoc(#[command(flatten)] Common),
    /// Wess–Zumino term modulo integers.
    #[command(name = "wzw-mod1")]
    WzwMod1(#[command(flatten)] Common),
    /// The Mickelsson–Faddeev cocycle identity.
    MfIdentity(#[command(flatten)] Common),
    /// Print every experiment's default config as TOML.
    Defaults,
}

impl Command {
    fn parts(&self) -> Option<(Experiment, &Common)> {
        Some(match self {
            Command::Spectrum(c) => (Experiment::Spectrum, c),
            Command::SpectralFlow { common, .. } => (Experiment::SpectralFlow, common),
            Command::GerbeCocycle(c) => (Experiment::GerbeCocycle, c),
            Command::Bockstein(c) => (Experiment::Bockstein, c),
            Command::Deligne(c) => (Experiment::Deligne, c),
            Command::Monopole(c) => (Experiment::Monopole, c),
            Command::Winding { common, .. } => (Experiment::Winding, common),
            Command::CarCocycle { common, .. } => (Experiment::CarCocycle, common),
            Command::Implementer(c) => (Experiment::Implementer, c),
            Command::HsCriterion(c) => (Experiment::HsCriterion, c),
            Command::GammaAssoc(c) => (Experiment::GammaAssoc, c),
            Command::WzwMod1(c) => (Experiment::WzwMod1, c),
            Command::MfIdentity(c) => (Experiment::MfIdentity, c),
            Command::Defaults => return None,
        })
    }

    fn apply_overrides(&self, config: &mut ExperimentConfig) {
        match (self, config) {
            (Command::Winding { group, nodes, .. }, ExperimentConfig::Winding(w)) => {
                if let Some(g) = group {
                    w.group = *g;
                }
                if let Some(n) = nodes {
                    w.nodes = *n;
                }
            }
            (Command::CarCocycle { m, n, cutoff, .. }, ExperimentConfig::CarCocycle(cc)) => {
                if let Some(m) = m {
                    cc.m = *m;
                }
                if let Some(n) = n {
                    cc.n = *n;
                }
                if let Some(k) = cutoff {
                    cc.cutoff = *k;
                }
            }
            _ => {}
        }
    }
}

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn usage_error(e: &Error) -> bool {
    matches!(e, Error::Validation(_) | Error::DimensionCap { .. })
}

fn load_config(
    cmd: &Command,
    experiment: Experiment,
    common: &Common,
) -> Result<ExperimentConfig, Error> {
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::parse(experiment, &text)?
        }
        None => ExperimentConfig::default_for(experiment),
    };
    cmd.apply_overrides(&mut config);
    config.validate()?;
    Ok(config)
}

fn write_output(path: Option<&PathBuf>, body: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, body),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn init_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("GERBELAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.parse().map_err(|_| {
        Error::Validation(format!(
            "GERBELAB_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    if threads == 0 {
        return Err(Error::Validation(
            "GERBELAB_THREADS must be positive".into(),
        ));
    }
    // a second initialization (e.g. from tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Runs a parsed command line and returns the exit code.
pub fn execute(cli: Cli) -> i32 {
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let Some((experiment, common)) = cli.command.parts() else {
        print!("{}", defaults_toml());
        return EXIT_OK;
    };
    let config = match load_config(&cli.command, experiment, common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let output = match run(&config, common.seed) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return if usage_error(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAIL
            };
        }
    };
    if let Err(e) = write_output(common.out.as_ref(), &output.report.to_json()) {
        eprintln!("error: cannot write report: {e}");
        return EXIT_FAIL;
    }
    if let (
        Command::SpectralFlow {
            tracks: Some(path), ..
        },
        Some(tracks),
    ) = (&cli.command, &output.tracks)
    {
        if let Err(e) = std::fs::write(path, tracks.to_csv()) {
            eprintln!("error: cannot write tracks: {e}");
            return EXIT_FAIL;
        }
    }
    let failing: Vec<_> = output.report.failing().collect();
    if failing.is_empty() {
        EXIT_OK
    } else {
        for c in failing {
            eprintln!(
                "FAIL {}: value {:e}, tolerance {:e}",
                c.name, c.value, c.tolerance
            );
        }
        EXIT_FAIL
    }
}

/// Parses `std::env::args` and runs; usage errors exit with status 2.
pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
