//! Runs an experiment from an inline TOML config and prints its report.

use gerbelab::experiments::{run, Experiment, ExperimentConfig};

fn main() -> gerbelab::Result<()> {
    let config = ExperimentConfig::parse(
        Experiment::CarCocycle,
        "experiment = \"car-cocycle\"\nsweep = true\ncutoff = 8\n",
    )?;
    let out = run(&config, 42)?;
    println!("{}", out.report.to_json());
    Ok(())
}
