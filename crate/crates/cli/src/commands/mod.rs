mod branches;
mod multipliers;
mod simulate;
mod sncurves;

use thetadelay::smooth::{Attractor, SmoothConfig};

use crate::cli::{Command, SmoothArgs};
use crate::error::CliError;

pub fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Branches(a) => branches::run(a),
        Command::Sncurves(a) => sncurves::run(a),
        Command::Multipliers(a) => multipliers::run(a),
        Command::Simulate(a) => simulate::run(a),
    }
}

fn check_grid(grid: usize) -> Result<(), CliError> {
    if grid < 2 {
        return Err(CliError::usage(format!(
            "--grid must be at least 2, got {grid}"
        )));
    }
    Ok(())
}

fn smooth_config(args: &SmoothArgs) -> SmoothConfig {
    SmoothConfig {
        dt: args.dt,
        pulse_exponent: args.pulse_exponent,
        ..SmoothConfig::default()
    }
}

fn attractor_label(a: Attractor) -> &'static str {
    match a {
        Attractor::Periodic { .. } => "periodic",
        Attractor::PeriodDoubled => "period-doubled",
        Attractor::Chaotic => "chaotic",
        Attractor::Rest => "rest",
        Attractor::Ambiguous => "ambiguous",
    }
}
