use serde::Serialize;
use serde_json::Value;
use thetadelay::event_sim::{measure_period, simulate, InitialHistory, Outcome};
use thetadelay::smooth::{integrate_and_classify, Attractor, History, LyapunovConfig};
use thetadelay::ModelParams;

use super::{attractor_label, smooth_config};
use crate::cli::{Model, SimulateArgs};
use crate::error::CliError;
use crate::output::Dataset;

#[derive(Debug, Serialize)]
struct Row {
    kind: &'static str,
    t: f64,
    theta: Option<f64>,
}

const COLUMNS: &[&str] = &["kind", "t", "theta"];

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let params = ModelParams::new(args.current, args.kappa, args.tau)?;
    if let Some(dt) = args.sample_dt {
        if dt.is_nan() || dt <= 0.0 {
            return Err(CliError::usage(format!(
                "--sample-dt must be positive, got {dt}"
            )));
        }
    }
    let horizon = args.horizon.unwrap_or(match args.model {
        Model::Delta => 200.0 * args.tau,
        Model::Smooth => 1000.0,
    });
    let transient = args.transient.unwrap_or(0.5 * horizon);
    let mut data = Dataset::new("simulate", COLUMNS);
    data.param("model", args.model.as_str());
    data.param("current", args.current);
    data.param("kappa", args.kappa);
    data.param("tau", args.tau);
    data.param("seed_spikes", args.seed_spikes);
    data.param("horizon", horizon);
    data.param("transient", transient);
    if let Some(dt) = args.sample_dt {
        data.param("sample_dt", dt);
    }
    match args.model {
        Model::Delta => delta(args, params, horizon, transient, &mut data)?,
        Model::Smooth => smooth(args, params, horizon, transient, &mut data)?,
    }
    data.write(args.output.format, args.output.out.as_deref())
}

fn delta(
    args: &SimulateArgs,
    params: ModelParams,
    horizon: f64,
    transient: f64,
    data: &mut Dataset<Row>,
) -> Result<(), CliError> {
    let history = InitialHistory::equispaced(args.seed_spikes, args.tau)?;
    let traj = simulate(params, &history, horizon)?;
    let outcome = match traj.outcome {
        Outcome::Horizon => "horizon".to_string(),
        Outcome::DecayedToRest { t } => format!("decayed-to-rest at t = {t}"),
        Outcome::StalledOnSaddle { t } => format!("stalled-on-saddle at t = {t}"),
    };
    data.summary.push(("outcome", outcome.into()));
    data.summary
        .push(("spikes", traj.firing_times.len().into()));
    match measure_period(&traj, transient) {
        Ok(m) => {
            data.summary.push(("period", m.period.into()));
            data.summary.push(("n", m.n.into()));
        }
        Err(e) => data
            .notes
            .push(format!("no period after t = {transient}: {e}")),
    }
    data.rows.extend(traj.firing_times.iter().map(|&t| Row {
        kind: "spike",
        t: t + 0.0,
        theta: None,
    }));
    if let Some(dt) = args.sample_dt {
        data.rows
            .extend(traj.sample(dt).into_iter().map(|(t, th)| Row {
                kind: "sample",
                t,
                theta: Some(th),
            }));
    }
    Ok(())
}

fn smooth(
    args: &SimulateArgs,
    params: ModelParams,
    horizon: f64,
    transient: f64,
    data: &mut Dataset<Row>,
) -> Result<(), CliError> {
    let mut config = smooth_config(&args.smooth);
    config.transient = Some(transient);
    config.sample_dt = args.sample_dt;
    data.param("pulse_exponent", args.smooth.pulse_exponent);
    if let Some(dt) = args.smooth.dt {
        data.param("dt", dt);
    }
    let history = History::Spikes {
        k: args.seed_spikes,
    };
    let run = integrate_and_classify(
        &params,
        &history,
        horizon,
        &config,
        &LyapunovConfig::default(),
    )?;
    data.summary
        .push(("attractor", attractor_label(run.attractor).into()));
    if let Attractor::Periodic { n } = run.attractor {
        data.summary.push(("n", n.into()));
    }
    if let Some(p) = run.measured_period {
        data.summary.push(("period", p.into()));
    }
    if let Some(l) = run.lyapunov {
        data.summary.push(("lyapunov", l.exponent.into()));
        data.summary
            .push(("lyapunov_ci", Value::from(vec![l.ci_low, l.ci_high])));
    }
    data.summary.push(("dt", run.dt.into()));
    data.summary.push(("spikes", run.spike_times.len().into()));
    if run.spurious_pulse() {
        data.notes.push(format!(
            "{} downward crossings of pi",
            run.down_crossings.len()
        ));
    }
    data.rows.extend(run.spike_times.iter().map(|&t| Row {
        kind: "spike",
        t: t + 0.0,
        theta: None,
    }));
    data.rows.extend(run.samples.iter().map(|&(t, th)| Row {
        kind: "sample",
        t,
        theta: Some(th),
    }));
    Ok(())
}
