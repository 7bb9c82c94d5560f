use std::f64::consts::PI;

use serde::Serialize;
use serde_json::Value;
use thetadelay::excitable::{branch_parametric, branch_s_grid, homoclinic_tau};
use thetadelay::oscillatory::branch_parametric_pos;
use thetadelay::smooth::{branch_ends, trace_stable_branch, History};
use thetadelay::{BranchPoint, Error};

use super::{attractor_label, check_grid, smooth_config};
use crate::cli::{BranchesArgs, Model, Regime};
use crate::error::CliError;
use crate::output::Dataset;

#[derive(Debug, Serialize)]
struct Row {
    n: Option<usize>,
    tau: f64,
    period: Option<f64>,
    gamma: Option<f64>,
    stability: &'static str,
}

const COLUMNS: &[&str] = &["n", "tau", "period", "gamma", "stability"];

impl From<&BranchPoint> for Row {
    fn from(b: &BranchPoint) -> Self {
        Row {
            n: Some(b.n),
            tau: b.tau,
            period: Some(b.period),
            gamma: Some(b.gamma),
            stability: b.stability.as_str(),
        }
    }
}

pub fn run(args: &BranchesArgs) -> Result<(), CliError> {
    check_grid(args.grid)?;
    if args.tau.is_point() {
        return Err(CliError::usage(format!(
            "--tau window {} is empty",
            args.tau
        )));
    }
    let mut data = Dataset::new("branches", COLUMNS);
    data.param("regime", args.regime.as_str());
    data.param("kappa", args.kappa);
    data.param("nmax", args.nmax);
    data.param("tau", args.tau);
    data.param("grid", args.grid);
    data.param("model", args.model.as_str());
    match args.model {
        Model::Delta => delta(args, &mut data)?,
        Model::Smooth => smooth(args, &mut data)?,
    }
    data.write(args.output.format, args.output.out.as_deref())
}

fn delta(args: &BranchesArgs, data: &mut Dataset<Row>) -> Result<(), CliError> {
    let window = args.tau;
    let kappa = args.kappa;
    let s_grid = match args.regime {
        Regime::Neg => {
            let tau_star = homoclinic_tau(kappa)?;
            if window.hi() <= tau_star {
                return Err(Error::NoSolution(format!(
                    "no branch reaches tau <= {} (homoclinic point {tau_star})",
                    window.hi()
                ))
                .into());
            }
            branch_s_grid(kappa, window.hi(), args.grid)?
        }
        Regime::Pos => (0..args.grid)
            .map(|i| PI * i as f64 / (args.grid - 1) as f64)
            .collect(),
    };
    for n in 0..=args.nmax {
        let points = match args.regime {
            Regime::Neg => branch_parametric(n, kappa, &s_grid)?,
            Regime::Pos => branch_parametric_pos(n, kappa, &s_grid)?,
        };
        data.rows.extend(
            points
                .iter()
                .filter(|b| window.contains(b.tau))
                .map(Row::from),
        );
    }
    if data.rows.is_empty() {
        return Err(Error::NoSolution(format!("no branch point with tau in {window}")).into());
    }
    Ok(())
}

fn smooth(args: &BranchesArgs, data: &mut Dataset<Row>) -> Result<(), CliError> {
    if args.tau.lo() <= 0.0 {
        return Err(CliError::usage("smooth tracing needs tau > 0"));
    }
    data.param("seed_spikes", args.seed_spikes);
    data.param("horizon", args.horizon);
    data.param("max_chunks", args.max_chunks);
    data.param("pulse_exponent", args.smooth.pulse_exponent);
    if let Some(dt) = args.smooth.dt {
        data.param("dt", dt);
    }
    let taus = args.tau.linspace(args.grid);
    let points = trace_stable_branch(
        args.regime.current(),
        args.kappa,
        &taus,
        &History::Spikes {
            k: args.seed_spikes,
        },
        args.horizon,
        args.max_chunks,
        &smooth_config(&args.smooth),
    )?;
    let ends: Vec<f64> = branch_ends(&points)
        .into_iter()
        .map(|i| points[i].tau)
        .collect();
    data.summary.push(("branch_ends", Value::from(ends)));
    data.rows.extend(points.iter().map(|p| Row {
        n: p.n,
        tau: p.tau,
        period: p.period,
        gamma: None,
        stability: attractor_label(p.attractor),
    }));
    Ok(())
}
