use serde::Serialize;
use thetadelay::branch::periodic_solutions;
use thetadelay::{Error, ModelParams, StabilitySpectrum};

use super::check_grid;
use crate::cli::MultipliersArgs;
use crate::error::CliError;
use crate::output::Dataset;

#[derive(Debug, Serialize)]
struct Row {
    n: usize,
    tau: Option<f64>,
    period: Option<f64>,
    gamma: f64,
    root: usize,
    re: f64,
    im: f64,
    modulus: f64,
    stability: &'static str,
}

const COLUMNS: &[&str] = &[
    "n",
    "tau",
    "period",
    "gamma",
    "root",
    "re",
    "im",
    "modulus",
    "stability",
];

fn push_spectrum(
    data: &mut Dataset<Row>,
    spectrum: &StabilitySpectrum,
    at: Option<(f64, f64)>,
    stability: &'static str,
) {
    for (i, z) in spectrum.roots.iter().enumerate() {
        data.rows.push(Row {
            n: spectrum.n,
            tau: at.map(|a| a.0),
            period: at.map(|a| a.1),
            gamma: spectrum.gamma,
            root: i,
            re: z.re,
            im: z.im,
            modulus: z.norm(),
            stability,
        });
    }
}

pub fn run(args: &MultipliersArgs) -> Result<(), CliError> {
    let mut data = Dataset::new("multipliers", COLUMNS);
    match (args.gamma, args.regime, args.kappa, args.tau) {
        (Some(gamma), None, None, None) => {
            let n = args.n.ok_or_else(|| CliError::usage("--gamma needs --n"))?;
            data.param("n", n);
            data.param("gamma", gamma);
            let values = if gamma.is_point() {
                vec![gamma.start]
            } else {
                check_grid(args.grid)?;
                data.param("grid", args.grid);
                gamma.linspace(args.grid)
            };
            for g in values {
                let s = StabilitySpectrum::compute(n, g)?;
                push_spectrum(&mut data, &s, None, s.classification.as_str());
            }
        }
        (None, Some(regime), Some(kappa), Some(tau)) => {
            data.param("regime", regime.as_str());
            data.param("kappa", kappa);
            data.param("tau", tau);
            data.param("nmax", args.nmax);
            let params = ModelParams::new(regime.current(), kappa, tau)?;
            for n in 0..=args.nmax {
                for b in periodic_solutions(&params, n) {
                    let s = StabilitySpectrum::compute(n, b.gamma)?;
                    push_spectrum(&mut data, &s, Some((b.tau, b.period)), b.stability.as_str());
                }
            }
            if data.rows.is_empty() {
                return Err(Error::NoSolution(format!(
                    "no periodic solution with n <= {} at kappa = {kappa}, tau = {tau}",
                    args.nmax
                ))
                .into());
            }
        }
        _ => {
            return Err(CliError::usage(
                "give either --n with --gamma, or --regime, --kappa and --tau",
            ))
        }
    }
    data.write(args.output.format, args.output.out.as_deref())
}
