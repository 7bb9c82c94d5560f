use serde::Serialize;
use thetadelay::excitable::{homoclinic_tau, saddle_node_point};
use thetadelay::oscillatory::{cusp_point, saddle_node_point_pos, Coupling, FoldSign};

use super::check_grid;
use crate::cli::{Regime, SncurvesArgs};
use crate::error::CliError;
use crate::output::Dataset;

#[derive(Debug, Serialize)]
struct Row {
    kind: &'static str,
    n: usize,
    kappa: f64,
    tau: f64,
    tau0: Option<f64>,
    period: Option<f64>,
}

const COLUMNS: &[&str] = &["kind", "n", "kappa", "tau", "tau0", "period"];

pub fn run(args: &SncurvesArgs) -> Result<(), CliError> {
    check_grid(args.grid)?;
    if args.kappa.is_point() {
        return Err(CliError::usage(format!(
            "--kappa window {} is empty",
            args.kappa
        )));
    }
    if args.n.is_empty() {
        return Err(CliError::usage("--n needs at least one branch index"));
    }
    let mut data = Dataset::new("sncurves", COLUMNS);
    data.param("regime", args.regime.as_str());
    data.param(
        "n",
        args.n
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    data.param("kappa", args.kappa);
    data.param("grid", args.grid);
    let kappas = args.kappa.linspace(args.grid);
    match args.regime {
        Regime::Neg => excitable(args, &kappas, &mut data),
        Regime::Pos => oscillatory(args, &kappas, &mut data),
    }
    data.write(args.output.format, args.output.out.as_deref())
}

fn excitable(args: &SncurvesArgs, kappas: &[f64], data: &mut Dataset<Row>) {
    let skipped = kappas.iter().filter(|&&k| k <= 2.0).count();
    if skipped > 0 {
        data.notes.push(format!(
            "{skipped} kappa values <= 2 skipped: no pulsating solutions"
        ));
    }
    for &n in &args.n {
        for &kappa in kappas {
            if n == 0 {
                if let Ok(tau) = homoclinic_tau(kappa) {
                    data.rows.push(Row {
                        kind: "homoclinic",
                        n,
                        kappa,
                        tau,
                        tau0: None,
                        period: None,
                    });
                }
            } else if let Ok(p) = saddle_node_point(n, kappa) {
                data.rows.push(Row {
                    kind: "fold",
                    n,
                    kappa,
                    tau: p.tau,
                    tau0: Some(p.tau0),
                    period: Some(p.period),
                });
            }
        }
    }
}

fn oscillatory(args: &SncurvesArgs, kappas: &[f64], data: &mut Dataset<Row>) {
    for &n in &args.n {
        if n == 0 {
            data.notes.push("n = 0 has no folds".into());
            continue;
        }
        for (sign, kind) in [(FoldSign::Plus, "fold+"), (FoldSign::Minus, "fold-")] {
            for &kappa in kappas {
                if let Ok(p) = saddle_node_point_pos(n, kappa, sign) {
                    data.rows.push(Row {
                        kind,
                        n,
                        kappa,
                        tau: p.tau,
                        tau0: Some(p.tau0),
                        period: Some(p.period),
                    });
                }
            }
        }
        let folds = kappas
            .iter()
            .filter(|&&k| saddle_node_point_pos(n, k, FoldSign::Plus).is_ok())
            .count();
        if folds < kappas.len() {
            data.notes.push(format!(
                "n = {n}: {} kappa values without folds",
                kappas.len() - folds
            ));
        }
        for coupling in [Coupling::Excitatory, Coupling::Inhibitory] {
            let c = cusp_point(n, coupling).expect("n >= 1");
            if args.kappa.contains(c.kappa) {
                data.rows.push(Row {
                    kind: "cusp",
                    n,
                    kappa: c.kappa,
                    tau: c.tau,
                    tau0: None,
                    period: None,
                });
            }
        }
    }
}
