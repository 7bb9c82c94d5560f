use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime};
use crate::stability::Stability;
use crate::{excitable, oscillatory};

/// A periodic solution with `n + 1` equally spaced spikes per delay interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub n: usize,
    pub tau: f64,
    pub period: f64,
    pub gamma: f64,
    pub stability: Stability,
}

/// Location of the saddle-node bifurcation on the n-th branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleNodePoint {
    /// Delay of the preimage on the primary branch.
    pub tau0: f64,
    pub period: f64,
    pub tau: f64,
}

/// Periodic solutions with `n` extra spikes per delay at a physical
/// parameter point, for any nonzero current.
///
/// The analytic modules work at `|I| = 1`; this rescales in and out.
pub fn periodic_solutions(params: &ModelParams, n: usize) -> Vec<BranchPoint> {
    let (kappa, tau) = params.normalized();
    let scale = params.current_scale();
    let points = match params.regime() {
        Regime::Excitable { .. } => excitable::solve_branch(n, tau, kappa),
        Regime::Oscillatory { .. } => oscillatory::solve_branch_pos(n, tau, kappa),
    };
    points
        .into_iter()
        .map(|p| BranchPoint {
            tau: params.tau(),
            period: p.period / scale,
            ..p
        })
        .collect()
}

/// The stable periodic solution with `n` extra spikes per delay, if any.
///
/// When several coexist (possible for positive current) the one with the
/// smallest `γ` is returned.
pub fn stable_solution(params: &ModelParams, n: usize) -> Result<BranchPoint> {
    periodic_solutions(params, n)
        .into_iter()
        .filter(|p| p.stability.is_stable())
        .min_by(|a, b| a.gamma.total_cmp(&b.gamma))
        .ok_or_else(|| Error::NoSolution(format!("no stable solution with n = {n} at {params:?}")))
}
