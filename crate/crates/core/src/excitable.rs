//! Periodic solutions for negative current, normalized to `I = −1`.
//!
//! A solution with `n + 1` spikes per delay interval and period `T` exists
//! iff `coth((n+1)T − τ) = κ + coth(nT − τ)` with `τ/(n+1) < T < τ/n`. The
//! `n = 0` branch is explicit; every other branch is its image under the
//! reappearance map `(τ, T) ↦ (τ + nT, T)`.

use serde::{Deserialize, Serialize};

use crate::branch::{BranchPoint, SaddleNodePoint};
use crate::error::{Error, Result};
use crate::model::{acoth, coth};
use crate::roots;
use crate::stability::{classify_branch_point, gamma_negative_at};

/// Grid intervals per existence window when scanning for roots.
pub const SCAN_POINTS: usize = 10_000;
/// Bisection tolerance, relative to `max(1, τ)`.
pub const BISECT_TOL: f64 = 1e-13;
/// Relative shrink of the open window `(τ/(n+1), τ/n)`.
pub const WINDOW_EPS: f64 = 1e-9;

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 2.0 {
        Ok(())
    } else {
        Err(Error::NoPulsation { kappa })
    }
}

/// `coth((n+1)T − τ) − κ − coth(nT − τ)`.
pub fn existence_residual(n: usize, tau: f64, period: f64, kappa: f64) -> f64 {
    let nf = n as f64;
    coth((nf + 1.0) * period - tau) - kappa - coth(nf * period - tau)
}

fn residual_slope(n: usize, tau: f64, period: f64) -> f64 {
    let nf = n as f64;
    let csch2 = |x: f64| 1.0 / x.sinh().powi(2);
    -(nf + 1.0) * csch2((nf + 1.0) * period - tau) + nf * csch2(nf * period - tau)
}

/// Delay of the homoclinic bifurcation of the primary branch,
/// `τ* = acoth(κ − 1)`. No periodic solution exists for `τ ≤ τ*`.
pub fn homoclinic_tau(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(acoth(kappa - 1.0))
}

/// Period on the primary branch, `T(τ) = τ + acoth(κ − coth τ)`.
pub fn primary_branch_t(tau: f64, kappa: f64) -> Result<f64> {
    let tau_star = homoclinic_tau(kappa)?;
    if !(tau > tau_star) {
        return Err(Error::NoSolution(format!(
            "tau = {tau} is at or below the homoclinic point {tau_star}"
        )));
    }
    Ok(tau + acoth(kappa - coth(tau)))
}

/// `dT/dτ` along the primary branch.
pub fn primary_branch_slope(tau: f64, kappa: f64) -> f64 {
    let c = coth(tau);
    1.0 + (c * c - 1.0) / (1.0 - (kappa - c).powi(2))
}

/// Minimum period `T̄ = 2 acoth(κ/2)`, shared by the superstable points of
/// all branches.
pub fn min_period(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(2.0 * acoth(kappa / 2.0))
}

fn make_point(n: usize, tau: f64, period: f64, kappa: f64) -> Result<BranchPoint> {
    let gamma = gamma_negative_at(tau - n as f64 * period, kappa);
    Ok(BranchPoint {
        n,
        tau,
        period,
        gamma,
        stability: classify_branch_point(n, gamma)?,
    })
}

/// All periodic solutions with `n` extra spikes per delay at `(τ, κ)`.
///
/// Returns an empty list when there are none (in particular for `κ ≤ 2`).
/// For `n ≥ 1` there are zero or two roots away from the fold.
pub fn solve_branch(n: usize, tau: f64, kappa: f64) -> Vec<BranchPoint> {
    if kappa <= 2.0 || !(tau > 0.0) {
        return Vec::new();
    }
    if n == 0 {
        return primary_branch_t(tau, kappa)
            .and_then(|t| make_point(0, tau, t, kappa))
            .into_iter()
            .collect();
    }
    let nf = n as f64;
    let eps = WINDOW_EPS * tau;
    let lo = tau / (nf + 1.0) + eps;
    let hi = tau / nf - eps;
    let tol = BISECT_TOL * tau.max(1.0);
    roots::scan_roots(
        |t| existence_residual(n, tau, t, kappa),
        |t| residual_slope(n, tau, t),
        lo,
        hi,
        SCAN_POINTS,
        tol,
    )
    .into_iter()
    .filter_map(|t| make_point(n, tau, t, kappa).ok())
    .collect()
}

/// The n-th branch traced through the primary branch:
/// `(τ, T) = (s + n T(s), T(s))` for each `s > τ*`.
pub fn branch_parametric(n: usize, kappa: f64, s_grid: &[f64]) -> Result<Vec<BranchPoint>> {
    let tau_star = homoclinic_tau(kappa)?;
    s_grid
        .iter()
        .map(|&s| {
            if !(s > tau_star) {
                return Err(Error::InvalidParameter(format!(
                    "branch parameter s = {s} must exceed tau* = {tau_star}"
                )));
            }
            let t = primary_branch_t(s, kappa)?;
            make_point(n, s + n as f64 * t, t, kappa)
        })
        .collect()
}

/// Parameter values for tracing a branch: log-spaced just above the
/// asymptote `τ*`, linear from `τ* + 1` up to `s_max`.
pub fn branch_s_grid(kappa: f64, s_max: f64, count: usize) -> Result<Vec<f64>> {
    let tau_star = homoclinic_tau(kappa)?;
    if count < 4 || !(s_max > tau_star) {
        return Err(Error::InvalidParameter(
            "need s_max > tau* and at least 4 samples".into(),
        ));
    }
    let knee = (tau_star + 1.0).min(s_max);
    let n_log = count / 2;
    let n_lin = count - n_log;
    let mut grid = Vec::with_capacity(count);
    // offsets from τ* between 1e-6 and knee − τ*
    let (a, b) = ((1e-6f64).ln(), (knee - tau_star).ln());
    for i in 0..n_log {
        let u = a + (b - a) * i as f64 / n_log as f64;
        grid.push(tau_star + u.exp());
    }
    for i in 0..n_lin {
        let u = if n_lin == 1 {
            0.0
        } else {
            i as f64 / (n_lin - 1) as f64
        };
        grid.push(knee + (s_max - knee) * u);
    }
    Ok(grid)
}

/// Fold of the n-th branch: `coth τ₀ = κ(1+n) − √(1 + κ²(n²+n))`,
/// `T = T(τ₀)`, `τ = τ₀ + nT`.
pub fn saddle_node_point(n: usize, kappa: f64) -> Result<SaddleNodePoint> {
    check_kappa(kappa)?;
    if n == 0 {
        return Err(Error::NoFold { n, kappa });
    }
    let nf = n as f64;
    let root = (1.0 + kappa * kappa * (nf * nf + nf)).sqrt();
    let c = kappa * (1.0 + nf) - root;
    if !(c > 1.0) {
        return Err(Error::Numerical(format!("coth(tau0) = {c} is not above 1")));
    }
    let tau0 = acoth(c);
    let period = tau0 + acoth(root - kappa * nf);
    Ok(SaddleNodePoint {
        tau0,
        period,
        tau: tau0 + nf * period,
    })
}

/// Fold curve of the n-th branch sampled over `kappas`; values `κ ≤ 2` are
/// skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleNodeLocus {
    pub n: usize,
    /// `(κ, τ_sn, T_sn)`
    pub samples: Vec<(f64, f64, f64)>,
}

pub fn saddle_node_locus(n: usize, kappas: &[f64]) -> SaddleNodeLocus {
    let samples = kappas
        .iter()
        .filter_map(|&k| saddle_node_point(n, k).ok().map(|p| (k, p.tau, p.period)))
        .collect();
    SaddleNodeLocus { n, samples }
}

/// Superstable point (`γ = 1`, minimum of `T`) on the n-th branch:
/// `((2n+1) T̄/2, T̄)`.
pub fn superstable_point(n: usize, kappa: f64) -> Result<(f64, f64)> {
    let t_bar = min_period(kappa)?;
    Ok(((2.0 * n as f64 + 1.0) * t_bar / 2.0, t_bar))
}
