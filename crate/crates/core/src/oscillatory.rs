//! Periodic solutions for positive current, normalized to `I = +1`.
//!
//! Between kicks `dθ/dt = 2`, and a solution with `n + 1` spikes per delay
//! satisfies `(n+1)T = τ + π/2 − atan(κ − cot(τ − nT))`. Excitatory
//! (`κ > 0`) and inhibitory (`κ < 0`) branches are point reflections of each
//! other about `((n + 1/2)π, π)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::branch::{BranchPoint, SaddleNodePoint};
use crate::error::{Error, Result};
use crate::roots;
use crate::stability::{classify_branch_point, gamma_positive_at};

pub const SCAN_POINTS: usize = 10_000;
pub const BISECT_TOL: f64 = 1e-13;
pub const WINDOW_EPS: f64 = 1e-9;
const ENDPOINT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FoldSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coupling {
    Excitatory,
    Inhibitory,
}

/// Meeting point of the two fold curves of the n-th branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspPoint {
    pub n: usize,
    pub tau: f64,
    pub kappa: f64,
}

/// Time from the kick to the next firing, `π/2 − atan(κ − cot s)`, where
/// `s` is the time from the last firing to the kick.
fn time_after_kick(s: f64, kappa: f64) -> f64 {
    if (-ENDPOINT_SLACK..=PI + ENDPOINT_SLACK).contains(&s) {
        // multiply through by sin s ≥ 0 so the endpoints are finite; the
        // clamp keeps round-off just outside [0, π] on the same branch
        let (sn, cs) = s.sin_cos();
        let sn = sn.max(0.0);
        sn.atan2(kappa * sn - cs)
    } else {
        1.0f64.atan2(kappa - 1.0 / s.tan())
    }
}

/// `(n+1)T − τ − π/2 + atan(κ − cot(τ − nT))`.
pub fn existence_residual(n: usize, tau: f64, period: f64, kappa: f64) -> f64 {
    let nf = n as f64;
    (nf + 1.0) * period - tau - time_after_kick(tau - nf * period, kappa)
}

/// Period on the primary branch, `T(τ) = τ + π/2 − atan(κ − cot τ)`,
/// defined for `0 ≤ τ ≤ π`; other delays are reached by reappearance.
pub fn primary_branch_t_pos(tau: f64, kappa: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&tau) {
        return Err(Error::InvalidParameter(format!(
            "primary branch needs 0 <= tau <= pi, got {tau}; use the branch reappearance"
        )));
    }
    Ok(tau + time_after_kick(tau, kappa))
}

/// `T̄ = 2 acot(κ/2)` with `acot ∈ (0, π)`: the period at `γ = 1` away from
/// the branch ends (a minimum for `κ > 0`, a maximum for `κ < 0`).
pub fn superstable_period_pos(kappa: f64) -> f64 {
    2.0 * 1.0f64.atan2(kappa / 2.0)
}

/// Interior superstable point of the n-th branch, `((n + 1/2) T̄, T̄)`.
pub fn superstable_point_pos(n: usize, kappa: f64) -> (f64, f64) {
    let t_bar = superstable_period_pos(kappa);
    ((n as f64 + 0.5) * t_bar, t_bar)
}

fn make_point(n: usize, tau: f64, period: f64, kappa: f64) -> Result<BranchPoint> {
    let gamma = gamma_positive_at(tau - n as f64 * period, kappa);
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
/// The time from a firing to the kick, `s = τ − nT`, must lie in `(0, π)`
/// so that the free neuron does not fire before the kick arrives.
pub fn solve_branch_pos(n: usize, tau: f64, kappa: f64) -> Vec<BranchPoint> {
    if !(tau > 0.0) {
        return Vec::new();
    }
    if n == 0 {
        return primary_branch_t_pos(tau, kappa)
            .and_then(|t| make_point(0, tau, t, kappa))
            .into_iter()
            .collect();
    }
    let nf = n as f64;
    let eps = WINDOW_EPS * tau;
    let lo = (tau / (nf + 1.0)).max((tau - PI) / nf) + eps;
    let hi = tau / nf - eps;
    let tol = BISECT_TOL * tau.max(1.0);
    roots::scan_roots(
        |t| existence_residual(n, tau, t, kappa),
        |t| (nf + 1.0) - nf * gamma_positive_at(tau - nf * t, kappa),
        lo,
        hi,
        SCAN_POINTS,
        tol,
    )
    .into_iter()
    .filter_map(|t| make_point(n, tau, t, kappa).ok())
    .collect()
}

/// The n-th branch as the image of the primary branch:
/// `(τ, T) = (s + n T(s), T(s))`, `s ∈ [0, π]`.
pub fn branch_parametric_pos(n: usize, kappa: f64, s_grid: &[f64]) -> Result<Vec<BranchPoint>> {
    s_grid
        .iter()
        .map(|&s| {
            let t = primary_branch_t_pos(s, kappa)?;
            make_point(n, s + n as f64 * t, t, kappa)
        })
        .collect()
}

/// Point reflection about `((n + 1/2)π, π)`, taking the n-th branch for
/// `κ = K` to the n-th branch for `κ = −K`. `γ` is invariant.
pub fn rotate_branch(points: &[BranchPoint], n: usize) -> Result<Vec<BranchPoint>> {
    let tau_c2 = (2.0 * n as f64 + 1.0) * PI;
    points
        .iter()
        .map(|p| {
            if p.n != n {
                return Err(Error::InvalidParameter(format!(
                    "point belongs to branch {} but rotation is about branch {n}",
                    p.n
                )));
            }
            Ok(BranchPoint {
                tau: tau_c2 - p.tau,
                period: 2.0 * PI - p.period,
                ..*p
            })
        })
        .collect()
}

/// One of the two folds of the n-th branch:
/// `τ₀ = acot(κ(n+1) ± √(κ²(n²+n) − 1))`, `T = T(τ₀)`, `τ = τ₀ + nT`.
pub fn saddle_node_point_pos(n: usize, kappa: f64, sign: FoldSign) -> Result<SaddleNodePoint> {
    let nf = n as f64;
    let disc = kappa * kappa * (nf * nf + nf) - 1.0;
    if n == 0 || !(disc > 0.0) {
        return Err(Error::NoFold { n, kappa });
    }
    let root = disc.sqrt();
    let x = match sign {
        FoldSign::Plus => kappa * (nf + 1.0) + root,
        FoldSign::Minus => kappa * (nf + 1.0) - root,
    };
    let tau0 = 1.0f64.atan2(x);
    let period = primary_branch_t_pos(tau0, kappa)?;
    Ok(SaddleNodePoint {
        tau0,
        period,
        tau: tau0 + nf * period,
    })
}

/// Fold curve `(κ, τ_sn, T_sn)` of the n-th branch; values of `κ` without
/// folds are skipped.
pub fn saddle_node_locus_pos(n: usize, sign: FoldSign, kappas: &[f64]) -> Vec<(f64, f64, f64)> {
    kappas
        .iter()
        .filter_map(|&k| {
            saddle_node_point_pos(n, k, sign)
                .ok()
                .map(|p| (k, p.tau, p.period))
        })
        .collect()
}

/// Cusp where the `±` fold curves of branch `n ≥ 1` meet, `κ²(n²+n) = 1`.
pub fn cusp_point(n: usize, coupling: Coupling) -> Result<CuspPoint> {
    if n == 0 {
        return Err(Error::NoFold { n, kappa: 0.0 });
    }
    let nf = n as f64;
    let a = 1.0f64.atan2(((nf + 1.0) / nf).sqrt());
    let b = (nf / (nf + 1.0)).sqrt().atan();
    let k = 1.0 / (nf * nf + nf).sqrt();
    Ok(match coupling {
        Coupling::Excitatory => CuspPoint {
            n,
            tau: (nf + 1.0) * a + nf * PI / 2.0 + nf * b,
            kappa: k,
        },
        Coupling::Inhibitory => CuspPoint {
            n,
            tau: (1.0 + 1.5 * nf) * PI - (nf + 1.0) * a - nf * b,
            kappa: -k,
        },
    })
}
