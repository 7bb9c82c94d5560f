//! Exact event-driven simulation of the delta-feedback neuron.
//!
//! The state between events is advanced with the closed-form QIF flow, so
//! the only events are firings (computed in closed form) and delayed kicks
//! (known in advance). Nothing is integrated numerically.

use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::branch;
use crate::error::{Error, Result};
use crate::model::{time_to_fire, voltage_flow, ModelParams, Phase, Regime, VoltageEquivalent};
use crate::stability::{jacobian, jacobian_eigenvalues};

/// Kicks landing within this relative distance of a fixed point are snapped
/// onto it.
pub const FIXED_POINT_SNAP: f64 = 1e-12;
/// Relative ISI spread below which a firing sequence counts as periodic.
pub const PERIODIC_REL_STD: f64 = 1e-9;
/// Firings required after the transient to measure a period.
pub const MIN_FIRINGS: usize = 10;
/// Default horizon in units of `τ`.
pub const DEFAULT_HORIZON_TAUS: f64 = 200.0;
/// Longest horizon [`basin_probe`] will try, in units of `τ`.
pub const MAX_PROBE_HORIZON_TAUS: f64 = 20_000.0;

/// Past firings still feeding back at `t = 0`, and the phase at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialHistory {
    pub seed_firings: Vec<f64>,
    pub theta0: Phase,
}

impl InitialHistory {
    pub fn new(seed_firings: Vec<f64>, theta0: Phase, tau: f64) -> Result<Self> {
        if seed_firings.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "seed firings must be strictly increasing".into(),
            ));
        }
        if seed_firings.iter().any(|&t| !(t > -tau && t <= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "seed firings must lie in (-tau, 0] = (-{tau}, 0]"
            )));
        }
        Ok(Self {
            seed_firings,
            theta0,
        })
    }

    /// `k` firings equally spaced over the delay interval, the last at `t = 0`.
    pub fn equispaced(k: usize, tau: f64) -> Result<Self> {
        if k == 0 {
            return Self::new(Vec::new(), Phase::new(-PI / 2.0), tau);
        }
        let seeds = (0..k).rev().map(|j| -(j as f64) * tau / k as f64).collect();
        Self::new(seeds, Phase::SPIKE, tau)
    }

    /// The exact past of a periodic orbit with `n + 1` spikes per delay,
    /// having just fired at `t = 0`.
    pub fn periodic(period: f64, n: usize, tau: f64) -> Result<Self> {
        let seeds = (0..=n).rev().map(|j| -(j as f64) * period).collect();
        Self::new(seeds, Phase::SPIKE, tau)
    }
}

/// Which closed form governs a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    /// `I < 0`, strictly between the fixed points.
    Between,
    /// `I < 0`, above the threshold: fires, then relaxes from below.
    Above,
    /// `I < 0`, below the rest state (after a firing).
    Below,
    /// `I < 0`, sitting on a fixed point.
    Fixed,
    /// `I > 0`, free rotation.
    Rotating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub kind: SegmentKind,
    pub theta_start: Phase,
    /// `tan(θ_start/2)`, kept exactly since the flow is evaluated from it.
    pub v_start: f64,
}

/// How the simulation ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    /// Reached the requested horizon with activity possible.
    Horizon,
    /// No kicks pending and below threshold: relaxes to rest forever.
    DecayedToRest { t: f64 },
    /// No kicks pending and exactly on the threshold saddle.
    StalledOnSaddle { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTrajectory {
    pub params: ModelParams,
    /// Includes the seed firings of the history.
    pub firing_times: Vec<f64>,
    pub kick_times: Vec<f64>,
    pub segments: Vec<Segment>,
    pub t_end_sim: f64,
    pub outcome: Outcome,
}

impl EventTrajectory {
    /// Phase at time `t ∈ [0, t_end_sim]`, from the closed form of the
    /// containing segment (right-continuous at kicks).
    pub fn phase_at(&self, t: f64) -> Phase {
        let idx = self
            .segments
            .partition_point(|s| s.t_start <= t)
            .saturating_sub(1);
        let seg = &self.segments[idx];
        let v = voltage_flow(seg.v_start, t - seg.t_start, self.params.current());
        VoltageEquivalent(v).to_phase()
    }

    /// `(t, θ)` on a uniform grid of spacing `dt` over `[0, t_end_sim]`.
    pub fn sample(&self, dt: f64) -> Vec<(f64, f64)> {
        let steps = (self.t_end_sim / dt).floor() as usize;
        (0..=steps)
            .map(|i| {
                let t = i as f64 * dt;
                (t, self.phase_at(t).value())
            })
            .collect()
    }

    /// Firing times at or after `t0`.
    pub fn firings_after(&self, t0: f64) -> &[f64] {
        let i = self.firing_times.partition_point(|&t| t < t0);
        &self.firing_times[i..]
    }
}

fn segment_kind(v: f64, current: f64) -> SegmentKind {
    if current > 0.0 {
        return SegmentKind::Rotating;
    }
    let im = (-current).sqrt();
    if v.abs() == im {
        SegmentKind::Fixed
    } else if v.abs() < im {
        SegmentKind::Between
    } else if v > im {
        SegmentKind::Above
    } else {
        SegmentKind::Below
    }
}

/// Event-driven integrator that can be stopped and resumed at any time
/// without perturbing the sequence of events.
#[derive(Debug, Clone)]
pub struct EventSimulator {
    params: ModelParams,
    anchor_t: f64,
    anchor_v: f64,
    pending: VecDeque<f64>,
    firing_times: Vec<f64>,
    kick_times: Vec<f64>,
    segments: Vec<Segment>,
    t_now: f64,
    outcome: Outcome,
}

impl EventSimulator {
    pub fn new(params: ModelParams, history: &InitialHistory) -> Result<Self> {
        let tau = params.tau();
        InitialHistory::new(history.seed_firings.clone(), history.theta0, tau)?;
        let mut firing_times = history.seed_firings.clone();
        if history.theta0.is_spike() && firing_times.last() != Some(&0.0) {
            firing_times.push(0.0);
        }
        // A neuron at θ = π at t = 0 has just fired.
        let v0 = if history.theta0.is_spike() {
            f64::NEG_INFINITY
        } else {
            history.theta0.to_voltage().0
        };
        let pending = firing_times.iter().map(|t| t + tau).collect();
        let mut sim = Self {
            params,
            anchor_t: 0.0,
            anchor_v: v0,
            pending,
            firing_times,
            kick_times: Vec::new(),
            segments: Vec::new(),
            t_now: 0.0,
            outcome: Outcome::Horizon,
        };
        sim.check_quiescent();
        Ok(sim)
    }

    fn current(&self) -> f64 {
        self.params.current()
    }

    fn close_segment(&mut self, t_end: f64) {
        let current = self.current();
        self.segments.push(Segment {
            t_start: self.anchor_t,
            t_end,
            kind: segment_kind(self.anchor_v, current),
            theta_start: VoltageEquivalent(self.anchor_v).to_phase(),
            v_start: self.anchor_v,
        });
    }

    fn check_quiescent(&mut self) {
        if !self.pending.is_empty() || !matches!(self.outcome, Outcome::Horizon) {
            return;
        }
        if let Regime::Excitable { im } = self.params.regime() {
            if self.anchor_v == im {
                self.outcome = Outcome::StalledOnSaddle { t: self.anchor_t };
            } else if !(self.anchor_v > im) {
                self.outcome = Outcome::DecayedToRest { t: self.anchor_t };
            }
        }
    }

    /// Process every event with time `≤ t_end`.
    pub fn run_until(&mut self, t_end: f64) {
        let current = self.current();
        let tau = self.params.tau();
        let kappa = self.params.kappa();
        loop {
            let t_fire = time_to_fire(self.anchor_v, current).map(|d| self.anchor_t + d);
            let t_kick = self.pending.front().copied();
            // Firing wins ties: the kick then lands on θ = π and does nothing.
            let fire_next = match (t_fire, t_kick) {
                (Some(f), Some(k)) => f <= k,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            let t_event = if fire_next {
                t_fire.unwrap()
            } else {
                t_kick.unwrap()
            };
            if t_event > t_end {
                break;
            }
            self.close_segment(t_event);
            if fire_next {
                self.firing_times.push(t_event);
                self.pending.push_back(t_event + tau);
                self.anchor_v = f64::NEG_INFINITY;
            } else {
                self.pending.pop_front();
                self.kick_times.push(t_event);
                let v = voltage_flow(self.anchor_v, t_event - self.anchor_t, current);
                self.anchor_v = self.snap(v + kappa);
                self.check_quiescent();
            }
            self.anchor_t = t_event;
        }
        self.t_now = self.t_now.max(t_end);
    }

    fn snap(&self, v: f64) -> f64 {
        if let Regime::Excitable { im } = self.params.regime() {
            if (v.abs() - im).abs() <= FIXED_POINT_SNAP * im {
                return im.copysign(v);
            }
        }
        v
    }

    pub fn time(&self) -> f64 {
        self.t_now
    }

    pub fn firing_times(&self) -> &[f64] {
        &self.firing_times
    }

    /// Snapshot of everything simulated so far.
    pub fn trajectory(&self) -> EventTrajectory {
        let mut segments = self.segments.clone();
        segments.push(Segment {
            t_start: self.anchor_t,
            t_end: self.t_now,
            kind: segment_kind(self.anchor_v, self.current()),
            theta_start: VoltageEquivalent(self.anchor_v).to_phase(),
            v_start: self.anchor_v,
        });
        EventTrajectory {
            params: self.params,
            firing_times: self.firing_times.clone(),
            kick_times: self.kick_times.clone(),
            segments,
            t_end_sim: self.t_now,
            outcome: self.outcome,
        }
    }
}

/// Simulate from `history` up to `t_end`.
pub fn simulate(
    params: ModelParams,
    history: &InitialHistory,
    t_end: f64,
) -> Result<EventTrajectory> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    let mut sim = EventSimulator::new(params, history)?;
    sim.run_until(t_end);
    Ok(sim.trajectory())
}

/// Period and spike count of a converged periodic firing pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodMeasurement {
    pub period: f64,
    /// Extra spikes per delay interval (`n` of the branch).
    pub n: usize,
}

/// Mean inter-spike interval after `transient`, if the intervals agree to
/// [`PERIODIC_REL_STD`].
pub fn measure_period(traj: &EventTrajectory, transient: f64) -> Result<PeriodMeasurement> {
    period_of(traj.firings_after(transient), traj.params.tau())
}

fn period_of(firings: &[f64], tau: f64) -> Result<PeriodMeasurement> {
    if firings.len() < MIN_FIRINGS {
        return Err(Error::NotPeriodic(format!(
            "{} firings after the transient, need {MIN_FIRINGS}",
            firings.len()
        )));
    }
    let isi: Vec<f64> = firings.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = isi.iter().sum::<f64>() / isi.len() as f64;
    let var = isi.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / isi.len() as f64;
    if var.sqrt() >= PERIODIC_REL_STD * mean {
        return Err(Error::NotPeriodic(format!(
            "inter-spike interval spread {:e} relative",
            var.sqrt() / mean
        )));
    }
    let last = *firings.last().unwrap();
    let in_window = firings.iter().filter(|&&t| t > last - tau).count();
    Ok(PeriodMeasurement {
        period: mean,
        n: in_window - 1,
    })
}

/// Result of perturbing a periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasinOutcome {
    Recovered,
    SwitchedTo(usize),
    Died,
    /// Still firing but not periodic within the longest probe horizon.
    Unsettled,
}

/// Seed the stable n-th periodic orbit, shift its oldest seed firing by
/// `perturbation`, and report which attractor is reached.
pub fn basin_probe(
    params: ModelParams,
    n_target: usize,
    perturbation: f64,
) -> Result<BasinOutcome> {
    let target = branch::stable_solution(&params, n_target)?;
    let tau = params.tau();
    let mut history = InitialHistory::periodic(target.period, n_target, tau)?;
    if n_target == 0 {
        // The only seed is the firing at t = 0: move it into the past and
        // advance the phase accordingly.
        let shift = perturbation.abs();
        if shift > 0.0 {
            let v = voltage_flow(f64::NEG_INFINITY, shift, params.current());
            history = InitialHistory::new(vec![-shift], VoltageEquivalent(v).to_phase(), tau)?;
        }
    } else {
        let mut seeds = history.seed_firings.clone();
        seeds[0] += perturbation;
        history = InitialHistory::new(seeds, history.theta0, tau)?;
    }
    let mut sim = EventSimulator::new(params, &history)?;
    // Weakly contracting orbits need far more than the default horizon, so
    // extend it until the firing pattern settles.
    let chunk = DEFAULT_HORIZON_TAUS * tau;
    let mut horizon = 0.0;
    while horizon < MAX_PROBE_HORIZON_TAUS * tau {
        horizon += chunk;
        sim.run_until(horizon);
        if !matches!(sim.outcome, Outcome::Horizon) {
            return Ok(BasinOutcome::Died);
        }
        let firings = sim.firing_times();
        let i = firings.partition_point(|&t| t < 0.5 * horizon);
        if let Ok(m) = period_of(&firings[i..], tau) {
            return Ok(
                if m.n == n_target && (m.period - target.period).abs() <= 1e-6 * target.period {
                    BasinOutcome::Recovered
                } else {
                    BasinOutcome::SwitchedTo(m.n)
                },
            );
        }
    }
    Ok(BasinOutcome::Unsettled)
}

/// Per-firing contraction factor of a small perturbation of the stable
/// n-th orbit, measured by simulation.
///
/// The seed firings are displaced along the slowest nontrivial mode of the
/// firing map, `η_k = ε Re(λ^k)`, so the displacement of later firings is a
/// single (possibly oscillating) mode whose modulus is fitted over at most
/// `firings` firings. Returns 0 when there is no nontrivial mode (`n = 0`).
pub fn perturbation_decay_rate(
    params: ModelParams,
    n: usize,
    epsilon: f64,
    firings: usize,
) -> Result<f64> {
    let target = branch::stable_solution(&params, n)?;
    if n == 0 {
        return Ok(0.0);
    }
    let tau = params.tau();
    let period = target.period;
    let eig = jacobian_eigenvalues(&jacobian(n, target.gamma));
    let lambda = eig[1];
    let base = InitialHistory::periodic(period, n, tau)?;
    // The newest seed is the firing at t = 0; pick the sign of ε that moves
    // it into the past so the history stays in (−τ, 0].
    let eps = if lambda.powu(n as u32).re > 0.0 {
        -epsilon.abs()
    } else {
        epsilon.abs()
    };
    // seeds[k] is firing −(n−k)T; the eigenvector of J is (1, λ, …, λ^n)
    let seeds: Vec<f64> = base
        .seed_firings
        .iter()
        .enumerate()
        .map(|(k, t)| t + eps * lambda.powu(k as u32).re)
        .collect();
    let v = voltage_flow(f64::NEG_INFINITY, -seeds[n], params.current());
    let theta0 = VoltageEquivalent(v).to_phase();
    let history = InitialHistory::new(seeds, theta0, tau)?;
    let t_end = (firings as f64 + n as f64 + 2.0) * period;
    let traj = simulate(params, &history, t_end)?;
    // displacement of firing i (i = 1, 2, …) relative to the unperturbed i·T
    let eta: Vec<f64> = traj
        .firings_after(1e-12)
        .iter()
        .take(firings)
        .enumerate()
        .map(|(i, t)| t - (i as f64 + 1.0) * period)
        .collect();
    let floor = 1e-3 * eps.abs() + 1e-11 * t_end;
    let usable: Vec<f64> = eta
        .iter()
        .copied()
        .take_while(|e| e.abs() > floor)
        .collect();
    fit_mode_modulus(&usable, lambda)
}

fn fit_mode_modulus(eta: &[f64], lambda: Complex<f64>) -> Result<f64> {
    if lambda.im.abs() < 1e-12 {
        // η_{i+1} = λ η_i
        if eta.len() < 2 {
            return Err(Error::Numerical(
                "too few resolved firings to fit a decay rate".into(),
            ));
        }
        let (num, den) = eta
            .windows(2)
            .fold((0.0, 0.0), |(a, b), w| (a + w[0] * w[1], b + w[0] * w[0]));
        Ok((num / den).abs())
    } else {
        // η_{i+1} = p η_i − q η_{i−1} with q = |λ|²
        if eta.len() < 4 {
            return Err(Error::Numerical(
                "too few resolved firings to fit a decay rate".into(),
            ));
        }
        let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for w in eta.windows(3) {
            let (x1, x2, y) = (w[1], -w[0], w[2]);
            a11 += x1 * x1;
            a12 += x1 * x2;
            a22 += x2 * x2;
            b1 += x1 * y;
            b2 += x2 * y;
        }
        let det = a11 * a22 - a12 * a12;
        if det == 0.0 {
            return Err(Error::Numerical("singular decay-rate fit".into()));
        }
        let q = (a11 * b2 - a12 * b1) / det;
        Ok(q.abs().sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn history_validation() {
        assert!(InitialHistory::new(vec![-1.0, -2.0], Phase::SPIKE, 4.0).is_err());
        assert!(InitialHistory::new(vec![-4.0], Phase::SPIKE, 4.0).is_err());
        assert!(InitialHistory::new(vec![0.5], Phase::SPIKE, 4.0).is_err());
        let h = InitialHistory::equispaced(3, 6.0).unwrap();
        assert_eq!(h.seed_firings, vec![-4.0, -2.0, 0.0]);
    }

    #[test]
    fn rest_state_is_not_periodic() {
        let p = ModelParams::new(-1.0, 5.0, 4.0).unwrap();
        let h = InitialHistory::new(vec![], Phase::new(-1.0), 4.0).unwrap();
        let traj = simulate(p, &h, 100.0).unwrap();
        assert!(matches!(traj.outcome, Outcome::DecayedToRest { .. }));
        assert!(traj.firing_times.is_empty());
        assert!(matches!(
            measure_period(&traj, 0.0),
            Err(Error::NotPeriodic(_))
        ));
        assert!((traj.phase_at(80.0).value() + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_oscillator_fires_with_free_period() {
        let p = ModelParams::new(1.0, 0.0, 2.0).unwrap();
        let h = InitialHistory::new(vec![0.0], Phase::SPIKE, 2.0).unwrap();
        let traj = simulate(p, &h, 100.0).unwrap();
        let m = measure_period(&traj, 10.0).unwrap();
        assert!((m.period - PI).abs() < 1e-12);
        // kicks of zero strength are still scheduled
        assert_eq!(
            traj.kick_times.len(),
            traj.firing_times
                .iter()
                .filter(|&&t| t + 2.0 <= 100.0)
                .count()
        );
    }

    #[test]
    fn weak_kick_decays_to_rest() {
        // κ = 1 cannot lift the rest state V = −1 above the threshold V = 1.
        let p = ModelParams::new(-1.0, 1.0, 3.0).unwrap();
        let h = InitialHistory::equispaced(1, 3.0).unwrap();
        let traj = simulate(p, &h, 50.0).unwrap();
        assert!(matches!(traj.outcome, Outcome::DecayedToRest { .. }));
        assert_eq!(traj.firing_times, vec![0.0]);
    }

    #[test]
    fn phase_is_continuous_between_events_and_jumps_at_kicks() {
        let p = ModelParams::new(-1.0, 5.0, 4.0).unwrap();
        let h = InitialHistory::equispaced(2, 4.0).unwrap();
        let traj = simulate(p, &h, 40.0).unwrap();
        let k = traj.kick_times[3];
        let before = traj.phase_at(k - 1e-9).value();
        let after = traj.phase_at(k).value();
        let kicked = crate::model::apply_kick(Phase::new(before), 5.0).value();
        assert!((after - kicked).abs() < 1e-6);
    }

    #[test]
    fn zero_perturbation_recovers() {
        let p = ModelParams::new(-1.0, 5.0, 4.0).unwrap();
        assert_eq!(basin_probe(p, 1, 0.0).unwrap(), BasinOutcome::Recovered);
        assert_eq!(basin_probe(p, 0, 0.0).unwrap(), BasinOutcome::Recovered);
    }
}
