//! The neuron with a smooth delayed pulse instead of a delta kick:
//! `dθ/dt = 1 − cos θ + (1 + cos θ)(I + κ P(θ(t − τ)))`.
//!
//! Integrated with fixed-step RK4 on a grid that divides `τ` exactly, so the
//! delayed argument always lands on a stored grid point or half-step. Half
//! steps of the computed solution come from the cubic Hermite interpolant.
//! `θ` is kept as an unwrapped lift; spikes are upward crossings of odd
//! multiples of `π`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{wrap_angle, ModelParams, Phase};

/// Pulse exponent of the standard feedback pulse.
pub const STANDARD_PULSE_EXPONENT: u32 = 5;
/// Default transient, in units of `τ`.
pub const DEFAULT_TRANSIENT_TAUS: f64 = 100.0;
/// Spike times are bisected to this accuracy.
pub const SPIKE_TIME_TOL: f64 = 1e-10;
/// Relative inter-spike interval spread below which ISIs count as one value.
pub const ISI_CLUSTER_TOL: f64 = 1e-3;
/// Spikes required after the transient before classifying.
pub const MIN_CLASSIFY_SPIKES: usize = 40;
/// A period-doubled alternation must keep this fraction of its amplitude
/// from the first to the second half of the window; a decaying one is a
/// slow approach to a period-one orbit.
pub const PD_PERSISTENCE: f64 = 0.995;
/// Smallest number of steps per delay.
pub const MIN_STEPS_PER_DELAY: usize = 8;

/// `P_m(θ) = c_m (1 − cos θ)^m` with `∫₀^{2π} P_m = 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    m: u32,
    c: f64,
}

impl Pulse {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "pulse exponent must be at least 1".into(),
            ));
        }
        // c_1 = 1, c_m = c_{m−1} m / (2m − 1)
        let c = (2..=m).fold(1.0, |c, k| c * k as f64 / (2 * k - 1) as f64);
        Ok(Self { m, c })
    }

    pub fn standard() -> Self {
        Self::new(STANDARD_PULSE_EXPONENT).unwrap()
    }

    pub fn exponent(&self) -> u32 {
        self.m
    }

    pub fn normalization(&self) -> f64 {
        self.c
    }

    #[inline]
    pub fn eval(&self, theta: f64) -> f64 {
        self.c * (1.0 - theta.cos()).powi(self.m as i32)
    }
}

/// `P(θ) = (8/63)(1 − cos θ)^5`.
pub fn pulse_function(theta: Phase) -> f64 {
    Pulse::standard().eval(theta.value())
}

/// Initial function on `[−τ, 0]`, as an unwrapped lift of `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum History {
    Constant(f64),
    /// `k` spikes equally spaced over the delay, the last at `t = 0`, each
    /// shaped like a free theta-neuron spike (crossing `π` at speed 2).
    Spikes {
        k: usize,
    },
    /// Samples `values[i]` at `t = −spacing·(len − 1 − i)`; cubic
    /// interpolation in between and constant extension to the left.
    Dense {
        spacing: f64,
        values: Vec<f64>,
    },
}

impl History {
    pub fn eval(&self, t: f64, tau: f64) -> f64 {
        match self {
            History::Constant(th) => *th,
            History::Spikes { k } => spike_train_lift(t, *k, tau),
            History::Dense { spacing, values } => dense_eval(t, *spacing, values),
        }
    }

    /// The lift shifted so that `θ(0)` lies in `(−π, π]`.
    fn normalized(&self, tau: f64) -> (f64, History) {
        let th0 = self.eval(0.0, tau);
        let shift = th0 - wrap_angle(th0);
        (shift, self.clone())
    }
}

fn spike_train_lift(t: f64, k: usize, tau: f64) -> f64 {
    if k == 0 {
        return -PI / 2.0;
    }
    let isi = tau / k as f64;
    let omega = PI / isi;
    let u = t / isi;
    let m = (u + 0.5).floor();
    let r = u - m;
    if r == 0.0 {
        return (2.0 * m + 1.0) * PI;
    }
    let base = if r > 0.0 {
        2.0 * PI * (m + 1.0)
    } else {
        2.0 * PI * m
    };
    2.0 * (-omega / (PI * r).tan()).atan() + base
}

fn dense_eval(t: f64, h: f64, values: &[f64]) -> f64 {
    let len = values.len();
    let x = (len - 1) as f64 + t / h;
    if x <= 0.0 {
        return values[0];
    }
    if x >= (len - 1) as f64 {
        return values[len - 1];
    }
    if len < 4 {
        let j = x.floor() as usize;
        let f = x - j as f64;
        return values[j] * (1.0 - f) + values[j + 1] * f;
    }
    // cubic Lagrange through the four nearest samples
    let i0 = (x.floor() as usize).saturating_sub(1).min(len - 4);
    let s = x - i0 as f64;
    let (y0, y1, y2, y3) = (values[i0], values[i0 + 1], values[i0 + 2], values[i0 + 3]);
    let l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
    let l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
    let l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
    let l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
    y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothConfig {
    /// Requested step; rounded down so that it divides `τ`. Default
    /// `min(1e−4 τ, 1e−3)`.
    pub dt: Option<f64>,
    /// Default `100 τ`.
    pub transient: Option<f64>,
    pub pulse_exponent: u32,
    /// Record wrapped `(t, θ)` samples at this spacing (rounded to steps).
    pub sample_dt: Option<f64>,
    /// Length of the final state kept for continuation; at least `τ`.
    pub tail: Option<f64>,
}

impl Default for SmoothConfig {
    fn default() -> Self {
        Self {
            dt: None,
            transient: None,
            pulse_exponent: STANDARD_PULSE_EXPONENT,
            sample_dt: None,
            tail: None,
        }
    }
}

impl SmoothConfig {
    pub fn steps_per_delay(&self, tau: f64) -> Result<usize> {
        let want = self.dt.unwrap_or((1e-4 * tau).min(1e-3));
        if !(want > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {want}"
            )));
        }
        let n = (tau / want).ceil();
        if n < MIN_STEPS_PER_DELAY as f64 {
            return Err(Error::InvalidParameter(format!(
                "dt = {want} leaves fewer than {MIN_STEPS_PER_DELAY} steps per delay"
            )));
        }
        Ok(n as usize)
    }

    pub fn transient(&self, tau: f64) -> f64 {
        self.transient.unwrap_or(DEFAULT_TRANSIENT_TAUS * tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Attractor {
    /// One inter-spike interval; `n` extra spikes per delay.
    Periodic {
        n: usize,
    },
    PeriodDoubled,
    Chaotic,
    Rest,
    /// None of the above could be established.
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub exponent: f64,
    /// 95 % bootstrap interval over renormalization windows.
    pub ci_low: f64,
    pub ci_high: f64,
    pub windows: usize,
    /// The reference trajectory did not spike while measuring.
    pub rest: bool,
}

impl LyapunovEstimate {
    pub fn is_positive(&self) -> bool {
        self.ci_low > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DdeRun {
    pub params: ModelParams,
    pub pulse_exponent: u32,
    pub dt: f64,
    pub t_end: f64,
    pub transient: f64,
    /// Upward crossings of odd multiples of `π`.
    pub spike_times: Vec<f64>,
    /// Downward crossings, each of which emits a spurious pulse.
    pub down_crossings: Vec<f64>,
    pub measured_period: Option<f64>,
    pub lyapunov: Option<LyapunovEstimate>,
    pub attractor: Attractor,
    /// Wrapped `(t, θ)` samples if requested.
    pub samples: Vec<(f64, f64)>,
    /// The last stretch of the solution, shifted to end at `t = 0`; usable
    /// as the history of a follow-up run.
    pub final_state: History,
}

impl DdeRun {
    pub fn spurious_pulse(&self) -> bool {
        !self.down_crossings.is_empty()
    }

    pub fn spikes_after_transient(&self) -> &[f64] {
        let i = self.spike_times.partition_point(|&t| t < self.transient);
        &self.spike_times[i..]
    }
}

#[derive(Debug, Clone)]
struct Integrator {
    current: f64,
    kappa: f64,
    pulse: Pulse,
    dt: f64,
    delay_steps: usize,
    /// θ at grid points and half steps, indexed by step modulo `len`.
    grid: Vec<f64>,
    half: Vec<f64>,
    k: usize,
    theta: f64,
    f: f64,
}

impl Integrator {
    fn new(
        params: &ModelParams,
        pulse: Pulse,
        n: usize,
        tail_steps: usize,
        history: &History,
    ) -> Self {
        let tau = params.tau();
        let dt = tau / n as f64;
        let len = tail_steps.max(n) + 1;
        let (shift, history) = history.normalized(tau);
        let mut grid = vec![0.0; len];
        let mut half = vec![0.0; len];
        // step index k ↔ time (k − (len − 1))·dt for the history
        for j in 0..len {
            let t = -((len - 1 - j) as f64) * dt;
            grid[j] = history.eval(t, tau) - shift;
            half[j] = history.eval(t + 0.5 * dt, tau) - shift;
        }
        let k = len - 1;
        let theta = grid[k];
        let mut it = Self {
            current: params.current(),
            kappa: params.kappa(),
            pulse,
            dt,
            delay_steps: n,
            grid,
            half,
            k,
            theta,
            f: 0.0,
        };
        it.f = it.rhs(theta, it.grid_at(k - n));
        it
    }

    #[inline]
    fn rhs(&self, theta: f64, delayed: f64) -> f64 {
        let c = theta.cos();
        1.0 - c + (1.0 + c) * (self.current + self.kappa * self.pulse.eval(delayed))
    }

    #[inline]
    fn grid_at(&self, k: usize) -> f64 {
        self.grid[k % self.grid.len()]
    }

    #[inline]
    fn half_at(&self, k: usize) -> f64 {
        self.half[k % self.half.len()]
    }

    fn recompute_f(&mut self) {
        self.f = self.rhs(self.theta, self.grid_at(self.k - self.delay_steps));
    }

    /// One RK4 step; returns `(θ_old, f_old)` of the step start.
    fn step(&mut self) -> (f64, f64) {
        let dt = self.dt;
        let kd = self.k - self.delay_steps;
        let (dm, d1) = (self.half_at(kd), self.grid_at(kd + 1));
        let (th0, f0) = (self.theta, self.f);
        let k2 = self.rhs(th0 + 0.5 * dt * f0, dm);
        let k3 = self.rhs(th0 + 0.5 * dt * k2, dm);
        let k4 = self.rhs(th0 + dt * k3, d1);
        let th1 = th0 + dt / 6.0 * (f0 + 2.0 * k2 + 2.0 * k3 + k4);
        let f1 = self.rhs(th1, d1);
        let len = self.grid.len();
        self.half[self.k % len] = 0.5 * (th0 + th1) + dt * (f0 - f1) / 8.0;
        self.k += 1;
        self.grid[self.k % len] = th1;
        self.theta = th1;
        self.f = f1;
        (th0, f0)
    }

    /// Sup-norm distance over the delay window.
    fn distance(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for k in self.k - self.delay_steps..=self.k {
            d = d.max((self.grid_at(k) - other.grid_at(k)).abs());
            if k < self.k {
                d = d.max((self.half_at(k) - other.half_at(k)).abs());
            }
        }
        d
    }

    /// Pull `other` toward `self` by `factor` over the delay window.
    fn rescale(&self, other: &mut Self, factor: f64) {
        let len = self.grid.len();
        for k in self.k - self.delay_steps..=self.k {
            let i = k % len;
            other.grid[i] = self.grid[i] + (other.grid[i] - self.grid[i]) * factor;
            if k < self.k {
                other.half[i] = self.half[i] + (other.half[i] - self.half[i]) * factor;
            }
        }
        other.theta = other.grid[self.k % len];
        other.recompute_f();
    }

    fn tail(&self, steps: usize) -> History {
        let steps = steps.min(self.grid.len() - 1);
        let mut values = Vec::with_capacity(2 * steps + 1);
        for k in self.k - steps..self.k {
            values.push(self.grid_at(k));
            values.push(self.half_at(k));
        }
        values.push(self.theta);
        History::Dense {
            spacing: 0.5 * self.dt,
            values,
        }
    }
}

#[inline]
fn hermite(th0: f64, th1: f64, f0: f64, f1: f64, dt: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * th0
        + (s3 - 2.0 * s2 + s) * dt * f0
        + (-2.0 * s3 + 3.0 * s2) * th1
        + (s3 - s2) * dt * f1
}

/// Index of the last odd multiple of `π` at or below `θ`.
#[inline]
fn odd_pi_index(theta: f64) -> f64 {
    ((theta - PI) / (2.0 * PI)).floor()
}

fn locate_crossing(th0: f64, th1: f64, f0: f64, f1: f64, dt: f64, level: f64) -> f64 {
    let g = |s: f64| hermite(th0, th1, f0, f1, dt, s) - level;
    let (mut a, mut b) = (0.0, 1.0);
    let rising = th1 > th0;
    let tol = SPIKE_TIME_TOL / dt;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if (g(mid) < 0.0) == rising {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Append the times at which the Hermite interpolant over one step crosses
/// odd multiples of `π`, upward to `up` and downward to `down`.
fn record_crossings(
    t0: f64,
    dt: f64,
    start: (f64, f64),
    end: (f64, f64),
    up: &mut Vec<f64>,
    down: &mut Vec<f64>,
) {
    let ((th0, f0), (th1, f1)) = (start, end);
    let (i0, i1) = (odd_pi_index(th0) as i64, odd_pi_index(th1) as i64);
    if i1 > i0 {
        for j in i0 + 1..=i1 {
            let level = (2 * j + 1) as f64 * PI;
            up.push(t0 + dt * locate_crossing(th0, th1, f0, f1, dt, level));
        }
    } else if i1 < i0 {
        for j in (i1 + 1..=i0).rev() {
            let level = (2 * j + 1) as f64 * PI;
            down.push(t0 + dt * locate_crossing(th0, th1, f0, f1, dt, level));
        }
    }
}

fn check_params(params: &ModelParams, t_end: f64) -> Result<()> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    let _ = params;
    Ok(())
}

/// Integrate from `history` over `[0, t_end]`.
pub fn integrate(
    params: &ModelParams,
    history: &History,
    t_end: f64,
    config: &SmoothConfig,
) -> Result<DdeRun> {
    check_params(params, t_end)?;
    let tau = params.tau();
    let n = config.steps_per_delay(tau)?;
    let pulse = Pulse::new(config.pulse_exponent)?;
    let dt = tau / n as f64;
    let tail_steps = (config.tail.unwrap_or(tau).max(tau) / dt).ceil() as usize;
    let mut it = Integrator::new(params, pulse, n, tail_steps, history);
    let total = (t_end / dt).round() as usize;
    let sample_every = config.sample_dt.map(|s| ((s / dt).round() as usize).max(1));
    let mut spikes = Vec::new();
    let mut down = Vec::new();
    let mut samples = Vec::new();
    for step in 0..total {
        if let Some(every) = sample_every {
            if step % every == 0 {
                samples.push((step as f64 * dt, wrap_angle(it.theta)));
            }
        }
        let (th0, f0) = it.step();
        let t0 = step as f64 * dt;
        record_crossings(t0, dt, (th0, f0), (it.theta, it.f), &mut spikes, &mut down);
        if !it.theta.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite state at t = {}",
                (step + 1) as f64 * dt
            )));
        }
    }
    if let Some(every) = sample_every {
        if total.is_multiple_of(every) {
            samples.push((total as f64 * dt, wrap_angle(it.theta)));
        }
    }
    let transient = config.transient(tau).min(t_end);
    let mut run = DdeRun {
        params: *params,
        pulse_exponent: pulse.exponent(),
        dt,
        t_end: total as f64 * dt,
        transient,
        spike_times: spikes,
        down_crossings: down,
        measured_period: None,
        lyapunov: None,
        attractor: Attractor::Ambiguous,
        samples,
        final_state: it.tail(tail_steps),
    };
    run.attractor = classify_attractor(&run);
    if let Attractor::Periodic { .. } = run.attractor {
        let s = run.spikes_after_transient();
        run.measured_period = Some((s[s.len() - 1] - s[0]) / (s.len() - 1) as f64);
    }
    Ok(run)
}

fn spread(x: &[f64]) -> (f64, f64) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    (mean, (hi - lo) / mean)
}

fn alternation_gap(isi: &[f64]) -> f64 {
    let pairs = isi.len() / 2;
    isi.chunks_exact(2)
        .map(|w| (w[0] - w[1]).abs())
        .sum::<f64>()
        / pairs as f64
}

fn alternation_persists(isi: &[f64]) -> bool {
    // even split so both halves start on the same parity
    let half = isi.len() / 4 * 2;
    let early = alternation_gap(&isi[..half]);
    let late = alternation_gap(&isi[half..2 * half]);
    late >= PD_PERSISTENCE * early
}

/// Classify the post-transient spike train (and Lyapunov estimate, if any).
pub fn classify_attractor(run: &DdeRun) -> Attractor {
    let spikes = run.spikes_after_transient();
    if spikes.is_empty() {
        return Attractor::Rest;
    }
    if spikes.len() < MIN_CLASSIFY_SPIKES {
        return Attractor::Ambiguous;
    }
    let isi: Vec<f64> = spikes.windows(2).map(|w| w[1] - w[0]).collect();
    let (mean, rel) = spread(&isi);
    if rel < ISI_CLUSTER_TOL {
        return Attractor::Periodic {
            n: (run.params.tau() / mean).floor() as usize,
        };
    }
    let even: Vec<f64> = isi.iter().step_by(2).copied().collect();
    let odd: Vec<f64> = isi.iter().skip(1).step_by(2).copied().collect();
    let (me, re) = spread(&even);
    let (mo, ro) = spread(&odd);
    if re < ISI_CLUSTER_TOL
        && ro < ISI_CLUSTER_TOL
        && (me - mo).abs() / mean >= ISI_CLUSTER_TOL
        && alternation_persists(&isi)
    {
        return Attractor::PeriodDoubled;
    }
    match run.lyapunov {
        Some(l) if l.is_positive() => Attractor::Chaotic,
        _ => Attractor::Ambiguous,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConfig {
    /// Time between renormalizations; default `τ`.
    pub renorm_interval: Option<f64>,
    /// Initial and renormalized sup-norm separation.
    pub separation: f64,
    /// Renormalizations per bootstrap window.
    pub window: usize,
    pub bootstrap_samples: usize,
    pub seed: u64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            renorm_interval: None,
            separation: 1e-8,
            window: 10,
            bootstrap_samples: 2000,
            seed: 0,
        }
    }
}

/// Largest Lyapunov exponent by two-trajectory shadowing. Both
/// trajectories are integrated over `[transient, t_end]` after a common
/// transient; the separation (sup-norm over the delay window) is reset to
/// `separation` every renormalization interval.
pub fn lyapunov_exponent(
    params: &ModelParams,
    history: &History,
    t_end: f64,
    config: &SmoothConfig,
    lconf: &LyapunovConfig,
) -> Result<LyapunovEstimate> {
    check_params(params, t_end)?;
    let tau = params.tau();
    let n = config.steps_per_delay(tau)?;
    let pulse = Pulse::new(config.pulse_exponent)?;
    let dt = tau / n as f64;
    let mut reference = Integrator::new(params, pulse, n, n, history);
    let transient_steps = (config.transient(tau).min(t_end) / dt).round() as usize;
    for _ in 0..transient_steps {
        reference.step();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(lconf.seed);
    let mut other = reference.clone();
    let len = other.grid.len();
    for k in other.k - n..=other.k {
        other.grid[k % len] += lconf.separation * rng.gen_range(-1.0..1.0);
        other.half[k % len] += lconf.separation * rng.gen_range(-1.0..1.0);
    }
    let d0 = reference.distance(&other);
    reference.rescale(&mut other, lconf.separation / d0);

    let renorm_steps = ((lconf.renorm_interval.unwrap_or(tau) / dt).round() as usize).max(1);
    let total = ((t_end / dt).round() as usize).saturating_sub(transient_steps);
    let cycles = total / renorm_steps;
    if cycles < 2 * lconf.window {
        return Err(Error::InvalidParameter(
            "measurement too short for two bootstrap windows".into(),
        ));
    }
    let mut logs = Vec::with_capacity(cycles);
    let mut spiked = false;
    let start_index = odd_pi_index(reference.theta);
    for _ in 0..cycles {
        for _ in 0..renorm_steps {
            reference.step();
            other.step();
        }
        let d = reference.distance(&other);
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Numerical(format!("degenerate separation {d}")));
        }
        logs.push((d / lconf.separation).ln());
        reference.rescale(&mut other, lconf.separation / d);
    }
    if odd_pi_index(reference.theta) > start_index {
        spiked = true;
    }
    let span = renorm_steps as f64 * dt;
    let per_window: Vec<f64> = logs
        .chunks_exact(lconf.window)
        .map(|c| c.iter().sum::<f64>() / (span * lconf.window as f64))
        .collect();
    let exponent = logs.iter().sum::<f64>() / (span * logs.len() as f64);
    let (ci_low, ci_high) = bootstrap_mean_ci(&per_window, lconf.bootstrap_samples, &mut rng);
    Ok(LyapunovEstimate {
        exponent,
        ci_low,
        ci_high,
        windows: per_window.len(),
        rest: !spiked,
    })
}

fn bootstrap_mean_ci(x: &[f64], samples: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let m = x.len();
    let mut means: Vec<f64> = (0..samples.max(1))
        .map(|_| (0..m).map(|_| x[rng.gen_range(0..m)]).sum::<f64>() / m as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let q = |p: f64| means[((p * (means.len() - 1) as f64).round() as usize).min(means.len() - 1)];
    (q(0.025), q(0.975))
}

/// Integrate, then attach a Lyapunov estimate and reclassify when the spike
/// train alone is not conclusive.
pub fn integrate_and_classify(
    params: &ModelParams,
    history: &History,
    t_end: f64,
    config: &SmoothConfig,
    lconf: &LyapunovConfig,
) -> Result<DdeRun> {
    let mut run = integrate(params, history, t_end, config)?;
    if run.attractor == Attractor::Ambiguous {
        run.lyapunov = Some(lyapunov_exponent(params, history, t_end, config, lconf)?);
        run.attractor = classify_attractor(&run);
    }
    Ok(run)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub tau: f64,
    pub period: Option<f64>,
    pub n: Option<usize>,
    pub attractor: Attractor,
}

/// Natural-parameter continuation by simulation: each delay in `taus` is
/// integrated from the final state of the previous one.
///
/// Each point is integrated in chunks of `chunk` time units, continuing from
/// the previous chunk, until the chunk's spike train is classified or
/// `max_chunks` is reached; the first chunk discards its first half. A
/// chunk too short to hold enough spikes for classification is lengthened
/// from the observed inter-spike interval. A `None` period marks a gap. Where `n` changes between neighbours the
/// followed attractor was lost.
pub fn trace_stable_branch(
    current: f64,
    kappa: f64,
    taus: &[f64],
    initial: &History,
    chunk: f64,
    max_chunks: usize,
    config: &SmoothConfig,
) -> Result<Vec<TracePoint>> {
    let tau_max = taus.iter().copied().fold(0.0, f64::max);
    let mut conf = *config;
    conf.tail = Some(tau_max);
    let mut history = initial.clone();
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        let params = ModelParams::new(current, kappa, tau)?;
        conf.transient = Some(config.transient.unwrap_or(0.5 * chunk));
        let mut run = integrate(&params, &history, chunk, &conf)?;
        let mut len = chunk;
        for _ in 1..max_chunks.max(1) {
            if run.attractor != Attractor::Ambiguous {
                break;
            }
            let spikes = run.spikes_after_transient();
            if (2..MIN_CLASSIFY_SPIKES).contains(&spikes.len()) {
                let isi = (spikes[spikes.len() - 1] - spikes[0]) / (spikes.len() - 1) as f64;
                len = len.max(1.25 * MIN_CLASSIFY_SPIKES as f64 * isi);
            }
            conf.transient = Some(0.0);
            run = integrate(&params, &run.final_state, len, &conf)?;
        }
        let n = match run.attractor {
            Attractor::Periodic { n } => Some(n),
            _ => None,
        };
        out.push(TracePoint {
            tau,
            period: run.measured_period,
            n,
            attractor: run.attractor,
        });
        history = run.final_state;
    }
    Ok(out)
}

/// Indices `i` where the traced attractor at `taus[i]` differs in `n` from
/// the one at `taus[i − 1]`, or stops being periodic.
pub fn branch_ends(points: &[TracePoint]) -> Vec<usize> {
    points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].n.is_some() && w[0].n != w[1].n)
        .map(|(i, _)| i + 1)
        .collect()
}
