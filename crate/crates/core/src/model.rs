//! Closed-form dynamics of the uncoupled theta neuron and the delayed kick.
//!
//! The theta neuron `dθ/dt = 1 − cos θ + (1 + cos θ) I` is equivalent to the
//! quadratic integrate-and-fire neuron `dV/dt = I + V²` under `V = tan(θ/2)`.
//! Both views are used below: phases for the public API, voltages whenever
//! a closed form is evaluated.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inverse hyperbolic cotangent, defined for `|x| > 1`.
pub fn acoth(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0f64.copysign(x);
    }
    // 0.5 ln((x+1)/(x-1)) written to keep precision for large |x|.
    0.5 * (2.0 / (x - 1.0)).ln_1p()
}

pub fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// Inverse cotangent with values in `(0, π)`.
pub fn acot(x: f64) -> f64 {
    1.0f64.atan2(x)
}

/// Sign of the constant input current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Regime {
    /// `I = −I_m²`, the neuron is excitable.
    Excitable { im: f64 },
    /// `I = I_p²`, the neuron fires on its own with period `π / I_p`.
    Oscillatory { ip: f64 },
}

/// A full parameter point `(I, κ, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    current: f64,
    kappa: f64,
    tau: f64,
}

impl ModelParams {
    pub fn new(current: f64, kappa: f64, tau: f64) -> Result<Self> {
        if !current.is_finite() || !kappa.is_finite() || !tau.is_finite() {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if tau <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {tau}"
            )));
        }
        if current == 0.0 {
            return Err(Error::InvalidParameter(
                "I = 0 is the SNIC point; no finite-period theory applies".into(),
            ));
        }
        Ok(Self {
            current,
            kappa,
            tau,
        })
    }

    pub fn current(&self) -> f64 {
        self.current
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn regime(&self) -> Regime {
        if self.current < 0.0 {
            Regime::Excitable {
                im: (-self.current).sqrt(),
            }
        } else {
            Regime::Oscillatory {
                ip: self.current.sqrt(),
            }
        }
    }

    /// `√|I|`, the factor used to rescale time and coupling.
    pub fn current_scale(&self) -> f64 {
        self.current.abs().sqrt()
    }

    /// `(κ, τ)` in units where `|I| = 1`.
    ///
    /// Time scales with `1/√|I|` and the kick with `√|I|`, so a period `T'`
    /// found at the normalized point corresponds to `T' / √|I|` here.
    pub fn normalized(&self) -> (f64, f64) {
        let s = self.current_scale();
        (self.kappa / s, self.tau * s)
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.current, self.kappa, tau)
    }
}

/// Neuron phase, stored as its representative in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Phase(f64);

impl Phase {
    pub fn new(theta: f64) -> Self {
        Phase(wrap_angle(theta))
    }

    /// The spike phase `θ = π`.
    pub const SPIKE: Phase = Phase(PI);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_spike(self) -> bool {
        self.0 == PI
    }

    pub fn to_voltage(self) -> VoltageEquivalent {
        VoltageEquivalent::from_phase(self)
    }
}

/// Wrap any angle to `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// QIF voltage `V = tan(θ/2)`; `+∞` stands for the spike phase.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct VoltageEquivalent(pub f64);

impl VoltageEquivalent {
    pub fn from_phase(phase: Phase) -> Self {
        if phase.is_spike() {
            VoltageEquivalent(f64::INFINITY)
        } else {
            VoltageEquivalent((phase.value() / 2.0).tan())
        }
    }

    pub fn to_phase(self) -> Phase {
        if self.0.is_infinite() {
            Phase::SPIKE
        } else {
            Phase::new(2.0 * self.0.atan())
        }
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "elapsed time must be >= 0, got {t}"
        )))
    }
}

/// Exact QIF flow `dV/dt = I + V²` with the reset `+∞ → −∞`.
///
/// For `I < 0` the formula is valid for every `t ≥ 0` (at most one firing
/// happens). For `I > 0` the tangent keeps winding and the value after the
/// last firing is returned. `±∞` are accepted as initial values.
pub fn voltage_flow(v0: f64, t: f64, current: f64) -> f64 {
    if t == 0.0 {
        return v0;
    }
    if current < 0.0 {
        let im = (-current).sqrt();
        if v0.abs() == im {
            return v0;
        }
        if v0.abs() < im {
            -im * (im * t - (v0 / im).atanh()).tanh()
        } else {
            -im * coth(im * t - acoth(v0 / im))
        }
    } else {
        let ip = current.sqrt();
        let a = ip * t + (v0 / ip).atan();
        ip * a.tan()
    }
}

/// Time until the free neuron next reaches `V = +∞`, if it ever does.
pub fn time_to_fire(v0: f64, current: f64) -> Option<f64> {
    if current < 0.0 {
        let im = (-current).sqrt();
        if v0 > im {
            Some(acoth(v0 / im) / im)
        } else {
            None
        }
    } else {
        let ip = current.sqrt();
        if v0 == f64::INFINITY {
            return Some(0.0);
        }
        Some((PI / 2.0 - (v0 / ip).atan()) / ip)
    }
}

/// Free flow from a state strictly between the two fixed points.
pub fn flow_negative_between(theta0: Phase, t: f64, im: f64) -> Result<Phase> {
    check_positive("I_m", im)?;
    check_time(t)?;
    let v0 = theta0.to_voltage().0;
    let (lower, _) = fixed_points(im)?;
    // Round-off in tan(θ₋/2) must not push the attractor out of the window.
    if theta0 == lower || (v0 + im).abs() <= 1e-14 * im {
        return Ok(lower);
    }
    if !(v0 > -im && v0 < im) {
        return Err(Error::Domain(format!(
            "tan(θ/2) = {v0} is not between the fixed points ±{im}"
        )));
    }
    let v = -im * (im * t - (v0 / im).atanh()).tanh();
    Ok(VoltageEquivalent(v).to_phase())
}

/// Free flow from a state above the threshold `θ₊`; the neuron fires after
/// `acoth(tan(θ₀/2)/I_m)/I_m` and then relaxes to `θ₋` from below.
pub fn flow_negative_above(theta0: Phase, t: f64, im: f64) -> Result<Phase> {
    check_positive("I_m", im)?;
    check_time(t)?;
    let v0 = theta0.to_voltage().0;
    if v0 <= im {
        return Err(Error::Domain(format!(
            "tan(θ/2) = {v0} is not above the threshold {im}"
        )));
    }
    let arg = im * t - acoth(v0 / im);
    if arg == 0.0 {
        return Ok(Phase::SPIKE);
    }
    Ok(VoltageEquivalent(-im * coth(arg)).to_phase())
}

/// Free flow for positive current; the phase winds monotonically with
/// period `π / I_p`.
pub fn flow_positive(theta0: Phase, t: f64, ip: f64) -> Result<Phase> {
    check_positive("I_p", ip)?;
    check_time(t)?;
    if t == 0.0 {
        return Ok(theta0);
    }
    let a0 = half_angle_argument(theta0, ip);
    let a = a0 + ip * t;
    // tan(θ/2) = I_p tan(a); the atan2 form avoids the poles of tan.
    Ok(Phase::new(2.0 * (ip * a.sin()).atan2(a.cos())))
}

/// Number of firings of the free positive-current neuron in `(0, t]`.
pub fn firings_positive(theta0: Phase, t: f64, ip: f64) -> u64 {
    let a0 = half_angle_argument(theta0, ip);
    let a = a0 + ip * t;
    let k = |x: f64| ((x - PI / 2.0) / PI).floor();
    (k(a) - k(a0)).max(0.0) as u64
}

fn half_angle_argument(theta0: Phase, ip: f64) -> f64 {
    if theta0.is_spike() {
        PI / 2.0
    } else {
        ((theta0.value() / 2.0).tan() / ip).atan()
    }
}

/// Instantaneous delayed kick `tan(θ⁺/2) = tan(θ⁻/2) + κ`.
///
/// At `θ = π` the coupling factor `1 + cos θ` vanishes and the kick has no
/// effect.
pub fn apply_kick(theta: Phase, kappa: f64) -> Phase {
    if theta.is_spike() {
        return theta;
    }
    let v = (theta.value() / 2.0).tan() + kappa;
    Phase::new(2.0 * v.atan())
}

/// `(θ₋, θ₊) = (−2 atan I_m, 2 atan I_m)`: the attracting rest state and the
/// threshold saddle.
pub fn fixed_points(im: f64) -> Result<(Phase, Phase)> {
    check_positive("I_m", im)?;
    let th = 2.0 * im.atan();
    Ok((Phase::new(-th), Phase::new(th)))
}
