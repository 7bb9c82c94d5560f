//! Theta neuron with delayed self-feedback.
//!
//! The neuron `dθ/dt = 1 − cos θ + (1 + cos θ)(I + κ Σ δ(t − t_i − τ))`
//! receives its own spikes back after a delay `τ`. Between kicks the flow is
//! known in closed form, so periodic solutions, their Floquet multipliers and
//! their saddle-node loci are all explicit. A smooth-pulse version of the
//! feedback is integrated numerically for comparison.
//!
//! - [`model`]: closed-form flows, kicks and fixed points
//! - [`excitable`], [`oscillatory`]: branches for `I < 0` and `I > 0`
//! - [`stability`]: the polynomial `g(λ)` and the firing-map Jacobian
//! - [`event_sim`]: exact event-driven simulation
//! - [`smooth`]: method-of-steps integration of the smooth model

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branch;
pub mod error;
pub mod event_sim;
pub mod excitable;
pub mod model;
pub mod oscillatory;
pub mod roots;
pub mod smooth;
pub mod stability;

pub use branch::{BranchPoint, SaddleNodePoint};
pub use error::{Error, Result};
pub use model::{ModelParams, Phase, Regime, VoltageEquivalent};
pub use stability::{Stability, StabilitySpectrum};
