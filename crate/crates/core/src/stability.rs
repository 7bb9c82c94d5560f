//! Floquet analysis of the periodic solutions.
//!
//! Perturbing the firing times of a periodic orbit with `n + 1` spikes per
//! delay interval gives the linear recurrence
//! `η_i = γ η_{i−1} + (1 − γ) η_{i−n−1}`, whose companion matrix `J` has the
//! characteristic polynomial `g(λ) = λ^{n+1} − γ λ^n − 1 + γ`. Everything about
//! stability is therefore a function of `(n, γ)` alone.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{acot, acoth, coth};
use crate::{excitable, oscillatory};

/// `|γ − 1|` below this is reported as superstable.
pub const SUPERSTABLE_TOL: f64 = 1e-10;
/// Margin on `|λ|` when deciding stability from the roots.
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;
/// Largest existence residual accepted by [`gamma_negative`] and
/// [`gamma_positive`].
pub const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Superstable,
    Unstable,
    /// Only used for branch points sitting on a fold.
    SaddleNode,
}

impl Stability {
    pub fn is_stable(self) -> bool {
        matches!(self, Stability::Stable | Stability::Superstable)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Superstable => "superstable",
            Stability::Unstable => "unstable",
            Stability::SaddleNode => "saddle-node",
        }
    }
}

/// Sign of the input current, which selects the closed form for `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurrentSign {
    Negative,
    Positive,
}

/// `γ` for `I = −1` as a function of the offset `s = τ − nT`.
///
/// On the n-th branch `s` is the delay of the primary-branch point it is the
/// image of, so `γ` only depends on `s` and `κ`.
pub fn gamma_negative_at(s: f64, kappa: f64) -> f64 {
    let c = coth(s);
    let csch2 = 1.0 / s.sinh().powi(2);
    csch2 / ((kappa - c - 1.0) * (kappa - c + 1.0))
}

/// `γ` for `I = +1` at offset `s = τ − nT`:
/// `csc² s / (1 + (κ − cot s)²)`, multiplied through by `sin² s`.
pub fn gamma_positive_at(s: f64, kappa: f64) -> f64 {
    let (sn, cs) = s.sin_cos();
    1.0 / (sn * sn + (kappa * sn - cs).powi(2))
}

/// Stability parameter of a negative-current branch point.
pub fn gamma_negative(n: usize, period: f64, tau: f64, kappa: f64) -> Result<f64> {
    let residual = excitable::existence_residual(n, tau, period, kappa);
    if !(residual.abs() <= CONSISTENCY_TOL * kappa.abs().max(1.0)) {
        return Err(Error::Inconsistent { residual });
    }
    Ok(gamma_negative_at(tau - n as f64 * period, kappa))
}

/// Stability parameter of a positive-current branch point.
pub fn gamma_positive(n: usize, period: f64, tau: f64, kappa: f64) -> Result<f64> {
    let residual = oscillatory::existence_residual(n, tau, period, kappa);
    if !(residual.abs() <= CONSISTENCY_TOL * kappa.abs().max(1.0)) {
        return Err(Error::Inconsistent { residual });
    }
    Ok(gamma_positive_at(tau - n as f64 * period, kappa))
}

/// Coefficients `c_0..c_{n−1}` of the monic deflated factor
/// `h(λ) = λ^n + (1 − γ)(λ^{n−1} + … + 1)`.
fn deflated_coefficients(n: usize, gamma: f64) -> Vec<f64> {
    vec![1.0 - gamma; n]
}

fn horner(coeffs: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    // Monic polynomial z^n + Σ c_i z^i and its derivative.
    let mut p = Complex::new(1.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All `n + 1` roots of `g(λ)`. The trivial root `λ = 1` comes first; the
/// roots of `h` follow, sorted by decreasing modulus.
pub fn g_roots(n: usize, gamma: f64) -> Vec<Complex<f64>> {
    let mut roots = vec![Complex::new(1.0, 0.0)];
    if n == 0 {
        return roots;
    }
    let coeffs = deflated_coefficients(n, gamma);
    if coeffs[..n].iter().all(|&c| c == 0.0) {
        // h = λ^n exactly; an eigensolver would smear the n-fold zero
        roots.extend(std::iter::repeat_n(Complex::new(0.0, 0.0), n));
        return roots;
    }
    // Column companion matrix of h: ones on the subdiagonal, −c in the last column.
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        c[(i, n - 1)] = -coeffs[i];
    }
    let eig = c.complex_eigenvalues();
    for z in eig.iter() {
        roots.push(polish_root(&coeffs, *z));
    }
    roots[1..].sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });
    roots
}

fn polish_root(coeffs: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    let (mut p, _) = horner(coeffs, z);
    for _ in 0..3 {
        if p.norm() == 0.0 {
            break;
        }
        let (_, dp) = horner(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let (p_next, _) = horner(coeffs, next);
        if p_next.norm() < p.norm() {
            z = next;
            p = p_next;
        } else {
            break;
        }
    }
    z
}

/// Stability from `γ` alone.
pub fn classify(n: usize, gamma: f64) -> Result<Stability> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    if (gamma - 1.0).abs() < SUPERSTABLE_TOL {
        return Ok(Stability::Superstable);
    }
    if n == 0 {
        return Ok(Stability::Stable);
    }
    let fold = (n as f64 + 1.0) / n as f64;
    Ok(if gamma > fold {
        Stability::Unstable
    } else {
        Stability::Stable
    })
}

/// Classification of a branch point, marking points on a fold.
pub fn classify_branch_point(n: usize, gamma: f64) -> Result<Stability> {
    if n > 0 {
        let fold = (n as f64 + 1.0) / n as f64;
        if (gamma - fold).abs() < 1e-9 {
            return Ok(Stability::SaddleNode);
        }
    }
    classify(n, gamma)
}

/// `γ`, the multipliers and their verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySpectrum {
    pub n: usize,
    pub gamma: f64,
    pub roots: Vec<Complex<f64>>,
    pub classification: Stability,
}

impl StabilitySpectrum {
    pub fn compute(n: usize, gamma: f64) -> Result<Self> {
        let classification = classify(n, gamma)?;
        Ok(Self {
            n,
            gamma,
            roots: g_roots(n, gamma),
            classification,
        })
    }

    /// Largest modulus among the nontrivial multipliers (0 when `n = 0`).
    pub fn max_nontrivial_modulus(&self) -> f64 {
        self.roots[1..].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Verdict read off the roots instead of `γ`.
    pub fn classification_from_roots(&self) -> Stability {
        if (self.gamma - 1.0).abs() < SUPERSTABLE_TOL {
            return Stability::Superstable;
        }
        if self.max_nontrivial_modulus() > 1.0 + UNIT_CIRCLE_TOL {
            Stability::Unstable
        } else {
            Stability::Stable
        }
    }
}

/// The `(n+1)×(n+1)` firing-map Jacobian: ones on the superdiagonal and last
/// row `(1 − γ, 0, …, 0, γ)`.
pub fn jacobian(n: usize, gamma: f64) -> DMatrix<f64> {
    let m = n + 1;
    let mut j = DMatrix::<f64>::zeros(m, m);
    for i in 0..n {
        j[(i, i + 1)] = 1.0;
    }
    j[(n, 0)] += 1.0 - gamma;
    j[(n, n)] += gamma;
    j
}

/// Jacobian of the firing map at a branch point.
pub fn firing_map_jacobian(
    n: usize,
    period: f64,
    tau: f64,
    kappa: f64,
    sign: CurrentSign,
) -> Result<DMatrix<f64>> {
    let gamma = match sign {
        CurrentSign::Negative => gamma_negative(n, period, tau, kappa)?,
        CurrentSign::Positive => gamma_positive(n, period, tau, kappa)?,
    };
    Ok(jacobian(n, gamma))
}

/// Eigenvalues of a firing-map Jacobian.
///
/// The all-ones vector is always an eigenvector with eigenvalue 1 (uniform
/// time shift). It is removed with a Householder similarity before the
/// general eigensolve, which keeps a double root at 1 well conditioned.
pub fn jacobian_eigenvalues(j: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let m = j.nrows();
    let mut out = vec![Complex::new(1.0, 0.0)];
    if m == 1 {
        return out;
    }
    let mut w = nalgebra::DVector::<f64>::from_element(m, 1.0 / (m as f64).sqrt());
    w[0] -= 1.0;
    let ww = w.dot(&w);
    let h = DMatrix::<f64>::identity(m, m) - (&w * w.transpose()) * (2.0 / ww);
    let b = &h * j * &h;
    let block = b.view((1, 1), (m - 1, m - 1)).into_owned();
    if is_nilpotent(&block) {
        // a defective zero eigenvalue would be smeared to |λ| ≈ ε^{1/(m−1)}
        out.extend(std::iter::repeat_n(Complex::new(0.0, 0.0), m - 1));
        return out;
    }
    out.extend(block.complex_eigenvalues().iter().copied());
    out[1..].sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });
    out
}

/// `B^k = 0` up to round-off, with `k` the dimension.
fn is_nilpotent(b: &DMatrix<f64>) -> bool {
    let k = b.nrows();
    let scale = b.amax().max(1.0);
    let mut p = b.clone();
    for _ in 1..k {
        p = &p * b;
    }
    p.amax() <= 64.0 * f64::EPSILON * k as f64 * scale.powi(k as i32)
}

/// Iterate the linearized firing-time recurrence. `initial` holds the
/// `n + 1` most recent perturbations, oldest first.
pub fn propagate_perturbation(n: usize, gamma: f64, initial: &[f64], steps: usize) -> Vec<f64> {
    assert_eq!(initial.len(), n + 1, "need n + 1 initial perturbations");
    let mut eta = initial.to_vec();
    for _ in 0..steps {
        let i = eta.len();
        let next = gamma * eta[i - 1] + (1.0 - gamma) * eta[i - 1 - n];
        eta.push(next);
    }
    eta
}

/// Next firing time for `I = −1` from the last firing and the one whose
/// delayed kick arrives before the next firing.
pub fn next_firing_negative(last: f64, kicking: f64, tau: f64, kappa: f64) -> f64 {
    let s = tau - last + kicking;
    tau + kicking + acoth(kappa - coth(s))
}

/// Next firing time for `I = +1`.
pub fn next_firing_positive(last: f64, kicking: f64, tau: f64, kappa: f64) -> f64 {
    let s = tau - last + kicking;
    tau + kicking + acot(kappa - 1.0 / s.tan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_gamma_gives_roots_of_unity() {
        for n in 1..8 {
            let roots = g_roots(n, 0.0);
            assert_eq!(roots.len(), n + 1);
            for z in &roots {
                assert!((z.powu(n as u32 + 1) - 1.0).norm() < 1e-12);
                assert!((z.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_gamma_is_superstable() {
        let roots = g_roots(5, 1.0);
        assert_eq!(roots[0], Complex::new(1.0, 0.0));
        assert!(roots[1..].iter().all(|z| z.norm() < 1e-12));
        assert_eq!(classify(5, 1.0).unwrap(), Stability::Superstable);
    }

    #[test]
    fn classify_thresholds() {
        assert_eq!(classify(0, 0.3).unwrap(), Stability::Stable);
        assert_eq!(classify(0, 7.0).unwrap(), Stability::Stable);
        assert_eq!(classify(4, 1.3).unwrap(), Stability::Unstable);
        assert_eq!(classify(4, 1.2).unwrap(), Stability::Stable);
        assert!(matches!(classify(2, 0.0), Err(Error::Domain(_))));
        assert!(matches!(classify(2, -0.5), Err(Error::Domain(_))));
        assert_eq!(
            classify_branch_point(3, 4.0 / 3.0).unwrap(),
            Stability::SaddleNode
        );
    }

    #[test]
    fn n4_gamma_sweep_structure() {
        // Just below γ = 1 the four roots of h point at odd multiples of π/4.
        let roots = g_roots(4, 1.0 - 1e-6);
        let mut args: Vec<f64> = roots[1..]
            .iter()
            .map(|z| z.arg().rem_euclid(2.0 * PI))
            .collect();
        args.sort_by(f64::total_cmp);
        for (a, k) in args.iter().zip([1.0, 3.0, 5.0, 7.0]) {
            assert!((a - k * PI / 4.0).abs() < 1e-2, "{a}");
        }
        // The real root exits through +1 at γ = 5/4.
        let below = StabilitySpectrum::compute(4, 1.25 - 1e-6).unwrap();
        let above = StabilitySpectrum::compute(4, 1.25 + 1e-6).unwrap();
        assert!(below.max_nontrivial_modulus() < 1.0);
        assert!(above.max_nontrivial_modulus() > 1.0);
        let exiting = above.roots[1];
        assert!(exiting.im.abs() < 1e-12 && exiting.re > 1.0);
    }

    #[test]
    fn jacobian_structure() {
        let j = jacobian(4, 0.7);
        assert_eq!(j.trace(), 0.7);
        for k in 1..4 {
            assert_eq!(j[(4, k)], 0.0);
        }
        assert_eq!(j[(4, 0)], 1.0 - 0.7);
        // det(J) = (−1)^n (1 − γ)
        assert!((j.determinant() - 0.3).abs() < 1e-14);
        assert!((jacobian(3, 0.7).determinant() + 0.3).abs() < 1e-14);
        assert_eq!(jacobian(0, 0.4)[(0, 0)], 1.0);
    }

    #[test]
    fn jacobian_eigenvalues_match_polynomial() {
        for n in 1..=6 {
            for gamma in [0.2, 0.9, 1.5] {
                let a = g_roots(n, gamma);
                let b = jacobian_eigenvalues(&jacobian(n, gamma));
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).norm() < 1e-10, "n={n} γ={gamma}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn recurrence_decays_iff_stable() {
        let init = [0.3, -0.2, 0.5, 0.1];
        let stable = propagate_perturbation(3, 1.2, &init, 1000);
        let d_last = (stable[1000] - stable[999]).abs();
        assert!(d_last < 1e-12);
        let unstable = propagate_perturbation(3, 1.4, &init, 1000);
        assert!((unstable[1000] - unstable[999]).abs() > 1.0);
    }

    #[test]
    fn gamma_closed_forms_are_positive() {
        for s in [0.3, 1.0, 2.0] {
            assert!(gamma_negative_at(s, 5.0) > 0.0);
        }
        for s in [0.1, 1.0, 2.5, 3.0] {
            for k in [-3.0, -0.5, 0.0, 2.0] {
                assert!(gamma_positive_at(s, k) > 0.0);
            }
            assert!((gamma_positive_at(s, 0.0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_rejects_off_branch_points() {
        assert!(matches!(
            gamma_negative(1, 2.5, 4.0, 5.0),
            Err(Error::Inconsistent { .. })
        ));
    }
}
