//! Closed form of the unit-weight ground state away from the center.
//!
//! Interior rows of `H u₀ = λ₀ u₀` give `u₀(n) = (2-λ₀) u₀(n-1) - u₀(n-2)`.
//! Its characteristic polynomial `x² - (2-λ₀)x + 1` has roots on the unit
//! circle for `0 < λ₀ < 4`, and the solution is
//! `u₀(n) = α₁ λ₁^{n+1} + α₂ λ₂^{n+1}` with `α₁, α₂` fixed by `u₀(0), u₀(1)`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::eigensolve::EigenPair;
use crate::error::{Error, Result};
use crate::model::{PathSpec, WeightProfile};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceModel {
    pub lambda0: f64,
    /// `roots[0]` has non-negative imaginary part; `roots[1]` is its conjugate.
    pub roots: [Complex64; 2],
    /// Argument of `roots[0]` in `[0, 2π)`.
    pub root_angle: f64,
    /// `λ₀ = 0`: both roots equal 1 and the closed form does not apply.
    pub double_root: bool,
    pub alpha: Option<[Complex64; 2]>,
    /// Argument of `alpha[0]` in `[0, 2π)`.
    pub alpha_angle: Option<f64>,
}

impl RecurrenceModel {
    /// Vieta defects `|λ₁λ₂ - 1|` and `|λ₁ + λ₂ - (2 - λ₀)|`.
    pub fn vieta_defects(&self) -> (f64, f64) {
        let [r1, r2] = self.roots;
        ((r1 * r2 - 1.0).norm(), (r1 + r2 - (2.0 - self.lambda0)).norm())
    }

    /// `α₁ λ₁^{n+1} + α₂ λ₂^{n+1}` (real part; the imaginary part vanishes
    /// for real data).
    pub fn evaluate(&self, n: usize) -> Option<f64> {
        let [a1, a2] = self.alpha?;
        let phase = (n + 1) as f64 * self.root_angle;
        let p1 = Complex64::from_polar(1.0, phase);
        Some((a1 * p1 + a2 * p1.conj()).re)
    }

    pub fn sequence(&self, n_max: usize) -> Option<Vec<f64>> {
        (0..=n_max).map(|n| self.evaluate(n)).collect()
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Roots of `x² - (2-λ₀)x + 1` for `λ₀ ∈ [0, 4)`.
pub fn characteristic_roots(lambda0: f64) -> Result<RecurrenceModel> {
    if !(0.0..4.0).contains(&lambda0) {
        return Err(Error::Regime { lambda0 });
    }
    let re = (2.0 - lambda0) / 2.0;
    // 1 - re² = (λ₀/2)(2 - λ₀/2), without cancellation for small λ₀
    let im = (0.5 * lambda0 * (2.0 - 0.5 * lambda0)).sqrt();
    let r1 = Complex64::new(re, im);
    Ok(RecurrenceModel {
        lambda0,
        roots: [r1, r1.conj()],
        root_angle: wrap_angle(im.atan2(re)),
        double_root: lambda0 == 0.0,
        alpha: None,
        alpha_angle: None,
    })
}

/// Fills `α₁ = (λ₂u₀(0) - u₀(1)) / (1 - λ₁²)` and its mirror `α₂`.
pub fn closed_form_coefficients(u00: f64, u01: f64, model: &RecurrenceModel) -> Result<RecurrenceModel> {
    if model.double_root {
        return Err(Error::DegenerateRoots);
    }
    let [r1, r2] = model.roots;
    let a1 = (r2 * u00 - u01) / (1.0 - r1 * r1);
    let a2 = (r1 * u00 - u01) / (1.0 - r2 * r2);
    Ok(RecurrenceModel {
        alpha: Some([a1, a2]),
        alpha_angle: Some(wrap_angle(a1.arg())),
        ..model.clone()
    })
}

/// `u₀(0..=n_max)` by the forward three-term recurrence.
pub fn propagate_recurrence(u00: f64, u01: f64, lambda0: f64, n_max: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(n_max + 1);
    u.push(u00);
    if n_max >= 1 {
        u.push(u01);
    }
    for n in 2..=n_max {
        let next = (2.0 - lambda0) * u[n - 1] - u[n - 2];
        u.push(next);
    }
    u
}

fn unit_ground_vector<'a>(spec: &PathSpec, ground: &'a EigenPair) -> Result<&'a [f64]> {
    if spec.weights() != &WeightProfile::Unit {
        return Err(Error::argument("the three-term recurrence holds for unit weights only"));
    }
    let v = ground
        .vector
        .as_deref()
        .ok_or_else(|| Error::argument("ground state has no eigenvector"))?;
    if v.len() != spec.n() {
        return Err(Error::Dimension { expected: spec.n(), found: v.len() });
    }
    Ok(v)
}

/// `u₀(n) - (2-λ₀)u₀(n-1) + u₀(n-2)` for `2 <= n <= k-1`, read off the
/// eigenvector on the non-negative half.
pub fn recurrence_residuals(spec: &PathSpec, ground: &EigenPair) -> Result<Vec<f64>> {
    let v = unit_ground_vector(spec, ground)?;
    let c = spec.center();
    let lam = ground.value;
    Ok((2..spec.k())
        .map(|n| v[c + n] - (2.0 - lam) * v[c + n - 1] + v[c + n - 2])
        .collect())
}

/// Residuals of the two rows outside the recurrence: the center row
/// `(2 + u - λ₀)u₀(0) - 2u₀(1)` (using symmetry) and the endpoint row
/// `u₀(k) - u₀(k-1) - λ₀u₀(k)`.
pub fn boundary_residuals(spec: &PathSpec, ground: &EigenPair) -> Result<[f64; 2]> {
    let v = unit_ground_vector(spec, ground)?;
    let c = spec.center();
    let k = spec.k();
    let lam = ground.value;
    let center = (2.0 + spec.u() - lam) * v[c] - v[c - 1] - v[c + 1];
    let end = v[c + k] - v[c + k - 1] - lam * v[c + k];
    Ok([center, end])
}
