//! Closed forms and structural checks for the path-graph operator.

mod recurrence;

use serde::Serialize;

pub use recurrence::{
    boundary_residuals, characteristic_roots, closed_form_coefficients, propagate_recurrence, recurrence_residuals,
    RecurrenceModel,
};

use crate::eigensolve::{default_tol, refine_eigenvalue, smallest_eigenvalues_only, EigenPair};
use crate::error::{Error, Result};
use crate::model::{quadratic_form, PathSpec, TridiagonalOperator};

/// `2 - 2cos(πj/N)`, the `j`-th eigenvalue of the unit-weight path Laplacian
/// on `N` vertices. Evaluated as `4 sin²(πj/2N)`.
pub fn exact_unweighted_eigenvalue(j: usize, n: usize) -> Result<f64> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::domain(format!("vertex count must be odd and at least 3, got {n}")));
    }
    if j >= n {
        return Err(Error::domain(format!("eigenvalue index {j} out of range for N = {n}")));
    }
    let s = (std::f64::consts::PI * j as f64 / (2.0 * n as f64)).sin();
    Ok(4.0 * s * s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStateReport {
    pub positive: bool,
    /// `max_v |u₀(v) - u₀(-v)|`
    pub symmetric_defect: f64,
    /// `max_{n>=0} max(0, u₀(n) - u₀(n+1))`
    pub monotone_defect: f64,
    /// `u₀(0)`
    pub center_value: f64,
}

pub fn check_ground_state_structure(spec: &PathSpec, ground: &EigenPair) -> Result<GroundStateReport> {
    let v = ground
        .vector
        .as_deref()
        .ok_or_else(|| Error::argument("ground state has no eigenvector"))?;
    if v.len() != spec.n() {
        return Err(Error::Dimension { expected: spec.n(), found: v.len() });
    }
    let c = spec.center();
    let k = spec.k();
    let symmetric_defect = (1..=k).map(|j| (v[c + j] - v[c - j]).abs()).fold(0.0, f64::max);
    let monotone_defect = (0..k).map(|n| (v[c + n] - v[c + n + 1]).max(0.0)).fold(0.0, f64::max);
    Ok(GroundStateReport {
        positive: v.iter().all(|&x| x > 0.0),
        symmetric_defect,
        monotone_defect,
        center_value: v[c],
    })
}

/// The operator on vertices `1..=k` obtained by pinning `f(0) = 0` in the
/// quadratic form. The weight of edge `(0,1)` stays on the first diagonal entry.
pub fn dirichlet_restriction(spec: &PathSpec) -> TridiagonalOperator {
    let k = spec.k();
    let weights: Vec<f64> = (1..k).map(|n| spec.weights().half_weight(n)).collect();
    let mut potential = vec![0.0; k];
    potential[0] = spec.weights().half_weight(0);
    TridiagonalOperator::from_laplacian(&weights, potential)
}

/// Smallest eigenvalue `μ₀` of the Dirichlet restriction, refined to full
/// relative precision.
pub fn dirichlet_ground_value(spec: &PathSpec) -> Result<f64> {
    let op = dirichlet_restriction(spec);
    let s = smallest_eigenvalues_only(&op, 1, default_tol(&op))?;
    Ok(refine_eigenvalue(&op, s.ground()).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestVector {
    /// `+1` on the `⌈k/4⌉` outermost vertices at each end, `0` elsewhere.
    Symmetric,
    /// `+1` on the left block, `-1` on the right block; orthogonal to constants.
    Antisymmetric,
}

pub fn test_vector_family(k: usize, variant: TestVector) -> Result<Vec<f64>> {
    if k < 4 {
        return Err(Error::domain(format!("test vectors need k >= 4, got {k}")));
    }
    let n = 2 * k + 1;
    let block = k.div_ceil(4);
    let right = match variant {
        TestVector::Symmetric => 1.0,
        TestVector::Antisymmetric => -1.0,
    };
    let mut f = vec![0.0; n];
    f[..block].iter_mut().for_each(|x| *x = 1.0);
    f[n - block..].iter_mut().for_each(|x| *x = right);
    Ok(f)
}

/// `q_{w,u}[f] / ‖f‖²`.
pub fn rayleigh_quotient(spec: &PathSpec, f: &[f64]) -> Result<f64> {
    let q = quadratic_form(spec, f)?;
    let norm2: f64 = f.iter().map(|x| x * x).sum();
    if norm2 == 0.0 {
        return Err(Error::argument("Rayleigh quotient of the zero vector"));
    }
    Ok(q / norm2)
}

/// Copy of `f` with the center entry set to zero. `f` must have odd length.
pub fn truncate_center(f: &[f64]) -> Vec<f64> {
    debug_assert!(f.len() % 2 == 1, "truncate_center needs an odd-length vector");
    let mut g = f.to_vec();
    g[f.len() / 2] = 0.0;
    g
}
