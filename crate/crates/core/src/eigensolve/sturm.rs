//! Pivots of the shifted `LDLᵀ` factorization, carried in excess form.
//!
//! A chain is a symmetric tridiagonal pencil `K - x·M` with `M` diagonal
//! (identity unless a mass vector is given). With `g_i = |b_i|`
//! (`g_{-1} = g_{n-1} = 0`) every diagonal entry of `K` is
//! `a_i = g_{i-1} + g_i + p_i`. Writing the forward pivot as `d_i = g_i + s_i`
//! gives
//!
//! ```text
//! s_0 = p_0 - x m_0,    s_i = g_{i-1} s_{i-1} / d_{i-1} + p_i - x m_i
//! ```
//!
//! which is algebraically the classical recurrence `d_i = a_i - x - b²/d_{i-1}`
//! but never forms `a_i - x` for small `x`, so the eigenvalues of a Laplacian
//! near zero are counted to high relative accuracy.

use crate::model::TridiagonalOperator;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Chain<'a> {
    pub offdiag: &'a [f64],
    pub excess: &'a [f64],
    pub mass: Option<&'a [f64]>,
}

impl<'a> Chain<'a> {
    pub fn of(op: &'a TridiagonalOperator) -> Self {
        Chain { offdiag: op.offdiag(), excess: op.excess(), mass: None }
    }

    pub fn dim(&self) -> usize {
        self.excess.len()
    }

    #[inline]
    fn g(&self, i: usize) -> f64 {
        if i + 1 < self.dim() {
            self.offdiag[i].abs()
        } else {
            0.0
        }
    }

    #[inline]
    fn m(&self, i: usize) -> f64 {
        self.mass.map_or(1.0, |m| m[i])
    }
}

/// Smallest admissible pivot magnitude (`safmin · max(1, max b²)`).
pub(crate) fn pivot_floor(op: &TridiagonalOperator) -> f64 {
    let bmax = op.offdiag().iter().fold(0.0_f64, |m, b| m.max(b * b));
    f64::MIN_POSITIVE * bmax.max(1.0)
}

#[inline]
fn guard(d: f64, pivmin: f64) -> f64 {
    if d.abs() < pivmin {
        pivmin.copysign(d)
    } else {
        d
    }
}

/// Number of eigenvalues strictly below `x`.
pub fn eigenvalue_count_below(op: &TridiagonalOperator, x: f64) -> usize {
    count_below(Chain::of(op), x, pivot_floor(op))
}

pub(crate) fn count_below(chain: Chain<'_>, x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut carry = 0.0;
    for i in 0..chain.dim() {
        let g = chain.g(i);
        let s = carry + chain.excess[i] - x * chain.m(i);
        let d = guard(g + s, pivmin);
        if d < 0.0 {
            count += 1;
        }
        carry = g * s / d;
    }
    count
}

/// Forward and backward pivots of `K - shift·M` together with the twist
/// values `γ_r = d⁺_r + d⁻_r - (a_r - shift·m_r)`.
pub(crate) struct TwistedFactorization {
    pub forward: Vec<f64>,
    pub backward: Vec<f64>,
    pub twist: Vec<f64>,
}

impl TwistedFactorization {
    pub fn new(chain: Chain<'_>, shift: f64, pivmin: f64) -> Self {
        let n = chain.dim();
        let shifted: Vec<f64> = (0..n).map(|i| chain.excess[i] - shift * chain.m(i)).collect();

        let mut forward = vec![0.0; n];
        let mut fcarry = vec![0.0; n];
        let mut carry = 0.0;
        for i in 0..n {
            fcarry[i] = carry;
            let s = carry + shifted[i];
            let d = guard(chain.g(i) + s, pivmin);
            forward[i] = d;
            carry = chain.g(i) * s / d;
        }

        let mut backward = vec![0.0; n];
        let mut bcarry = vec![0.0; n];
        let mut carry = 0.0;
        for i in (0..n).rev() {
            bcarry[i] = carry;
            let s = carry + shifted[i];
            let gl = if i > 0 { chain.g(i - 1) } else { 0.0 };
            let d = guard(gl + s, pivmin);
            backward[i] = d;
            carry = gl * s / d;
        }

        let twist = (0..n).map(|r| fcarry[r] + bcarry[r] + shifted[r]).collect();
        TwistedFactorization { forward, backward, twist }
    }

    /// Index minimizing `|γ_r|`.
    pub fn best_twist(&self) -> usize {
        self.twist
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(best, min), (r, t)| {
                if t.abs() < min {
                    (r, t.abs())
                } else {
                    (best, min)
                }
            })
            .0
    }

    /// Solves `N_r Δ N_rᵀ z = γ_r e_r` with `z_r = 1`: one inverse-iteration
    /// step from the unit vector at the twist index.
    pub fn twisted_vector(&self, chain: Chain<'_>, r: usize) -> Vec<f64> {
        let b = chain.offdiag;
        let n = chain.dim();
        let mut z = vec![0.0; n];
        z[r] = 1.0;
        for i in (0..r).rev() {
            z[i] = -b[i] / self.forward[i] * z[i + 1];
        }
        for i in r + 1..n {
            z[i] = -b[i - 1] / self.backward[i] * z[i - 1];
        }
        z
    }

    /// One inverse-iteration step: solves `(K - shift·M) y = M z` with the
    /// forward `LDLᵀ` factors.
    pub fn inverse_step(&self, chain: Chain<'_>, z: &[f64]) -> Vec<f64> {
        let b = chain.offdiag;
        let d = &self.forward;
        let n = chain.dim();
        let mut w: Vec<f64> = (0..n).map(|i| z[i] * chain.m(i)).collect();
        for i in 1..n {
            w[i] -= b[i - 1] / d[i - 1] * w[i - 1];
        }
        for i in 0..n {
            w[i] /= d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            w[i] -= b[i] / d[i] * w[i + 1];
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{assemble, PathSpec};

    #[test]
    fn counts_on_three_vertex_paths() {
        // eigenvalues 0, 1, 3
        let free = assemble(&PathSpec::unit(1, 0.0).unwrap());
        assert_eq!(eigenvalue_count_below(&free, 0.5), 1);
        assert_eq!(eigenvalue_count_below(&free, -1e-300), 0);
        assert_eq!(eigenvalue_count_below(&free, 0.0), 0);
        assert_eq!(eigenvalue_count_below(&free, 1e-300), 1);
        assert_eq!(eigenvalue_count_below(&free, 2.0), 2);
        assert_eq!(eigenvalue_count_below(&free, 3.5), 3);

        // eigenvalues 2-√3, 1, 2+√3
        let op = assemble(&PathSpec::unit(1, 1.0).unwrap());
        assert_eq!(eigenvalue_count_below(&op, 2.0), 2);
        assert_eq!(eigenvalue_count_below(&op, 0.26), 0);
        assert_eq!(eigenvalue_count_below(&op, 0.27), 1);
        assert_eq!(eigenvalue_count_below(&op, -3.0), 0);
    }

    #[test]
    fn exact_eigenvalue_is_not_counted() {
        // x = 1 is an eigenvalue of the free 3-path; the last pivot is exactly +0
        let free = assemble(&PathSpec::unit(1, 0.0).unwrap());
        assert_eq!(eigenvalue_count_below(&free, 1.0), 1);
    }

    #[test]
    fn sign_of_offdiagonal_is_irrelevant() {
        let a = TridiagonalOperator::from_parts(vec![2.0, 1.0, 4.0], vec![1.5, -0.5]).unwrap();
        let b = TridiagonalOperator::from_parts(vec![2.0, 1.0, 4.0], vec![-1.5, 0.5]).unwrap();
        for x in [-1.0, 0.0, 0.7, 1.9, 3.3, 5.0] {
            assert_eq!(eigenvalue_count_below(&a, x), eigenvalue_count_below(&b, x));
        }
    }

    #[test]
    fn mass_scales_the_shift() {
        // K = [[1,-1],[-1,1]], M = diag(1/2, 1): det(K - xM) = x(x/2 - 3/2), eigenvalues 0 and 3
        let chain = Chain { offdiag: &[-1.0], excess: &[0.0, 0.0], mass: Some(&[0.5, 1.0]) };
        assert_eq!(count_below(chain, 1e-12, f64::MIN_POSITIVE), 1);
        assert_eq!(count_below(chain, 2.9, f64::MIN_POSITIVE), 1);
        assert_eq!(count_below(chain, 3.1, f64::MIN_POSITIVE), 2);
    }

    #[test]
    fn twisted_vector_of_free_ground_state_is_constant() {
        let op = assemble(&PathSpec::unit(5, 0.0).unwrap());
        let chain = Chain::of(&op);
        let tf = TwistedFactorization::new(chain, 0.0, pivot_floor(&op));
        let z = tf.twisted_vector(chain, tf.best_twist());
        assert!(z.iter().all(|&x| x == 1.0), "{z:?}");
    }
}
