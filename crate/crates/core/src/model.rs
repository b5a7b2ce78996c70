//! Problem instances on the path graph with vertices `-k..=k` and the
//! symmetric tridiagonal operator `L_γ + u·δ₀` they define.
//!
//! Vertex `v` is stored at array index `v + k`; edge `(v, v+1)` at index
//! `v + k` of the off-diagonal.

use serde::Serialize;

use crate::error::{Error, Result};

/// Edge weights `γ_{v,v+1}`, always mirrored through the zero vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightProfile {
    Unit,
    /// `γ_{n,n+1} = c / max(n, 1)^mu` for `n >= 0`.
    PowerLaw { c: f64, mu: f64 },
    /// Weights of edges `(n, n+1)` for `n = 0..k`; the negative side is the mirror image.
    Explicit(Vec<f64>),
}

impl WeightProfile {
    pub fn power_law(c: f64, mu: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::validation(format!("power-law constant C must be positive, got {c}")));
        }
        if !(mu.is_finite() && mu > 1.0) {
            return Err(Error::validation(format!("power-law exponent mu must exceed 1, got {mu}")));
        }
        Ok(WeightProfile::PowerLaw { c, mu })
    }

    /// Explicit weights, given either as the half list for edges `(0,1) .. (k-1,k)`
    /// (length `k`) or as the full list for edges `(-k,-k+1) .. (k-1,k)` (length `2k`).
    /// A full list must already be mirror-symmetric.
    pub fn explicit(weights: Vec<f64>, k: usize) -> Result<Self> {
        let half = if weights.len() == k {
            weights
        } else if weights.len() == 2 * k {
            let asymmetric = (0..k).find(|&e| weights[e] != weights[2 * k - 1 - e]);
            if let Some(e) = asymmetric {
                return Err(Error::validation(format!(
                    "explicit weights are not symmetric about the zero vertex: edge {} has {} but its mirror has {}",
                    e as i64 - k as i64,
                    weights[e],
                    weights[2 * k - 1 - e]
                )));
            }
            weights[k..].to_vec()
        } else {
            return Err(Error::validation(format!(
                "expected {k} (half) or {} (full) explicit weights, got {}",
                2 * k,
                weights.len()
            )));
        };
        if let Some((n, &w)) = half.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::validation(format!("weight of edge ({n},{}) must be positive, got {w}", n + 1)));
        }
        Ok(WeightProfile::Explicit(half))
    }

    /// Weight of the edge `(n, n+1)`, `n >= 0`.
    pub fn half_weight(&self, n: usize) -> f64 {
        match self {
            WeightProfile::Unit => 1.0,
            WeightProfile::PowerLaw { c, mu } => c / (n.max(1) as f64).powf(*mu),
            WeightProfile::Explicit(w) => w[n],
        }
    }

    /// Realized weights for the `2k` edges `(v, v+1)`, `v = -k..k`.
    pub fn realize(&self, k: usize) -> Vec<f64> {
        let half: Vec<f64> = (0..k).map(|n| self.half_weight(n)).collect();
        half.iter().rev().chain(half.iter()).copied().collect()
    }

    /// Short label used in output tables; never contains a comma.
    pub fn label(&self) -> String {
        match self {
            WeightProfile::Unit => "unit".to_string(),
            WeightProfile::PowerLaw { c, mu } => format!("powerlaw:C={c}:mu={mu}"),
            WeightProfile::Explicit(_) => "explicit".to_string(),
        }
    }
}

/// A problem instance: half-length `k`, edge weights and the center potential `u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSpec {
    k: usize,
    weights: WeightProfile,
    u: f64,
}

impl PathSpec {
    pub fn new(k: usize, weights: WeightProfile, u: f64) -> Result<Self> {
        if k < 1 {
            return Err(Error::validation("half-length k must be at least 1"));
        }
        if !(u.is_finite() && u >= 0.0) {
            return Err(Error::validation(format!("potential u must be finite and non-negative, got {u}")));
        }
        match &weights {
            WeightProfile::Unit => {}
            WeightProfile::PowerLaw { c, mu } => {
                WeightProfile::power_law(*c, *mu)?;
            }
            WeightProfile::Explicit(w) => {
                if w.len() != k {
                    return Err(Error::validation(format!(
                        "explicit weights cover {} edges, instance has k = {k}",
                        w.len()
                    )));
                }
                if w.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::validation("explicit weights must be positive"));
                }
            }
        }
        let spec = PathSpec { k, weights, u };
        if let Some((e, w)) = spec.edge_weights().into_iter().enumerate().find(|(_, w)| !(*w > 0.0)) {
            return Err(Error::validation(format!(
                "edge ({}, {}) realizes a non-positive weight {w}",
                e as i64 - k as i64,
                e as i64 - k as i64 + 1
            )));
        }
        Ok(spec)
    }

    pub fn unit(k: usize, u: f64) -> Result<Self> {
        Self::new(k, WeightProfile::Unit, u)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of vertices, `2k + 1`.
    pub fn n(&self) -> usize {
        2 * self.k + 1
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn weights(&self) -> &WeightProfile {
        &self.weights
    }

    /// Array index of the zero vertex.
    pub fn center(&self) -> usize {
        self.k
    }

    pub fn edge_weights(&self) -> Vec<f64> {
        self.weights.realize(self.k)
    }
}

/// Symmetric tridiagonal matrix. Besides the diagonal and off-diagonal it
/// keeps the diagonal excess `diag[i] - |off[i-1]| - |off[i]|`, exact when
/// the operator is assembled from a weighted Laplacian. The eigensolver works
/// with that excess so that small eigenvalues keep their relative accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    excess: Vec<f64>,
}

impl TridiagonalOperator {
    /// General constructor; the excess is derived by subtraction.
    pub fn from_parts(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::argument("operator must have at least one row"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::Dimension { expected: diag.len() - 1, found: offdiag.len() });
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::argument("operator entries must be finite"));
        }
        let excess = (0..diag.len())
            .map(|i| diag[i] - incident(&offdiag, i))
            .collect();
        Ok(TridiagonalOperator { diag, offdiag, excess })
    }

    /// Operator of a weighted Laplacian on a path plus a diagonal potential.
    /// `weights[i]` couples rows `i` and `i+1`.
    pub fn from_laplacian(weights: &[f64], potential: Vec<f64>) -> Self {
        debug_assert_eq!(weights.len() + 1, potential.len());
        let diag = (0..potential.len())
            .map(|i| {
                let left = if i > 0 { weights[i - 1] } else { 0.0 };
                let right = weights.get(i).copied().unwrap_or(0.0);
                left + right + potential[i]
            })
            .collect();
        let offdiag = weights.iter().map(|w| -w).collect();
        TridiagonalOperator { diag, offdiag, excess: potential }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Diagonal excess over the incident coupling sum.
    pub fn excess(&self) -> &[f64] {
        &self.excess
    }

    /// `max_i sum_j |H_ij|`, the scale used for all solver tolerances.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.diag[i].abs() + incident(&self.offdiag, i))
            .fold(0.0, f64::max)
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        (0..self.dim()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let r = incident(&self.offdiag, i);
            (lo.min(self.diag[i] - r), hi.max(self.diag[i] + r))
        })
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.dim(), "vector length must match operator dimension");
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * f[i];
                if i > 0 {
                    y += self.offdiag[i - 1] * f[i - 1];
                }
                if i + 1 < n {
                    y += self.offdiag[i] * f[i + 1];
                }
                y
            })
            .collect()
    }

    /// `<f, H f>`.
    pub fn bilinear(&self, f: &[f64]) -> f64 {
        self.apply(f).iter().zip(f).map(|(a, b)| a * b).sum()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = self.diag[i];
            if i + 1 < n {
                a[i * n + i + 1] = self.offdiag[i];
                a[(i + 1) * n + i] = self.offdiag[i];
            }
        }
        a
    }

    /// The operator in reversed vertex order.
    pub fn reversed(&self) -> Self {
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        TridiagonalOperator {
            diag: rev(&self.diag),
            offdiag: rev(&self.offdiag),
            excess: rev(&self.excess),
        }
    }
}

fn incident(offdiag: &[f64], i: usize) -> f64 {
    let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
    let right = offdiag.get(i).map_or(0.0, |b| b.abs());
    left + right
}

/// Assembles `H_γ = L_γ + u·δ₀` for the instance.
pub fn assemble(spec: &PathSpec) -> TridiagonalOperator {
    let mut potential = vec![0.0; spec.n()];
    potential[spec.center()] = spec.u();
    TridiagonalOperator::from_laplacian(&spec.edge_weights(), potential)
}

/// `q_{w,u}[f] = Σ_edges γ (f(v+1) - f(v))² + u f(0)²`.
pub fn quadratic_form(spec: &PathSpec, f: &[f64]) -> Result<f64> {
    if f.len() != spec.n() {
        return Err(Error::Dimension { expected: spec.n(), found: f.len() });
    }
    let jumps: f64 = spec
        .edge_weights()
        .iter()
        .zip(f.windows(2))
        .map(|(g, w)| g * (w[1] - w[0]).powi(2))
        .sum();
    Ok(jumps + spec.u() * f[spec.center()].powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_vertex_operators() {
        let op = assemble(&PathSpec::unit(1, 0.0).unwrap());
        assert_eq!(op.diag(), &[1.0, 2.0, 1.0]);
        assert_eq!(op.offdiag(), &[-1.0, -1.0]);
        assert_eq!(op.excess(), &[0.0, 0.0, 0.0]);

        let op = assemble(&PathSpec::unit(1, 1.0).unwrap());
        assert_eq!(op.diag(), &[1.0, 3.0, 1.0]);
        assert_eq!(op.offdiag(), &[-1.0, -1.0]);
    }

    #[test]
    fn unit_free_operator_shape() {
        let op = assemble(&PathSpec::unit(6, 0.0).unwrap());
        let n = op.dim();
        assert_eq!(n, 13);
        assert_eq!(op.diag()[0], 1.0);
        assert_eq!(op.diag()[n - 1], 1.0);
        assert!(op.diag()[1..n - 1].iter().all(|&d| d == 2.0));
        assert!(op.offdiag().iter().all(|&b| b == -1.0));
        assert_eq!(op.max_row_sum(), 4.0);
    }

    #[test]
    fn power_law_clamps_at_the_center() {
        let w = WeightProfile::power_law(1.0, 2.0).unwrap();
        let spec = PathSpec::new(2, w.clone(), 0.0).unwrap();
        assert_eq!(assemble(&spec).offdiag(), &[-1.0, -1.0, -1.0, -1.0]);

        // k = 3: edges (-3,-2), (-2,-1), (-1,0), (0,1), (1,2), (2,3)
        let spec = PathSpec::new(3, w, 0.0).unwrap();
        assert_eq!(spec.edge_weights(), vec![0.25, 1.0, 1.0, 1.0, 1.0, 0.25]);
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(matches!(PathSpec::unit(0, 0.0), Err(Error::Validation(_))));
        assert!(matches!(PathSpec::unit(3, -1.0), Err(Error::Validation(_))));
        assert!(WeightProfile::power_law(1.0, 1.0).is_err());
        assert!(WeightProfile::power_law(0.0, 2.0).is_err());
        assert!(WeightProfile::explicit(vec![1.0, -2.0], 2).is_err());
        assert!(WeightProfile::explicit(vec![1.0, 2.0, 3.0], 2).is_err());
        let bad = PathSpec::new(3, WeightProfile::Explicit(vec![1.0, 0.0, 1.0]), 0.0);
        assert!(matches!(bad, Err(Error::Validation(_))));
    }

    #[test]
    fn explicit_full_list_must_be_mirror_symmetric() {
        let ok = WeightProfile::explicit(vec![3.0, 2.0, 1.0, 1.0, 2.0, 3.0], 3).unwrap();
        assert_eq!(ok, WeightProfile::Explicit(vec![1.0, 2.0, 3.0]));
        let err = WeightProfile::explicit(vec![3.0, 2.0, 1.0, 1.0, 2.0, 4.0], 3).unwrap_err();
        assert!(err.to_string().contains("not symmetric"), "{err}");
    }

    #[test]
    fn quadratic_form_examples() {
        let spec = PathSpec::unit(4, 0.0).unwrap();
        assert_eq!(quadratic_form(&spec, &[1.0; 9]).unwrap(), 0.0);

        let spec = PathSpec::unit(1, 5.0).unwrap();
        assert_eq!(quadratic_form(&spec, &[1.0, 0.0, 1.0]).unwrap(), 2.0);

        let spec = PathSpec::unit(1, 1.0).unwrap();
        assert_eq!(quadratic_form(&spec, &[0.0, 1.0, 0.0]).unwrap(), 3.0);

        assert_eq!(
            quadratic_form(&spec, &[1.0, 2.0]),
            Err(Error::Dimension { expected: 3, found: 2 })
        );
    }

    #[test]
    fn from_parts_checks_shape() {
        assert!(TridiagonalOperator::from_parts(vec![1.0, 2.0], vec![]).is_err());
        let op = TridiagonalOperator::from_parts(vec![3.0, 5.0], vec![-1.0]).unwrap();
        assert_eq!(op.excess(), &[2.0, 4.0]);
        assert_eq!(op.gershgorin_bounds(), (2.0, 6.0));
    }
}
