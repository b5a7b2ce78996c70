//! Lowest eigenpairs of symmetric tridiagonal operators.
//!
//! Eigenvalues come from Sturm-count bisection, so every returned value is
//! certified by the counts at its bracket endpoints. Eigenvectors come from
//! inverse iteration started at the twist index of a twisted factorization,
//! with the shift refined to full precision first. A dense cyclic Jacobi
//! solver in [`jacobi`] serves as the independent oracle.
//!
//! Operators that equal their own reflection have only even and odd
//! eigenvectors. For those the vector is computed on the matching half chain
//! and reflected, so symmetry holds exactly even when `λ₀` and `λ₁` are
//! relatively close and a full-length solve would mix the two.
//!
//! Error budget: bisection stops once the bracket is narrower than
//! `tol + 2ε·max(|a|,|b|)` with `tol = 1e-14·max_row_sum` by default. Because
//! the count is evaluated in excess form, [`refine_eigenvalue`] can continue to
//! a relative width of `2ε`, which is what [`refined_gap`] uses: gaps of order
//! `1e-12` between eigenvalues of order `1e-8` come out with ~8 correct digits.

pub mod jacobi;
mod sturm;

use serde::Serialize;

pub use jacobi::{dense_oracle_spectrum, ORACLE_MAX_DIM};
pub use sturm::eigenvalue_count_below;

use crate::error::{Error, Result};
use crate::model::TridiagonalOperator;
use sturm::{count_below, pivot_floor, Chain, TwistedFactorization};

const EPS: f64 = f64::EPSILON;
const MAX_BISECTION_STEPS: usize = 4096;
const MAX_INVERSE_SWEEPS: usize = 4;
/// Residual target for eigenvectors, relative to `max_row_sum`.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    /// Position in the ascending ordering.
    pub index: usize,
    pub value: f64,
    /// Certified bracket: `count(lo) <= index < count(hi)`. `None` for oracle output.
    pub bracket: Option<(f64, f64)>,
    /// Unit eigenvector; its largest-magnitude component is positive.
    pub vector: Option<Vec<f64>>,
    /// `‖H v - value·v‖₂`, present together with the vector.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub pairs: Vec<EigenPair>,
    /// `pairs[1].value - pairs[0].value`.
    pub gap: Option<f64>,
}

impl Spectrum {
    pub(crate) fn new(pairs: Vec<EigenPair>) -> Self {
        let gap = match pairs.as_slice() {
            [a, b, ..] => Some(b.value - a.value),
            _ => None,
        };
        Spectrum { pairs, gap }
    }

    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn ground(&self) -> &EigenPair {
        &self.pairs[0]
    }
}

/// Default absolute bisection tolerance, `1e-14·max_row_sum`.
pub fn default_tol(op: &TridiagonalOperator) -> f64 {
    let scale = op.max_row_sum();
    if scale > 0.0 {
        1e-14 * scale
    } else {
        1e-14
    }
}

/// The `count` smallest eigenvalues with unit eigenvectors.
pub fn smallest_eigenvalues(op: &TridiagonalOperator, count: usize, tol: f64) -> Result<Spectrum> {
    solve(op, count, tol, true)
}

/// Like [`smallest_eigenvalues`] without eigenvectors.
pub fn smallest_eigenvalues_only(op: &TridiagonalOperator, count: usize, tol: f64) -> Result<Spectrum> {
    solve(op, count, tol, false)
}

fn solve(op: &TridiagonalOperator, count: usize, tol: f64, vectors: bool) -> Result<Spectrum> {
    let n = op.dim();
    if count == 0 || count > n {
        return Err(Error::argument(format!("requested {count} eigenvalues of a {n}x{n} operator")));
    }
    let scale = op.max_row_sum();
    let min_tol = 4.0 * EPS * scale;
    if !(tol.is_finite() && tol > 0.0 && tol >= min_tol) {
        return Err(Error::argument(format!(
            "tolerance {tol:e} must be positive and at least 4·eps·max_row_sum = {min_tol:e}"
        )));
    }

    let bisector = Bisector::new(op);
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(count);
    for index in 0..count {
        let (lo, hi) = bisector.bracket(index, |lo, hi| hi - lo <= tol + 2.0 * EPS * lo.abs().max(hi.abs()));
        pairs.push(EigenPair {
            index,
            value: lo + (hi - lo) / 2.0,
            bracket: Some((lo, hi)),
            vector: None,
            residual: None,
        });
    }

    if vectors {
        let target = RESIDUAL_TOL * scale.max(f64::MIN_POSITIVE);
        let mirror = Mirror::of(op);
        let mut basis: Vec<(Vec<f64>, Option<Parity>)> = Vec::with_capacity(count);
        for j in 0..count {
            let (lo, hi) = pairs[j].bracket.expect("bisection bracket");
            let (rlo, rhi) = bisector.refine(j, lo, hi);
            let shift = rlo + (rhi - rlo) / 2.0;
            let parity = mirror.as_ref().and_then(|m| m.parity(&bisector, rlo, rhi));
            let space = match (&mirror, parity) {
                (Some(m), Some(Parity::Even)) => Space::Even(m),
                (Some(m), Some(Parity::Odd)) => Space::Odd(m),
                _ => Space::Full,
            };
            let cluster: Vec<&[f64]> = (0..j)
                .filter(|&i| (pairs[j].value - pairs[i].value).abs() < 1e3 * tol)
                .filter(|&i| parity.is_none() || basis[i].1.is_none() || basis[i].1 == parity)
                .map(|i| basis[i].0.as_slice())
                .collect();
            let (v, parity) = match inverse_iteration(op, j, shift, bisector.pivmin, target, &cluster, space) {
                Ok(v) => (v, parity),
                Err(_) if parity.is_some() => {
                    let all: Vec<&[f64]> = (0..j)
                        .filter(|&i| (pairs[j].value - pairs[i].value).abs() < 1e3 * tol)
                        .map(|i| basis[i].0.as_slice())
                        .collect();
                    (inverse_iteration(op, j, shift, bisector.pivmin, target, &all, Space::Full)?, None)
                }
                Err(e) => return Err(e),
            };
            pairs[j].residual = Some(residual_norm(op, &v, pairs[j].value));
            basis.push((v.clone(), parity));
            pairs[j].vector = Some(v);
        }
    }
    Ok(Spectrum::new(pairs))
}

/// Refines the bracket of `pair` until it is `2ε`-relative (or hits the
/// absolute floor `ε²·max_row_sum`), returning the midpoint and the bracket.
pub fn refine_eigenvalue(op: &TridiagonalOperator, pair: &EigenPair) -> (f64, (f64, f64)) {
    let bisector = Bisector::new(op);
    let (lo, hi) = pair
        .bracket
        .unwrap_or_else(|| bisector.bracket(pair.index, |lo, hi| hi - lo <= 1e-8 * bisector.scale));
    let (lo, hi) = bisector.refine(pair.index, lo, hi);
    (lo + (hi - lo) / 2.0, (lo, hi))
}

/// `λ₁ - λ₀` from independently refined brackets.
pub fn refined_gap(op: &TridiagonalOperator, spectrum: &Spectrum) -> Option<f64> {
    match spectrum.pairs.as_slice() {
        [a, b, ..] => Some(refine_eigenvalue(op, b).0 - refine_eigenvalue(op, a).0),
        _ => None,
    }
}

struct Bisector<'a> {
    op: &'a TridiagonalOperator,
    pivmin: f64,
    scale: f64,
    lower: f64,
    upper: f64,
}

impl<'a> Bisector<'a> {
    fn new(op: &'a TridiagonalOperator) -> Self {
        let pivmin = pivot_floor(op);
        let scale = op.max_row_sum();
        let (gl, gu) = op.gershgorin_bounds();
        let slack = 2.0 * EPS * scale * op.dim() as f64 + pivmin;
        let mut lower = gl - slack;
        let mut upper = gu + slack;
        let n = op.dim();
        // Laplacian plus a non-negative potential: positive semi-definite
        if lower < 0.0 && op.excess().iter().all(|&p| p >= 0.0) && count_below(Chain::of(op), 0.0, pivmin) == 0 {
            lower = 0.0;
        }
        let mut widen = slack.max(EPS);
        while count_below(Chain::of(op), lower, pivmin) > 0 {
            lower -= widen;
            widen *= 2.0;
        }
        let mut widen = slack.max(EPS);
        while count_below(Chain::of(op), upper, pivmin) < n {
            upper += widen;
            widen *= 2.0;
        }
        Bisector { op, pivmin, scale, lower, upper }
    }

    fn count(&self, x: f64) -> usize {
        count_below(Chain::of(self.op), x, self.pivmin)
    }

    fn bracket(&self, index: usize, done: impl Fn(f64, f64) -> bool) -> (f64, f64) {
        self.bisect(index, self.lower, self.upper, done)
    }

    fn refine(&self, index: usize, lo: f64, hi: f64) -> (f64, f64) {
        let floor = EPS * EPS * self.scale.max(f64::MIN_POSITIVE);
        self.bisect(index, lo, hi, |lo, hi| hi - lo <= 2.0 * EPS * lo.abs().max(hi.abs()) + floor)
    }

    fn bisect(&self, index: usize, mut lo: f64, mut hi: f64, done: impl Fn(f64, f64) -> bool) -> (f64, f64) {
        for _ in 0..MAX_BISECTION_STEPS {
            if done(lo, hi) {
                break;
            }
            let mid = lo + (hi - lo) / 2.0;
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count(mid) <= index {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
}

struct HalfChain {
    offdiag: Vec<f64>,
    excess: Vec<f64>,
    mass: Option<Vec<f64>>,
}

impl HalfChain {
    fn chain(&self) -> Chain<'_> {
        Chain { offdiag: &self.offdiag, excess: &self.excess, mass: self.mass.as_deref() }
    }
}

/// Even and odd reductions of a reflection-symmetric operator of odd size
/// `2k+1` onto the vertices right of (and including) the center `c = k`.
///
/// Odd vectors vanish at the center, leaving the chain on `c+1..` whose first
/// row keeps the center coupling as potential. Even vectors give the quadratic
/// form on `c..` with the center potential and mass both halved.
struct Mirror {
    center: usize,
    even: HalfChain,
    odd: HalfChain,
}

impl Mirror {
    fn of(op: &TridiagonalOperator) -> Option<Mirror> {
        let n = op.dim();
        if n < 3 || n % 2 == 0 {
            return None;
        }
        let reflected = |v: &[f64]| v.iter().eq(v.iter().rev());
        if !(reflected(op.diag()) && reflected(op.offdiag()) && reflected(op.excess())) {
            return None;
        }
        let c = n / 2;
        let b = op.offdiag();
        let p = op.excess();

        let mut even_excess = p[c..].to_vec();
        even_excess[0] /= 2.0;
        let mut mass = vec![1.0; n - c];
        mass[0] = 0.5;
        let even = HalfChain { offdiag: b[c..].to_vec(), excess: even_excess, mass: Some(mass) };

        let mut odd_excess = p[c + 1..].to_vec();
        odd_excess[0] += b[c].abs();
        let odd = HalfChain { offdiag: b[c + 1..].to_vec(), excess: odd_excess, mass: None };
        Some(Mirror { center: c, even, odd })
    }

    /// Which half chain owns the single eigenvalue in `[lo, hi]`. The window
    /// is widened by a few ulps since the half chains round differently.
    fn parity(&self, bisector: &Bisector<'_>, lo: f64, hi: f64) -> Option<Parity> {
        let w = 64.0 * EPS * lo.abs().max(hi.abs()) + EPS * EPS * bisector.scale;
        let (lo, hi) = (lo - w, hi + w);
        if bisector.count(hi) - bisector.count(lo) != 1 {
            return None;
        }
        let hits = |h: &HalfChain| count_below(h.chain(), hi, bisector.pivmin) - count_below(h.chain(), lo, bisector.pivmin);
        match (hits(&self.even), hits(&self.odd)) {
            (1, 0) => Some(Parity::Even),
            (0, 1) => Some(Parity::Odd),
            _ => None,
        }
    }
}

enum Space<'a> {
    Full,
    Even(&'a Mirror),
    Odd(&'a Mirror),
}

impl Space<'_> {
    fn chain<'b>(&'b self, op: &'b TridiagonalOperator) -> Chain<'b> {
        match self {
            Space::Full => Chain::of(op),
            Space::Even(m) => m.even.chain(),
            Space::Odd(m) => m.odd.chain(),
        }
    }

    fn expand(&self, n: usize, z: Vec<f64>) -> Vec<f64> {
        match self {
            Space::Full => z,
            Space::Even(m) => {
                let c = m.center;
                let mut v = vec![0.0; n];
                for (i, x) in z.into_iter().enumerate() {
                    v[c + i] = x;
                    v[c - i] = x;
                }
                v
            }
            Space::Odd(m) => {
                let c = m.center;
                let mut v = vec![0.0; n];
                for (i, x) in z.into_iter().enumerate() {
                    v[c + 1 + i] = x;
                    v[c - 1 - i] = -x;
                }
                v
            }
        }
    }

    fn restrict(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Space::Full => v.to_vec(),
            Space::Even(m) => v[m.center..].to_vec(),
            Space::Odd(m) => v[m.center + 1..].to_vec(),
        }
    }
}

fn inverse_iteration(
    op: &TridiagonalOperator,
    index: usize,
    shift: f64,
    pivmin: f64,
    target: f64,
    lower: &[&[f64]],
    space: Space<'_>,
) -> Result<Vec<f64>> {
    let n = op.dim();
    let chain = space.chain(op);
    let tf = TwistedFactorization::new(chain, shift, pivmin);
    let mut v = space.expand(n, tf.twisted_vector(chain, tf.best_twist()));
    orthonormalize(&mut v, lower);
    let mut residual = residual_norm(op, &v, shift);
    let mut sweeps = 0;
    while !(residual <= target) {
        if sweeps == MAX_INVERSE_SWEEPS {
            return Err(Error::InverseIteration { index, sweeps, residual, target });
        }
        v = space.expand(n, tf.inverse_step(chain, &space.restrict(&v)));
        orthonormalize(&mut v, lower);
        residual = residual_norm(op, &v, shift);
        sweeps += 1;
    }
    fix_sign(&mut v);
    Ok(v)
}

fn orthonormalize(v: &mut [f64], lower: &[&[f64]]) {
    for q in lower {
        let c: f64 = v.iter().zip(q.iter()).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(q.iter()).for_each(|(a, b)| *a -= c * b);
    }
    normalize(v);
}

fn normalize(v: &mut [f64]) {
    // scale first: twisted vectors can span many orders of magnitude
    let m = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if m > 0.0 {
        v.iter_mut().for_each(|x| *x /= m);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Makes the largest-magnitude component positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let (_, lead) = v
        .iter()
        .enumerate()
        .fold((0.0_f64, 0.0), |(m, s), (_, &x)| if x.abs() > m { (x.abs(), x) } else { (m, s) });
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub(crate) fn residual_norm(op: &TridiagonalOperator, v: &[f64], value: f64) -> f64 {
    op.apply(v)
        .iter()
        .zip(v)
        .map(|(hv, x)| (hv - value * x).powi(2))
        .sum::<f64>()
        .sqrt()
}
