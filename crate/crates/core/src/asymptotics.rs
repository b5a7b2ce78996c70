//! Scaling experiments over growing `k`: per-instance summaries, scaled
//! series, Richardson-extrapolated limits and log-log exponent fits.

use rayon::prelude::*;
use serde::Serialize;

use crate::eigensolve::{default_tol, refine_eigenvalue, smallest_eigenvalues};
use crate::error::{Error, Result};
use crate::model::{assemble, PathSpec, WeightProfile};
use crate::theory::dirichlet_ground_value;

/// Instances sharing a weight profile and potential, indexed by `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Family {
    pub weights: WeightProfile,
    pub u: f64,
}

impl Family {
    pub fn new(weights: WeightProfile, u: f64) -> Self {
        Family { weights, u }
    }

    pub fn unit(u: f64) -> Self {
        Family { weights: WeightProfile::Unit, u }
    }

    pub fn instance(&self, k: usize) -> Result<PathSpec> {
        PathSpec::new(k, self.weights.clone(), self.u)
    }

    pub fn describe(&self) -> String {
        format!("{} u={}", self.weights.label(), self.u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    GapTimesN2,
    Lambda1TimesN2,
    Lambda0TimesN2,
    Gap,
    CenterValueTimesN,
    DirichletMu0TimesN2,
}

/// Everything one solve reports about an instance. Eigenvalues and the gap
/// are refined to full relative precision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub u: f64,
    pub weights: String,
    pub lambda0: f64,
    pub lambda1: f64,
    pub gap: f64,
    pub n2gap: f64,
    pub n_u0_center: f64,
    #[serde(skip)]
    pub residual0: f64,
    #[serde(skip)]
    pub residual1: f64,
    #[serde(skip)]
    pub dirichlet_mu0: Option<f64>,
}

impl InstanceSummary {
    pub fn value(&self, quantity: Quantity) -> Option<f64> {
        let n = self.n as f64;
        Some(match quantity {
            Quantity::GapTimesN2 => self.n2gap,
            Quantity::Lambda1TimesN2 => n * n * self.lambda1,
            Quantity::Lambda0TimesN2 => n * n * self.lambda0,
            Quantity::Gap => self.gap,
            Quantity::CenterValueTimesN => self.n_u0_center,
            Quantity::DirichletMu0TimesN2 => n * n * self.dirichlet_mu0?,
        })
    }
}

/// Solves one instance for its two lowest eigenpairs.
pub fn summarize(spec: &PathSpec, tol: Option<f64>, with_dirichlet: bool) -> Result<InstanceSummary> {
    let op = assemble(spec);
    let tol = tol.unwrap_or_else(|| default_tol(&op));
    let spectrum = smallest_eigenvalues(&op, 2, tol)?;
    let (lambda0, _) = refine_eigenvalue(&op, &spectrum.pairs[0]);
    let (lambda1, _) = refine_eigenvalue(&op, &spectrum.pairs[1]);
    let ground = spectrum.pairs[0].vector.as_ref().expect("solver returns vectors");
    let n = spec.n();
    let gap = lambda1 - lambda0;
    let dirichlet_mu0 = if with_dirichlet { Some(dirichlet_ground_value(spec)?) } else { None };
    Ok(InstanceSummary {
        n,
        k: spec.k(),
        u: spec.u(),
        weights: spec.weights().label(),
        lambda0,
        lambda1,
        gap,
        n2gap: (n * n) as f64 * gap,
        n_u0_center: n as f64 * ground[spec.center()],
        residual0: spectrum.pairs[0].residual.unwrap_or(f64::NAN),
        residual1: spectrum.pairs[1].residual.unwrap_or(f64::NAN),
        dirichlet_mu0,
    })
}

fn check_grid(k_grid: &[usize]) -> Result<()> {
    if k_grid.is_empty() {
        return Err(Error::argument("empty k grid"));
    }
    if k_grid[0] < 1 {
        return Err(Error::argument("k grid entries must be at least 1"));
    }
    if k_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::argument("k grid must be strictly increasing"));
    }
    Ok(())
}

/// Summaries for every `k` in the grid, solved in parallel and returned in grid order.
pub fn sweep(family: &Family, k_grid: &[usize], tol: Option<f64>, with_dirichlet: bool) -> Result<Vec<InstanceSummary>> {
    check_grid(k_grid)?;
    k_grid
        .par_iter()
        .map(|&k| {
            family
                .instance(k)
                .and_then(|spec| summarize(&spec, tol, with_dirichlet))
                .map_err(|e| Error::AtInstance { k, source: Box::new(e) })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSeries {
    pub quantity: Quantity,
    /// `(N, value)`, strictly increasing in `N`.
    pub points: Vec<(usize, f64)>,
    pub family: String,
}

impl ScalingSeries {
    pub fn new(quantity: Quantity, points: Vec<(usize, f64)>, family: impl Into<String>) -> Result<Self> {
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::argument("series sizes must be strictly increasing"));
        }
        if let Some((n, v)) = points.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::argument(format!("non-finite value {v} at N = {n}")));
        }
        Ok(ScalingSeries { quantity, points, family: family.into() })
    }

    pub fn from_summaries(quantity: Quantity, rows: &[InstanceSummary], family: impl Into<String>) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| {
                r.value(quantity)
                    .map(|v| (r.n, v))
                    .ok_or_else(|| Error::argument("summary lacks the Dirichlet value"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(quantity, points, family)
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn value_at(&self, n: usize) -> Option<f64> {
        self.points.iter().find(|p| p.0 == n).map(|p| p.1)
    }
}

pub fn build_series(family: &Family, quantity: Quantity, k_grid: &[usize], tol: Option<f64>) -> Result<ScalingSeries> {
    let rows = sweep(family, k_grid, tol, quantity == Quantity::DirichletMu0TimesN2)?;
    ScalingSeries::from_summaries(quantity, &rows, family.describe())
}

/// `N²Γ`, the quantity whose limit separates the free and the perturbed case.
pub fn gap_scaling_series(family: &Family, k_grid: &[usize]) -> Result<ScalingSeries> {
    build_series(family, Quantity::GapTimesN2, k_grid, None)
}

pub fn lambda0_lower_bound_series(family: &Family, k_grid: &[usize]) -> Result<ScalingSeries> {
    build_series(family, Quantity::Lambda0TimesN2, k_grid, None)
}

pub fn center_decay_series(family: &Family, k_grid: &[usize]) -> Result<ScalingSeries> {
    build_series(family, Quantity::CenterValueTimesN, k_grid, None)
}

/// `k = ⌊k0·ratio^j⌋` for `j = 0..count`, deduplicated.
pub fn geometric_k_grid(k0: usize, ratio: f64, count: usize) -> Result<Vec<usize>> {
    if k0 < 1 || !(ratio.is_finite() && ratio > 1.0) || count == 0 {
        return Err(Error::argument(format!(
            "geometric grid needs k0 >= 1, ratio > 1, count >= 1 (got {k0}, {ratio}, {count})"
        )));
    }
    let mut grid: Vec<usize> = (0..count)
        .map(|j| (k0 as f64 * ratio.powi(j as i32)).floor() as usize)
        .collect();
    grid.dedup();
    Ok(grid)
}

/// `k = ⌊100·1.5^j⌋`, `j = 0..=12`.
pub fn default_k_grid() -> Vec<usize> {
    geometric_k_grid(100, 1.5, 13).expect("valid default grid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    ConvergesTo,
    DecreasesTowardZero,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub limit: f64,
    pub trend: Trend,
    /// Richardson values from the last three consecutive pairs.
    pub extrapolations: Vec<f64>,
}

/// Limit of `v(N) = L + c/N² + ...` from two points.
fn richardson(a: (usize, f64), b: (usize, f64)) -> f64 {
    let (na, va) = (a.0 as f64 * a.0 as f64, a.1);
    let (nb, vb) = (b.0 as f64 * b.0 as f64, b.1);
    (nb * vb - na * va) / (nb - na)
}

pub fn estimate_limit(series: &ScalingSeries) -> Result<LimitEstimate> {
    let p = &series.points;
    if p.len() < 5 {
        return Err(Error::argument(format!("limit estimate needs at least 5 points, got {}", p.len())));
    }
    let m = p.len();
    let extrapolations: Vec<f64> = (m - 3..m).map(|i| richardson(p[i - 1], p[i])).collect();
    let limit = extrapolations[2];

    let tail = &p[m - 5..];
    let decreasing = tail.windows(2).all(|w| w[1].1 < w[0].1);
    let first = p[0].1;
    let last = p[m - 1].1;
    let trend = if decreasing && first > 0.0 && last / first <= 0.5 {
        Trend::DecreasesTowardZero
    } else {
        let hi = extrapolations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = extrapolations.iter().copied().fold(f64::INFINITY, f64::min);
        let scale = hi.abs().max(lo.abs());
        if hi - lo <= 1e-3 * scale {
            Trend::ConvergesTo
        } else {
            Trend::Inconclusive
        }
    };
    Ok(LimitEstimate { limit, trend, extrapolations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    /// `-slope` of `log value` against `log N`.
    pub exponent: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub window: (usize, usize),
    pub points: usize,
}

/// Least-squares line through `(log N, log value)` over `N ∈ [window.0, window.1]`.
pub fn fit_exponent(series: &ScalingSeries, window: (usize, usize)) -> Result<ExponentFit> {
    let pts: Vec<(usize, f64)> = series
        .points
        .iter()
        .copied()
        .filter(|&(n, _)| n >= window.0 && n <= window.1)
        .collect();
    if pts.len() < 5 {
        return Err(Error::argument(format!(
            "exponent fit needs at least 5 points in [{}, {}], got {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    if let Some((n, v)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::domain(format!("cannot take the log of {v} at N = {n}")));
    }
    let xs: Vec<f64> = pts.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(ExponentFit {
        exponent: -slope,
        intercept,
        rms_residual: rms,
        window: (pts[0].0, pts[pts.len() - 1].0),
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn synthetic(f: impl Fn(f64) -> f64) -> ScalingSeries {
        let points = default_k_grid().into_iter().map(|k| (2 * k + 1, f((2 * k + 1) as f64))).collect();
        ScalingSeries::new(Quantity::Gap, points, "synthetic").unwrap()
    }

    #[test]
    fn default_grid() {
        let g = default_k_grid();
        assert_eq!(g.len(), 13);
        assert_eq!(&g[..4], &[100, 150, 225, 337]);
        assert_eq!(*g.last().unwrap(), 12974);
    }

    #[test]
    fn exact_power_laws() {
        let fit = fit_exponent(&synthetic(|n| n.powi(-3)), (1, usize::MAX)).unwrap();
        assert!((fit.exponent - 3.0).abs() < 1e-10);
        assert!(fit.rms_residual < 1e-10);

        let fit = fit_exponent(&synthetic(|n| 5.0 / (n * n)), (1, usize::MAX)).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-10);
        assert!((fit.intercept - 5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn fit_errors() {
        let s = synthetic(|n| n.powi(-3));
        assert!(matches!(fit_exponent(&s, (201, 400)), Err(Error::Argument(_))));
        let s = synthetic(|n| if n > 1000.0 { 0.0 } else { 1.0 });
        assert!(matches!(fit_exponent(&s, (1, usize::MAX)), Err(Error::Domain(_))));
    }

    #[test]
    fn free_gap_limit() {
        let s = synthetic(|n| {
            let h = (PI / (2.0 * n)).sin();
            n * n * 4.0 * h * h
        });
        let est = estimate_limit(&s).unwrap();
        assert!((est.limit - PI * PI).abs() < 1e-6, "{}", est.limit);
        assert_eq!(est.trend, Trend::ConvergesTo);
    }

    #[test]
    fn trend_classification() {
        let zero = synthetic(|_| 0.0);
        assert_eq!(
            estimate_limit(&zero).unwrap(),
            LimitEstimate { limit: 0.0, trend: Trend::ConvergesTo, extrapolations: vec![0.0; 3] }
        );
        assert_eq!(estimate_limit(&synthetic(|n| n.powf(-0.5))).unwrap().trend, Trend::DecreasesTowardZero);
        let short = ScalingSeries::new(Quantity::Gap, vec![(3, 1.0), (5, 1.0)], "x").unwrap();
        assert!(estimate_limit(&short).is_err());
    }

    #[test]
    fn series_validation() {
        assert!(ScalingSeries::new(Quantity::Gap, vec![(5, 1.0), (5, 2.0)], "x").is_err());
        assert!(ScalingSeries::new(Quantity::Gap, vec![(5, f64::NAN)], "x").is_err());
        assert!(sweep(&Family::unit(0.0), &[3, 2], None, false).is_err());
        assert!(sweep(&Family::unit(0.0), &[0, 2], None, false).is_err());
    }

    #[test]
    fn small_series_values() {
        let s = build_series(&Family::unit(0.0), Quantity::GapTimesN2, &[1, 2], None).unwrap();
        assert!((s.points[0].1 - 9.0).abs() < 1e-12);
        assert!((s.points[1].1 - 9.549_150_281_252_63).abs() < 1e-11, "{:?}", s.points);

        let s = build_series(&Family::unit(0.0), Quantity::Lambda0TimesN2, &[1, 2, 5], None).unwrap();
        assert!(s.values().iter().all(|&v| v.abs() < 1e-20));

        let s = build_series(&Family::unit(1.0), Quantity::CenterValueTimesN, &[1], None).unwrap();
        assert!((s.points[0].1 - 1.379_102_530_142_95).abs() < 1e-11, "{:?}", s.points);
    }

    #[test]
    fn solver_errors_name_the_instance() {
        let fam = Family::new(WeightProfile::Explicit(vec![1.0, 2.0]), 0.0);
        let err = sweep(&fam, &[2, 3], None, false).unwrap_err();
        assert!(matches!(err, Error::AtInstance { k: 3, .. }), "{err}");
    }
}
