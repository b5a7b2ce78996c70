//! Property suites behind `gapscope verify`. Each check reports the measured
//! defect next to its threshold; thresholds that bound eigenvalue accuracy
//! widen with the bisection tolerance when it is loosened.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{fit_exponent, estimate_limit, sweep, Family, Quantity, ScalingSeries, Trend};
use crate::eigensolve::{
    default_tol, dense_oracle_spectrum, eigenvalue_count_below, refine_eigenvalue, smallest_eigenvalues,
    RESIDUAL_TOL,
};
use crate::error::Result;
use crate::model::{assemble, PathSpec, WeightProfile};
use crate::theory::{
    characteristic_roots, check_ground_state_structure, closed_form_coefficients, dirichlet_ground_value,
    exact_unweighted_eigenvalue, propagate_recurrence, rayleigh_quotient, recurrence_residuals, test_vector_family,
    TestVector,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    /// Soft checks are reported but do not fail the suite.
    pub soft: bool,
}

impl CheckOutcome {
    fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        CheckOutcome { name: name.to_string(), passed: measured <= threshold, measured, threshold, soft: false }
    }

    fn at_least(name: &str, measured: f64, threshold: f64) -> Self {
        CheckOutcome { name: name.to_string(), passed: measured >= threshold, measured, threshold, soft: false }
    }

    fn holds(name: &str, ok: bool) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed: ok,
            measured: if ok { 1.0 } else { 0.0 },
            threshold: 1.0,
            soft: false,
        }
    }

    fn failed(name: &str, err: &crate::error::Error) -> Self {
        CheckOutcome {
            name: format!("{name} ({err})"),
            passed: false,
            measured: f64::NAN,
            threshold: f64::NAN,
            soft: false,
        }
    }

    fn soft(mut self) -> Self {
        self.soft = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Absolute bisection tolerance; `None` uses `1e-14·max_row_sum`.
    pub tol: Option<f64>,
    pub seed: u64,
    pub oracle_instances: usize,
    pub structure_instances: usize,
    /// Grid for the scaling checks; must reach `k = 10000` (N = 20001) and
    /// start at `k = 100`.
    pub k_grid: Vec<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: None,
            seed: 0x5eed_9a95,
            oracle_instances: 200,
            structure_instances: 100,
            k_grid: decade_k_grid(),
        }
    }
}

/// `k = round(100·10^{j/6})`, `j = 0..=12`: six sizes per decade from N = 201
/// to N = 20001.
pub fn decade_k_grid() -> Vec<usize> {
    (0..=12).map(|j| (100.0 * 10f64.powf(j as f64 / 6.0)).round() as usize).collect()
}

/// A random instance with `k <= max_k`, `u ∈ [0, 10]` and unit, power-law or
/// explicit (mirrored) weights.
pub fn random_instance(rng: &mut impl Rng, max_k: usize) -> PathSpec {
    let k = rng.gen_range(1..=max_k);
    let u = if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.0..10.0) };
    let weights = match rng.gen_range(0..3) {
        0 => WeightProfile::Unit,
        1 => WeightProfile::PowerLaw { c: rng.gen_range(0.5..2.0), mu: rng.gen_range(1.01..3.0) },
        _ => WeightProfile::Explicit((0..k).map(|_| rng.gen_range(0.1..2.0)).collect()),
    };
    PathSpec::new(k, weights, u).expect("generated instance is valid")
}

struct Limits {
    tol: Option<f64>,
}

impl Limits {
    /// Eigenvalue accuracy bound: `base`, or the bisection tolerance if looser.
    fn value(&self, base: f64) -> f64 {
        self.tol.map_or(base, |t| base.max(t))
    }

    fn tol_for(&self, spec: &PathSpec) -> f64 {
        self.tol.unwrap_or_else(|| default_tol(&assemble(spec)))
    }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let limits = Limits { tol: opts.tol };
    let mut out = Vec::new();
    let mut push = |r: Result<Vec<CheckOutcome>>, name: &str| match r {
        Ok(v) => out.extend(v),
        Err(e) => out.push(CheckOutcome::failed(name, &e)),
    };
    push(oracle_suite(opts, &limits), "oracle equivalence");
    push(structure_suite(opts, &limits), "ground-state structure");
    push(exact_formula_suite(&limits), "exact unweighted eigenvalues");
    push(interlacing_suite(&limits), "interlacing");
    push(recurrence_suite(&limits), "recurrence");
    push(scaling_suite(opts), "scaling trends");
    out
}

fn oracle_suite(opts: &VerifyOptions, limits: &Limits) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst_value: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut sturm_ok = true;
    for _ in 0..opts.oracle_instances {
        let spec = random_instance(&mut rng, 100);
        let op = assemble(&spec);
        let tol = limits.tol_for(&spec);
        let fast = smallest_eigenvalues(&op, 2, tol)?;
        let dense = dense_oracle_spectrum(&op)?;
        for i in 0..2 {
            worst_value = worst_value.max((fast.pairs[i].value - dense.pairs[i].value).abs());
            let scale = op.max_row_sum();
            worst_residual = worst_residual.max(fast.pairs[i].residual.unwrap_or(f64::INFINITY) / scale);
            let (lo, hi) = fast.pairs[i].bracket.expect("bracket");
            sturm_ok &= eigenvalue_count_below(&op, lo) <= i && i < eigenvalue_count_below(&op, hi);
        }
    }
    let residual_limit = opts.tol.map_or(RESIDUAL_TOL, |t| RESIDUAL_TOL.max(t));
    Ok(vec![
        CheckOutcome::at_most("oracle: two lowest eigenvalues vs dense Jacobi", worst_value, limits.value(1e-10)),
        CheckOutcome::at_most("solver: eigenvector residual / max_row_sum", worst_residual, residual_limit),
        CheckOutcome::holds("solver: Sturm counts certify each bracket", sturm_ok),
    ])
}

fn structure_suite(opts: &VerifyOptions, limits: &Limits) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xa5a5);
    let mut positive = true;
    let mut sym: f64 = 0.0;
    let mut mono: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for _ in 0..opts.structure_instances {
        let spec = random_instance(&mut rng, 200);
        let op = assemble(&spec);
        let s = smallest_eigenvalues(&op, 2, limits.tol_for(&spec))?;
        let r = check_ground_state_structure(&spec, s.ground())?;
        positive &= r.positive;
        sym = sym.max(r.symmetric_defect);
        mono = mono.max(r.monotone_defect);
        let gap = refine_eigenvalue(&op, &s.pairs[1]).0 - refine_eigenvalue(&op, &s.pairs[0]).0;
        min_gap = min_gap.min(gap);
    }

    // λ₀ non-decreasing and Γ non-increasing in u (unit weights)
    let mut lam0_drop: f64 = 0.0;
    let mut gap_rise: f64 = 0.0;
    for k in [5, 50, 300] {
        let mut prev: Option<f64> = None;
        let mut free_gap = None;
        for u in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let spec = PathSpec::unit(k, u)?;
            let op = assemble(&spec);
            let s = smallest_eigenvalues(&op, 2, limits.tol_for(&spec))?;
            let l0 = refine_eigenvalue(&op, &s.pairs[0]).0;
            let gap = refine_eigenvalue(&op, &s.pairs[1]).0 - l0;
            if let Some(p) = prev {
                lam0_drop = lam0_drop.max(p - l0);
            }
            prev = Some(l0);
            match free_gap {
                None => free_gap = Some(gap),
                Some(g0) => gap_rise = gap_rise.max(gap - g0),
            }
        }
    }
    Ok(vec![
        CheckOutcome::holds("ground state: strictly positive", positive),
        CheckOutcome::at_most("ground state: symmetry defect", sym, 1e-10),
        CheckOutcome::at_most("ground state: monotonicity defect", mono, 1e-12),
        CheckOutcome::at_least("ground state: smallest gap (non-degenerate)", min_gap, f64::MIN_POSITIVE),
        CheckOutcome::at_most("lambda0 non-decreasing in u: largest drop", lam0_drop, 0.0),
        CheckOutcome::at_most("gap not increased by u: largest rise", gap_rise, 0.0),
    ])
}

fn exact_formula_suite(limits: &Limits) -> Result<Vec<CheckOutcome>> {
    let mut worst: f64 = 0.0;
    for k in 1..=200 {
        let spec = PathSpec::unit(k, 0.0)?;
        let op = assemble(&spec);
        let s = smallest_eigenvalues(&op, 2, limits.tol_for(&spec))?;
        for j in 0..2 {
            worst = worst.max((s.pairs[j].value - exact_unweighted_eigenvalue(j, spec.n())?).abs());
        }
    }
    Ok(vec![CheckOutcome::at_most(
        "free path: lambda0, lambda1 vs 2-2cos(pi j/N), N = 3..401",
        worst,
        limits.value(1e-12),
    )])
}

fn interlacing_suite(limits: &Limits) -> Result<Vec<CheckOutcome>> {
    let mut dirichlet: f64 = 0.0;
    let mut invariance: f64 = 0.0;
    for k in [100, 1000, 10000] {
        let exact = exact_unweighted_eigenvalue(1, 2 * k + 1)?;
        for u in [0.1, 1.0, 10.0, 1000.0] {
            let spec = PathSpec::unit(k, u)?;
            let op = assemble(&spec);
            let s = smallest_eigenvalues(&op, 2, limits.tol_for(&spec))?;
            let l1 = s.pairs[1].value;
            invariance = invariance.max((l1 - exact).abs());
            if u <= 10.0 {
                dirichlet = dirichlet.max((l1 - dirichlet_ground_value(&spec)?).abs());
            }
        }
    }
    Ok(vec![
        CheckOutcome::at_most("lambda1 independent of u (unit weights)", invariance, limits.value(1e-10)),
        CheckOutcome::at_most("lambda1 equals Dirichlet restriction mu0", dirichlet, limits.value(1e-10)),
    ])
}

fn recurrence_suite(limits: &Limits) -> Result<Vec<CheckOutcome>> {
    let mut interior: f64 = 0.0;
    let mut closed_form: f64 = 0.0;
    for k in [50, 200] {
        for u in [0.5, 1.0, 5.0] {
            let spec = PathSpec::unit(k, u)?;
            let op = assemble(&spec);
            let s = smallest_eigenvalues(&op, 2, limits.tol_for(&spec))?;
            let ground = s.ground();
            interior = recurrence_residuals(&spec, ground)?
                .into_iter()
                .fold(interior, |m, r| m.max(r.abs()));

            let v = ground.vector.as_ref().expect("vector");
            let c = spec.center();
            let lam = refine_eigenvalue(&op, ground).0;
            let model = closed_form_coefficients(v[c], v[c + 1], &characteristic_roots(lam)?)?;
            let forward = propagate_recurrence(v[c], v[c + 1], lam, k - 1);
            for (n, f) in forward.iter().enumerate().skip(1) {
                let cf = model.evaluate(n).expect("alpha filled");
                closed_form = closed_form.max((cf - f).abs() / n as f64);
            }
        }
    }
    Ok(vec![
        CheckOutcome::at_most("recurrence: interior eigenvector residual", interior, limits.value(1e-10)),
        CheckOutcome::at_most("recurrence: closed form vs propagation, per n", closed_form, 1e-9),
    ])
}

fn scaling_suite(opts: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    let grid = &opts.k_grid;
    let free = sweep(&Family::unit(0.0), grid, opts.tol, false)?;
    let pot = sweep(&Family::unit(1.0), grid, opts.tol, false)?;
    let decay = sweep(&Family::new(WeightProfile::power_law(1.0, 2.0)?, 0.0), grid, opts.tol, false)?;
    let label = |f: &Family| f.describe();

    let mut out = Vec::new();

    let free_gap = ScalingSeries::from_summaries(Quantity::GapTimesN2, &free, label(&Family::unit(0.0)))?;
    let est = estimate_limit(&free_gap)?;
    let pi2 = std::f64::consts::PI.powi(2);
    out.push(CheckOutcome::at_most("free gap: |N^2 gap limit - pi^2|", (est.limit - pi2).abs(), 1e-6));

    let gap = ScalingSeries::from_summaries(Quantity::GapTimesN2, &pot, label(&Family::unit(1.0)))?;
    let v = gap.values();
    let tail_decreasing = v[v.len().saturating_sub(5)..].windows(2).all(|w| w[1] < w[0]);
    out.push(CheckOutcome::holds("u=1: N^2 gap decreasing over the last 5 sizes", tail_decreasing));
    out.push(CheckOutcome::at_most("u=1: N^2 gap last/first", v[v.len() - 1] / v[0], 0.5));
    out.push(CheckOutcome::holds(
        "u=1: N^2 gap trend is DecreasesTowardZero",
        estimate_limit(&gap)?.trend == Trend::DecreasesTowardZero,
    ));
    let below_free = pot.iter().zip(&free).all(|(p, f)| p.n2gap < f.n2gap);
    out.push(CheckOutcome::holds("u=1: N^2 gap below the free reference at every N", below_free));

    let lam0 = ScalingSeries::from_summaries(Quantity::Lambda0TimesN2, &pot, "")?;
    let floor = lam0.values().into_iter().fold(f64::INFINITY, f64::min);
    out.push(CheckOutcome::at_least("u=1: min N^2 lambda0", floor, 1.0));

    let center = ScalingSeries::from_summaries(Quantity::CenterValueTimesN, &pot, "")?;
    let c = center.values();
    out.push(CheckOutcome::at_most("u=1: N u0(0) last/first", c[c.len() - 1] / c[0], 0.5));

    let raw_gap = ScalingSeries::from_summaries(Quantity::Gap, &pot, "")?;
    let fit = fit_exponent(&raw_gap, (401, 20001))?;
    out.push(CheckOutcome::at_least("u=1: fitted gap exponent (conjectured ~3, soft)", fit.exponent, 2.7).soft());
    out.push(CheckOutcome::at_most("u=1: fitted gap exponent upper end (soft)", fit.exponent, 3.2).soft());

    let decay_gap = ScalingSeries::from_summaries(Quantity::Gap, &decay, "")?;
    let fit = fit_exponent(&decay_gap, (401, 20001))?;
    out.push(CheckOutcome::at_least("power law mu=2: fitted gap exponent", fit.exponent, 2.5));

    let mut bound_ok = true;
    for row in &decay {
        let spec = PathSpec::new(row.k, WeightProfile::power_law(1.0, 2.0)?, 0.0)?;
        let rq = rayleigh_quotient(&spec, &test_vector_family(row.k, TestVector::Antisymmetric)?)?;
        bound_ok &= rq >= row.lambda1;
    }
    out.push(CheckOutcome::holds("power law mu=2: test-vector quotient bounds lambda1", bound_ok));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decade_grid_hits_the_reference_sizes() {
        let g = decade_k_grid();
        assert_eq!(g.first(), Some(&100));
        assert_eq!(g.last(), Some(&10000));
        assert!(g.contains(&1000));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn random_instances_are_reproducible() {
        let a: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            (0..5).map(|_| random_instance(&mut rng, 20)).collect()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b: Vec<_> = (0..5).map(|_| random_instance(&mut rng, 20)).collect();
        assert_eq!(a, b);
    }
}
