//! Acceptance criteria. Run with
//!
//! ```text
//! cargo test -p gapscope --test acceptance -- --nocapture
//! ```
//!
//! to see one PASS/FAIL line per criterion. Expected values come from closed
//! forms, the dense Jacobi oracle, or are computed here from first principles.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use gapscope::asymptotics::{default_k_grid, fit_exponent, sweep, InstanceSummary, Quantity, ScalingSeries};
use gapscope::eigensolve::{default_tol, dense_oracle_spectrum, refine_eigenvalue, smallest_eigenvalues};
use gapscope::theory::{
    characteristic_roots, check_ground_state_structure, closed_form_coefficients, dirichlet_restriction,
    propagate_recurrence, rayleigh_quotient, test_vector_family, TestVector,
};
use gapscope::{assemble, Family, PathSpec, WeightProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    id: usize,
    title: &'static str,
    passed: bool,
    soft: bool,
    detail: String,
}

fn free_lambda1(n: usize) -> f64 {
    2.0 - 2.0 * (PI / n as f64).cos()
}

/// k = 100·10^{j/6}: N from 201 to 20001 with six sizes per decade.
fn decade_grid() -> Vec<usize> {
    (0..=12).map(|j| (100.0 * 10f64.powf(j as f64 / 6.0)).round() as usize).collect()
}

fn lambda_pair(spec: &PathSpec) -> (f64, f64) {
    let op = assemble(spec);
    let s = smallest_eigenvalues(&op, 2, default_tol(&op)).unwrap();
    (s.pairs[0].value, s.pairs[1].value)
}

fn by_n(rows: &[InstanceSummary], n: usize) -> &InstanceSummary {
    rows.iter().find(|r| r.n == n).unwrap_or_else(|| panic!("N = {n} missing from sweep"))
}

fn criterion_1() -> Verdict {
    let mut worst: f64 = 0.0;
    for k in default_k_grid() {
        let spec = PathSpec::unit(k, 0.0).unwrap();
        worst = worst.max((lambda_pair(&spec).1 - free_lambda1(spec.n())).abs());
    }
    let row = &sweep(&Family::unit(0.0), &[5000], None, false).unwrap()[0];
    let dev = (row.n2gap - PI * PI).abs();
    Verdict {
        id: 1,
        title: "free-gap limit N^2 gap -> pi^2",
        passed: worst <= 1e-12 && dev <= 1e-5,
        soft: false,
        detail: format!("max|lambda1 - 2-2cos(pi/N)| = {worst:.2e} (<= 1e-12); |N^2 gap - pi^2| at N=10001 = {dev:.2e} (<= 1e-5)"),
    }
}

fn criterion_2() -> Verdict {
    let mut formula: f64 = 0.0;
    let mut dirichlet: f64 = 0.0;
    for k in [100, 1000, 10000] {
        let n = 2 * k + 1;
        let dop = dirichlet_restriction(&PathSpec::unit(k, 0.0).unwrap());
        let mu0 = smallest_eigenvalues(&dop, 1, default_tol(&dop)).unwrap().pairs[0].value;
        for u in [0.1, 1.0, 10.0, 1000.0] {
            let l1 = lambda_pair(&PathSpec::unit(k, u).unwrap()).1;
            formula = formula.max((l1 - free_lambda1(n)).abs());
            dirichlet = dirichlet.max((l1 - mu0).abs());
        }
    }
    Verdict {
        id: 2,
        title: "lambda1 invariant under u",
        passed: formula <= 1e-10 && dirichlet <= 1e-10,
        soft: false,
        detail: format!("max|lambda1 - 2-2cos(pi/N)| = {formula:.2e}; max|lambda1 - mu0| = {dirichlet:.2e} (both <= 1e-10)"),
    }
}

struct PotentialSweep {
    rows: Vec<InstanceSummary>,
}

fn criterion_3(sw: &PotentialSweep) -> Verdict {
    let v: Vec<f64> = sw.rows.iter().map(|r| r.n2gap).collect();
    let decreasing = v[v.len() - 5..].windows(2).all(|w| w[1] < w[0]);
    let ratio = by_n(&sw.rows, 20001).n2gap / by_n(&sw.rows, 201).n2gap;
    Verdict {
        id: 3,
        title: "gap closes faster with potential (u = 1)",
        passed: decreasing && ratio <= 0.5,
        soft: false,
        detail: format!("tail decreasing = {decreasing}; N^2 gap(20001)/N^2 gap(201) = {ratio:.4} (<= 0.5)"),
    }
}

fn criterion_4(sw: &PotentialSweep) -> Verdict {
    let series = ScalingSeries::from_summaries(Quantity::Gap, &sw.rows, "unit u=1").unwrap();
    let fit = fit_exponent(&series, (401, 20001)).unwrap();
    Verdict {
        id: 4,
        title: "conjectured gap rate ~N^-3 (soft)",
        passed: (2.7..=3.2).contains(&fit.exponent) && fit.rms_residual < 0.05,
        soft: true,
        detail: format!(
            "exponent = {:.4} in [2.7, 3.2], rms = {:.2e} (< 0.05) over N in [{}, {}]",
            fit.exponent, fit.rms_residual, fit.window.0, fit.window.1
        ),
    }
}

fn criterion_5(sw: &PotentialSweep) -> Verdict {
    let floor = sw
        .rows
        .iter()
        .map(|r| (r.n * r.n) as f64 * r.lambda0)
        .fold(f64::INFINITY, f64::min);
    Verdict {
        id: 5,
        title: "ground-state lower bound N^2 lambda0 >= c",
        passed: floor >= 1.0,
        soft: false,
        detail: format!("min N^2 lambda0 = {floor:.4} (>= 1.0)"),
    }
}

fn criterion_6(sw: &PotentialSweep) -> Verdict {
    let c: Vec<f64> = sw.rows.iter().map(|r| r.n_u0_center).collect();
    let decreasing = c[c.len() - 5..].windows(2).all(|w| w[1] < w[0]);
    let ratio = by_n(&sw.rows, 20001).n_u0_center / by_n(&sw.rows, 201).n_u0_center;
    Verdict {
        id: 6,
        title: "center decay N u0(0) -> 0",
        passed: decreasing && ratio <= 0.5,
        soft: false,
        detail: format!("tail decreasing = {decreasing}; ratio 20001/201 = {ratio:.4} (<= 0.5)"),
    }
}

fn random_spec(rng: &mut ChaCha8Rng, max_k: usize) -> PathSpec {
    let k = rng.gen_range(1..=max_k);
    let u = rng.gen_range(0.0..=10.0);
    let weights = match rng.gen_range(0..3) {
        0 => WeightProfile::Unit,
        1 => WeightProfile::power_law(rng.gen_range(0.2..3.0), rng.gen_range(1.05..3.0)).unwrap(),
        _ => WeightProfile::explicit((0..k).map(|_| rng.gen_range(0.05..3.0)).collect(), k).unwrap(),
    };
    PathSpec::new(k, weights, u).unwrap()
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_707);
    let (mut positive, mut min_gap) = (true, f64::INFINITY);
    let (mut sym, mut mono): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let spec = random_spec(&mut rng, 200);
        let op = assemble(&spec);
        let s = smallest_eigenvalues(&op, 2, default_tol(&op)).unwrap();
        let r = check_ground_state_structure(&spec, s.ground()).unwrap();
        positive &= r.positive;
        sym = sym.max(r.symmetric_defect);
        mono = mono.max(r.monotone_defect);
        let gap = refine_eigenvalue(&op, &s.pairs[1]).0 - refine_eigenvalue(&op, &s.pairs[0]).0;
        min_gap = min_gap.min(gap);
    }
    Verdict {
        id: 7,
        title: "ground-state structure on random instances",
        passed: positive && sym <= 1e-10 && mono <= 1e-12 && min_gap > 0.0,
        soft: false,
        detail: format!(
            "positive = {positive}; symmetry defect = {sym:.2e} (<= 1e-10); monotone defect = {mono:.2e} (<= 1e-12); min gap = {min_gap:.2e} (> 0)"
        ),
    }
}

fn criterion_8() -> Verdict {
    let mut residual: f64 = 0.0;
    let mut closed: f64 = 0.0;
    for k in [50, 200] {
        let spec = PathSpec::unit(k, 1.0).unwrap();
        let op = assemble(&spec);
        let s = smallest_eigenvalues(&op, 2, default_tol(&op)).unwrap();
        let v = s.ground().vector.as_ref().unwrap();
        let c = spec.center();
        let lam = s.ground().value;
        for n in 2..k {
            let r = v[c + n] - (2.0 - lam) * v[c + n - 1] + v[c + n - 2];
            residual = residual.max(r.abs());
        }
        let model = closed_form_coefficients(v[c], v[c + 1], &characteristic_roots(lam).unwrap()).unwrap();
        let forward = propagate_recurrence(v[c], v[c + 1], lam, k - 1);
        for (n, f) in forward.iter().enumerate().skip(1) {
            closed = closed.max((model.evaluate(n).unwrap() - f).abs() / n as f64);
        }
    }
    Verdict {
        id: 8,
        title: "recurrence and closed form",
        passed: residual <= 1e-10 && closed <= 1e-9,
        soft: false,
        detail: format!("interior residual = {residual:.2e} (<= 1e-10); max |closed - forward|/n = {closed:.2e} (<= 1e-9)"),
    }
}

fn criterion_9() -> Verdict {
    let weights = WeightProfile::power_law(1.0, 2.0).unwrap();
    let rows = sweep(&Family::new(weights.clone(), 0.0), &decade_grid(), None, false).unwrap();
    let series = ScalingSeries::from_summaries(Quantity::Gap, &rows, "powerlaw").unwrap();
    let fit = fit_exponent(&series, (401, 20001)).unwrap();
    let mut bounds = true;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for row in &rows {
        let spec = PathSpec::new(row.k, weights.clone(), 0.0).unwrap();
        let rq = rayleigh_quotient(&spec, &test_vector_family(row.k, TestVector::Antisymmetric).unwrap()).unwrap();
        bounds &= rq >= row.lambda1;
        let scaled = rq * (row.k as f64).powi(3);
        lo = lo.min(scaled);
        hi = hi.max(scaled);
    }
    Verdict {
        id: 9,
        title: "decaying weights: gap <= B N^-(2+eps)",
        passed: fit.exponent >= 2.5 && bounds && lo >= 1.0 && hi <= 20.0,
        soft: false,
        detail: format!(
            "exponent = {:.4} (>= 2.5); RQ >= lambda1 at every k = {bounds}; RQ*k^3 in [{lo:.3}, {hi:.3}] (within [1, 20])",
            fit.exponent
        ),
    }
}

fn criterion_10() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0_7ac1e);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let spec = random_spec(&mut rng, 100);
        let op = assemble(&spec);
        let fast = smallest_eigenvalues(&op, 2, default_tol(&op)).unwrap();
        let dense = dense_oracle_spectrum(&op).unwrap();
        for i in 0..2 {
            worst = worst.max((fast.pairs[i].value - dense.pairs[i].value).abs());
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        id: 10,
        title: "bisection vs dense Jacobi oracle",
        passed: worst <= 1e-10 && elapsed < Duration::from_secs(60),
        soft: false,
        detail: format!("max deviation = {worst:.2e} (<= 1e-10) over 200 instances in {:.2?} (< 60 s)", elapsed),
    }
}

#[test]
fn acceptance_criteria() {
    let potential = PotentialSweep { rows: sweep(&Family::unit(1.0), &decade_grid(), None, false).unwrap() };
    let verdicts = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(&potential),
        criterion_4(&potential),
        criterion_5(&potential),
        criterion_6(&potential),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];
    for v in &verdicts {
        let tag = match (v.passed, v.soft) {
            (true, _) => "PASS",
            (false, true) => "SOFT-FAIL",
            (false, false) => "FAIL",
        };
        println!("[{tag:>9}] criterion {:>2}: {} -- {}", v.id, v.title, v.detail);
    }
    let hard_failures: Vec<usize> = verdicts.iter().filter(|v| !v.passed && !v.soft).map(|v| v.id).collect();
    assert!(hard_failures.is_empty(), "failed acceptance criteria: {hard_failures:?}");
}
