use std::f64::consts::PI;

use rayon::prelude::*;

use gapscope::asymptotics::{summarize, InstanceSummary, Quantity};
use gapscope::checks::{run_all, VerifyOptions};
use gapscope::theory::check_ground_state_structure;
use gapscope::{assemble, default_tol, estimate_limit, fit_exponent, smallest_eigenvalues, PathSpec, ScalingSeries};

use crate::config::{quantity_name, Experiment, ExperimentConfig, WeightsSpec};
use crate::plot::{log_log_svg, Curve};
use crate::table::{Cell, Table};
use crate::CliError;

/// What an experiment produced: a table for `out` plus lines for the terminal.
pub struct Report {
    pub table: Table,
    pub notes: Vec<String>,
    pub svg: Option<String>,
    pub verify_failed: bool,
}

impl Report {
    fn table(table: Table) -> Self {
        Report { table, notes: Vec::new(), svg: None, verify_failed: false }
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    match cfg.experiment {
        Experiment::Spectrum => run_spectrum(cfg),
        Experiment::GapScaling => run_gap_scaling(cfg),
        Experiment::FitExponent => run_fit_exponent(cfg),
        Experiment::GroundState => run_ground_state(cfg),
        Experiment::Verify => run_verify(cfg),
    }
}

fn grid(cfg: &ExperimentConfig, required: bool) -> Result<Vec<usize>, CliError> {
    if let Some(g) = &cfg.k_grid {
        return Ok(g.clone());
    }
    if let WeightsSpec::Explicit { values, .. } = &cfg.weights {
        return Ok(vec![values.len()]);
    }
    if required {
        return Err(CliError::Usage("key `k` or `k_grid` is required for this experiment".into()));
    }
    Ok(cfg.grid_or_default())
}

fn instances(cfg: &ExperimentConfig, grid: &[usize], u: f64) -> Result<Vec<PathSpec>, CliError> {
    grid.iter()
        .map(|&k| PathSpec::new(k, cfg.profile(k)?, u).map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn summaries(cfg: &ExperimentConfig, specs: &[PathSpec], with_dirichlet: bool) -> Result<Vec<InstanceSummary>, CliError> {
    specs
        .par_iter()
        .map(|spec| {
            summarize(spec, cfg.tol, with_dirichlet)
                .map_err(|e| CliError::from_core(gapscope::Error::AtInstance { k: spec.k(), source: Box::new(e) }))
        })
        .collect()
}

const GAP_COLUMNS: &[&str] = &["N", "k", "u", "weights", "lambda0", "lambda1", "gap", "n2gap", "n_u0_center"];

fn gap_row(s: &InstanceSummary) -> Vec<Cell> {
    vec![
        s.n.into(),
        s.k.into(),
        s.u.into(),
        s.weights.as_str().into(),
        s.lambda0.into(),
        s.lambda1.into(),
        s.gap.into(),
        s.n2gap.into(),
        s.n_u0_center.into(),
    ]
}

fn run_spectrum(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let specs = instances(cfg, &grid(cfg, true)?, cfg.u)?;
    let rows = summaries(cfg, &specs, false)?;
    let mut table = Table::new(&["N", "k", "u", "weights", "lambda0", "lambda1", "gap", "residual0", "residual1"]);
    for s in &rows {
        table.push(vec![
            s.n.into(),
            s.k.into(),
            s.u.into(),
            s.weights.as_str().into(),
            s.lambda0.into(),
            s.lambda1.into(),
            s.gap.into(),
            s.residual0.into(),
            s.residual1.into(),
        ]);
    }
    Ok(Report::table(table))
}

fn run_gap_scaling(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let grid = grid(cfg, false)?;
    if grid.len() < 5 {
        return Err(CliError::Usage(format!("key `k_grid`: GapScaling needs at least 5 sizes, got {}", grid.len())));
    }
    let rows = summaries(cfg, &instances(cfg, &grid, cfg.u)?, false)?;
    let mut table = Table::new(GAP_COLUMNS);
    rows.iter().for_each(|s| table.push(gap_row(s)));

    let label = format!("{} u={}", rows[0].weights, cfg.u);
    let series = ScalingSeries::from_summaries(Quantity::GapTimesN2, &rows, label.clone()).map_err(CliError::from_core)?;
    let mut notes = Vec::new();
    if let Ok(est) = estimate_limit(&series) {
        notes.push(format!("N^2 gap: last = {:.6e}, extrapolated limit = {:.6e}, trend = {:?}", series.points.last().unwrap().1, est.limit, est.trend));
    }

    let svg = match &cfg.plot {
        None => None,
        Some(_) => {
            let reference = if cfg.u == 0.0 { rows.clone() } else { summaries(cfg, &instances(cfg, &grid, 0.0)?, false)? };
            let curve = |rows: &[InstanceSummary], label: String| Curve {
                label,
                points: rows.iter().map(|s| (s.n as f64, s.n2gap)).collect(),
            };
            let curves = [curve(&reference, format!("{} u=0", rows[0].weights)), curve(&rows, label)];
            Some(log_log_svg("N^2 * spectral gap", "N", "N^2 gap", &curves, &[(PI * PI, "pi^2")]))
        }
    };
    Ok(Report { table, notes, svg, verify_failed: false })
}

fn run_fit_exponent(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let grid = grid(cfg, false)?;
    let with_dirichlet = cfg.quantity == Quantity::DirichletMu0TimesN2;
    let specs = instances(cfg, &grid, cfg.u)?;
    let rows = summaries(cfg, &specs, with_dirichlet)?;
    let family = format!("{} u={}", rows[0].weights, cfg.u);
    let series = ScalingSeries::from_summaries(cfg.quantity, &rows, family.clone()).map_err(CliError::from_core)?;
    let window = cfg.fit_window.unwrap_or((rows[0].n, rows[rows.len() - 1].n));
    let fit = fit_exponent(&series, window).map_err(CliError::from_core)?;

    let mut table = Table::new(&["quantity", "family", "exponent", "intercept", "rms_residual", "n_min", "n_max", "points"]);
    table.push(vec![
        quantity_name(cfg.quantity).into(),
        family.into(),
        fit.exponent.into(),
        fit.intercept.into(),
        fit.rms_residual.into(),
        fit.window.0.into(),
        fit.window.1.into(),
        fit.points.into(),
    ]);
    Ok(Report::table(table))
}

fn run_ground_state(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let specs = instances(cfg, &grid(cfg, true)?, cfg.u)?;
    let rows: Vec<Vec<Cell>> = specs
        .par_iter()
        .map(|spec| {
            let op = assemble(spec);
            let tol = cfg.tol.unwrap_or_else(|| default_tol(&op));
            let report = smallest_eigenvalues(&op, 1, tol)
                .and_then(|s| check_ground_state_structure(spec, s.ground()).map(|r| (s.ground().value, r)))
                .map_err(|e| CliError::from_core(gapscope::Error::AtInstance { k: spec.k(), source: Box::new(e) }))?;
            let (lambda0, r) = report;
            Ok(vec![
                spec.n().into(),
                spec.k().into(),
                spec.u().into(),
                spec.weights().label().into(),
                lambda0.into(),
                r.positive.into(),
                r.symmetric_defect.into(),
                r.monotone_defect.into(),
                r.center_value.into(),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = Table::new(&[
        "N",
        "k",
        "u",
        "weights",
        "lambda0",
        "positive",
        "symmetric_defect",
        "monotone_defect",
        "center_value",
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Report::table(table))
}

fn run_verify(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let mut opts = VerifyOptions { tol: cfg.tol, ..VerifyOptions::default() };
    if let Some(seed) = cfg.seed {
        opts.seed = seed;
    }
    if let Some(n) = cfg.oracle_instances {
        opts.oracle_instances = n;
    }
    if let Some(n) = cfg.structure_instances {
        opts.structure_instances = n;
    }
    if let Some(g) = &cfg.k_grid {
        opts.k_grid = g.clone();
    }
    let outcomes = run_all(&opts);

    let mut table = Table::new(&["check", "passed", "soft", "measured", "threshold"]);
    let mut notes = Vec::new();
    for c in &outcomes {
        let tag = match (c.passed, c.soft) {
            (true, _) => "PASS",
            (false, true) => "WARN",
            (false, false) => "FAIL",
        };
        notes.push(format!("[{tag}] {}: measured = {:.3e}, threshold = {:.3e}", c.name, c.measured, c.threshold));
        table.push(vec![c.name.as_str().into(), c.passed.into(), c.soft.into(), c.measured.into(), c.threshold.into()]);
    }
    let failed = outcomes.iter().filter(|c| !c.passed && !c.soft).count();
    notes.push(format!("{} checks, {} failed", outcomes.len(), failed));
    Ok(Report { table, notes, svg: None, verify_failed: failed > 0 })
}
