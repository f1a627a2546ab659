//! One function per subcommand, each producing a [`Table`].

use std::collections::HashMap;
use std::fs;

use lr_horizon::analysis::{self, FitModel, LogBase};
use lr_horizon::bounds::{analytic_bound, free_particle_envelope, BoundPrefactor, ExactSumBound};
use lr_horizon::dynamics::{ising_exact_oracle, state_transfer_protocol, trajectory, AmplitudeState};
use lr_horizon::kernels::{lambda_upper_bound, row_sum, self_hop_lambda};
use lr_horizon::lattice::{Boundary, CouplingModel, LatticeSpec};
use lr_horizon::signaling::{
    exact_sum_signaling_time, initial_step, ising_signaling_time, scrambling_time_bound, signaling_time_analytic,
    signaling_time_numeric, SignalingSpec,
};
use rayon::prelude::*;
use rayon::ThreadPoolBuilder;

use crate::config::SweepConfig;
use crate::error::CliError;
use crate::grid::{resolve_separations, resolve_times};
use crate::output::{csv_records, header_comment, Cell, PlotPoint, Table};

type CliResult<T> = Result<T, CliError>;

/// Map `f` over `items` on a pool of `workers` threads, keeping input order.
fn par_map<T, R, F>(workers: usize, items: &[T], f: F) -> CliResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> CliResult<R> + Sync + Send,
{
    let pool = ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Solver(format!("cannot start worker pool: {e}")))?;
    let results: Vec<CliResult<R>> = pool.install(|| items.par_iter().map(&f).collect());
    results.into_iter().collect()
}

/// Every `(alpha, N)` pair, alpha-major.
fn cells(cfg: &SweepConfig) -> CliResult<Vec<(f64, usize)>> {
    let alphas = cfg.require_alpha()?;
    let ns = cfg.require_n()?;
    Ok(alphas.iter().flat_map(|&a| ns.iter().map(move |&n| (a, n))).collect())
}

pub fn build_lattice(n: usize, d: usize, boundary: &str) -> CliResult<LatticeSpec> {
    let boundary = match boundary {
        "open" => Boundary::Open,
        _ => Boundary::Periodic,
    };
    let side = (n as f64).powf(1.0 / d as f64).round() as usize;
    if side.checked_pow(d as u32) != Some(n) {
        return Err(CliError::Input(format!("N = {n} is not a perfect {d}-dimensional hypercube")));
    }
    Ok(LatticeSpec::new(d, side, boundary)?)
}

fn lattice_for(cfg: &SweepConfig, n: usize) -> CliResult<LatticeSpec> {
    build_lattice(n, cfg.dimension, &cfg.boundary)
}

/// Largest integer separation a token may resolve to.
fn max_separation(lattice: &LatticeSpec) -> usize {
    if lattice.dimension() == 1 {
        match lattice.boundary() {
            Boundary::Periodic => lattice.site_count() / 2,
            Boundary::Open => lattice.site_count() - 1,
        }
    } else {
        lattice.max_distance().floor() as usize
    }
}

fn require_ring(cfg: &SweepConfig, what: &str) -> CliResult<()> {
    if cfg.dimension != 1 || cfg.boundary != "periodic" {
        return Err(CliError::Input(format!("{what} is defined only on 1D periodic rings")));
    }
    Ok(())
}

pub fn lambda(cfg: &SweepConfig) -> CliResult<Table> {
    let grid = cells(cfg)?;
    let rows = par_map(cfg.workers, &grid, |&(alpha, n)| {
        let lattice = lattice_for(cfg, n)?;
        let model = CouplingModel::new(alpha)?;
        let lambda = self_hop_lambda(&lattice, &model).lambda;
        let upper = lambda_upper_bound(cfg.dimension, alpha, lattice.linear_size()).ok();
        Ok((alpha, n, lambda, upper))
    })?;
    let mut table = Table::new(vec!["D", "alpha", "N", "lambda", "lambda_upper_bound"], "self-hop-row-sum");
    for (alpha, n, lambda, upper) in rows {
        table.push(vec![cfg.dimension.into(), alpha.into(), n.into(), lambda.into(), upper.into()]);
        table.plot.push(PlotPoint { series: format!("D={} alpha={alpha}", cfg.dimension), x: n as f64, y: lambda });
    }
    Ok(table)
}

pub fn bound(cfg: &SweepConfig) -> CliResult<Table> {
    let method = cfg.method.clone().unwrap_or_else(|| "exact_sum".into());
    let tag = match method.as_str() {
        "analytic" => "analytic-kernel",
        "exact_sum" => {
            require_ring(cfg, "exact_sum")?;
            "exact-sum-fourier"
        }
        "free_particle" => "free-particle-envelope",
        other => return Err(CliError::Input(format!("unknown bound method {other:?}"))),
    };
    if cfg.t.is_empty() {
        return Err(CliError::Input("--t is required".into()));
    }
    let r_tokens = if cfg.r.is_empty() { vec!["1".to_string()] } else { cfg.r.clone() };
    let grid = cells(cfg)?;
    let pre = BoundPrefactor::default();
    let blocks = par_map(cfg.workers, &grid, |&(alpha, n)| {
        let lattice = lattice_for(cfg, n)?;
        let model = CouplingModel::new(alpha)?;
        let seps = resolve_separations(&r_tokens, n, max_separation(&lattice))?;
        let mut out = Vec::new();
        match method.as_str() {
            "exact_sum" => {
                let exact = ExactSumBound::new(n, alpha)?;
                for t in resolve_times(&cfg.t, exact.lambda())? {
                    let profile = exact.profile(t, &pre)?;
                    out.extend(seps.iter().map(|&(r, _)| (alpha, n, r, t, profile[r])));
                }
            }
            "analytic" => {
                let params = self_hop_lambda(&lattice, &model);
                for t in resolve_times(&cfg.t, params.lambda)? {
                    for &(r, _) in &seps {
                        out.push((alpha, n, r, t, analytic_bound(&params, &pre, r as f64, t)?.value));
                    }
                }
            }
            _ => {
                let envelope = free_particle_envelope(&lattice, &model);
                let lambda = self_hop_lambda(&lattice, &model).lambda;
                for t in resolve_times(&cfg.t, lambda)? {
                    out.extend(seps.iter().map(|&(r, _)| (alpha, n, r, t, t * envelope)));
                }
            }
        }
        Ok(out)
    })?;
    let mut table = Table::new(vec!["method", "N", "alpha", "r", "t", "value"], tag);
    for (alpha, n, r, t, value) in blocks.into_iter().flatten() {
        table.push(vec![method.as_str().into(), n.into(), alpha.into(), r.into(), t.into(), value.into()]);
        table.plot.push(PlotPoint {
            series: format!("{method} N={n} alpha={alpha} t={t}"),
            x: r as f64,
            y: value,
        });
    }
    Ok(table)
}

#[derive(Debug, Clone)]
struct SignalRow {
    method: String,
    n: usize,
    alpha: f64,
    r: usize,
    t_star: f64,
    r_spec: String,
}

fn signaling_tag(method: &str) -> CliResult<&'static str> {
    Ok(match method {
        "analytic" => "analytic-closed-form",
        "numeric" => "analytic-bisection",
        "exact_sum" => "exact-sum-fourier-bisection",
        "many_site" => "many-site-pair-sum-bisection",
        "ising" => "ising-ghz-closed-form",
        other => return Err(CliError::Input(format!("unknown signaling method {other:?}"))),
    })
}

fn signaling_rows(cfg: &SweepConfig, method: &str, delta: f64) -> CliResult<Vec<SignalRow>> {
    if method == "exact_sum" {
        require_ring(cfg, "exact_sum")?;
    }
    let r_tokens = if cfg.r.is_empty() { vec!["1".to_string()] } else { cfg.r.clone() };
    let grid = cells(cfg)?;
    let blocks = par_map(cfg.workers, &grid, |&(alpha, n)| {
        let lattice = lattice_for(cfg, n)?;
        let model = CouplingModel::new(alpha)?;
        let row = |r: usize, t_star: f64, r_spec: &str| SignalRow {
            method: method.to_string(),
            n,
            alpha,
            r,
            t_star,
            r_spec: r_spec.to_string(),
        };
        let mut out = Vec::new();
        match method {
            "ising" => {
                let mut t = ising_signaling_time(&lattice, &model, cfg.site, delta)?;
                if cfg.kac {
                    t *= row_sum(&lattice, &model, cfg.site)?;
                }
                out.push(row(n - 1, t, "rest"));
            }
            "many_site" => {
                let spec = SignalingSpec { delta, kac_rescale: cfg.kac, ..SignalingSpec::default() };
                let t = scrambling_time_bound(&lattice, &model, cfg.site, &spec)?;
                out.push(row(n - 1, t.t_star, "rest"));
            }
            _ => {
                let spec = SignalingSpec { delta, kac_rescale: cfg.kac, ..SignalingSpec::default() };
                spec.validate()?;
                let seps = resolve_separations(&r_tokens, n, max_separation(&lattice))?;
                if method == "exact_sum" {
                    let exact = ExactSumBound::new(n, alpha)?;
                    for (r, token) in &seps {
                        out.push(row(*r, exact_sum_signaling_time(&exact, *r, &spec)?.t_star, token));
                    }
                } else {
                    let params = self_hop_lambda(&lattice, &model);
                    for (r, token) in &seps {
                        let t = if method == "analytic" {
                            signaling_time_analytic(&params, &spec, *r as f64)?
                        } else {
                            let st = signaling_time_numeric(
                                |t| Ok(analytic_bound(&params, &spec.prefactor, *r as f64, t)?.value),
                                delta,
                                initial_step(&params),
                            )?;
                            if cfg.kac { st.kac_rescaled(params.lambda) } else { st }
                        };
                        out.push(row(*r, t.t_star, token));
                    }
                }
            }
        }
        Ok(out)
    })?;
    Ok(blocks.into_iter().flatten().collect())
}

fn signaling_delta(cfg: &SweepConfig, method: &str) -> f64 {
    cfg.delta.unwrap_or(if method == "ising" { 0.5 } else { 1.0 })
}

pub fn signaling(cfg: &SweepConfig) -> CliResult<Table> {
    let method = cfg.method.clone().unwrap_or_else(|| "exact_sum".into());
    let tag = signaling_tag(&method)?;
    let delta = signaling_delta(cfg, &method);
    let rows = signaling_rows(cfg, &method, delta)?;
    let mut table = Table::new(vec!["method", "N", "alpha", "r", "delta", "t_star", "r_spec"], tag);
    for row in rows {
        table.plot.push(PlotPoint {
            series: format!("{} alpha={} r={}", row.method, row.alpha, row.r_spec),
            x: row.n as f64,
            y: row.t_star,
        });
        table.push(vec![
            row.method.into(),
            row.n.into(),
            row.alpha.into(),
            row.r.into(),
            delta.into(),
            row.t_star.into(),
            row.r_spec.into(),
        ]);
    }
    Ok(table)
}

fn read_signaling_table(cfg: &SweepConfig) -> CliResult<Vec<SignalRow>> {
    let path = cfg.input.as_ref().expect("caller checked");
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let (header, rows) = crate::output::read_csv(&text)?;
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Input(format!("input table has no {name} column")))
    };
    let (c_n, c_alpha, c_t) = (col("N")?, col("alpha")?, col("t_star")?);
    let c_method = col("method").ok();
    let c_r = col("r").ok();
    let c_spec = col("r_spec").ok();
    let num = |s: &str| -> CliResult<f64> {
        s.parse().map_err(|_| CliError::Input(format!("cannot parse number {s:?} in input table")))
    };
    rows.iter()
        .map(|row| {
            let n = num(&row[c_n])?;
            Ok(SignalRow {
                method: c_method.map(|c| row[c].clone()).unwrap_or_else(|| "input".into()),
                n: n as usize,
                alpha: num(&row[c_alpha])?,
                r: c_r.map(|c| num(&row[c])).transpose()?.unwrap_or(0.0) as usize,
                t_star: num(&row[c_t])?,
                r_spec: c_spec.or(c_r).map(|c| row[c].clone()).unwrap_or_default(),
            })
        })
        .collect()
}

pub fn fit(cfg: &SweepConfig) -> CliResult<Table> {
    let base = LogBase::parse(&cfg.log_base)
        .ok_or_else(|| CliError::Input(format!("log base must be e, 2 or 10, got {:?}", cfg.log_base)))?;
    let models: Vec<FitModel> = if cfg.model.is_empty() {
        vec![FitModel::PowerLog]
    } else {
        cfg.model
            .iter()
            .map(|m| FitModel::parse(m).ok_or_else(|| CliError::Input(format!("unknown fit model {m:?}"))))
            .collect::<CliResult<_>>()?
    };
    let rows = match &cfg.input {
        Some(_) => read_signaling_table(cfg)?,
        None => {
            let method = cfg.method.clone().unwrap_or_else(|| "exact_sum".into());
            signaling_tag(&method)?;
            signaling_rows(cfg, &method, signaling_delta(cfg, &method))?
        }
    };

    // groups in order of first appearance
    let mut order: Vec<(String, u64, String)> = Vec::new();
    let mut groups: HashMap<(String, u64, String), Vec<(f64, f64)>> = HashMap::new();
    for row in &rows {
        let key = (row.method.clone(), row.alpha.to_bits(), row.r_spec.clone());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push((row.n as f64, row.t_star));
    }

    let mut table = Table::new(
        vec![
            "alpha", "r", "method", "model", "log_base", "n_points", "a", "exponent", "c", "a_se", "exponent_se",
            "c_se", "a_ci95", "exponent_ci95", "c_ci95", "residual_rms", "condition_number", "warning",
        ],
        "ols-log-linearized",
    );
    for key in &order {
        let points = &groups[key];
        let alpha = f64::from_bits(key.1);
        for &model in &models {
            let f = analysis::fit(model, points, base)?;
            let third = |v: &[f64]| -> Cell { v.get(2).copied().into() };
            table.push(vec![
                alpha.into(),
                key.2.as_str().into(),
                key.0.as_str().into(),
                model.name().into(),
                f.log_base.name().into(),
                f.n_points.into(),
                f.coefficients[0].into(),
                f.coefficients[1].into(),
                third(&f.coefficients),
                f.standard_errors[0].into(),
                f.standard_errors[1].into(),
                third(&f.standard_errors),
                f.ci95[0].into(),
                f.ci95[1].into(),
                third(&f.ci95),
                f.residual_rms.into(),
                f.condition_number.into(),
                f.warning.clone().into(),
            ]);
            let series = format!("{} alpha={alpha} r={}", key.0, key.2);
            for &(n, t) in points {
                table.plot.push(PlotPoint { series: format!("{series} data"), x: n, y: t });
                table.plot.push(PlotPoint { series: format!("{series} {}", model.name()), x: n, y: f.predict(n) });
            }
        }
    }
    Ok(table)
}

pub fn protocol(cfg: &SweepConfig) -> CliResult<Table> {
    let grid = cells(cfg)?;
    let want_trajectory = cfg.trajectory.is_some();
    let steps = cfg.steps;
    let d = cfg.dimension;
    let results = par_map(cfg.workers, &grid, |&(alpha, n)| {
        let report = state_transfer_protocol(n, alpha, d)?;
        let traj = if want_trajectory {
            let sched = &report.schedule;
            let times: Vec<f64> = (0..=steps).map(|k| sched.total_time * k as f64 / steps as f64).collect();
            trajectory(&sched.hamiltonian, &AmplitudeState::basis(n, sched.source)?, &times)?
        } else {
            Vec::new()
        };
        Ok((alpha, n, report, traj))
    })?;
    let mut table = Table::new(
        vec!["N", "alpha", "D", "T", "fidelity", "amplitude", "bound", "ratio"],
        "single-excitation-exact-evolution",
    );
    let mut traj_rows: Vec<Vec<Cell>> = Vec::new();
    for (alpha, n, report, traj) in results {
        let t = report.schedule.total_time;
        table.push(vec![
            n.into(),
            alpha.into(),
            d.into(),
            t.into(),
            report.fidelity.into(),
            report.amplitude.into(),
            report.bound.into(),
            report.ratio.into(),
        ]);
        table.plot.push(PlotPoint { series: format!("alpha={alpha} D={d}"), x: n as f64, y: t });
        traj_rows.extend(
            traj.into_iter()
                .map(|p| vec![n.into(), alpha.into(), p.time.into(), p.site.into(), p.probability.into()]),
        );
    }
    if let Some(path) = &cfg.trajectory {
        let mut text = header_comment(&cfg.hash(), "single-excitation-trajectory");
        text.push_str(&csv_records(&["N", "alpha", "time", "site", "probability"], &traj_rows));
        crate::output::emit(Some(path), &text)?;
    }
    Ok(table)
}

pub fn ising_oracle(cfg: &SweepConfig) -> CliResult<Table> {
    if cfg.t.is_empty() {
        return Err(CliError::Input("--t is required".into()));
    }
    let grid = cells(cfg)?;
    let blocks = par_map(cfg.workers, &grid, |&(alpha, n)| {
        let lattice = lattice_for(cfg, n)?;
        let model = CouplingModel::new(alpha)?;
        let lambda_i = row_sum(&lattice, &model, cfg.site)?;
        let mut out = Vec::new();
        for t in resolve_times(&cfg.t, lambda_i)? {
            let exact = ising_exact_oracle(&lattice, &model, cfg.site, t)?;
            let closed = (2.0 * lambda_i * t).sin();
            out.push((alpha, n, t, exact, closed));
        }
        Ok(out)
    })?;
    let mut table = Table::new(
        vec!["N", "alpha", "site", "t", "exact", "closed_form", "abs_diff"],
        "dense-ising-state-vector",
    );
    for (alpha, n, t, exact, closed) in blocks.into_iter().flatten() {
        table.push(vec![
            n.into(),
            alpha.into(),
            cfg.site.into(),
            t.into(),
            exact.into(),
            closed.into(),
            (exact - closed).abs().into(),
        ]);
        table.plot.push(PlotPoint { series: format!("N={n} alpha={alpha}"), x: t, y: exact });
    }
    Ok(table)
}
