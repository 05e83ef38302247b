//! The four subcommands.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use auction_core::path::{
    build_path, deviation_eval, limit_curves, period_objective, sigma_bounds_model1,
};
use auction_core::recursion::solve;
use auction_core::simulate::{simulate_market, Estimate, SimConfig, SimSummary};
use auction_core::{CoefficientPath, EquilibriumPath, MarketParams, ModelKind};

use crate::config::RunConfig;
use crate::figures;
use crate::output::{
    fmt_f64, fmt_opt, horizon_dir, write_coefficients, write_csv, write_meta, write_path,
};

/// Returned when at least one statistical gate fails; maps to exit code 2.
#[derive(Debug)]
pub struct GateFailure {
    pub failed: usize,
    pub total: usize,
}

impl fmt::Display for GateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} of {} statistical gates failed",
            self.failed, self.total
        )
    }
}

impl std::error::Error for GateFailure {}

fn solve_horizon(
    model: ModelKind,
    params: &MarketParams,
) -> Result<(CoefficientPath, EquilibriumPath)> {
    let coeffs = solve(model, params)
        .with_context(|| format!("solving {model} at N={}", params.n_periods))?;
    let eq = build_path(&coeffs, params)?;
    Ok((coeffs, eq))
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<()> {
    let model = cfg.model()?;
    let multiple = cfg.periods.len() > 1;
    for &n in &cfg.periods {
        let params = cfg.params(n)?;
        let (coeffs, eq) = solve_horizon(model, &params)?;
        let dir = horizon_dir(&cfg.out, n, multiple)?;
        write_coefficients(&dir.join("coefficients.csv"), &coeffs)?;
        write_path(&dir.join("path.csv"), &eq)?;
        write_meta(&dir.join("meta.csv"), model, &params, &eq)?;
        if eq.sigma_underflow() {
            eprintln!("warning: N={n}: residual variance underflowed and was clamped");
        }
        println!(
            "{model} N={n}: a0={:.6} b0={:.6} ex-ante profit {:.6} -> {}",
            coeffs.a(0),
            coeffs.b(0),
            eq.ex_ante_profit(),
            dir.display()
        );
    }
    Ok(())
}

/// One statistical check: `|value - target| <= k * std_error`, or a
/// deterministic comparison when `std_error` is absent.
#[derive(Debug, Clone)]
pub struct Gate {
    pub name: String,
    pub period: Option<usize>,
    pub value: f64,
    pub target: f64,
    pub std_error: Option<f64>,
    pub k: Option<f64>,
    pub pass: bool,
}

impl Gate {
    fn statistical(name: &str, period: Option<usize>, est: Estimate, target: f64, k: f64) -> Self {
        Self {
            name: name.to_string(),
            period,
            value: est.mean,
            target,
            std_error: Some(est.std_error),
            k: Some(k),
            pass: est.within(target, k),
        }
    }

    fn z(&self) -> Option<f64> {
        self.std_error.map(|se| (self.value - self.target) / se)
    }
}

/// Gates enabled by the run configuration.
pub fn simulation_gates(
    model: ModelKind,
    coeffs: &CoefficientPath,
    eq: &EquilibriumPath,
    params: &MarketParams,
    sim: &SimConfig,
    summary: &SimSummary,
) -> Result<Vec<Gate>> {
    let n_periods = params.n_periods;
    let schedule = &summary.schedule;
    let mut gates = Vec::new();
    match sim.deviation {
        None => gates.push(Gate::statistical(
            "total_profit",
            None,
            summary.total_profit,
            eq.ex_ante_profit(),
            3.0,
        )),
        Some(dev) => {
            let d = dev.period;
            let (a_d, b_d) = if d < n_periods {
                (coeffs.a(d), coeffs.b(d))
            } else {
                (0.0, 0.0)
            };
            let beta = eq.beta(d) * dev.multiplier;
            let analytic = deviation_eval(beta, a_d, b_d, eq.sigma(d - 1), params);
            gates.push(Gate::statistical(
                "deviation_profit",
                Some(d),
                summary.tail_profit,
                analytic.ex_ante,
                4.0,
            ));
            if dev.multiplier != 1.0 {
                // deterministic: the deviation must not improve the insider's objective
                let at = period_objective(model, coeffs, eq, params, d, eq.beta(d))?;
                let off = period_objective(model, coeffs, eq, params, d, beta)?;
                gates.push(Gate {
                    name: "deviation_not_better".into(),
                    period: Some(d),
                    value: off.primary,
                    target: at.primary,
                    std_error: None,
                    k: None,
                    pass: off.partial_cmp(&at) != Some(std::cmp::Ordering::Greater),
                });
            }
        }
    }
    for n in 0..=n_periods {
        gates.push(Gate::statistical(
            "posterior_var",
            Some(n),
            summary.posterior_var[n],
            schedule.sigma[n],
            4.0,
        ));
    }
    for n in 1..=n_periods {
        for k in 1..=n {
            gates.push(Gate::statistical(
                &format!("efficiency_cov_y{k}"),
                Some(n),
                summary.efficiency_cov(n, k),
                0.0,
                4.0,
            ));
        }
    }
    if sim.offset.is_none() {
        for n in 1..=n_periods {
            let expected = schedule.beta[n - 1] * schedule.sigma[n - 1].sqrt() / (2.0 * PI).sqrt();
            gates.push(Gate::statistical(
                "half_volume",
                Some(n),
                summary.half_volume[n - 1],
                expected,
                4.0,
            ));
        }
    } else {
        gates.push(Gate::statistical(
            "offset_delta",
            None,
            summary.offset_delta,
            0.0,
            4.0,
        ));
    }
    Ok(gates)
}

fn write_summary(path: &Path, s: &SimSummary) -> Result<()> {
    let row = |name: &str, period: Option<usize>, e: Estimate| {
        vec![
            name.to_string(),
            period.map(|p| p.to_string()).unwrap_or_default(),
            fmt_f64(e.mean),
            fmt_f64(e.std_error),
        ]
    };
    let n_periods = s.n_periods();
    let mut rows = vec![
        row("total_profit", None, s.total_profit),
        row("tail_profit", None, s.tail_profit),
        row("offset_delta", None, s.offset_delta),
    ];
    rows.extend((0..=n_periods).map(|n| row("posterior_var", Some(n), s.posterior_var[n])));
    rows.extend((1..=n_periods).map(|n| row("half_volume", Some(n), s.half_volume[n - 1])));
    for n in 1..=n_periods {
        for k in 1..=n {
            rows.push(row(
                &format!("efficiency_cov_y{k}"),
                Some(n),
                s.efficiency_cov(n, k),
            ));
        }
    }
    write_csv(path, &["statistic", "period", "value", "std_error"], rows)
}

fn write_gates(path: &Path, gates: &[Gate]) -> Result<()> {
    let rows = gates.iter().map(|g| {
        vec![
            g.name.clone(),
            g.period.map(|p| p.to_string()).unwrap_or_default(),
            fmt_f64(g.value),
            fmt_f64(g.target),
            fmt_opt(g.std_error),
            fmt_opt(g.z()),
            fmt_opt(g.k),
            g.pass.to_string(),
        ]
    });
    write_csv(
        path,
        &[
            "gate",
            "period",
            "value",
            "target",
            "std_error",
            "z",
            "tolerance_se",
            "pass",
        ],
        rows,
    )
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<()> {
    let model = cfg.model()?;
    let multiple = cfg.periods.len() > 1;
    let (mut failed, mut total) = (0, 0);
    for &n in &cfg.periods {
        let params = cfg.params(n)?;
        let (coeffs, eq) = solve_horizon(model, &params)?;
        let mut sim = SimConfig::new(cfg.paths, cfg.seed);
        if let Some((d, e)) = cfg.offset {
            sim = sim.with_offset(d, e);
        }
        if let Some((period, mult)) = cfg.deviation {
            sim = sim.with_deviation(period, mult);
        }
        sim.validate(n)?;
        let summary = simulate_market(&eq, &params, &sim)?;
        let gates = simulation_gates(model, &coeffs, &eq, &params, &sim, &summary)?;

        let dir = horizon_dir(&cfg.out, n, multiple)?;
        write_summary(&dir.join("sim_summary.csv"), &summary)?;
        write_gates(&dir.join("gates.csv"), &gates)?;

        let bad: Vec<&Gate> = gates.iter().filter(|g| !g.pass).collect();
        println!(
            "{model} N={n}: {} paths, seed {}, profit {:.6} ± {:.6} (target {:.6}); gates {}/{} passed",
            cfg.paths,
            cfg.seed,
            summary.total_profit.mean,
            summary.total_profit.std_error,
            eq.ex_ante_profit(),
            gates.len() - bad.len(),
            gates.len()
        );
        for g in &bad {
            println!(
                "  FAIL {}{}: value {:.6e} target {:.6e} z {}",
                g.name,
                g.period.map(|p| format!("[{p}]")).unwrap_or_default(),
                g.value,
                g.target,
                g.z()
                    .map(|z| format!("{z:.2}"))
                    .unwrap_or_else(|| "-".into())
            );
        }
        failed += bad.len();
        total += gates.len();
    }
    if failed > 0 {
        return Err(GateFailure { failed, total }.into());
    }
    Ok(())
}

pub fn cmd_figures(cfg: &RunConfig) -> Result<()> {
    let panels = figures::select(cfg.figures.as_deref())?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    for panel in panels {
        let fig = figures::build(&panel, cfg)?;
        fig.write(&cfg.out)?;
        println!("figure {} -> {}", panel.id, cfg.out.display());
    }
    Ok(())
}

/// Interior grid `t_i = i/(grid+1)`.
pub fn t_grid(grid: usize) -> Vec<f64> {
    (1..=grid).map(|i| i as f64 / (grid + 1) as f64).collect()
}

/// Discrete value paired with each limit quantity at `n = [Nt]`.
pub struct LimitRow {
    pub t: f64,
    pub index: usize,
    pub quantity: &'static str,
    pub limit: f64,
    pub discrete: f64,
}

impl LimitRow {
    pub fn abs_error(&self) -> Option<f64> {
        self.limit
            .is_finite()
            .then(|| (self.discrete - self.limit).abs())
    }

    pub fn rel_error(&self) -> Option<f64> {
        (self.limit.is_finite() && self.limit != 0.0)
            .then(|| ((self.discrete - self.limit) / self.limit).abs())
    }
}

pub fn limit_rows(
    model: ModelKind,
    params: &MarketParams,
    coeffs: &CoefficientPath,
    eq: &EquilibriumPath,
    grid: &[f64],
) -> Result<Vec<LimitRow>> {
    let lim = limit_curves(model, params, grid)?;
    let n_periods = params.n_periods;
    let dt = params.dt();
    let scale = dt.powf(lim.scaling_exponent());
    let mut rows = Vec::new();
    for (i, &t) in grid.iter().enumerate() {
        let k = ((n_periods as f64 * t).floor() as usize).min(n_periods - 1);
        let traded = k.max(1);
        let mut push = |quantity, index, limit, discrete| {
            rows.push(LimitRow {
                t,
                index,
                quantity,
                limit,
                discrete,
            })
        };
        push("sigma", k, lim.sigma_lim[i], eq.sigma(k));
        push("lambda", traded, lim.lambda_lim[i], eq.lambda(traded));
        push(
            "beta_rate",
            traded,
            lim.beta_rate_lim[i],
            eq.beta(traded) / dt,
        );
        push(
            "c_scaled",
            traded,
            lim.c_scaled[i],
            coeffs.c(traded) / scale,
        );
        push("b_scaled", k, lim.b_scaled[i], coeffs.b(k) * scale);
        push("a_scaled", k, lim.a_scaled[i], coeffs.a(k) * scale);
    }
    Ok(rows)
}

pub fn cmd_limits(cfg: &RunConfig) -> Result<()> {
    let model = cfg.model()?;
    let grid = t_grid(cfg.grid);
    let multiple = cfg.periods.len() > 1;
    for &n in &cfg.periods {
        let params = cfg.params(n)?;
        let (coeffs, eq) = solve_horizon(model, &params)?;
        let dir = horizon_dir(&cfg.out, n, multiple)?;
        let rows = limit_rows(model, &params, &coeffs, &eq, &grid)?;
        write_csv(
            &dir.join("limits.csv"),
            &[
                "n_periods",
                "t",
                "index",
                "quantity",
                "limit",
                "discrete",
                "abs_error",
                "rel_error",
            ],
            rows.iter().map(|r| {
                vec![
                    n.to_string(),
                    fmt_f64(r.t),
                    r.index.to_string(),
                    r.quantity.to_string(),
                    fmt_f64(r.limit),
                    fmt_f64(r.discrete),
                    fmt_opt(r.abs_error()),
                    fmt_opt(r.rel_error()),
                ]
            }),
        )?;
        let mut note = String::new();
        if model == ModelKind::RiskAverse && n >= 2 {
            let bounds = sigma_bounds_model1(&params, coeffs.c(1), coeffs.c(n - 1))?;
            let inside: Vec<bool> = (1..n).map(|k| bounds.contains(k, eq.sigma(k))).collect();
            write_csv(
                &dir.join("sigma_bounds.csv"),
                &["n_periods", "n", "sigma", "lower", "upper", "inside"],
                (1..n).map(|k| {
                    vec![
                        n.to_string(),
                        k.to_string(),
                        fmt_f64(eq.sigma(k)),
                        fmt_f64(bounds.lower[k]),
                        fmt_f64(bounds.upper[k]),
                        inside[k - 1].to_string(),
                    ]
                }),
            )?;
            let count = inside.iter().filter(|&&b| b).count();
            note = format!("; Σ inside bounds at {count}/{} interior periods", n - 1);
        }
        println!(
            "{model} N={n}: {} limit rows -> {}{note}",
            rows.len(),
            dir.display()
        );
    }
    Ok(())
}
