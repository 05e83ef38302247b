//! Seeded Monte Carlo simulation of the sequential auction.
//!
//! Paths are processed in fixed blocks of [`CHUNK`] consecutive path indices.
//! Each block accumulates its own moments sequentially and the blocks are
//! merged in index order, so a summary is bitwise identical for a given seed
//! whether blocks run on one thread or many.

mod rng;
mod stats;

pub use rng::{rng_substream, NormalStream};
pub use stats::Estimate;

use stats::Moments;

use crate::error::{Error, Result};
use crate::path::{deviation_eval, DeviationEval};
use crate::types::{CoefficientPath, EquilibriumPath, MarketParams};

/// Paths per accumulation block.
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Blocks run on the rayon pool; falls back to sequential without the
    /// `parallel` feature.
    #[default]
    Parallel,
}

/// Insider scales `β_n` of one period by `multiplier`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub period: usize,
    pub multiplier: f64,
}

/// Predictable order component `lag * y_{n-1} + constant` added to every
/// insider order; the market maker prices only the surprise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Offset {
    pub lag: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_paths: usize,
    pub seed: u64,
    pub deviation: Option<Deviation>,
    pub offset: Option<Offset>,
    pub execution: Execution,
}

impl SimConfig {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            deviation: None,
            offset: None,
            execution: Execution::default(),
        }
    }

    pub fn with_deviation(mut self, period: usize, multiplier: f64) -> Self {
        self.deviation = Some(Deviation { period, multiplier });
        self
    }

    pub fn with_offset(mut self, lag: f64, constant: f64) -> Self {
        self.offset = Some(Offset { lag, constant });
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self, n_periods: usize) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidConfig("n_paths must be >= 1".into()));
        }
        if let Some(d) = self.deviation {
            if d.period == 0 || d.period > n_periods {
                return Err(Error::InvalidConfig(format!(
                    "deviation period {} outside 1..={n_periods}",
                    d.period
                )));
            }
            if !(d.multiplier > 0.0) || !d.multiplier.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "deviation multiplier must be > 0 (got {})",
                    d.multiplier
                )));
            }
        }
        if let Some(o) = self.offset {
            if !o.lag.is_finite() || !o.constant.is_finite() {
                return Err(Error::InvalidConfig("offset must be finite".into()));
            }
        }
        Ok(())
    }
}

/// The `β, λ, Σ` actually in force during a simulation.
///
/// Without a deviation this is the equilibrium path. With one in period `d`,
/// `λ_d` is recomputed from the deviated `β_d` by the efficient-pricing rule
/// and later periods play the equilibrium coefficients against the
/// post-deviation variance `Σ'_d`, i.e. `β_k` scales by `(Σ'_d/Σ_d)^{-1/2}`,
/// `λ_k` by `(Σ'_d/Σ_d)^{1/2}` and `Σ_k` by `Σ'_d/Σ_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TradingSchedule {
    /// `β_1..=β_N`, zero-based.
    pub beta: Vec<f64>,
    /// `λ_1..=λ_N`, zero-based.
    pub lambda: Vec<f64>,
    /// `Σ_0..=Σ_N`.
    pub sigma: Vec<f64>,
}

impl TradingSchedule {
    pub fn new(eq: &EquilibriumPath, params: &MarketParams, deviation: Option<Deviation>) -> Self {
        let mut beta = eq.beta_seq().to_vec();
        let mut lambda = eq.lambda_seq().to_vec();
        let mut sigma = eq.sigma_seq().to_vec();
        if let Some(Deviation { period, multiplier }) = deviation {
            let s = sigma[period - 1];
            let q = params.noise_var();
            let b = beta[period - 1] * multiplier;
            let denom = b * b * s + q;
            beta[period - 1] = b;
            lambda[period - 1] = b * s / denom;
            let post = s * q / denom;
            let ratio = post / sigma[period];
            sigma[period] = post;
            let root = ratio.sqrt();
            for k in period + 1..=beta.len() {
                beta[k - 1] /= root;
                lambda[k - 1] *= root;
                sigma[k] *= ratio;
            }
        }
        Self {
            beta,
            lambda,
            sigma,
        }
    }

    pub fn n_periods(&self) -> usize {
        self.beta.len()
    }
}

/// Monte Carlo estimates over one set of paths.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub n_paths: usize,
    pub seed: u64,
    /// `Σ_n π_n`.
    pub total_profit: Estimate,
    /// `Σ_{k >= d} π_k` for deviation period `d` (the whole horizon if none).
    pub tail_profit: Estimate,
    /// Paired profit difference caused by the offset; zero without one.
    pub offset_delta: Estimate,
    /// `E[(v - p_n)²]` for `n` in `0..=N`.
    pub posterior_var: Vec<Estimate>,
    /// `E|x_n|/2` for `n` in `1..=N`, zero-based.
    pub half_volume: Vec<Estimate>,
    efficiency_cov: Vec<Estimate>,
    /// Schedule the paths were generated under.
    pub schedule: TradingSchedule,
}

impl SimSummary {
    pub fn n_periods(&self) -> usize {
        self.half_volume.len()
    }

    /// `E[(v - p_n) y_k]` for `1 <= k <= n <= N`. Efficient pricing makes
    /// its population value zero, so this product moment is the covariance.
    pub fn efficiency_cov(&self, n: usize, k: usize) -> Estimate {
        assert!(k >= 1 && k <= n && n <= self.n_periods());
        self.efficiency_cov[tri_index(n, k)]
    }
}

#[inline]
fn tri_index(n: usize, k: usize) -> usize {
    n * (n - 1) / 2 + (k - 1)
}

struct Layout {
    n_periods: usize,
}

impl Layout {
    const TOTAL: usize = 0;
    const TAIL: usize = 1;
    const OFFSET: usize = 2;

    fn var(&self, n: usize) -> usize {
        3 + n
    }

    /// Zero-based period index.
    fn half_volume(&self, i: usize) -> usize {
        4 + self.n_periods + i
    }

    fn cov(&self, n: usize, k: usize) -> usize {
        4 + 2 * self.n_periods + tri_index(n, k)
    }

    fn len(&self) -> usize {
        4 + 2 * self.n_periods + self.n_periods * (self.n_periods + 1) / 2
    }
}

struct PathKernel<'a> {
    params: &'a MarketParams,
    schedule: &'a TradingSchedule,
    layout: Layout,
    seed: u64,
    tail_from: usize,
    offset: Option<Offset>,
}

impl PathKernel<'_> {
    fn run_block(&self, start: usize, end: usize) -> Vec<Moments> {
        let mut acc = vec![Moments::default(); self.layout.len()];
        let mut flows = vec![0.0; self.layout.n_periods];
        for path in start..end {
            self.run_path(path as u64, &mut acc, &mut flows);
        }
        acc
    }

    fn run_path(&self, path: u64, acc: &mut [Moments], flows: &mut [f64]) {
        let layout = &self.layout;
        let params = self.params;
        let mut normals = rng_substream(self.seed, path);
        let noise_sd = params.noise_var().sqrt();

        let v = params.p0 + params.sigma0_sq.sqrt() * normals.next_normal();
        let mut price = params.p0;
        let mut prev_flow = 0.0;
        let mut total = 0.0;
        let mut tail = 0.0;
        let mut offset_gain = 0.0;
        acc[layout.var(0)].push((v - price) * (v - price));

        for n in 1..=layout.n_periods {
            let u = noise_sd * normals.next_normal();
            let predictable = match self.offset {
                Some(o) => o.lag * prev_flow + o.constant,
                None => 0.0,
            };
            let informed = self.schedule.beta[n - 1] * (v - price);
            let order = informed + predictable;
            // price from the surprise directly so offsets cannot perturb it
            let surprise = informed + u;
            let flow = surprise + predictable;
            price += self.schedule.lambda[n - 1] * surprise;
            let err = v - price;
            let profit = order * err;

            total += profit;
            if n >= self.tail_from {
                tail += profit;
            }
            offset_gain += predictable * err;
            flows[n - 1] = flow;
            prev_flow = flow;

            acc[layout.var(n)].push(err * err);
            acc[layout.half_volume(n - 1)].push(0.5 * order.abs());
            for k in 1..=n {
                acc[layout.cov(n, k)].push(err * flows[k - 1]);
            }
        }
        acc[Layout::TOTAL].push(total);
        acc[Layout::TAIL].push(tail);
        acc[Layout::OFFSET].push(offset_gain);
    }
}

fn run_blocks(kernel: &PathKernel<'_>, n_paths: usize, execution: Execution) -> Vec<Moments> {
    let n_blocks = n_paths.div_ceil(CHUNK);
    let block = |i: usize| kernel.run_block(i * CHUNK, ((i + 1) * CHUNK).min(n_paths));

    let blocks: Vec<Vec<Moments>> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n_blocks).into_par_iter().map(block).collect()
        }
        _ => (0..n_blocks).map(block).collect(),
    };

    let mut merged = vec![Moments::default(); kernel.layout.len()];
    for b in &blocks {
        for (m, x) in merged.iter_mut().zip(b) {
            m.merge(x);
        }
    }
    merged
}

/// Simulates `cfg.n_paths` independent markets under `eq`.
///
/// Per path: `v ~ N(p_0, Σ_0)`, then for each period `u_n ~ N(0, σ_u²Δt)`,
/// `x_n = β_n (v - p_{n-1})` (+ offset), `p_n = p_{n-1} + λ_n ỹ_n` and
/// `π_n = x_n (v - p_n)`. Variates are drawn in the order `v, u_1, .., u_N`.
pub fn simulate_market(
    eq: &EquilibriumPath,
    params: &MarketParams,
    cfg: &SimConfig,
) -> Result<SimSummary> {
    let params = params.validate()?;
    if eq.n_periods() != params.n_periods {
        return Err(Error::InvalidConfig(format!(
            "equilibrium has N = {}, params have N = {}",
            eq.n_periods(),
            params.n_periods
        )));
    }
    cfg.validate(params.n_periods)?;

    let schedule = TradingSchedule::new(eq, &params, cfg.deviation);
    let layout = Layout {
        n_periods: params.n_periods,
    };
    let kernel = PathKernel {
        params: &params,
        schedule: &schedule,
        layout,
        seed: cfg.seed,
        tail_from: cfg.deviation.map_or(1, |d| d.period),
        offset: cfg.offset,
    };
    let merged = run_blocks(&kernel, cfg.n_paths, cfg.execution);
    let layout = &kernel.layout;
    let n = params.n_periods;

    let mut efficiency_cov = Vec::with_capacity(n * (n + 1) / 2);
    for i in 1..=n {
        for k in 1..=i {
            efficiency_cov.push(merged[layout.cov(i, k)].estimate());
        }
    }
    Ok(SimSummary {
        n_paths: cfg.n_paths,
        seed: cfg.seed,
        total_profit: merged[Layout::TOTAL].estimate(),
        tail_profit: merged[Layout::TAIL].estimate(),
        offset_delta: merged[Layout::OFFSET].estimate(),
        posterior_var: (0..=n).map(|i| merged[layout.var(i)].estimate()).collect(),
        half_volume: (0..n)
            .map(|i| merged[layout.half_volume(i)].estimate())
            .collect(),
        efficiency_cov,
        schedule,
    })
}

/// Monte Carlo estimate of `E Σ_{k >= d} π_k` under the configured one-period
/// deviation in period `d`, paired with its analytic value.
pub fn deviation_profit_mc(
    coeffs: &CoefficientPath,
    eq: &EquilibriumPath,
    params: &MarketParams,
    cfg: &SimConfig,
) -> Result<(Estimate, DeviationEval)> {
    let dev = cfg
        .deviation
        .ok_or_else(|| Error::InvalidConfig("deviation_profit_mc needs a deviation".into()))?;
    let summary = simulate_market(eq, params, cfg)?;
    let d = dev.period;
    let n_periods = params.n_periods;
    let (a_d, b_d) = if d < n_periods {
        (coeffs.a(d), coeffs.b(d))
    } else {
        (0.0, 0.0)
    };
    let analytic = deviation_eval(
        eq.beta(d) * dev.multiplier,
        a_d,
        b_d,
        eq.sigma(d - 1),
        params,
    );
    Ok((summary.tail_profit, analytic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::build_path;
    use crate::recursion::solve;
    use crate::types::ModelKind;

    fn setup(model: ModelKind, n: usize) -> (MarketParams, CoefficientPath, EquilibriumPath) {
        let p = MarketParams::new(1.0, 0.5, n).unwrap();
        let c = solve(model, &p).unwrap();
        let e = build_path(&c, &p).unwrap();
        (p, c, e)
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0, 1).validate(3).is_err());
        assert!(SimConfig::new(10, 1)
            .with_deviation(0, 1.0)
            .validate(3)
            .is_err());
        assert!(SimConfig::new(10, 1)
            .with_deviation(4, 1.0)
            .validate(3)
            .is_err());
        assert!(SimConfig::new(10, 1)
            .with_deviation(3, 0.0)
            .validate(3)
            .is_err());
        assert!(SimConfig::new(10, 1)
            .with_offset(f64::NAN, 0.0)
            .validate(3)
            .is_err());
        assert!(SimConfig::new(10, 1)
            .with_deviation(3, 1.5)
            .validate(3)
            .is_ok());
    }

    #[test]
    fn unit_multiplier_schedule_is_equilibrium() {
        let (p, _, e) = setup(ModelKind::RiskNeutral, 6);
        let s = TradingSchedule::new(
            &e,
            &p,
            Some(Deviation {
                period: 3,
                multiplier: 1.0,
            }),
        );
        for n in 1..=6 {
            assert!((s.beta[n - 1] - e.beta(n)).abs() <= 1e-14 * e.beta(n));
            assert!((s.lambda[n - 1] - e.lambda(n)).abs() <= 1e-14 * e.lambda(n));
            assert!((s.sigma[n] - e.sigma(n)).abs() <= 1e-14);
        }
    }

    #[test]
    fn deviated_schedule_keeps_bayesian_pricing() {
        let (p, _, e) = setup(ModelKind::RiskSeeking, 5);
        let s = TradingSchedule::new(
            &e,
            &p,
            Some(Deviation {
                period: 2,
                multiplier: 1.3,
            }),
        );
        for n in 1..=5 {
            let (b, sig) = (s.beta[n - 1], s.sigma[n - 1]);
            let lam = b * sig / (b * b * sig + p.noise_var());
            assert!((lam - s.lambda[n - 1]).abs() <= 1e-12 * lam);
            assert!((s.sigma[n] - (1.0 - lam * b) * sig).abs() <= 1e-12 * sig);
        }
    }

    #[test]
    fn small_run_is_deterministic_and_thread_independent() {
        let (p, _, e) = setup(ModelKind::KyleBaseline, 3);
        let cfg = SimConfig::new(3 * CHUNK + 17, 9);
        let seq = simulate_market(&e, &p, &cfg.with_execution(Execution::Sequential)).unwrap();
        let par = simulate_market(&e, &p, &cfg.with_execution(Execution::Parallel)).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq, simulate_market(&e, &p, &cfg).unwrap());
    }

    #[test]
    fn offset_free_run_has_zero_offset_delta() {
        let (p, _, e) = setup(ModelKind::RiskNeutral, 2);
        let s = simulate_market(&e, &p, &SimConfig::new(100, 1)).unwrap();
        assert_eq!(s.offset_delta.mean, 0.0);
        assert_eq!(s.tail_profit, s.total_profit);
    }

    #[test]
    fn deviation_mc_requires_deviation() {
        let (p, c, e) = setup(ModelKind::RiskNeutral, 2);
        assert!(deviation_profit_mc(&c, &e, &p, &SimConfig::new(10, 1)).is_err());
    }

    #[test]
    fn rejects_mismatched_path() {
        let (_, _, e) = setup(ModelKind::RiskNeutral, 2);
        let p3 = MarketParams::new(1.0, 0.5, 3).unwrap();
        assert!(simulate_market(&e, &p3, &SimConfig::new(10, 1)).is_err());
    }
}
