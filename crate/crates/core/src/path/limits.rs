use crate::error::{Error, Result};
use crate::types::{MarketParams, ModelKind};

/// Continuous-trading limits evaluated on a grid of calendar times.
///
/// `sigma_lim`, `lambda_lim` are limits of `Σ_[Nt]`, `λ_[Nt]`;
/// `beta_rate_lim` is the limit of `β_[Nt] / Δt`. The scaled coefficients are
/// `c_[Nt] / Δt^p`, `b_[Nt] Δt^p`, `a_[Nt] Δt^p` with `p = 1/4` for the
/// risk-averse model and `p = 1/2` otherwise. Divergent limits are stored as
/// `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCurves {
    pub model: ModelKind,
    pub t_grid: Vec<f64>,
    pub sigma_lim: Vec<f64>,
    pub lambda_lim: Vec<f64>,
    pub beta_rate_lim: Vec<f64>,
    pub c_scaled: Vec<f64>,
    pub b_scaled: Vec<f64>,
    pub a_scaled: Vec<f64>,
}

impl LimitCurves {
    /// Exponent `p` in the coefficient scalings.
    pub fn scaling_exponent(&self) -> f64 {
        scaling_exponent(self.model)
    }

    /// Ratio of scaled risky to guaranteed profit coefficients, `b/a`.
    pub fn risky_to_guaranteed_ratio(&self) -> Vec<f64> {
        self.b_scaled
            .iter()
            .zip(&self.a_scaled)
            .map(|(b, a)| b / a)
            .collect()
    }
}

pub(crate) fn scaling_exponent(model: ModelKind) -> f64 {
    match model {
        ModelKind::RiskAverse => 0.25,
        _ => 0.5,
    }
}

struct LimitPoint {
    sigma: f64,
    lambda: f64,
    beta_rate: f64,
    c: f64,
    b: f64,
    a: f64,
}

fn limit_point(model: ModelKind, params: &MarketParams, t: f64) -> LimitPoint {
    let s0 = params.sigma0_sq;
    let su = params.sigma_u;
    let rem = 1.0 - t;
    match model {
        ModelKind::RiskAverse => {
            let two_thirds_34 = (2.0f64 / 3.0).powf(0.75);
            LimitPoint {
                sigma: 0.0,
                lambda: 0.0,
                beta_rate: f64::INFINITY,
                c: (2.0 / (3.0 * rem)).powf(0.25),
                b: two_thirds_34 * rem.powf(0.25),
                a: 2.0 * two_thirds_34 * rem.powf(0.25),
            }
        }
        ModelKind::RiskNeutral | ModelKind::KyleBaseline => LimitPoint {
            sigma: rem * s0,
            lambda: s0.sqrt() / su,
            beta_rate: su / (rem * s0.sqrt()),
            c: rem.powf(-0.5),
            b: 0.5 * rem.sqrt(),
            a: 0.5 * rem.sqrt(),
        },
        ModelKind::RiskSeeking => {
            let inv_sqrt3 = 3f64.sqrt() / 3.0;
            LimitPoint {
                sigma: rem.cbrt() * s0,
                lambda: inv_sqrt3 * s0.sqrt() / (rem.cbrt() * su),
                beta_rate: inv_sqrt3 * su / (rem.powf(2.0 / 3.0) * s0.sqrt()),
                c: inv_sqrt3 / rem.sqrt(),
                b: inv_sqrt3 * rem.sqrt(),
                a: 0.5 * inv_sqrt3 * rem.sqrt(),
            }
        }
    }
}

/// Evaluates the limit curves of `model` on `t_grid`; every `t` must lie in
/// the open interval `(0, 1)`. The Kyle baseline shares the risk-neutral
/// limits.
pub fn limit_curves(
    model: ModelKind,
    params: &MarketParams,
    t_grid: &[f64],
) -> Result<LimitCurves> {
    let params = params.validate()?;
    if let Some(t) = t_grid.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::Domain(format!("t = {t} is outside (0, 1)")));
    }
    let mut curves = LimitCurves {
        model,
        t_grid: t_grid.to_vec(),
        sigma_lim: Vec::with_capacity(t_grid.len()),
        lambda_lim: Vec::with_capacity(t_grid.len()),
        beta_rate_lim: Vec::with_capacity(t_grid.len()),
        c_scaled: Vec::with_capacity(t_grid.len()),
        b_scaled: Vec::with_capacity(t_grid.len()),
        a_scaled: Vec::with_capacity(t_grid.len()),
    };
    for &t in t_grid {
        let p = limit_point(model, &params, t);
        curves.sigma_lim.push(p.sigma);
        curves.lambda_lim.push(p.lambda);
        curves.beta_rate_lim.push(p.beta_rate);
        curves.c_scaled.push(p.c);
        curves.b_scaled.push(p.b);
        curves.a_scaled.push(p.a);
    }
    Ok(curves)
}

/// Per-period envelope for the risk-averse residual variance.
///
/// `lower[n] = Σ_0 (1 + c_{N-1}²)^{-n}` and `upper[n] = Σ_0 (1 + c_1²)^{-n}`
/// for `n` in `0..=N`, evaluated in log space. `lower[N]`, `upper[N]` are the
/// whole-horizon bounds `Σ_0 exp(-ln(1 + c²)/Δt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SigmaBounds {
    /// `lower[n] < sigma <= upper[n]`.
    ///
    /// The upper side is attained at `n = 1` (`Σ_1 = Σ_0/(1 + c_1²)`), so it is
    /// compared with a one-ulp-scale relative slack there.
    pub fn contains(&self, n: usize, sigma: f64) -> bool {
        let upper = self.upper[n];
        let slack = if n == 1 {
            4.0 * f64::EPSILON * upper
        } else {
            0.0
        };
        self.lower[n] < sigma && sigma <= upper + slack
    }
}

pub fn sigma_bounds_model1(params: &MarketParams, c1: f64, c_last: f64) -> Result<SigmaBounds> {
    let params = params.validate()?;
    if params.n_periods < 2 {
        return Err(Error::Domain(
            "residual-variance bounds need at least two periods".into(),
        ));
    }
    let ln_s0 = params.sigma0_sq.ln();
    let fast = (c_last * c_last).ln_1p();
    let slow = (c1 * c1).ln_1p();
    let lower = (0..=params.n_periods)
        .map(|n| (ln_s0 - fast * n as f64).exp())
        .collect();
    let upper = (0..=params.n_periods)
        .map(|n| (ln_s0 - slow * n as f64).exp())
        .collect();
    Ok(SigmaBounds { lower, upper })
}
