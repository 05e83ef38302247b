use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::types::{CoefficientPath, EquilibriumPath, MarketParams, ModelKind};

/// Value of a single-period deviation to intensity `β` in period `n`, with
/// the pricing rule of that period re-derived from `β` and the equilibrium
/// continuation from period `n + 1` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationEval {
    /// `α_{n-1}(β)`: risky-profit coefficient.
    pub alpha_prev: f64,
    /// `δ_{n-1}(β)`: guaranteed profit.
    pub delta_prev: f64,
    /// `α_{n-1}(β) Σ_{n-1} + δ_{n-1}(β)`: ex-ante expected profit from `n` on.
    pub ex_ante: f64,
}

/// `a_n`, `b_n` are the continuation coefficients at period `n` (zero for the
/// last period) and `sigma_prev` is `Σ_{n-1}`.
pub fn deviation_eval(
    beta: f64,
    a_n: f64,
    b_n: f64,
    sigma_prev: f64,
    params: &MarketParams,
) -> DeviationEval {
    let s = sigma_prev;
    let q = params.noise_var();
    let denom = beta * beta * s + q;
    let keep = q / denom; // 1 - λβ
    let post = s / denom;
    let alpha_prev = b_n * params.noise_scale() / s.sqrt() * keep.powf(1.5) + beta * q / denom;
    let delta_prev = a_n * q * post.sqrt() + b_n * beta * beta * q * post.powf(1.5);
    DeviationEval {
        alpha_prev,
        delta_prev,
        ex_ante: alpha_prev * s + delta_prev,
    }
}

/// Ex-ante value of intensity `β` for an insider who takes the pricing rule
/// `λ` and the continuation `α_n Σ + δ_n` as given (Kyle's problem).
pub fn price_taking_value(
    beta: f64,
    lambda: f64,
    alpha_next: f64,
    delta_next: f64,
    sigma_prev: f64,
    params: &MarketParams,
) -> f64 {
    let keep = 1.0 - lambda * beta;
    (beta * keep + alpha_next * keep * keep) * sigma_prev
        + alpha_next * lambda * lambda * params.noise_var()
        + delta_next
}

/// `dλ_1/dβ_1` for the first-period pricing rule `λ_1 = β Σ_0 / (β² Σ_0 + σ_u² Δt)`.
pub fn lambda_sensitivity(beta1: f64, params: &MarketParams) -> f64 {
    let s0 = params.sigma0_sq;
    let q = params.noise_var();
    let denom = beta1 * beta1 * s0 + q;
    s0 * (q - beta1 * beta1 * s0) / (denom * denom)
}

/// A model's objective: compared on `primary`, ties broken by `secondary`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub primary: f64,
    pub secondary: f64,
}

impl PartialOrd for Objective {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.primary.partial_cmp(&other.primary)? {
            Ordering::Equal => self.secondary.partial_cmp(&other.secondary),
            ord => Some(ord),
        }
    }
}

/// What the insider of `model` maximizes in period `n` (`1..=N`) when
/// trading with intensity `beta`:
///
/// * risk-averse: `δ_{n-1}`, then `α_{n-1}`
/// * risk-neutral: ex-ante value
/// * risk-seeking: `α_{n-1}`, then `δ_{n-1}`
/// * Kyle: ex-ante value at the equilibrium pricing rule
pub fn period_objective(
    model: ModelKind,
    coeffs: &CoefficientPath,
    path: &EquilibriumPath,
    params: &MarketParams,
    n: usize,
    beta: f64,
) -> Result<Objective> {
    let n_periods = path.n_periods();
    if n == 0 || n > n_periods || coeffs.n_periods() != n_periods {
        return Err(Error::Domain(format!("period {n} outside 1..={n_periods}")));
    }
    let (a_n, b_n) = if n < n_periods {
        (coeffs.a(n), coeffs.b(n))
    } else {
        (0.0, 0.0)
    };
    let sigma_prev = path.sigma(n - 1);
    let eval = deviation_eval(beta, a_n, b_n, sigma_prev, params);
    let objective = match model {
        ModelKind::RiskAverse => Objective {
            primary: eval.delta_prev,
            secondary: eval.alpha_prev,
        },
        ModelKind::RiskNeutral => Objective {
            primary: eval.ex_ante,
            secondary: 0.0,
        },
        ModelKind::RiskSeeking => Objective {
            primary: eval.alpha_prev,
            secondary: eval.delta_prev,
        },
        ModelKind::KyleBaseline => {
            let (alpha_next, delta_next) = if n < n_periods {
                (path.alpha(n), path.delta(n))
            } else {
                (0.0, 0.0)
            };
            Objective {
                primary: price_taking_value(
                    beta,
                    path.lambda(n),
                    alpha_next,
                    delta_next,
                    sigma_prev,
                    params,
                ),
                secondary: 0.0,
            }
        }
    };
    Ok(objective)
}
