//! From dimensionless coefficients to the economic equilibrium, plus the
//! large-`N` limit curves and the analytic deviation objectives.

mod deviation;
mod limits;

pub use deviation::{
    deviation_eval, lambda_sensitivity, period_objective, price_taking_value, DeviationEval,
    Objective,
};
pub use limits::{limit_curves, sigma_bounds_model1, LimitCurves, SigmaBounds};

use crate::error::{Error, Result};
use crate::types::{CoefficientPath, EquilibriumPath, MarketParams};

/// Builds `β, λ, Σ, α, δ` from a solved coefficient path.
///
/// `ln Σ_n` is accumulated as `ln Σ_0 - Σ ln(1 + c_k²)` and the other
/// quantities are exponentiated from it, so long risk-averse paths stay
/// finite; a `Σ_n` below `f64::MIN_POSITIVE` is clamped and flagged.
pub fn build_path(coeffs: &CoefficientPath, params: &MarketParams) -> Result<EquilibriumPath> {
    let params = params.validate()?;
    let n_periods = params.n_periods;
    if coeffs.n_periods() != n_periods {
        return Err(Error::InvalidCoefficients(format!(
            "coefficients solved for N = {}, params have N = {}",
            coeffs.n_periods(),
            n_periods
        )));
    }
    let scale = params.noise_scale();
    let ln_scale = scale.ln();

    let mut log_sigma = Vec::with_capacity(n_periods + 1);
    log_sigma.push(params.sigma0_sq.ln());
    let mut beta = Vec::with_capacity(n_periods);
    let mut lambda = Vec::with_capacity(n_periods);

    for n in 1..=n_periods {
        let c = coeffs.c(n);
        let prev = log_sigma[n - 1];
        let ln_growth = (c * c).ln_1p();
        beta.push((c.ln() + ln_scale - 0.5 * prev).exp());
        lambda.push((c.ln() + 0.5 * prev - ln_growth - ln_scale).exp());
        log_sigma.push(prev - ln_growth);
    }

    let mut sigma_underflow = false;
    let sigma: Vec<f64> = log_sigma
        .iter()
        .map(|&l| {
            let s = l.exp();
            if s < f64::MIN_POSITIVE {
                sigma_underflow = true;
                f64::MIN_POSITIVE
            } else {
                s
            }
        })
        .collect();

    let alpha: Vec<f64> = (0..n_periods)
        .map(|n| coeffs.b(n) * (ln_scale - 0.5 * log_sigma[n]).exp())
        .collect();
    let delta: Vec<f64> = (0..n_periods)
        .map(|n| coeffs.a(n) * (ln_scale + 0.5 * log_sigma[n]).exp())
        .collect();

    if !sigma_underflow {
        for n in 1..=n_periods {
            let implied = (1.0 - lambda[n - 1] * beta[n - 1]) * sigma[n - 1];
            debug_assert!(
                (implied - sigma[n]).abs() <= 1e-12 * sigma[n - 1],
                "Σ_n = (1 - λβ)Σ_(n-1) violated at n = {n}"
            );
        }
    }

    Ok(EquilibriumPath {
        model: coeffs.model(),
        beta,
        lambda,
        sigma,
        log_sigma,
        alpha,
        delta,
        dt: params.dt(),
        sigma_underflow,
    })
}
