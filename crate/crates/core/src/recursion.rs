//! Backward recursions for the dimensionless coefficients `a_n`, `b_n`, `c_n`.
//!
//! All four models share the same `(a, b)` update given `c_n`; they differ
//! only in how `c_n` is chosen from the continuation `(a_n, b_n)`:
//!
//! * risk-averse: `c = sqrt((2b - a) / (a + b))`
//! * risk-neutral: `(1 - c²) / (c sqrt(1 + c²)) = a + b`
//! * risk-seeking: `sqrt(1 + c²)(1 - c²) / c = 3b`
//! * Kyle: `sqrt(1 + c²)(1 - c²) / c = 2b`, and `b_{n-1} = 1/(2c_n)`
//!
//! The recursion starts from `c_N = 1`, `a_{N-1} = 0`, `b_{N-1} = 1/2` and is
//! inherently sequential. For `N = 1` only that terminal layer exists and the
//! four models coincide.
//!
//! [`crosscheck_recursion`] rebuilds the same sequences from the c-only
//! recursions (one scalar root per period, no `(a, b)` state), which serves as
//! an independent oracle for [`solve`].

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::root::RootBracket;
use crate::types::{CoefficientPath, MarketParams, ModelKind};

/// `(1 - c²) / (c sqrt(1 + c²))`, strictly decreasing on `(0, 1]`.
#[inline]
pub(crate) fn neutral_lhs(c: f64) -> f64 {
    (1.0 - c * c) / (c * (1.0 + c * c).sqrt())
}

/// `sqrt(1 + c²)(1 - c²) / c`, strictly decreasing on `(0, 1]`.
#[inline]
pub(crate) fn impact_lhs(c: f64) -> f64 {
    (1.0 + c * c).sqrt() * (1.0 - c * c) / c
}

/// One backward step `(a_n, b_n, c_n) -> (a_{n-1}, b_{n-1})`.
pub fn generic_backstep(a_n: f64, b_n: f64, c_n: f64) -> Result<(f64, f64)> {
    if !(c_n > 0.0) || !c_n.is_finite() {
        return Err(Error::NonPositiveC(c_n));
    }
    let k = 1.0 / (c_n * c_n + 1.0);
    let k_half = k.sqrt();
    let k_three_halves = k * k_half;
    let a_prev = a_n * k_half + b_n * k_three_halves * c_n * c_n;
    let b_prev = b_n * k_three_halves + c_n * k;
    Ok((a_prev, b_prev))
}

fn inadmissible(model: ModelKind, a: f64, b: f64, reason: &'static str) -> Error {
    Error::AdmissibilityViolation {
        model,
        a,
        b,
        reason,
    }
}

/// Chooses `c_n` for period `n < N` from the continuation `(a_n, b_n)`.
pub fn select_c(model: ModelKind, a_n: f64, b_n: f64) -> Result<f64> {
    if !a_n.is_finite() || !b_n.is_finite() {
        return Err(inadmissible(model, a_n, b_n, "non-finite coefficient"));
    }
    let bracket = RootBracket::default();
    match model {
        ModelKind::RiskAverse => {
            if !(2.0 * b_n - a_n > 0.0) {
                return Err(inadmissible(model, a_n, b_n, "requires 2b - a > 0"));
            }
            if !(a_n + b_n > 0.0) {
                return Err(inadmissible(model, a_n, b_n, "requires a + b > 0"));
            }
            Ok(((2.0 * b_n - a_n) / (a_n + b_n)).sqrt())
        }
        ModelKind::RiskNeutral => {
            if !(a_n + b_n > 0.0) {
                return Err(inadmissible(model, a_n, b_n, "requires a + b > 0"));
            }
            let target = a_n + b_n;
            bracket.bisect(|c| neutral_lhs(c) - target)
        }
        ModelKind::RiskSeeking => {
            if !(b_n > 0.0) {
                return Err(inadmissible(model, a_n, b_n, "requires b > 0"));
            }
            let target = 3.0 * b_n;
            bracket.bisect(|c| impact_lhs(c) - target)
        }
        ModelKind::KyleBaseline => {
            if !(b_n > 0.0) {
                return Err(inadmissible(model, a_n, b_n, "requires b > 0"));
            }
            let target = 2.0 * b_n;
            bracket.bisect(|c| impact_lhs(c) - target)
        }
    }
}

fn backstep_for(model: ModelKind, a_n: f64, b_n: f64, c_n: f64) -> Result<(f64, f64)> {
    let (a_prev, b_prev) = generic_backstep(a_n, b_n, c_n)?;
    match model {
        ModelKind::KyleBaseline => Ok((a_prev, 1.0 / (2.0 * c_n))),
        _ => Ok((a_prev, b_prev)),
    }
}

/// Solves the backward recursion for `params.n_periods` auctions.
pub fn solve(model: ModelKind, params: &MarketParams) -> Result<CoefficientPath> {
    let params = params.validate()?;
    let n_periods = params.n_periods;

    let mut a = vec![0.0; n_periods];
    let mut b = vec![0.0; n_periods];
    let mut c = vec![0.0; n_periods];
    a[n_periods - 1] = 0.0;
    b[n_periods - 1] = 0.5;
    c[n_periods - 1] = 1.0;

    for n in (1..n_periods).rev() {
        let c_n = select_c(model, a[n], b[n]).map_err(|e| e.at_period(n))?;
        let (a_prev, b_prev) = backstep_for(model, a[n], b[n], c_n).map_err(|e| e.at_period(n))?;
        if model == ModelKind::RiskAverse {
            debug_assert!({
                let lhs = 2.0 * b_prev - a_prev;
                let rhs = 2.0 * c_n / (c_n * c_n + 1.0);
                (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0)
            });
        }
        c[n - 1] = c_n;
        a[n - 1] = a_prev;
        b[n - 1] = b_prev;
    }
    Ok(CoefficientPath::from_parts_unchecked(model, a, b, c))
}

/// Risk-averse three-term relation in the unknown `x = c_{n-2}`:
/// `(c_n² + 1)(2 - x²)c_{n-1}³ - 2 sqrt(1 + c_{n-1}²) c_n x²`.
fn averse_link(c_n: f64, c_n1: f64, x: f64) -> f64 {
    (c_n * c_n + 1.0) * (2.0 - x * x) * c_n1.powi(3)
        - 2.0 * (1.0 + c_n1 * c_n1).sqrt() * c_n * x * x
}

/// Risk-neutral two-term relation in `x = c_{n-1}`.
fn neutral_link(c_n: f64, x: f64) -> f64 {
    (1.0 - x * x) * c_n * (1.0 + c_n * c_n) - x * (1.0 + x * x).sqrt()
}

/// Risk-seeking two-term relation in `x = c_{n-1}`.
fn seeking_link(c_n: f64, x: f64) -> f64 {
    impact_lhs(x) - (1.0 / c_n + 2.0 * c_n) / (c_n * c_n + 1.0)
}

/// Kyle two-term relation in `x = c_{n-1}`: `2 b_{n-1} = 1/c_n`.
fn kyle_link(c_n: f64, x: f64) -> f64 {
    impact_lhs(x) - 1.0 / c_n
}

/// Rebuilds the coefficient sequences from c-only recursions.
///
/// Besides `c_1..=c_N` this solves one auxiliary root `c_0` (the intensity
/// an extra leading period would use), which closes the closed-form
/// expressions for `a_0`, `b_0`. Requires `N >= 2`.
pub fn crosscheck_recursion(model: ModelKind, params: &MarketParams) -> Result<CoefficientPath> {
    let params = params.validate()?;
    let n_periods = params.n_periods;
    if n_periods < 2 {
        return Err(Error::Domain(
            "cross-check recursion needs at least two periods".into(),
        ));
    }
    // cs[n] = c_n for n in 0..=N, cs[0] auxiliary
    let mut cs = vec![0.0; n_periods + 1];
    cs[n_periods] = 1.0;
    let bracket = RootBracket::default();

    match model {
        ModelKind::RiskAverse => {
            cs[n_periods - 1] = SQRT_2;
            // roots near the end of trading exceed 1, so search up to sqrt(2)
            let wide = bracket.with_hi(SQRT_2);
            for n in (2..=n_periods).rev() {
                let (c_n, c_n1) = (cs[n], cs[n - 1]);
                cs[n - 2] = wide
                    .bisect(|x| averse_link(c_n, c_n1, x))
                    .map_err(|e| e.at_period(n - 2))?;
            }
        }
        ModelKind::RiskNeutral | ModelKind::RiskSeeking | ModelKind::KyleBaseline => {
            for n in (1..=n_periods).rev() {
                let c_n = cs[n];
                let root = match model {
                    ModelKind::RiskNeutral => bracket.bisect(|x| neutral_link(c_n, x)),
                    ModelKind::RiskSeeking => bracket.bisect(|x| seeking_link(c_n, x)),
                    _ => bracket.bisect(|x| kyle_link(c_n, x)),
                };
                cs[n - 1] = root.map_err(|e| e.at_period(n - 1))?;
            }
        }
    }

    let mut a = vec![0.0; n_periods];
    let mut b = vec![0.0; n_periods];
    let last = n_periods - 1;
    match model {
        ModelKind::RiskAverse => {
            for n in 0..last {
                let (c_n, c_prev) = (cs[n], if n == 0 { f64::NAN } else { cs[n - 1] });
                b[n] = if n == 0 {
                    let (c1, c0) = (cs[1], cs[0]);
                    2.0 * c1 * (1.0 + c0 * c0) / (3.0 * (c1 * c1 + 1.0) * c0 * c0)
                } else {
                    c_n * (c_n * c_n + 1.0).sqrt() * (2.0 - c_prev * c_prev)
                        / (3.0 * c_prev * c_prev)
                };
                a[n] = (2.0 - c_n * c_n) / (c_n * c_n + 1.0) * b[n];
            }
        }
        ModelKind::RiskNeutral => {
            b[last] = 0.5;
            for n in (1..=last).rev() {
                let c_n = cs[n];
                let k = 1.0 / (c_n * c_n + 1.0);
                b[n - 1] = b[n] * k * k.sqrt() + c_n * k;
            }
            for n in 0..last {
                a[n] = neutral_lhs(cs[n]) - b[n];
            }
        }
        ModelKind::RiskSeeking => {
            for n in 0..last {
                let c_n = cs[n];
                b[n] = (c_n * c_n + 1.0).sqrt() * (1.0 - c_n * c_n) / (3.0 * c_n);
            }
            b[last] = 0.5;
            for n in (1..=last).rev() {
                a[n - 1] = generic_backstep(a[n], b[n], cs[n])?.0;
            }
        }
        ModelKind::KyleBaseline => {
            for n in 0..last {
                b[n] = 1.0 / (2.0 * cs[n + 1]);
            }
            b[last] = 0.5;
            for n in (1..=last).rev() {
                a[n - 1] = generic_backstep(a[n], b[n], cs[n])?.0;
            }
        }
    }
    a[last] = 0.0;
    b[last] = 0.5;

    CoefficientPath::new(model, a, b, cs[1..].to_vec())
}
