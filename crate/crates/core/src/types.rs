//! Domain types shared by the solver, the path builder and the simulator.
//!
//! Index convention, used identically everywhere:
//!
//! | sequence            | periods     | storage                 |
//! |---------------------|-------------|-------------------------|
//! | `a_n`, `b_n`        | `0..=N-1`   | `a[n]`, `b[n]`          |
//! | `c_n`, `β_n`, `λ_n` | `1..=N`     | `c[n-1]`, ...           |
//! | `Σ_n`               | `0..=N`     | `sigma[n]`              |
//! | `α_n`, `δ_n`        | `0..=N-1`   | `alpha[n]`, `delta[n]`  |
//!
//! The one-based sequences are read through accessor methods (`c(n)`,
//! `beta(n)`, `lambda(n)`) so callers never do the offset by hand.
//!
//! Units are carried by documentation only: `Σ` in price², `σ_u` in shares
//! per √time, `β` in shares per price, `λ` in price per share, `α` in shares
//! per price and `δ` in price·shares.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which equilibrium concept is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Kyle (1985): the insider takes each period's pricing rule as given.
    KyleBaseline,
    /// Model 1: maximize guaranteed profits first, then risky profits.
    RiskAverse,
    /// Model 2: maximize the ex-ante expectation of total profits.
    RiskNeutral,
    /// Model 3: maximize risky profits first, then guaranteed profits.
    RiskSeeking,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::KyleBaseline,
        ModelKind::RiskAverse,
        ModelKind::RiskNeutral,
        ModelKind::RiskSeeking,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::KyleBaseline => "kyle",
            ModelKind::RiskAverse => "averse",
            ModelKind::RiskNeutral => "neutral",
            ModelKind::RiskSeeking => "seeking",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownModel(pub String);

impl fmt::Display for UnknownModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown model `{}` (expected kyle, averse, neutral or seeking)",
            self.0
        )
    }
}

impl std::error::Error for UnknownModel {}

impl FromStr for ModelKind {
    type Err = UnknownModel;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "kyle" => Ok(ModelKind::KyleBaseline),
            "averse" => Ok(ModelKind::RiskAverse),
            "neutral" => Ok(ModelKind::RiskNeutral),
            "seeking" => Ok(ModelKind::RiskSeeking),
            other => Err(UnknownModel(other.to_string())),
        }
    }
}

/// Exogenous primitives of one economy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Prior variance `Σ_0` of the liquidation value.
    pub sigma0_sq: f64,
    /// Noise-trader volatility `σ_u`; per-period noise variance is `σ_u²Δt`.
    pub sigma_u: f64,
    /// Number of auctions `N`.
    pub n_periods: usize,
    /// Prior mean `p_0` of the liquidation value.
    pub p0: f64,
}

impl MarketParams {
    pub fn new(sigma0_sq: f64, sigma_u: f64, n_periods: usize) -> Result<Self> {
        Self {
            sigma0_sq,
            sigma_u,
            n_periods,
            p0: 0.0,
        }
        .validate()
    }

    pub fn with_p0(mut self, p0: f64) -> Result<Self> {
        self.p0 = p0;
        self.validate()
    }

    /// Returns `self` unchanged when every invariant holds.
    pub fn validate(self) -> Result<Self> {
        // negated comparisons so NaN is rejected too
        if !(self.sigma0_sq > 0.0) || !self.sigma0_sq.is_finite() {
            return Err(Error::NonPositiveVariance(self.sigma0_sq));
        }
        if !(self.sigma_u > 0.0) || !self.sigma_u.is_finite() {
            return Err(Error::NonPositiveNoise(self.sigma_u));
        }
        if self.n_periods == 0 {
            return Err(Error::ZeroPeriods);
        }
        if !self.p0.is_finite() {
            return Err(Error::NonFiniteMean(self.p0));
        }
        Ok(self)
    }

    /// `Δt = 1/N`. Every module goes through this.
    #[inline]
    pub fn dt(&self) -> f64 {
        1.0 / self.n_periods as f64
    }

    /// Per-period camouflage scale `σ_u Δt^{1/2}`.
    #[inline]
    pub fn noise_scale(&self) -> f64 {
        self.sigma_u * self.dt().sqrt()
    }

    /// Per-period noise variance `σ_u² Δt`.
    #[inline]
    pub fn noise_var(&self) -> f64 {
        self.sigma_u * self.sigma_u * self.dt()
    }
}

/// Dimensionless backward-recursion sequences `{a_n}`, `{b_n}`, `{c_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPath {
    model: ModelKind,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl CoefficientPath {
    /// Builds a path from raw sequences, checking lengths, terminal values
    /// and `c_n > 0`. `c` holds `c_1..=c_N`.
    pub fn new(model: ModelKind, a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let n = c.len();
        if n == 0 || a.len() != n || b.len() != n {
            return Err(Error::InvalidCoefficients(format!(
                "length mismatch: a = {}, b = {}, c = {}",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        if a[n - 1] != 0.0 || b[n - 1] != 0.5 || c[n - 1] != 1.0 {
            return Err(Error::InvalidCoefficients(
                "terminal values must be a_{N-1} = 0, b_{N-1} = 1/2, c_N = 1".into(),
            ));
        }
        if let Some(bad) = c.iter().find(|&&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::NonPositiveC(*bad));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCoefficients("non-finite a or b".into()));
        }
        Ok(Self { model, a, b, c })
    }

    pub(crate) fn from_parts_unchecked(
        model: ModelKind,
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
    ) -> Self {
        Self { model, a, b, c }
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn n_periods(&self) -> usize {
        self.c.len()
    }

    /// `a_n` for `n` in `0..N`.
    pub fn a(&self, n: usize) -> f64 {
        self.a[n]
    }

    /// `b_n` for `n` in `0..N`.
    pub fn b(&self, n: usize) -> f64 {
        self.b[n]
    }

    /// `c_n` for `n` in `1..=N`.
    pub fn c(&self, n: usize) -> f64 {
        assert!(n >= 1, "c is indexed from 1");
        self.c[n - 1]
    }

    pub fn a_seq(&self) -> &[f64] {
        &self.a
    }

    pub fn b_seq(&self) -> &[f64] {
        &self.b
    }

    /// `c_1..=c_N`, zero-based storage.
    pub fn c_seq(&self) -> &[f64] {
        &self.c
    }
}

/// Economic equilibrium sequences for one economy.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPath {
    pub(crate) model: ModelKind,
    pub(crate) beta: Vec<f64>,
    pub(crate) lambda: Vec<f64>,
    pub(crate) sigma: Vec<f64>,
    pub(crate) log_sigma: Vec<f64>,
    pub(crate) alpha: Vec<f64>,
    pub(crate) delta: Vec<f64>,
    pub(crate) dt: f64,
    pub(crate) sigma_underflow: bool,
}

impl EquilibriumPath {
    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn n_periods(&self) -> usize {
        self.beta.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `β_n`, `n` in `1..=N`.
    pub fn beta(&self, n: usize) -> f64 {
        assert!(n >= 1, "beta is indexed from 1");
        self.beta[n - 1]
    }

    /// `λ_n`, `n` in `1..=N`.
    pub fn lambda(&self, n: usize) -> f64 {
        assert!(n >= 1, "lambda is indexed from 1");
        self.lambda[n - 1]
    }

    /// `Σ_n`, `n` in `0..=N`.
    pub fn sigma(&self, n: usize) -> f64 {
        self.sigma[n]
    }

    /// `ln Σ_n`, exact even where `Σ_n` itself underflowed.
    pub fn log_sigma(&self, n: usize) -> f64 {
        self.log_sigma[n]
    }

    /// `α_n`, `n` in `0..N`.
    pub fn alpha(&self, n: usize) -> f64 {
        self.alpha[n]
    }

    /// `δ_n`, `n` in `0..N`.
    pub fn delta(&self, n: usize) -> f64 {
        self.delta[n]
    }

    pub fn beta_seq(&self) -> &[f64] {
        &self.beta
    }

    pub fn lambda_seq(&self) -> &[f64] {
        &self.lambda
    }

    pub fn sigma_seq(&self) -> &[f64] {
        &self.sigma
    }

    pub fn alpha_seq(&self) -> &[f64] {
        &self.alpha
    }

    pub fn delta_seq(&self) -> &[f64] {
        &self.delta
    }

    /// True when some `Σ_n` fell below the smallest positive normal `f64`
    /// and was clamped to it.
    pub fn sigma_underflow(&self) -> bool {
        self.sigma_underflow
    }

    /// Ex-ante expected total profit `α_0 Σ_0 + δ_0`.
    pub fn ex_ante_profit(&self) -> f64 {
        self.alpha[0] * self.sigma[0] + self.delta[0]
    }
}
