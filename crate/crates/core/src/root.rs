//! Bracketed bisection for strictly decreasing scalar functions.

use crate::error::{Error, Result};

/// Search interval and stopping rule for [`RootBracket::bisect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    /// Stop once `hi - lo < tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RootBracket {
    /// `(1e-12, 1]`, tolerance `1e-14`, 200 iterations: every implicit
    /// trading-intensity equation has its root in there.
    fn default() -> Self {
        Self {
            lo: 1e-12,
            hi: 1.0,
            tol: 1e-14,
            max_iter: 200,
        }
    }
}

impl RootBracket {
    pub fn with_hi(self, hi: f64) -> Self {
        Self { hi, ..self }
    }

    /// Root of a decreasing `f`: requires `f(lo) > 0 >= f(hi)`.
    pub fn bisect<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let (mut lo, mut hi) = (self.lo, self.hi);
        let f_lo = f(lo);
        let f_hi = f(hi);
        if !(f_lo > 0.0 && f_hi <= 0.0) {
            return Err(Error::BracketFailure { lo, hi, f_lo, f_hi });
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        for _ in 0..self.max_iter {
            if hi - lo < self.tol {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            let v = f(mid);
            if v > 0.0 {
                lo = mid;
            } else if v < 0.0 {
                hi = mid;
            } else {
                return Ok(mid);
            }
        }
        if hi - lo < self.tol {
            Ok(0.5 * (lo + hi))
        } else {
            Err(Error::NoConvergence(self.max_iter))
        }
    }
}
