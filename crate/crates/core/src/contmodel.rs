//! Closed-form continuous exemplar.
//!
//! Three variables: `X1 ~ Exp(λ)`, `X2 | X1 ~ Exp(rate X1)` and
//! `X3 | X1 ~ Uniform(0, X1)`. The joint density at a draw is
//! `P = λ exp(-X1 (λ + X2))`, whose law is known exactly:
//!
//! ```text
//! f(p) = log(λ/p) / λ                    0 < p <= λ
//! F(p) = p (1 - log(p/λ)) / λ
//! G(p) = p² (1 + 2 log(λ/p)) / λ²
//! ```
//!
//! which makes it the reference case for the continuous-weight estimators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcurve::{MassCurve, ProbSample, Provenance, WeightMode};
use crate::rng::Xoshiro256PlusPlus;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousExemplar {
    lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousDraw {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub p: f64,
}

impl ContinuousExemplar {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::OutOfDomain {
                what: "lambda",
                value: lambda,
                domain: "(0, inf)".into(),
            });
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Joint density at `(x1, x2, ·)`; independent of `x3`.
    pub fn density(&self, x1: f64, x2: f64) -> f64 {
        self.lambda * (-x1 * (self.lambda + x2)).exp()
    }

    /// `n` draws by inverse-cdf transforms of open uniforms, taken in the
    /// order x1, x2, x3 per draw, plus the sorted continuous-mode sample of
    /// their densities.
    pub fn sample(&self, n: usize, seed: u64) -> Result<(Vec<ContinuousDraw>, ProbSample)> {
        if n == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let draws: Vec<ContinuousDraw> = (0..n)
            .map(|_| {
                let x1 = rng.exponential(self.lambda);
                let x2 = rng.exponential(x1);
                let x3 = rng.next_f64_open() * x1;
                ContinuousDraw {
                    x1,
                    x2,
                    x3,
                    p: self.density(x1, x2),
                }
            })
            .collect();
        let sample = ProbSample::new(draws.iter().map(|d| d.p).collect(), WeightMode::Continuous)?;
        Ok((draws, sample))
    }

    fn check_support(&self, p: f64, lower_closed: bool) -> Result<()> {
        let ok = if lower_closed { p >= 0.0 } else { p > 0.0 };
        if ok && p <= self.lambda {
            Ok(())
        } else {
            let open = if lower_closed { "[" } else { "(" };
            Err(Error::OutOfDomain {
                what: "p",
                value: p,
                domain: format!("{open}0, {}]", self.lambda),
            })
        }
    }

    pub fn exact_f(&self, p: f64) -> Result<f64> {
        self.check_support(p, false)?;
        Ok((self.lambda / p).ln() / self.lambda)
    }

    /// Cdf of `P`, clamped to 0 below the support and 1 above it.
    pub fn exact_cdf(&self, p: f64) -> f64 {
        if p <= 0.0 {
            0.0
        } else if p >= self.lambda {
            1.0
        } else {
            let r = p / self.lambda;
            r * (1.0 - r.ln())
        }
    }

    /// Mass curve; `G(0) = 0` by continuity.
    pub fn exact_g(&self, p: f64) -> Result<f64> {
        self.check_support(p, true)?;
        if p == 0.0 {
            return Ok(0.0);
        }
        let r = p / self.lambda;
        Ok((r * r * (1.0 - 2.0 * r.ln())).min(1.0))
    }

    /// `E[P] = λ / 4`.
    pub fn mean(&self) -> f64 {
        self.lambda / 4.0
    }
}

impl MassCurve for ContinuousExemplar {
    fn provenance(&self) -> Provenance {
        Provenance::ExactClosedForm
    }

    fn mass(&self, q: f64) -> Result<f64> {
        self.exact_g(q.min(self.lambda))
    }
}
