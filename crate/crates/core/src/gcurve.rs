//! Mass-contribution curves.
//!
//! `G(q)` is the share of total probability mass carried by instantiations
//! whose own probability (or density) is strictly below `q`. It is the Lorenz
//! curve of the random variable `P`, and `G(p0)` bounds the absolute error of
//! any marginal computed from the instantiations with probability `>= p0`.
//!
//! Curves come from four places: exact enumeration of a network, an empirical
//! sample, a fitted tail model and the log-normal baseline. All of them
//! implement [`MassCurve`] and carry a [`Provenance`] tag.

use std::fmt;

use libm::erfc;
use serde::{Deserialize, Serialize};

use crate::bayesnet::BayesNet;
use crate::error::{Error, Result};

/// How a sampled value contributes to mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightMode {
    /// Each value counts once. Right for logic samples, which already draw
    /// instantiations in proportion to their probability.
    Discrete,
    /// Each value is weighted by itself. Right for draws made from the
    /// density, where a density value `p` contributes `p` to the mass.
    Continuous,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Discrete => "discrete",
            WeightMode::Continuous => "continuous",
        })
    }
}

/// Ascending multiset of positive probability (or density) values.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbSample {
    values: Vec<f64>,
    mode: WeightMode,
}

impl ProbSample {
    /// Sorts `values` and checks the invariants: nonempty, finite, strictly
    /// positive, and at most 1 in discrete mode.
    pub fn new(mut values: Vec<f64>, mode: WeightMode) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        if let Some(bad) = values.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidSample(format!(
                "value {bad} is not a positive finite number"
            )));
        }
        if mode == WeightMode::Discrete {
            if let Some(bad) = values.iter().find(|&&x| x > 1.0) {
                return Err(Error::InvalidSample(format!(
                    "discrete-mode value {bad} exceeds 1"
                )));
            }
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values, mode })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of values strictly below `q`.
    pub fn count_below(&self, q: f64) -> usize {
        self.values.partition_point(|&x| x < q)
    }

    /// Empirical cdf `#{p_i < q} / n`.
    pub fn fraction_below(&self, q: f64) -> f64 {
        self.count_below(q) as f64 / self.len() as f64
    }

    /// Mass estimate: count fraction in discrete mode, weighted fraction in
    /// continuous mode. Strict inequality.
    pub fn empirical_g(&self, q: f64) -> f64 {
        let k = self.count_below(q);
        match self.mode {
            WeightMode::Discrete => k as f64 / self.len() as f64,
            WeightMode::Continuous => {
                let below: f64 = self.values[..k].iter().sum();
                below / self.values.iter().sum::<f64>()
            }
        }
    }

    /// Empirical Lorenz curve: mass of the lowest `floor(r n)` values over
    /// the total mass. Continuous mode only.
    pub fn lorenz(&self, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::OutOfDomain {
                what: "r",
                value: r,
                domain: "[0, 1]".into(),
            });
        }
        if self.mode != WeightMode::Continuous {
            return Err(Error::invalid(
                "the Lorenz curve needs a continuous-mode sample",
            ));
        }
        let k = ((r * self.len() as f64).floor() as usize).min(self.len());
        let low: f64 = self.values[..k].iter().sum();
        Ok(low / self.values.iter().sum::<f64>())
    }
}

pub fn empirical_g(sample: &ProbSample, q: f64) -> f64 {
    sample.empirical_g(q)
}

pub fn lorenz_l(sample: &ProbSample, r: f64) -> Result<f64> {
    sample.lorenz(r)
}

/// Where a curve came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ExactEnum,
    /// Closed-form analytic curve (the continuous exemplar).
    ExactClosedForm,
    Empirical,
    TailModel,
    LogNormal,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ExactEnum => "EXACT_ENUM",
            Provenance::ExactClosedForm => "EXACT_CLOSED_FORM",
            Provenance::Empirical => "EMPIRICAL",
            Provenance::TailModel => "TAIL_MODEL",
            Provenance::LogNormal => "LOGNORMAL",
        })
    }
}

/// A nondecreasing map from threshold `q` to a mass fraction in `[0, 1]`.
pub trait MassCurve {
    fn provenance(&self) -> Provenance;

    /// Mass strictly below `q`. Errors when `q` lies outside the curve's domain.
    fn mass(&self, q: f64) -> Result<f64>;
}

/// Step curve over a weighted multiset of points, `mass(q) = Σ_{x < q} w / denominator`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCurve {
    points: Vec<f64>,
    cumulative: Vec<f64>,
    denominator: f64,
    provenance: Provenance,
}

impl StepCurve {
    fn from_weighted(mut pairs: Vec<(f64, f64)>, denominator: f64, provenance: Provenance) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(pairs.len() + 1);
        cumulative.push(0.0);
        for &(_, w) in &pairs {
            acc += w;
            cumulative.push(acc);
        }
        Self {
            points: pairs.into_iter().map(|(x, _)| x).collect(),
            cumulative,
            denominator,
            provenance,
        }
    }

    /// Exact `G` of a network: every joint probability weighted by itself,
    /// not renormalized (the total is 1 up to rounding).
    pub fn exact(net: &BayesNet) -> Result<Self> {
        let mut pairs = Vec::new();
        net.for_each_instantiation(|_, p| pairs.push((p, p)))?;
        Ok(Self::from_weighted(pairs, 1.0, Provenance::ExactEnum))
    }

    pub fn empirical(sample: &ProbSample) -> Self {
        let pairs: Vec<(f64, f64)> = match sample.mode() {
            WeightMode::Discrete => sample.values().iter().map(|&x| (x, 1.0)).collect(),
            WeightMode::Continuous => sample.values().iter().map(|&x| (x, x)).collect(),
        };
        let total = pairs.iter().map(|p| p.1).sum();
        Self::from_weighted(pairs, total, Provenance::Empirical)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn at(&self, q: f64) -> f64 {
        let k = self.points.partition_point(|&x| x < q);
        (self.cumulative[k] / self.denominator).min(1.0)
    }
}

impl MassCurve for StepCurve {
    fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn mass(&self, q: f64) -> Result<f64> {
        Ok(self.at(q))
    }
}

/// `G(q) = Σ_{P(V) < q} P(V)` by enumeration.
pub fn exact_g_discrete(net: &BayesNet, q: f64) -> Result<f64> {
    let mut mass = 0.0;
    net.for_each_instantiation(|_, p| {
        if p < q {
            mass += p;
        }
    })?;
    Ok(mass)
}

/// Mean and standard deviation of `log P` with instantiations weighted
/// uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalParams {
    pub mu: f64,
    pub sigma: f64,
}

impl LogNormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::invalid(format!(
                "log-normal parameters need finite mu and sigma >= 0, got ({mu}, {sigma})"
            )));
        }
        Ok(Self { mu, sigma })
    }

    /// Normal mass of `log P` below `log q`, renormalized to `log P <= 0`.
    /// With `sigma = 0` the curve is a step: 0 for `q <= e^mu`, 1 above.
    pub fn g(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::OutOfDomain {
                what: "q",
                value: q,
                domain: "(0, 1]".into(),
            });
        }
        let lq = q.ln();
        if self.sigma == 0.0 {
            return Ok(if lq > self.mu { 1.0 } else { 0.0 });
        }
        let num = normal_cdf((lq - self.mu) / self.sigma);
        let den = normal_cdf(-self.mu / self.sigma);
        Ok((num / den).min(1.0))
    }
}

impl MassCurve for LogNormalParams {
    fn provenance(&self) -> Provenance {
        Provenance::LogNormal
    }

    fn mass(&self, q: f64) -> Result<f64> {
        self.g(q)
    }
}

/// μ and σ (population) of `log P` over all instantiations, by Welford's
/// single-pass recurrence.
pub fn lognormal_params_exact(net: &BayesNet) -> Result<LogNormalParams> {
    let mut count = 0u64;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut zero = false;
    net.for_each_instantiation(|_, p| {
        if p <= 0.0 {
            zero = true;
            return;
        }
        let x = p.ln();
        count += 1;
        let delta = x - mean;
        mean += delta / count as f64;
        m2 += delta * (x - mean);
    })?;
    if zero {
        return Err(Error::ZeroProbability);
    }
    LogNormalParams::new(mean, (m2 / count as f64).max(0.0).sqrt())
}

pub fn lognormal_g(params: &LogNormalParams, q: f64) -> Result<f64> {
    params.g(q)
}

/// Standard normal cdf.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov distance between the empirical cdf of an ascending sample and
/// a continuous reference cdf.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            (f - k as f64 / n).abs().max(((k + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// One row of a tabulated curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub q: f64,
    pub mass: f64,
    pub provenance: Provenance,
}

/// Evaluates `curve` on a grid, refusing to return a non-monotone result.
pub fn tabulate(curve: &dyn MassCurve, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut last = f64::NEG_INFINITY;
    for &q in grid {
        let mass = curve.mass(q)?;
        if mass < last {
            return Err(Error::invalid(format!(
                "{} curve decreases at q = {q}",
                curve.provenance()
            )));
        }
        last = mass;
        out.push(CurvePoint {
            q,
            mass,
            provenance: curve.provenance(),
        });
    }
    Ok(out)
}
