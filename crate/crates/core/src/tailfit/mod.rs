//! Extreme-value model of the left tail of the mass curve.
//!
//! Below a threshold `u` the mass curve is modeled as
//!
//! ```text
//! G(q) = G(u) · U(q - u; δ, α),    q0 < q <= u
//! ```
//!
//! with `U` the reversed generalized Pareto cdf ([`RgpdParams`]). `G(u)` is
//! estimated empirically; `(δ, α)` come from elemental two-point estimates
//! `(i, j)` for `j = i+1, …, m-1` with `i = max(1, floor(m/10))`, where `m`
//! is the number of sample values below `u`, combined by a robust function
//! applied separately to the `δ` and `α` lists.

mod elemental;
mod rgpd;
mod robust;
mod threshold;

use std::fmt;
use std::str::FromStr;

pub use elemental::{
    algorithm_i, compute_c, h_of_delta, solve_pair, CTable, PairEstimate, PairInput, PairSolution,
    PairStatus,
};
pub use rgpd::{rgpd_cdf, RgpdParams};
pub use robust::{lms, median};
pub use threshold::{select_threshold, ThresholdRule};

use crate::error::{Error, Result};
use crate::gcurve::{MassCurve, ProbSample, Provenance, WeightMode};

/// Smallest tail size accepted by [`algorithm_ii`].
pub const MIN_TAIL: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobustMethod {
    Median,
    Lms,
}

impl RobustMethod {
    pub fn apply(self, values: &[f64]) -> Option<f64> {
        match self {
            RobustMethod::Median => median(values),
            RobustMethod::Lms => lms(values),
        }
    }
}

impl fmt::Display for RobustMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RobustMethod::Median => "median",
            RobustMethod::Lms => "lms",
        })
    }
}

impl FromStr for RobustMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(RobustMethod::Median),
            "lms" => Ok(RobustMethod::Lms),
            _ => Err(Error::invalid(format!(
                "unknown robust method `{s}` (median|lms)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub robust: RobustMethod,
    /// Bisection stops once the bracket is narrower than this fraction of the midpoint...
    pub bisection_rel_tol: f64,
    /// ...and `|h|` at the midpoint is below this.
    pub h_tol: f64,
    pub max_iterations: usize,
    /// `d` counts as zero when `|d| <= d_zero_tol · max(|C_i (u-p_j)|, |C_j (u-p_i)|)`.
    pub d_zero_tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            robust: RobustMethod::Median,
            bisection_rel_tol: 1e-12,
            h_tol: 1e-10,
            max_iterations: 200,
            d_zero_tol: 1e-12,
        }
    }
}

impl FitConfig {
    pub fn with_robust(robust: RobustMethod) -> Self {
        Self {
            robust,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        let positive = [self.bisection_rel_tol, self.h_tol, self.d_zero_tol]
            .iter()
            .all(|t| *t > 0.0 && t.is_finite());
        if !positive || self.max_iterations == 0 {
            return Err(Error::invalid(
                "fit tolerances must be positive and max_iterations >= 1",
            ));
        }
        Ok(())
    }
}

/// Index of the fixed order statistic paired with every `j`.
pub fn first_index(m: usize) -> usize {
    (m / 10).max(1)
}

/// Algorithm II on an ascending slice. Values need only be finite; in
/// continuous mode they must also be positive so the weights make sense.
pub fn algorithm_ii_sorted(
    sorted: &[f64],
    mode: WeightMode,
    u: f64,
    config: &FitConfig,
) -> Result<(RgpdParams, Vec<PairEstimate>)> {
    config.check()?;
    if !u.is_finite() {
        return Err(Error::OutOfDomain {
            what: "u",
            value: u,
            domain: "finite".into(),
        });
    }
    if sorted
        .windows(2)
        .any(|w| w[0].is_nan() || w[1].is_nan() || w[0] > w[1])
    {
        return Err(Error::InvalidSample(
            "values must be finite and ascending".into(),
        ));
    }
    if mode == WeightMode::Continuous && sorted.first().is_some_and(|&x| x <= 0.0) {
        return Err(Error::InvalidSample(
            "continuous weights must be positive".into(),
        ));
    }
    let table = CTable::new(sorted, mode, u);
    let m = table.m();
    if m < MIN_TAIL {
        return Err(Error::InsufficientTail { m });
    }
    let i = first_index(m);
    let pairs: Vec<PairEstimate> = (i + 1..m)
        .map(|j| algorithm_i(&table, u, i, j, config))
        .collect();
    let params = aggregate(&pairs, config.robust)?;
    Ok((params, pairs))
}

/// Algorithm II on a sample.
pub fn algorithm_ii(
    sample: &ProbSample,
    u: f64,
    config: &FitConfig,
) -> Result<(RgpdParams, Vec<PairEstimate>)> {
    algorithm_ii_sorted(sample.values(), sample.mode(), u, config)
}

/// Robust combination of the usable pair estimates, componentwise.
///
/// When the pair estimates straddle `α = 0` the componentwise result can
/// pair a shape with a scale of the wrong sign; the scale is then recomputed
/// from the pairs on the same side of zero as the combined shape.
fn aggregate(pairs: &[PairEstimate], robust: RobustMethod) -> Result<RgpdParams> {
    let usable: Vec<&PairEstimate> = pairs.iter().filter(|p| p.status.is_usable()).collect();
    if usable.len() < 3 {
        return Err(Error::TooFewEstimates {
            usable: usable.len(),
        });
    }
    let alphas: Vec<f64> = usable.iter().map(|p| p.alpha).collect();
    let deltas: Vec<f64> = usable.iter().map(|p| p.delta).collect();
    let alpha = robust.apply(&alphas).expect("nonempty");
    let delta = robust.apply(&deltas).expect("nonempty");
    if let Ok(params) = RgpdParams::new(delta, alpha) {
        return Ok(params);
    }
    let same_side: Vec<f64> = usable
        .iter()
        .filter(|p| {
            if alpha < 0.0 {
                p.delta < 0.0
            } else {
                p.delta > 0.0
            }
        })
        .map(|p| p.delta)
        .collect();
    let delta = robust.apply(&same_side).unwrap_or(f64::NAN);
    RgpdParams::new(delta, alpha)
}

/// Composed left-tail estimate `G(q) = G(u) U(q - u)` on `(q0, u]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    u: f64,
    g_at_u: f64,
    params: RgpdParams,
    q0: f64,
}

impl TailModel {
    pub fn new(u: f64, g_at_u: f64, params: RgpdParams, q0: f64) -> Result<Self> {
        if q0.is_nan() || q0 >= u || !u.is_finite() {
            return Err(Error::invalid(format!(
                "tail model needs q0 < u, got q0 = {q0}, u = {u}"
            )));
        }
        if !(g_at_u > 0.0 && g_at_u <= 1.0) {
            return Err(Error::OutOfDomain {
                what: "G(u)",
                value: g_at_u,
                domain: "(0, 1]".into(),
            });
        }
        Ok(Self {
            u,
            g_at_u,
            params,
            q0,
        })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn g_at_u(&self) -> f64 {
        self.g_at_u
    }

    pub fn params(&self) -> &RgpdParams {
        &self.params
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn g(&self, q: f64) -> Result<f64> {
        if !(q > self.q0 && q <= self.u) {
            return Err(Error::OutOfDomain {
                what: "q",
                value: q,
                domain: format!("({}, {}]", self.q0, self.u),
            });
        }
        Ok(self.g_at_u * self.params.cdf(q - self.u))
    }
}

pub fn tail_g(model: &TailModel, q: f64) -> Result<f64> {
    model.g(q)
}

impl MassCurve for TailModel {
    fn provenance(&self) -> Provenance {
        Provenance::TailModel
    }

    fn mass(&self, q: f64) -> Result<f64> {
        self.g(q)
    }
}

/// Everything produced by one tail fit.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    pub model: TailModel,
    pub pairs: Vec<PairEstimate>,
    /// Sample values strictly below `u`.
    pub m: usize,
    pub robust: RobustMethod,
}

impl TailFit {
    pub fn usable_pairs(&self) -> usize {
        self.pairs.iter().filter(|p| p.status.is_usable()).count()
    }
}

/// Fits `(δ, α)` by Algorithm II and pairs them with the empirical `G(u)`;
/// lower endpoint `q0 = 0`.
pub fn fit_tail(sample: &ProbSample, u: f64, config: &FitConfig) -> Result<TailFit> {
    let (params, pairs) = algorithm_ii(sample, u, config)?;
    let model = TailModel::new(u, sample.empirical_g(u), params, 0.0)?;
    Ok(TailFit {
        model,
        pairs,
        m: sample.count_below(u),
        robust: config.robust,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256PlusPlus;

    fn rgpd_values(delta: f64, alpha: f64, m: usize, seed: u64) -> Vec<f64> {
        let p = RgpdParams::new(delta, alpha).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..m)
            .map(|_| p.quantile(rng.next_f64_open()).unwrap())
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn first_index_rule() {
        assert_eq!(first_index(5), 1);
        assert_eq!(first_index(20), 2);
        assert_eq!(first_index(319), 31);
    }

    #[test]
    fn aggregation_of_identical_estimates() {
        let pairs: Vec<PairEstimate> = (3..10)
            .map(|j| PairEstimate {
                i: 2,
                j,
                delta: 0.0936,
                alpha: 0.625,
                status: PairStatus::Ok,
            })
            .collect();
        for robust in [RobustMethod::Median, RobustMethod::Lms] {
            let p = aggregate(&pairs, robust).unwrap();
            assert_eq!((p.delta(), p.alpha()), (0.0936, 0.625));
        }
    }

    #[test]
    fn aggregation_fixes_straddling_signs() {
        let mk = |delta, alpha| PairEstimate {
            i: 1,
            j: 2,
            delta,
            alpha,
            status: PairStatus::Ok,
        };
        // even count: median alpha > 0 while median delta < 0
        let pairs = [
            mk(-9.0, -0.01),
            mk(-8.0, -0.02),
            mk(-7.0, -0.03),
            mk(2.0, 0.5),
            mk(3.0, 0.6),
            mk(4.0, 0.7),
        ];
        let p = aggregate(&pairs, RobustMethod::Median).unwrap();
        assert_eq!(p.alpha(), 0.245);
        assert_eq!(p.delta(), 3.0);
    }

    #[test]
    fn too_few_usable_estimates() {
        let pairs = [PairEstimate {
            i: 1,
            j: 2,
            delta: f64::NAN,
            alpha: f64::NAN,
            status: PairStatus::DegenerateSkipped,
        }];
        assert!(matches!(
            aggregate(&pairs, RobustMethod::Median),
            Err(Error::TooFewEstimates { usable: 0 })
        ));
    }

    #[test]
    fn small_tail_is_rejected() {
        let s = ProbSample::new(
            (1..=10).map(|k| k as f64 / 100.0).collect(),
            WeightMode::Discrete,
        )
        .unwrap();
        assert!(matches!(
            algorithm_ii(&s, 1.0, &FitConfig::default()),
            Err(Error::InsufficientTail { m: 10 })
        ));
    }

    #[test]
    fn recovers_synthetic_rgpd() {
        let v = rgpd_values(1.0, 0.5, 10_000, 1);
        let (p, pairs) =
            algorithm_ii_sorted(&v, WeightMode::Discrete, 0.0, &FitConfig::default()).unwrap();
        assert_eq!(pairs.len(), 10_000 - 1 - 1000);
        assert!((p.alpha() - 0.5).abs() <= 0.15, "alpha {}", p.alpha());
        assert!((p.delta() - 1.0).abs() <= 0.15, "delta {}", p.delta());
    }

    #[test]
    fn median_lies_within_pair_range() {
        let v = rgpd_values(-1.0, -0.5, 2000, 4);
        let (p, pairs) =
            algorithm_ii_sorted(&v, WeightMode::Discrete, 0.0, &FitConfig::default()).unwrap();
        let usable: Vec<_> = pairs.iter().filter(|q| q.status.is_usable()).collect();
        let lo = usable.iter().map(|q| q.alpha).fold(f64::INFINITY, f64::min);
        let hi = usable
            .iter()
            .map(|q| q.alpha)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(p.alpha() >= lo && p.alpha() <= hi);
    }

    #[test]
    fn tail_model_domain_and_endpoint() {
        let params = RgpdParams::new(0.0936, 0.625).unwrap();
        let model = TailModel::new(0.0951, 0.0516, params, 0.0).unwrap();
        assert_eq!(model.g(0.0951).unwrap(), 0.0516);
        assert!(model.g(0.1).is_err());
        assert!(model.g(0.0).is_err());
        let mut last = 0.0;
        for k in 1..=100 {
            let g = model.g(0.0951 * k as f64 / 100.0).unwrap();
            assert!(g >= last);
            last = g;
        }
        assert!(TailModel::new(0.1, 0.0, params, 0.0).is_err());
        assert!(TailModel::new(0.1, 0.5, params, 0.2).is_err());
    }

    #[test]
    fn robust_method_parsing() {
        assert_eq!(
            "median".parse::<RobustMethod>().unwrap(),
            RobustMethod::Median
        );
        assert_eq!("lms".parse::<RobustMethod>().unwrap(), RobustMethod::Lms);
        assert!("mean".parse::<RobustMethod>().is_err());
    }
}
