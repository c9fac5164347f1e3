//! Seeded experiment runs: discrete networks against exact enumeration and
//! the log-normal baseline, the continuous exemplar against its closed form,
//! and the truncated-marginal error bound.
//!
//! Every run is a pure function of its configuration. A discrete run builds
//! its network from `seed` (so `gen-net --seed s` reproduces it) and draws
//! its logic sample from `derive_seed(seed, 1)`.

use std::str::FromStr;

use crate::bayesnet::{random_network, BayesNet, CptRegime};
use crate::contmodel::{ContinuousDraw, ContinuousExemplar};
use crate::error::{Error, Result};
use crate::gcurve::{lognormal_params_exact, LogNormalParams, ProbSample, StepCurve};
use crate::output::{Cell, CsvTable};
use crate::rng::derive_seed;
use crate::tailfit::{fit_tail, select_threshold, FitConfig, RobustMethod, TailFit, ThresholdRule};

/// Grid of thresholds `q` for tabulated curves.
#[derive(Debug, Clone, PartialEq)]
pub enum QGrid {
    /// `count` log-spaced points from `u/1000` to `u`.
    Auto {
        count: usize,
    },
    Log {
        lo: f64,
        hi: f64,
        count: usize,
    },
    List(Vec<f64>),
}

impl Default for QGrid {
    fn default() -> Self {
        QGrid::Auto { count: 40 }
    }
}

impl FromStr for QGrid {
    type Err = Error;

    /// `auto[:<count>]`, `log:<lo>:<hi>:<count>`, or a comma-separated list.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("bad q-grid spec `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        let grid = match parts.as_slice() {
            ["auto"] => QGrid::Auto { count: 40 },
            ["auto", c] => QGrid::Auto {
                count: c.parse().map_err(|_| bad())?,
            },
            ["log", lo, hi, c] => QGrid::Log {
                lo: lo.parse().map_err(|_| bad())?,
                hi: hi.parse().map_err(|_| bad())?,
                count: c.parse().map_err(|_| bad())?,
            },
            [list] => QGrid::List(
                list.split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<_>>()?,
            ),
            _ => return Err(bad()),
        };
        // validate shape with a dummy threshold
        grid.points(1.0)?;
        Ok(grid)
    }
}

impl QGrid {
    /// Grid points for threshold `u`; strictly increasing and positive.
    pub fn points(&self, u: f64) -> Result<Vec<f64>> {
        let pts = match self {
            QGrid::Auto { count } => log_space(u / 1000.0, u, *count)?,
            QGrid::Log { lo, hi, count } => log_space(*lo, *hi, *count)?,
            QGrid::List(v) => v.clone(),
        };
        let increasing = pts.windows(2).all(|w| w[0] < w[1]);
        if pts.is_empty() || !increasing || !pts.iter().all(|&q| q > 0.0 && q.is_finite()) {
            return Err(Error::invalid(
                "q-grid must be nonempty, positive and strictly increasing",
            ));
        }
        Ok(pts)
    }
}

fn log_space(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo < hi && hi.is_finite()) || count < 2 {
        return Err(Error::invalid(format!(
            "log grid needs 0 < lo < hi and at least 2 points, got ({lo}, {hi}, {count})"
        )));
    }
    let ratio = (hi / lo).ln();
    let mut pts: Vec<f64> = (0..count)
        .map(|k| lo * (ratio * k as f64 / (count - 1) as f64).exp())
        .collect();
    pts[0] = lo;
    pts[count - 1] = hi;
    Ok(pts)
}

/// Where a discrete run's network comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSource {
    Random {
        nodes: usize,
        cardinality: usize,
        max_parents: usize,
        regime: CptRegime,
    },
    Given(BayesNet),
}

impl NetworkSource {
    pub fn random(nodes: usize, regime: CptRegime) -> Self {
        NetworkSource::Random {
            nodes,
            cardinality: 2,
            max_parents: 3,
            regime,
        }
    }

    pub fn build(&self, seed: u64) -> Result<BayesNet> {
        match self {
            NetworkSource::Random {
                nodes,
                cardinality,
                max_parents,
                regime,
            } => random_network(*nodes, *cardinality, *max_parents, *regime, seed),
            NetworkSource::Given(net) => Ok(net.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteConfig {
    pub network: NetworkSource,
    pub n: usize,
    pub seed: u64,
    pub threshold: ThresholdRule,
    pub robust: RobustMethod,
    pub q_grid: QGrid,
}

impl DiscreteConfig {
    /// 15 binary variables, 1000 logic samples, 50 values below `u`, median.
    pub fn paper_like(regime: CptRegime, seed: u64) -> Self {
        Self {
            network: NetworkSource::random(15, regime),
            n: 1000,
            seed,
            threshold: ThresholdRule::default(),
            robust: RobustMethod::Median,
            q_grid: QGrid::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteRow {
    pub q: f64,
    pub exact_g: f64,
    pub empirical_g: f64,
    pub rgpd_g: f64,
    /// NaN when the network has zero-probability instantiations.
    pub lognormal_g: f64,
}

#[derive(Debug, Clone)]
pub struct DiscreteReport {
    pub net: BayesNet,
    pub sample: ProbSample,
    pub fit: TailFit,
    pub lognormal: Option<LogNormalParams>,
    pub exact: StepCurve,
    pub rows: Vec<DiscreteRow>,
}

impl DiscreteReport {
    pub fn u(&self) -> f64 {
        self.fit.model.u()
    }

    /// Largest `|rgpd_G - exact_G|` over the grid points at or below `u`.
    pub fn max_tail_error(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.q <= self.u())
            .map(|r| (r.rgpd_g - r.exact_g).abs())
            .fold(0.0, f64::max)
    }

    /// `|lognormal_G(q) - exact_G(q)|`, NaN without log-normal parameters.
    pub fn lognormal_error_at(&self, q: f64) -> f64 {
        match self.lognormal {
            Some(p) => p.g(q).map_or(f64::NAN, |g| (g - self.exact.at(q)).abs()),
            None => f64::NAN,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&["q", "exact_G", "empirical_G", "rgpd_G", "lognormal_G"]);
        for r in &self.rows {
            t.push(vec![
                r.q.into(),
                r.exact_g.into(),
                r.empirical_g.into(),
                r.rgpd_g.into(),
                r.lognormal_g.into(),
            ]);
        }
        t.render()
    }
}

pub fn run_discrete(config: &DiscreteConfig) -> Result<DiscreteReport> {
    let net = config.network.build(config.seed)?;
    let exact = StepCurve::exact(&net)?;
    let lognormal = lognormal_params_exact(&net).ok();
    let sample = net.logic_sample(config.n, derive_seed(config.seed, 1))?;
    let u = select_threshold(&sample, config.threshold)?;
    let fit = fit_tail(&sample, u, &FitConfig::with_robust(config.robust))?;
    let grid = config.q_grid.points(u)?;
    let rows = grid
        .iter()
        .map(|&q| {
            Ok(DiscreteRow {
                q,
                exact_g: exact.at(q),
                empirical_g: sample.empirical_g(q),
                rgpd_g: if q <= u { fit.model.g(q)? } else { f64::NAN },
                lognormal_g: match (&lognormal, q <= 1.0) {
                    (Some(p), true) => p.g(q)?,
                    _ => f64::NAN,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    check_monotone(
        rows.iter()
            .map(|r| [r.exact_g, r.empirical_g, r.rgpd_g, r.lognormal_g]),
    )?;
    Ok(DiscreteReport {
        net,
        sample,
        fit,
        lognormal,
        exact,
        rows,
    })
}

/// Each column must be nondecreasing down the rows; NaN cells are skipped.
fn check_monotone<const N: usize>(rows: impl Iterator<Item = [f64; N]>) -> Result<()> {
    let mut last = [f64::NEG_INFINITY; N];
    for (k, row) in rows.enumerate() {
        for c in 0..N {
            if row[c].is_nan() {
                continue;
            }
            if row[c] < last[c] {
                return Err(Error::invalid(format!(
                    "mass column {c} decreases at row {k}"
                )));
            }
            last[c] = row[c];
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousConfig {
    pub lambda: f64,
    pub n: usize,
    pub seed: u64,
    /// Defaults to `value:0.0951·λ`.
    pub threshold: Option<ThresholdRule>,
    pub robust: RobustMethod,
    pub p_list: Vec<f64>,
    pub q_grid: QGrid,
}

impl ContinuousConfig {
    pub fn new(lambda: f64, n: usize, seed: u64) -> Self {
        Self {
            lambda,
            n,
            seed,
            threshold: None,
            robust: RobustMethod::Median,
            p_list: vec![0.05, 0.01, 0.005, 0.002],
            q_grid: QGrid::default(),
        }
    }

    pub fn threshold_rule(&self) -> ThresholdRule {
        self.threshold
            .unwrap_or(ThresholdRule::Value(0.0951 * self.lambda))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub q: f64,
    pub exact_g: f64,
    pub empirical_g: f64,
    pub rgpd_g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub p: f64,
    pub exact_f: f64,
    pub exact_g: f64,
    /// NaN for `p` above the threshold.
    pub g_hat: f64,
}

#[derive(Debug, Clone)]
pub struct ContinuousReport {
    pub model: ContinuousExemplar,
    pub draws: Vec<ContinuousDraw>,
    pub sample: ProbSample,
    pub fit: TailFit,
    pub curve: Vec<CurveRow>,
    pub table: Vec<TableRow>,
}

impl ContinuousReport {
    pub fn curve_csv(&self) -> String {
        let mut t = CsvTable::new(&["q", "exact_G", "empirical_G", "rgpd_G"]);
        for r in &self.curve {
            t.push(vec![
                r.q.into(),
                r.exact_g.into(),
                r.empirical_g.into(),
                r.rgpd_g.into(),
            ]);
        }
        t.render()
    }

    pub fn table_csv(&self) -> String {
        let mut t = CsvTable::new(&["p", "F", "G", "G_hat"]);
        for r in &self.table {
            t.push(vec![
                r.p.into(),
                r.exact_f.into(),
                r.exact_g.into(),
                r.g_hat.into(),
            ]);
        }
        t.render()
    }
}

pub fn run_continuous(config: &ContinuousConfig) -> Result<ContinuousReport> {
    let model = ContinuousExemplar::new(config.lambda)?;
    let (draws, sample) = model.sample(config.n, config.seed)?;
    let u = select_threshold(&sample, config.threshold_rule())?;
    let fit = fit_tail(&sample, u, &FitConfig::with_robust(config.robust))?;
    let tail = |q: f64| if q <= u { fit.model.g(q) } else { Ok(f64::NAN) };
    let curve = config
        .q_grid
        .points(u)?
        .into_iter()
        .map(|q| {
            Ok(CurveRow {
                q,
                exact_g: model.exact_g(q.min(model.lambda()))?,
                empirical_g: sample.empirical_g(q),
                rgpd_g: tail(q)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    check_monotone(curve.iter().map(|r| [r.exact_g, r.empirical_g, r.rgpd_g]))?;
    let table = config
        .p_list
        .iter()
        .map(|&p| {
            Ok(TableRow {
                p,
                exact_f: model.exact_cdf(p),
                exact_g: model.exact_g(p)?,
                g_hat: tail(p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuousReport {
        model,
        draws,
        sample,
        fit,
        curve,
        table,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub p0: f64,
    pub exact_g: f64,
    pub max_marginal_error: f64,
    pub bound_satisfied: bool,
}

/// Slack allowed for rounding when checking `error <= G(p0)`.
pub const BOUND_SLACK: f64 = 1e-12;

/// For each `p0`: the truncated-marginal error against `G(p0)`.
pub fn run_marginal_bound(net: &BayesNet, p0_list: &[f64]) -> Result<Vec<BoundRow>> {
    let exact = net.exact_marginals()?;
    let curve = StepCurve::exact(net)?;
    p0_list
        .iter()
        .map(|&p0| {
            let truncated = net.truncated_marginals(p0)?;
            let err = truncated.max_abs_error(&exact);
            let g = curve.at(p0);
            Ok(BoundRow {
                p0,
                exact_g: g,
                max_marginal_error: err,
                bound_satisfied: err <= g + BOUND_SLACK,
            })
        })
        .collect()
}

pub fn bound_csv(rows: &[BoundRow]) -> String {
    let mut t = CsvTable::new(&["p0", "exact_G", "max_marginal_error", "bound_satisfied"]);
    for r in rows {
        t.push(vec![
            r.p0.into(),
            r.exact_g.into(),
            r.max_marginal_error.into(),
            Cell::Bool(r.bound_satisfied),
        ]);
    }
    t.render()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayesnet::fixtures::chain;

    #[test]
    fn q_grid_parsing_and_points() {
        let g: QGrid = "auto".parse().unwrap();
        let pts = g.points(0.1).unwrap();
        assert_eq!(pts.len(), 40);
        assert_eq!(pts[0], 1e-4);
        assert_eq!(pts[39], 0.1);
        let g: QGrid = "log:1e-6:1e-3:4".parse().unwrap();
        let pts = g.points(123.0).unwrap();
        assert!((pts[1] - 1e-5).abs() < 1e-18);
        let g: QGrid = "0.002,0.005,0.01".parse().unwrap();
        assert_eq!(g.points(1.0).unwrap(), vec![0.002, 0.005, 0.01]);
        for bad in ["0.01,0.005", "log:1:0.5:3", "auto:1", "x", "-1,2"] {
            assert!(bad.parse::<QGrid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn marginal_bound_on_four_point_net() {
        let net = chain(0.2, 0.7, 0.3);
        let rows = run_marginal_bound(&net, &[0.0, 0.1]).unwrap();
        assert_eq!(rows[0].max_marginal_error, 0.0);
        assert!(rows[0].bound_satisfied);
        assert!((rows[1].max_marginal_error - 0.06).abs() < 1e-12);
        assert!((rows[1].exact_g - 0.06).abs() < 1e-12);
        assert!(rows[1].bound_satisfied);
        let csv = bound_csv(&rows);
        assert!(csv.starts_with("p0,exact_G,max_marginal_error,bound_satisfied\n"));
    }

    #[test]
    fn discrete_run_is_deterministic() {
        let cfg = DiscreteConfig::paper_like(CptRegime::UnitUniform, 3);
        let a = run_discrete(&cfg).unwrap();
        let b = run_discrete(&cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 40);
        assert_eq!(a.sample.count_below(a.u()), 50);
    }

    #[test]
    fn continuous_run_table_columns() {
        let r = run_continuous(&ContinuousConfig::new(1.0, 1000, 1)).unwrap();
        assert_eq!(r.table.len(), 4);
        assert!((r.table[0].exact_f - 0.1998).abs() < 1e-4);
        assert!((r.table[0].exact_g - 0.0174786613677700).abs() < 1e-14);
        assert!(r.table.iter().all(|t| t.g_hat.is_finite()));
        assert_eq!(r.draws.len(), 1000);

        let mut two = ContinuousConfig::new(2.0, 1000, 1);
        two.p_list = vec![0.5, 2.0];
        let r = run_continuous(&two).unwrap();
        assert_eq!(r.table[1].exact_g, 1.0);
        assert_eq!(r.table[1].exact_f, 1.0);
        assert!(r.table[1].g_hat.is_nan());
    }
}
