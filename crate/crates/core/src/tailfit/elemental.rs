//! Elemental estimates of `(δ, α)` from two order statistics.
//!
//! For a pair `p_i < p_j < u` with log-ratios `C_i < C_j < 0`, matching the
//! RGPD at both points gives `log(1 + (p - u)/δ) = α C`. Eliminating `α`
//! leaves one equation in `δ`, whose finite root is a zero of
//!
//! ```text
//! h(δ) = C_i log(1 + (p_j - u)/δ) - C_j log(1 + (p_i - u)/δ)
//! ```
//!
//! on `(-inf, 0) ∪ (u - p_i, inf)`. With `d = C_i (u - p_j) - C_j (u - p_i)`
//! and the critical point `δ0 = (C_i - C_j)(u - p_i)(u - p_j) / d`, the root
//! is unique and lies in `(δ0, 0)` when `d > 0` and in `(u - p_i, δ0)` when
//! `d < 0`. `h` tends to `-inf` at `0-` and at `(u - p_i)+`, and `h(δ0) > 0`,
//! so both brackets have known endpoint signs and plain bisection applies.

use std::fmt;

use super::FitConfig;
use crate::error::{Error, Result};
use crate::gcurve::WeightMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStatus {
    Ok,
    /// Tied values, tied C values or an empty numerator.
    DegenerateSkipped,
    /// `d = 0`: exponential branch.
    AlphaZero,
    /// No usable root was found; the pair is dropped.
    NumericalFailure,
}

impl PairStatus {
    pub fn is_usable(self) -> bool {
        matches!(self, PairStatus::Ok | PairStatus::AlphaZero)
    }
}

impl fmt::Display for PairStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairStatus::Ok => "OK",
            PairStatus::DegenerateSkipped => "DEGENERATE_SKIPPED",
            PairStatus::AlphaZero => "ALPHA_ZERO",
            PairStatus::NumericalFailure => "NUMERICAL_FAILURE",
        })
    }
}

/// One elemental estimate. Indices are 1-based positions among the values
/// below the threshold. `delta`/`alpha` are NaN unless the status is usable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEstimate {
    pub i: usize,
    pub j: usize,
    pub delta: f64,
    pub alpha: f64,
    pub status: PairStatus,
}

/// Inputs to the pair equation, in original (unshifted) coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairInput {
    pub p_i: f64,
    pub p_j: f64,
    pub c_i: f64,
    pub c_j: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSolution {
    pub delta: f64,
    pub alpha: f64,
    pub status: PairStatus,
}

impl PairSolution {
    fn failed(status: PairStatus) -> Self {
        Self {
            delta: f64::NAN,
            alpha: f64::NAN,
            status,
        }
    }
}

impl PairInput {
    /// `d = C_i (u - p_j) - C_j (u - p_i)`.
    pub fn d(&self) -> f64 {
        self.c_i * (self.u - self.p_j) - self.c_j * (self.u - self.p_i)
    }

    /// Critical point of `h`.
    pub fn delta0(&self) -> f64 {
        (self.c_i - self.c_j) * (self.u - self.p_i) * (self.u - self.p_j) / self.d()
    }

    /// `h(δ)` without domain checks; a log argument that rounds to zero gives `-inf`.
    fn h(&self, delta: f64) -> f64 {
        self.c_i * log_excess(self.u - self.p_j, delta)
            - self.c_j * log_excess(self.u - self.p_i, delta)
    }

    /// Bracket `(lo, hi)` predicted by the sign of `d`. `None` when `d = 0`.
    pub fn bracket(&self) -> Option<(f64, f64)> {
        let d = self.d();
        if d > 0.0 {
            Some((self.delta0(), 0.0))
        } else if d < 0.0 {
            Some((self.u - self.p_i, self.delta0()))
        } else {
            None
        }
    }

    fn is_degenerate(&self) -> bool {
        let finite = [self.p_i, self.p_j, self.c_i, self.c_j, self.u]
            .iter()
            .all(|x| x.is_finite());
        !(finite
            && self.p_i < self.p_j
            && self.p_j < self.u
            && self.c_i < self.c_j
            && self.c_j < 0.0)
    }
}

/// `ln(1 - a/δ)`. Near the singular point `δ = a` the difference `δ - a` is
/// exact, so it is formed directly instead of going through `a/δ`.
fn log_excess(a: f64, delta: f64) -> f64 {
    let ratio = a / delta;
    if (0.5..=2.0).contains(&ratio) {
        ((delta - a) / delta).ln()
    } else {
        (-ratio).ln_1p()
    }
}

/// `h(δ)` with the domain enforced.
pub fn h_of_delta(delta: f64, c_i: f64, c_j: f64, p_i: f64, p_j: f64, u: f64) -> Result<f64> {
    let in_domain = delta.is_finite()
        && delta != 0.0
        && 1.0 + (p_j - u) / delta > 0.0
        && 1.0 + (p_i - u) / delta > 0.0;
    if !in_domain {
        return Err(Error::OutOfDomain {
            what: "delta",
            value: delta,
            domain: format!("(-inf, 0) ∪ ({}, inf)", u - p_i),
        });
    }
    Ok(PairInput {
        p_i,
        p_j,
        c_i,
        c_j,
        u,
    }
    .h(delta))
}

/// Solves the pair equation for `(δ, α)`.
pub fn solve_pair(input: &PairInput, config: &FitConfig) -> PairSolution {
    if input.is_degenerate() {
        return PairSolution::failed(PairStatus::DegenerateSkipped);
    }
    let a = input.u - input.p_i;
    let b = input.u - input.p_j;
    let d = input.d();
    let scale = (input.c_i * b).abs().max((input.c_j * a).abs());
    if d.abs() <= config.d_zero_tol * scale {
        return PairSolution {
            delta: (input.p_i - input.u) / input.c_i,
            alpha: 0.0,
            status: PairStatus::AlphaZero,
        };
    }

    let delta0 = input.delta0();
    // the root sits between δ0 (h > 0) and a singular end (h -> -inf)
    let singular = if d > 0.0 { 0.0 } else { a };
    if !(delta0.is_finite() && input.h(delta0) > 0.0) {
        return PairSolution::failed(PairStatus::NumericalFailure);
    }
    let Some(delta) = bisect(|x| input.h(x), singular, delta0, config) else {
        return PairSolution::failed(PairStatus::NumericalFailure);
    };
    let alpha = log_excess(a, delta) / input.c_i;
    let sign_ok = (delta < 0.0 && alpha < 0.0) || (delta > 0.0 && alpha > 0.0);
    if !(alpha.is_finite() && sign_ok) {
        return PairSolution::failed(PairStatus::NumericalFailure);
    }
    PairSolution {
        delta,
        alpha,
        status: PairStatus::Ok,
    }
}

/// Bisection on the open interval between `neg_end` (where `f < 0`) and
/// `pos_end` (where `f > 0`). Neither endpoint is evaluated. Both ends share
/// a sign (one may be zero), so the interval is halved in the ordering of
/// the magnitudes' bit patterns: that splits by exponent while the ends are
/// orders of magnitude apart and by value once they are close, and it runs
/// out of doubles after at most 64 steps. Returns the evaluated midpoint
/// with the smallest `|f|`.
fn bisect(f: impl Fn(f64) -> f64, neg_end: f64, pos_end: f64, config: &FitConfig) -> Option<f64> {
    let sign = if neg_end + pos_end < 0.0 { -1.0 } else { 1.0 };
    let key = |x: f64| x.abs().to_bits();
    let (mut neg, mut pos) = (key(neg_end), key(pos_end));
    let mut best: Option<(f64, f64)> = None;
    for _ in 0..config.max_iterations {
        let mid_key = neg.min(pos) + neg.abs_diff(pos) / 2;
        if mid_key == neg || mid_key == pos {
            break;
        }
        let mid = sign * f64::from_bits(mid_key);
        let value = f(mid);
        if value.is_nan() {
            return None;
        }
        if best.is_none_or(|(_, v)| value.abs() < v) {
            best = Some((mid, value.abs()));
        }
        if value == 0.0 {
            break;
        }
        if value < 0.0 {
            neg = mid_key;
        } else {
            pos = mid_key;
        }
        let width = (f64::from_bits(pos) - f64::from_bits(neg)).abs();
        if width <= config.bisection_rel_tol * mid.abs() && value.abs() <= config.h_tol {
            break;
        }
    }
    best.map(|(x, _)| x)
}

/// Log-ratios `C_k` for the values below a threshold, indexed 1-based.
///
/// Discrete: `C_k = log(#{p < p_k} / m)`. Continuous:
/// `C_k = log(Σ_{p < p_k} p / Σ_{p < u} p)`. Ties share the count of their
/// first occurrence.
#[derive(Debug, Clone)]
pub struct CTable<'a> {
    below: &'a [f64],
    mode: WeightMode,
    prefix: Vec<f64>,
}

impl<'a> CTable<'a> {
    /// `sorted` must be ascending; only the values strictly below `u` are used.
    pub fn new(sorted: &'a [f64], mode: WeightMode, u: f64) -> Self {
        let m = sorted.partition_point(|&x| x < u);
        let below = &sorted[..m];
        let prefix = match mode {
            WeightMode::Discrete => Vec::new(),
            WeightMode::Continuous => {
                let mut acc = 0.0;
                std::iter::once(0.0)
                    .chain(below.iter().map(|&x| {
                        acc += x;
                        acc
                    }))
                    .collect()
            }
        };
        Self {
            below,
            mode,
            prefix,
        }
    }

    pub fn m(&self) -> usize {
        self.below.len()
    }

    pub fn value(&self, k: usize) -> f64 {
        self.below[k - 1]
    }

    /// `C_k`, or `None` when no value lies strictly below `p_k`.
    pub fn c(&self, k: usize) -> Option<f64> {
        assert!(
            k >= 1 && k <= self.m(),
            "order statistic {k} out of 1..={}",
            self.m()
        );
        let lower = self.below.partition_point(|&x| x < self.below[k - 1]);
        if lower == 0 {
            return None;
        }
        let ratio = match self.mode {
            WeightMode::Discrete => lower as f64 / self.m() as f64,
            WeightMode::Continuous => self.prefix[lower] / self.prefix[self.m()],
        };
        Some(ratio.ln())
    }
}

/// `C_i` for the `i`-th smallest value below `u` (1-based); `None` signals
/// a degenerate (empty) numerator.
pub fn compute_c(sorted: &[f64], mode: WeightMode, u: f64, i: usize) -> Option<f64> {
    CTable::new(sorted, mode, u).c(i)
}

/// Algorithm I on order statistics `i < j` of the values below `u`.
pub fn algorithm_i(
    table: &CTable<'_>,
    u: f64,
    i: usize,
    j: usize,
    config: &FitConfig,
) -> PairEstimate {
    let solution = match (table.c(i), table.c(j)) {
        (Some(c_i), Some(c_j)) if i < j => solve_pair(
            &PairInput {
                p_i: table.value(i),
                p_j: table.value(j),
                c_i,
                c_j,
                u,
            },
            config,
        ),
        _ => PairSolution::failed(PairStatus::DegenerateSkipped),
    };
    PairEstimate {
        i,
        j,
        delta: solution.delta,
        alpha: solution.alpha,
        status: solution.status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> FitConfig {
        FitConfig::default()
    }

    #[test]
    fn c_values() {
        let values = [1e-3, 2e-3, 3e-3, 4e-3, 5e-3, 7e-3];
        let u = 6e-3;
        let d = compute_c(&values, WeightMode::Discrete, u, 3).unwrap();
        assert!((d - (0.4f64).ln()).abs() < 1e-15);
        let c = compute_c(&values, WeightMode::Continuous, u, 3).unwrap();
        assert!((c - (0.2f64).ln()).abs() < 1e-12);
        assert_eq!(compute_c(&values, WeightMode::Discrete, u, 1), None);
        let t = CTable::new(&values, WeightMode::Discrete, u);
        assert_eq!(t.m(), 5);
        let cs: Vec<f64> = (2..=5).map(|k| t.c(k).unwrap()).collect();
        assert!(cs.windows(2).all(|w| w[0] <= w[1]));
        assert!(cs.iter().all(|&c| c <= 0.0));
    }

    #[test]
    fn tied_values_share_c() {
        let values = [1.0, 2.0, 2.0, 3.0];
        let t = CTable::new(&values, WeightMode::Discrete, 4.0);
        assert_eq!(t.c(2), t.c(3));
    }

    #[test]
    fn h_limits_and_symmetry() {
        let h_big = h_of_delta(1e12, -1.0, -0.5, 0.2, 0.5, 1.0).unwrap();
        let h_neg = h_of_delta(-1e12, -1.0, -0.5, 0.2, 0.5, 1.0).unwrap();
        assert!(h_big.abs() < 1e-9 && h_neg.abs() < 1e-9);
        for delta in [-3.0, -0.1, 0.95, 5.0] {
            assert_eq!(h_of_delta(delta, -0.7, -0.7, 0.1, 0.1, 1.0).unwrap(), 0.0);
        }
        assert!(h_of_delta(0.5, -1.0, -0.5, 0.2, 0.5, 1.0).is_err());
        assert!(h_of_delta(0.0, -1.0, -0.5, 0.2, 0.5, 1.0).is_err());
    }

    fn constructed(delta: f64, alpha: f64, p_i: f64, p_j: f64, u: f64) -> PairInput {
        let c = |p: f64| ((p - u) / delta).ln_1p() / alpha;
        PairInput {
            p_i,
            p_j,
            c_i: c(p_i),
            c_j: c(p_j),
            u,
        }
    }

    #[test]
    fn recovers_constructed_parameters() {
        let input = PairInput {
            p_i: -0.6,
            p_j: -0.3,
            c_i: 2.0 * 0.4f64.ln(),
            c_j: 2.0 * 0.7f64.ln(),
            u: 0.0,
        };
        let sol = solve_pair(&input, &cfg());
        assert_eq!(sol.status, PairStatus::Ok);
        assert!((sol.delta - 1.0).abs() < 1e-9, "{}", sol.delta);
        assert!((sol.alpha - 0.5).abs() < 1e-9, "{}", sol.alpha);
        assert!(
            h_of_delta(1.0, input.c_i, input.c_j, input.p_i, input.p_j, 0.0)
                .unwrap()
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn recovers_negative_shape() {
        let input = constructed(-0.4, -0.8, 0.1, 0.6, 1.0);
        let sol = solve_pair(&input, &cfg());
        assert_eq!(sol.status, PairStatus::Ok);
        assert!((sol.delta + 0.4).abs() < 1e-9 * 0.4);
        assert!((sol.alpha + 0.8).abs() < 1e-9);
    }

    #[test]
    fn exponential_pair_is_alpha_zero() {
        let delta = 0.25;
        let (u, p_i, p_j) = (1.0, 0.5, 0.75);
        let input = PairInput {
            p_i,
            p_j,
            c_i: (p_i - u) / delta,
            c_j: (p_j - u) / delta,
            u,
        };
        let sol = solve_pair(&input, &cfg());
        assert_eq!(sol.status, PairStatus::AlphaZero);
        assert_eq!(sol.alpha, 0.0);
        assert!((sol.delta - delta).abs() < 1e-15);
    }

    #[test]
    fn tied_pair_is_skipped() {
        let input = PairInput {
            p_i: 0.3,
            p_j: 0.3,
            c_i: -1.0,
            c_j: -0.5,
            u: 1.0,
        };
        assert_eq!(
            solve_pair(&input, &cfg()).status,
            PairStatus::DegenerateSkipped
        );
        let values = [0.1, 0.2, 0.2, 0.3, 0.4];
        let t = CTable::new(&values, WeightMode::Discrete, 1.0);
        assert_eq!(
            algorithm_i(&t, 1.0, 2, 3, &cfg()).status,
            PairStatus::DegenerateSkipped
        );
        assert_eq!(
            algorithm_i(&t, 1.0, 1, 3, &cfg()).status,
            PairStatus::DegenerateSkipped
        );
        assert_eq!(algorithm_i(&t, 1.0, 2, 4, &cfg()).status, PairStatus::Ok);
    }

    #[test]
    fn roots_near_zero_and_near_the_pole() {
        let config = FitConfig::default();
        // root around -4e-68, below the reach of plain midpoint halving
        let tiny = PairInput {
            p_i: -3.484555018943154e-5,
            p_j: -2.142464087320099e-5,
            c_i: -5.525888715960887,
            c_j: -5.488438895044688,
            u: -1.4991371663776572e-5,
        };
        let sol = solve_pair(&tiny, &config);
        assert_eq!(sol.status, PairStatus::Ok);
        assert!(sol.delta < 0.0 && sol.delta > -1e-60, "{}", sol.delta);
        assert!(tiny.h(sol.delta).abs() <= 1e-9);
        // root a relative 1e-8 above u - p_i
        let pole = PairInput {
            p_i: -0.000404342814186317,
            p_j: -0.0003783754713166266,
            c_i: -4.981848137272049,
            c_j: -0.565181339679341,
            u: -0.00019196274637197516,
        };
        let sol = solve_pair(&pole, &config);
        let (lo, hi) = pole.bracket().unwrap();
        assert!(lo < sol.delta && sol.delta < hi);
        assert!(pole.h(sol.delta).abs() <= 1e-8);
    }

    #[test]
    fn root_lies_in_predicted_bracket() {
        for input in [
            constructed(1.0, 0.5, -0.6, -0.3, 0.0),
            constructed(-2.0, -1.5, 0.2, 0.9, 1.0),
            constructed(3.0, 2.0, 0.0, 0.5, 1.0),
        ] {
            let (lo, hi) = input.bracket().unwrap();
            let sol = solve_pair(&input, &cfg());
            assert!(sol.delta > lo && sol.delta < hi);
            let h = h_of_delta(
                sol.delta, input.c_i, input.c_j, input.p_i, input.p_j, input.u,
            )
            .unwrap();
            assert!(h.abs() <= 1e-9);
        }
    }

    #[test]
    fn root_near_singular_end_is_found() {
        // δ* barely above u - p_i
        let input = constructed(0.500001, 1.5, 0.5, 0.9, 1.0);
        let sol = solve_pair(&input, &cfg());
        assert_eq!(sol.status, PairStatus::Ok);
        assert!((sol.delta - 0.500001).abs() < 1e-6 * 0.5);
    }
}
