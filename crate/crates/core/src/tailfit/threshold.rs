//! Threshold selection.

use std::fmt;
use std::str::FromStr;

use super::MIN_TAIL;
use crate::error::{Error, Result};
use crate::gcurve::ProbSample;

/// How to pick the tail threshold `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// Midpoint between the `count`-th and `(count+1)`-th smallest values,
    /// so exactly `count` values lie strictly below. On a tie there, the
    /// nearest separating gap is used instead.
    OrderStatistic { count: usize },
    /// A fixed threshold.
    Value(f64),
    /// Start at `start` and halve until at most `1.2 * target` values lie
    /// below; fails if that leaves fewer than 20.
    Schedule { start: f64, target: usize },
}

impl Default for ThresholdRule {
    fn default() -> Self {
        ThresholdRule::OrderStatistic { count: 50 }
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::OrderStatistic { count } => write!(f, "auto:{count}"),
            ThresholdRule::Value(u) => write!(f, "value:{u}"),
            ThresholdRule::Schedule { start, target } if *target == 50 => {
                write!(f, "schedule:{start}")
            }
            ThresholdRule::Schedule { start, target } => write!(f, "schedule:{start}:{target}"),
        }
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    /// `auto:<count>`, `value:<u>` or `schedule:<start>[:<target>]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("bad threshold spec `{s}`"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "auto" => Ok(ThresholdRule::OrderStatistic {
                count: rest.parse().map_err(|_| bad())?,
            }),
            "value" => {
                let u: f64 = rest.parse().map_err(|_| bad())?;
                if !(u.is_finite() && u > 0.0) {
                    return Err(bad());
                }
                Ok(ThresholdRule::Value(u))
            }
            "schedule" => {
                let (start, target) = match rest.split_once(':') {
                    Some((a, b)) => (a, b.parse().map_err(|_| bad())?),
                    None => (rest, 50),
                };
                let start: f64 = start.parse().map_err(|_| bad())?;
                if !(start.is_finite() && start > 0.0) {
                    return Err(bad());
                }
                Ok(ThresholdRule::Schedule { start, target })
            }
            _ => Err(bad()),
        }
    }
}

pub fn select_threshold(sample: &ProbSample, rule: ThresholdRule) -> Result<f64> {
    match rule {
        ThresholdRule::Value(u) => {
            if u.is_finite() && u > 0.0 {
                Ok(u)
            } else {
                Err(Error::OutOfDomain {
                    what: "u",
                    value: u,
                    domain: "(0, inf)".into(),
                })
            }
        }
        ThresholdRule::OrderStatistic { count } => order_statistic(sample.values(), count),
        ThresholdRule::Schedule { start, target } => {
            let mut u = start;
            loop {
                let below = sample.count_below(u);
                if below as f64 <= 1.2 * target as f64 {
                    if below < MIN_TAIL {
                        return Err(Error::ScheduleUndershoot { u, count: below });
                    }
                    return Ok(u);
                }
                u /= 2.0;
            }
        }
    }
}

fn order_statistic(v: &[f64], count: usize) -> Result<f64> {
    let n = v.len();
    if count == 0 || n < count + 1 {
        return Err(Error::InvalidSample(format!(
            "order-statistic threshold with count {count} needs at least {} values, have {n}",
            count + 1
        )));
    }
    // k values below u needs a gap between v[k-1] and v[k]
    let separates = |k: usize| k >= 1 && k < n && v[k - 1] < v[k];
    let k = (0..n)
        .flat_map(|dist| [count.checked_sub(dist), count.checked_add(dist)])
        .flatten()
        .find(|&k| separates(k))
        .ok_or_else(|| Error::NoSeparatingThreshold("all sample values are equal".into()))?;
    let (lo, hi) = (v[k - 1], v[k]);
    let mid = 0.5 * (lo + hi);
    Ok(if mid > lo { mid } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcurve::WeightMode;

    fn sample(v: Vec<f64>) -> ProbSample {
        ProbSample::new(v, WeightMode::Discrete).unwrap()
    }

    #[test]
    fn order_statistic_leaves_exact_count() {
        let s = sample((1..=1000).map(|k| k as f64 / 1001.0).collect());
        let u = select_threshold(&s, ThresholdRule::OrderStatistic { count: 50 }).unwrap();
        assert_eq!(s.count_below(u), 50);
    }

    #[test]
    fn order_statistic_moves_off_ties() {
        let mut v: Vec<f64> = (1..=100).map(|k| k as f64 / 200.0).collect();
        v[50] = v[49];
        let s = sample(v);
        let u = select_threshold(&s, ThresholdRule::OrderStatistic { count: 50 }).unwrap();
        let c = s.count_below(u);
        assert!(c == 49 || c == 51, "{c}");
    }

    #[test]
    fn identical_values_have_no_threshold() {
        let s = sample(vec![0.25; 100]);
        assert!(matches!(
            select_threshold(&s, ThresholdRule::OrderStatistic { count: 50 }),
            Err(Error::NoSeparatingThreshold(_))
        ));
        let small = sample(vec![0.1; 10]);
        assert!(select_threshold(&small, ThresholdRule::OrderStatistic { count: 50 }).is_err());
    }

    #[test]
    fn schedule_halves_until_target() {
        let s = sample((1..=1000).map(|k| k as f64 * 1e-5).collect());
        let u = select_threshold(
            &s,
            ThresholdRule::Schedule {
                start: 0.005,
                target: 50,
            },
        )
        .unwrap();
        let below = s.count_below(u);
        assert!((20..=60).contains(&below), "{below}");
        assert!((u / 0.005).log2().fract().abs() < 1e-12);
    }

    #[test]
    fn schedule_undershoot() {
        // 0.005 -> 500 below; 0.0025 -> 250; ... 0.000625 -> 62 > 60; 0.0003125 -> 31
        let s = sample((1..=1000).map(|k| k as f64 * 1e-5).collect());
        let u = select_threshold(
            &s,
            ThresholdRule::Schedule {
                start: 0.005,
                target: 50,
            },
        )
        .unwrap();
        assert_eq!(s.count_below(u), 31);
        let sparse = sample(vec![1e-3, 2e-3, 0.5, 0.6, 0.7]);
        assert!(matches!(
            select_threshold(
                &sparse,
                ThresholdRule::Schedule {
                    start: 0.9,
                    target: 2
                }
            ),
            Err(Error::ScheduleUndershoot { .. })
        ));
    }

    #[test]
    fn parse_rules() {
        assert_eq!(
            "auto:50".parse::<ThresholdRule>().unwrap(),
            ThresholdRule::OrderStatistic { count: 50 }
        );
        assert_eq!(
            "value:0.0951".parse::<ThresholdRule>().unwrap(),
            ThresholdRule::Value(0.0951)
        );
        assert_eq!(
            "schedule:0.005".parse::<ThresholdRule>().unwrap(),
            ThresholdRule::Schedule {
                start: 0.005,
                target: 50
            }
        );
        assert_eq!(
            "schedule:0.005:40".parse::<ThresholdRule>().unwrap(),
            ThresholdRule::Schedule {
                start: 0.005,
                target: 40
            }
        );
        for bad in ["auto", "value:-1", "value:x", "nope:1", "schedule:0"] {
            assert!(bad.parse::<ThresholdRule>().is_err(), "{bad}");
        }
        for rule in [
            "auto:50",
            "value:0.0951",
            "schedule:0.005",
            "schedule:0.005:40",
        ] {
            assert_eq!(rule.parse::<ThresholdRule>().unwrap().to_string(), rule);
        }
    }
}
