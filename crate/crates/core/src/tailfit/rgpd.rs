//! Reversed generalized Pareto distribution on `z <= 0`.
//!
//! ```text
//! U(z; δ, α) = (1 + z/δ)^(1/α)    α ≠ 0
//!            = exp(z/δ)           α = 0
//! ```
//!
//! Sign table (each clause keeps `U` a cdf on its support):
//!
//! | shape   | scale  | support      |
//! |---------|--------|--------------|
//! | `α > 0` | `δ > 0`| `(-δ, 0]`    |
//! | `α < 0` | `δ < 0`| `(-inf, 0]`  |
//! | `α = 0` | `δ > 0`| `(-inf, 0]`  |
//!
//! Note that `α → 0` with `α·δ = σ` held fixed tends to `exp(z/σ)`; the
//! exponential branch's `δ` plays the role of `σ`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgpdParams {
    delta: f64,
    alpha: f64,
}

impl RgpdParams {
    pub fn new(delta: f64, alpha: f64) -> Result<Self> {
        let fail = |reason| {
            Err(Error::InvalidParams {
                delta,
                alpha,
                reason,
            })
        };
        if !delta.is_finite() || !alpha.is_finite() {
            return fail("parameters must be finite");
        }
        if alpha > 0.0 && delta <= 0.0 {
            return fail("alpha > 0 requires delta > 0");
        }
        if alpha < 0.0 && delta >= 0.0 {
            return fail("alpha < 0 requires delta < 0");
        }
        if alpha == 0.0 && delta <= 0.0 {
            return fail("alpha = 0 requires delta > 0");
        }
        Ok(Self { delta, alpha })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Lower support endpoint: `-δ` when `α > 0`, `-inf` otherwise.
    pub fn lower_endpoint(&self) -> f64 {
        if self.alpha > 0.0 {
            -self.delta
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `U(z)`. Clamped to 1 for `z >= 0` and to 0 at or below the lower
    /// support endpoint.
    pub fn cdf(&self, z: f64) -> f64 {
        if z >= 0.0 {
            return 1.0;
        }
        if z <= self.lower_endpoint() {
            return 0.0;
        }
        if self.alpha == 0.0 {
            (z / self.delta).exp()
        } else {
            ((z / self.delta).ln_1p() / self.alpha).exp()
        }
    }

    /// Inverse cdf on `(0, 1]`.
    pub fn quantile(&self, prob: f64) -> Result<f64> {
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(Error::OutOfDomain {
                what: "probability",
                value: prob,
                domain: "(0, 1]".into(),
            });
        }
        let ln = prob.ln();
        Ok(if self.alpha == 0.0 {
            self.delta * ln
        } else {
            self.delta * (self.alpha * ln).exp_m1()
        })
    }
}

pub fn rgpd_cdf(z: f64, params: &RgpdParams) -> f64 {
    params.cdf(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sign_table() {
        assert!(RgpdParams::new(1.0, 0.5).is_ok());
        assert!(RgpdParams::new(-1.0, 0.5).is_err());
        assert!(RgpdParams::new(-1.0, -0.5).is_ok());
        assert!(RgpdParams::new(1.0, -0.5).is_err());
        assert!(RgpdParams::new(1.0, 0.0).is_ok());
        assert!(RgpdParams::new(-1.0, 0.0).is_err());
        assert!(RgpdParams::new(f64::NAN, 1.0).is_err());
        assert!(RgpdParams::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn cdf_examples() {
        for p in [
            RgpdParams::new(1.0, 1.0).unwrap(),
            RgpdParams::new(-2.0, -0.3).unwrap(),
            RgpdParams::new(0.5, 0.0).unwrap(),
        ] {
            assert_eq!(p.cdf(0.0), 1.0);
        }
        assert!((RgpdParams::new(1.0, 1.0).unwrap().cdf(-0.5) - 0.5).abs() < 1e-15);
        let expo = RgpdParams::new(1.0, 0.0).unwrap();
        assert!((expo.cdf(-1.0) - 0.36787944117144233).abs() < 1e-15);
    }

    #[test]
    fn clamps_below_bounded_support() {
        let p = RgpdParams::new(1.0, 0.5).unwrap();
        assert_eq!(p.cdf(-1.0), 0.0);
        assert_eq!(p.cdf(-7.0), 0.0);
        assert!(p.cdf(-0.999) > 0.0);
    }

    #[test]
    fn shape_continuity_at_zero() {
        // α·δ = σ = 1 held fixed
        for alpha in [1e-8, -1e-8] {
            let p = RgpdParams::new(1.0 / alpha, alpha).unwrap();
            for k in 1..=100 {
                let z = -0.5 * k as f64 / 100.0;
                assert!((p.cdf(z) - z.exp()).abs() <= 1e-6, "alpha {alpha}, z {z}");
            }
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let p = RgpdParams::new(-1.0, -0.5).unwrap();
        for prob in [0.01, 0.3, 0.9, 1.0] {
            let z = p.quantile(prob).unwrap();
            assert!((p.cdf(z) - prob).abs() < 1e-13);
        }
        assert!(p.quantile(0.0).is_err());
    }

    fn valid_params() -> impl Strategy<Value = RgpdParams> {
        prop_oneof![
            (0.01f64..10.0, 0.05f64..3.0).prop_map(|(d, a)| RgpdParams::new(d, a).unwrap()),
            (0.01f64..10.0, 0.05f64..3.0).prop_map(|(d, a)| RgpdParams::new(-d, -a).unwrap()),
            (0.01f64..10.0).prop_map(|d| RgpdParams::new(d, 0.0).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn cdf_is_monotone_and_bounded(p in valid_params(), zs in prop::collection::vec(-20.0f64..0.0, 2..30)) {
            let mut zs = zs;
            zs.sort_by(f64::total_cmp);
            let mut last = 0.0;
            for z in zs {
                let u = p.cdf(z);
                prop_assert!((0.0..=1.0).contains(&u));
                prop_assert!(u >= last);
                last = u;
            }
        }
    }
}
