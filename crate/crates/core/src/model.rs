//! Model coefficients and reaction terms.
//!
//! Tumour cells `c` diffuse with the degenerate coefficient
//! `kappa_c * v * c / (1 + v * c)` and drift up the tissue gradient with
//! sensitivity `kappa_v / (1 + v)^2`; the tissue `v` obeys a pointwise ODE.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Values of `v` this far outside `[0, 1]` are clamped; larger excursions are errors.
pub const V_CLAMP_SLACK: f64 = 1e-12;

/// Spatial dimension of the simulated domain.
pub const DIM: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("tissue density v = {0} outside [0, 1]")]
    VOutOfRange(f64),
    #[error("cell density c = {0} is negative or not finite")]
    InvalidC(f64),
    #[error("parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `D_c = kappa_c v c / (1 + v c)`, vanishing at `v = 0` and `c = 0`.
    Degenerate,
    /// `D_c = kappa_c / (1 + v c)`.
    Nondegenerate,
    /// Degenerate coefficient plus `eps2`, a `-eps1 c^theta` sink and
    /// `eps1`-diffusion of `psi(v)`.
    Regularized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Regularization<T> {
    pub eps1: T,
    pub eps2: T,
    pub theta: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams<T> {
    pub kappa_c: T,
    pub kappa_v: T,
    pub mu_c: T,
    pub mu_v: T,
    #[serde(rename = "lambda")]
    pub lambda_: T,
    pub eta: T,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularization: Option<Regularization<T>>,
}

impl<T: Scalar> ModelParams<T> {
    /// `kappa_c = 1e-3, kappa_v = 1, mu_c = 0.5, mu_v = 0.02, lambda = 0.1`, with `eta = 1`.
    pub fn reference(variant: Variant) -> Self {
        Self {
            kappa_c: T::lit(1e-3),
            kappa_v: T::one(),
            mu_c: T::lit(0.5),
            mu_v: T::lit(0.02),
            lambda_: T::lit(0.1),
            eta: T::one(),
            variant,
            regularization: None,
        }
    }

    pub fn regularized(mut self, eps1: T, eps2: T, theta: T) -> Self {
        self.variant = Variant::Regularized;
        self.regularization = Some(Regularization { eps1, eps2, theta });
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let rates = [
            ("kappa_c", self.kappa_c),
            ("kappa_v", self.kappa_v),
            ("mu_c", self.mu_c),
            ("mu_v", self.mu_v),
            ("lambda", self.lambda_),
            ("eta", self.eta),
        ];
        for (name, x) in rates {
            if !(x >= T::zero() && x.is_finite()) {
                return Err(ModelError::InvalidParam {
                    name,
                    reason: format!("must be finite and >= 0, got {x}"),
                });
            }
        }
        if self.variant == Variant::Regularized {
            let r = self.regularization.ok_or(ModelError::InvalidParam {
                name: "regularization",
                reason: "required for the regularized variant".into(),
            })?;
            for (name, e) in [("eps1", r.eps1), ("eps2", r.eps2)] {
                if !(e > T::zero() && e < T::one()) {
                    return Err(ModelError::InvalidParam {
                        name,
                        reason: format!("must lie in (0, 1), got {e}"),
                    });
                }
            }
            let min_theta = T::from_usize_lossy(DIM + 2);
            if !(r.theta > min_theta && r.theta.is_finite()) {
                return Err(ModelError::InvalidParam {
                    name: "theta",
                    reason: format!("must exceed {min_theta}, got {}", r.theta),
                });
            }
        }
        Ok(())
    }

    fn reg(&self) -> Regularization<T> {
        self.regularization.unwrap_or(Regularization {
            eps1: T::zero(),
            eps2: T::zero(),
            theta: T::one(),
        })
    }

    pub fn diffusion_coefficient(&self, v: T, c: T) -> Result<T, ModelError> {
        Ok(self.diffusion_unchecked(check_v(v)?, check_c(c)?))
    }

    pub fn haptotactic_sensitivity(&self, v: T) -> Result<T, ModelError> {
        Ok(self.sensitivity_unchecked(check_v(v)?))
    }

    pub fn reaction_c(&self, c: T, v: T) -> Result<T, ModelError> {
        Ok(self.reaction_c_unchecked(check_c(c)?, check_v(v)?))
    }

    pub fn reaction_v(&self, c: T, v: T) -> Result<T, ModelError> {
        Ok(self.reaction_v_unchecked(check_c(c)?, check_v(v)?))
    }

    #[inline]
    pub(crate) fn diffusion_unchecked(&self, v: T, c: T) -> T {
        let vc = v * c;
        match self.variant {
            Variant::Degenerate => self.kappa_c * vc / (T::one() + vc),
            Variant::Nondegenerate => self.kappa_c / (T::one() + vc),
            Variant::Regularized => self.reg().eps2 + self.kappa_c * vc / (T::one() + vc),
        }
    }

    #[inline]
    pub(crate) fn sensitivity_unchecked(&self, v: T) -> T {
        let s = T::one() + v;
        self.kappa_v / (s * s)
    }

    #[inline]
    pub(crate) fn reaction_c_unchecked(&self, c: T, v: T) -> T {
        let logistic = self.mu_c * c * (T::one() - c - self.eta * v);
        match self.variant {
            Variant::Regularized => {
                let r = self.reg();
                logistic - r.eps1 * c.powf(r.theta)
            }
            _ => logistic,
        }
    }

    #[inline]
    pub(crate) fn reaction_v_unchecked(&self, c: T, v: T) -> T {
        self.mu_v * v * (T::one() - v) - self.lambda_ * v * c
    }

    /// Right-hand side of the tissue equation written for `psi(v)`:
    /// `psi'(v) * reaction_v = sqrt(v) (mu_v (1 - v) - lambda c) / (2 (1 + v))`.
    #[inline]
    pub(crate) fn psi_source_unchecked(&self, c: T, v: T) -> T {
        v.sqrt() * (self.mu_v * (T::one() - v) - self.lambda_ * c) / (T::lit(2.0) * (T::one() + v))
    }

    pub fn psi_source(&self, c: T, v: T) -> Result<T, ModelError> {
        Ok(self.psi_source_unchecked(check_c(c)?, check_v(v)?))
    }

    /// `eps1` of the regularized variant, zero otherwise.
    pub fn eps1(&self) -> T {
        match self.variant {
            Variant::Regularized => self.reg().eps1,
            _ => T::zero(),
        }
    }

    /// Upper bound of `eps1 * c^(theta - 1)` over `[0, c_max]`; the per-unit-mass sink rate.
    pub(crate) fn sink_rate_bound(&self, c_max: T) -> T {
        match self.variant {
            Variant::Regularized => {
                let r = self.reg();
                r.eps1 * c_max.max(T::zero()).powf(r.theta - T::one())
            }
            _ => T::zero(),
        }
    }
}

/// Clamps `v` from within [`V_CLAMP_SLACK`] of `[0, 1]`; rejects larger excursions.
#[inline]
pub fn check_v<T: Scalar>(v: T) -> Result<T, ModelError> {
    let slack = T::lit(V_CLAMP_SLACK);
    if v >= T::zero() && v <= T::one() {
        Ok(v)
    } else if v >= -slack && v <= T::one() + slack {
        Ok(v.max(T::zero()).min(T::one()))
    } else {
        Err(ModelError::VOutOfRange(v.to_f64_lossy()))
    }
}

#[inline]
pub fn check_c<T: Scalar>(c: T) -> Result<T, ModelError> {
    if c >= T::zero() && c.is_finite() {
        Ok(c)
    } else {
        Err(ModelError::InvalidC(c.to_f64_lossy()))
    }
}

/// `psi(v) = arctan(sqrt(v))`, mapping `[0, 1]` onto `[0, pi/4]`.
pub fn psi<T: Scalar>(v: T) -> Result<T, ModelError> {
    Ok(check_v(v)?.sqrt().atan())
}

/// Inverse of [`psi`]: `tan(p)^2`, clamped to `[0, 1]`.
pub fn psi_inverse<T: Scalar>(p: T) -> T {
    let t = p.max(T::zero()).min(T::FRAC_PI_4()).tan();
    (t * t).max(T::zero()).min(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn deg() -> ModelParams<f64> {
        ModelParams::reference(Variant::Degenerate)
    }

    #[test]
    fn degenerate_coefficient() {
        let p = deg();
        assert_eq!(p.diffusion_coefficient(0.0, 123.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            p.diffusion_coefficient(1.0, 1e9).unwrap(),
            1e-3,
            epsilon = 1e-11
        );
        assert_eq!(p.diffusion_coefficient(0.7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn nondegenerate_coefficient() {
        let p = deg().with_variant(Variant::Nondegenerate);
        assert_abs_diff_eq!(
            p.diffusion_coefficient(1.0, 1.0).unwrap(),
            5e-4,
            epsilon = 1e-18
        );
        assert_eq!(p.diffusion_coefficient(0.0, 0.0).unwrap(), 1e-3);
    }

    #[test]
    fn regularized_coefficient_is_shifted() {
        let p = deg().regularized(0.1, 0.05, 5.0);
        assert_eq!(p.diffusion_coefficient(0.0, 0.0).unwrap(), 0.05);
        assert!(p.diffusion_coefficient(1.0, 1e12).unwrap() <= 0.05 + 1e-3);
    }

    #[test]
    fn domain_violations() {
        let p = deg();
        assert!(p.diffusion_coefficient(1.0 + 1e-9, 1.0).is_err());
        assert!(p.diffusion_coefficient(-1e-9, 1.0).is_err());
        assert!(p.diffusion_coefficient(0.5, -1e-30).is_err());
        assert!(p.diffusion_coefficient(0.5, f64::NAN).is_err());
        // Within the clamp slack.
        assert_eq!(p.haptotactic_sensitivity(1.0 + 5e-13).unwrap(), 0.25);
        assert_eq!(p.haptotactic_sensitivity(-5e-13).unwrap(), 1.0);
    }

    #[test]
    fn sensitivity_values() {
        let p = deg();
        assert_eq!(p.haptotactic_sensitivity(0.0).unwrap(), 1.0);
        assert_eq!(p.haptotactic_sensitivity(1.0).unwrap(), 0.25);
        assert_abs_diff_eq!(
            p.haptotactic_sensitivity(0.5).unwrap(),
            4.0 / 9.0,
            epsilon = 1e-16
        );
    }

    #[test]
    fn reaction_terms() {
        let p = deg();
        assert_eq!(p.reaction_c(0.0, 0.3).unwrap(), 0.0);
        assert_eq!(p.reaction_c(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(p.reaction_c(0.5, 0.0).unwrap(), 0.125);
        assert_eq!(p.reaction_v(2.0, 0.0).unwrap(), 0.0);
        assert_eq!(p.reaction_v(0.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(p.reaction_v(1.0, 0.5).unwrap(), -0.045, epsilon = 1e-17);
    }

    #[test]
    fn regularized_sink() {
        let p = deg().regularized(0.1, 0.1, 5.0);
        assert_eq!(p.reaction_c(0.0, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(p.reaction_c(1.0, 0.0).unwrap(), -0.1, epsilon = 1e-16);
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(0.0f64).unwrap(), 0.0);
        assert_abs_diff_eq!(
            psi(1.0f64).unwrap(),
            std::f64::consts::FRAC_PI_4,
            epsilon = 1e-16
        );
        let v = 0.5f64.tan().powi(2);
        assert_abs_diff_eq!(psi(v).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(psi_inverse(0.5f64), v, epsilon = 1e-15);
        assert!(psi(1.1f64).is_err());
    }

    #[test]
    fn psi_source_matches_chain_rule() {
        let p = deg();
        for &(c, v) in &[(0.3, 0.2), (1.0, 0.9), (0.0, 0.5)] {
            let h = 1e-6;
            let dpsi = (psi(v + h).unwrap() - psi(v - h).unwrap()) / (2.0 * h);
            let want = dpsi * p.reaction_v(c, v).unwrap();
            assert_abs_diff_eq!(p.psi_source(c, v).unwrap(), want, epsilon = 1e-9);
        }
    }

    #[test]
    fn validation() {
        assert!(deg().validate().is_ok());
        let mut bad = deg();
        bad.mu_c = -1.0;
        assert!(bad.validate().is_err());
        assert!(deg().with_variant(Variant::Regularized).validate().is_err());
        assert!(deg().regularized(0.1, 0.1, 4.0).validate().is_err());
        assert!(deg().regularized(1.0, 0.1, 5.0).validate().is_err());
        assert!(deg().regularized(0.1, 0.1, 4.5).validate().is_ok());
    }

    proptest! {
        #[test]
        fn degenerate_monotone_in_vc(v1 in 0.0..=1.0f64, c1 in 0.0..50.0f64, v2 in 0.0..=1.0f64, c2 in 0.0..50.0f64) {
            let p = deg();
            let (a, b) = if v1 * c1 <= v2 * c2 { ((v1, c1), (v2, c2)) } else { ((v2, c2), (v1, c1)) };
            prop_assert!(p.diffusion_coefficient(a.0, a.1).unwrap() <= p.diffusion_coefficient(b.0, b.1).unwrap());
        }

        #[test]
        fn small_c_asymptotics(v in 0.0..=1.0f64, c in 0.0..10.0f64) {
            let p = deg();
            let vc = v * c;
            let d = p.diffusion_coefficient(v, c).unwrap();
            prop_assert!((d - p.kappa_c * vc).abs() <= p.kappa_c * vc * vc * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn coefficient_ranges(v in 0.0..=1.0f64, c in 0.0..1e6f64) {
            let p = deg();
            let d = p.diffusion_coefficient(v, c).unwrap();
            prop_assert!((0.0..=p.kappa_c).contains(&d));
            let n = p.with_variant(Variant::Nondegenerate).diffusion_coefficient(v, c).unwrap();
            prop_assert!(n > 0.0 && n <= p.kappa_c);
            let chi = p.haptotactic_sensitivity(v).unwrap();
            prop_assert!((0.25..=1.0).contains(&chi));
        }
    }

    #[test]
    fn psi_derivative_bounds() {
        // 0.5 (sqrt v)' <= psi'(v) <= (sqrt v)' by central differences.
        let h = 1e-7;
        let mut v = 0.01f64;
        while v <= 0.99 {
            let dpsi = (psi(v + h).unwrap() - psi(v - h).unwrap()) / (2.0 * h);
            let dsqrt = ((v + h).sqrt() - (v - h).sqrt()) / (2.0 * h);
            assert!(
                dpsi >= 0.5 * dsqrt - 1e-6 && dpsi <= dsqrt + 1e-6,
                "v = {v}"
            );
            v += 0.01;
        }
    }
}
