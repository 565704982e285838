use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::jet::Scalar;
use crate::model::{Field, Formula};

/// `ν_s(t) = e^{-2(t-s)} sinh²((t-s) + t₀) / sinh²(t₀)`, the factor that
/// turns the exponential warp `e^{2t}` into a multiple of `sinh²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WarpParams", into = "WarpParams")]
pub struct WarpFunction {
    t0: f64,
    shift: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WarpParams {
    t0: f64,
    #[serde(default)]
    shift: f64,
}

impl TryFrom<WarpParams> for WarpFunction {
    type Error = crate::Error;
    fn try_from(p: WarpParams) -> Result<Self> {
        WarpFunction::new(p.t0, p.shift)
    }
}

impl From<WarpFunction> for WarpParams {
    fn from(w: WarpFunction) -> Self {
        WarpParams {
            t0: w.t0,
            shift: w.shift,
        }
    }
}

impl WarpFunction {
    pub fn new(t0: f64, shift: f64) -> Result<Self> {
        precondition(t0 > 2.0 && t0.is_finite(), "t0", t0, "t0 > 2")?;
        precondition(shift.is_finite(), "shift", shift, "a finite shift")?;
        Ok(WarpFunction { t0, shift })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Written as `((1 - e^{-2(u+t₀)}) / (1 - e^{-2t₀}))²` with `u = t - s`,
    /// which avoids forming `sinh²` of large arguments.
    pub fn apply<S: Scalar>(&self, t: S) -> S {
        let u = t - self.shift;
        let ratio = (S::cst(1.0) - ((u + self.t0) * -2.0).exp()) / (1.0 - (-2.0 * self.t0).exp());
        ratio.sqr()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.apply(t)
    }

    /// Whether `ν_s > 0` on all of `[lo, hi]`: it vanishes only at
    /// `t = s - t₀`.
    pub fn positive_on(&self, lo: f64, hi: f64) -> bool {
        let zero = self.shift - self.t0;
        zero < lo || zero > hi
    }

    /// As a scalar field of the last coordinate of a `dim`-dimensional
    /// domain.
    pub fn as_field(&self, dim: usize) -> Field {
        Field::from_formula(WarpOnAxis { nu: *self, dim })
    }
}

struct WarpOnAxis {
    nu: WarpFunction,
    dim: usize,
}

impl Formula for WarpOnAxis {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        vec![self.nu.apply(p[self.dim - 1])]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;

    fn direct(t0: f64, s: f64, t: f64) -> f64 {
        (-2.0 * (t - s)).exp() * ((t - s + t0).sinh() / t0.sinh()).powi(2)
    }

    #[test]
    fn equals_unit_at_shift() {
        for &(t0, s) in &[(3.0, 0.0), (2.5, -0.5), (7.0, 1.2)] {
            let nu = WarpFunction::new(t0, s).unwrap();
            assert!((nu.eval(s) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_sinh_form() {
        let nu = WarpFunction::new(3.0, -0.5).unwrap();
        for i in 0..=40 {
            let t = -2.5 + i as f64 * 0.125;
            let d = direct(3.0, -0.5, t);
            assert!((nu.eval(t) - d).abs() < 1e-13 * d, "t = {t}");
        }
    }

    #[test]
    fn shift_identity_against_sinh_ratio() {
        // e^{2(t-s)} ν_s(t) = sinh²((t-s) + r₀) / sinh²(r₀)
        let r0 = 5.0;
        for &s in &[-1.0, 0.0, 0.7] {
            let nu = WarpFunction::new(r0, s).unwrap();
            for i in 0..=20 {
                let t = -2.0 + 0.2 * i as f64;
                let lhs = (2.0 * (t - s)).exp() * nu.eval(t);
                let rhs = ((t - s + r0).sinh() / r0.sinh()).powi(2);
                assert!((lhs - rhs).abs() <= 1e-12 * rhs);
            }
        }
    }

    #[test]
    fn jet_matches_closed_form_derivatives() {
        // u(t) = 1 + q (1 - e^{-2t}), ν = u², q = e^{-2t₀} / (1 - e^{-2t₀})
        let t0 = 3.0;
        let nu = WarpFunction::new(t0, 0.0).unwrap();
        let q = (-2.0 * t0).exp() / (1.0 - (-2.0 * t0).exp());
        for &t in &[-1.5, 0.0, 0.8] {
            let e = (-2.0 * t).exp();
            let u = 1.0 + q * (1.0 - e);
            let du = 2.0 * q * e;
            let d2u = -4.0 * q * e;
            let j = nu.apply(Jet::variable(1, 0, t));
            assert!((j.grad(0) - 2.0 * u * du).abs() < 1e-14);
            assert!((j.hess(0, 0) - (2.0 * du * du + 2.0 * u * d2u)).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_small_base_radius() {
        assert!(WarpFunction::new(2.0, 0.0).is_err());
        assert!(serde_json::from_str::<WarpFunction>(r#"{"t0": 1.0}"#).is_err());
        let w: WarpFunction = serde_json::from_str(r#"{"t0": 3.0, "shift": -0.5}"#).unwrap();
        assert_eq!(w, WarpFunction::new(3.0, -0.5).unwrap());
    }

    #[test]
    fn positivity_window() {
        let nu = WarpFunction::new(3.0, 0.0).unwrap();
        assert!(nu.positive_on(-2.5, 2.5));
        assert!(!nu.positive_on(-3.5, 0.0));
    }
}
