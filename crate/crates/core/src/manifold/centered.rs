use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chart::{RadialChart, RadialFamily};
use super::sphere;
use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::model::{Field, Formula};
use crate::warpcore::RadialMetric;

/// Warp of the unperturbed metric `W(r)² σ_{S^{n-1}} + dr²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarpProfile {
    /// `W = sinh`: punctured hyperbolic space.
    #[default]
    Sinh,
    /// `W = e^r`: the exponential model, whose canonical charts (scale
    /// `e^{-t₀}`) reproduce `σ` up to sphere curvature.
    Exp,
}

/// One conformal perturbation term `A · Y_m(x) · b(r)`: `Y_m` is `cos(mθ)`
/// on the circle and `cos(m · colatitude)` on the 2-sphere, `b` a smooth
/// bump of the given center and half-width in `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationMode {
    pub amplitude: f64,
    pub sphere_mode: u32,
    pub radial_center: f64,
    pub radial_width: f64,
}

impl PerturbationMode {
    /// `b(r) = exp(1 - 1/(1 - z²))`, `z = (r - center)/width`; `b(center) = 1`.
    fn radial<S: Scalar>(&self, r: S) -> S {
        let w = self.radial_width;
        let z = (r.value() - self.radial_center) / w;
        if z.abs() >= 1.0 {
            return S::cst(0.0);
        }
        let q = 1.0 - z * z;
        let b = (1.0 - 1.0 / q).exp();
        let dphi = -2.0 * z / (q * q);
        let d2phi = -2.0 / (q * q) - 8.0 * z * z / (q * q * q);
        r.chain(b, b * dphi / w, b * (d2phi + dphi * dphi) / (w * w))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub n: usize,
    pub r_range: [f64; 2],
    #[serde(default)]
    pub warp: WarpProfile,
    #[serde(default)]
    pub modes: Vec<PerturbationMode>,
}

/// `S^{n-1} x R⁺` with `g = W(r)² (1 + Σ A Y b) σ_{S^{n-1}} + dr²`.
#[derive(Clone, Debug)]
pub struct CenteredManifold {
    spec: ManifoldSpec,
    modes: Arc<Vec<PerturbationMode>>,
}

impl CenteredManifold {
    /// Validates the spec. Perturbations whose total amplitude could make
    /// the conformal factor nonpositive are refused.
    pub fn new(spec: ManifoldSpec) -> Result<Self> {
        if !(spec.n == 2 || spec.n == 3) {
            return Err(Error::Usage(format!(
                "warped-sphere manifolds are generated for n = 2 or 3, got {}",
                spec.n
            )));
        }
        let [lo, hi] = spec.r_range;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::Usage(format!(
                "r_range [{lo}, {hi}] must satisfy 0 < lo < hi < inf"
            )));
        }
        let mut total = 0.0;
        for m in &spec.modes {
            if !(m.radial_width > 0.0 && m.amplitude.is_finite() && m.radial_center.is_finite()) {
                return Err(Error::Usage(format!("invalid perturbation mode {m:?}")));
            }
            total += m.amplitude.abs();
        }
        if !(total < 1.0) {
            return Err(Error::Construction(format!(
                "perturbation amplitudes sum to {total}; the metric is only guaranteed positive definite below 1"
            )));
        }
        let modes = Arc::new(spec.modes.clone());
        Ok(CenteredManifold { spec, modes })
    }

    pub fn spec(&self) -> &ManifoldSpec {
        &self.spec
    }

    fn warp_sq<S: Scalar>(&self, r: S) -> S {
        match self.spec.warp {
            WarpProfile::Sinh => r.sinh().sqr(),
            WarpProfile::Exp => (r * 2.0).exp(),
        }
    }

    /// `g_r` at a sphere point in intrinsic coordinates: arc length on the
    /// circle, `(colatitude, longitude)` on the 2-sphere (away from poles).
    pub fn cut_intrinsic(&self, sphere_point: &[f64], r: f64) -> Vec<f64> {
        let w = self.warp_sq(r);
        match self.spec.n {
            2 => {
                let th = sphere_point[0];
                let conf = conformal(&self.modes, r, |m| (m as f64 * th).cos());
                vec![w * conf]
            }
            _ => {
                let th = sphere_point[0];
                let conf = conformal(&self.modes, r, |m| sphere::chebyshev(m, th.cos()));
                vec![w * conf, 0.0, 0.0, w * conf * th.sin().powi(2)]
            }
        }
    }
}

fn conformal<S: Scalar>(modes: &[PerturbationMode], r: S, y: impl Fn(u32) -> S) -> S {
    modes.iter().fold(S::cst(1.0), |acc, m| {
        acc + y(m.sphere_mode) * m.radial(r) * m.amplitude
    })
}

pub fn punctured_hyperbolic(n: usize, r_range: [f64; 2]) -> Result<CenteredManifold> {
    CenteredManifold::new(ManifoldSpec {
        n,
        r_range,
        warp: WarpProfile::Sinh,
        modes: vec![],
    })
}

pub fn perturbed_hyperbolic(
    n: usize,
    r_range: [f64; 2],
    modes: Vec<PerturbationMode>,
) -> Result<CenteredManifold> {
    CenteredManifold::new(ManifoldSpec {
        n,
        r_range,
        warp: WarpProfile::Sinh,
        modes,
    })
}

impl RadialFamily for CenteredManifold {
    fn n(&self) -> usize {
        self.spec.n
    }

    fn r_range(&self) -> (f64, f64) {
        (self.spec.r_range[0], self.spec.r_range[1])
    }

    fn chart_scale(&self, t0: f64) -> f64 {
        match self.spec.warp {
            WarpProfile::Sinh => 2.0 * (-t0).exp(),
            WarpProfile::Exp => (-t0).exp(),
        }
    }

    fn in_chart(&self, chart: &RadialChart) -> Result<RadialMetric> {
        if chart.n != self.spec.n {
            return Err(Error::Usage(format!(
                "{}-dimensional chart on a {}-dimensional manifold",
                chart.n, self.spec.n
            )));
        }
        let geometry = match chart.n {
            2 => Geometry::Circle {
                theta0: chart.center.sphere[0],
            },
            _ => Geometry::Sphere {
                frame: sphere::frame(chart.center.sphere[0], chart.center.sphere[1]),
            },
        };
        let formula = InChart {
            manifold: self.clone(),
            scale: chart.scale,
            geometry,
        };
        RadialMetric::new(self.spec.n - 1, self.r_range(), Field::from_formula(formula))
    }
}

#[derive(Clone, Debug)]
enum Geometry {
    Circle { theta0: f64 },
    Sphere { frame: [[f64; 3]; 3] },
}

/// `(x, r) -> (φ₁* g_r)(x)`.
struct InChart {
    manifold: CenteredManifold,
    scale: f64,
    geometry: Geometry,
}

impl Formula for InChart {
    fn dim(&self) -> usize {
        self.manifold.spec.n
    }

    fn len(&self) -> usize {
        let k = self.manifold.spec.n - 1;
        k * k
    }

    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let c = self.scale;
        let modes = &self.manifold.modes;
        match &self.geometry {
            Geometry::Circle { theta0 } => {
                let r = p[1];
                let warp = match self.manifold.spec.warp {
                    WarpProfile::Sinh => (r.sinh() * c).sqr(),
                    WarpProfile::Exp => (r * 2.0).exp() * (c * c),
                };
                let theta = p[0] * c + *theta0;
                let conf = conformal(modes, r, |m| (theta * m as f64).cos());
                vec![warp * conf]
            }
            Geometry::Sphere { frame: [p0, e1, e2] } => {
                let (x1, x2, r) = (p[0], p[1], p[2]);
                let warp = self.manifold.warp_sq(r) * (c * c);
                let u = (x1.sqr() + x2.sqr()) * (c * c);
                let y3 = sphere::cos_sqrt(u) * p0[2]
                    + sphere::sinc_sqrt(u) * (x1 * e1[2] + x2 * e2[2]) * c;
                let conf = conformal(modes, r, |m| sphere::chebyshev(m, y3));
                let (f, k) = (sphere::metric_f(u), sphere::metric_k(u) * (c * c));
                let w = warp * conf;
                vec![
                    w * (f + k * x1 * x1),
                    w * k * x1 * x2,
                    w * k * x1 * x2,
                    w * (f + k * x2 * x2),
                ]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use crate::manifold::chart::{chart_deviation, pullback, radial_chart, Center};
    use crate::model::GridSpec;

    const RANGE: [f64; 2] = [0.05, 30.0];

    fn grid() -> GridSpec {
        GridSpec::default().with_points(32)
    }

    #[test]
    fn intrinsic_cut_of_hyperbolic_plane() {
        let m = punctured_hyperbolic(2, RANGE).unwrap();
        let v = m.cut_intrinsic(&[0.7], 1.0)[0];
        assert!((v - 1.381_097_845_541_816).abs() < 1e-14);
        let m3 = punctured_hyperbolic(3, RANGE).unwrap();
        let v = m3.cut_intrinsic(&[0.5, 2.0], 2.0);
        let s2 = 2f64.sinh().powi(2);
        assert!((v[0] - s2).abs() < 1e-12 && (v[3] - s2 * 0.5f64.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn pullback_at_chart_origin() {
        // (2 e^{-t₀} sinh t₀)² = (1 - e^{-2t₀})²
        let m = punctured_hyperbolic(2, RANGE).unwrap();
        let chart = radial_chart(&m, &Center::new(vec![0.3], 6.0), 1.0).unwrap();
        let g = pullback(&chart, &m, grid()).unwrap();
        let v = g.components(&[0.0, 0.0]);
        let expected = (1.0 - (-12f64).exp()).powi(2);
        assert!((v[0] - expected).abs() < 1e-14);
        assert!((expected - 0.999_987_7).abs() < 1e-7);
        assert_eq!(&v[1..], &[0.0, 0.0, 1.0]);
        g.validate().unwrap();
    }

    #[test]
    fn hyperbolic_deviation_is_small_and_rotation_invariant() {
        let m = punctured_hyperbolic(2, RANGE).unwrap();
        let a = chart_deviation(&m, &Center::new(vec![0.0], 6.0), 1.0, grid(), Execution::default()).unwrap();
        let b = chart_deviation(&m, &Center::new(vec![2.1], 6.0), 1.0, grid(), Execution::default()).unwrap();
        assert!(a.value < 0.01, "{}", a.value);
        assert_eq!(a.value, b.value);
        let m3 = punctured_hyperbolic(3, RANGE).unwrap();
        let c = chart_deviation(&m3, &Center::new(vec![0.4, 1.0], 6.0), 1.0, grid(), Execution::default()).unwrap();
        let d = chart_deviation(&m3, &Center::new(vec![2.0, -0.3], 6.0), 1.0, grid(), Execution::default()).unwrap();
        assert!(c.value < 0.01);
        assert!((c.value - d.value).abs() < 1e-9 * c.value);
    }

    #[test]
    fn exponential_model_is_exact_on_the_circle() {
        let m = CenteredManifold::new(ManifoldSpec {
            n: 2,
            r_range: RANGE,
            warp: WarpProfile::Exp,
            modes: vec![],
        })
        .unwrap();
        let d = chart_deviation(&m, &Center::new(vec![1.0], 5.0), 1.0, grid(), Execution::default()).unwrap();
        assert!(d.value < 1e-12, "{}", d.value);
    }

    #[test]
    fn perturbation_monotone_in_amplitude() {
        let dev = |a: f64| {
            let m = perturbed_hyperbolic(
                2,
                RANGE,
                vec![PerturbationMode {
                    amplitude: a,
                    sphere_mode: 2,
                    radial_center: 6.0,
                    radial_width: 2.0,
                }],
            )
            .unwrap();
            chart_deviation(&m, &Center::new(vec![0.2], 6.0), 1.0, grid(), Execution::default())
                .unwrap()
                .value
        };
        let mut prev = dev(0.0);
        for a in [0.0025, 0.005, 0.01, 0.02, 0.04] {
            let d = dev(a);
            assert!(d.is_finite() && d >= prev, "A = {a}");
            prev = d;
        }
    }

    #[test]
    fn amplitude_too_large_is_refused() {
        let mode = PerturbationMode {
            amplitude: 0.6,
            sphere_mode: 1,
            radial_center: 5.0,
            radial_width: 1.0,
        };
        let err = perturbed_hyperbolic(2, RANGE, vec![mode.clone(), mode]).unwrap_err();
        assert!(matches!(err, Error::Construction(_)));
        assert!(punctured_hyperbolic(4, RANGE).is_err());
        assert!(punctured_hyperbolic(2, [0.0, 5.0]).is_err());
    }

    #[test]
    fn chart_center_maps_to_center() {
        let m = punctured_hyperbolic(3, RANGE).unwrap();
        let center = Center::new(vec![1.2, -0.4], 5.0);
        let chart = radial_chart(&m, &center, 1.0).unwrap();
        let (s, r) = chart.phi(&[0.0, 0.0], 0.0);
        assert!((s[0] - 1.2).abs() < 1e-15 && (s[1] + 0.4).abs() < 1e-15);
        assert_eq!(r, 5.0);
    }

    #[test]
    fn chart_preconditions() {
        let m = punctured_hyperbolic(2, [0.05, 10.0]).unwrap();
        assert!(matches!(
            radial_chart(&m, &Center::new(vec![0.0], 1.9), 1.0),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            radial_chart(&m, &Center::new(vec![0.0], 9.0), 1.0),
            Err(Error::Usage(_))
        ));
        assert!(radial_chart(&m, &Center::new(vec![0.0, 1.0], 5.0), 1.0).is_err());
    }

    #[test]
    fn spec_json_roundtrip() {
        let json = r#"{"n": 2, "r_range": [0.05, 30.0],
            "modes": [{"amplitude": 0.001, "sphere_mode": 2, "radial_center": 6.0, "radial_width": 3.0}]}"#;
        let spec: ManifoldSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.warp, WarpProfile::Sinh);
        assert_eq!(spec.modes.len(), 1);
        CenteredManifold::new(spec).unwrap();
    }
}
