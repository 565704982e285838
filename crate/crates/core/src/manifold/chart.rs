use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::sphere;
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::model::{
    c2_norm_with, hyperbolic_model, C2Norm, ChartModel, DerivativeMode, Field, GridSpec,
    MetricField, Translate,
};
use crate::warpcore::ops::WarpedBlock;
use crate::warpcore::{bar_metric, warp_force, BumpFunction, RadialMetric};

/// A point `(x₀, t₀)` of `S^{n-1} x R⁺`. The sphere point is an angle for
/// `n = 2` and `(colatitude, longitude)` for `n = 3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Center {
    pub sphere: Vec<f64>,
    pub t0: f64,
}

impl Center {
    pub fn new(sphere: Vec<f64>, t0: f64) -> Self {
        Center { sphere, t0 }
    }
}

/// A metric `g = g_r + dr²` on a warped-sphere manifold that can present
/// its spatial block in the coordinates of any radial chart.
pub trait RadialFamily: Send + Sync + fmt::Debug {
    fn n(&self) -> usize;
    fn r_range(&self) -> (f64, f64);
    /// Spatial scale `c` of the canonical chart at radius `t₀`.
    fn chart_scale(&self, t0: f64) -> f64;
    /// `(x, r) -> (φ₁* g_r)(x)` for the chart's spatial map `φ₁`.
    fn in_chart(&self, chart: &RadialChart) -> Result<RadialMetric>;
}

/// `φ(x, t) = (φ₁(x), t + a)` with `a = t₀` and `φ₁` the sphere exponential
/// at `x₀` of `c·x`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialChart {
    pub n: usize,
    pub center: Center,
    pub xi: f64,
    pub scale: f64,
}

impl RadialChart {
    pub fn offset(&self) -> f64 {
        self.center.t0
    }

    pub fn model(&self, grid: GridSpec) -> Result<ChartModel> {
        ChartModel::new(self.n, self.xi, grid)
    }

    /// Radii covered by the closure of the chart image.
    pub fn radial_image(&self) -> (f64, f64) {
        let h = 1.0 + self.xi;
        (self.center.t0 - h, self.center.t0 + h)
    }

    /// The same chart on the smaller model `T_ξ'`.
    pub fn restrict(&self, xi: f64) -> Result<RadialChart> {
        if !(xi > 0.0 && xi <= self.xi) {
            return Err(Error::Usage(format!(
                "cannot restrict a chart of excess {} to excess {xi}",
                self.xi
            )));
        }
        Ok(RadialChart { xi, ..self.clone() })
    }

    /// `φ(x, t)` as (sphere coordinates, radius).
    pub fn phi(&self, x: &[f64], t: f64) -> (Vec<f64>, f64) {
        let c = self.scale;
        let r = t + self.center.t0;
        match self.n {
            2 => (vec![self.center.sphere[0] + c * x[0]], r),
            _ => {
                let [p, e1, e2] = sphere::frame(self.center.sphere[0], self.center.sphere[1]);
                let u = c * c * (x[0] * x[0] + x[1] * x[1]);
                let (cs, sc) = (sphere::cos_sqrt(u), sphere::sinc_sqrt(u));
                let y: [f64; 3] =
                    std::array::from_fn(|i| cs * p[i] + sc * c * (x[0] * e1[i] + x[1] * e2[i]));
                let (th, ph) = sphere::to_angles(y);
                (vec![th, ph], r)
            }
        }
    }
}

/// The canonical radial chart of excess `xi` centered at `center`.
pub fn radial_chart(family: &dyn RadialFamily, center: &Center, xi: f64) -> Result<RadialChart> {
    let n = family.n();
    if center.sphere.len() != n - 1 {
        return Err(Error::Usage(format!(
            "a center on S^{} needs {} sphere coordinates, got {}",
            n - 1,
            n - 1,
            center.sphere.len()
        )));
    }
    if !(xi > 0.0) {
        return Err(Error::Precondition {
            name: "xi",
            value: xi,
            requirement: "xi > 0",
        });
    }
    let t0 = center.t0;
    if !(t0 - (1.0 + xi) > 0.0) {
        return Err(Error::Usage(format!(
            "chart at t0 = {t0} with excess {xi} would reach the center (needs t0 > {})",
            1.0 + xi
        )));
    }
    let (lo, hi) = family.r_range();
    if t0 - (1.0 + xi) < lo || t0 + (1.0 + xi) > hi {
        return Err(Error::Usage(format!(
            "chart image radii ({}, {}) leave the manifold's range [{lo}, {hi}]",
            t0 - (1.0 + xi),
            t0 + (1.0 + xi)
        )));
    }
    let scale = family.chart_scale(t0);
    if n == 3 && !(scale < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Usage(format!(
            "sphere chart of angular radius {scale} is not injective"
        )));
    }
    Ok(RadialChart {
        n,
        center: center.clone(),
        xi,
        scale,
    })
}

/// `φ* g` on `T_ξ` for a radial metric already written in the chart's
/// spatial coordinates.
pub fn pullback_radial(chart: &RadialChart, g: &RadialMetric, grid: GridSpec) -> Result<MetricField> {
    let n = chart.n;
    if g.k() + 1 != n {
        return Err(Error::Usage(format!(
            "radial metric with {} spatial coordinates on a {n}-dimensional chart",
            g.k()
        )));
    }
    let (lo, hi) = chart.radial_image();
    if !(g.contains_radius(lo) && g.contains_radius(hi)) {
        return Err(Error::Usage(format!(
            "chart radii ({lo}, {hi}) exit the metric's range {:?}",
            g.r_range()
        )));
    }
    let mut offset = vec![0.0; n];
    offset[n - 1] = chart.offset();
    let block = g.field().precompose(Translate { offset });
    let field = block.combine(&Field::constant(n, vec![1.0]), n * n, WarpedBlock { k: n - 1 });
    MetricField::new(chart.model(grid)?, field, true)
}

pub fn pullback(chart: &RadialChart, family: &dyn RadialFamily, grid: GridSpec) -> Result<MetricField> {
    pullback_radial(chart, &family.in_chart(chart)?, grid)
}

/// `|φ* g - σ|_{C²}` for the canonical chart at `center`.
pub fn chart_deviation(
    family: &dyn RadialFamily,
    center: &Center,
    xi: f64,
    grid: GridSpec,
    exec: Execution,
) -> Result<C2Norm> {
    let chart = radial_chart(family, center, xi)?;
    let g = pullback(&chart, family, grid)?;
    let diff = g.field().sub(hyperbolic_model(g.chart()).field());
    c2_norm_with(&diff, &g.chart().domain(), &grid, DerivativeMode::Auto, exec)
}

#[derive(Clone, Debug, Serialize)]
pub struct CenterCloseness {
    pub center: Center,
    pub deviation: C2Norm,
}

#[derive(Clone, Debug, Serialize)]
pub struct Closeness {
    /// Largest per-center deviation.
    pub eps: f64,
    pub xi: f64,
    pub per_center: Vec<CenterCloseness>,
}

/// Measured radial closeness over the sample centers: the max of the
/// per-chart deviations. Centers are processed concurrently; the result
/// does not depend on the execution strategy.
pub fn measure_radial_closeness(
    family: &dyn RadialFamily,
    centers: &[Center],
    xi: f64,
    grid: GridSpec,
    exec: Execution,
) -> Result<Closeness> {
    if centers.is_empty() {
        return Err(Error::Usage("no sample centers given".into()));
    }
    let per = map_ordered(exec, centers, |c| chart_deviation(family, c, xi, grid, exec));
    let mut per_center = Vec::with_capacity(centers.len());
    for (c, d) in centers.iter().zip(per) {
        per_center.push(CenterCloseness {
            center: c.clone(),
            deviation: d?,
        });
    }
    let eps = per_center
        .iter()
        .map(|c| c.deviation.value)
        .fold(0.0, f64::max);
    Ok(Closeness { eps, xi, per_center })
}

/// `ḡ_{r₀}` of a base family.
#[derive(Clone, Debug)]
pub struct BarFamily {
    pub base: Arc<dyn RadialFamily>,
    pub r0: f64,
}

impl RadialFamily for BarFamily {
    fn n(&self) -> usize {
        self.base.n()
    }
    fn r_range(&self) -> (f64, f64) {
        self.base.r_range()
    }
    fn chart_scale(&self, t0: f64) -> f64 {
        self.base.chart_scale(t0)
    }
    fn in_chart(&self, chart: &RadialChart) -> Result<RadialMetric> {
        bar_metric(&self.base.in_chart(chart)?, self.r0)
    }
}

/// `𝒲_{r₀} g` of a base family.
#[derive(Clone, Debug)]
pub struct WarpForced {
    pub base: Arc<dyn RadialFamily>,
    pub r0: f64,
    pub rho: Arc<BumpFunction>,
}

impl WarpForced {
    pub fn new(base: Arc<dyn RadialFamily>, r0: f64, rho: Arc<BumpFunction>) -> Result<Self> {
        let (lo, hi) = base.r_range();
        if !(r0 > 0.0 && r0 >= lo && r0 + 0.5 <= hi) {
            return Err(Error::Precondition {
                name: "r0",
                value: r0,
                requirement: "r0 > 0 with [r0, r0 + 1/2] inside the manifold's radial range",
            });
        }
        Ok(WarpForced { base, r0, rho })
    }
}

impl RadialFamily for WarpForced {
    fn n(&self) -> usize {
        self.base.n()
    }
    fn r_range(&self) -> (f64, f64) {
        self.base.r_range()
    }
    fn chart_scale(&self, t0: f64) -> f64 {
        self.base.chart_scale(t0)
    }
    fn in_chart(&self, chart: &RadialChart) -> Result<RadialMetric> {
        warp_force(&self.base.in_chart(chart)?, self.r0, &self.rho)
    }
}
