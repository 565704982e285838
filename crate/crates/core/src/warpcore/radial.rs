use std::sync::Arc;

use super::bump::{shifted_bump, BumpFunction};
use super::ops::{Blend, SpatialMetric};
use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::model::field::{AppendCoordinate, DropLast};
use crate::model::{Field, Formula};

/// A radial metric `g = g_r + dr²` in a coordinate patch `U x (lo, hi)` of
/// the sphere factor, stored as its spatial block: a field `(x, r) -> g_r(x)`
/// with `k = n - 1` spatial coordinates.
#[derive(Clone, Debug)]
pub struct RadialMetric {
    k: usize,
    r_range: (f64, f64),
    field: Field,
}

impl RadialMetric {
    pub fn new(k: usize, r_range: (f64, f64), field: Field) -> Result<Self> {
        let (lo, hi) = r_range;
        if !(lo >= 0.0 && lo < hi) {
            return Err(Error::Usage(format!(
                "radial range ({lo}, {hi}) must satisfy 0 <= lo < hi"
            )));
        }
        if field.dim() != k + 1 || field.len() != k * k {
            return Err(Error::Usage(format!(
                "radial metric with {k} spatial coordinates needs an R^{} -> R^{} field, got R^{} -> R^{}",
                k + 1,
                k * k,
                field.dim(),
                field.len()
            )));
        }
        Ok(RadialMetric { k, r_range, field })
    }

    /// `sinh²(r) h(x)` for an `r`-independent `h`.
    pub fn sinh_warped(h: &SpatialMetric, r_range: (f64, f64)) -> Result<Self> {
        let k = h.k();
        let field = h
            .field()
            .precompose(DropLast { dim: k + 1 })
            .mul_scalar(&Field::from_formula(SinhSq { dim: k + 1, scale: 1.0 }));
        RadialMetric::new(k, r_range, field)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r_range(&self) -> (f64, f64) {
        self.r_range
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn contains_radius(&self, r: f64) -> bool {
        r >= self.r_range.0 && r <= self.r_range.1
    }

    /// Spatial block `g_r(x)`, row-major.
    pub fn spatial(&self, x: &[f64], r: f64) -> Vec<f64> {
        let mut p = x.to_vec();
        p.push(r);
        self.field.eval(&p)
    }
}

/// `sinh²(p_last) · scale`.
struct SinhSq {
    dim: usize,
    scale: f64,
}

impl Formula for SinhSq {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        vec![p[self.dim - 1].sinh().sqr() * self.scale]
    }
}

/// The cut `g_r` and the unwarped cut `ĝ_r = g_r / sinh²(r)`.
pub fn spherical_cut(g: &RadialMetric, r: f64) -> Result<(SpatialMetric, SpatialMetric)> {
    if !(r > 0.0 && g.contains_radius(r)) {
        return Err(Error::Usage(format!(
            "cut radius {r} outside the represented range [{}, {}] or not positive",
            g.r_range.0, g.r_range.1
        )));
    }
    let cut = SpatialMetric::new(
        g.k,
        g.field.precompose(AppendCoordinate { dim: g.k, value: r }),
    )?;
    let unwarped = cut.scale(1.0 / r.sinh().powi(2));
    Ok((cut, unwarped))
}

/// `ḡ_{r₀} = sinh²(r) ĝ_{r₀} + dr²`.
pub fn bar_metric(g: &RadialMetric, r0: f64) -> Result<RadialMetric> {
    let (_, unwarped) = spherical_cut(g, r0)?;
    RadialMetric::sinh_warped(&unwarped, g.r_range)
}

/// `𝒲_{r₀}g = ρ_{r₀} ḡ_{r₀} + (1 - ρ_{r₀}) g`. Equals `ḡ_{r₀}` exactly for
/// `r <= r₀ + δ` and `g` exactly for `r >= r₀ + 1/2 - δ`.
pub fn warp_force(g: &RadialMetric, r0: f64, rho: &Arc<BumpFunction>) -> Result<RadialMetric> {
    if !(r0 > 0.0) {
        return Err(Error::Precondition {
            name: "r0",
            value: r0,
            requirement: "r0 > 0",
        });
    }
    let bar = bar_metric(g, r0)?;
    let k = g.k;
    let lambda = shifted_bump(rho, r0).as_field(k + 1, 0.0);
    let field = bar.field.concat(&g.field).combine(
        &lambda,
        k * k,
        Blend {
            len: k * k,
            keep_radial_of: None,
        },
    );
    RadialMetric::new(k, g.r_range, field)
}
