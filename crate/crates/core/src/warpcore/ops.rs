use nalgebra::{DMatrix, SymmetricEigen};

use super::warpfun::WarpFunction;
use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::model::field::{AppendCoordinate, DropLast};
use crate::model::metric::SPD_TOLERANCE;
use crate::model::{c2_norm, ChartModel, Combine, C2Norm, Domain, Field, Formula, GridSpec, MetricField};

/// A metric on the unit ball `B^k`, as the `R^{k²}` field of its components.
#[derive(Clone, Debug)]
pub struct SpatialMetric {
    k: usize,
    field: Field,
}

impl SpatialMetric {
    pub fn new(k: usize, field: Field) -> Result<Self> {
        if field.dim() != k || field.len() != k * k {
            return Err(Error::Usage(format!(
                "metric on B^{k} needs an R^{k} -> R^{} field, got R^{} -> R^{}",
                k * k,
                field.dim(),
                field.len()
            )));
        }
        Ok(SpatialMetric { k, field })
    }

    /// `scale · σ_{R^k}`.
    pub fn flat(k: usize, scale: f64) -> Self {
        let mut v = vec![0.0; k * k];
        for i in 0..k {
            v[i * k + i] = scale;
        }
        SpatialMetric {
            k,
            field: Field::constant(k, v),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn matrix(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.k, self.k, &self.field.eval(x))
    }

    pub fn scale(&self, c: f64) -> SpatialMetric {
        SpatialMetric {
            k: self.k,
            field: self.field.scale(c),
        }
    }

    /// Symmetric positive definite at every point of the ball grid.
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        for p in (Domain::Ball { k: self.k }).grid_points(grid) {
            let m = self.matrix(&p);
            if (&m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) {
                return Err(Error::NotSymmetric { point: p });
            }
            let min = SymmetricEigen::new(m).eigenvalues.min();
            if !(min > SPD_TOLERANCE) {
                return Err(Error::NotPositiveDefinite {
                    point: p,
                    min_eigenvalue: min,
                });
            }
        }
        Ok(())
    }
}

/// `|a - b|_{C²(B^k)}`.
pub fn spatial_deviation(a: &SpatialMetric, b: &SpatialMetric, grid: &GridSpec) -> Result<C2Norm> {
    if a.k != b.k {
        return Err(Error::Usage(format!("metrics on B^{} and B^{}", a.k, b.k)));
    }
    c2_norm(&a.field.sub(&b.field), &Domain::Ball { k: a.k }, grid)
}

/// `(block, [w]) -> w·block ⊕ 1`: a `k×k` spatial block scaled and padded
/// with a unit radial entry.
pub(crate) struct WarpedBlock {
    pub k: usize,
}

impl Combine for WarpedBlock {
    fn apply<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        let (k, n) = (self.k, self.k + 1);
        let mut out = vec![S::cst(0.0); n * n];
        for i in 0..k {
            for j in 0..k {
                out[i * n + j] = a[i * k + j] * b[0];
            }
        }
        out[n * n - 1] = S::cst(1.0);
        out
    }
}

/// Spatial entries scaled by `b[0]`; the radial row and column untouched.
struct ScaleSpatial {
    n: usize,
}

impl Combine for ScaleSpatial {
    fn apply<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        let n = self.n;
        let mut out = a.to_vec();
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                out[i * n + j] = a[i * n + j] * b[0];
            }
        }
        out
    }
}

/// `(a ‖ b, [λ]) -> λ a + (1 - λ) b`, optionally copying the radial row
/// and column of `a` verbatim so an exact split survives roundoff.
pub(crate) struct Blend {
    pub len: usize,
    pub keep_radial_of: Option<usize>,
}

impl Combine for Blend {
    fn apply<S: Scalar>(&self, ab: &[S], lam: &[S]) -> Vec<S> {
        let l = self.len;
        let mu = S::cst(1.0) - lam[0];
        let mut out: Vec<S> = (0..l).map(|i| ab[i] * lam[0] + ab[l + i] * mu).collect();
        if let Some(n) = self.keep_radial_of {
            for i in 0..n {
                out[i * n + n - 1] = ab[i * n + n - 1];
                out[(n - 1) * n + i] = ab[(n - 1) * n + i];
            }
        }
        out
    }
}

/// `g_ν = ν g_t + dt²`: the spatial block multiplied by the scalar field
/// `nu` on the chart.
pub fn apply_warpfun(g: &MetricField, nu: &Field) -> Result<MetricField> {
    if !g.is_radial_split() {
        return Err(Error::Usage(
            "warping-function change needs a metric of the form g_t + dt²".into(),
        ));
    }
    let n = g.n();
    if nu.dim() != n || nu.len() != 1 {
        return Err(Error::Usage(format!(
            "warping function must be a scalar field on R^{n}, got R^{} -> R^{}",
            nu.dim(),
            nu.len()
        )));
    }
    MetricField::new(*g.chart(), g.field().combine(nu, n * n, ScaleSpatial { n }), true)
}

/// [`apply_warpfun`] with the sinh-ratio warp `ν_s`, checking `ν_s > 0` on
/// the chart interval.
pub fn apply_warp_function(g: &MetricField, nu: &WarpFunction) -> Result<MetricField> {
    let h = g.chart().half_length();
    if !nu.positive_on(-h, h) {
        return Err(Error::Precondition {
            name: "t0",
            value: nu.t0(),
            requirement: "t0 - shift > 1 + xi so the warping function stays positive on the chart",
        });
    }
    apply_warpfun(g, &nu.as_field(g.n()))
}

/// `e^{2(t-s)} a + dt²` on `B^k x I_ξ`.
pub fn underline(a: &SpatialMetric, s: f64, chart: &ChartModel) -> Result<MetricField> {
    let n = chart.n;
    if a.k + 1 != n {
        return Err(Error::Usage(format!(
            "metric on B^{} cannot be underlined on a {n}-dimensional chart",
            a.k
        )));
    }
    if !chart.in_radial_interval(s) {
        return Err(Error::Usage(format!(
            "shift s = {s} lies outside I_xi = (-{h}, {h})",
            h = chart.half_length()
        )));
    }
    let block = a.field.precompose(DropLast { dim: n });
    let warp = Field::from_formula(ExpWarp { dim: n, s });
    MetricField::new(*chart, block.combine(&warp, n * n, WarpedBlock { k: a.k }), true)
}

struct ExpWarp {
    dim: usize,
    s: f64,
}

impl Formula for ExpWarp {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        vec![((p[self.dim - 1] - self.s) * 2.0).exp()]
    }
}

/// The spatial block `g_s` of `g = g_t + dt²` at the level `t = s`.
pub fn slice_at(g: &MetricField, s: f64) -> Result<SpatialMetric> {
    if !g.is_radial_split() {
        return Err(Error::Usage("slicing needs a metric of the form g_t + dt²".into()));
    }
    if !g.chart().in_radial_interval(s) {
        return Err(Error::Domain { point: vec![s] });
    }
    let n = g.n();
    let k = n - 1;
    let idx = (0..k).flat_map(|i| (0..k).map(move |j| i * n + j)).collect();
    SpatialMetric::new(
        k,
        g.field().precompose(AppendCoordinate { dim: k, value: s }).select(idx),
    )
}

/// `λ g₁ + (1 - λ) g₂` for a scalar field `λ` on the shared chart.
pub fn blend(g1: &MetricField, g2: &MetricField, lambda: &Field) -> Result<MetricField> {
    if g1.chart() != g2.chart() {
        return Err(Error::Usage("blended metrics must share a chart model".into()));
    }
    let n = g1.n();
    if lambda.dim() != n || lambda.len() != 1 {
        return Err(Error::Usage(format!(
            "blend weight must be a scalar field on R^{n}, got R^{} -> R^{}",
            lambda.dim(),
            lambda.len()
        )));
    }
    let split = g1.is_radial_split() && g2.is_radial_split();
    let op = Blend {
        len: n * n,
        keep_radial_of: split.then_some(n),
    };
    let field = g1.field().concat(g2.field()).combine(lambda, n * n, op);
    MetricField::new(*g1.chart(), field, split)
}
