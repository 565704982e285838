//! Checks of the quantitative estimates: each measures both sides of an
//! inequality on the instance's grid and on the half-resolution grid.

use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::model::{
    c2_norm, hyperbolic_model, metric_deviation, Domain, Field, Formula, GridSpec, MetricField,
};
use crate::verify::report::{BoundReport, Sides};
use crate::warpcore::{
    apply_warp_function, apply_warpfun, blend, slice_at, spatial_deviation, underline,
    SpatialMetric, WarpFunction,
};

/// Constant in the bound `|ν - 1|_{C²(R⁺)} < 5.2 e^{-2t₀}` for the sinh-ratio
/// warping function.
pub const WARP_RATIO_CONSTANT: f64 = 5.2;
/// Right end of the half-line sample for the warping-function check. Every
/// derivative of `ν - 1` has decayed below `e^{-80}` relative there.
pub const HALF_LINE_HORIZON: f64 = 40.0;

pub(crate) fn roundoff_floor(scale: f64) -> f64 {
    1e3 * f64::EPSILON * scale.max(1.0)
}

pub(crate) fn evaluate<F>(name: &str, grid: GridSpec, measure: F) -> Result<BoundReport>
where
    F: Fn(GridSpec) -> Result<Sides>,
{
    let fine = measure(grid)?;
    let coarse = measure(grid.coarse())?;
    Ok(BoundReport::from_sides(name, grid, fine, Some(coarse)))
}

fn model_scale(g: &MetricField) -> f64 {
    4.0 * (2.0 * g.chart().half_length()).exp()
}

fn deviation_from_model(g: &MetricField) -> Result<f64> {
    Ok(metric_deviation(g, &hyperbolic_model(g.chart()))?.value)
}

/// Dense sampling of `[0, HALF_LINE_HORIZON]` used by [`check_lemma_2_1`].
pub fn half_line_grid() -> GridSpec {
    GridSpec {
        points_per_axis: 100_001,
        boundary_margin: 1e-9,
        fd_step: 1e-10,
    }
}

struct WarpRatioMinusOne(WarpFunction);

impl Formula for WarpRatioMinusOne {
    fn dim(&self) -> usize {
        1
    }
    fn len(&self) -> usize {
        1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        vec![self.0.apply(p[0]) - 1.0]
    }
}

/// `|e^{-2t}(sinh(t+t₀)/sinh t₀)² - 1|_{C²(R⁺)}` against `5.2 e^{-2t₀}`.
pub fn check_lemma_2_1(t0: f64, grid: &GridSpec) -> Result<BoundReport> {
    let nu = WarpFunction::new(t0, 0.0)?;
    let field = Field::from_formula(WarpRatioMinusOne(nu));
    let domain = Domain::Interval {
        lo: 0.0,
        hi: HALF_LINE_HORIZON,
    };
    let decay = (-2.0 * t0).exp();
    let report = evaluate("lemma2.1", *grid, |g| {
        let n = c2_norm(&field, &domain, &g)?;
        Ok(Sides {
            lhs: n.value,
            rhs: WARP_RATIO_CONSTANT * decay,
            roundoff_floor: roundoff_floor(1.0),
        })
    })?;
    let sups = c2_norm(&field, &domain, grid)?.per_order_sups;
    let ratio = report.lhs / decay;
    Ok(report.param("t0", t0).note(format!(
        "lhs/e^(-2 t0) = {:.6}; sup|f| = {:.6e}, sup|f'| = {:.6e}, sup|f''| = {:.6e}",
        ratio,
        sups["f"],
        sups["dt"],
        sups["dtdt"]
    )))
}

/// `|g - g_ν|_{C²}` against `4 |1 - ν|_{C²} |g|_{C²}`.
pub fn check_lemma_2_2(g: &MetricField, nu: &Field) -> Result<BoundReport> {
    let report = evaluate("lemma2.2", g.chart().grid, |grid| {
        let g = g.with_grid(grid);
        let h = apply_warpfun(&g, nu)?;
        let domain = g.chart().domain();
        let one_minus = Field::constant(g.n(), vec![1.0]).sub(nu);
        let c_nu = c2_norm(&one_minus, &domain, &grid)?.value;
        let c_g = c2_norm(g.field(), &domain, &grid)?.value;
        Ok(Sides {
            lhs: metric_deviation(&g, &h)?.value,
            rhs: 4.0 * c_nu * c_g,
            roundoff_floor: roundoff_floor(c_g),
        })
    })?;
    Ok(report.param("xi", g.chart().xi))
}

/// The two estimates for `h = g_{ν_s}`: `|h - g|` against
/// `21 (ε + e^{2(1+ξ)}) e^{-2t₀}` and `|h - σ|` against
/// `21 e^{2(1+ξ)} (e^{-2t₀} + ε)`, with `ε = |g - σ|` measured.
pub fn check_lemma_2_3(g: &MetricField, t0: f64, s: f64) -> Result<(BoundReport, BoundReport)> {
    let nu = WarpFunction::new(t0, s)?;
    let xi = g.chart().xi;
    let e = (2.0 * (1.0 + xi)).exp();
    let decay = (-2.0 * t0).exp();
    let measure = |grid: GridSpec| -> Result<(Sides, Sides, f64)> {
        let g = g.with_grid(grid);
        let h = apply_warp_function(&g, &nu)?;
        let eps = deviation_from_model(&g)?;
        let floor = roundoff_floor(model_scale(&g));
        Ok((
            Sides {
                lhs: metric_deviation(&h, &g)?.value,
                rhs: 21.0 * (eps + e) * decay,
                roundoff_floor: floor,
            },
            Sides {
                lhs: deviation_from_model(&h)?,
                rhs: 21.0 * e * (decay + eps),
                roundoff_floor: floor,
            },
            eps,
        ))
    };
    let grid = g.chart().grid;
    let (f1, f2, eps) = measure(grid)?;
    let (c1, c2, _) = measure(grid.coarse())?;
    let tag = |r: BoundReport| {
        r.param("t0", t0)
            .param("s", s)
            .param("xi", xi)
            .param("eps", eps)
    };
    Ok((
        tag(BoundReport::from_sides("lemma2.3(1)", grid, f1, Some(c1))),
        tag(BoundReport::from_sides("lemma2.3(2)", grid, f2, Some(c2))),
    ))
}

/// `|underline a - underline b|_{C²}` against `4 e^{4(1+ξ)} |a - b|_{C²(B^k)}`.
pub fn check_lemma_3_1(
    a: &SpatialMetric,
    b: &SpatialMetric,
    s: f64,
    chart: &crate::model::ChartModel,
) -> Result<BoundReport> {
    let xi = chart.xi;
    let factor = 4.0 * (4.0 * (1.0 + xi)).exp();
    let report = evaluate("lemma3.1", chart.grid, |grid| {
        let c = chart.with_grid(grid);
        let (ua, ub) = (underline(a, s, &c)?, underline(b, s, &c)?);
        Ok(Sides {
            lhs: metric_deviation(&ua, &ub)?.value,
            rhs: factor * spatial_deviation(a, b, &grid)?.value,
            roundoff_floor: roundoff_floor(model_scale(&ua)),
        })
    })?;
    Ok(report.param("s", s).param("xi", xi))
}

/// `|underline g_s - σ|_{C²}` against `4 e^{4(1+ξ)} ε`, `ε = |g - σ|` measured.
pub fn check_lemma_3_2(g: &MetricField, s: f64) -> Result<BoundReport> {
    let xi = g.chart().xi;
    let factor = 4.0 * (4.0 * (1.0 + xi)).exp();
    let report = evaluate("lemma3.2", g.chart().grid, |grid| {
        let g = g.with_grid(grid);
        let u = underline(&slice_at(&g, s)?, s, g.chart())?;
        Ok(Sides {
            lhs: deviation_from_model(&u)?,
            rhs: factor * deviation_from_model(&g)?,
            roundoff_floor: roundoff_floor(model_scale(&g)),
        })
    })?;
    Ok(report.param("s", s).param("xi", xi))
}

/// `|λ g₁ + (1-λ) g₂ - σ|_{C²}` against `4 (1 + |λ|_{C²}) (ε₁ + ε₂)`.
pub fn check_lemma_1_1(g1: &MetricField, g2: &MetricField, lambda: &Field) -> Result<BoundReport> {
    if g1.chart() != g2.chart() {
        return Err(Error::Usage("blended metrics must share a chart model".into()));
    }
    let report = evaluate("lemma1.1", g1.chart().grid, |grid| {
        let (g1, g2) = (g1.with_grid(grid), g2.with_grid(grid));
        let c_lambda = c2_norm(lambda, &g1.chart().domain(), &grid)?.value;
        let mixed = blend(&g1, &g2, lambda)?;
        Ok(Sides {
            lhs: deviation_from_model(&mixed)?,
            rhs: 4.0 * (1.0 + c_lambda) * (deviation_from_model(&g1)? + deviation_from_model(&g2)?),
            roundoff_floor: roundoff_floor(model_scale(&g1)),
        })
    })?;
    Ok(report.param("xi", g1.chart().xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChartModel;

    fn chart(xi: f64) -> ChartModel {
        ChartModel::new(2, xi, GridSpec::default().with_points(32)).unwrap()
    }

    /// Closed-form derivatives of `ν - 1 = u² - 1`, `u = 1 + q(1 - e^{-2t})`.
    fn half_line_oracle(t0: f64, t: f64) -> [f64; 3] {
        let q = (-2.0 * t0).exp() / (1.0 - (-2.0 * t0).exp());
        let e = (-2.0 * t).exp();
        let u = 1.0 + q * (1.0 - e);
        let (du, d2u) = (2.0 * q * e, -4.0 * q * e);
        [u * u - 1.0, 2.0 * u * du, 2.0 * du * du + 2.0 * u * d2u]
    }

    #[test]
    fn half_line_norm_matches_oracle() {
        for &t0 in &[2.1, 3.0, 6.0] {
            let r = check_lemma_2_1(t0, &half_line_grid()).unwrap();
            let oracle = (0..=400_000)
                .map(|i| i as f64 * 1e-4)
                .flat_map(|t| half_line_oracle(t0, t).map(f64::abs))
                .fold(0.0, f64::max);
            assert!((r.lhs - oracle).abs() < 1e-6 * oracle, "t0 = {t0}");
            assert!((r.rhs - 5.2 * (-2.0 * t0).exp()).abs() < 1e-18);
        }
    }

    #[test]
    fn half_line_bound_rhs_at_three() {
        let r = check_lemma_2_1(3.0, &half_line_grid()).unwrap();
        assert!((r.rhs - 0.012_889_5).abs() < 1e-7);
        // the second derivative at t = 0 is 8q(1 - q) ≈ 8 e^{-2t₀}
        assert!(r.lhs / (-6f64).exp() > 7.9);
    }

    #[test]
    fn half_line_rejects_small_t0() {
        assert!(matches!(
            check_lemma_2_1(1.0, &half_line_grid()),
            Err(Error::Precondition { name: "t0", .. })
        ));
    }

    #[test]
    fn unit_warp_is_degenerate_pass() {
        let s = hyperbolic_model(&chart(1.0));
        let r = check_lemma_2_2(&s, &Field::constant(2, vec![1.0])).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.pass && r.degenerate && r.is_consistent());
    }

    #[test]
    fn sinh_warp_of_model_passes() {
        let s = hyperbolic_model(&chart(1.0));
        let nu = WarpFunction::new(3.0, 0.0).unwrap();
        let r = check_lemma_2_2(&s, &nu.as_field(2)).unwrap();
        assert!(r.pass && r.lhs > 0.0, "{r:?}");
        let (a, b) = check_lemma_2_3(&s, 4.0, 0.0).unwrap();
        assert!(a.pass && b.pass);
        // ε = 0: |h - σ| = |h - g|
        assert!((b.lhs - a.lhs).abs() < 1e-12);
        let (a, b) = check_lemma_2_3(&s, 4.0, -0.5).unwrap();
        assert!(a.pass && b.pass);
    }

    #[test]
    fn underline_checks_on_model() {
        let c = chart(1.0);
        let a = SpatialMetric::flat(1, 1.0);
        let r = check_lemma_3_1(&a, &a, 0.0, &c).unwrap();
        assert!(r.degenerate && r.pass);
        let b = SpatialMetric::flat(1, 1.01);
        let r = check_lemma_3_1(&a, &b, 0.0, &c).unwrap();
        assert!(r.pass);
        // linear in b - a
        let b2 = SpatialMetric::flat(1, 1.02);
        let r2 = check_lemma_3_1(&a, &b2, 0.0, &c).unwrap();
        assert!((r2.lhs / r.lhs - 2.0).abs() < 1e-8);
        let r = check_lemma_3_2(&hyperbolic_model(&c), 0.7).unwrap();
        assert!(r.pass && r.degenerate, "{r:?}");
    }

    #[test]
    fn blend_of_model_is_degenerate() {
        let s = hyperbolic_model(&chart(1.5));
        let lam = Field::constant(2, vec![0.3]);
        let r = check_lemma_1_1(&s, &s, &lam).unwrap();
        assert!(r.pass && r.degenerate && r.is_consistent(), "{r:?}");
    }
}
