//! Exact structural properties of warp forcing, reported in the same
//! `lhs < rhs` form as the estimates: `lhs` is a measured discrepancy,
//! `rhs` the tolerance.

use std::sync::Arc;

use crate::error::Result;
use crate::manifold::{pullback, pullback_radial, radial_chart, BarFamily, Center, RadialChart, RadialFamily};
use crate::model::{Domain, GridSpec, MetricField};
use crate::verify::report::{BoundReport, Sides};
use crate::warpcore::{
    apply_warp_function, bar_metric, make_bump_with, slice_at, underline, warp_force, BumpFunction,
    BumpParams, RadialMetric, WarpFunction, BUMP_C2_LIMIT,
};

/// Entrywise tolerance for `𝒲_{r₀} g = g` on sinh warps.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-12;
/// Entrywise tolerance for the factorization of `φ* ḡ_{r₀}`.
pub const FACTORIZATION_TOLERANCE: f64 = 1e-10;

/// Largest entrywise difference over the grid of `a`'s chart.
pub fn max_entry_difference(a: &MetricField, b: &MetricField) -> f64 {
    a.chart()
        .points()
        .iter()
        .flat_map(|p| {
            a.components(p)
                .into_iter()
                .zip(b.components(p))
                .map(|(x, y)| (x - y).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

fn exact(name: &str, grid: GridSpec, lhs: f64, tolerance: f64) -> BoundReport {
    BoundReport::from_sides(
        name,
        grid,
        Sides {
            lhs,
            rhs: tolerance,
            roundoff_floor: 0.0,
        },
        None,
    )
}

/// Certified C²-norm of the cutoff against 48. A construction failure is
/// reported as a failing entry, not an error.
pub fn check_bump(params: BumpParams) -> BoundReport {
    let grid = crate::model::GridSpec::default();
    let report = match make_bump_with(params) {
        Ok(rho) => {
            let c2 = rho.certified_c2();
            let mut r = BoundReport::from_sides(
                "bump",
                c2.grid,
                Sides {
                    lhs: c2.value,
                    rhs: BUMP_C2_LIMIT,
                    roundoff_floor: 0.0,
                },
                None,
            );
            r.grid_error = c2.refinement_delta.unwrap_or(0.0);
            r.marginal = r.margin.abs() <= crate::verify::report::MARGINAL_FACTOR * r.grid_error;
            r.note(format!(
                "sup|rho| = {}, sup|rho'| = {:.6}, sup|rho''| = {:.6}",
                c2.per_order_sups["f"], c2.per_order_sups["dt"], c2.per_order_sups["dtdt"]
            ))
        }
        Err(e) => BoundReport::failed("bump", grid, &e),
    };
    report
        .param("delta", params.delta)
        .note(format!("profile {:?}", params.profile))
}

/// `φ* 𝒲_{r₀} g` against `φ* g` entrywise, for `g` a sinh warp.
pub fn check_fixed_point(
    g: &RadialMetric,
    r0: f64,
    rho: &Arc<BumpFunction>,
    chart: &RadialChart,
    grid: GridSpec,
) -> Result<BoundReport> {
    let forced = pullback_radial(chart, &warp_force(g, r0, rho)?, grid)?;
    let plain = pullback_radial(chart, g, grid)?;
    let lhs = max_entry_difference(&forced, &plain);
    Ok(exact("fixed-point", grid, lhs, FIXED_POINT_TOLERANCE)
        .param("r0", r0)
        .param("t0", chart.center.t0)
        .param("xi", chart.xi))
}

/// `𝒲_{r₀} g = ḡ_{r₀}` on `r <= r₀ + δ` and `= g` on `r >= r₀ + 1/2 - δ`,
/// sampled on the spatial grid times a radial grid across each plateau.
pub fn check_plateau(g: &RadialMetric, r0: f64, rho: &Arc<BumpFunction>, grid: GridSpec) -> Result<BoundReport> {
    let forced = warp_force(g, r0, rho)?;
    let bar = bar_metric(g, r0)?;
    let delta = rho.delta();
    let (lo, hi) = g.r_range();
    let xs = Domain::Ball { k: g.k() }.grid_points(&grid);
    let radii = |a: f64, b: f64| {
        let (a, b) = (a.max(lo), b.min(hi));
        let m = grid.points_per_axis;
        (0..m).map(move |i| a + (b - a) * i as f64 / (m - 1) as f64)
    };
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for x in &xs {
        for r in radii(r0 - 1.0, r0 + delta) {
            let (w, b) = (forced.spatial(x, r), bar.spatial(x, r));
            for (a, b) in w.iter().zip(&b) {
                worst = worst.max((a - b).abs());
                scale = scale.max(b.abs());
            }
        }
        for r in radii(r0 + 0.5 - delta, r0 + 1.5) {
            let (w, b) = (forced.spatial(x, r), g.spatial(x, r));
            for (a, b) in w.iter().zip(&b) {
                worst = worst.max((a - b).abs());
                scale = scale.max(b.abs());
            }
        }
    }
    let tolerance = 4.0 * f64::EPSILON * scale.max(1.0);
    Ok(exact("plateau", grid, worst, tolerance)
        .param("r0", r0)
        .param("delta", delta)
        .note("lhs = 0 means bitwise equality on both plateaus"))
}

/// `φ* ḡ_{r₀} = (underline g'_s)_{ν_s}` with `s = r₀ - t₀`, `g' = φ* g`
/// and `ν_s` the sinh-ratio warp of base radius `r₀`.
pub fn check_factorization(
    base: &Arc<dyn RadialFamily>,
    center: &Center,
    r0: f64,
    xi: f64,
    grid: GridSpec,
) -> Result<BoundReport> {
    let chart = radial_chart(base.as_ref(), center, xi)?;
    let s = r0 - center.t0;
    let bar = BarFamily {
        base: Arc::clone(base),
        r0,
    };
    let lhs_metric = pullback(&chart, &bar, grid)?;
    let g = pullback(&chart, base.as_ref(), grid)?;
    let cut = slice_at(&g, s)?;
    let rhs_metric = apply_warp_function(&underline(&cut, s, g.chart())?, &WarpFunction::new(r0, s)?)?;
    let lhs = max_entry_difference(&lhs_metric, &rhs_metric);
    Ok(exact("identity", grid, lhs, FACTORIZATION_TOLERANCE)
        .param("r0", r0)
        .param("t0", center.t0)
        .param("s", s)
        .param("xi", xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{perturbed_hyperbolic, punctured_hyperbolic, PerturbationMode};
    use crate::warpcore::{make_bump, BumpProfile, SpatialMetric};

    fn grid() -> GridSpec {
        GridSpec::default().with_points(24)
    }

    #[test]
    fn bump_report() {
        let r = check_bump(BumpParams::default());
        assert!(r.pass && r.lhs < 48.0);
        let r = check_bump(BumpParams {
            delta: 0.05,
            profile: BumpProfile::SmoothStep,
        });
        assert!(r.error.is_some() && r.is_hard_failure());
    }

    #[test]
    fn fixed_point_and_plateaus() {
        let rho = Arc::new(make_bump(0.05).unwrap());
        let m = punctured_hyperbolic(2, [0.05, 30.0]).unwrap();
        let chart = radial_chart(&m, &Center::new(vec![0.4], 6.0), 1.0).unwrap();
        let c2 = chart.scale * chart.scale;
        let g = RadialMetric::sinh_warped(&SpatialMetric::flat(1, 1.7 * c2), (0.05, 30.0)).unwrap();
        let r = check_fixed_point(&g, 5.5, &rho, &chart, grid()).unwrap();
        assert!(r.pass, "{r:?}");
        let p = perturbed_hyperbolic(
            2,
            [0.05, 30.0],
            vec![PerturbationMode {
                amplitude: 0.01,
                sphere_mode: 3,
                radial_center: 6.0,
                radial_width: 2.0,
            }],
        )
        .unwrap();
        let r = check_plateau(&p.in_chart(&chart).unwrap(), 6.0, &rho, grid()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn factorization_identity_on_perturbed_metric() {
        let p: Arc<dyn RadialFamily> = Arc::new(
            perturbed_hyperbolic(
                3,
                [0.05, 30.0],
                vec![PerturbationMode {
                    amplitude: 0.05,
                    sphere_mode: 2,
                    radial_center: 6.0,
                    radial_width: 1.5,
                }],
            )
            .unwrap(),
        );
        for &t0 in &[5.0, 6.3, 7.2] {
            let r = check_factorization(&p, &Center::new(vec![1.0, 0.5], t0), 6.0, 1.0, grid()).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
