//! Punctured hyperbolic space is far from radially close to hyperbolic near
//! its puncture: measured closeness against the center radius `t₀`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::manifold::{chart_deviation, punctured_hyperbolic, Center};
use crate::model::GridSpec;
use crate::verify::report::{BoundReport, Sides};

/// Required contrast between the small-radius and the large-radius row.
pub const CONTRAST_FACTOR: f64 = 100.0;
/// Closeness expected at the large radius.
pub const FAR_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemarkRow {
    pub t0: f64,
    pub eps: f64,
}

/// `2.2, 2.5, 3, ..., 9`.
pub fn default_radii() -> Vec<f64> {
    let mut v = vec![2.2];
    v.extend((5..=18).map(|i| i as f64 * 0.5));
    v
}

/// Closeness of the punctured hyperbolic metric at one center per radius.
pub fn remark_table(n: usize, xi: f64, radii: &[f64], grid: GridSpec, exec: Execution) -> Result<Vec<RemarkRow>> {
    if radii.is_empty() {
        return Err(Error::Usage("no radii given".into()));
    }
    let hi = radii.iter().cloned().fold(0.0, f64::max) + 1.0 + xi + 1.0;
    let family = punctured_hyperbolic(n, [0.01, hi])?;
    let rows = map_ordered(exec, radii, |&t0| {
        let c = Center::new(vec![0.0; n - 1], t0);
        chart_deviation(&family, &c, xi, grid, exec).map(|d| RemarkRow { t0, eps: d.value })
    });
    rows.into_iter().collect()
}

fn row_at(rows: &[RemarkRow], t0: f64) -> Result<&RemarkRow> {
    rows.iter()
        .find(|r| (r.t0 - t0).abs() < 1e-12)
        .ok_or_else(|| Error::Usage(format!("table has no row at t0 = {t0}")))
}

fn report(name: &str, grid: GridSpec, lhs: f64, rhs: f64) -> BoundReport {
    BoundReport::from_sides(
        name,
        grid,
        Sides {
            lhs,
            rhs,
            roundoff_floor: 0.0,
        },
        None,
    )
}

/// The contrast `ε(near) > 100 ε(far)`, `ε(far) < 10⁻³`, monotone decay,
/// and `ε(t₀+1)/ε(t₀)` within a factor 2 of `e⁻²` for `t₀ ∈ [5, far]`.
pub fn remark_reports(rows: &[RemarkRow], near: f64, far: f64, grid: GridSpec) -> Result<Vec<BoundReport>> {
    let (a, b) = (row_at(rows, near)?, row_at(rows, far)?);
    let mut out = vec![
        report("remark-contrast", grid, CONTRAST_FACTOR * b.eps, a.eps)
            .param("near", near)
            .param("far", far)
            .note(format!("eps(near)/eps(far) = {:.6e}", a.eps / b.eps)),
        report("remark-far", grid, b.eps, FAR_THRESHOLD).param("t0", far),
    ];
    let worst = rows
        .windows(2)
        .map(|w| w[1].eps / w[0].eps)
        .fold(0.0, f64::max);
    out.push(report("remark-monotone", grid, worst, 1.0).note("largest eps(next)/eps(previous)"));
    for r in rows.iter().filter(|r| r.t0 >= 5.0 && r.t0 + 1.0 <= far + 1e-12) {
        if let Ok(next) = row_at(rows, r.t0 + 1.0) {
            let ratio = next.eps / r.eps;
            out.push(
                report("remark-decay", grid, (ratio.ln() + 2.0).abs(), std::f64::consts::LN_2)
                    .param("t0", r.t0)
                    .note(format!("eps(t0+1)/eps(t0) = {ratio:.6}, e^-2 = {:.6}", (-2f64).exp())),
            );
        }
    }
    Ok(out)
}

/// `t0,eps,ratio_next` where `ratio_next = ε(t₀+1)/ε(t₀)` when the table
/// has that row.
pub fn write_remark_csv<W: Write>(rows: &[RemarkRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t0", "eps", "ratio_next"])?;
    for r in rows {
        let next = row_at(rows, r.t0 + 1.0).map(|n| format!("{:e}", n.eps / r.eps));
        w.write_record([r.t0.to_string(), format!("{:e}", r.eps), next.unwrap_or_default()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contrast_on_coarse_grid() {
        let grid = GridSpec::default().with_points(24);
        let rows = remark_table(2, 1.0, &[2.2, 5.0, 6.0, 8.0], grid, Execution::default()).unwrap();
        let reports = remark_reports(&rows, 2.2, 8.0, grid).unwrap();
        assert!(reports.iter().all(|r| r.pass), "{reports:?}");
        assert_eq!(reports.iter().filter(|r| r.name == "remark-decay").count(), 1);
    }

    #[test]
    fn missing_rows_and_bad_radii() {
        let grid = GridSpec::default().with_points(16);
        let rows = remark_table(2, 1.0, &[3.0, 4.0], grid, Execution::Serial).unwrap();
        assert!(remark_reports(&rows, 2.2, 4.0, grid).is_err());
        assert!(remark_table(2, 1.0, &[1.5], grid, Execution::Serial).is_err());
        let mut buf = Vec::new();
        write_remark_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t0,eps,ratio_next\n3,"));
        assert_eq!(text.lines().nth(2).unwrap().split(',').nth(2), Some(""));
    }
}
