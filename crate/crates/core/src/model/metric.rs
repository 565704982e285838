use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};

use super::field::{Field, Formula};
use super::grid::{ChartModel, GridSpec};
use super::norm::{c2_norm, C2Norm};
use crate::error::{Error, Result};
use crate::jet::Scalar;

/// Smallest eigenvalue accepted as positive definite.
pub const SPD_TOLERANCE: f64 = 1e-10;

/// A Riemannian metric on a chart model, as the `R^{n^2}`-valued map of its
/// components `g_ij = g(e_i, e_j)` (row-major).
#[derive(Clone, Debug)]
pub struct MetricField {
    chart: ChartModel,
    field: Field,
    radial_split: bool,
}

impl MetricField {
    /// `radial_split` asserts the form `g_t + dt²`: unit last diagonal entry
    /// and no mixed radial terms. It is trusted here and verified by
    /// [`MetricField::validate`].
    pub fn new(chart: ChartModel, field: Field, radial_split: bool) -> Result<Self> {
        let n = chart.n;
        if field.dim() != n || field.len() != n * n {
            return Err(Error::Usage(format!(
                "metric on a {n}-dimensional chart needs an R^{n} -> R^{} field, got R^{} -> R^{}",
                n * n,
                field.dim(),
                field.len()
            )));
        }
        Ok(MetricField {
            chart,
            field,
            radial_split,
        })
    }

    pub fn chart(&self) -> &ChartModel {
        &self.chart
    }

    pub fn n(&self) -> usize {
        self.chart.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_radial_split(&self) -> bool {
        self.radial_split
    }

    pub fn components(&self, p: &[f64]) -> Vec<f64> {
        self.field.eval(p)
    }

    pub fn matrix(&self, p: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n(), self.n(), &self.field.eval(p))
    }

    /// Same components sampled on a different grid.
    pub fn with_grid(&self, grid: GridSpec) -> MetricField {
        MetricField {
            chart: self.chart.with_grid(grid),
            ..self.clone()
        }
    }

    /// The same formula viewed on a chart of smaller excess (the restriction
    /// `φ|_{T_ξ'}` for `ξ' <= ξ`).
    pub fn restrict(&self, xi: f64) -> Result<MetricField> {
        if xi > self.chart.xi {
            return Err(Error::Usage(format!(
                "cannot restrict excess {} to larger excess {xi}",
                self.chart.xi
            )));
        }
        Ok(MetricField {
            chart: self.chart.with_excess(xi)?,
            ..self.clone()
        })
    }

    /// Checks symmetry, positive definiteness and, if claimed, the radial
    /// split at every grid point.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        for p in self.chart.points() {
            let g = self.field.eval(&p);
            let scale = g.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for i in 0..n {
                for j in 0..i {
                    if (g[i * n + j] - g[j * n + i]).abs() > 1e-12 * scale {
                        return Err(Error::NotSymmetric { point: p });
                    }
                }
            }
            if self.radial_split {
                let last = n - 1;
                let ok = g[last * n + last] == 1.0
                    && (0..last).all(|i| g[i * n + last] == 0.0 && g[last * n + i] == 0.0);
                if !ok {
                    return Err(Error::Usage(format!(
                        "metric claims the form g_t + dt² but differs at {p:?}"
                    )));
                }
            }
            let min = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &g))
                .eigenvalues
                .min();
            if !(min > SPD_TOLERANCE) {
                return Err(Error::NotPositiveDefinite {
                    point: p,
                    min_eigenvalue: min,
                });
            }
        }
        Ok(())
    }

    /// Writes one CSV row per grid point: coordinates, then the components
    /// in row-major order.
    pub fn write_grid_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.n();
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.chart.domain().axis_names();
        for i in 1..=n {
            for j in 1..=n {
                header.push(format!("g{i}{j}"));
            }
        }
        w.write_record(&header)?;
        for p in self.chart.points() {
            let row: Vec<String> = p
                .iter()
                .chain(self.field.eval(&p).iter())
                .map(|v| format!("{v:e}"))
                .collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `σ = e^{2t} σ_{R^{n-1}} + dt²`.
#[derive(Clone, Copy, Debug)]
pub struct Hyperbolic {
    pub n: usize,
}

impl Formula for Hyperbolic {
    fn dim(&self) -> usize {
        self.n
    }
    fn len(&self) -> usize {
        self.n * self.n
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let n = self.n;
        let e = (p[n - 1] * 2.0).exp();
        let mut g = vec![S::cst(0.0); n * n];
        for i in 0..n - 1 {
            g[i * n + i] = e;
        }
        g[n * n - 1] = S::cst(1.0);
        g
    }
}

pub fn hyperbolic_model(chart: &ChartModel) -> MetricField {
    MetricField {
        chart: *chart,
        field: Field::from_formula(Hyperbolic { n: chart.n }),
        radial_split: true,
    }
}

/// `|g - h|_{C²}` on the shared chart's grid.
pub fn metric_deviation(g: &MetricField, h: &MetricField) -> Result<C2Norm> {
    if g.chart != h.chart {
        return Err(Error::Usage(format!(
            "metrics live on different chart models ({:?} vs {:?})",
            g.chart, h.chart
        )));
    }
    c2_norm(&g.field.sub(&h.field), &g.chart.domain(), &g.chart.grid)
}

/// Whether `|g - σ|_{C²} < eps` on `grid`, with the measured deviation.
pub fn is_eps_close(g: &MetricField, eps: f64, grid: &GridSpec) -> Result<(bool, C2Norm)> {
    let g = g.with_grid(*grid);
    let dev = metric_deviation(&g, &hyperbolic_model(g.chart()))?;
    Ok((dev.value < eps, dev))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(n: usize, xi: f64) -> ChartModel {
        ChartModel::new(n, xi, GridSpec::default()).unwrap()
    }

    #[test]
    fn hyperbolic_components() {
        let s = hyperbolic_model(&chart(2, 1.0));
        assert_eq!(s.components(&[0.0, 0.0]), vec![1.0, 0.0, 0.0, 1.0]);
        let v = s.components(&[0.3, 1.0]);
        assert!((v[0] - 7.389_056_098_930_65).abs() < 1e-14);
        let s3 = hyperbolic_model(&chart(3, 1.0));
        assert_eq!(s3.matrix(&[0.0, 0.0, 0.0]), DMatrix::identity(3, 3));
        s3.with_grid(GridSpec::default().with_points(10)).validate().unwrap();
    }

    #[test]
    fn self_deviation_vanishes() {
        let s = hyperbolic_model(&chart(2, 1.0));
        assert_eq!(metric_deviation(&s, &s).unwrap().value, 0.0);
    }

    #[test]
    fn deviation_requires_shared_chart() {
        let a = hyperbolic_model(&chart(2, 1.0));
        let b = hyperbolic_model(&chart(2, 1.5));
        assert!(matches!(metric_deviation(&a, &b), Err(Error::Usage(_))));
    }

    #[test]
    fn non_spd_field_is_rejected() {
        let c = chart(2, 1.0).with_grid(GridSpec::default().with_points(8));
        let f = Field::from_fn(2, 4, |p| vec![p[1], 0.0, 0.0, 1.0]);
        let g = MetricField::new(c, f, true).unwrap();
        assert!(matches!(g.validate(), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn grid_csv_layout() {
        let c = chart(2, 1.0).with_grid(GridSpec::default().with_points(8));
        let mut buf = Vec::new();
        hyperbolic_model(&c).write_grid_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x1,t,g11,g12,g21,g22");
        assert_eq!(lines.count(), 64);
    }
}
