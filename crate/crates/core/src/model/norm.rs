//! Uniform C²-norm of sampled fields.
//!
//! The norm is the largest supremum over all multi-indices of order at most
//! two (mixed partials included) of `|∂^α f_c|`, taken jointly over every
//! component `c`. Suprema over the open domain are approximated on a grid
//! that stays a margin away from the boundary.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::field::Field;
use super::grid::{Domain, GridSpec};
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference,
}

/// Which derivatives to use when a field offers an analytic jet.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DerivativeMode {
    /// Analytic when available, finite differences otherwise.
    #[default]
    Auto,
    FiniteDifference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C2Norm {
    pub value: f64,
    /// Keyed by multi-index, e.g. `"f"`, `"dt"`, `"dx1dt"`.
    pub per_order_sups: BTreeMap<String, f64>,
    pub grid: GridSpec,
    pub derivative_source: DerivativeSource,
    /// Grid point where `value` is attained.
    pub argmax: Vec<f64>,
    /// `|value - value on the half-resolution grid|`, when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub refinement_delta: Option<f64>,
}

impl C2Norm {
    pub fn zero_order_sup(&self) -> f64 {
        self.per_order_sups["f"]
    }
}

/// Multi-index labels in the order used internally: value, first partials,
/// then second partials with `i <= j`.
pub fn multi_index_names(domain: &Domain) -> Vec<String> {
    let axes = domain.axis_names();
    let mut names = vec!["f".to_string()];
    names.extend(axes.iter().map(|a| format!("d{a}")));
    for i in 0..axes.len() {
        for j in i..axes.len() {
            names.push(format!("d{}d{}", axes[i], axes[j]));
        }
    }
    names
}

pub fn c2_norm(field: &Field, domain: &Domain, grid: &GridSpec) -> Result<C2Norm> {
    c2_norm_with(field, domain, grid, DerivativeMode::Auto, Execution::default())
}

/// C²-norm together with its change under halving the grid resolution.
pub fn c2_norm_refined(field: &Field, domain: &Domain, grid: &GridSpec) -> Result<C2Norm> {
    let mut fine = c2_norm(field, domain, grid)?;
    let coarse = c2_norm(field, domain, &grid.coarse())?;
    fine.refinement_delta = Some((fine.value - coarse.value).abs());
    Ok(fine)
}

pub fn c2_norm_with(
    field: &Field,
    domain: &Domain,
    grid: &GridSpec,
    mode: DerivativeMode,
    exec: Execution,
) -> Result<C2Norm> {
    grid.validate()?;
    domain.validate()?;
    if field.dim() != domain.dim() {
        return Err(Error::Usage(format!(
            "field on R^{} cannot be sampled on a {}-dimensional domain",
            field.dim(),
            domain.dim()
        )));
    }
    let analytic = mode == DerivativeMode::Auto && field.has_jet();
    let points = domain.grid_points(grid);
    if points.is_empty() {
        return Err(Error::Usage("grid has no interior points".into()));
    }
    let extents = domain.extents();
    let steps: Vec<f64> = extents.iter().map(|e| e * grid.fd_step).collect();

    let per_point = map_ordered(exec, &points, |p| {
        if analytic {
            Ok(jet_sups(field, p))
        } else {
            fd_sups(field, domain, p, &steps)
        }
    });

    let names = multi_index_names(domain);
    let mut sups = vec![0.0f64; names.len()];
    let (mut best, mut best_at) = (f64::NEG_INFINITY, 0usize);
    for (idx, r) in per_point.into_iter().enumerate() {
        let s = r?;
        for (acc, v) in sups.iter_mut().zip(&s) {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    point: points[idx].clone(),
                });
            }
            *acc = acc.max(*v);
        }
        let local = s.iter().cloned().fold(0.0, f64::max);
        if local > best {
            best = local;
            best_at = idx;
        }
    }
    let value = sups.iter().cloned().fold(0.0, f64::max);
    Ok(C2Norm {
        value,
        per_order_sups: names.into_iter().zip(sups).collect(),
        grid: *grid,
        derivative_source: if analytic {
            DerivativeSource::Analytic
        } else {
            DerivativeSource::FiniteDifference
        },
        argmax: points[best_at].clone(),
        refinement_delta: None,
    })
}

fn jet_sups(field: &Field, p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let jets = field.jet_at(p).expect("jet presence checked by caller");
    let mut out = vec![0.0f64; 1 + m + m * (m + 1) / 2];
    for j in &jets {
        let mut k = 0;
        out[k] = out[k].max(j.value().abs());
        for i in 0..m {
            k += 1;
            out[k] = out[k].max(j.grad(i).abs());
        }
        for a in 0..m {
            for b in a..m {
                k += 1;
                out[k] = out[k].max(j.hess(a, b).abs());
            }
        }
    }
    out
}

/// Second-order central differences; mixed partials from the 4-point cross
/// stencil.
fn fd_sups(field: &Field, domain: &Domain, p: &[f64], steps: &[f64]) -> Result<Vec<f64>> {
    let m = p.len();
    let at = |offsets: &[(usize, f64)]| -> Result<Vec<f64>> {
        let mut q = p.to_vec();
        for &(axis, d) in offsets {
            q[axis] += d;
        }
        if !domain.contains(&q) {
            return Err(Error::Domain { point: q });
        }
        Ok(field.eval(&q))
    };
    let f0 = at(&[])?;
    let mut plus = Vec::with_capacity(m);
    let mut minus = Vec::with_capacity(m);
    for (i, &h) in steps.iter().enumerate() {
        plus.push(at(&[(i, h)])?);
        minus.push(at(&[(i, -h)])?);
    }
    let l = f0.len();
    let mut out = vec![0.0f64; 1 + m + m * (m + 1) / 2];
    for c in 0..l {
        out[0] = out[0].max(f0[c].abs());
    }
    for i in 0..m {
        for c in 0..l {
            let d = (plus[i][c] - minus[i][c]) / (2.0 * steps[i]);
            out[1 + i] = out[1 + i].max(d.abs());
        }
    }
    let mut k = m;
    for a in 0..m {
        for b in a..m {
            k += 1;
            let (ha, hb) = (steps[a], steps[b]);
            if a == b {
                for c in 0..l {
                    let d = (plus[a][c] - 2.0 * f0[c] + minus[a][c]) / (ha * ha);
                    out[k] = out[k].max(d.abs());
                }
            } else {
                let pp = at(&[(a, ha), (b, hb)])?;
                let pm = at(&[(a, ha), (b, -hb)])?;
                let mp = at(&[(a, -ha), (b, hb)])?;
                let mm = at(&[(a, -ha), (b, -hb)])?;
                for c in 0..l {
                    let d = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * ha * hb);
                    out[k] = out[k].max(d.abs());
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Scalar;
    use crate::model::field::Formula;

    struct ExpTwoT;
    impl Formula for ExpTwoT {
        fn dim(&self) -> usize {
            2
        }
        fn len(&self) -> usize {
            1
        }
        fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
            vec![(p[1] * 2.0).exp()]
        }
    }

    #[test]
    fn constant_field_norm_is_its_magnitude() {
        let f = Field::constant(2, vec![-3.5, 1.0]);
        let d = Domain::Model { n: 2, xi: 1.0 };
        let n = c2_norm(&f, &d, &GridSpec::default()).unwrap();
        assert_eq!(n.value, 3.5);
        assert_eq!(n.per_order_sups["dtdt"], 0.0);
        let fd = c2_norm_with(
            &f.without_jet(),
            &d,
            &GridSpec::default(),
            DerivativeMode::Auto,
            Execution::Serial,
        )
        .unwrap();
        assert_eq!(fd.derivative_source, DerivativeSource::FiniteDifference);
        assert!((fd.value - 3.5).abs() < 1e-9);
    }

    #[test]
    fn exponential_norm_matches_closed_form_on_grid() {
        // oracle: max over sampled t of 4 e^{2t}; the largest sample is
        // t = (1 + xi)(1 - margin)
        let grid = GridSpec::default();
        let d = Domain::Model { n: 2, xi: 1.0 };
        let n = c2_norm(&Field::from_formula(ExpTwoT), &d, &grid).unwrap();
        let tmax = 2.0 * (1.0 - grid.boundary_margin);
        let expected = 4.0 * (2.0 * tmax).exp();
        assert!((n.value - expected).abs() < 1e-10 * expected);
        assert!(n.value < 4.0 * 4f64.exp());
        assert_eq!(n.argmax[1], tmax);
        let names: Vec<_> = n.per_order_sups.keys().cloned().collect();
        assert_eq!(names, ["dt", "dtdt", "dx1", "dx1dt", "dx1dx1", "f"]);
    }

    #[test]
    fn stencil_leaving_domain_names_the_point() {
        // axis steps are checked against the margin up front...
        let coarse_step = GridSpec {
            points_per_axis: 16,
            boundary_margin: 0.02,
            fd_step: 0.05,
        };
        let f = Field::from_fn(2, 1, |p| vec![p[0] * p[1]]);
        let err = c2_norm(&f, &Domain::Ball { k: 2 }, &coarse_step).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
        // ...but diagonal cross-stencil corners can still poke out of the ball
        let diagonal = GridSpec {
            points_per_axis: 64,
            boundary_margin: 0.02,
            fd_step: 0.0199,
        };
        match c2_norm(&f, &Domain::Ball { k: 2 }, &diagonal) {
            Err(Error::Domain { point }) => {
                assert!(point[0] * point[0] + point[1] * point[1] >= 1.0)
            }
            other => panic!("expected a domain error, got {other:?}"),
        }
    }

    #[test]
    fn serial_and_parallel_agree_bitwise() {
        let f = Field::from_formula(ExpTwoT);
        let d = Domain::Model { n: 2, xi: 1.5 };
        let g = GridSpec::default();
        let a = c2_norm_with(&f, &d, &g, DerivativeMode::Auto, Execution::Serial).unwrap();
        let b = c2_norm_with(&f, &d, &g, DerivativeMode::Auto, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
