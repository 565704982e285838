use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GridSpec;

/// Multiple of the grid-error estimate within which a pass or fail is
/// reported as marginal.
pub const MARGINAL_FACTOR: f64 = 3.0;

/// One measured inequality `lhs < rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    #[serde(deserialize_with = "null_as_nan")]
    pub lhs: f64,
    #[serde(deserialize_with = "null_as_nan")]
    pub rhs: f64,
    #[serde(deserialize_with = "null_as_nan")]
    pub margin: f64,
    pub pass: bool,
    /// `|margin|` within [`MARGINAL_FACTOR`] times `grid_error`.
    pub marginal: bool,
    /// Both sides vanish up to roundoff (`rhs = 0`, `lhs <= roundoff_floor`);
    /// counted as a pass.
    pub degenerate: bool,
    pub grid: GridSpec,
    /// Change of `lhs` and `rhs` between this grid and the half-resolution
    /// grid, plus the roundoff floor.
    #[serde(deserialize_with = "null_as_nan")]
    pub grid_error: f64,
    pub notes: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// JSON has no NaN; serde_json writes it as `null`.
fn null_as_nan<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// The two sides of an inequality measured on one grid.
#[derive(Clone, Copy, Debug)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
    /// Size below which `lhs` is indistinguishable from zero.
    pub roundoff_floor: f64,
}

impl BoundReport {
    /// Builds a report from sides measured on `grid` and on `grid.coarse()`.
    pub fn from_sides(name: &str, grid: GridSpec, fine: Sides, coarse: Option<Sides>) -> Self {
        let grid_error = coarse
            .map(|c| (fine.lhs - c.lhs).abs() + (fine.rhs - c.rhs).abs())
            .unwrap_or(0.0)
            + fine.roundoff_floor;
        let degenerate = fine.rhs == 0.0 && fine.lhs <= fine.roundoff_floor;
        let margin = fine.rhs - fine.lhs;
        BoundReport {
            name: name.to_string(),
            params: BTreeMap::new(),
            lhs: fine.lhs,
            rhs: fine.rhs,
            margin,
            pass: fine.lhs < fine.rhs || degenerate,
            marginal: !degenerate && margin.abs() <= MARGINAL_FACTOR * grid_error,
            degenerate,
            grid,
            grid_error,
            notes: String::new(),
            error: None,
        }
    }

    /// A check that could not be carried out.
    pub fn failed(name: &str, grid: GridSpec, err: &Error) -> Self {
        BoundReport {
            name: name.to_string(),
            params: BTreeMap::new(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            pass: false,
            marginal: false,
            degenerate: false,
            grid,
            grid_error: f64::NAN,
            notes: String::new(),
            error: Some(err.to_string()),
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, text: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text.as_ref());
        self
    }

    /// Failed outright: not passing, not marginal, or not evaluated.
    pub fn is_hard_failure(&self) -> bool {
        self.error.is_some() || (!self.pass && !self.marginal)
    }

    /// `pass ⇔ lhs < rhs` (or a flagged degenerate instance) and
    /// `margin = rhs - lhs`.
    pub fn is_consistent(&self) -> bool {
        if self.error.is_some() {
            return !self.pass;
        }
        let margin_ok = self.margin == self.rhs - self.lhs;
        let pass_ok = self.pass == (self.lhs < self.rhs || self.degenerate);
        let degenerate_ok = !self.degenerate || self.rhs == 0.0;
        margin_ok && pass_ok && degenerate_ok
    }
}

/// Nonzero exit status iff some check failed outside the marginal band or
/// could not be evaluated.
pub fn campaign_failed(reports: &[BoundReport]) -> bool {
    reports.iter().any(BoundReport::is_hard_failure)
}

/// Writes the CSV summary: name, key parameters, sides, margin and flags.
pub fn write_summary_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "name", "params", "lhs", "rhs", "margin", "pass", "marginal", "degenerate", "error",
    ])?;
    for r in reports {
        let params = r
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        w.write_record([
            r.name.clone(),
            params,
            format!("{:e}", r.lhs),
            format!("{:e}", r.rhs),
            format!("{:e}", r.margin),
            r.pass.to_string(),
            r.marginal.to_string(),
            r.degenerate.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sides(lhs: f64, rhs: f64) -> Sides {
        Sides {
            lhs,
            rhs,
            roundoff_floor: 1e-12,
        }
    }

    #[test]
    fn pass_iff_strict_inequality() {
        let g = GridSpec::default();
        let r = BoundReport::from_sides("x", g, sides(1.0, 2.0), Some(sides(1.0, 2.0)));
        assert!(r.pass && !r.marginal && r.is_consistent());
        let r = BoundReport::from_sides("x", g, sides(2.0, 2.0), None);
        assert!(!r.pass && r.marginal && r.is_consistent());
        assert!(!r.is_hard_failure());
        let r = BoundReport::from_sides("x", g, sides(3.0, 2.0), Some(sides(3.0, 2.0)));
        assert!(r.is_hard_failure());
    }

    #[test]
    fn degenerate_zero_instances_pass_with_flag() {
        let g = GridSpec::default();
        let r = BoundReport::from_sides("x", g, sides(0.0, 0.0), None);
        assert!(r.pass && r.degenerate && !r.marginal && r.is_consistent());
        let r = BoundReport::from_sides("x", g, sides(3e-14, 0.0), None);
        assert!(r.pass && r.degenerate);
        let r = BoundReport::from_sides("x", g, sides(1e-6, 0.0), None);
        assert!(!r.pass && !r.degenerate);
    }

    #[test]
    fn marginal_band_uses_grid_error() {
        let g = GridSpec::default();
        let r = BoundReport::from_sides("x", g, sides(1.0, 1.01), Some(sides(0.99, 1.01)));
        assert!(r.pass && r.marginal);
    }

    #[test]
    fn csv_summary_columns() {
        let g = GridSpec::default();
        let r = BoundReport::from_sides("lemma", g, sides(1.0, 2.0), None).param("t0", 3.0);
        let mut buf = Vec::new();
        write_summary_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "name,params,lhs,rhs,margin,pass,marginal,degenerate,error"
        );
        assert_eq!(lines.next().unwrap(), "lemma,t0=3,1e0,2e0,1e0,true,false,false,");
    }

    #[test]
    fn errors_count_as_failures() {
        let r = BoundReport::failed("x", GridSpec::default(), &Error::Usage("bad".into()));
        assert!(r.is_hard_failure() && r.is_consistent());
        let back: BoundReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert!(back.lhs.is_nan() && back.error.is_some());
        assert!(campaign_failed(&[r]));
        let json = serde_json::to_string(&BoundReport::from_sides(
            "y",
            GridSpec::default(),
            sides(0.0, 1.0),
            None,
        ))
        .unwrap();
        assert!(!json.contains("\"error\""));
    }
}
