use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a domain is sampled when a supremum is approximated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub points_per_axis: usize,
    /// Fraction of each axis half-length left out next to the boundary.
    pub boundary_margin: f64,
    /// Finite-difference step, relative to each axis half-length.
    pub fd_step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points_per_axis: 64,
            boundary_margin: 0.02,
            fd_step: 1e-4,
        }
    }
}

impl GridSpec {
    pub fn new(points_per_axis: usize, boundary_margin: f64, fd_step: f64) -> Result<Self> {
        let g = GridSpec {
            points_per_axis,
            boundary_margin,
            fd_step,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_points(self, points_per_axis: usize) -> Self {
        GridSpec {
            points_per_axis,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_axis < 8 {
            return Err(Error::Usage(format!(
                "grid needs at least 8 points per axis, got {}",
                self.points_per_axis
            )));
        }
        if !(self.boundary_margin > 0.0 && self.boundary_margin < 0.5) {
            return Err(Error::Usage(format!(
                "boundary margin must lie in (0, 0.5), got {}",
                self.boundary_margin
            )));
        }
        // stencils reach one step past the outermost sample on each axis
        if !(self.fd_step > 0.0 && self.fd_step < self.boundary_margin) {
            return Err(Error::Usage(format!(
                "finite-difference step must lie in (0, boundary_margin), got {}",
                self.fd_step
            )));
        }
        Ok(())
    }

    /// The grid used to estimate refinement error: half the points per axis.
    pub fn coarse(&self) -> GridSpec {
        self.with_points((self.points_per_axis / 2).max(8))
    }
}

/// A sampled domain: a product of an open ball and an open interval, or
/// either factor alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// The chart model `B^{n-1} x (-(1+xi), 1+xi)`.
    Model { n: usize, xi: f64 },
    /// The open unit ball of dimension `k`.
    Ball { k: usize },
    /// An open interval.
    Interval { lo: f64, hi: f64 },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match *self {
            Domain::Model { n, .. } => n,
            Domain::Ball { k } => k,
            Domain::Interval { .. } => 1,
        }
    }

    fn ball_dim(&self) -> usize {
        match *self {
            Domain::Model { n, .. } => n - 1,
            Domain::Ball { k } => k,
            Domain::Interval { .. } => 0,
        }
    }

    /// Center and half-length of the interval factor, if any.
    fn interval(&self) -> Option<(f64, f64)> {
        match *self {
            Domain::Model { xi, .. } => Some((0.0, 1.0 + xi)),
            Domain::Ball { .. } => None,
            Domain::Interval { lo, hi } => Some((0.5 * (lo + hi), 0.5 * (hi - lo))),
        }
    }

    pub fn axis_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.ball_dim()).map(|i| format!("x{i}")).collect();
        if self.interval().is_some() {
            names.push("t".to_string());
        }
        names
    }

    /// Half-length of each axis; finite-difference steps scale with it.
    pub fn extents(&self) -> Vec<f64> {
        let mut e = vec![1.0; self.ball_dim()];
        if let Some((_, half)) = self.interval() {
            e.push(half);
        }
        e
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let k = self.ball_dim();
        let r2: f64 = p[..k].iter().map(|x| x * x).sum();
        if r2 >= 1.0 {
            return false;
        }
        match self.interval() {
            Some((c, half)) => (p[k] - c).abs() < half,
            None => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Domain::Model { n, xi } => {
                if n < 2 {
                    return Err(Error::Usage(format!("chart dimension must be >= 2, got {n}")));
                }
                if !(xi > 0.0 && xi.is_finite()) {
                    return Err(Error::Usage(format!("excess must be positive, got {xi}")));
                }
            }
            Domain::Ball { k } => {
                if k == 0 {
                    return Err(Error::Usage("ball dimension must be >= 1".into()));
                }
            }
            Domain::Interval { lo, hi } => {
                if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                    return Err(Error::Usage(format!("empty interval ({lo}, {hi})")));
                }
            }
        }
        Ok(())
    }

    /// Sample points: a tensor grid over the box of each factor shrunk by
    /// the boundary margin, with ball points outside radius `1 - margin`
    /// dropped. Row-major, interval coordinate fastest.
    pub fn grid_points(&self, grid: &GridSpec) -> Vec<Vec<f64>> {
        let m = grid.boundary_margin;
        let nper = grid.points_per_axis;
        let axis = |center: f64, half: f64| -> Vec<f64> {
            let a = half * (1.0 - m);
            (0..nper)
                .map(|i| center - a + 2.0 * a * i as f64 / (nper - 1) as f64)
                .collect()
        };
        let k = self.ball_dim();
        let ball_axis = axis(0.0, 1.0);
        let rmax2 = (1.0 - m) * (1.0 - m) * (1.0 + 1e-12);
        let mut ball_pts: Vec<Vec<f64>> = vec![Vec::new()];
        for _ in 0..k {
            let mut next = Vec::with_capacity(ball_pts.len() * nper);
            for p in &ball_pts {
                for &x in &ball_axis {
                    let mut q = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
            ball_pts = next;
        }
        ball_pts.retain(|p| p.iter().map(|x| x * x).sum::<f64>() <= rmax2);
        match self.interval() {
            None => ball_pts,
            Some((c, half)) => {
                let ts = axis(c, half);
                let mut out = Vec::with_capacity(ball_pts.len() * ts.len());
                for p in &ball_pts {
                    for &t in &ts {
                        let mut q = p.clone();
                        q.push(t);
                        out.push(q);
                    }
                }
                out
            }
        }
    }
}

/// The chart model with excess `xi` and the grid used to sample it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartModel {
    pub n: usize,
    pub xi: f64,
    pub grid: GridSpec,
}

impl ChartModel {
    pub fn new(n: usize, xi: f64, grid: GridSpec) -> Result<Self> {
        let c = ChartModel { n, xi, grid };
        c.domain().validate()?;
        grid.validate()?;
        Ok(c)
    }

    pub fn domain(&self) -> Domain {
        Domain::Model {
            n: self.n,
            xi: self.xi,
        }
    }

    /// Half-length `1 + xi` of the radial interval.
    pub fn half_length(&self) -> f64 {
        1.0 + self.xi
    }

    pub fn in_radial_interval(&self, t: f64) -> bool {
        t.abs() < self.half_length()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.domain().grid_points(&self.grid)
    }

    /// Same dimension and grid, different excess.
    pub fn with_excess(&self, xi: f64) -> Result<Self> {
        ChartModel::new(self.n, xi, self.grid)
    }

    pub fn with_grid(&self, grid: GridSpec) -> Self {
        ChartModel { grid, ..*self }
    }
}
