//! Verification campaigns: named checks swept over parameter lists, each on
//! its trivial instance and on seeded random instances.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::manifold::{
    perturbed_hyperbolic, punctured_hyperbolic, radial_chart, Center, PerturbationMode, RadialFamily,
};
use crate::model::{hyperbolic_model, ChartModel, Field, GridSpec};
use crate::verify::bounds::{
    check_lemma_1_1, check_lemma_2_1, check_lemma_2_2, check_lemma_2_3, check_lemma_3_1, check_lemma_3_2,
    half_line_grid,
};
use crate::verify::instances::{
    instance_rng, random_metric, random_shift, random_spatial, random_warp, random_weight,
};
use crate::verify::report::BoundReport;
use crate::verify::structural::{check_bump, check_factorization, check_fixed_point, check_plateau};
use crate::warpcore::{make_bump_with, BumpFunction, BumpParams, RadialMetric, SpatialMetric, WarpFunction};

pub const DEFAULT_SEED: u64 = 20_240_501;
pub const DEFAULT_INSTANCES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckName {
    #[serde(rename = "lemma2.1")]
    WarpRatio,
    #[serde(rename = "lemma2.2")]
    WarpFunction,
    #[serde(rename = "lemma2.3")]
    WarpedCloseness,
    #[serde(rename = "lemma3.1")]
    UnderlineLipschitz,
    #[serde(rename = "lemma3.2")]
    UnderlineCloseness,
    #[serde(rename = "lemma1.1")]
    Blend,
    #[serde(rename = "bump")]
    Bump,
    #[serde(rename = "fixed-point")]
    FixedPoint,
    #[serde(rename = "plateau")]
    Plateau,
    #[serde(rename = "identity")]
    Factorization,
}

impl CheckName {
    pub const ALL: [CheckName; 10] = [
        CheckName::WarpRatio,
        CheckName::WarpFunction,
        CheckName::WarpedCloseness,
        CheckName::UnderlineLipschitz,
        CheckName::UnderlineCloseness,
        CheckName::Blend,
        CheckName::Bump,
        CheckName::FixedPoint,
        CheckName::Plateau,
        CheckName::Factorization,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::WarpRatio => "lemma2.1",
            CheckName::WarpFunction => "lemma2.2",
            CheckName::WarpedCloseness => "lemma2.3",
            CheckName::UnderlineLipschitz => "lemma3.1",
            CheckName::UnderlineCloseness => "lemma3.2",
            CheckName::Blend => "lemma1.1",
            CheckName::Bump => "bump",
            CheckName::FixedPoint => "fixed-point",
            CheckName::Plateau => "plateau",
            CheckName::Factorization => "identity",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = CheckName::ALL.iter().map(|c| c.as_str()).collect();
                Error::Usage(format!("unknown check `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

/// One check with its parameter lists. Unset lists take per-check defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub check: CheckName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Seeded random instances per parameter combination.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
}

fn default_n() -> usize {
    2
}

impl CheckSpec {
    pub fn new(check: CheckName) -> Self {
        CheckSpec {
            check,
            t0: None,
            xi: None,
            s: None,
            r0: None,
            delta: None,
            n: 2,
            instances: None,
        }
    }

    fn t0s(&self) -> Vec<f64> {
        self.t0.clone().unwrap_or_else(|| match self.check {
            CheckName::WarpRatio => vec![2.1, 2.5, 3.0, 4.0, 6.0, 8.0],
            _ => vec![4.0],
        })
    }

    fn xis(&self) -> Vec<f64> {
        self.xi.clone().unwrap_or_else(|| vec![1.0, 1.5])
    }

    fn r0s(&self) -> Vec<f64> {
        self.r0.clone().unwrap_or_else(|| vec![5.0])
    }

    fn deltas(&self) -> Vec<f64> {
        self.delta.clone().unwrap_or_else(|| vec![crate::warpcore::DEFAULT_DELTA])
    }

    fn instance_count(&self) -> usize {
        self.instances.unwrap_or(match self.check {
            CheckName::WarpRatio | CheckName::Bump | CheckName::FixedPoint => 0,
            CheckName::Plateau | CheckName::Factorization => 10,
            _ => DEFAULT_INSTANCES,
        })
    }

    /// Rejects parameters outside the check's preconditions.
    pub fn validate(&self) -> Result<()> {
        let all = |name: &'static str, v: &Option<Vec<f64>>, ok: &dyn Fn(f64) -> bool, req: &'static str| {
            for &x in v.iter().flatten() {
                if !ok(x) {
                    return Err(Error::Precondition {
                        name,
                        value: x,
                        requirement: req,
                    });
                }
            }
            Ok(())
        };
        if !(self.n == 2 || self.n == 3) {
            return Err(Error::Precondition {
                name: "n",
                value: self.n as f64,
                requirement: "n in {2, 3}",
            });
        }
        all("t0", &self.t0, &|t| t > 2.0, "t0 > 2")?;
        all("xi", &self.xi, &|x| x > 0.0 && x.is_finite(), "xi > 0")?;
        all("delta", &self.delta, &|d| d > 0.0 && d < 0.25, "0 < delta < 1/4")?;
        all("r0", &self.r0, &|r| r > 2.0 && r < 50.0, "2 < r0 < 50")?;
        for &xi in &self.xis() {
            let h = 1.0 + xi;
            all("s", &self.s, &|s| s.abs() < h, "s in I_xi = (-(1+xi), 1+xi)")?;
            if self.check == CheckName::WarpedCloseness {
                for &t0 in &self.t0s() {
                    all("s", &self.s, &|s| t0 > s + h, "t0 > s + 1 + xi")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub bump: BumpParams,
    #[serde(default = "default_checks")]
    pub checks: Vec<CheckSpec>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_checks() -> Vec<CheckSpec> {
    CheckName::ALL.into_iter().map(CheckSpec::new).collect()
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: DEFAULT_SEED,
            grid: GridSpec::default(),
            bump: BumpParams::default(),
            checks: default_checks(),
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.bump.delta > 0.0 && self.bump.delta < 0.25) {
            return Err(Error::Precondition {
                name: "delta",
                value: self.bump.delta,
                requirement: "0 < delta < 1/4",
            });
        }
        self.checks.iter().try_for_each(CheckSpec::validate)
    }
}

/// Runs every check of the campaign. Reports come back in config order,
/// trivial instances before seeded ones.
pub fn run_campaign(config: &CampaignConfig, exec: Execution) -> Result<Vec<BoundReport>> {
    config.validate()?;
    let rho = Arc::new(make_bump_with(config.bump)?);
    let mut out = Vec::new();
    for (i, spec) in config.checks.iter().enumerate() {
        let ctx = Context {
            seed: config.seed,
            sweep: i as u64,
            grid: config.grid,
            rho: &rho,
            exec,
        };
        out.extend(run_check(spec, &ctx)?);
    }
    Ok(out)
}

struct Context<'a> {
    seed: u64,
    sweep: u64,
    grid: GridSpec,
    rho: &'a Arc<BumpFunction>,
    exec: Execution,
}

impl Context<'_> {
    /// Runs `f` on instances `0..count` of sub-sweep `sub`, each with its
    /// own random stream.
    fn seeded<F>(&self, sub: u64, count: usize, f: F) -> Vec<BoundReport>
    where
        F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Vec<BoundReport>> + Sync + Send,
    {
        let idx: Vec<u64> = (0..count as u64).collect();
        map_ordered(self.exec, &idx, |&k| {
            let mut rng = instance_rng(self.seed, self.sweep * 64 + sub, k);
            match f(&mut rng) {
                Ok(rs) => rs.into_iter().map(|r| r.param("instance", k as f64)).collect(),
                Err(e) => vec![BoundReport::failed("instance", self.grid, &e).param("instance", k as f64)],
            }
        })
        .into_iter()
        .flatten()
        .collect()
    }
}

fn trivial(r: Result<BoundReport>, name: &str, grid: GridSpec) -> BoundReport {
    r.unwrap_or_else(|e| BoundReport::failed(name, grid, &e))
        .note("trivial instance")
}

fn run_check(spec: &CheckSpec, ctx: &Context) -> Result<Vec<BoundReport>> {
    spec.validate()?;
    let grid = ctx.grid;
    let n = spec.n;
    let count = spec.instance_count();
    let name = spec.check.as_str();
    let mut out = Vec::new();
    match spec.check {
        CheckName::WarpRatio => {
            let g = half_line_grid();
            for t0 in spec.t0s() {
                out.push(check_lemma_2_1(t0, &g)?);
            }
        }
        CheckName::WarpFunction => {
            for (j, xi) in spec.xis().into_iter().enumerate() {
                let chart = ChartModel::new(n, xi, grid)?;
                let sigma = hyperbolic_model(&chart);
                let one = Field::constant(n, vec![1.0]);
                out.push(trivial(check_lemma_2_2(&sigma, &one), name, grid));
                let nu = WarpFunction::new(3.0, 0.0)?.as_field(n);
                out.push(check_lemma_2_2(&sigma, &nu)?.param("t0", 3.0));
                out.extend(ctx.seeded(j as u64, count, |rng| {
                    let g = random_metric(&chart, rng)?;
                    let nu = random_warp(&chart, rng);
                    Ok(vec![check_lemma_2_2(&g, &nu)?])
                }));
            }
        }
        CheckName::WarpedCloseness => {
            for (j, xi) in spec.xis().into_iter().enumerate() {
                let chart = ChartModel::new(n, xi, grid)?;
                let h = 1.0 + xi;
                let sigma = hyperbolic_model(&chart);
                let shifts = spec.s.clone().unwrap_or_else(|| vec![0.0, -0.5]);
                for &t0 in &spec.t0s() {
                    for &s in &shifts {
                        let (a, b) = check_lemma_2_3(&sigma, t0, s)?;
                        out.push(a.note("g = model"));
                        out.push(b.note("g = model"));
                    }
                }
                let t0s = spec.t0.clone();
                let ss = spec.s.clone();
                out.extend(ctx.seeded(j as u64, count, |rng| {
                    let g = random_metric(&chart, rng)?;
                    let lo = h.max(2.0) + 0.1;
                    let t0 = match &t0s {
                        Some(v) => v[rng.gen_range(0..v.len())],
                        None => rng.gen_range(lo..lo + 4.0),
                    };
                    let s = match &ss {
                        Some(v) => v[rng.gen_range(0..v.len())],
                        None => rng.gen_range(-0.9 * h..(0.9 * h).min(t0 - h - 0.05)),
                    };
                    let (a, b) = check_lemma_2_3(&g, t0, s)?;
                    Ok(vec![a, b])
                }));
            }
        }
        CheckName::UnderlineLipschitz => {
            let k = n - 1;
            for (j, xi) in spec.xis().into_iter().enumerate() {
                let chart = ChartModel::new(n, xi, grid)?;
                let shifts = spec.s.clone().unwrap_or_else(|| vec![0.0]);
                for &s in &shifts {
                    let a = SpatialMetric::flat(k, 1.0);
                    out.push(trivial(check_lemma_3_1(&a, &a, s, &chart), name, grid));
                    let b = SpatialMetric::flat(k, 1.01);
                    out.push(check_lemma_3_1(&a, &b, s, &chart)?);
                }
                let ss = spec.s.clone();
                out.extend(ctx.seeded(j as u64, count, |rng| {
                    let a = random_spatial(k, rng)?;
                    let b = random_spatial(k, rng)?;
                    let s = match &ss {
                        Some(v) => v[rng.gen_range(0..v.len())],
                        None => random_shift(&chart, rng),
                    };
                    Ok(vec![check_lemma_3_1(&a, &b, s, &chart)?])
                }));
            }
        }
        CheckName::UnderlineCloseness => {
            for (j, xi) in spec.xis().into_iter().enumerate() {
                let chart = ChartModel::new(n, xi, grid)?;
                let sigma = hyperbolic_model(&chart);
                for &s in &spec.s.clone().unwrap_or_else(|| vec![0.0]) {
                    out.push(trivial(check_lemma_3_2(&sigma, s), name, grid));
                }
                let ss = spec.s.clone();
                out.extend(ctx.seeded(j as u64, count, |rng| {
                    let g = random_metric(&chart, rng)?;
                    let s = match &ss {
                        Some(v) => v[rng.gen_range(0..v.len())],
                        None => random_shift(&chart, rng),
                    };
                    Ok(vec![check_lemma_3_2(&g, s)?])
                }));
            }
        }
        CheckName::Blend => {
            for (j, xi) in spec.xis().into_iter().enumerate() {
                let chart = ChartModel::new(n, xi, grid)?;
                let sigma = hyperbolic_model(&chart);
                let half = Field::constant(n, vec![0.5]);
                out.push(trivial(check_lemma_1_1(&sigma, &sigma, &half), name, grid));
                out.extend(ctx.seeded(j as u64, count, |rng| {
                    let g1 = random_metric(&chart, rng)?;
                    let g2 = random_metric(&chart, rng)?;
                    let lambda = random_weight(&chart, rng);
                    Ok(vec![check_lemma_1_1(&g1, &g2, &lambda)?])
                }));
            }
        }
        CheckName::Bump => {
            for delta in spec.deltas() {
                out.push(check_bump(BumpParams { delta, ..ctx.rho.params() }));
            }
        }
        CheckName::FixedPoint => {
            let family = punctured_hyperbolic(n, [0.05, 60.0])?;
            for xi in spec.xis() {
                for r0 in spec.r0s() {
                    for t0 in fixed_point_centers(r0, xi) {
                        let center = Center::new(vec![0.3; n - 1], t0);
                        let chart = radial_chart(&family, &center, xi)?;
                        // h is given in the chart's spatial coordinates
                        for scale in [0.5, 1.0, 2.7] {
                            let h = SpatialMetric::flat(n - 1, scale * chart.scale * chart.scale);
                            let g = RadialMetric::sinh_warped(&h, (0.05, 60.0))?;
                            let r = check_fixed_point(&g, r0, ctx.rho, &chart, grid)?;
                            out.push(r.param("h", scale));
                        }
                    }
                }
            }
        }
        CheckName::Plateau => {
            for (j, r0) in spec.r0s().into_iter().enumerate() {
                let g = punctured_hyperbolic(n, [0.05, 60.0])?.in_chart(&radial_chart(
                    &punctured_hyperbolic(n, [0.05, 60.0])?,
                    &Center::new(vec![0.0; n - 1], r0),
                    1.0,
                )?)?;
                out.push(trivial(check_plateau(&g, r0, ctx.rho, grid), name, grid));
                out.extend(ctx.seeded(j as u64, count, |rng| {
                    let family = random_family(n, r0, rng)?;
                    let center = random_sphere_point(n, rng);
                    let chart = radial_chart(&family, &Center::new(center, r0), 1.0)?;
                    Ok(vec![check_plateau(&family.in_chart(&chart)?, r0, ctx.rho, grid)?])
                }));
            }
        }
        CheckName::Factorization => {
            for (j, xi) in spec.xis().into_iter().enumerate() {
                for (l, r0) in spec.r0.clone().unwrap_or_else(|| vec![6.0]).into_iter().enumerate() {
                    let h = 1.0 + xi;
                    out.extend(ctx.seeded(16 * j as u64 + l as u64, count, |rng| {
                        let family: Arc<dyn RadialFamily> = Arc::new(random_family(n, r0, rng)?);
                        let lo = (r0 - 0.9 * h).max(h + 0.05);
                        let t0 = rng.gen_range(lo..r0 + 0.9 * h);
                        let center = Center::new(random_sphere_point(n, rng), t0);
                        Ok(vec![check_factorization(&family, &center, r0, xi, grid)?])
                    }));
                }
            }
        }
    }
    Ok(out)
}

/// Centers before, across and beyond the blending region.
fn fixed_point_centers(r0: f64, xi: f64) -> Vec<f64> {
    let h = 1.0 + xi;
    vec![(r0 - 1.0).max(h + 0.05), r0 + 0.25, r0 + 2.0 + h]
}

fn random_sphere_point(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    match n {
        2 => vec![rng.gen_range(0.0..std::f64::consts::TAU)],
        _ => vec![rng.gen_range(0.3..2.8), rng.gen_range(0.0..std::f64::consts::TAU)],
    }
}

/// A conformal perturbation of the punctured hyperbolic metric with one or
/// two modes, centered near `r0`.
fn random_family(
    n: usize,
    r0: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<crate::manifold::CenteredManifold> {
    let count = rng.gen_range(1..=2);
    let modes = (0..count)
        .map(|_| PerturbationMode {
            amplitude: rng.gen_range(-0.2..0.2),
            sphere_mode: rng.gen_range(0..5),
            radial_center: r0 + rng.gen_range(-1.5..1.5),
            radial_width: rng.gen_range(0.8..3.0),
        })
        .collect();
    perturbed_hyperbolic(n, [0.05, 60.0], modes)
}
