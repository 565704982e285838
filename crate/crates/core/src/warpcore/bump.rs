//! The smooth cutoff `ρ`: identically 1 on `(-∞, δ]`, identically 0 on
//! `[1/2 - δ, ∞)`, with a measured C²-norm that must stay below
//! [`BUMP_C2_LIMIT`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::model::{c2_norm_refined, C2Norm, Domain, Field, Formula, GridSpec};

pub const BUMP_C2_LIMIT: f64 = 48.0;
pub const DEFAULT_DELTA: f64 = 0.05;
pub const DEFAULT_SHARPNESS: f64 = 0.3;

/// Shape of the monotone 0 -> 1 transition on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BumpProfile {
    /// Normalized integral of `exp(-a / (x (1 - x)))`, i.e. of the product
    /// `E(x/a) E((1-x)/a)` of two copies of `E(x) = e^{-1/x}`.
    Mollifier { sharpness: f64 },
    /// `E(x) / (E(x) + E(1 - x))`.
    SmoothStep,
}

impl Default for BumpProfile {
    fn default() -> Self {
        BumpProfile::Mollifier {
            sharpness: DEFAULT_SHARPNESS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpParams {
    pub delta: f64,
    #[serde(default)]
    pub profile: BumpProfile,
}

impl Default for BumpParams {
    fn default() -> Self {
        BumpParams {
            delta: DEFAULT_DELTA,
            profile: BumpProfile::default(),
        }
    }
}

#[derive(Clone, Debug)]
enum Step {
    SmoothStep,
    Mollifier {
        sharpness: f64,
        /// `∫_0^{k/PANELS} ψ` for `k = 0..=PANELS`.
        cumulative: Vec<f64>,
    },
}

const PANELS: usize = 64;

/// 12-point Gauss-Legendre rule on `[-1, 1]`.
fn gauss_legendre() -> &'static ([f64; 12], [f64; 12]) {
    use std::sync::OnceLock;
    static RULE: OnceLock<([f64; 12], [f64; 12])> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 12;
        let mut nodes = [0.0; N];
        let mut weights = [0.0; N];
        for i in 0..N {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=N {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn psi(a: f64, x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-a / (x * (1.0 - x))).exp()
    }
}

fn integrate_psi(a: f64, lo: f64, hi: f64) -> f64 {
    let (nodes, weights) = gauss_legendre();
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * psi(a, mid + half * x))
        .sum::<f64>()
        * half
}

impl Step {
    fn mollifier(sharpness: f64) -> Step {
        let mut cumulative = vec![0.0; PANELS + 1];
        for k in 0..PANELS {
            let (lo, hi) = (k as f64 / PANELS as f64, (k + 1) as f64 / PANELS as f64);
            cumulative[k + 1] = cumulative[k] + integrate_psi(sharpness, lo, hi);
        }
        Step::Mollifier {
            sharpness,
            cumulative,
        }
    }

    /// Value and first two derivatives of the transition at `x`.
    fn derivs(&self, x: f64) -> (f64, f64, f64) {
        if x <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        if x >= 1.0 {
            return (1.0, 0.0, 0.0);
        }
        match self {
            Step::SmoothStep => {
                let e = |y: f64| (-1.0 / y).exp();
                let (a, b) = (e(x), e(1.0 - x));
                let (y, z) = (x, 1.0 - x);
                let da = a / (y * y);
                let d2a = a * (1.0 - 2.0 * y) / y.powi(4);
                let db = -b / (z * z);
                let d2b = b * (1.0 - 2.0 * z) / z.powi(4);
                let d = a + b;
                let dd = da + db;
                let num = da * b - a * db;
                let dnum = d2a * b - a * d2b;
                (a / d, num / (d * d), dnum / (d * d) - 2.0 * num * dd / (d * d * d))
            }
            Step::Mollifier {
                sharpness,
                cumulative,
            } => {
                let a = *sharpness;
                let total = cumulative[PANELS];
                let k = ((x * PANELS as f64) as usize).min(PANELS - 1);
                let lo = k as f64 / PANELS as f64;
                let s = (cumulative[k] + integrate_psi(a, lo, x)) / total;
                let p = psi(a, x);
                let q = x * (1.0 - x);
                (s, p / total, p * a * (1.0 - 2.0 * x) / (q * q) / total)
            }
        }
    }
}

/// The cutoff `ρ` with its certified C²-norm over the real line.
#[derive(Clone, Debug)]
pub struct BumpFunction {
    params: BumpParams,
    step: Step,
    certified_c2: C2Norm,
}

/// Builds the default-profile cutoff with plateau parameter `delta`.
pub fn make_bump(delta: f64) -> Result<BumpFunction> {
    make_bump_with(BumpParams {
        delta,
        profile: BumpProfile::default(),
    })
}

pub fn make_bump_with(params: BumpParams) -> Result<BumpFunction> {
    let delta = params.delta;
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::Precondition {
            name: "delta",
            value: delta,
            requirement: "0 < delta < 1/4",
        });
    }
    let step = match params.profile {
        BumpProfile::SmoothStep => Step::SmoothStep,
        BumpProfile::Mollifier { sharpness } => {
            if !(sharpness > 0.0 && sharpness.is_finite()) {
                return Err(Error::Construction(format!(
                    "mollifier sharpness must be positive, got {sharpness}"
                )));
            }
            Step::mollifier(sharpness)
        }
    };
    let mut bump = BumpFunction {
        params,
        step,
        certified_c2: C2Norm {
            value: f64::NAN,
            per_order_sups: Default::default(),
            grid: GridSpec::default(),
            derivative_source: crate::model::DerivativeSource::Analytic,
            argmax: vec![],
            refinement_delta: None,
        },
    };
    bump.certified_c2 = certify(&bump)?;
    if !(bump.certified_c2.value < BUMP_C2_LIMIT) {
        return Err(Error::Construction(format!(
            "bump with delta = {delta} and profile {:?} has C2-norm {:.4} >= {BUMP_C2_LIMIT}; \
             use a smaller-derivative profile or a smaller delta",
            params.profile, bump.certified_c2.value
        )));
    }
    Ok(bump)
}

/// Dense sampling of the transition interval; outside it `ρ` is constant
/// and contributes only `|ρ| <= 1`, which the grid also reaches.
fn certify(bump: &BumpFunction) -> Result<C2Norm> {
    let grid = GridSpec {
        points_per_axis: 40_001,
        boundary_margin: 1e-6,
        fd_step: 1e-7,
    };
    let field = Field::from_formula(OnAxis {
        rho: Arc::new(bump.clone()),
        dim: 1,
        shift: 0.0,
    });
    c2_norm_refined(&field, &Domain::Interval { lo: 0.0, hi: 0.5 }, &grid)
}

impl BumpFunction {
    pub fn params(&self) -> BumpParams {
        self.params
    }

    pub fn delta(&self) -> f64 {
        self.params.delta
    }

    pub fn certified_c2(&self) -> &C2Norm {
        &self.certified_c2
    }

    /// `(ρ, ρ', ρ'')` at `t`. Exactly `(1, 0, 0)` for `t <= δ` and
    /// `(0, 0, 0)` for `t >= 1/2 - δ`.
    pub fn derivs(&self, t: f64) -> (f64, f64, f64) {
        let delta = self.params.delta;
        if t <= delta {
            return (1.0, 0.0, 0.0);
        }
        if t >= 0.5 - delta {
            return (0.0, 0.0, 0.0);
        }
        let width = 0.5 - 2.0 * delta;
        let (s, ds, d2s) = self.step.derivs((t - delta) / width);
        (1.0 - s, -ds / width, -d2s / (width * width))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivs(t).0
    }

    pub fn apply<S: Scalar>(&self, t: S) -> S {
        let (f, df, d2f) = self.derivs(t.value());
        t.chain(f, df, d2f)
    }
}

impl Serialize for BumpFunction {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.params.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BumpFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let params = BumpParams::deserialize(d)?;
        make_bump_with(params).map_err(serde::de::Error::custom)
    }
}

/// `ρ_{r₀}(t) = ρ(t - r₀)`.
#[derive(Clone, Debug)]
pub struct ShiftedBump {
    pub rho: Arc<BumpFunction>,
    pub r0: f64,
}

pub fn shifted_bump(rho: &Arc<BumpFunction>, r0: f64) -> ShiftedBump {
    ShiftedBump {
        rho: Arc::clone(rho),
        r0,
    }
}

impl ShiftedBump {
    pub fn eval(&self, t: f64) -> f64 {
        self.rho.eval(t - self.r0)
    }

    pub fn apply<S: Scalar>(&self, t: S) -> S {
        self.rho.apply(t - self.r0)
    }

    /// Translation leaves every derivative sup unchanged.
    pub fn certified_c2(&self) -> &C2Norm {
        self.rho.certified_c2()
    }

    /// As a scalar field on a `dim`-dimensional domain whose last coordinate
    /// is `r - offset`: `p ↦ ρ(p_last + offset - r₀)`.
    pub fn as_field(&self, dim: usize, offset: f64) -> Field {
        Field::from_formula(OnAxis {
            rho: Arc::clone(&self.rho),
            dim,
            shift: self.r0 - offset,
        })
    }
}

struct OnAxis {
    rho: Arc<BumpFunction>,
    dim: usize,
    shift: f64,
}

impl Formula for OnAxis {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        vec![self.rho.apply(p[self.dim - 1] - self.shift)]
    }
}
