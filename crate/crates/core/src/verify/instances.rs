//! Seeded random test instances: small polynomial perturbations of `σ`,
//! warping functions near 1 and blend weights in `[0, 1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::jet::Scalar;
use crate::model::{ChartModel, Field, Formula, MetricField};
use crate::warpcore::SpatialMetric;

/// Independent stream for instance `index` of a sweep.
pub fn instance_rng(seed: u64, sweep: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sweep.wrapping_mul(1 << 32).wrapping_add(index));
    rng
}

/// Exponent vectors of all monomials of total degree at most two in `dim`
/// variables.
fn quadratic_monomials(dim: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8; dim]];
    for i in 0..dim {
        let mut e = vec![0u8; dim];
        e[i] = 1;
        out.push(e);
    }
    for i in 0..dim {
        for j in i..dim {
            let mut e = vec![0u8; dim];
            e[i] += 1;
            e[j] += 1;
            out.push(e);
        }
    }
    out
}

/// `Σ c_m x^m` with coefficients drawn so that `|P| <= amplitude` on a box
/// with the given per-axis bounds.
#[derive(Clone, Debug)]
struct Polynomial {
    monomials: Vec<Vec<u8>>,
    coeffs: Vec<f64>,
}

impl Polynomial {
    fn random(rng: &mut ChaCha8Rng, bounds: &[f64], amplitude: f64) -> Self {
        let monomials = quadratic_monomials(bounds.len());
        let m = monomials.len() as f64;
        let coeffs = monomials
            .iter()
            .map(|e| {
                let sup: f64 = e.iter().zip(bounds).map(|(&k, b)| b.powi(k as i32)).product();
                rng.gen_range(-1.0..1.0) * amplitude / (m * sup)
            })
            .collect();
        Polynomial { monomials, coeffs }
    }

    fn apply<S: Scalar>(&self, p: &[S]) -> S {
        self.monomials
            .iter()
            .zip(&self.coeffs)
            .fold(S::cst(0.0), |acc, (e, &c)| {
                let term = e
                    .iter()
                    .zip(p)
                    .fold(S::cst(c), |t, (&k, &x)| (0..k).fold(t, |t, _| t * x));
                acc + term
            })
    }
}

/// `e^{2t} (I + P(x, t)) + dt²` with a symmetric polynomial `P`.
struct PerturbedModel {
    n: usize,
    entries: Vec<Polynomial>,
}

impl Formula for PerturbedModel {
    fn dim(&self) -> usize {
        self.n
    }
    fn len(&self) -> usize {
        self.n * self.n
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let n = self.n;
        let k = n - 1;
        let warp = (p[k] * 2.0).exp();
        let mut g = vec![S::cst(0.0); n * n];
        let mut idx = 0;
        for i in 0..k {
            for j in i..k {
                let delta = if i == j { 1.0 } else { 0.0 };
                let v = (self.entries[idx].apply(p) + delta) * warp;
                g[i * n + j] = v;
                g[j * n + i] = v;
                idx += 1;
            }
        }
        g[n * n - 1] = S::cst(1.0);
        g
    }
}

/// `I + P(x)` on `B^k`.
struct PerturbedFlat {
    k: usize,
    entries: Vec<Polynomial>,
}

impl Formula for PerturbedFlat {
    fn dim(&self) -> usize {
        self.k
    }
    fn len(&self) -> usize {
        self.k * self.k
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let k = self.k;
        let mut a = vec![S::cst(0.0); k * k];
        let mut idx = 0;
        for i in 0..k {
            for j in i..k {
                let delta = if i == j { 1.0 } else { 0.0 };
                let v = self.entries[idx].apply(p) + delta;
                a[i * k + j] = v;
                a[j * k + i] = v;
                idx += 1;
            }
        }
        a
    }
}

struct ScalarPolynomial {
    dim: usize,
    offset: f64,
    poly: Polynomial,
}

impl Formula for ScalarPolynomial {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        vec![self.poly.apply(p) + self.offset]
    }
}

/// `(1 + sin(α t + β x₁ + γ)) / 2`.
struct Oscillating {
    dim: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl Formula for Oscillating {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let arg = p[self.dim - 1] * self.alpha + p[0] * self.beta + self.gamma;
        vec![(arg.sin() + 1.0) * 0.5]
    }
}

fn chart_bounds(chart: &ChartModel) -> Vec<f64> {
    let mut b = vec![1.0; chart.n - 1];
    b.push(chart.half_length());
    b
}

/// A random radial-split metric near `σ`: entries of `P` bounded by an
/// amplitude drawn from `[0.001, 0.2]`, keeping `I + P` positive definite
/// for `n <= 3`.
pub fn random_metric(chart: &ChartModel, rng: &mut ChaCha8Rng) -> Result<MetricField> {
    let k = chart.n - 1;
    let amplitude = rng.gen_range(0.001..0.2) / k as f64;
    let bounds = chart_bounds(chart);
    let entries = (0..k * (k + 1) / 2)
        .map(|_| Polynomial::random(rng, &bounds, amplitude))
        .collect();
    let g = MetricField::new(
        *chart,
        Field::from_formula(PerturbedModel { n: chart.n, entries }),
        true,
    )?;
    g.validate()?;
    Ok(g)
}

/// A random metric `I + P(x)` on `B^k` with `|P| <= 0.2 / k`.
pub fn random_spatial(k: usize, rng: &mut ChaCha8Rng) -> Result<SpatialMetric> {
    let amplitude = rng.gen_range(0.001..0.2) / k as f64;
    let entries = (0..k * (k + 1) / 2)
        .map(|_| Polynomial::random(rng, &vec![1.0; k], amplitude))
        .collect();
    SpatialMetric::new(k, Field::from_formula(PerturbedFlat { k, entries }))
}

/// A random positive scalar field `1 + Q(x, t)` with `|Q| <= 0.2`.
pub fn random_warp(chart: &ChartModel, rng: &mut ChaCha8Rng) -> Field {
    let amplitude = rng.gen_range(0.001..0.2);
    Field::from_formula(ScalarPolynomial {
        dim: chart.n,
        offset: 1.0,
        poly: Polynomial::random(rng, &chart_bounds(chart), amplitude),
    })
}

/// A random blend weight with values in `[0, 1]`: every fourth draw is the
/// constant `1/2`, the rest oscillate.
pub fn random_weight(chart: &ChartModel, rng: &mut ChaCha8Rng) -> Field {
    if rng.gen_range(0..4) == 0 {
        return Field::constant(chart.n, vec![0.5]);
    }
    Field::from_formula(Oscillating {
        dim: chart.n,
        alpha: rng.gen_range(-2.0..2.0),
        beta: rng.gen_range(-2.0..2.0),
        gamma: rng.gen_range(0.0..std::f64::consts::TAU),
    })
}

/// A shift in the interior of `I_ξ`.
pub fn random_shift(chart: &ChartModel, rng: &mut ChaCha8Rng) -> f64 {
    0.9 * chart.half_length() * rng.gen_range(-1.0..1.0)
}
