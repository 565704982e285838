//! Second-order forward-mode differentiation.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to up to [`MAX_VARS`] input variables. Closed-form fields are
//! written once, generically over [`Scalar`], and evaluated either on plain
//! `f64` or on jets to obtain exact first and second partials.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Largest number of independent variables a jet can track.
pub const MAX_VARS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    nvars: usize,
    value: f64,
    grad: [f64; MAX_VARS],
    hess: [[f64; MAX_VARS]; MAX_VARS],
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Jet {
            nvars: 0,
            value,
            grad: [0.0; MAX_VARS],
            hess: [[0.0; MAX_VARS]; MAX_VARS],
        }
    }

    /// The `index`-th coordinate function evaluated at `value`.
    pub fn variable(nvars: usize, index: usize, value: f64) -> Self {
        assert!(nvars <= MAX_VARS, "jets support at most {MAX_VARS} variables");
        assert!(index < nvars);
        let mut j = Jet::constant(value);
        j.nvars = nvars;
        j.grad[index] = 1.0;
        j
    }

    /// Seeds one variable per coordinate of `p`.
    pub fn seed(p: &[f64]) -> Vec<Jet> {
        p.iter()
            .enumerate()
            .map(|(i, &x)| Jet::variable(p.len(), i, x))
            .collect()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[i][j]
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value()`.
    pub fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        let n = self.nvars;
        let mut out = Jet::constant(f);
        out.nvars = n;
        for i in 0..n {
            out.grad[i] = df * self.grad[i];
            for j in 0..n {
                out.hess[i][j] = df * self.hess[i][j] + d2f * self.grad[i] * self.grad[j];
            }
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let n = self.nvars.max(rhs.nvars);
        let mut out = self;
        out.nvars = n;
        out.value += rhs.value;
        for i in 0..n {
            out.grad[i] += rhs.grad[i];
            for j in 0..n {
                out.hess[i][j] += rhs.hess[i][j];
            }
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let n = self.nvars.max(rhs.nvars);
        let (a, b) = (self, rhs);
        let mut out = Jet::constant(a.value * b.value);
        out.nvars = n;
        for i in 0..n {
            out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
            for j in 0..n {
                out.hess[i][j] = a.hess[i][j] * b.value
                    + a.grad[i] * b.grad[j]
                    + a.grad[j] * b.grad[i]
                    + a.value * b.hess[i][j];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let v = rhs.value;
        self * rhs.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        self.value *= rhs;
        for i in 0..self.nvars {
            self.grad[i] *= rhs;
            for j in 0..self.nvars {
                self.hess[i][j] *= rhs;
            }
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

/// Numbers closed-form fields can be evaluated on: `f64` for values,
/// [`Jet`] for values with exact derivatives.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(c: f64) -> Self;
    fn value(&self) -> f64;
    /// Composes with a scalar function whose value and first two derivatives
    /// at `self.value()` are `(f, df, d2f)`.
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self;

    fn exp(self) -> Self {
        let e = self.value().exp();
        self.chain(e, e, e)
    }

    fn sinh(self) -> Self {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.chain(s, c, s)
    }

    fn cosh(self) -> Self {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.chain(c, s, c)
    }

    fn sin(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.chain(s, c, -s)
    }

    fn cos(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.chain(c, -s, -c)
    }

    fn sqr(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn chain(self, f: f64, _df: f64, _d2f: f64) -> Self {
        f
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

impl Scalar for Jet {
    fn cst(c: f64) -> Self {
        Jet::constant(c)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        Jet::chain(self, f, df, d2f)
    }
}
