//! Evaluable `R^l`-valued fields on coordinate domains.

use std::fmt;
use std::sync::Arc;

use crate::jet::{Jet, Scalar, MAX_VARS};

/// A closed-form map `R^dim -> R^len`, written once for any [`Scalar`].
pub trait Formula: Send + Sync + 'static {
    fn dim(&self) -> usize;
    fn len(&self) -> usize;
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S>;
}

/// A pointwise operation combining two fields' values.
pub trait Combine: Send + Sync + 'static {
    fn apply<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S>;
}

type EvalFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type JetFn = dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync;

/// A pure map from points to `len` real components, optionally with an
/// exact second-order jet. Cheap to clone; evaluation is reentrant.
#[derive(Clone)]
pub struct Field {
    dim: usize,
    len: usize,
    eval: Arc<EvalFn>,
    jet: Option<Arc<JetFn>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("dim", &self.dim)
            .field("len", &self.len)
            .field("analytic_jet", &self.jet.is_some())
            .finish()
    }
}

impl Field {
    /// A field known only through its values; derivatives will come from
    /// finite differences.
    pub fn from_fn<F>(dim: usize, len: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Field {
            dim,
            len,
            eval: Arc::new(eval),
            jet: None,
        }
    }

    pub fn from_formula<F: Formula>(formula: F) -> Self {
        let (dim, len) = (formula.dim(), formula.len());
        let formula = Arc::new(formula);
        let f2 = Arc::clone(&formula);
        Field {
            dim,
            len,
            eval: Arc::new(move |p: &[f64]| formula.apply(p)),
            jet: (dim <= MAX_VARS)
                .then(|| Arc::new(move |p: &[Jet]| f2.apply(p)) as Arc<JetFn>),
        }
    }

    pub fn constant(dim: usize, values: Vec<f64>) -> Self {
        Field::from_formula(Constant { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn has_jet(&self) -> bool {
        self.jet.is_some()
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        debug_assert_eq!(p.len(), self.dim);
        (self.eval)(p)
    }

    /// Values with exact first and second partials at `p`.
    pub fn jet_at(&self, p: &[f64]) -> Option<Vec<Jet>> {
        self.jet.as_ref().map(|j| j(&Jet::seed(p)))
    }

    /// Evaluates on jet inputs, composing with whatever map produced them.
    pub fn jet_of(&self, p: &[Jet]) -> Option<Vec<Jet>> {
        self.jet.as_ref().map(|j| j(p))
    }

    /// Drops the analytic jet, forcing finite differences downstream.
    pub fn without_jet(&self) -> Field {
        Field {
            jet: None,
            ..self.clone()
        }
    }

    /// Pointwise combination of two fields on the same domain. The result
    /// keeps a jet only if both inputs have one.
    pub fn combine<C: Combine>(&self, other: &Field, len: usize, op: C) -> Field {
        assert_eq!(self.dim, other.dim, "combined fields must share a domain");
        let op = Arc::new(op);
        let (ea, eb) = (Arc::clone(&self.eval), Arc::clone(&other.eval));
        let op_e = Arc::clone(&op);
        let eval = Arc::new(move |p: &[f64]| op_e.apply(&ea(p), &eb(p))) as Arc<EvalFn>;
        let jet = match (&self.jet, &other.jet) {
            (Some(ja), Some(jb)) => {
                let (ja, jb) = (Arc::clone(ja), Arc::clone(jb));
                Some(Arc::new(move |p: &[Jet]| op.apply(&ja(p), &jb(p))) as Arc<JetFn>)
            }
            _ => None,
        };
        Field {
            dim: self.dim,
            len,
            eval,
            jet,
        }
    }

    /// `self ∘ map`, where `map` takes points of a new domain into this
    /// field's domain.
    pub fn precompose<M: Formula>(&self, map: M) -> Field {
        assert_eq!(map.len(), self.dim, "map must land in the field's domain");
        let dim = map.dim();
        let map = Arc::new(map);
        let ev = Arc::clone(&self.eval);
        let m_e = Arc::clone(&map);
        let eval = Arc::new(move |p: &[f64]| ev(&m_e.apply(p))) as Arc<EvalFn>;
        let jet = match &self.jet {
            Some(j) if dim <= MAX_VARS => {
                let j = Arc::clone(j);
                Some(Arc::new(move |p: &[Jet]| j(&map.apply(p))) as Arc<JetFn>)
            }
            _ => None,
        };
        Field {
            dim,
            len: self.len,
            eval,
            jet,
        }
    }

    pub fn add(&self, other: &Field) -> Field {
        assert_eq!(self.len, other.len);
        self.combine(other, self.len, Sum)
    }

    pub fn sub(&self, other: &Field) -> Field {
        assert_eq!(self.len, other.len);
        self.combine(other, self.len, Difference)
    }

    pub fn scale(&self, c: f64) -> Field {
        self.combine(&Field::constant(self.dim, vec![c]), self.len, ScaleBy)
    }

    /// Multiplies every component by the scalar field `lambda`.
    pub fn mul_scalar(&self, lambda: &Field) -> Field {
        assert_eq!(lambda.len, 1, "multiplier must be scalar");
        self.combine(lambda, self.len, ScaleBy)
    }

    /// Components of `self` followed by those of `other`.
    pub fn concat(&self, other: &Field) -> Field {
        self.combine(other, self.len + other.len, Concat)
    }

    /// The listed components, in the given order.
    pub fn select(&self, indices: Vec<usize>) -> Field {
        assert!(indices.iter().all(|&i| i < self.len));
        let len = indices.len();
        let empty = Field::constant(self.dim, vec![]);
        self.combine(&empty, len, Select { indices })
    }
}

struct Concat;

impl Combine for Concat {
    fn apply<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        a.iter().chain(b).copied().collect()
    }
}

struct Select {
    indices: Vec<usize>,
}

impl Combine for Select {
    fn apply<S: Scalar>(&self, a: &[S], _b: &[S]) -> Vec<S> {
        self.indices.iter().map(|&i| a[i]).collect()
    }
}

#[derive(Clone, Debug)]
struct Constant {
    dim: usize,
    values: Vec<f64>,
}

impl Formula for Constant {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        self.values.len()
    }
    fn apply<S: Scalar>(&self, _p: &[S]) -> Vec<S> {
        self.values.iter().map(|&v| S::cst(v)).collect()
    }
}

struct Sum;

impl Combine for Sum {
    fn apply<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        a.iter().zip(b).map(|(&x, &y)| x + y).collect()
    }
}

struct Difference;

impl Combine for Difference {
    fn apply<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        a.iter().zip(b).map(|(&x, &y)| x - y).collect()
    }
}

struct ScaleBy;

impl Combine for ScaleBy {
    fn apply<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        a.iter().map(|&x| x * b[0]).collect()
    }
}

/// Affine map `p -> p + offset` restricted to selected coordinates, used to
/// shift one axis (e.g. the radial coordinate `t -> t + a`).
#[derive(Clone, Debug)]
pub struct Translate {
    pub offset: Vec<f64>,
}

impl Formula for Translate {
    fn dim(&self) -> usize {
        self.offset.len()
    }
    fn len(&self) -> usize {
        self.offset.len()
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        p.iter().zip(&self.offset).map(|(&x, &o)| x + o).collect()
    }
}

/// Inserts a fixed value as an extra trailing coordinate: `x -> (x, s)`.
#[derive(Clone, Debug)]
pub struct AppendCoordinate {
    pub dim: usize,
    pub value: f64,
}

impl Formula for AppendCoordinate {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        self.dim + 1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let mut q = p.to_vec();
        q.push(S::cst(self.value));
        q
    }
}

/// Keeps only the last coordinate: `(x, t) -> t`.
#[derive(Clone, Debug)]
pub struct LastCoordinate {
    pub dim: usize,
}

impl Formula for LastCoordinate {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        vec![p[self.dim - 1]]
    }
}

/// Forgets the last coordinate: `(x, t) -> x`.
#[derive(Clone, Debug)]
pub struct DropLast {
    pub dim: usize,
}

impl Formula for DropLast {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        self.dim - 1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        p[..self.dim - 1].to_vec()
    }
}
