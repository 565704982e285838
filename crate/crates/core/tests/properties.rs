use std::sync::Arc;

use proptest::prelude::*;

use warpforce::jet::Scalar;
use warpforce::model::{
    c2_norm, c2_norm_with, hyperbolic_model, metric_deviation, ChartModel, DerivativeMode, Field,
    Formula, GridSpec, MetricField,
};
use warpforce::verify::instances::{instance_rng, random_metric, random_weight};
use warpforce::verify::{BoundReport, Sides};
use warpforce::warpcore::{blend, make_bump, WarpFunction};
use warpforce::Execution;

/// `a + b sin(x + c t) + d x t²`.
#[derive(Clone, Copy, Debug)]
struct Wave([f64; 4]);

impl Formula for Wave {
    fn dim(&self) -> usize {
        2
    }
    fn len(&self) -> usize {
        1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let [a, b, c, d] = self.0;
        let (x, t) = (p[0], p[1]);
        vec![(x + t * c).sin() * b + x * t * t * d + a]
    }
}

fn wave() -> impl Strategy<Value = Field> {
    prop::array::uniform4(-2.0..2.0f64).prop_map(|a| Field::from_formula(Wave(a)))
}

fn chart() -> ChartModel {
    ChartModel::new(2, 1.0, GridSpec::default().with_points(16)).unwrap()
}

fn norm(f: &Field) -> f64 {
    let c = chart();
    c2_norm(f, &c.domain(), &c.grid).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_is_absolutely_homogeneous(f in wave(), c in -5.0..5.0f64) {
        let (a, b) = (norm(&f.scale(c)), c.abs() * norm(&f));
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
    }

    #[test]
    fn norm_triangle_inequality(f in wave(), g in wave()) {
        prop_assert!(norm(&f.add(&g)) <= norm(&f) + norm(&g) + 1e-12);
        prop_assert_eq!(norm(&f.sub(&f)), 0.0);
    }

    /// `|f g| <= 4 |f| |g|` for the max-over-orders C² norm.
    #[test]
    fn product_rule_factor_four(f in wave(), g in wave()) {
        prop_assert!(norm(&f.mul_scalar(&g)) <= 4.0 * norm(&f) * norm(&g) + 1e-12);
    }

    /// Central differences are second order: halving the step quarters
    /// the gap to the analytic sups, up to a slack factor.
    #[test]
    fn finite_differences_are_second_order(f in wave()) {
        let c = chart();
        let gap = |h: f64| {
            let grid = GridSpec::new(16, 0.02, h).unwrap();
            let a = c2_norm_with(&f, &c.domain(), &grid, DerivativeMode::Auto, Execution::Serial).unwrap();
            let d = c2_norm_with(&f, &c.domain(), &grid, DerivativeMode::FiniteDifference, Execution::Serial).unwrap();
            a.per_order_sups.iter().map(|(k, v)| (v - d.per_order_sups[k]).abs()).fold(0.0, f64::max)
        };
        let (g1, g2) = (gap(4e-3), gap(2e-3));
        prop_assert!(g2 <= 0.3 * g1 + 1e-9, "{} {}", g1, g2);
    }

    #[test]
    fn execution_strategy_does_not_change_norms(f in wave()) {
        let c = chart();
        let a = c2_norm_with(&f, &c.domain(), &c.grid, DerivativeMode::Auto, Execution::Serial).unwrap();
        let b = c2_norm_with(&f, &c.domain(), &c.grid, DerivativeMode::Auto, Execution::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn deviation_is_symmetric(seed in 0u64..1000) {
        let c = chart();
        let mut rng = instance_rng(seed, 0, 0);
        let g = random_metric(&c, &mut rng).unwrap();
        let h = random_metric(&c, &mut rng).unwrap();
        prop_assert_eq!(metric_deviation(&g, &h).unwrap().value, metric_deviation(&h, &g).unwrap().value);
    }

    #[test]
    fn blend_endpoints_and_range(seed in 0u64..1000) {
        let c = chart();
        let mut rng = instance_rng(seed, 1, 0);
        let g1 = random_metric(&c, &mut rng).unwrap();
        let g2 = random_metric(&c, &mut rng).unwrap();
        let one = Field::constant(2, vec![1.0]);
        let zero = Field::constant(2, vec![0.0]);
        let lam = random_weight(&c, &mut rng);
        let mixed = blend(&g1, &g2, &lam).unwrap();
        for p in c.points() {
            prop_assert_eq!(blend(&g1, &g2, &one).unwrap().components(&p), g1.components(&p));
            prop_assert_eq!(blend(&g1, &g2, &zero).unwrap().components(&p), g2.components(&p));
            for ((m, a), b) in mixed.components(&p).iter().zip(g1.components(&p)).zip(g2.components(&p)) {
                prop_assert!(*m >= a.min(b) - 1e-12 && *m <= a.max(b) + 1e-12);
            }
        }
    }

    #[test]
    fn report_integrity(lhs in 0.0..2.0f64, rhs in 0.0..2.0f64, floor in 0.0..1e-3f64) {
        let r = BoundReport::from_sides("p", GridSpec::default(), Sides { lhs, rhs, roundoff_floor: floor }, None);
        prop_assert!(r.is_consistent());
        prop_assert_eq!(r.margin, rhs - lhs);
        prop_assert_eq!(r.pass, lhs < rhs || r.degenerate);
    }

    #[test]
    fn warp_function_is_one_at_the_shift(t0 in 2.01..12.0f64, s in -2.0..2.0f64) {
        let nu = WarpFunction::new(t0, s).unwrap();
        prop_assert!((nu.eval(s) - 1.0).abs() < 1e-15);
        let h = t0 - s - 0.01;
        prop_assert!(nu.positive_on(-h, h));
    }

    #[test]
    fn bump_is_a_monotone_cutoff(t in -1.0..1.5f64, u in -1.0..1.5f64) {
        let rho = bump();
        let (a, b) = (rho.eval(t.min(u)), rho.eval(t.max(u)));
        prop_assert!((0.0..=1.0).contains(&a) && a >= b);
    }
}

fn bump() -> Arc<warpforce::warpcore::BumpFunction> {
    use std::sync::OnceLock;
    static RHO: OnceLock<Arc<warpforce::warpcore::BumpFunction>> = OnceLock::new();
    RHO.get_or_init(|| Arc::new(make_bump(0.05).unwrap())).clone()
}

#[test]
fn model_is_at_zero_distance_from_itself() {
    let c = chart();
    let s: MetricField = hyperbolic_model(&c);
    assert_eq!(metric_deviation(&s, &s).unwrap().value, 0.0);
}
