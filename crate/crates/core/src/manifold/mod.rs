//! Warped-sphere manifolds `S^{n-1} x R⁺` with a center, near-hyperbolic
//! test metrics, and the radial charts `φ(x, t) = (φ₁(x), t + t₀)`.

pub mod centered;
pub mod chart;
pub mod sphere;

pub use centered::{
    perturbed_hyperbolic, punctured_hyperbolic, CenteredManifold, ManifoldSpec, PerturbationMode,
    WarpProfile,
};
pub use chart::{
    chart_deviation, measure_radial_closeness, pullback, pullback_radial, radial_chart, BarFamily,
    Center, CenterCloseness, Closeness, RadialChart, RadialFamily, WarpForced,
};
