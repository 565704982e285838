//! Chart models, metric fields, grid sampling and the uniform C²-norm that
//! defines closeness to the hyperbolic model.

pub mod field;
pub mod grid;
pub mod metric;
pub mod norm;

pub use field::{AppendCoordinate, Combine, DropLast, Field, Formula, LastCoordinate, Translate};
pub use grid::{ChartModel, Domain, GridSpec};
pub use metric::{hyperbolic_model, is_eps_close, metric_deviation, Hyperbolic, MetricField};
pub use norm::{
    c2_norm, c2_norm_refined, c2_norm_with, C2Norm, DerivativeMode, DerivativeSource,
};
