//! Building blocks of warp forcing: the cutoff `ρ`, warping-function
//! changes, the underline construction, convex blends, spherical cuts and
//! the deformation `𝒲_{r₀}` itself.

pub mod bump;
pub mod ops;
pub mod radial;
pub mod warpfun;

pub use bump::{
    make_bump, make_bump_with, shifted_bump, BumpFunction, BumpParams, BumpProfile, ShiftedBump,
    BUMP_C2_LIMIT, DEFAULT_DELTA,
};
pub use ops::{
    apply_warp_function, apply_warpfun, blend, slice_at, spatial_deviation, underline,
    SpatialMetric,
};
pub use radial::{bar_metric, spherical_cut, warp_force, RadialMetric};
pub use warpfun::WarpFunction;
