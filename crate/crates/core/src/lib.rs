//! Warp forcing of radial metrics `g = g_r + dr²` that are close to
//! hyperbolic, together with numerical certification of the estimates that
//! control how close the warp-forced metric stays to hyperbolic.
//!
//! * [`model`]: chart models `B^{n-1} x I_ξ`, metric fields and C²-norms.
//! * [`warpcore`]: bump function, warping functions, spherical cuts, the
//!   underline construction, blends and warp forcing.
//! * [`manifold`]: warped-sphere manifolds with a center and radial charts.
//! * [`verify`]: bound checks and the end-to-end theorem check.

pub mod error;
pub mod exec;
pub mod jet;
pub mod manifold;
pub mod model;
pub mod verify;
pub mod warpcore;

pub use error::{Error, Result};
pub use exec::Execution;
