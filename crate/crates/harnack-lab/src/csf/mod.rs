//! Curve shortening flow of convex closed plane curves.
//!
//! Curves are encoded by their support function `h(theta)` sampled on a
//! uniform grid of outward normal angles. In that gauge the flow
//! `dF/dt = -kappa nu` becomes the scalar PDE `dh/dt = -1/(h'' + h)`,
//! convexity is the pointwise condition `h'' + h > 0`, and the curvature
//! is `kappa = 1/(h'' + h)`.

pub mod curve;
pub mod flow;
pub mod path;
pub mod quantity;

pub use curve::{make_curve, CurveSpec, SupportCurve};
pub use flow::{run_flow, step_flow, FlowHistory, FlowParams, Scheme};
pub use path::{integrated_harnack_gap, path_energy, PathEnergy, PathEnergyParams};
pub use quantity::{geometry_at, harnack_z, GeometrySample, HarnackSample};
