//! Space-time cones over convex curves, graphical mean curvature flow,
//! self-expanders, squashed limits, and the stretched space-time track.
//!
//! The pipeline realized here, for a convex curve `M_0` enclosing the
//! origin and a stretch parameter `N >= 1`:
//!
//! 1. the cone over `M_0` is the graph of `f_N = N mu`, `mu` the
//!    Minkowski gauge of the enclosed region;
//! 2. graphical mean curvature flow started at the cone reaches, at time
//!    one, a smooth self-expander `graph(v~_N)` asymptotic to the cone
//!    (parabolic rescalings `sqrt(s) graph(v~_N)` give the whole flow);
//! 3. squashing by `1/N` gives `v_N = v~_N / N`, whose locally-uniform
//!    limit as `N -> infinity` is the level-set flow started at the unit
//!    cone; its graph is the space-time track
//!    `{ t^(-1/2) (x, 1) : x in M_t }` of the curve flow;
//! 4. stretching the track to `{ t^(-1/2) (x, N) }` yields an approximate
//!    self-expander whose second fundamental form in the direction
//!    `V + d/dt` reproduces the flow Harnack quantity `Z(V,V)/(sigma_N
//!    sqrt(t))`, with `sigma_N -> 1`.
//!
//! Convexity is preserved by every arrow in that chain, which is exactly
//! why `Z >= 0` on convex flows; [`chain`] checks each link numerically.

pub mod canonical;
pub mod chain;
pub mod cone;
pub mod pde;
pub mod selfexpander;
pub mod track;

pub use canonical::{canonical_expander_check, CanonicalCheck, SpaceTimeSurface};
pub use chain::{convexity_chain, convexity_chain_with, ChainParams, ChainReport};
pub use cone::{build_cone, cone_clearance, gauge_function, gauge_of_samples};
pub use pde::{graphical_flow, squash, LEVELSET_FLOOR};
pub use selfexpander::{compute_expander, radial_expander, ExpanderResult, RadialProfile};
pub use track::{limit_comparison, spacetime_track, LimitReport, TrackField};
