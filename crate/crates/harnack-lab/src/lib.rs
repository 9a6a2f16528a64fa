//! Numerical laboratory for differential Harnack inequalities.
//!
//! Differential Harnack inequalities are pointwise bounds satisfied by
//! positive solutions of parabolic equations. The two model cases built
//! here are
//!
//! * the heat equation on `R^n`, where every positive bounded solution
//!   satisfies the matrix bound `Hess(log u) + I/(2t) >= 0`, with equality
//!   exactly for the Gaussian kernel `rho`, and
//! * curve shortening flow (mean curvature flow of convex plane curves),
//!   where the flow quantity
//!   `Z(V,V) = dH/dt + 2<grad H, V> + h(V,V) + H/(2t)` is nonnegative on
//!   convex solutions.
//!
//! Both inequalities are statements about convexity of a geometric object:
//! `log(u/rho)` is a convex function, and `Z >= 0` is the convexity of a
//! stretched space-time track of the curve flow, one dimension up. This
//! crate builds all of those objects at desk scale (curves in the plane,
//! surfaces in 3-space) and machine-checks every link:
//!
//! * [`heat`] — closed-form positive heat solutions and their matrix,
//!   trace, integrated and log-convexity defects;
//! * [`csf`] — support-function curve shortening flow, the quantity `Z`,
//!   and the integrated bound with its path-energy infimum;
//! * [`expander`] — cones over convex curves, graphical mean curvature
//!   flow, self-expanders, the squashed limit and the space-time track,
//!   the stretched track `Gamma_N`, and the eight-link convexity chain;
//! * [`convexity`] — discrete convexity certificates for curves, grid
//!   functions and parametrized surfaces;
//! * [`suites`] + [`cli`] — configuration-driven verification runs that
//!   emit machine-readable reports.
//!
//! Everything is pure and immutable after construction; all lattice sweeps
//! are safe to run concurrently.

pub mod cli;
pub mod config;
pub mod convexity;
pub mod csf;
pub mod expander;
pub mod grid;
pub mod heat;
pub mod report;
pub mod spectral;
pub mod suites;

use thiserror::Error;

/// Crate-wide error type. Operations report the offending quantity so a
/// failed precondition can be traced to a concrete sample.
#[derive(Debug, Error)]
pub enum Error {
    #[error("time must be positive, got t = {0}")]
    NonPositiveTime(f64),
    #[error("time order violated: need 0 < t1 < t2, got t1 = {t1}, t2 = {t2}")]
    TimeOrder { t1: f64, t2: f64 },
    #[error("non-finite evaluation at {context}")]
    NonFinite { context: String },
    #[error("curve is not strictly convex: radius of curvature {radius} at angle {theta}")]
    NotConvex { theta: f64, radius: f64 },
    #[error("support function must be positive: h = {support} at angle {theta}")]
    NonPositiveSupport { theta: f64, support: f64 },
    #[error("grid size must be a power of two >= 64, got {0}")]
    BadGridSize(usize),
    #[error("{what} must be positive, got {value}")]
    NonPositiveParameter { what: &'static str, value: f64 },
    #[error("convexity lost during flow at t = {t}; step too large or past the maximal time")]
    ConvexityLost { t: f64 },
    #[error("requested end time {t_end} is past the safe horizon {horizon} (0.9 * area / 2pi)")]
    BeyondHorizon { t_end: f64, horizon: f64 },
    #[error("time {t} is outside the interior of the stored flow range [{lo}, {hi}]")]
    OutsideHistory { t: f64, lo: f64, hi: f64 },
    #[error("grid resolution {resolution} too coarse: {why}")]
    ResolutionTooCoarse { resolution: usize, why: String },
    #[error("unstable evolution: non-finite value at step {step} (s = {s})")]
    Unstable { step: usize, s: f64 },
    #[error("time step {ds} violates the parabolic stability bound {bound}")]
    StepTooLarge { ds: f64, bound: f64 },
    #[error("shooting bracket failure: slope({lo}) = {f_lo}, slope({hi}) = {f_hi}")]
    BracketFailure { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("degenerate surface metric at ({a}, {b}): det g = {det}")]
    DegenerateMetric { a: f64, b: f64, det: f64 },
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

// pub use config::{Experiment, ExperimentConfig};
pub use convexity::{ConvexityReport, NormalOrientation, ParamSurface};
pub use csf::curve::{CurveSpec, SupportCurve};
pub use csf::flow::{FlowHistory, FlowParams, Scheme};
pub use csf::quantity::HarnackSample;
pub use grid::{BoundaryKind, GridField};
pub use heat::{FundamentalSolution, HeatSolution, PointSourceSolution};
