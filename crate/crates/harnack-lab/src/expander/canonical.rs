//! The stretched space-time track `Gamma_N = { t^(-1/2)(x, N) : x in M_t }`
//! and its second-fundamental-form correspondence with the flow quantity.
//!
//! `Gamma_N` is an approximate self-expander: the residual
//! `E_N = H + <z, nu>/2` satisfies `N |E_N|` bounded locally uniformly.
//! Its second fundamental form reproduces the Harnack quantity: for a
//! curve tangent `V` and the normal-gauge time vector `d/dt`,
//!
//! `h(V + d/dt, V + d/dt) = Z(V,V) / (sigma_N sqrt(t))`,  `sigma_N -> 1`.
//!
//! In support coordinates `(theta, t)` the pushforward of `V + d/dt` is
//! `((v + kappa_theta) kappa, 1)`: the `kappa_theta` term converts the
//! support gauge's tangential drift back to the pure-normal gauge, and
//! `tau = kappa d_theta x` converts `V = v tau` to a coordinate vector.
//!
//! Derivatives of the embedding are exact in `theta` (spectral per
//! snapshot) and five-point finite differences in `t` across snapshots,
//! so this route shares no evolution identity with the `Z` computation it
//! is compared against.

use crate::convexity::{ParamSurface, SurfaceShape};
use crate::csf::flow::FlowHistory;
use crate::csf::quantity::harnack_z;
use crate::spectral::interp_periodic;
use crate::{Error, Result};
use std::f64::consts::TAU;

/// Borrowed view of `Gamma_N` as a parametrized surface `(theta, t)`.
pub struct SpaceTimeSurface<'a> {
    pub history: &'a FlowHistory,
    pub n: f64,
}

impl ParamSurface for SpaceTimeSurface<'_> {
    /// Smooth evaluation for generic use: cubic in time across four
    /// snapshots, cubic periodic interpolation in angle.
    fn eval(&self, theta: f64, t: f64) -> [f64; 3] {
        let times = self.history.times();
        let n = times.len();
        let mut i = match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        i = i.clamp(1, n - 3);
        let idx = [i - 1, i, i + 1, i + 2];
        let mut px = [0.0; 4];
        let mut py = [0.0; 4];
        for (k, &s) in idx.iter().enumerate() {
            let pts = &self.history.geometry(s).points;
            let xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p[1]).collect();
            px[k] = interp_periodic(&xs, theta);
            py[k] = interp_periodic(&ys, theta);
        }
        // Lagrange cubic in t over the four bracketing snapshots.
        let mut x = 0.0;
        let mut y = 0.0;
        for k in 0..4 {
            let mut w = 1.0;
            for m in 0..4 {
                if m != k {
                    w *= (t - times[idx[m]]) / (times[idx[k]] - times[idx[m]]);
                }
            }
            x += w * px[k];
            y += w * py[k];
        }
        let s = t.powf(-0.5);
        [s * x, s * y, s * self.n]
    }
}

/// One sample of the correspondence at `(theta, t, v)`.
#[derive(Debug, Clone, Copy)]
pub struct CanonicalCheck {
    pub theta: f64,
    pub t: f64,
    pub v: f64,
    /// `h^Gamma(W, W)` for the pushed-forward direction `W`.
    pub sff_value: f64,
    /// `Z(V,V)` from the flow side.
    pub z_value: f64,
    /// `Z / (sqrt(t) h(W,W))`; tends to 1 as `N` grows.
    pub sigma_estimate: f64,
    /// Expander residual `H + <z, nu>/2` at the sample point.
    pub residual: f64,
    /// Smaller principal curvature of `Gamma_N` there.
    pub min_principal: f64,
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Fundamental forms of `Gamma_N` at grid node `j`, snapshot `i`,
/// using the five-snapshot time stencil.
pub fn canonical_shape(
    history: &FlowHistory,
    n: f64,
    j: usize,
    i: usize,
) -> Result<SurfaceShape> {
    let m = history.grid_size();
    let times = history.times();
    let delta = history.uniform_spacing(i, 2).ok_or(Error::OutsideHistory {
        t: times[i],
        lo: history.t_min(),
        hi: history.t_max(),
    })?;
    let t = times[i];
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let theta = TAU * j as f64 / m as f64;
    let (sin, cos) = theta.sin_cos();
    let nvec = [cos, sin];
    let tau = [-sin, cos];

    let phi = |s: usize| -> [f64; 3] {
        let p = history.geometry(s).points[j];
        let f = times[s].powf(-0.5);
        [f * p[0], f * p[1], f * n]
    };
    let p = [phi(i - 2), phi(i - 1), phi(i), phi(i + 1), phi(i + 2)];
    let mut phi_t = [0.0; 3];
    let mut phi_tt = [0.0; 3];
    for c in 0..3 {
        phi_t[c] = (p[0][c] - 8.0 * p[1][c] + 8.0 * p[3][c] - p[4][c]) / (12.0 * delta);
        phi_tt[c] = (-p[0][c] + 16.0 * p[1][c] - 30.0 * p[2][c] + 16.0 * p[3][c] - p[4][c])
            / (12.0 * delta * delta);
    }

    let geo = history.geometry(i);
    let f = t.powf(-0.5);
    let r = geo.r[j];
    let r_theta = geo.r_theta[j];
    // x_theta = r tau, x_thetatheta = r_theta tau - r n
    let phi_a = [f * r * tau[0], f * r * tau[1], 0.0];
    let phi_aa = [
        f * (r_theta * tau[0] - r * nvec[0]),
        f * (r_theta * tau[1] - r * nvec[1]),
        0.0,
    ];
    // phi_at = d/dt [ t^(-1/2) r(t) ] tau
    let c_of = |s: usize| times[s].powf(-0.5) * history.geometry(s).r[j];
    let c_dot = (c_of(i - 2) - 8.0 * c_of(i - 1) + 8.0 * c_of(i + 1) - c_of(i + 2)) / (12.0 * delta);
    let phi_at = [c_dot * tau[0], c_dot * tau[1], 0.0];

    let g = [dot3(phi_a, phi_a), dot3(phi_a, phi_t), dot3(phi_t, phi_t)];
    let det = g[0] * g[2] - g[1] * g[1];
    let scale = (g[0] + g[2]).max(f64::EPSILON);
    if det <= 1e-12 * scale * scale {
        return Err(Error::DegenerateMetric { a: theta, b: t, det });
    }
    let mut normal = [
        phi_a[1] * phi_t[2] - phi_a[2] * phi_t[1],
        phi_a[2] * phi_t[0] - phi_a[0] * phi_t[2],
        phi_a[0] * phi_t[1] - phi_a[1] * phi_t[0],
    ];
    let norm = dot3(normal, normal).sqrt();
    normal = [normal[0] / norm, normal[1] / norm, normal[2] / norm];
    if normal[2] > 0.0 {
        normal = [-normal[0], -normal[1], -normal[2]];
    }
    let h = [-dot3(phi_aa, normal), -dot3(phi_at, normal), -dot3(phi_tt, normal)];
    let _ = sub3; // parity with other stencil helpers
    Ok(SurfaceShape { g, h, normal })
}

/// Evaluate the correspondence at `(theta, t, v)`; `theta` snaps to the
/// grid, `t` to an interior snapshot.
pub fn canonical_expander_check(
    history: &FlowHistory,
    n: f64,
    theta: f64,
    t: f64,
    v: f64,
) -> Result<CanonicalCheck> {
    if n < 1.0 {
        return Err(Error::NonPositiveParameter { what: "stretch N (need >= 1)", value: n });
    }
    let m = history.grid_size();
    let i = history.interior_index(t, 2)?;
    let j = (theta / TAU * m as f64).rem_euclid(m as f64).round() as usize % m;
    let shape = canonical_shape(history, n, j, i)?;
    let t = history.times()[i];
    let theta = TAU * j as f64 / m as f64;

    let geo = history.geometry(i);
    let kappa = geo.kappa[j];
    let kappa_theta = geo.kappa_theta[j];
    // W = pushforward of V + d/dt: ((v + kappa_theta) kappa, 1)
    let wa = (v + kappa_theta) * kappa;
    let sff_value = shape.sff(wa, 1.0);
    let z_value = harnack_z(history, theta, t, v)?.z;
    let sigma_estimate = z_value / (t.sqrt() * sff_value);

    let det = shape.g[0] * shape.g[2] - shape.g[1] * shape.g[1];
    let mean_curv = (shape.g[2] * shape.h[0] - 2.0 * shape.g[1] * shape.h[1]
        + shape.g[0] * shape.h[2])
        / det;
    let p = geo.points[j];
    let f = t.powf(-0.5);
    let z_pos = [f * p[0], f * p[1], f * n];
    let residual = mean_curv + dot3(z_pos, shape.normal) / 2.0;

    Ok(CanonicalCheck {
        theta,
        t,
        v,
        sff_value,
        z_value,
        sigma_estimate,
        residual,
        min_principal: shape.min_principal_curvature(),
    })
}
