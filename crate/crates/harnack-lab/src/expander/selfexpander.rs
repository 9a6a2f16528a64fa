//! Self-expanders: the elliptic profile by shooting, and the parabolic
//! grid construction with its validity checks.
//!
//! A graph is a self-expander when `H + <x, nu>/2 = 0` (normal outward
//! from the epigraph, so convex bowls have `H > 0`). For rotationally
//! symmetric graphs `u(r)` the equation reduces to the profile ODE
//!
//! `u'' = (1 + u'^2) [ (u - r u')/2 - u'/r ]`,
//!
//! regular at the apex with `u''(0) = u(0)/4`. For each apex height the
//! profile exists globally, is convex, and opens to an asymptotic slope
//! that increases with the apex height; shooting on the apex height hits
//! a prescribed slope `N`. The flat plane through zero (`u = 0`, slope 0)
//! is the degenerate member of the family.

use crate::expander::cone::{build_cone, cone_clearance};
use crate::expander::pde::{graphical_flow, squash};
use crate::grid::GridField;
use crate::csf::curve::SupportCurve;
use crate::{Error, Result};

/// Rotationally symmetric self-expander profile asymptotic to slope `N`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub slope: f64,
    /// Sample radii, uniform from 0 to `r_max`.
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    /// `du/dr` as integrated (not differenced).
    pub u_r: Vec<f64>,
    pub apex_height: f64,
}

fn accel(r: f64, u: f64, w: f64) -> f64 {
    if r < 1e-9 {
        u / 4.0
    } else {
        (1.0 + w * w) * ((u - r * w) / 2.0 - w / r)
    }
}

/// Integrate the profile ODE from `(u(0), u'(0)) = (a, 0)`; returns the
/// end slope, or `inf` on blow-up, plus the samples when requested.
fn integrate(a: f64, r_max: f64, dr: f64, store_every: usize) -> (f64, Vec<f64>, Vec<f64>, Vec<f64>) {
    let steps = (r_max / dr).round() as usize;
    let mut u = a;
    let mut w = 0.0;
    let mut rs = Vec::new();
    let mut us = Vec::new();
    let mut ws = Vec::new();
    rs.push(0.0);
    us.push(u);
    ws.push(w);
    for k in 0..steps {
        let r = k as f64 * dr;
        let (k1u, k1w) = (w, accel(r, u, w));
        let (k2u, k2w) = (w + 0.5 * dr * k1w, accel(r + 0.5 * dr, u + 0.5 * dr * k1u, w + 0.5 * dr * k1w));
        let (k3u, k3w) = (w + 0.5 * dr * k2w, accel(r + 0.5 * dr, u + 0.5 * dr * k2u, w + 0.5 * dr * k2w));
        let (k4u, k4w) = (w + dr * k3w, accel(r + dr, u + dr * k3u, w + dr * k3w));
        u += dr / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        w += dr / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        if !u.is_finite() || !w.is_finite() || u.abs() > 1e8 || w.abs() > 1e8 {
            return (f64::INFINITY, rs, us, ws);
        }
        if (k + 1) % store_every == 0 || k + 1 == steps {
            rs.push((k + 1) as f64 * dr);
            us.push(u);
            ws.push(w);
        }
    }
    (w, rs, us, ws)
}

/// Shoot on the apex height until the far-field slope matches `N` within
/// `1e-8`. `r_max` should be a few units (the profile joins its
/// asymptotic cone at Gaussian speed).
pub fn radial_expander(n: f64, r_max: f64) -> Result<RadialProfile> {
    if !(n > 0.0) {
        return Err(Error::NonPositiveParameter { what: "slope N", value: n });
    }
    if !(r_max > 1.0) {
        return Err(Error::NonPositiveParameter { what: "r_max (need > 1)", value: r_max });
    }
    let dr = 2.5e-4;
    let store_every = 4; // samples every 1e-3
    let slope_of = |a: f64| integrate(a, r_max, dr, usize::MAX).0;

    let mut lo = 0.0;
    let mut f_lo = slope_of(lo);
    let mut hi = 1.0_f64.max(n);
    let mut f_hi = slope_of(hi);
    let mut grow = 0;
    while f_hi < n && grow < 16 {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = slope_of(hi);
        grow += 1;
    }
    if !(f_lo <= n && n <= f_hi) {
        return Err(Error::BracketFailure { lo, hi, f_lo, f_hi });
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let f_mid = slope_of(mid);
        if (f_mid - n).abs() <= 1e-8 || (hi - lo) < 1e-14 * (1.0 + mid) {
            break;
        }
        if f_mid < n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (slope, r, u, u_r) = integrate(mid, r_max, dr, store_every);
    if (slope - n).abs() > 1e-8 {
        return Err(Error::BracketFailure { lo, hi, f_lo: slope, f_hi: n });
    }
    Ok(RadialProfile { slope: n, r, u, u_r, apex_height: mid })
}

impl RadialProfile {
    /// Pointwise residual `H + <x, nu>/2` recomputed from the stored `u`
    /// samples alone (central differences), independent of the
    /// integrator's derivative values. Skips the two end samples.
    pub fn residuals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 1..self.r.len() - 1 {
            let dr0 = self.r[i] - self.r[i - 1];
            let dr1 = self.r[i + 1] - self.r[i];
            if (dr0 - dr1).abs() > 1e-12 {
                continue;
            }
            let r = self.r[i];
            if r < 1e-9 {
                continue;
            }
            let ur = (self.u[i + 1] - self.u[i - 1]) / (2.0 * dr0);
            let urr = (self.u[i + 1] - 2.0 * self.u[i] + self.u[i - 1]) / (dr0 * dr0);
            let q = (1.0 + ur * ur).sqrt();
            let mean_curv = urr / (q * q * q) + ur / (r * q);
            let pos = (r * ur - self.u[i]) / q;
            out.push((r, mean_curv + pos / 2.0));
        }
        out
    }

    /// Profile height at radius `r` by linear interpolation.
    pub fn height_at(&self, r: f64) -> f64 {
        let r = r.abs();
        let dr = self.r[1] - self.r[0];
        let i = ((r / dr) as usize).min(self.r.len() - 2);
        let w = ((r - self.r[i]) / dr).clamp(0.0, 1.0);
        self.u[i] * (1.0 - w) + self.u[i + 1] * w
    }
}

/// Grid self-expander over a convex curve with its validity diagnostics.
#[derive(Debug, Clone)]
pub struct ExpanderResult {
    /// The unsquashed expander graph `v~_N`.
    pub field: GridField,
    /// The initial cone `f_N`.
    pub cone: GridField,
    pub cone_lipschitz: f64,
    pub lipschitz: f64,
    pub min_value: f64,
    /// Sphere-barrier bound `sqrt(2(n+1)) N / d(M_0)`, `n = 1`.
    pub infimum_bound: f64,
    pub clearance: f64,
    /// Max `|v~_N - f_N|` over the outer 5% ring (asymptotics check).
    pub boundary_gap: f64,
    /// Violated validations, with measured values.
    pub flags: Vec<String>,
}

/// Flow the cone to time one in squashed variables and unsquash. The
/// result is the time-one slice of the self-expanding flow, validated
/// against the Lipschitz bound, the sphere-barrier infimum bound, and
/// the conical asymptotics.
pub fn compute_expander(
    curve: &SupportCurve,
    n: f64,
    l: f64,
    resolution: usize,
) -> Result<ExpanderResult> {
    let cone = build_cone(curve, n, l, resolution)?;
    let squashed = squash(&cone, n)?;
    let ds = squashed.spacing() * squashed.spacing() / 8.0;
    let evolved = graphical_flow(&squashed, 1.0 / n, 1.0, ds)?;
    let field = evolved.scaled(n, n);

    let cone_lipschitz = cone.lipschitz();
    let lipschitz = field.lipschitz();
    let min_value = field.min_value();
    let clearance = cone_clearance(curve)?;
    let infimum_bound = 2.0 * n / clearance;

    let res = field.resolution();
    let ring = (res / 20).max(2);
    let mut boundary_gap = 0.0_f64;
    for iy in 0..res {
        for ix in 0..res {
            let edge = ix.min(iy).min(res - 1 - ix).min(res - 1 - iy);
            if edge < ring {
                boundary_gap = boundary_gap.max((field.at(ix, iy) - cone.at(ix, iy)).abs());
            }
        }
    }

    let mut flags = Vec::new();
    let lip_tol = 2.0 * field.spacing();
    if lipschitz > cone_lipschitz + lip_tol {
        flags.push(format!(
            "lipschitz {lipschitz} exceeds cone lipschitz {cone_lipschitz} + {lip_tol}"
        ));
    }
    if min_value > infimum_bound {
        flags.push(format!("min {min_value} exceeds sphere-barrier bound {infimum_bound}"));
    }
    // The expander joins its cone like N/r in the far field, so the ring
    // gap is about N/(0.9 L); flag only clear misbehavior.
    if boundary_gap > 3.0 * n / l {
        flags.push(format!("boundary gap {boundary_gap} too large for conical asymptotics"));
    }
    Ok(ExpanderResult {
        field,
        cone,
        cone_lipschitz,
        lipschitz,
        min_value,
        infimum_bound,
        clearance,
        boundary_gap,
        flags,
    })
}
