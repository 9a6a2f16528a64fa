//! The asymptotically conical space-time track of a curve flow, and the
//! squashed-limit comparison against it.
//!
//! The track is `{ t^(-1/2) (x, 1) : x in M_t }`, the graph of the
//! function whose `alpha`-level set is `alpha M_(alpha^-2)`: a single
//! surface one dimension up encoding the whole flow. Level sets of a
//! shrinking convex flow are nested, so along each ray from the origin
//! the level-set radius `alpha * rho_(M_t(alpha))` grows monotonically
//! with `alpha` and heights can be read off a per-ray table.
//!
//! Heights whose `alpha` falls outside the covered range
//! `[t_max^(-1/2), t_min^(-1/2)]` are extrapolated conically (scaling the
//! nearest covered level set) and flagged; flagged cells are excluded
//! from comparisons and convexity scans.

use crate::csf::flow::FlowHistory;
use crate::expander::pde::squash;
use crate::expander::selfexpander::compute_expander;
use crate::csf::curve::SupportCurve;
use crate::grid::{BoundaryKind, GridField};
use crate::{Error, Result};
use std::f64::consts::TAU;

/// Track heights plus the coverage mask.
#[derive(Debug, Clone)]
pub struct TrackField {
    pub field: GridField,
    /// Row-major; `true` where the height was solved inside the covered
    /// `alpha` range (not extrapolated).
    pub covered: Vec<bool>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub flagged: usize,
}

/// Per-ray table of level-set radii, `alpha` ascending.
struct RayTable {
    directions: usize,
    alphas: Vec<f64>,
    /// `radius[k][i]` = radius of the `alphas[i]` level set along ray `k`.
    radius: Vec<Vec<f64>>,
}

impl RayTable {
    fn build(history: &FlowHistory, directions: usize) -> Result<Self> {
        // Use snapshots with t > 0, in decreasing-t order so alpha grows.
        let mut idx: Vec<usize> =
            (0..history.len()).filter(|&i| history.times()[i] > 0.0).collect();
        if idx.len() < 2 {
            return Err(Error::OutsideHistory {
                t: 0.0,
                lo: history.t_min(),
                hi: history.t_max(),
            });
        }
        idx.reverse();
        let alphas: Vec<f64> = idx.iter().map(|&i| history.times()[i].powf(-0.5)).collect();
        let mut radius = vec![Vec::with_capacity(alphas.len()); directions];
        for (pos, &i) in idx.iter().enumerate() {
            let h = history.curve(i).support();
            for (k, row) in radius.iter_mut().enumerate() {
                let phi = TAU * k as f64 / directions as f64;
                let (uy, ux) = phi.sin_cos();
                let g = crate::expander::cone::gauge_of_samples(h, [ux, uy]);
                row.push(alphas[pos] / g);
            }
        }
        Ok(Self { directions, alphas, radius })
    }

    /// Height at polar `(rad, phi)`, linear in the ray angle and in the
    /// per-ray radius table. Returns `(alpha, covered)`.
    fn height(&self, rad: f64, phi: f64) -> (f64, bool) {
        let fk = (phi / TAU * self.directions as f64).rem_euclid(self.directions as f64);
        let k0 = fk.floor() as usize % self.directions;
        let k1 = (k0 + 1) % self.directions;
        let w = fk - fk.floor();
        let (a0, c0) = self.height_on_ray(k0, rad);
        let (a1, c1) = self.height_on_ray(k1, rad);
        (a0 * (1.0 - w) + a1 * w, c0 && c1)
    }

    fn height_on_ray(&self, k: usize, rad: f64) -> (f64, bool) {
        let radii = &self.radius[k];
        let n = radii.len();
        if rad <= radii[0] {
            // inside the innermost covered level set: conical extrapolation
            return (self.alphas[0] * rad / radii[0], false);
        }
        if rad >= radii[n - 1] {
            return (self.alphas[n - 1] * rad / radii[n - 1], false);
        }
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if radii[mid] <= rad {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = ((rad - radii[lo]) / (radii[hi] - radii[lo])).clamp(0.0, 1.0);
        (self.alphas[lo] * (1.0 - w) + self.alphas[hi] * w, true)
    }
}

/// Build the space-time track heights on the grid over `[-L, L]^2`.
pub fn spacetime_track(history: &FlowHistory, l: f64, resolution: usize) -> Result<TrackField> {
    let table = RayTable::build(history, 2 * history.grid_size())?;
    let alpha_min = table.alphas[0];
    let alpha_max = *table.alphas.last().unwrap();
    let mut values = Vec::with_capacity(resolution * resolution);
    let mut covered = Vec::with_capacity(resolution * resolution);
    let spacing = 2.0 * l / (resolution - 1) as f64;
    let mut flagged = 0usize;
    for iy in 0..resolution {
        let y = -l + iy as f64 * spacing;
        for ix in 0..resolution {
            let x = -l + ix as f64 * spacing;
            let rad = x.hypot(y);
            let (v, ok) = if rad == 0.0 {
                (alpha_min, false)
            } else {
                table.height(rad, y.atan2(x))
            };
            values.push(v);
            covered.push(ok);
            if !ok {
                flagged += 1;
            }
        }
    }
    let field = GridField::new(l, resolution, values, BoundaryKind::DirichletCone, 1.0)?;
    Ok(TrackField { field, covered, alpha_min, alpha_max, flagged })
}

impl TrackField {
    /// Polyline of the `alpha`-level set of the track (points read from
    /// the ray table of the field itself via radial scan).
    pub fn level_set(&self, alpha: f64, samples: usize) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(samples);
        let l = self.field.half_width();
        for k in 0..samples {
            let phi = TAU * k as f64 / samples as f64;
            let (c, s) = (phi.cos(), phi.sin());
            // bisect the radius where the sampled height crosses alpha
            let mut lo = 0.0;
            let mut hi = l * 0.999;
            if self.field.sample(hi * c, hi * s) < alpha {
                continue;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if self.field.sample(mid * c, mid * s) < alpha {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let rad = 0.5 * (lo + hi);
            out.push([rad * c, rad * s]);
        }
        out
    }
}

/// Polyline of `alpha M_(alpha^-2)` from the history (support samples
/// interpolated in time).
pub fn scaled_snapshot_polyline(
    history: &FlowHistory,
    alpha: f64,
    m_points: usize,
) -> Result<Vec<[f64; 2]>> {
    let t = alpha.powi(-2);
    let h = history.support_at_time(t)?;
    let curve = SupportCurve::from_samples_unchecked(h);
    let pts = curve.points();
    let stride = (pts.len() / m_points).max(1);
    Ok(pts
        .into_iter()
        .step_by(stride)
        .map(|p| [alpha * p[0], alpha * p[1]])
        .collect())
}

/// Symmetric Hausdorff distance between two closed polylines.
pub fn hausdorff_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    fn point_to_polyline(p: [f64; 2], poly: &[[f64; 2]]) -> f64 {
        let n = poly.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let q0 = poly[i];
            let q1 = poly[(i + 1) % n];
            let d = [q1[0] - q0[0], q1[1] - q0[1]];
            let w = [p[0] - q0[0], p[1] - q0[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let t = if len2 > 0.0 { ((w[0] * d[0] + w[1] * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let proj = [q0[0] + t * d[0], q0[1] + t * d[1]];
            best = best.min((p[0] - proj[0]).hypot(p[1] - proj[1]));
        }
        best
    }
    let ab = a.iter().map(|&p| point_to_polyline(p, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|&p| point_to_polyline(p, a)).fold(0.0, f64::max);
    ab.max(ba)
}

/// Squashed-expander vs space-time-track comparison over a stretch
/// sequence.
#[derive(Debug, Clone)]
pub struct LimitReport {
    /// `(N, sup |v_N - v_infinity|)` over covered cells of the sub-box
    /// `[-L/2, L/2]^2`.
    pub distances: Vec<(f64, f64)>,
    /// Whether the distance sequence decreases (within 5% wiggle).
    pub decreasing: bool,
    /// Discretization tolerance of the comparison (Richardson between the
    /// full and half resolution runs at the largest N, floored at
    /// `spacing^2`).
    pub grid_tolerance: f64,
    /// `(alpha, Hausdorff distance between the track level set and
    /// alpha M_(alpha^-2))` for sampled covered levels.
    pub level_set_check: Vec<(f64, f64)>,
    pub spacing: f64,
}

fn sup_distance_on_subbox(track: &TrackField, v_n: &GridField) -> f64 {
    let res = track.field.resolution();
    let l = track.field.half_width();
    let mut worst = 0.0_f64;
    for iy in 0..res {
        for ix in 0..res {
            if !track.covered[iy * res + ix] {
                continue;
            }
            let x = track.field.coord(ix);
            let y = track.field.coord(iy);
            if x.abs() > l / 2.0 || y.abs() > l / 2.0 {
                continue;
            }
            worst = worst.max((track.field.at(ix, iy) - v_n.sample(x, y)).abs());
        }
    }
    worst
}

/// Compare squashed expanders against the track for each `N`, check the
/// trend, and verify the level-set correspondence.
pub fn limit_comparison(
    curve: &SupportCurve,
    history: &FlowHistory,
    n_sequence: &[f64],
    l: f64,
    resolution: usize,
) -> Result<LimitReport> {
    let track = spacetime_track(history, l, resolution)?;
    let mut distances = Vec::new();
    for &n in n_sequence {
        let exp = compute_expander(curve, n, l, resolution)?;
        let v_n = squash(&exp.field, n)?;
        distances.push((n, sup_distance_on_subbox(&track, &v_n)));
    }
    let decreasing = distances.windows(2).all(|w| w[1].1 <= w[0].1 * 1.05 + 1e-9);

    // Richardson in the grid spacing at the largest N.
    let spacing = track.field.spacing();
    let mut grid_tolerance = spacing * spacing;
    if let Some(&(n_last, d_fine)) = distances.last() {
        let res_half = (resolution / 2) | 1;
        if res_half >= 41 {
            let track_h = spacetime_track(history, l, res_half)?;
            let exp_h = compute_expander(curve, n_last, l, res_half)?;
            let v_h = squash(&exp_h.field, n_last)?;
            let d_coarse = sup_distance_on_subbox(&track_h, &v_h);
            grid_tolerance = grid_tolerance.max((d_coarse - d_fine).abs() / 3.0);
        }
    }

    // Level sets of the track vs scaled snapshots, on covered heights.
    let mut level_set_check = Vec::new();
    let lo = track.alpha_min * 1.15;
    let hi = (track.alpha_max * 0.85).min(track.field.sample(l / 2.0, 0.0));
    if hi > lo {
        for k in 0..4 {
            let alpha = lo + (hi - lo) * (k as f64 + 0.5) / 4.0;
            let poly_track = track.level_set(alpha, 160);
            let poly_ref = scaled_snapshot_polyline(history, alpha, 160)?;
            if poly_track.len() > 100 {
                level_set_check.push((alpha, hausdorff_distance(&poly_track, &poly_ref)));
            }
        }
    }

    Ok(LimitReport { distances, decreasing, grid_tolerance, level_set_check, spacing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csf::curve::{make_curve, CurveSpec};
    use crate::csf::flow::{run_flow, FlowParams, Scheme};

    fn circle_history() -> FlowHistory {
        let c = make_curve(&CurveSpec::Circle { radius: 1.0 }, 128).unwrap();
        run_flow(&c, 0.43, &FlowParams { dt: 5e-5, store_every: 20, scheme: Scheme::Heun })
            .unwrap()
    }

    #[test]
    fn circle_track_is_the_hyperboloid_sheet() {
        // v(y) = sqrt(|y|^2 + 2): the alpha-level set has radius
        // alpha sqrt(1 - 2/alpha^2) = sqrt(alpha^2 - 2).
        let h = circle_history();
        let track = spacetime_track(&h, 6.0, 121).unwrap();
        let res = track.field.resolution();
        let mut worst = 0.0_f64;
        for iy in 0..res {
            for ix in 0..res {
                if !track.covered[iy * res + ix] {
                    continue;
                }
                let x = track.field.coord(ix);
                let y = track.field.coord(iy);
                let exact = (x * x + y * y + 2.0).sqrt();
                worst = worst.max((track.field.at(ix, iy) - exact).abs());
            }
        }
        assert!(worst < 3e-3, "track error {worst}");
        // spot value: the alpha = 2 level set has radius sqrt(2)
        let poly = track.level_set(2.0, 64);
        for p in poly {
            assert!((p[0].hypot(p[1]) - 2.0_f64.sqrt()).abs() < 0.02);
        }
    }

    #[test]
    fn level_sets_match_scaled_snapshots() {
        let h = circle_history();
        let track = spacetime_track(&h, 6.0, 121).unwrap();
        for &alpha in &[1.8, 2.5, 3.5] {
            let a = track.level_set(alpha, 128);
            let b = scaled_snapshot_polyline(&h, alpha, 128).unwrap();
            let d = hausdorff_distance(&a, &b);
            assert!(d <= 2.0 * track.field.spacing(), "alpha={alpha}: {d}");
        }
    }

    #[test]
    fn uncovered_center_is_flagged() {
        let h = circle_history();
        let track = spacetime_track(&h, 6.0, 121).unwrap();
        let res = track.field.resolution();
        let center = res / 2;
        assert!(!track.covered[center * res + center]);
        assert!(track.flagged > 0);
        // far corners lie beyond alpha_max for this short history
        assert!(track.alpha_min > 1.0);
        assert!(track.alpha_max > track.alpha_min);
    }

    #[test]
    fn track_heights_increase_along_rays() {
        // quasi-convexity: nested level sets
        let h = circle_history();
        let track = spacetime_track(&h, 6.0, 121).unwrap();
        let f = &track.field;
        for iy in [30usize, 60, 90] {
            let mut prev = f64::NEG_INFINITY;
            for ix in 60..f.resolution() {
                let v = f.at(ix, iy);
                assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
}
