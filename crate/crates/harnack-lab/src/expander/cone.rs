//! Cones over convex curves as graphs of scaled Minkowski gauges.

use crate::csf::curve::SupportCurve;
use crate::grid::{BoundaryKind, GridField};
use crate::{Error, Result};
use std::f64::consts::TAU;

/// Gauge of the region described by support samples `h`:
/// `mu(y) = max_theta <y, n(theta)> / h(theta)`, clamped at zero.
///
/// The maximizer over grid angles is refined by a parabolic fit through
/// the neighbouring values, so the returned gauge is smooth to
/// `O(dtheta^4)` rather than polyhedral; the refined value is still
/// exactly 1-homogeneous in `y` (a ratio of homogeneous quadratic and
/// linear forms).
pub fn gauge_of_samples(h: &[f64], y: [f64; 2]) -> f64 {
    let m = h.len();
    let g_at = |j: usize| {
        let th = TAU * (j % m) as f64 / m as f64;
        (y[0] * th.cos() + y[1] * th.sin()) / h[j % m]
    };
    let mut best = f64::NEG_INFINITY;
    let mut best_j = 0;
    for j in 0..m {
        let v = g_at(j);
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let gm = g_at(best_j + m - 1);
    let g0 = best;
    let gp = g_at(best_j + 1);
    let denom = gp - 2.0 * g0 + gm;
    let refined = if denom < 0.0 {
        g0 - (gp - gm) * (gp - gm) / (8.0 * denom)
    } else {
        g0
    };
    refined.max(0.0)
}

/// [`gauge_of_samples`] for a validated curve.
pub fn gauge_function(curve: &SupportCurve, y: [f64; 2]) -> Result<f64> {
    if curve.min_support() <= 0.0 {
        return Err(Error::NonPositiveSupport { theta: 0.0, support: curve.min_support() });
    }
    Ok(gauge_of_samples(curve.support(), y))
}

/// The cone of slope `N` over the curve: `f_N(y) = N mu(y)` sampled on
/// the grid over `[-L, L]^2`. Its Lipschitz constant is
/// `N max|grad mu| = N / min h`, and by homogeneity every cone point `z`
/// has `<z, nu> = 0` (the cone is straight at infinity).
pub fn build_cone(curve: &SupportCurve, n: f64, l: f64, resolution: usize) -> Result<GridField> {
    if n < 1.0 {
        return Err(Error::NonPositiveParameter { what: "stretch N (need >= 1)", value: n });
    }
    let spacing = 2.0 * l / (resolution.max(2) - 1) as f64;
    if spacing > curve.min_radial_distance() {
        return Err(Error::ResolutionTooCoarse {
            resolution,
            why: format!(
                "grid spacing {spacing} exceeds the curve's minimal radial distance {}",
                curve.min_radial_distance()
            ),
        });
    }
    let h = curve.support().to_vec();
    GridField::from_fn(l, resolution, BoundaryKind::DirichletCone, n, |x, y| {
        n * gauge_of_samples(&h, [x, y])
    })
}

/// Height-one clearance of the unit cone: half the radius of the largest
/// sphere centred at `(0, 1)` that misses the region below the cone
/// `graph(mu)`. The minimum distance along the ray of direction `phi` is
/// `1/sqrt(1 + g(phi)^2)` with `g(phi) = mu(unit(phi))`, so the clearance
/// is `(1/2) min_phi (1 + g^2)^(-1/2)`, found over a dense direction
/// sampling.
///
/// Sphere comparison then bounds the expander's apex:
/// `min v~_N <= sqrt(2(n+1)) N / d` with `n = 1`.
pub fn cone_clearance(curve: &SupportCurve) -> Result<f64> {
    let samples = 4 * curve.grid_size();
    let mut worst = f64::INFINITY;
    for k in 0..samples {
        let phi = TAU * k as f64 / samples as f64;
        let g = gauge_function(curve, [phi.cos(), phi.sin()])?;
        worst = worst.min(1.0 / (1.0 + g * g).sqrt());
    }
    Ok(0.5 * worst)
}

/// Max over an annulus of the homogeneity defect `|f - y . grad f|`
/// relative to `|y|`, using central differences; zero for exact cones.
pub fn cone_straightness_defect(field: &GridField) -> f64 {
    let n = field.resolution();
    let h = field.spacing();
    let mut worst = 0.0_f64;
    for iy in 1..n - 1 {
        for ix in 1..n - 1 {
            let x = field.coord(ix);
            let y = field.coord(iy);
            let r = x.hypot(y);
            if r < 0.25 * field.half_width() || r > 0.75 * field.half_width() {
                continue;
            }
            let gx = (field.at(ix + 1, iy) - field.at(ix - 1, iy)) / (2.0 * h);
            let gy = (field.at(ix, iy + 1) - field.at(ix, iy - 1)) / (2.0 * h);
            let defect = (field.at(ix, iy) - x * gx - y * gy).abs() / r;
            worst = worst.max(defect);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csf::curve::{make_curve, CurveSpec};

    fn circle() -> SupportCurve {
        make_curve(&CurveSpec::Circle { radius: 1.0 }, 256).unwrap()
    }

    fn ellipse() -> SupportCurve {
        make_curve(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 256).unwrap()
    }

    #[test]
    fn gauge_of_unit_disc_is_the_norm() {
        let c = circle();
        let g = gauge_function(&c, [3.0, 4.0]).unwrap();
        assert!((g - 5.0).abs() < 1e-3, "{g}");
        assert_eq!(gauge_function(&c, [0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn gauge_is_one_on_the_boundary() {
        let g = gauge_function(&ellipse(), [2.0, 0.0]).unwrap();
        assert!((g - 1.0).abs() < 1e-12, "{g}");
        let g = gauge_function(&ellipse(), [0.0, 1.0]).unwrap();
        assert!((g - 1.0).abs() < 1e-12, "{g}");
    }

    #[test]
    fn gauge_is_positively_homogeneous() {
        let c = ellipse();
        let y = [0.73, -1.4];
        let g1 = gauge_function(&c, y).unwrap();
        for &lam in &[0.5, 2.0, 7.3] {
            let gl = gauge_function(&c, [lam * y[0], lam * y[1]]).unwrap();
            assert!((gl - lam * g1).abs() < 1e-12 * (1.0 + lam * g1));
        }
    }

    #[test]
    fn circle_cone_lipschitz_scales_with_slope() {
        let c = circle();
        let f1 = build_cone(&c, 1.0, 6.0, 201).unwrap();
        assert!((f1.lipschitz() - 1.0).abs() < 1e-9, "{}", f1.lipschitz());
        let f10 = build_cone(&c, 10.0, 6.0, 201).unwrap();
        assert!((f10.lipschitz() - 10.0).abs() < 1e-8, "{}", f10.lipschitz());
    }

    #[test]
    fn ellipse_cone_lipschitz_is_reciprocal_min_support() {
        // max|grad mu| = 1/min h = 1 for the 2x1 ellipse.
        let f = build_cone(&ellipse(), 1.0, 12.0, 201).unwrap();
        assert!((f.lipschitz() - 1.0).abs() < 1e-9, "{}", f.lipschitz());
    }

    #[test]
    fn cones_are_straight_at_infinity() {
        let f = build_cone(&ellipse(), 3.0, 12.0, 201).unwrap();
        let d = cone_straightness_defect(&f);
        assert!(d < 5e-2, "homogeneity defect {d}");
    }

    #[test]
    fn unit_circle_clearance_is_half_inverse_sqrt_two() {
        let d = cone_clearance(&circle()).unwrap();
        assert!((d - 0.5 / 2.0_f64.sqrt()).abs() < 1e-6, "{d}");
    }

    #[test]
    fn rejects_coarse_grids_and_small_slopes() {
        let c = circle();
        assert!(build_cone(&c, 1.0, 100.0, 21).is_err());
        assert!(build_cone(&c, 0.5, 6.0, 201).is_err());
    }
}
