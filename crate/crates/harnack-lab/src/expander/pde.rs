//! Squashed graphical mean curvature flow on the grid.
//!
//! A graph evolving by mean curvature and squashed vertically by `1/N`
//! satisfies
//!
//! `dV/ds = sqrt(eps^2 + |DV|^2) div( DV / sqrt(eps^2 + |DV|^2) )`
//!
//! with `eps = 1/N`; expanding the divergence this is the quasilinear
//! form `(I - DV (x) DV / (eps^2 + |DV|^2)) : D^2 V`, uniformly parabolic
//! with eigenvalues between `eps^2/(eps^2+|DV|^2)` and 1. At `eps = 0` it
//! degenerates into the level-set flow equation; the denominator is then
//! floored at [`LEVELSET_FLOOR`] so the apex cell stays finite, mirroring
//! the usual regularization of the degenerate equation.
//!
//! Explicit forward Euler in time (step bound `ds <= dx^2/4`), central
//! differences in space, rows swept in parallel. Boundary values are
//! pinned to the initial data for `DirichletCone` fields (expanders are
//! asymptotic to their cone, so the boundary error decays inward) or
//! extrapolated linearly for `LinearExtension`.

use crate::grid::{BoundaryKind, GridField};
use crate::{Error, Result};
use rayon::prelude::*;

/// Floor for `|DV|^2` in the degenerate (`eps = 0`) level-set regime.
pub const LEVELSET_FLOOR: f64 = 1e-8;

/// Evolve the field to time `s_end`. `n_inv` is `eps = 1/N`; zero selects
/// the regularized level-set flow.
pub fn graphical_flow(field: &GridField, n_inv: f64, s_end: f64, ds: f64) -> Result<GridField> {
    if n_inv < 0.0 {
        return Err(Error::NonPositiveParameter { what: "n_inv", value: n_inv });
    }
    if s_end < 0.0 {
        return Err(Error::NonPositiveParameter { what: "s_end", value: s_end });
    }
    if !(ds > 0.0) {
        return Err(Error::NonPositiveParameter { what: "ds", value: ds });
    }
    let h = field.spacing();
    let bound = h * h / 4.0;
    if ds > bound {
        return Err(Error::StepTooLarge { ds, bound });
    }
    let n = field.resolution();
    let eps2 = n_inv * n_inv;
    let floor = if n_inv == 0.0 { LEVELSET_FLOOR } else { 0.0 };

    let initial = field.values().to_vec();
    let mut cur = initial.clone();
    let mut next = initial.clone();
    let mut s = 0.0;
    let mut step = 0usize;
    while s < s_end - 1e-15 {
        let dt = ds.min(s_end - s);
        {
            let cur_ref = &cur;
            next[n..(n - 1) * n]
                .par_chunks_mut(n)
                .enumerate()
                .for_each(|(row, out)| {
                    let iy = row + 1;
                    out[0] = cur_ref[iy * n];
                    out[n - 1] = cur_ref[iy * n + n - 1];
                    for ix in 1..n - 1 {
                        let idx = iy * n + ix;
                        let c = cur_ref[idx];
                        let e = cur_ref[idx + 1];
                        let w = cur_ref[idx - 1];
                        let no = cur_ref[idx + n];
                        let so = cur_ref[idx - n];
                        let ne = cur_ref[idx + n + 1];
                        let nw = cur_ref[idx + n - 1];
                        let se = cur_ref[idx - n + 1];
                        let sw = cur_ref[idx - n - 1];
                        let px = (e - w) / (2.0 * h);
                        let py = (no - so) / (2.0 * h);
                        let q2 = (eps2 + px * px + py * py).max(eps2 + floor);
                        let vxx = (e - 2.0 * c + w) / (h * h);
                        let vyy = (no - 2.0 * c + so) / (h * h);
                        let vxy = (ne - nw - se + sw) / (4.0 * h * h);
                        let axx = 1.0 - px * px / q2;
                        let ayy = 1.0 - py * py / q2;
                        let axy = -px * py / q2;
                        out[ix] = c + dt * (axx * vxx + 2.0 * axy * vxy + ayy * vyy);
                    }
                });
        }
        std::mem::swap(&mut cur, &mut next);
        match field.boundary() {
            BoundaryKind::DirichletCone => {
                // rows 0 and n-1, cols 0 and n-1 stay at the initial cone
                for ix in 0..n {
                    cur[ix] = initial[ix];
                    cur[(n - 1) * n + ix] = initial[(n - 1) * n + ix];
                }
                for iy in 0..n {
                    cur[iy * n] = initial[iy * n];
                    cur[iy * n + n - 1] = initial[iy * n + n - 1];
                }
            }
            BoundaryKind::LinearExtension => {
                for ix in 1..n - 1 {
                    cur[ix] = 2.0 * cur[n + ix] - cur[2 * n + ix];
                    cur[(n - 1) * n + ix] = 2.0 * cur[(n - 2) * n + ix] - cur[(n - 3) * n + ix];
                }
                for iy in 0..n {
                    cur[iy * n] = 2.0 * cur[iy * n + 1] - cur[iy * n + 2];
                    cur[iy * n + n - 1] = 2.0 * cur[iy * n + n - 2] - cur[iy * n + n - 3];
                }
            }
        }
        s += dt;
        step += 1;
        if step % 64 == 0 {
            let probe = cur[(n / 2) * n + n / 2];
            if !probe.is_finite() {
                return Err(Error::Unstable { step, s });
            }
        }
    }
    if cur.iter().any(|v| !v.is_finite()) {
        return Err(Error::Unstable { step, s });
    }
    GridField::new(field.half_width(), n, cur, field.boundary(), field.stretch())
}

/// Vertical squash by `1/N`: pointwise division of the heights. Margins,
/// Lipschitz constants and Hessians scale by exactly `1/N`, so positive
/// semidefiniteness is preserved.
pub fn squash(field: &GridField, n: f64) -> Result<GridField> {
    if n < 1.0 {
        return Err(Error::NonPositiveParameter { what: "squash factor N (need >= 1)", value: n });
    }
    Ok(field.scaled(1.0 / n, field.stretch() / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::{grid_convexity, grid_convexity_with, GridConvexityOptions};
    use crate::csf::curve::{make_curve, CurveSpec};
    use crate::expander::cone::build_cone;

    #[test]
    fn affine_graphs_are_stationary() {
        let f = GridField::from_fn(2.0, 41, BoundaryKind::DirichletCone, 1.0, |x, y| {
            0.7 * x - 1.3 * y + 0.5
        })
        .unwrap();
        let ds = f.spacing() * f.spacing() / 8.0;
        for n_inv in [0.0, 0.3, 1.0] {
            let out = graphical_flow(&f, n_inv, 0.05, ds).unwrap();
            let worst = out
                .values()
                .iter()
                .zip(f.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-12, "n_inv={n_inv}: moved by {worst}");
        }
    }

    #[test]
    fn flow_from_cone_is_self_similar() {
        // V(x, s) = sqrt(s) V(x / sqrt(s), 1) when started from a cone.
        let curve = make_curve(&CurveSpec::Circle { radius: 1.0 }, 128).unwrap();
        let cone = build_cone(&curve, 1.0, 6.0, 121).unwrap();
        let ds = cone.spacing() * cone.spacing() / 8.0;
        let v_half = graphical_flow(&cone, 1.0, 0.5, ds).unwrap();
        let v_one = graphical_flow(&cone, 1.0, 1.0, ds).unwrap();
        let mut worst = 0.0_f64;
        let root = 0.5_f64.sqrt();
        let mut x = -3.0;
        while x <= 3.0 {
            let mut y = -3.0;
            while y <= 3.0 {
                let a = v_half.sample(x, y);
                let b = root * v_one.sample(x / root, y / root);
                worst = worst.max((a - b).abs());
                y += 0.25;
            }
            x += 0.25;
        }
        let tol = 2.0 * cone.spacing() * cone.spacing();
        assert!(worst < tol, "self-similarity defect {worst} vs {tol}");
    }

    #[test]
    fn squash_divides_margins_exactly() {
        let f = GridField::from_fn(2.0, 41, BoundaryKind::DirichletCone, 8.0, |x, y| {
            x * x + 0.5 * y * y
        })
        .unwrap();
        let s = squash(&f, 8.0).unwrap();
        assert!((s.lipschitz() - f.lipschitz() / 8.0).abs() < 1e-14);
        let mf = grid_convexity(&f).min_margin;
        let ms = grid_convexity(&s).min_margin;
        assert!((ms - mf / 8.0).abs() < 1e-12, "{ms} vs {mf}");
        assert!((s.stretch() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn squash_preserves_positive_semidefiniteness() {
        let curve = make_curve(&CurveSpec::Circle { radius: 1.0 }, 128).unwrap();
        let cone = build_cone(&curve, 4.0, 6.0, 101).unwrap();
        let opts = GridConvexityOptions { exclude_center_cells: 1, ..Default::default() };
        let before = grid_convexity_with(&cone, &opts);
        let after = grid_convexity_with(&squash(&cone, 4.0).unwrap(), &opts);
        assert_eq!(before.pass, after.pass);
        assert!(after.pass);
    }

    #[test]
    fn rejects_oversized_steps() {
        let f = GridField::from_fn(1.0, 21, BoundaryKind::DirichletCone, 1.0, |x, y| x * x + y * y)
            .unwrap();
        match graphical_flow(&f, 1.0, 0.1, f.spacing()) {
            Err(Error::StepTooLarge { .. }) => {}
            other => panic!("expected step bound, got {other:?}"),
        }
    }
}
