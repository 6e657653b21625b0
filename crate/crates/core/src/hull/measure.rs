use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{PointCloud, Polytope};
use crate::linalg::{det_in_place, dot, factorial, hyperplane_normal, norm, solve};
use crate::{Error, Result};

/// Direction budget for Monte-Carlo solid angles in dimension four and up.
pub const DEFAULT_DIRECTION_BUDGET: usize = 100_000;

/// Unsigned volume of the simplex `apex, facet[0], .., facet[d-1]`.
pub fn simplex_volume(apex: &[f64], facet: &[&[f64]]) -> f64 {
    let d = apex.len();
    let mut m = vec![0.0; d * d];
    for (r, p) in facet.iter().enumerate() {
        for c in 0..d {
            m[r * d + c] = p[c] - apex[c];
        }
    }
    det_in_place(&mut m, d).abs() / factorial(d)
}

/// Volume of the hull as a fan of simplices from the centroid of its vertices.
pub fn polytope_volume(poly: &Polytope, cloud: &PointCloud) -> f64 {
    let d = poly.dim();
    let mut centroid = vec![0.0; d];
    for &v in poly.vertices() {
        for (c, x) in centroid.iter_mut().zip(cloud.point(v)) {
            *c += x;
        }
    }
    let nv = poly.vertices().len() as f64;
    for c in centroid.iter_mut() {
        *c /= nv;
    }
    poly.facets()
        .iter()
        .map(|f| {
            let pts: Vec<&[f64]> = f.vertices.iter().map(|&v| cloud.point(v)).collect();
            simplex_volume(&centroid, &pts)
        })
        .sum()
}

/// Fraction of the full solid angle subtended by a simplicial cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolidAngle {
    pub fraction: f64,
    /// Zero for closed-form evaluations.
    pub std_error: f64,
}

/// Solid-angle fraction of `cone(0, facet)`; `d = facet.len()` must equal
/// the ambient dimension. Closed form for `d <= 3`, Monte Carlo with the
/// default direction budget otherwise.
pub fn facet_cone_solid_angle(facet: &[&[f64]]) -> Result<SolidAngle> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x736f_6c69_6461_6e67);
    facet_cone_solid_angle_with(facet, DEFAULT_DIRECTION_BUDGET, &mut rng)
}

pub fn facet_cone_solid_angle_with<R: Rng + ?Sized>(
    facet: &[&[f64]],
    budget: usize,
    rng: &mut R,
) -> Result<SolidAngle> {
    let d = facet.len();
    if let Some(p) = facet.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: p.len() });
    }
    let scale = facet.iter().flat_map(|p| p.iter()).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let n = hyperplane_normal(facet);
    let nl = norm(&n);
    if nl == 0.0 || (dot(&n, facet[0]) / nl).abs() <= 1e-10 * scale {
        return Err(Error::OriginOnFacetHull);
    }
    match d {
        1 => Ok(SolidAngle { fraction: 0.5, std_error: 0.0 }),
        2 => {
            let (a, b) = (facet[0], facet[1]);
            let cross = (a[0] * b[1] - a[1] * b[0]).abs();
            let angle = cross.atan2(dot(a, b));
            Ok(SolidAngle { fraction: angle / (2.0 * PI), std_error: 0.0 })
        }
        3 => {
            // Van Oosterom-Strackee
            let (a, b, c) = (facet[0], facet[1], facet[2]);
            let (la, lb, lc) = (norm(a), norm(b), norm(c));
            let triple = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]);
            let denom = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
            let mut omega = 2.0 * triple.abs().atan2(denom);
            if omega < 0.0 {
                omega += 4.0 * PI;
            }
            Ok(SolidAngle { fraction: omega / (4.0 * PI), std_error: 0.0 })
        }
        _ => {
            let budget = budget.max(1);
            // u in cone iff the coefficients of u in the generator basis are
            // all non-negative: solve G^T c = u with G rows = generators.
            let mut gt = vec![0.0; d * d];
            for (r, p) in facet.iter().enumerate() {
                for c in 0..d {
                    gt[c * d + r] = p[c];
                }
            }
            let inv = invert(&gt, d).ok_or(Error::OriginOnFacetHull)?;
            let mut hits = 0usize;
            let mut u = vec![0.0; d];
            for _ in 0..budget {
                for x in u.iter_mut() {
                    *x = StandardNormal.sample(rng);
                }
                let inside = (0..d).all(|r| dot(&inv[r * d..(r + 1) * d], &u) >= 0.0);
                if inside {
                    hits += 1;
                }
            }
            let p = hits as f64 / budget as f64;
            Ok(SolidAngle { fraction: p, std_error: (p * (1.0 - p) / budget as f64).sqrt() })
        }
    }
}

fn invert(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for c in 0..n {
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        let col = solve(m, &e, n)?;
        for r in 0..n {
            inv[r * n + c] = col[r];
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::convex_hull;

    #[test]
    fn unit_cube_and_triangle() {
        let mut pts = Vec::new();
        for mask in 0..8u32 {
            pts.push([(mask & 1) as f64, ((mask >> 1) & 1) as f64, ((mask >> 2) & 1) as f64]);
        }
        // Cubes are not simplicial; nudge nothing, the hull triangulates the
        // square faces and the fan volume is unaffected.
        let cloud = PointCloud::from_points(3, &pts).unwrap();
        let hull = convex_hull(&cloud).unwrap();
        assert!((polytope_volume(&hull, &cloud) - 1.0).abs() < 1e-12);

        let tri = PointCloud::from_points(2, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let hull = convex_hull(&tri).unwrap();
        assert!((polytope_volume(&hull, &tri) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cross_polytope_volume() {
        let cloud = PointCloud::from_points(
            3,
            &[
                [1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0],
            ],
        )
        .unwrap();
        let hull = convex_hull(&cloud).unwrap();
        // 2^d / d! for the unit cross-polytope
        assert!((polytope_volume(&hull, &cloud) - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_solid_angles() {
        let q = facet_cone_solid_angle(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert!((q.fraction - 0.25).abs() < 1e-15);
        let o = facet_cone_solid_angle(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        assert!((o.fraction - 0.125).abs() < 1e-15);
        assert_eq!(o.std_error, 0.0);
    }

    #[test]
    fn origin_on_facet_plane() {
        let r = facet_cone_solid_angle(&[&[1.0, 0.0], &[-1.0, 0.0]]);
        assert_eq!(r, Err(Error::OriginOnFacetHull));
    }

    #[test]
    fn orthant_in_four_dimensions() {
        let e: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                let mut v = vec![0.0; 4];
                v[i] = 1.0;
                v
            })
            .collect();
        let refs: Vec<&[f64]> = e.iter().map(Vec::as_slice).collect();
        let s = facet_cone_solid_angle(&refs).unwrap();
        assert!((s.fraction - 1.0 / 16.0).abs() < 4.0 * s.std_error);
    }
}
