//! Lower convex envelope: hull facets whose outward normal points down in
//! the last coordinate.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::convex::{convex_hull_with, Facet, HullOptions};
use super::PointCloud;
use crate::linalg::{dot, hyperplane_normal, norm};
use crate::{Error, Result};

/// Facets of the lower envelope of a cloud, as indices into that cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerHull {
    pub dim: usize,
    pub facets: Vec<Facet>,
    /// Sorted indices of points on the lower envelope.
    pub vertices: Vec<usize>,
    /// Points discarded because they were within tolerance of the envelope.
    pub ties: usize,
}

impl LowerHull {
    /// Graph of a facet as `last = gradient . rest + intercept`.
    pub fn affine(&self, facet: usize) -> (Vec<f64>, f64) {
        let f = &self.facets[facet];
        let d = self.dim;
        let nl = f.normal[d - 1];
        let gradient = f.normal[..d - 1].iter().map(|x| -x / nl).collect();
        (gradient, f.offset / nl)
    }
}

pub fn lower_hull(cloud: &PointCloud) -> Result<LowerHull> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6c6f_7765_7268_756c);
    lower_hull_with(cloud, &HullOptions::default(), &mut rng)
}

pub fn lower_hull_with<R: Rng + ?Sized>(cloud: &PointCloud, opts: &HullOptions, rng: &mut R) -> Result<LowerHull> {
    let d = cloud.dim();
    if d < 2 {
        return Err(Error::OutOfRange("lower hull needs dimension >= 2".into()));
    }
    if cloud.len() < d {
        return Err(Error::DegenerateInput { expected: d, found: cloud.len().saturating_sub(1) });
    }
    if d == 2 {
        return Ok(lower_chain(cloud, opts.eps));
    }
    if cloud.len() == d {
        return single_facet(cloud, opts.eps);
    }
    let hull = convex_hull_with(cloud, opts, rng)?;
    let tol = opts.eps;
    let facets: Vec<Facet> = hull.facets().iter().filter(|f| f.normal[d - 1] < -tol).cloned().collect();
    let mut vertices: Vec<usize> = facets.iter().flat_map(|f| f.vertices.iter().copied()).collect();
    vertices.sort_unstable();
    vertices.dedup();
    Ok(LowerHull { dim: d, facets, vertices, ties: hull.ties() })
}

fn single_facet(cloud: &PointCloud, eps: f64) -> Result<LowerHull> {
    let d = cloud.dim();
    let pts: Vec<&[f64]> = cloud.points().collect();
    let mut normal = hyperplane_normal(&pts);
    let len = norm(&normal);
    if len <= eps * cloud.coord_scale().powi(d as i32 - 1) {
        return Err(Error::DegenerateInput { expected: d, found: d - 2 });
    }
    for x in normal.iter_mut() {
        *x /= len;
    }
    if normal[d - 1] > 0.0 {
        for x in normal.iter_mut() {
            *x = -*x;
        }
    }
    if normal[d - 1] >= -eps {
        return Err(Error::DegenerateInput { expected: d, found: d - 2 });
    }
    let offset = dot(&normal, pts[0]);
    let vertices: Vec<usize> = (0..d).collect();
    Ok(LowerHull { dim: d, facets: vec![Facet { vertices: vertices.clone(), normal, offset }], vertices, ties: 0 })
}

/// Andrew's monotone chain, lower half only; collinear points are dropped.
fn lower_chain(cloud: &PointCloud, eps: f64) -> LowerHull {
    let scale = cloud.coord_scale();
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (cloud.point(a), cloud.point(b));
        pa[0].total_cmp(&pb[0]).then(pa[1].total_cmp(&pb[1]))
    });
    // Orientation with a tolerance relative to the two edge lengths (a
    // bound on the sine of the turn angle), so that far-apart coordinates do
    // not swamp local turns.
    let cross = |o: usize, a: usize, b: usize| {
        let (po, pa, pb) = (cloud.point(o), cloud.point(a), cloud.point(b));
        let (ax, ay, bx, by) = (pa[0] - po[0], pa[1] - po[1], pb[0] - po[0], pb[1] - po[1]);
        (ax * by - ay * bx, eps * (ax.hypot(ay) * bx.hypot(by)))
    };
    let mut chain: Vec<usize> = Vec::new();
    let mut ties = 0;
    for &i in &order {
        while chain.len() >= 2 {
            let (c, tol) = cross(chain[chain.len() - 2], chain[chain.len() - 1], i);
            if c <= tol {
                if c > -tol {
                    ties += 1;
                }
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(i);
    }
    // A vertical segment at either end is not part of the graph.
    let xtol = eps * scale;
    while chain.len() >= 2 && (cloud.point(chain[1])[0] - cloud.point(chain[0])[0]).abs() <= xtol {
        chain.remove(1);
    }
    while chain.len() >= 2 {
        let n = chain.len();
        if (cloud.point(chain[n - 1])[0] - cloud.point(chain[n - 2])[0]).abs() <= xtol {
            chain.pop();
        } else {
            break;
        }
    }
    let mut facets = Vec::with_capacity(chain.len().saturating_sub(1));
    for w in chain.windows(2) {
        let (p, q) = (cloud.point(w[0]), cloud.point(w[1]));
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let len = (dx * dx + dy * dy).sqrt();
        let normal = vec![dy / len, -dx / len];
        let offset = normal[0] * p[0] + normal[1] * p[1];
        facets.push(Facet { vertices: vec![w[0], w[1]], normal, offset });
    }
    let mut vertices = if chain.len() >= 2 { chain.clone() } else { Vec::new() };
    if chain.len() == 1 {
        vertices = chain;
    }
    vertices.sort_unstable();
    LowerHull { dim: 2, facets, vertices, ties }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::convex_hull;
    use rand_distr::{Distribution, StandardNormal};

    fn lifted(pts: &[[f64; 2]]) -> PointCloud {
        PointCloud::from_points(2, pts).unwrap()
    }

    #[test]
    fn convex_triple_keeps_all() {
        let lh = lower_hull(&lifted(&[[0.0, 0.0], [1.0, 0.5], [2.0, 2.0]])).unwrap();
        assert_eq!(lh.vertices, vec![0, 1, 2]);
        assert_eq!(lh.facets.len(), 2);
    }

    #[test]
    fn raised_middle_is_dropped() {
        let lh = lower_hull(&lifted(&[[0.0, 0.0], [1.0, 2.5], [2.0, 2.0]])).unwrap();
        assert_eq!(lh.vertices, vec![0, 2]);
    }

    #[test]
    fn two_points_give_one_segment() {
        let lh = lower_hull(&lifted(&[[0.0, 1.0], [3.0, 0.0]])).unwrap();
        assert_eq!(lh.facets.len(), 1);
        let (a, b) = lh.affine(0);
        assert!((a[0] + 1.0 / 3.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_and_upper_partition_the_hull() {
        let mut rng = <rand_chacha::ChaCha8Rng as SeedableRng>::seed_from_u64(3);
        let coords: Vec<f64> = (0..3 * 200).map(|_| StandardNormal.sample(&mut rng)).collect();
        let cloud = PointCloud::new(3, coords).unwrap();
        let hull = convex_hull(&cloud).unwrap();
        let lower = lower_hull(&cloud).unwrap();
        let upper = hull.facets().iter().filter(|f| f.normal[2] > 0.0).count();
        let horizontal = hull.facets().iter().filter(|f| f.normal[2] == 0.0).count();
        assert_eq!(horizontal, 0);
        assert_eq!(lower.facets.len() + upper, hull.facets().len());
    }
}
