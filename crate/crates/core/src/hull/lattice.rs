use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Polytope;

/// Faces of a simplicial polytope grouped by dimension.
///
/// `faces_by_dim[k]` holds the sorted `(k+1)`-tuples of vertex indices (into
/// the source cloud) spanning the `k`-faces, `k = 0..d-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceLattice {
    pub faces_by_dim: Vec<BTreeSet<Vec<usize>>>,
}

impl FaceLattice {
    pub fn f_vector(&self) -> Vec<usize> {
        self.faces_by_dim.iter().map(BTreeSet::len).collect()
    }

    pub fn f(&self, k: usize) -> usize {
        self.faces_by_dim.get(k).map_or(0, BTreeSet::len)
    }

    /// `sum_k (-1)^k f_k`.
    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    /// Number of `k`-faces containing `vertex`.
    pub fn faces_containing(&self, k: usize, vertex: usize) -> usize {
        self.faces_by_dim
            .get(k)
            .map_or(0, |set| set.iter().filter(|f| f.binary_search(&vertex).is_ok()).count())
    }
}

/// Enumerates all faces of a simplicial polytope as the distinct non-empty
/// proper subsets of its facets' vertex sets.
pub fn face_lattice(poly: &Polytope) -> FaceLattice {
    let d = poly.dim();
    let mut faces_by_dim = vec![BTreeSet::new(); d];
    let mut sorted = Vec::with_capacity(d);
    for facet in poly.facets() {
        sorted.clear();
        sorted.extend_from_slice(&facet.vertices);
        sorted.sort_unstable();
        // Every non-empty subset of a facet's d vertices.
        for mask in 1u32..(1u32 << d) {
            let face: Vec<usize> = (0..d).filter(|&i| mask & (1 << i) != 0).map(|i| sorted[i]).collect();
            let k = face.len() - 1;
            faces_by_dim[k].insert(face);
        }
    }
    FaceLattice { faces_by_dim }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::{convex_hull, PointCloud};

    fn cross_polytope() -> PointCloud {
        PointCloud::from_points(
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
        .unwrap()
    }

    #[test]
    fn tetrahedron() {
        let cloud =
            PointCloud::from_points(3, &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let lattice = face_lattice(&convex_hull(&cloud).unwrap());
        assert_eq!(lattice.f_vector(), vec![4, 6, 4]);
    }

    #[test]
    fn cross_polytope_matches_brute_force() {
        let cloud = cross_polytope();
        // Oracle: a 3-subset spans a facet iff all other points lie strictly
        // on one side of its plane.
        let pts: Vec<&[f64]> = cloud.points().collect();
        let mut brute = 0;
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    let n = crate::linalg::hyperplane_normal(&[pts[a], pts[b], pts[c]]);
                    if crate::linalg::norm(&n) < 1e-12 {
                        continue;
                    }
                    let off = crate::linalg::dot(&n, pts[a]);
                    let sides: Vec<f64> = (0..6)
                        .filter(|&i| i != a && i != b && i != c)
                        .map(|i| crate::linalg::dot(&n, pts[i]) - off)
                        .collect();
                    if sides.iter().all(|&s| s < -1e-12) || sides.iter().all(|&s| s > 1e-12) {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(brute, 8);
        let lattice = face_lattice(&convex_hull(&cloud).unwrap());
        assert_eq!(lattice.f_vector(), vec![6, 12, brute]);
    }

    #[test]
    fn polygon_has_equal_f0_f1() {
        let pts: Vec<[f64; 2]> = (0..7)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 7.0;
                [t.cos(), t.sin()]
            })
            .collect();
        let lattice = face_lattice(&convex_hull(&PointCloud::from_points(2, &pts).unwrap()).unwrap());
        assert_eq!(lattice.f(0), lattice.f(1));
        assert_eq!(lattice.euler_characteristic(), 0);
    }
}
