//! Incremental (beneath-beyond) convex hull in arbitrary dimension.
//!
//! Points are inserted in a shuffled order. Every not-yet-inserted point keeps
//! a single conflict facet it lies strictly beyond; when that facet is
//! destroyed the point is re-tested against the facets created by the same
//! insertion only, which suffices because any point beyond a destroyed facet
//! that is still outside the grown hull must see one of the new facets.
//!
//! Large clouds are first thinned with an inscribed polytope built from
//! directional extremes (Akl-Toussaint style); everything strictly inside it
//! is discarded before the incremental phase.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::PointCloud;
use crate::linalg::{dot, gram_schmidt, hyperplane_normal, norm};
use crate::{Error, Result};

/// Relative tolerance on signed facet distances.
pub const DEFAULT_EPS: f64 = 1e-10;

const NONE: usize = usize::MAX;
const PREFILTER_MIN_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullOptions {
    /// Relative tolerance; the absolute distance tolerance is
    /// `eps * max |coordinate|`.
    pub eps: f64,
    /// Thin large inputs with an inscribed polytope before insertion.
    pub prefilter: bool,
}

impl Default for HullOptions {
    fn default() -> Self {
        Self { eps: DEFAULT_EPS, prefilter: true }
    }
}

/// A hull facet: `d` vertex indices (into the source cloud), outward unit
/// normal and offset, so that `normal . x <= offset` on the hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Facet {
    #[inline]
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

/// Simplicial convex polytope with facet adjacency.
///
/// `adjacency[f][i]` is the facet sharing the ridge of facet `f` opposite to
/// its `i`-th vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<usize>,
    facets: Vec<Facet>,
    adjacency: Vec<Vec<usize>>,
    interior: Vec<f64>,
    tolerance: f64,
    ties: usize,
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sorted indices (into the source cloud) of hull vertices.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// A point strictly inside the hull.
    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    /// Absolute distance tolerance used during construction.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Number of points found within tolerance of a facet hyperplane and
    /// classified as non-extreme.
    pub fn ties(&self) -> usize {
        self.ties
    }

    pub fn is_vertex(&self, index: usize) -> bool {
        self.vertices.binary_search(&index).is_ok()
    }

    /// Ids of hull vertices in the source cloud.
    pub fn vertex_ids(&self, cloud: &PointCloud) -> Vec<u64> {
        self.vertices.iter().map(|&i| cloud.id(i)).collect()
    }

    /// `true` if `x` satisfies every facet inequality up to `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.facets.iter().all(|f| f.signed_distance(x) <= tol)
    }

    /// `true` if `x` is strictly inside every facet by more than `tol`.
    pub fn contains_strictly(&self, x: &[f64], tol: f64) -> bool {
        self.facets.iter().all(|f| f.signed_distance(x) < -tol)
    }
}

/// Convex hull with default options and a fixed insertion-order seed.
pub fn convex_hull(cloud: &PointCloud) -> Result<Polytope> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6761_7573_735f_6875);
    convex_hull_with(cloud, &HullOptions::default(), &mut rng)
}

/// Convex hull; `rng` drives the insertion order only, the output does not
/// depend on it (up to facet ordering).
pub fn convex_hull_with<R: Rng + ?Sized>(
    cloud: &PointCloud,
    opts: &HullOptions,
    rng: &mut R,
) -> Result<Polytope> {
    let d = cloud.dim();
    let n = cloud.len();
    if n < d + 1 {
        return Err(Error::DegenerateInput { expected: d, found: affine_dimension(cloud, opts.eps) });
    }
    let tol = opts.eps * cloud.coord_scale();
    let all: Vec<usize> = (0..n).collect();

    if opts.prefilter && n >= PREFILTER_MIN_POINTS && d >= 2 {
        if let Some(survivors) = prefilter(cloud, tol, rng) {
            return build(cloud, &survivors, tol, rng);
        }
    }
    build(cloud, &all, tol, rng)
}

/// Affine dimension of the cloud (0 for a single point).
fn affine_dimension(cloud: &PointCloud, eps: f64) -> usize {
    if cloud.is_empty() {
        return 0;
    }
    let idx: Vec<usize> = (0..cloud.len()).collect();
    let tol = eps * cloud.coord_scale();
    match initial_simplex(cloud, &idx, tol) {
        Ok(_) => cloud.dim(),
        Err(Error::DegenerateInput { found, .. }) => found,
        Err(_) => 0,
    }
}

/// Picks `d + 1` affinely independent points greedily maximising distance to
/// the affine span chosen so far.
fn initial_simplex(cloud: &PointCloud, idx: &[usize], tol: f64) -> Result<Vec<usize>> {
    let d = cloud.dim();
    let first = *idx
        .iter()
        .min_by(|&&a, &&b| cloud.point(a)[0].total_cmp(&cloud.point(b)[0]))
        .expect("non-empty");
    let origin = cloud.point(first).to_vec();
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    for k in 0..d {
        let mut best = NONE;
        let mut best_dist = 0.0;
        let mut best_res = Vec::new();
        let mut res = vec![0.0; d];
        for &i in idx {
            let p = cloud.point(i);
            for (r, (a, o)) in res.iter_mut().zip(p.iter().zip(&origin)) {
                *r = a - o;
            }
            for b in &basis {
                let c = dot(&res, b);
                for (r, bv) in res.iter_mut().zip(b) {
                    *r -= c * bv;
                }
            }
            let dist = norm(&res);
            if dist > best_dist {
                best_dist = dist;
                best = i;
                best_res.clone_from(&res);
            }
        }
        if best == NONE || best_dist <= tol {
            return Err(Error::DegenerateInput { expected: d, found: k });
        }
        chosen.push(best);
        basis.push(best_res);
        let ok = gram_schmidt(&mut basis, 0.0);
        debug_assert!(ok);
    }
    Ok(chosen)
}

/// Directions used to find extreme points for the thinning polytope.
fn filter_directions(d: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        dirs.push(e);
    }
    for i in 0..d {
        for j in i + 1..d {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e[j] = s;
                dirs.push(e);
            }
        }
    }
    dirs
}

/// Returns the indices that survive thinning, or `None` if the thinning
/// polytope is degenerate.
fn prefilter<R: Rng + ?Sized>(cloud: &PointCloud, tol: f64, rng: &mut R) -> Option<Vec<usize>> {
    let d = cloud.dim();
    let dirs = filter_directions(d);
    let mut lo = vec![(f64::INFINITY, NONE); dirs.len()];
    let mut hi = vec![(f64::NEG_INFINITY, NONE); dirs.len()];
    for (i, p) in cloud.points().enumerate() {
        for (k, dir) in dirs.iter().enumerate() {
            let s = dot(dir, p);
            if s < lo[k].0 {
                lo[k] = (s, i);
            }
            if s > hi[k].0 {
                hi[k] = (s, i);
            }
        }
    }
    let mut extremes: Vec<usize> = lo.iter().chain(&hi).map(|&(_, i)| i).collect();
    extremes.sort_unstable();
    extremes.dedup();
    if extremes.len() < d + 1 {
        return None;
    }
    let inner = build(cloud, &extremes, tol, rng).ok()?;
    let center = inner.interior_point().to_vec();
    let r_in = inner
        .facets()
        .iter()
        .map(|f| -f.signed_distance(&center))
        .fold(f64::INFINITY, f64::min);
    let r_in2 = if r_in > tol { (r_in - tol).powi(2) } else { 0.0 };
    let mut keep = inner.vertices().to_vec();
    let mut diff = vec![0.0; d];
    for (i, p) in cloud.points().enumerate() {
        for (x, (a, c)) in diff.iter_mut().zip(p.iter().zip(&center)) {
            *x = a - c;
        }
        if dot(&diff, &diff) < r_in2 {
            continue;
        }
        if inner.contains_strictly(p, tol) {
            continue;
        }
        keep.push(i);
    }
    keep.sort_unstable();
    keep.dedup();
    Some(keep)
}

struct WorkFacet {
    verts: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    neighbors: Vec<usize>,
    outside: Vec<usize>,
    alive: bool,
}

struct Builder<'a> {
    cloud: &'a PointCloud,
    /// Local index -> cloud index.
    idx: &'a [usize],
    d: usize,
    tol: f64,
    interior: Vec<f64>,
    facets: Vec<WorkFacet>,
    conflict: Vec<usize>,
    visited: Vec<u32>,
    visible: Vec<u32>,
    stamp: u32,
    ties: usize,
}

impl<'a> Builder<'a> {
    #[inline]
    fn pt(&self, local: usize) -> &'a [f64] {
        self.cloud.point(self.idx[local])
    }

    #[inline]
    fn dist(&self, f: usize, local: usize) -> f64 {
        let fc = &self.facets[f];
        dot(&fc.normal, self.pt(local)) - fc.offset
    }

    fn make_facet(&self, verts: Vec<usize>) -> Result<WorkFacet> {
        let pts: Vec<&[f64]> = verts.iter().map(|&v| self.pt(v)).collect();
        let mut normal = hyperplane_normal(&pts);
        let len = norm(&normal);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::DegenerateInput { expected: self.d, found: self.d - 1 });
        }
        for x in normal.iter_mut() {
            *x /= len;
        }
        let mut offset = dot(&normal, pts[0]);
        if dot(&normal, &self.interior) > offset {
            for x in normal.iter_mut() {
                *x = -*x;
            }
            offset = -offset;
        }
        Ok(WorkFacet {
            verts,
            normal,
            offset,
            neighbors: vec![NONE; self.d],
            outside: Vec::new(),
            alive: true,
        })
    }

    fn push_facet(&mut self, f: WorkFacet) -> usize {
        self.facets.push(f);
        self.visited.push(0);
        self.visible.push(0);
        self.facets.len() - 1
    }

    fn insert(&mut self, p: usize, start: usize) -> Result<()> {
        self.stamp += 1;
        let stamp = self.stamp;
        let d = self.d;

        let mut visible = vec![start];
        self.visited[start] = stamp;
        self.visible[start] = stamp;
        let mut cursor = 0;
        while cursor < visible.len() {
            let f = visible[cursor];
            cursor += 1;
            for i in 0..d {
                let g = self.facets[f].neighbors[i];
                if self.visited[g] == stamp {
                    continue;
                }
                self.visited[g] = stamp;
                if self.dist(g, p) > self.tol {
                    self.visible[g] = stamp;
                    visible.push(g);
                }
            }
        }

        let mut horizon = Vec::new();
        for &f in &visible {
            for i in 0..d {
                let g = self.facets[f].neighbors[i];
                if self.visible[g] != stamp {
                    horizon.push((f, i, g));
                }
            }
        }

        let mut created = Vec::with_capacity(horizon.len());
        let mut ridges: HashMap<Vec<usize>, (usize, usize)> = HashMap::with_capacity(horizon.len() * d);
        for &(f, i, g) in &horizon {
            let mut verts = self.facets[f].verts.clone();
            verts[i] = p;
            let mut nf = self.make_facet(verts)?;
            nf.neighbors[i] = g;
            let id = self.push_facet(nf);
            let slot = self.facets[g]
                .neighbors
                .iter()
                .position(|&x| x == f)
                .expect("horizon neighbour must point back");
            self.facets[g].neighbors[slot] = id;
            for j in 0..d {
                if j == i {
                    continue;
                }
                let mut key: Vec<usize> = self.facets[id]
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                if let Some((other, oj)) = ridges.remove(&key) {
                    self.facets[id].neighbors[j] = other;
                    self.facets[other].neighbors[oj] = id;
                } else {
                    ridges.insert(key, (id, j));
                }
            }
            created.push(id);
        }
        debug_assert!(ridges.is_empty(), "unmatched ridges after insertion");

        for &f in &visible {
            let outside = std::mem::take(&mut self.facets[f].outside);
            self.facets[f].alive = false;
            for q in outside {
                if q == p {
                    continue;
                }
                let mut best = NONE;
                let mut best_d = f64::NEG_INFINITY;
                for &nf in &created {
                    let dq = self.dist(nf, q);
                    if dq > best_d {
                        best_d = dq;
                        best = nf;
                    }
                }
                if best_d > self.tol {
                    self.facets[best].outside.push(q);
                    self.conflict[q] = best;
                } else {
                    if best_d > -self.tol {
                        self.ties += 1;
                    }
                    self.conflict[q] = NONE;
                }
            }
        }
        self.conflict[p] = NONE;
        Ok(())
    }
}

fn build<R: Rng + ?Sized>(cloud: &PointCloud, idx: &[usize], tol: f64, rng: &mut R) -> Result<Polytope> {
    let d = cloud.dim();
    let simplex_global = initial_simplex(cloud, idx, tol)?;
    let m = idx.len();
    let local_of: HashMap<usize, usize> = idx.iter().enumerate().map(|(l, &g)| (g, l)).collect();
    let simplex: Vec<usize> = simplex_global.iter().map(|g| local_of[g]).collect();

    let mut interior = vec![0.0; d];
    for &s in &simplex_global {
        for (c, x) in interior.iter_mut().zip(cloud.point(s)) {
            *c += x / (d + 1) as f64;
        }
    }

    let mut b = Builder {
        cloud,
        idx,
        d,
        tol,
        interior,
        facets: Vec::new(),
        conflict: vec![NONE; m],
        visited: Vec::new(),
        visible: Vec::new(),
        stamp: 0,
        ties: 0,
    };

    // Facet k omits simplex vertex k; its neighbour opposite simplex vertex j
    // is facet j.
    for k in 0..=d {
        let verts: Vec<usize> = simplex.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &v)| v).collect();
        let mut f = b.make_facet(verts)?;
        let others: Vec<usize> = (0..=d).filter(|&i| i != k).collect();
        for (slot, &j) in others.iter().enumerate() {
            f.neighbors[slot] = j;
        }
        b.push_facet(f);
    }

    let mut is_simplex = vec![false; m];
    for &s in &simplex {
        is_simplex[s] = true;
    }
    let mut order: Vec<usize> = (0..m).filter(|&l| !is_simplex[l]).collect();
    for &l in &order {
        let mut best = NONE;
        let mut best_d = f64::NEG_INFINITY;
        for f in 0..=d {
            let dl = b.dist(f, l);
            if dl > best_d {
                best_d = dl;
                best = f;
            }
        }
        if best_d > tol {
            b.facets[best].outside.push(l);
            b.conflict[l] = best;
        } else if best_d > -tol {
            b.ties += 1;
        }
    }
    order.shuffle(rng);
    for l in order {
        let f = b.conflict[l];
        if f == NONE {
            continue;
        }
        debug_assert!(b.facets[f].alive);
        b.insert(l, f)?;
    }

    let mut remap = vec![NONE; b.facets.len()];
    let mut facets = Vec::new();
    for (i, f) in b.facets.iter().enumerate() {
        if f.alive {
            remap[i] = facets.len();
            facets.push(i);
        }
    }
    let mut out_facets = Vec::with_capacity(facets.len());
    let mut adjacency = Vec::with_capacity(facets.len());
    let mut vertices = Vec::new();
    for &i in &facets {
        let f = &b.facets[i];
        let verts: Vec<usize> = f.verts.iter().map(|&l| idx[l]).collect();
        vertices.extend_from_slice(&verts);
        out_facets.push(Facet { vertices: verts, normal: f.normal.clone(), offset: f.offset });
        adjacency.push(f.neighbors.iter().map(|&g| remap[g]).collect());
    }
    vertices.sort_unstable();
    vertices.dedup();
    Ok(Polytope {
        dim: d,
        vertices,
        facets: out_facets,
        adjacency,
        interior: b.interior,
        tolerance: tol,
        ties: b.ties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<f64> = (0..n * d).map(|_| StandardNormal.sample(&mut rng)).collect();
        PointCloud::new(d, coords).unwrap()
    }

    #[test]
    fn triangle_with_interior_point() {
        let cloud = PointCloud::from_points(2, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.1, 0.1]]).unwrap();
        let hull = convex_hull(&cloud).unwrap();
        assert_eq!(hull.vertices(), &[0, 1, 2]);
        assert_eq!(hull.facets().len(), 3);
    }

    #[test]
    fn collinear_is_degenerate() {
        let cloud = PointCloud::from_points(2, &[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).unwrap();
        match convex_hull(&cloud) {
            Err(Error::DegenerateInput { expected: 2, found: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_points_is_degenerate() {
        let cloud = PointCloud::from_points(3, &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(convex_hull(&cloud), Err(Error::DegenerateInput { found: 1, .. })));
    }

    #[test]
    fn adjacency_is_symmetric_and_ridges_shared() {
        for d in 2..=5 {
            let cloud = gaussian_cloud(60, d, d as u64);
            let hull = convex_hull(&cloud).unwrap();
            for (f, nbrs) in hull.adjacency().iter().enumerate() {
                for (i, &g) in nbrs.iter().enumerate() {
                    assert!(hull.adjacency()[g].contains(&f));
                    let mut ridge: Vec<usize> = hull.facets()[f].vertices.clone();
                    ridge.remove(i);
                    assert!(ridge.iter().all(|v| hull.facets()[g].vertices.contains(v)));
                }
            }
        }
    }

    #[test]
    fn every_point_inside_and_non_vertices_strictly_inside() {
        for d in 2..=4 {
            let cloud = gaussian_cloud(300, d, 100 + d as u64);
            let hull = convex_hull(&cloud).unwrap();
            for (i, p) in cloud.points().enumerate() {
                assert!(hull.contains(p, hull.tolerance()));
                if !hull.is_vertex(i) {
                    assert!(hull.facets().iter().all(|f| f.signed_distance(p) < hull.tolerance()));
                }
            }
        }
    }

    #[test]
    fn prefilter_does_not_change_result() {
        for d in 2..=3 {
            let cloud = gaussian_cloud(5000, d, 9 + d as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let a = convex_hull_with(&cloud, &HullOptions { prefilter: true, ..Default::default() }, &mut rng).unwrap();
            let b = convex_hull_with(&cloud, &HullOptions { prefilter: false, ..Default::default() }, &mut rng).unwrap();
            assert_eq!(a.vertices(), b.vertices());
            assert_eq!(a.facets().len(), b.facets().len());
        }
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let cloud = gaussian_cloud(400, 3, 5);
        let opts = HullOptions::default();
        let a = convex_hull_with(&cloud, &opts, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = convex_hull_with(&cloud, &opts, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        let key = |p: &Polytope| {
            let mut fs: Vec<Vec<usize>> = p
                .facets()
                .iter()
                .map(|f| {
                    let mut v = f.vertices.clone();
                    v.sort_unstable();
                    v
                })
                .collect();
            fs.sort();
            fs
        };
        assert_eq!(key(&a), key(&b));
    }
}
