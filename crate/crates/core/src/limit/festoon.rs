//! The parabolic festoon (boundary of the maximal union of empty
//! down-paraboloids), the up-paraboloid envelope and the limit scores.

use serde::{Deserialize, Serialize};

use super::extreme::lifted_lower_hull;
use super::process::{lift, LimitPointSet};
use crate::gauss::{ScaledPoint, ScoreKind};
use crate::linalg::{factorial, solve};
use crate::{Error, Result};

/// One parabolic face: the lifted affine function `l = a . v + b` through
/// the lifted apices of its `d` extreme points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FestoonFace {
    pub vertices: Vec<usize>,
    pub gradient: Vec<f64>,
    pub intercept: f64,
}

impl FestoonFace {
    /// Festoon height `a . v + b - |v|^2 / 2` on this face.
    pub fn height(&self, v: &[f64]) -> f64 {
        let affine: f64 = self.gradient.iter().zip(v).map(|(a, x)| a * x).sum::<f64>() + self.intercept;
        affine - v.iter().map(|x| x * x).sum::<f64>() / 2.0
    }

    /// Height of the apex of the down-paraboloid carrying this face:
    /// `b + |a|^2 / 2`, attained at `v = a`.
    pub fn apex_height(&self) -> f64 {
        self.intercept + self.gradient.iter().map(|a| a * a).sum::<f64>() / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Festoon {
    pub dim_minus_1: usize,
    pub faces: Vec<FestoonFace>,
    /// Sorted ids of the extreme points.
    pub extreme_ids: Vec<usize>,
    /// Apices of the extreme points, aligned with `extreme_ids`.
    pub apices: Vec<ScaledPoint>,
}

/// Builds the festoon of a point set.
pub fn festoon(pts: &LimitPointSet) -> Result<Festoon> {
    festoon_of(&pts.all(), pts.dim_minus_1())
}

/// Festoon of a slice; ids are slice positions.
pub fn festoon_of(points: &[ScaledPoint], dim_minus_1: usize) -> Result<Festoon> {
    if points.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let m = dim_minus_1;
    let Some(hull) = lifted_lower_hull(points, m)? else {
        let extreme_ids: Vec<usize> = (0..points.len()).collect();
        return Ok(Festoon { dim_minus_1: m, faces: Vec::new(), extreme_ids, apices: points.to_vec() });
    };
    let mut faces = Vec::with_capacity(hull.facets.len());
    for f in &hull.facets {
        let mut vertices = f.vertices.clone();
        vertices.sort_unstable();
        // Solve [v_i, 1] (a, b) = l_i for the lifted affine function.
        let mut a = Vec::with_capacity((m + 1) * (m + 1));
        let mut rhs = Vec::with_capacity(m + 1);
        for &i in &vertices {
            let l = lift(&points[i]);
            a.extend_from_slice(&points[i].v);
            a.push(1.0);
            rhs.push(l[m]);
        }
        let sol = match solve(&a, &rhs, m + 1) {
            Some(s) => s,
            None => {
                let (g, b) = hull.affine(faces.len());
                g.into_iter().chain(std::iter::once(b)).collect()
            }
        };
        faces.push(FestoonFace { vertices, gradient: sol[..m].to_vec(), intercept: sol[m] });
    }
    if m == 1 {
        faces.sort_by(|x, y| points[x.vertices[0]].v[0].total_cmp(&points[y.vertices[0]].v[0]));
    }
    let extreme_ids = hull.vertices.clone();
    let apices = extreme_ids.iter().map(|&i| points[i].clone()).collect();
    Ok(Festoon { dim_minus_1: m, faces, extreme_ids, apices })
}

impl Festoon {
    pub fn apex(&self, id: usize) -> Option<&ScaledPoint> {
        self.extreme_ids.binary_search(&id).ok().map(|k| &self.apices[k])
    }

    pub fn is_extreme(&self, id: usize) -> bool {
        self.extreme_ids.binary_search(&id).is_ok()
    }

    /// Spatial coordinates of a face's vertices.
    pub fn face_simplex(&self, face: &FestoonFace) -> Vec<&[f64]> {
        face.vertices.iter().map(|&i| self.apex(i).expect("face vertices are extreme").v.as_slice()).collect()
    }

    /// Indices of faces containing the point `id`.
    pub fn faces_containing(&self, id: usize) -> Vec<usize> {
        self.faces.iter().enumerate().filter(|(_, f)| f.vertices.contains(&id)).map(|(i, _)| i).collect()
    }

    /// Whether the projected simplex of `face` contains `v` (with slack).
    fn covers(&self, face: &FestoonFace, v: &[f64]) -> bool {
        let m = self.dim_minus_1;
        let simplex = self.face_simplex(face);
        // Barycentric coordinates from [v_i; 1] lambda = [v; 1].
        let mut a = vec![0.0; (m + 1) * (m + 1)];
        for (c, p) in simplex.iter().enumerate() {
            for r in 0..m {
                a[r * (m + 1) + c] = p[r];
            }
            a[m * (m + 1) + c] = 1.0;
        }
        let mut rhs = v.to_vec();
        rhs.push(1.0);
        match solve(&a, &rhs, m + 1) {
            Some(bary) => bary.iter().all(|&t| t >= -1e-12),
            None => false,
        }
    }

    /// Festoon height above `v`: the minimum over faces whose projected
    /// simplex covers `v`. Outside the projected hull of the extreme points
    /// the festoon is `+inf` and `OutsideDomain` is returned.
    pub fn festoon_height(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim_minus_1 {
            return Err(Error::DimensionMismatch { expected: self.dim_minus_1, got: v.len() });
        }
        if self.faces.is_empty() {
            return match self.apices.iter().find(|p| p.v.as_slice() == v) {
                Some(p) => Ok(p.h),
                None => Err(Error::OutsideDomain(v.to_vec())),
            };
        }
        let best = self.faces.iter().filter(|f| self.covers(f, v)).map(|f| f.height(v)).fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            Ok(best)
        } else {
            Err(Error::OutsideDomain(v.to_vec()))
        }
    }

    /// `∫` of the festoon height over the projected simplex of `face`, either
    /// signed or its positive part.
    pub fn face_integral(&self, face: &FestoonFace, positive_part: bool) -> f64 {
        let simplex = self.face_simplex(face);
        if positive_part {
            positive_face_integral(face, &simplex)
        } else {
            signed_face_integral(face, &simplex)
        }
    }
}

/// Volume of a projected simplex in `R^m` (`m + 1` vertices).
pub fn simplex_measure(simplex: &[&[f64]]) -> f64 {
    let m = simplex.len() - 1;
    let mut a = vec![0.0; m * m];
    for r in 0..m {
        for c in 0..m {
            a[r * m + c] = simplex[r + 1][c] - simplex[0][c];
        }
    }
    crate::linalg::det_in_place(&mut a, m).abs() / factorial(m)
}

/// Closed form: volume times (affine value at the centroid minus half the
/// mean of `|v|^2`), with `E|v|^2 = (sum |v_i|^2 + |sum v_i|^2) / ((m+1)(m+2))`.
pub fn signed_face_integral(face: &FestoonFace, simplex: &[&[f64]]) -> f64 {
    let m = simplex.len() - 1;
    let vol = simplex_measure(simplex);
    let mut sum = vec![0.0; m];
    let mut sq = 0.0;
    for p in simplex {
        for (s, x) in sum.iter_mut().zip(p.iter()) {
            *s += x;
        }
        sq += p.iter().map(|x| x * x).sum::<f64>();
    }
    let n = (m + 1) as f64;
    let centroid: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let affine: f64 = face.gradient.iter().zip(&centroid).map(|(a, c)| a * c).sum::<f64>() + face.intercept;
    let second = (sq + sum.iter().map(|s| s * s).sum::<f64>()) / (n * (n + 1.0));
    vol * (affine - second / 2.0)
}

fn positive_face_integral(face: &FestoonFace, simplex: &[&[f64]]) -> f64 {
    if face.apex_height() <= 0.0 {
        return 0.0;
    }
    if simplex.len() == 2 {
        // g(v) = -v^2/2 + a v + b is non-negative between its roots.
        let a = face.gradient[0];
        let b = face.intercept;
        let disc = (a * a + 2.0 * b).sqrt();
        let (lo, hi) = {
            let (x, y) = (simplex[0][0], simplex[1][0]);
            (x.min(y).max(a - disc), x.max(y).min(a + disc))
        };
        if hi <= lo {
            return 0.0;
        }
        let g = |v: f64| -v * v * v / 6.0 + a * v * v / 2.0 + b * v;
        return g(hi) - g(lo);
    }
    positive_part_recursive(face, simplex.iter().map(|p| p.to_vec()).collect(), 0)
}

/// Adaptive bisection of a simplex: exact where the concave integrand is
/// non-negative on all vertices (hence on the simplex) or provably
/// non-positive, otherwise split along the longest edge. Depth is capped at
/// 24, where the positive part of the signed integral is used.
fn positive_part_recursive(face: &FestoonFace, simplex: Vec<Vec<f64>>, depth: usize) -> f64 {
    let refs: Vec<&[f64]> = simplex.iter().map(Vec::as_slice).collect();
    let values: Vec<f64> = simplex.iter().map(|p| face.height(p)).collect();
    if values.iter().all(|&g| g >= 0.0) {
        return signed_face_integral(face, &refs);
    }
    // Upper bound of the concave function on the simplex: its tangent plane
    // majorant at the centroid evaluated at the vertices.
    let n = simplex.len() as f64;
    let centroid: Vec<f64> = (0..face.gradient.len()).map(|j| simplex.iter().map(|p| p[j]).sum::<f64>() / n).collect();
    let gc = face.height(&centroid);
    let grad: Vec<f64> = face.gradient.iter().zip(&centroid).map(|(a, c)| a - c).collect();
    let bound = simplex
        .iter()
        .map(|p| gc + grad.iter().zip(p.iter().zip(&centroid)).map(|(g, (x, c))| g * (x - c)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    if bound <= 0.0 {
        return 0.0;
    }
    if depth >= 24 {
        return signed_face_integral(face, &refs).max(0.0);
    }
    let (mut bi, mut bj, mut best) = (0, 1, -1.0);
    for i in 0..simplex.len() {
        for j in i + 1..simplex.len() {
            let l: f64 = simplex[i].iter().zip(&simplex[j]).map(|(x, y)| (x - y) * (x - y)).sum();
            if l > best {
                (bi, bj, best) = (i, j, l);
            }
        }
    }
    let mid: Vec<f64> = simplex[bi].iter().zip(&simplex[bj]).map(|(x, y)| 0.5 * (x + y)).collect();
    let mut left = simplex.clone();
    left[bi] = mid.clone();
    let mut right = simplex;
    right[bj] = mid;
    positive_part_recursive(face, left, depth + 1) + positive_part_recursive(face, right, depth + 1)
}

/// `min_w h_w + |v - v_w|^2 / 2`: lower boundary of the union of
/// up-paraboloids.
pub fn up_envelope_height(pts: &LimitPointSet, v: &[f64]) -> Result<f64> {
    if pts.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    Ok((0..pts.len())
        .map(|i| {
            let w = pts.get(i);
            w.h + w.v.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 2.0
        })
        .fold(f64::INFINITY, f64::min))
}

/// Score of one point of the limit model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitScore {
    pub id: usize,
    pub kind: ScoreKind,
    pub value: f64,
    /// Set when the point (or, for defect volumes, its cylinder) reaches
    /// the erosion boundary; censored scores are excluded from estimators.
    pub censored: bool,
}

/// `xi_k^inf(w) = (k+1)^{-1} #{k-dim parabolic faces containing w}`. Points
/// whose spatial coordinate lies outside the window eroded by `margin` are
/// flagged as censored.
pub fn limit_kface_scores(pts: &LimitPointSet, k: usize, margin: f64) -> Result<Vec<LimitScore>> {
    let fest = festoon(pts)?;
    kface_scores_from(&fest, pts, k, margin)
}

pub fn kface_scores_from(fest: &Festoon, pts: &LimitPointSet, k: usize, margin: f64) -> Result<Vec<LimitScore>> {
    let m = pts.dim_minus_1();
    if k > m {
        return Err(Error::OutOfRange(format!("face dimension {k} exceeds d-1 = {m}")));
    }
    let counts = kface_counts(fest, pts.len(), k);
    Ok((0..pts.len())
        .map(|i| LimitScore {
            id: i,
            kind: ScoreKind::KFace(k),
            value: counts[i] as f64 / (k + 1) as f64,
            censored: !pts.window.eroded_contains(&pts.get(i).v, margin),
        })
        .collect())
}

/// Number of k-dimensional parabolic faces containing each point.
pub fn kface_counts(fest: &Festoon, n: usize, k: usize) -> Vec<usize> {
    let mut counts = vec![0usize; n];
    if fest.faces.is_empty() {
        if k == 0 {
            for &i in &fest.extreme_ids {
                counts[i] = 1;
            }
        }
        return counts;
    }
    let mut seen = std::collections::BTreeSet::new();
    for f in &fest.faces {
        let d = f.vertices.len();
        for mask in 1u32..(1u32 << d) {
            if mask.count_ones() as usize == k + 1 {
                let sub: Vec<usize> = (0..d).filter(|&i| mask & (1 << i) != 0).map(|i| f.vertices[i]).collect();
                seen.insert(sub);
            }
        }
    }
    for face in seen {
        for v in face {
            counts[v] += 1;
        }
    }
    counts
}

/// `xi_V^inf(w) = d^{-1} ∫_{Cyl(w)} festoon(v) dv`, `Cyl(w)` the union of
/// the projected faces containing `w`. A score is censored when any vertex
/// of those faces lies outside the window eroded by `margin`.
pub fn limit_defect_volume_scores(pts: &LimitPointSet, margin: f64, positive_part: bool) -> Result<Vec<LimitScore>> {
    let fest = festoon(pts)?;
    Ok(defect_scores_from(&fest, pts, margin, positive_part))
}

pub fn defect_scores_from(fest: &Festoon, pts: &LimitPointSet, margin: f64, positive_part: bool) -> Vec<LimitScore> {
    let d = (pts.dim_minus_1() + 1) as f64;
    let mut value = vec![0.0; pts.len()];
    let mut censored: Vec<bool> = (0..pts.len()).map(|i| !pts.window.eroded_contains(&pts.get(i).v, margin)).collect();
    for f in &fest.faces {
        let integral = fest.face_integral(f, positive_part);
        let outside = f.vertices.iter().any(|&i| !pts.window.eroded_contains(&pts.get(i).v, margin));
        for &i in &f.vertices {
            value[i] += integral / d;
            censored[i] |= outside;
        }
    }
    (0..pts.len())
        .map(|i| LimitScore { id: i, kind: ScoreKind::DefectVolume, value: value[i], censored: censored[i] })
        .collect()
}
