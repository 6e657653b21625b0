//! Per-vertex score functionals of the finite-intensity hull: k-face shares
//! and defect volumes.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::scaling::ScalingContext;
use crate::hull::{
    convex_hull, face_lattice, facet_cone_solid_angle_with, simplex_volume, FaceLattice, PointCloud, Polytope,
    DEFAULT_DIRECTION_BUDGET,
};
use crate::linalg::unit_ball_volume;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    /// `(k+1)^{-1}` times the number of `k`-faces containing the point.
    KFace(usize),
    DefectVolume,
}

impl std::fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScoreKind::KFace(k) => write!(f, "kface{k}"),
            ScoreKind::DefectVolume => write!(f, "defect_volume"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub vertex_id: u64,
    pub kind: ScoreKind,
    pub value: f64,
}

/// Number of `k`-faces containing each cloud point (zero for non-vertices).
pub fn kface_counts(lattice: &FaceLattice, n_points: usize, k: usize) -> Vec<usize> {
    let mut counts = vec![0usize; n_points];
    if let Some(faces) = lattice.faces_by_dim.get(k) {
        for face in faces {
            for &v in face {
                counts[v] += 1;
            }
        }
    }
    counts
}

/// `xi_k(x) = (k+1)^{-1} #{k-faces containing x}` for every cloud point.
pub fn kface_scores(cloud: &PointCloud, k: usize) -> Result<Vec<ScoreRecord>> {
    if k >= cloud.dim() {
        return Err(Error::OutOfRange(format!("face dimension {k} must be below {}", cloud.dim())));
    }
    let poly = convex_hull(cloud)?;
    Ok(kface_scores_of(&face_lattice(&poly), cloud, k))
}

pub fn kface_scores_of(lattice: &FaceLattice, cloud: &PointCloud, k: usize) -> Vec<ScoreRecord> {
    kface_counts(lattice, cloud.len(), k)
        .into_iter()
        .enumerate()
        .map(|(i, c)| ScoreRecord { vertex_id: cloud.id(i), kind: ScoreKind::KFace(k), value: c as f64 / (k + 1) as f64 })
        .collect()
}

/// Sum of k-face scores with exact rational bookkeeping: the counts are
/// recovered and divided by `k+1` once, so the result is an integer.
pub fn total_kface_score(records: &[ScoreRecord], k: usize) -> usize {
    let counts: usize = records.iter().map(|r| (r.value * (k + 1) as f64).round() as usize).sum();
    counts / (k + 1)
}

/// Per-facet defect `Vol(cone(0,F) ∩ B(0,R)) - Vol(cone(0,F) ∩ K)`, together
/// with the Monte-Carlo standard error of the ball part (zero for d <= 3).
pub fn facet_defects<Rn: Rng + ?Sized>(
    poly: &Polytope,
    cloud: &PointCloud,
    radius: f64,
    rng: &mut Rn,
) -> Result<Vec<(f64, f64)>> {
    let d = poly.dim();
    let origin = vec![0.0; d];
    if poly.facets().iter().any(|f| f.offset <= poly.tolerance()) {
        return Err(Error::OriginNotInterior);
    }
    let ball = unit_ball_volume(d) * radius.powi(d as i32);
    poly.facets()
        .iter()
        .map(|f| {
            let pts: Vec<&[f64]> = f.vertices.iter().map(|&v| cloud.point(v)).collect();
            let angle = facet_cone_solid_angle_with(&pts, DEFAULT_DIRECTION_BUDGET, rng)?;
            Ok((angle.fraction * ball - simplex_volume(&origin, &pts), angle.std_error * ball))
        })
        .collect()
}

/// `xi_V(x) = d^{-1} R [Vol(cone ∩ B(0,R)) - Vol(cone ∩ K)]`, where the cone
/// is spanned from the origin by the facets containing `x`.
pub fn defect_volume_scores(cloud: &PointCloud, ctx: &ScalingContext) -> Result<Vec<ScoreRecord>> {
    let poly = convex_hull(cloud)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6465_6665_6374);
    defect_volume_scores_of(&poly, cloud, ctx, &mut rng)
}

pub fn defect_volume_scores_of<Rn: Rng + ?Sized>(
    poly: &Polytope,
    cloud: &PointCloud,
    ctx: &ScalingContext,
    rng: &mut Rn,
) -> Result<Vec<ScoreRecord>> {
    if cloud.dim() != ctx.dim {
        return Err(Error::DimensionMismatch { expected: ctx.dim, got: cloud.dim() });
    }
    let d = ctx.dim as f64;
    let r = ctx.r();
    let defects = facet_defects(poly, cloud, r, rng)?;
    let mut acc = vec![0.0; cloud.len()];
    for (f, (defect, _)) in poly.facets().iter().zip(&defects) {
        for &v in &f.vertices {
            acc[v] += defect;
        }
    }
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(i, a)| ScoreRecord { vertex_id: cloud.id(i), kind: ScoreKind::DefectVolume, value: r * a / d })
        .collect())
}
