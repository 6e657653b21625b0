//! Festoon shocks, the height functional, localization radii, window
//! counts and the height-truncation audit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::extreme::{extreme_indices, is_extreme_lifted_1d};
use super::festoon::{defect_scores_from, festoon_of, kface_counts, Festoon};
use super::process::{sample_layer, LimitPointSet, LimitWindow};
use crate::gauss::{ScaledPoint, ScoreKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingStats {
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub total: f64,
}

impl SpacingStats {
    pub fn of_sorted(xs: &[f64]) -> Self {
        let gaps: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let n = gaps.len();
        if n == 0 {
            return Self { count: 0, mean: 0.0, std_dev: 0.0, min: 0.0, max: 0.0, total: 0.0 };
        }
        let total: f64 = gaps.iter().sum();
        let mean = total / n as f64;
        let var = if n > 1 { gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        Self {
            count: n,
            mean,
            std_dev: var.sqrt(),
            min: gaps.iter().copied().fold(f64::INFINITY, f64::min),
            max: gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            total,
        }
    }
}

/// Both readings of the shocks in one spatial dimension: festoon kinks (the
/// extreme points, where arcs meet) and arc apices `(a, b + a^2/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shocks {
    pub kinks: Vec<(f64, f64)>,
    pub apices: Vec<(f64, f64)>,
    pub kink_spacing: SpacingStats,
    pub apex_spacing: SpacingStats,
}

pub fn shocks_2d(pts: &LimitPointSet) -> Result<Shocks> {
    if pts.dim_minus_1() != 1 {
        return Err(Error::OutOfRange("shocks are extracted for d-1 = 1 only".into()));
    }
    let fest = festoon_of(&pts.all(), 1)?;
    if fest.extreme_ids.len() < 2 {
        let empty = SpacingStats::of_sorted(&[]);
        return Ok(Shocks { kinks: Vec::new(), apices: Vec::new(), kink_spacing: empty, apex_spacing: empty });
    }
    let mut kinks: Vec<(f64, f64)> = fest.apices.iter().map(|p| (p.v[0], p.h)).collect();
    kinks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut apices: Vec<(f64, f64)> = fest.faces.iter().map(|f| (f.gradient[0], f.apex_height())).collect();
    apices.sort_by(|a, b| a.0.total_cmp(&b.0));
    let kink_spacing = SpacingStats::of_sorted(&kinks.iter().map(|k| k.0).collect::<Vec<_>>());
    let apex_spacing = SpacingStats::of_sorted(&apices.iter().map(|k| k.0).collect::<Vec<_>>());
    Ok(Shocks { kinks, apices, kink_spacing, apex_spacing })
}

/// Maximal apex height of the down-paraboloids carrying faces that contain
/// `id`; zero for non-extreme points.
pub fn height_functional(pts: &LimitPointSet, id: usize) -> Result<f64> {
    let fest = festoon_of(&pts.all(), pts.dim_minus_1())?;
    Ok(height_from(&fest, id))
}

pub fn height_from(fest: &Festoon, id: usize) -> f64 {
    if !fest.is_extreme(id) {
        return 0.0;
    }
    let faces = fest.faces_containing(id);
    if faces.is_empty() {
        return fest.apex(id).map_or(0.0, |p| p.h);
    }
    faces.iter().map(|&f| fest.faces[f].apex_height()).fold(f64::NEG_INFINITY, f64::max)
}

/// Score of one point of a slice, without erosion.
pub fn point_score(points: &[ScaledPoint], dim_minus_1: usize, id: usize, kind: ScoreKind, positive_part: bool) -> Result<f64> {
    if dim_minus_1 == 1 && kind == ScoreKind::KFace(0) {
        let lifted: Vec<(f64, f64)> = points.iter().map(|p| (p.v[0], p.h + p.v[0] * p.v[0] / 2.0)).collect();
        return Ok(if is_extreme_lifted_1d(&lifted, id) { 1.0 } else { 0.0 });
    }
    let fest = festoon_of(points, dim_minus_1)?;
    match kind {
        ScoreKind::KFace(k) => Ok(kface_counts(&fest, points.len(), k)[id] as f64 / (k + 1) as f64),
        ScoreKind::DefectVolume => {
            let window = LimitWindow::new(f64::MAX / 4.0, 0.0, dim_minus_1)?;
            let set = LimitPointSet { points: points.to_vec(), window, inserted: Vec::new() };
            Ok(defect_scores_from(&fest, &set, 0.0, positive_part)[id].value)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRadius {
    pub radius: f64,
    /// False when even the largest grid radius does not reproduce the score.
    pub stabilized: bool,
}

/// Smallest grid radius `r` such that the score of `id` computed from the
/// points in the cylinder `|v - v_id| <= r'` equals the full score for every
/// grid radius `r' >= r`.
pub fn localization_radius(pts: &LimitPointSet, id: usize, kind: ScoreKind, r_grid: &[f64]) -> Result<LocalizationRadius> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange("radius grid must be non-empty and increasing".into()));
    }
    let all = pts.all();
    let m = pts.dim_minus_1();
    let full = point_score(&all, m, id, kind, false)?;
    let centre = all[id].v.clone();
    let matches = |r: f64| -> Result<bool> {
        let mut local = Vec::new();
        let mut local_id = 0;
        for (i, p) in all.iter().enumerate() {
            let d2: f64 = p.v.iter().zip(&centre).map(|(a, b)| (a - b) * (a - b)).sum();
            if i == id {
                local_id = local.len();
                local.push(p.clone());
            } else if d2 <= r * r {
                local.push(p.clone());
            }
        }
        let s = point_score(&local, m, local_id, kind, false)?;
        Ok((s - full).abs() <= 1e-12 * (1.0 + full.abs()))
    };
    let mut radius = None;
    for &r in r_grid.iter().rev() {
        if matches(r)? {
            radius = Some(r);
        } else {
            break;
        }
    }
    Ok(match radius {
        Some(r) => LocalizationRadius { radius: r, stabilized: true },
        None => LocalizationRadius { radius: *r_grid.last().unwrap(), stabilized: false },
    })
}

/// Axis-aligned spatial box `centre ± half_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubWindow {
    pub centre: Vec<f64>,
    pub half_width: f64,
}

impl SubWindow {
    pub fn contains(&self, v: &[f64]) -> bool {
        v.iter().zip(&self.centre).all(|(x, c)| (x - c).abs() <= self.half_width)
    }
}

/// `(card Ext(P ∩ Q), card(Ext(P) ∩ Q))`.
pub fn ext_window_counts(pts: &LimitPointSet, q: &SubWindow) -> Result<(usize, usize)> {
    let all = pts.all();
    let m = pts.dim_minus_1();
    let inside: Vec<ScaledPoint> = all.iter().filter(|p| q.contains(&p.v)).cloned().collect();
    let restricted = if inside.is_empty() { 0 } else { extreme_indices(&inside, m)?.len() };
    let global = if all.is_empty() { 0 } else { extreme_indices(&all, m)?.iter().filter(|&&i| q.contains(&all[i].v)).count() };
    Ok((restricted, global))
}

/// Outcome of raising the height cap by `extra` for one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationAudit {
    pub added_points: usize,
    /// Whether extreme points, faces or scores in the eroded window changed.
    pub changed: bool,
}

/// Adds the layer `(h_max, h_max + extra]` to the sample and compares the
/// extreme set, the festoon faces and the k-face / defect-volume scores of
/// points inside the window eroded by `margin`.
pub fn truncation_audit<R: Rng + ?Sized>(pts: &LimitPointSet, extra: f64, margin: f64, rng: &mut R) -> Result<TruncationAudit> {
    let m = pts.dim_minus_1();
    let base = pts.all();
    let layer = sample_layer(&pts.window, pts.window.h_max, pts.window.h_max + extra, rng);
    let added_points = layer.len();
    let mut extended = base.clone();
    extended.extend(layer);
    let f0 = festoon_of(&base, m)?;
    let f1 = festoon_of(&extended, m)?;
    let inside = |i: usize| pts.window.eroded_contains(&extended[i].v, margin);
    let ext0: Vec<usize> = f0.extreme_ids.iter().copied().filter(|&i| inside(i)).collect();
    let ext1: Vec<usize> = f1.extreme_ids.iter().copied().filter(|&i| inside(i)).collect();
    let faces = |f: &Festoon| {
        let mut v: Vec<Vec<usize>> = f.faces.iter().filter(|fc| fc.vertices.iter().all(|&i| inside(i))).map(|fc| fc.vertices.clone()).collect();
        v.sort();
        v
    };
    let mut changed = ext0 != ext1 || faces(&f0) != faces(&f1);
    if !changed {
        let big = LimitWindow::new(f64::MAX / 4.0, 0.0, m)?;
        let s0 = LimitPointSet { points: base.clone(), window: big, inserted: Vec::new() };
        let s1 = LimitPointSet { points: extended.clone(), window: big, inserted: Vec::new() };
        let d0 = defect_scores_from(&f0, &s0, 0.0, false);
        let d1 = defect_scores_from(&f1, &s1, 0.0, false);
        changed = ext0.iter().any(|&i| (d0[i].value - d1[i].value).abs() > 1e-12 * (1.0 + d0[i].value.abs()));
    }
    Ok(TruncationAudit { added_points, changed })
}
