//! Extreme points of the limit process: the production route through the
//! lifted lower hull and an independent brute-force oracle.

use crate::gauss::ScaledPoint;
use crate::hull::{lower_hull, LowerHull, PointCloud};
use crate::{Error, Result};

use super::process::lift;

/// Largest instance the oracle accepts.
pub const ORACLE_CAP: usize = 50;

/// Lifts a point slice into a cloud of dimension `d = (d-1) + 1`.
pub fn lifted_cloud(points: &[ScaledPoint], dim_minus_1: usize) -> PointCloud {
    let mut coords = Vec::with_capacity(points.len() * (dim_minus_1 + 1));
    for p in points {
        coords.extend(lift(p));
    }
    PointCloud::new(dim_minus_1 + 1, coords).expect("lifted coordinates are consistent")
}

/// Lower hull of the lifted points, or `None` when there are too few points
/// to span a face.
pub(crate) fn lifted_lower_hull(points: &[ScaledPoint], dim_minus_1: usize) -> Result<Option<LowerHull>> {
    if points.len() <= dim_minus_1 {
        return Ok(None);
    }
    let hull = lower_hull(&lifted_cloud(points, dim_minus_1))?;
    if hull.ties > 0 {
        log::debug!("lower hull resolved {} tolerance ties toward non-extreme", hull.ties);
    }
    Ok(Some(hull))
}

/// Indices of the extreme points of a slice (sorted).
///
/// With at most `d-1` points there is no face and every point is extreme
/// (any such set is supported by empty down-paraboloids).
pub fn extreme_indices(points: &[ScaledPoint], dim_minus_1: usize) -> Result<Vec<usize>> {
    match lifted_lower_hull(points, dim_minus_1)? {
        Some(h) => Ok(h.vertices),
        None => Ok((0..points.len()).collect()),
    }
}

/// Ids of the vertices of the lifted lower hull.
pub fn extreme_points(pts: &super::LimitPointSet) -> Result<Vec<usize>> {
    if pts.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    extreme_indices(&pts.all(), pts.dim_minus_1())
}

/// Brute-force extremality: `w0` is extreme iff the set of apex positions
/// `a` with `a . (v_w - v0) < l_w - l0` for every other point `w` (`l` the
/// lifted height) is non-empty, i.e. some down-paraboloid through `w0` has
/// no point of the configuration in its interior.
pub fn extreme_points_oracle(pts: &super::LimitPointSet) -> Result<Vec<usize>> {
    let all = pts.all();
    if all.len() > ORACLE_CAP {
        return Err(Error::InstanceTooLarge { size: all.len(), cap: ORACLE_CAP });
    }
    let m = pts.dim_minus_1();
    let mut out = Vec::new();
    for i in 0..all.len() {
        let extreme = match m {
            1 => {
                let lifted: Vec<(f64, f64)> = all.iter().map(|p| (p.v[0], p.h + p.v[0] * p.v[0] / 2.0)).collect();
                is_extreme_lifted_1d(&lifted, i)
            }
            2 => oracle_2d(&all, i),
            _ => return Err(Error::OutOfRange(format!("oracle supports d-1 in {{1, 2}}, got {m}"))),
        };
        if extreme {
            out.push(i);
        }
    }
    Ok(out)
}

/// Exact interval test in one spatial dimension on lifted pairs `(v, l)`.
/// Points to the left bound the admissible gradient from below, points to
/// the right from above; `w0` is extreme iff the open interval is non-empty.
pub fn is_extreme_lifted_1d(lifted: &[(f64, f64)], i: usize) -> bool {
    let (v0, l0) = lifted[i];
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for (j, &(v, l)) in lifted.iter().enumerate() {
        if j == i {
            continue;
        }
        let dv = v - v0;
        let dl = l - l0;
        if dv > 0.0 {
            upper = upper.min(dl / dv);
        } else if dv < 0.0 {
            lower = lower.max(dl / dv);
        } else if dl <= 0.0 {
            return false;
        }
        if lower >= upper {
            return false;
        }
    }
    lower < upper
}

/// Two spatial dimensions: the admissible apex set is an open polygon. Its
/// closure intersected with a large box is enumerated through all pairwise
/// line intersections; the point is extreme iff the centroid of those
/// vertices is strictly admissible. The box half-width is `1e4` times the
/// largest ratio `|l_w - l0| / |v_w - v0|` (plus one), and vertices are
/// accepted with relative slack `1e-12` — this is the oracle's resolution.
fn oracle_2d(all: &[ScaledPoint], i: usize) -> bool {
    let lifted: Vec<([f64; 2], f64)> =
        all.iter().map(|p| ([p.v[0], p.v[1]], p.h + (p.v[0] * p.v[0] + p.v[1] * p.v[1]) / 2.0)).collect();
    let (v0, l0) = lifted[i];
    let mut cons: Vec<([f64; 2], f64)> = Vec::new();
    for (j, &(v, l)) in lifted.iter().enumerate() {
        if j == i {
            continue;
        }
        let g = [v[0] - v0[0], v[1] - v0[1]];
        let c = l - l0;
        if g[0] == 0.0 && g[1] == 0.0 {
            if c <= 0.0 {
                return false;
            }
            continue;
        }
        cons.push((g, c));
    }
    if cons.is_empty() {
        return true;
    }
    let ratio = cons.iter().map(|(g, c)| c.abs() / (g[0] * g[0] + g[1] * g[1]).sqrt()).fold(0.0f64, f64::max);
    let bound = 1e4 * (1.0 + ratio);
    let n_real = cons.len();
    let mut lines = cons.clone();
    lines.push(([1.0, 0.0], bound));
    lines.push(([-1.0, 0.0], bound));
    lines.push(([0.0, 1.0], bound));
    lines.push(([0.0, -1.0], bound));
    let slack = |g: &[f64; 2], c: f64| 1e-12 * (c.abs() + (g[0].abs() + g[1].abs()) * bound);
    let mut sum = [0.0, 0.0];
    let mut count = 0usize;
    for p in 0..lines.len() {
        for q in p + 1..lines.len() {
            let (g1, c1) = lines[p];
            let (g2, c2) = lines[q];
            let det = g1[0] * g2[1] - g1[1] * g2[0];
            let scale = (g1[0].abs() + g1[1].abs()) * (g2[0].abs() + g2[1].abs());
            if det.abs() <= 1e-14 * scale {
                continue;
            }
            let a = [(c1 * g2[1] - c2 * g1[1]) / det, (g1[0] * c2 - g2[0] * c1) / det];
            if lines.iter().all(|(g, c)| g[0] * a[0] + g[1] * a[1] <= c + slack(g, *c)) {
                sum[0] += a[0];
                sum[1] += a[1];
                count += 1;
            }
        }
    }
    if count == 0 {
        return false;
    }
    let centre = [sum[0] / count as f64, sum[1] / count as f64];
    cons[..n_real].iter().all(|(g, c)| g[0] * centre[0] + g[1] * centre[1] < c - slack(g, *c))
}
