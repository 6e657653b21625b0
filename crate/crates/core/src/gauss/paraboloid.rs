//! Quasi-paraboloid boundaries in the rescaled picture and their distance
//! to the ideal paraboloids of the limit model.

use serde::{Deserialize, Serialize};

use super::scaling::{ScaledPoint, ScalingContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

/// Height of the boundary of the up or down quasi-paraboloid with apex `w`
/// above the tangent coordinate `v`.
///
/// Up: `R^2 (1 - cos e) + h0 cos e`. Down: `R^2 - (R^2 - h0) / cos e`, which
/// is `-inf` once the geodesic distance `e` reaches `pi/2`.
pub fn quasi_paraboloid_height(w: &ScaledPoint, ctx: &ScalingContext, direction: Direction, v: &[f64]) -> f64 {
    let r2 = ctx.r() * ctx.r();
    let e = ctx.geodesic(v, &w.v);
    match direction {
        Direction::Up => r2 * (1.0 - e.cos()) + w.h * e.cos(),
        Direction::Down => {
            let c = e.cos();
            if c <= 0.0 {
                f64::NEG_INFINITY
            } else {
                r2 - (r2 - w.h) / c
            }
        }
    }
}

pub fn quasi_paraboloid_boundary(
    w: &ScaledPoint,
    ctx: &ScalingContext,
    direction: Direction,
    v_grid: &[Vec<f64>],
) -> Vec<f64> {
    v_grid.iter().map(|v| quasi_paraboloid_height(w, ctx, direction, v)).collect()
}

/// Ideal paraboloid `h0 ± |v - v0|^2 / 2` of the limit model.
pub fn ideal_paraboloid_height(w: &ScaledPoint, direction: Direction, v: &[f64]) -> f64 {
    let q: f64 = v.iter().zip(&w.v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 2.0;
    match direction {
        Direction::Up => w.h + q,
        Direction::Down => w.h - q,
    }
}

/// Supremum over the cylinder `|v - v0| <= radius` (sampled on a regular
/// grid with `per_axis` nodes per axis) of the distance between the
/// quasi-paraboloid and the ideal paraboloid.
pub fn paraboloid_sup_distance(
    w: &ScaledPoint,
    ctx: &ScalingContext,
    direction: Direction,
    radius: f64,
    per_axis: usize,
) -> f64 {
    let m = w.v.len();
    let per_axis = per_axis.max(2);
    let mut idx = vec![0usize; m];
    let mut sup = 0.0f64;
    let mut v = vec![0.0; m];
    loop {
        let mut q = 0.0;
        for j in 0..m {
            let off = -radius + 2.0 * radius * idx[j] as f64 / (per_axis - 1) as f64;
            v[j] = w.v[j] + off;
            q += off * off;
        }
        if q <= radius * radius * (1.0 + 1e-12) {
            let gap = quasi_paraboloid_height(w, ctx, direction, &v) - ideal_paraboloid_height(w, direction, &v);
            sup = sup.max(gap.abs());
        }
        let mut j = 0;
        while j < m {
            idx[j] += 1;
            if idx[j] < per_axis {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == m {
            return sup;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apex_is_on_both_boundaries() {
        let ctx = ScalingContext::new(3, 1e6).unwrap();
        let w = ScaledPoint::new(vec![0.7, -1.2], 1.5);
        for dir in [Direction::Up, Direction::Down] {
            assert!((quasi_paraboloid_height(&w, &ctx, dir, &w.v) - 1.5).abs() < 1e-9);
        }
    }

    #[test]
    fn up_boundary_is_nearly_parabolic() {
        let ctx = ScalingContext::new(2, 1e8).unwrap();
        let w = ScaledPoint::new(vec![0.3], 0.5);
        let h = quasi_paraboloid_height(&w, &ctx, Direction::Up, &[0.4]);
        assert!((h - (0.5 + 0.005)).abs() < 1e-3);
    }

    #[test]
    fn scaled_distance_stays_bounded() {
        let mut last = f64::INFINITY;
        for lambda in [1e4, 1e5, 1e6, 1e7, 1e8] {
            let ctx = ScalingContext::new(3, lambda).unwrap();
            let w = ScaledPoint::new(vec![1.0, 0.5], 2.0);
            let s = paraboloid_sup_distance(&w, &ctx, Direction::Down, 3.0, 41) * ctx.r();
            assert!(s.is_finite() && s <= last * 1.000_001);
            last = s;
        }
    }
}
