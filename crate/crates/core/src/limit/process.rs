//! The limiting Poisson process with intensity `e^h dh dv` on a window.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gauss::{sample_poisson_count, ScaledPoint};
use crate::{Error, Result};

/// Box `[-L, L]^{d-1}` in space times `(-inf, h_max]` in height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitWindow {
    pub half_width: f64,
    pub h_max: f64,
    pub dim_minus_1: usize,
}

impl LimitWindow {
    pub fn new(half_width: f64, h_max: f64, dim_minus_1: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) || !h_max.is_finite() || dim_minus_1 == 0 {
            return Err(Error::OutOfRange(format!(
                "window needs L > 0, finite h_max and d-1 >= 1 (got L={half_width}, h_max={h_max}, d-1={dim_minus_1})"
            )));
        }
        Ok(Self { half_width, h_max, dim_minus_1 })
    }

    /// Spatial volume `(2L)^{d-1}`.
    pub fn spatial_volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim_minus_1 as i32)
    }

    /// `(2L)^{d-1} e^{h_max}`.
    pub fn expected_count(&self) -> f64 {
        self.spatial_volume() * self.h_max.exp()
    }

    /// Default erosion margin `2 sqrt(2 (h_max + 10))`: the horizontal reach
    /// of a down-paraboloid at depth `h_max + 10` below its apex.
    pub fn erosion(&self) -> f64 {
        2.0 * (2.0 * (self.h_max + 10.0).max(0.0)).sqrt()
    }

    pub fn contains_v(&self, v: &[f64]) -> bool {
        v.iter().all(|x| x.abs() <= self.half_width)
    }

    /// Whether `v` lies in the window shrunk by `margin` on every side.
    pub fn eroded_contains(&self, v: &[f64], margin: f64) -> bool {
        v.iter().all(|x| x.abs() <= self.half_width - margin)
    }
}

/// A point inserted deterministically (for example a Palm point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsertedPoint {
    pub point: ScaledPoint,
    /// Whether the point lies in the sampling window.
    pub in_window: bool,
}

/// Sampled points of the limit process plus any inserted points. Point ids
/// are positions in [`LimitPointSet::all`]: sampled points first, then
/// inserted points in insertion order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPointSet {
    pub points: Vec<ScaledPoint>,
    pub window: LimitWindow,
    pub inserted: Vec<InsertedPoint>,
}

impl LimitPointSet {
    pub fn new(points: Vec<ScaledPoint>, window: LimitWindow) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.v.len() != window.dim_minus_1) {
            return Err(Error::DimensionMismatch { expected: window.dim_minus_1, got: p.v.len() });
        }
        Ok(Self { points, window, inserted: Vec::new() })
    }

    pub fn dim_minus_1(&self) -> usize {
        self.window.dim_minus_1
    }

    pub fn len(&self) -> usize {
        self.points.len() + self.inserted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: usize) -> &ScaledPoint {
        if id < self.points.len() {
            &self.points[id]
        } else {
            &self.inserted[id - self.points.len()].point
        }
    }

    /// All points, sampled then inserted.
    pub fn all(&self) -> Vec<ScaledPoint> {
        self.points.iter().cloned().chain(self.inserted.iter().map(|p| p.point.clone())).collect()
    }

    /// Inserts `w` and returns its id.
    pub fn insert(&mut self, w: ScaledPoint) -> Result<usize> {
        if w.v.len() != self.window.dim_minus_1 {
            return Err(Error::DimensionMismatch { expected: self.window.dim_minus_1, got: w.v.len() });
        }
        let in_window = self.window.contains_v(&w.v) && w.h <= self.window.h_max;
        self.inserted.push(InsertedPoint { point: w, in_window });
        Ok(self.len() - 1)
    }

    pub fn with_inserted(&self, w: ScaledPoint) -> Result<(Self, usize)> {
        let mut s = self.clone();
        let id = s.insert(w)?;
        Ok((s, id))
    }
}

/// Exact sampler: `N ~ Poisson((2L)^{d-1} e^{h_max})`, `v` uniform on the
/// box, `h = h_max + log U`.
pub fn sample_limit_process<R: Rng + ?Sized>(window: &LimitWindow, rng: &mut R) -> LimitPointSet {
    let points = sample_layer(window, f64::NEG_INFINITY, window.h_max, rng);
    LimitPointSet { points, window: *window, inserted: Vec::new() }
}

/// Points of the process with heights in `(h_lo, h_hi]` over the window's
/// spatial box.
pub fn sample_layer<R: Rng + ?Sized>(window: &LimitWindow, h_lo: f64, h_hi: f64, rng: &mut R) -> Vec<ScaledPoint> {
    let lo_mass = if h_lo == f64::NEG_INFINITY { 0.0 } else { h_lo.exp() };
    let mass = h_hi.exp() - lo_mass;
    let n = sample_poisson_count(window.spatial_volume() * mass, rng);
    let l = window.half_width;
    (0..n)
        .map(|_| {
            let v = (0..window.dim_minus_1).map(|_| rng.random_range(-l..=l)).collect();
            // Inverse CDF of the density proportional to e^h on (h_lo, h_hi].
            let u: f64 = 1.0 - rng.random::<f64>();
            let h = (lo_mass + u * mass).ln();
            ScaledPoint::new(v, h)
        })
        .collect()
}

/// `(v, h) -> (v, h + |v|^2 / 2)`.
pub fn lift(w: &ScaledPoint) -> Vec<f64> {
    let mut out = w.v.clone();
    out.push(w.h + w.v.iter().map(|x| x * x).sum::<f64>() / 2.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn lift_examples() {
        assert_eq!(lift(&ScaledPoint::new(vec![0.0], 0.0)), vec![0.0, 0.0]);
        assert_eq!(lift(&ScaledPoint::new(vec![2.0], 0.0)), vec![2.0, 2.0]);
    }

    #[test]
    fn mean_count_matches_window_mass() {
        let w = LimitWindow::new(1.0, 3.0, 1).unwrap();
        let reps = 4000;
        let counts: Vec<f64> = (0..reps).map(|r| sample_limit_process(&w, &mut stream(2, 3, 0, r)).len() as f64).collect();
        let mean = counts.iter().sum::<f64>() / reps as f64;
        let expected = 2.0 * 3f64.exp();
        assert!((mean - expected).abs() < 3.0 * (expected / reps as f64).sqrt(), "{mean}");
        let pts = sample_limit_process(&w, &mut stream(2, 3, 1, 0));
        assert!(pts.points.iter().all(|p| p.h <= 3.0 && p.v[0].abs() <= 1.0));
    }
}
