//! Critical radius, exponential map and the scaling transform onto
//! tangent-height coordinates `(v, h)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::linalg::{dot, norm};
use crate::{Error, Result};

/// Argument of the outer square root in the critical radius.
fn radius_argument(lambda: f64, d: usize) -> f64 {
    let l = lambda.ln();
    2.0 * l - (2.0 * (2.0 * PI).powi(d as i32) * l).ln()
}

/// Smallest intensity for which the critical radius is at least 1.
///
/// With `t = log lambda` the argument is `2t - log(2 (2 pi)^d t)`, which is
/// increasing for `t > 1/2`; the threshold is found by bisection there.
pub fn lambda0(d: usize) -> f64 {
    let f = |t: f64| 2.0 * t - (2.0 * (2.0 * PI).powi(d as i32) * t).ln() - 1.0;
    let (mut lo, mut hi) = (0.5, 1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.exp()
}

/// `R = sqrt(2 log lambda - log(2 (2 pi)^d log lambda))`.
pub fn critical_radius(lambda: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("dimension must be >= 2, got {d}")));
    }
    let l0 = lambda0(d);
    if !(lambda >= l0) || !lambda.is_finite() {
        return Err(Error::LambdaTooSmall { lambda, lambda0: l0 });
    }
    Ok(radius_argument(lambda, d).max(1.0).sqrt())
}

/// Point in tangent-height coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledPoint {
    pub v: Vec<f64>,
    pub h: f64,
}

impl ScaledPoint {
    pub fn new(v: Vec<f64>, h: f64) -> Self {
        Self { v, h }
    }
}

/// `exp(v) = cos|v| u0 + sin|v| (v/|v|, 0)` with `u0 = e_d`.
pub fn exp_map(v: &[f64]) -> Vec<f64> {
    let r = norm(v);
    let mut u = Vec::with_capacity(v.len() + 1);
    if r == 0.0 {
        u.extend(std::iter::repeat_n(0.0, v.len()));
    } else {
        let s = r.sin() / r;
        u.extend(v.iter().map(|x| x * s));
    }
    u.push(r.cos());
    u
}

/// Inverse of [`exp_map`] on the unit sphere, with `|result| <= pi`. The
/// antipode `-u0` maps to `(0, .., 0, pi)`.
pub fn inv_exp_map(u: &[f64]) -> Vec<f64> {
    let d = u.len();
    let head = &u[..d - 1];
    let s = norm(head);
    if s == 0.0 {
        let mut v = vec![0.0; d - 1];
        if u[d - 1] < 0.0 {
            v[d - 2] = PI;
        }
        return v;
    }
    let theta = s.atan2(u[d - 1]);
    head.iter().map(|x| x * theta / s).collect()
}

/// Geodesic distance on the unit sphere.
pub fn sphere_distance(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum::<f64>().sqrt();
    2.0 * diff.atan2(sum)
}

/// Intensity, dimension, critical radius and pole of one scaling picture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingContext {
    pub dim: usize,
    pub lambda: f64,
    pub r_lambda: f64,
    pub pole: Vec<f64>,
}

impl ScalingContext {
    pub fn new(d: usize, lambda: f64) -> Result<Self> {
        let r_lambda = critical_radius(lambda, d)?;
        let mut pole = vec![0.0; d];
        pole[d - 1] = 1.0;
        Ok(Self { dim: d, lambda, r_lambda, pole })
    }

    /// Replaces the pole by `pole / |pole|`.
    pub fn with_pole(mut self, pole: &[f64]) -> Result<Self> {
        if pole.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: pole.len() });
        }
        let n = norm(pole);
        if !(n > 0.0) {
            return Err(Error::OutOfRange("pole must be non-zero".into()));
        }
        self.pole = pole.iter().map(|x| x / n).collect();
        Ok(self)
    }

    pub fn r(&self) -> f64 {
        self.r_lambda
    }

    /// `sqrt(2 log lambda)`.
    pub fn log_scale(&self) -> f64 {
        (2.0 * self.lambda.ln()).sqrt()
    }

    /// Householder reflection exchanging the pole and `e_d` (an involution;
    /// identity for the default pole).
    fn reflect(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut w = self.pole.clone();
        w[d - 1] -= 1.0;
        let wn = dot(&w, &w);
        if wn < 1e-30 {
            return x.to_vec();
        }
        let c = 2.0 * dot(&w, x) / wn;
        x.iter().zip(&w).map(|(xi, wi)| xi - c * wi).collect()
    }

    /// `T(x) = (R exp^{-1}(x/|x|), R^2 (1 - |x|/R))`, with `T(0) = (0, R^2)`.
    pub fn scale_transform(&self, x: &[f64]) -> ScaledPoint {
        let r = self.r_lambda;
        let len = norm(x);
        if len == 0.0 {
            return ScaledPoint::new(vec![0.0; self.dim - 1], r * r);
        }
        let y = self.reflect(x);
        let u: Vec<f64> = y.iter().map(|c| c / len).collect();
        let v = inv_exp_map(&u).into_iter().map(|c| r * c).collect();
        ScaledPoint::new(v, r * r * (1.0 - len / r))
    }

    pub fn inverse_scale_transform(&self, w: &ScaledPoint) -> Vec<f64> {
        let r = self.r_lambda;
        let radius = r - w.h / r;
        let theta: Vec<f64> = w.v.iter().map(|c| c / r).collect();
        let u = exp_map(&theta);
        self.reflect(&u.iter().map(|c| c * radius).collect::<Vec<_>>())
    }

    /// Geodesic distance between `exp(v/R)` and `exp(v0/R)`.
    pub fn geodesic(&self, v: &[f64], v0: &[f64]) -> f64 {
        let r = self.r_lambda;
        let a = exp_map(&v.iter().map(|c| c / r).collect::<Vec<_>>());
        let b = exp_map(&v0.iter().map(|c| c / r).collect::<Vec<_>>());
        sphere_distance(&a, &b)
    }

    /// Density of the image of the Poisson process under the scaling
    /// transform, with respect to `dv dh`.
    pub fn rescaled_intensity(&self, v: &[f64], h: f64) -> f64 {
        let r = self.r_lambda;
        self.log_scale() / r * self.rescaled_volume_density(v, h) * (h - h * h / (2.0 * r * r)).exp()
    }

    /// Density of the image of Lebesgue measure, normalised to equal 1 at
    /// `(0, 0)`.
    pub fn rescaled_volume_density(&self, v: &[f64], h: f64) -> f64 {
        let r = self.r_lambda;
        let d = self.dim as i32;
        let t = norm(v) / r;
        let sinc = if t == 0.0 { 1.0 } else { t.sin() / t };
        let radial = 1.0 - h / (r * r);
        if radial <= 0.0 {
            return 0.0;
        }
        sinc.abs().powi(d - 2) * radial.powi(d - 1)
    }
}
