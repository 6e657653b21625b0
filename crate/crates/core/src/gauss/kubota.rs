//! Intrinsic volumes by Monte-Carlo averaging over random projections.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::hull::{convex_hull, polytope_volume, PointCloud};
use crate::linalg::{factorial, gram_schmidt, unit_ball_volume};
use crate::{Error, Result};

/// Default number of random subspaces per evaluation.
pub const DEFAULT_SUBSPACES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KubotaEstimate {
    pub value: f64,
    /// Standard error of the Monte-Carlo average over subspaces.
    pub std_error: f64,
    pub subspaces: usize,
    /// Subspaces whose projection was degenerate and were redrawn.
    pub rejections: usize,
}

/// `d! kappa_d / (k! kappa_k (d-k)! kappa_{d-k})`.
pub fn kubota_constant(d: usize, k: usize) -> f64 {
    factorial(d) * unit_ball_volume(d)
        / (factorial(k) * unit_ball_volume(k) * factorial(d - k) * unit_ball_volume(d - k))
}

/// Estimates `V_k(co(cloud))` as the Kubota constant times the mean k-volume
/// of the projection onto Haar-random k-subspaces.
pub fn intrinsic_volume<R: Rng + ?Sized>(
    cloud: &PointCloud,
    k: usize,
    num_subspaces: usize,
    rng: &mut R,
) -> Result<KubotaEstimate> {
    let d = cloud.dim();
    if k < 1 || k > d {
        return Err(Error::OutOfRange(format!("intrinsic volume index {k} must lie in 1..={d}")));
    }
    if num_subspaces == 0 {
        return Err(Error::OutOfRange("need at least one subspace".into()));
    }
    // Only hull vertices matter for every projection.
    let reduced = match convex_hull(cloud) {
        Ok(poly) => cloud.select(poly.vertices()),
        Err(Error::DegenerateInput { .. }) => cloud.clone(),
        Err(e) => return Err(e),
    };
    let constant = kubota_constant(d, k);
    let mut samples = Vec::with_capacity(num_subspaces);
    let mut rejections = 0;
    let mut frame = vec![vec![0.0; d]; k];
    while samples.len() < num_subspaces {
        if rejections > 10 * num_subspaces + 100 {
            return Err(Error::DegenerateInput { expected: k, found: k - 1 });
        }
        for row in frame.iter_mut() {
            for x in row.iter_mut() {
                *x = StandardNormal.sample(rng);
            }
        }
        if !gram_schmidt(&mut frame, 1e-12) {
            rejections += 1;
            continue;
        }
        match projected_volume(&reduced, &frame) {
            Ok(v) => samples.push(v),
            Err(Error::DegenerateInput { .. }) | Err(Error::TooFewPoints { .. }) => rejections += 1,
            Err(e) => return Err(e),
        }
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(KubotaEstimate {
        value: constant * mean,
        std_error: constant * (var / n).sqrt(),
        subspaces: samples.len(),
        rejections,
    })
}

/// k-volume of the hull of the cloud projected onto the span of the
/// orthonormal rows of `frame`.
fn projected_volume(cloud: &PointCloud, frame: &[Vec<f64>]) -> Result<f64> {
    let k = frame.len();
    if k == 1 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in cloud.points() {
            let t: f64 = p.iter().zip(&frame[0]).map(|(a, b)| a * b).sum();
            lo = lo.min(t);
            hi = hi.max(t);
        }
        if cloud.is_empty() {
            return Err(Error::TooFewPoints { needed: 1, got: 0 });
        }
        return Ok(hi - lo);
    }
    let projected = cloud.map_points(k, |p, out| {
        for (o, row) in out.iter_mut().zip(frame) {
            *o = p.iter().zip(row).map(|(a, b)| a * b).sum();
        }
    });
    let poly = convex_hull(&projected)?;
    Ok(polytope_volume(&poly, &projected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn constants() {
        assert!((kubota_constant(2, 1) - std::f64::consts::PI / 2.0).abs() < 1e-14);
        assert!((kubota_constant(3, 1) - 2.0).abs() < 1e-14);
        assert!((kubota_constant(3, 3) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn square_half_perimeter() {
        let square = PointCloud::from_points(2, &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let est = intrinsic_volume(&square, 1, 10_000, &mut stream(1, 5, 0, 0)).unwrap();
        assert!((est.value - 2.0).abs() < 3.0 * est.std_error.max(1e-3), "{est:?}");
        let full = intrinsic_volume(&square, 2, 16, &mut stream(1, 5, 0, 1)).unwrap();
        assert!((full.value - 1.0).abs() < 1e-12);
    }
}
