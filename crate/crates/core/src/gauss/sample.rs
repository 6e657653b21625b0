//! Gaussian samples: binomial (fixed count) and Poisson (random count).

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use statrs::function::gamma::gamma_ur;

use crate::hull::PointCloud;
use crate::{Error, Result};

/// `n` i.i.d. standard normal points in `R^d`.
pub fn sample_binomial<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> PointCloud {
    let coords: Vec<f64> = (0..n * d).map(|_| StandardNormal.sample(rng)).collect();
    PointCloud::new(d, coords).expect("coordinate count is a multiple of d")
}

/// Poisson count with mean `mean`; zero for a non-positive mean.
pub fn sample_poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let draw: f64 = Poisson::new(mean).expect("positive finite mean").sample(rng);
    draw as usize
}

/// Poisson process with intensity `lambda * phi(x) dx`.
pub fn sample_poisson_gaussian<R: Rng + ?Sized>(lambda: f64, d: usize, rng: &mut R) -> Result<PointCloud> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::OutOfRange(format!("intensity must be positive and finite, got {lambda}")));
    }
    let n = sample_poisson_count(lambda, rng);
    Ok(sample_binomial(n, d, rng))
}

/// The part of the Poisson process with intensity `lambda * phi(x) dx` lying
/// outside the ball of radius `r_min` and, when `cap` is given, inside the
/// cone of directions within angle `cap` of the last coordinate axis.
///
/// The radial part is drawn from the exact conditional law of `|X|` given
/// `|X| > r_min`; directions are uniform. For `d = 2` the cap is sampled
/// directly, otherwise by rejection on the sphere.
pub fn sample_poisson_gaussian_region<R: Rng + ?Sized>(
    lambda: f64,
    d: usize,
    r_min: f64,
    cap: Option<f64>,
    rng: &mut R,
) -> Result<PointCloud> {
    if d < 1 || !(lambda > 0.0) || !(r_min >= 0.0) {
        return Err(Error::OutOfRange("region sampler needs d >= 1, lambda > 0, r_min >= 0".into()));
    }
    let tail = gamma_ur(d as f64 / 2.0, r_min * r_min / 2.0);
    let cap = cap.filter(|&c| c < std::f64::consts::PI);
    let cap_fraction = match (cap, d) {
        (Some(c), 2) => c / std::f64::consts::PI,
        _ => 1.0,
    };
    let n = sample_poisson_count(lambda * tail * cap_fraction, rng);
    let mut coords = Vec::with_capacity(n * d);
    let mut dir = vec![0.0; d];
    for _ in 0..n {
        let r = sample_radius_beyond(d, r_min, rng);
        match (cap, d) {
            (Some(c), 2) => {
                let a: f64 = rng.random_range(-c..c);
                dir[0] = a.sin();
                dir[1] = a.cos();
            }
            _ => uniform_direction(&mut dir, rng),
        }
        coords.extend(dir.iter().map(|u| r * u));
    }
    if let (Some(c), true) = (cap, d != 2) {
        let keep: Vec<usize> = (0..n).filter(|&i| (coords[i * d + d - 1] / norm_of(&coords[i * d..(i + 1) * d])).acos() <= c).collect();
        let cloud = PointCloud::new(d, coords)?;
        return Ok(cloud.select(&keep));
    }
    PointCloud::new(d, coords)
}

fn norm_of(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn uniform_direction<R: Rng + ?Sized>(dir: &mut [f64], rng: &mut R) {
    loop {
        for u in dir.iter_mut() {
            *u = StandardNormal.sample(rng);
        }
        let l = norm_of(dir);
        if l > 0.0 {
            dir.iter_mut().for_each(|u| *u /= l);
            return;
        }
    }
}

/// `|X|` for a standard normal `X` in `R^d`, conditioned on `|X| > r_min`.
///
/// `s = |X|^2` has density proportional to `s^{a} e^{-s/2}` with
/// `a = d/2 - 1`. Writing `s = r_min^2 + t`, the proposal `t ~ Exp(q)` with
/// `q = 1/2 - a / r_min^2` dominates the target and the acceptance ratio is
/// `(1 + t / r_min^2)^a e^{-(1/2 - q) t} <= 1`. Small radii fall back to
/// plain rejection of unconditioned draws.
fn sample_radius_beyond<R: Rng + ?Sized>(d: usize, r_min: f64, rng: &mut R) -> f64 {
    let a = d as f64 / 2.0 - 1.0;
    let s0 = r_min * r_min;
    if s0 == 0.0 {
        let s: f64 = (0..d).map(|_| {
            let x: f64 = StandardNormal.sample(rng);
            x * x
        }).sum();
        return s.sqrt();
    }
    if a <= 0.0 {
        // d <= 2: s^a is non-increasing, so the Exp(1/2) tail proposal with
        // acceptance (s / s0)^a <= 1 is exact (always accepts for d = 2).
        loop {
            let e: f64 = Exp1.sample(rng);
            let s = s0 + 2.0 * e;
            if a == 0.0 || rng.random::<f64>() <= (s / s0).powf(a) {
                return s.sqrt();
            }
        }
    }
    if s0 > 4.0 * a {
        let q = 0.5 - a / s0;
        loop {
            let e: f64 = Exp1.sample(rng);
            let t = e / q;
            let log_ratio = a * (t / s0).ln_1p() - (0.5 - q) * t;
            if rng.random::<f64>().ln() <= log_ratio {
                return (s0 + t).sqrt();
            }
        }
    }
    loop {
        let s: f64 = (0..d).map(|_| {
            let x: f64 = StandardNormal.sample(rng);
            x * x
        }).sum();
        if s > s0 {
            return s.sqrt();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn binomial_is_deterministic_and_centred() {
        let a = sample_binomial(100_000, 2, &mut stream(1, 1, 0, 0));
        let b = sample_binomial(100_000, 2, &mut stream(1, 1, 0, 0));
        assert_eq!(a.coords(), b.coords());
        let sq: Vec<f64> = a.points().map(|p| p[0] * p[0] + p[1] * p[1]).collect();
        let mean = sq.iter().sum::<f64>() / sq.len() as f64;
        // Var |X|^2 = 2d = 4 in the plane.
        assert!((mean - 2.0).abs() < 3.0 * (4.0f64 / sq.len() as f64).sqrt());
        assert_eq!(sample_binomial(1, 3, &mut stream(1, 1, 0, 1)).len(), 1);
    }

    #[test]
    fn region_sampler_matches_tail_law() {
        // d = 3 exercises the rejection branch; compare P(|X| > 4 | |X| > 3).
        let mut rng = stream(5, 2, 0, 0);
        let cloud = sample_poisson_gaussian_region(2e5, 3, 3.0, None, &mut rng).unwrap();
        let n = cloud.len() as f64;
        let beyond = cloud.points().filter(|p| norm_of(p) > 4.0).count() as f64;
        let p = gamma_ur(1.5, 8.0) / gamma_ur(1.5, 4.5);
        assert!((beyond / n - p).abs() < 4.0 * (p * (1.0 - p) / n).sqrt(), "{} vs {p}", beyond / n);
        let expected = 2e5 * gamma_ur(1.5, 4.5);
        assert!((n - expected).abs() < 5.0 * expected.sqrt());
    }
}
