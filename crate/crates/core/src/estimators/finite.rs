//! One replicate of the finite-size Gaussian polytope and the convergence
//! checks built from many of them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::angles::internal_angle;
use super::replication::{run_replications, ReplicationPlan};
use super::stats::{linear_fit, mean_estimate, variance_estimate, Estimate, LinearFit};
use crate::gauss::{
    critical_radius, facet_defects, intrinsic_volume, kface_counts, sample_binomial, sample_poisson_gaussian,
    ScalingContext,
};
use crate::hull::{convex_hull_with, face_lattice, polytope_volume, HullOptions};
use crate::linalg::{binomial, unit_ball_volume};
use crate::rng::{purpose, StreamRng};
use crate::{Error, Result};

/// Fixed number of points (binomial) or Poisson number of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputModel {
    Binomial,
    Poisson,
}

impl InputModel {
    pub fn purpose(&self) -> u8 {
        match self {
            InputModel::Binomial => purpose::BINOMIAL,
            InputModel::Poisson => purpose::POISSON,
        }
    }
}

/// Optional extras computed per replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct HullExtras {
    /// Intrinsic volume index for a Kubota estimate, with its subspace count.
    pub kubota: Option<(usize, usize)>,
    /// Total defect volume `Vol(B(0,R)) - Vol(K)` (needs the origin inside).
    pub defect: bool,
}

/// Summary of one sampled polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullSample {
    pub n_points: usize,
    pub f_vector: Vec<usize>,
    pub volume: f64,
    pub kubota_value: Option<f64>,
    pub kubota_se: Option<f64>,
    pub defect: Option<f64>,
}

/// Samples one polytope (binomial with `n = size` or Poisson with
/// `lambda = size`) and summarises it.
pub fn simulate_hull(model: InputModel, size: f64, d: usize, extras: HullExtras, rng: &mut StreamRng) -> Result<HullSample> {
    let cloud = match model {
        InputModel::Binomial => sample_binomial(size as usize, d, rng),
        InputModel::Poisson => sample_poisson_gaussian(size, d, rng)?,
    };
    let poly = convex_hull_with(&cloud, &HullOptions::default(), rng)?;
    let lattice = face_lattice(&poly);
    let volume = polytope_volume(&poly, &cloud);
    let (kubota_value, kubota_se) = match extras.kubota {
        Some((k, subspaces)) => {
            let est = intrinsic_volume(&cloud.select(poly.vertices()), k, subspaces, rng)?;
            (Some(est.value), Some(est.std_error))
        }
        None => (None, None),
    };
    let defect = if extras.defect {
        let r = critical_radius(size, d)?;
        let defects = facet_defects(&poly, &cloud, r, rng)?;
        Some(defects.iter().map(|x| x.0).sum())
    } else {
        None
    };
    Ok(HullSample { n_points: cloud.len(), f_vector: lattice.f_vector(), volume, kubota_value, kubota_se, defect })
}

/// Per-grid-point samples of a finite-size study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullStudy {
    pub model: InputModel,
    pub dim: usize,
    pub grid: Vec<f64>,
    pub samples: Vec<Vec<HullSample>>,
    pub failures: Vec<usize>,
}

pub fn hull_study(model: InputModel, d: usize, grid: &[f64], reps: usize, seed: u64, extras: HullExtras) -> HullStudy {
    let plan = ReplicationPlan {
        master_seed: seed,
        replicate_count: reps,
        parameter_grid: grid.to_vec(),
        functional_kind: "hull".into(),
        dim: d,
        purpose: model.purpose(),
    };
    let table = run_replications(&plan, |_, size, rng| simulate_hull(model, size, d, extras, rng));
    let samples = (0..grid.len()).map(|g| table.successes(g).into_iter().cloned().collect()).collect();
    let failures = (0..grid.len()).map(|g| table.failures(g)).collect();
    HullStudy { model, dim: d, grid: grid.to_vec(), samples, failures }
}

/// Which statistic a variance trace is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatistic {
    FaceCount(usize),
    Volume,
    IntrinsicVolume(usize),
}

impl TraceStatistic {
    /// Exponent `p` in `Var / (2 log size)^p`.
    pub fn exponent(&self, d: usize) -> f64 {
        match self {
            TraceStatistic::FaceCount(_) => (d as f64 - 1.0) / 2.0,
            TraceStatistic::Volume => (d as f64 - 3.0) / 2.0,
            TraceStatistic::IntrinsicVolume(k) => *k as f64 - (d as f64 + 3.0) / 2.0,
        }
    }

    pub fn value(&self, s: &HullSample) -> Option<f64> {
        match self {
            TraceStatistic::FaceCount(k) => s.f_vector.get(*k).map(|&f| f as f64),
            TraceStatistic::Volume => Some(s.volume),
            TraceStatistic::IntrinsicVolume(_) => s.kubota_value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub size: f64,
    pub scaled_variance: Estimate,
    /// Within-replicate Monte-Carlo variance removed (intrinsic volumes only).
    pub mc_correction: f64,
}

/// `Var(statistic) / (2 log size)^p` per grid point with jackknife errors.
/// Intrinsic-volume traces subtract the mean squared Kubota standard error,
/// which is the Monte-Carlo part of the observed variance.
pub fn scaled_variance_trace(study: &HullStudy, stat: TraceStatistic) -> Vec<TracePoint> {
    let p = stat.exponent(study.dim);
    study
        .grid
        .iter()
        .zip(&study.samples)
        .zip(&study.failures)
        .map(|((&size, samples), &failed)| {
            let xs: Vec<f64> = samples.iter().filter_map(|s| stat.value(s)).collect();
            let var = variance_estimate(&xs, failed);
            let mc_correction = match stat {
                TraceStatistic::IntrinsicVolume(_) => {
                    let se2: Vec<f64> = samples.iter().filter_map(|s| s.kubota_se.map(|e| e * e)).collect();
                    super::stats::mean(&se2)
                }
                _ => 0.0,
            };
            let norm = (2.0 * size.ln()).powf(p);
            let corrected = Estimate::new(var.value - mc_correction, var.std_error, var.replicate_count, failed);
            TracePoint { size, scaled_variance: corrected.scaled(1.0 / norm), mc_correction }
        })
        .collect()
}

/// Mean `f_k` against `(log n)^{(d-1)/2}` with the predicted slope
/// `(2^d / sqrt d) C(d, k+1) beta_{k,d-1} pi^{(d-1)/2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpReport {
    pub dim: usize,
    pub k: usize,
    pub means: Vec<(f64, Estimate)>,
    pub fit: LinearFit,
    pub target_slope: f64,
    pub relative_gap: f64,
}

pub fn predicted_gp_slope(d: usize, k: usize) -> Result<f64> {
    let beta = internal_angle(k, d.saturating_sub(1)).map_err(|_| Error::MissingBeta { k, d_minus_1: d.saturating_sub(1) })?.value;
    let df = d as f64;
    Ok(2f64.powi(d as i32) / df.sqrt() * binomial(d, k + 1) * beta * std::f64::consts::PI.powf((df - 1.0) / 2.0))
}

pub fn expectation_gp_check(study: &HullStudy, k: usize) -> Result<GpReport> {
    let d = study.dim;
    let target_slope = predicted_gp_slope(d, k)?;
    let means: Vec<(f64, Estimate)> = study
        .grid
        .iter()
        .zip(&study.samples)
        .map(|(&n, s)| {
            let xs: Vec<f64> = s.iter().filter_map(|x| x.f_vector.get(k).map(|&f| f as f64)).collect();
            (n, mean_estimate(&xs, 0))
        })
        .collect();
    let x: Vec<f64> = means.iter().map(|(n, _)| n.ln().powf((d as f64 - 1.0) / 2.0)).collect();
    let y: Vec<f64> = means.iter().map(|(_, e)| e.value).collect();
    let fit = linear_fit(&x, &y, None)?;
    Ok(GpReport { dim: d, k, means, fit, target_slope, relative_gap: (fit.slope - target_slope) / target_slope })
}

/// Convenience wrapper sampling the study first.
pub fn expectation_gp_check_run(d: usize, k: usize, n_grid: &[f64], reps: usize, seed: u64) -> Result<GpReport> {
    predicted_gp_slope(d, k)?;
    let study = hull_study(InputModel::Binomial, d, n_grid, reps, seed, HullExtras::default());
    expectation_gp_check(&study, k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainExpectPoint {
    pub lambda: f64,
    pub measured: Estimate,
    pub predicted: f64,
    pub gap: f64,
}

/// `E Vol(K_lambda) / (kappa_d (2 log lambda)^{d/2})` against
/// `1 - d log log lambda / (4 log lambda)`.
pub fn mainexpect_check(study: &HullStudy) -> Vec<MainExpectPoint> {
    let d = study.dim;
    study
        .grid
        .iter()
        .zip(&study.samples)
        .map(|(&lambda, s)| {
            let norm = unit_ball_volume(d) * (2.0 * lambda.ln()).powf(d as f64 / 2.0);
            let xs: Vec<f64> = s.iter().map(|x| x.volume / norm).collect();
            let measured = mean_estimate(&xs, 0);
            let predicted = mainexpect_prediction(d, lambda);
            MainExpectPoint { lambda, measured, predicted, gap: measured.value - predicted }
        })
        .collect()
}

pub fn mainexpect_prediction(d: usize, lambda: f64) -> f64 {
    let l = lambda.ln();
    1.0 - d as f64 * l.ln() / (4.0 * l)
}

/// Test functions on the unit sphere for the weighted-measure check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereFunction {
    Constant(f64),
    /// `u_axis^power`.
    Monomial { axis: usize, power: u32 },
    /// `(1 + tanh(u_d / width)) / 2`, a smoothed upper-hemisphere indicator.
    Hemisphere { width: f64 },
}

impl SphereFunction {
    pub fn eval(&self, u: &[f64]) -> f64 {
        match *self {
            SphereFunction::Constant(c) => c,
            SphereFunction::Monomial { axis, power } => u[axis].powi(power as i32),
            SphereFunction::Hemisphere { width } => 0.5 * (1.0 + (u[u.len() - 1] / width).tanh()),
        }
    }

    /// `∫_{S^{d-1}} g^p dσ` by quadrature (d = 2, 3) or a fixed-seed Monte
    /// Carlo average (d >= 4).
    pub fn sphere_integral(&self, d: usize, p: i32) -> f64 {
        use std::f64::consts::PI;
        match d {
            2 => {
                let n = 20_000;
                (0..n).map(|i| {
                    let t = 2.0 * PI * (i as f64 + 0.5) / n as f64;
                    self.eval(&[t.cos(), t.sin()]).powi(p)
                }).sum::<f64>() * 2.0 * PI / n as f64
            }
            3 => {
                // Integrate in z = cos(theta) (uniform measure) and azimuth.
                let (nz, na) = (2000, 400);
                let mut s = 0.0;
                for i in 0..nz {
                    let z = -1.0 + 2.0 * (i as f64 + 0.5) / nz as f64;
                    let rho = (1.0 - z * z).sqrt();
                    for j in 0..na {
                        let a = 2.0 * PI * (j as f64 + 0.5) / na as f64;
                        s += self.eval(&[rho * a.cos(), rho * a.sin(), z]).powi(p);
                    }
                }
                s * 4.0 * PI / (nz * na) as f64
            }
            _ => {
                use rand::SeedableRng;
                use rand_distr::{Distribution, StandardNormal};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7370_6865_7265);
                let n = 400_000;
                let mut s = 0.0;
                let mut u = vec![0.0; d];
                for _ in 0..n {
                    u.iter_mut().for_each(|x| *x = StandardNormal.sample(&mut rng));
                    let l = crate::linalg::norm(&u);
                    u.iter_mut().for_each(|x| *x /= l);
                    s += self.eval(&u).powi(p);
                }
                s / n as f64 * crate::linalg::unit_sphere_area(d)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Th5Point {
    pub lambda: f64,
    pub scaled_mean: Estimate,
    pub scaled_variance: Estimate,
    /// Limit-integral predictions `E-constant * ∫g` and `sigma^2 * ∫g^2`,
    /// when the constants were supplied.
    pub predicted_mean: Option<f64>,
    pub predicted_variance: Option<f64>,
}

/// Scaled mean and variance of `<g_R, mu^{xi_k}> = sum_x g(x/|x|) xi_k(x)`
/// over a Poisson intensity grid, normalised by `(2 log lambda)^{(d-1)/2}`.
#[allow(clippy::too_many_arguments)]
pub fn th5_measure_check(
    g: SphereFunction,
    k: usize,
    d: usize,
    lambda_grid: &[f64],
    reps: usize,
    seed: u64,
    limit_mean: Option<f64>,
    limit_sigma2: Option<f64>,
) -> Result<Vec<Th5Point>> {
    let plan = ReplicationPlan {
        master_seed: seed,
        replicate_count: reps,
        parameter_grid: lambda_grid.to_vec(),
        functional_kind: format!("th5_kface{k}"),
        dim: d,
        purpose: purpose::POISSON,
    };
    let table = run_replications(&plan, |_, lambda, rng| weighted_kface_total(g, k, d, lambda, rng));
    let int1 = g.sphere_integral(d, 1);
    let int2 = g.sphere_integral(d, 2);
    Ok(lambda_grid
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let xs: Vec<f64> = table.successes(i).into_iter().copied().collect();
            let norm = (2.0 * lambda.ln()).powf((d as f64 - 1.0) / 2.0);
            Th5Point {
                lambda,
                scaled_mean: mean_estimate(&xs, table.failures(i)).scaled(1.0 / norm),
                scaled_variance: variance_estimate(&xs, table.failures(i)).scaled(1.0 / norm),
                predicted_mean: limit_mean.map(|e| e * int1),
                predicted_variance: limit_sigma2.map(|s| s * int2),
            }
        })
        .collect())
}

fn weighted_kface_total<R: Rng>(g: SphereFunction, k: usize, d: usize, lambda: f64, rng: &mut R) -> Result<f64> {
    let cloud = sample_poisson_gaussian(lambda, d, rng)?;
    let poly = convex_hull_with(&cloud, &HullOptions::default(), rng)?;
    let lattice = face_lattice(&poly);
    let counts = kface_counts(&lattice, cloud.len(), k);
    let mut total = 0.0;
    for (i, c) in counts.iter().enumerate() {
        if *c > 0 {
            let p = cloud.point(i);
            let n = crate::linalg::norm(p);
            let u: Vec<f64> = p.iter().map(|x| x / n).collect();
            total += g.eval(&u) * *c as f64 / (k + 1) as f64;
        }
    }
    Ok(total)
}

/// Ratio `sqrt(2 log lambda) / R_lambda` between the image intensity at
/// `(0, 0)` and `e^0`.
pub fn intensity_prefactor(d: usize, lambda: f64) -> Result<f64> {
    let ctx = ScalingContext::new(d, lambda)?;
    Ok(ctx.rescaled_intensity(&vec![0.0; d - 1], 0.0))
}
