//! Diagnostic scans: paraboloid approximation, weak convergence of the
//! rescaled intensity, and tails of the height and localization functionals.

use serde::{Deserialize, Serialize};

use super::replication::{run_replications, ReplicationPlan};
use super::stats::correlation;
use crate::gauss::{
    paraboloid_sup_distance, sample_poisson_gaussian_region, Direction, ScaledPoint, ScalingContext, ScoreKind,
};
use crate::limit::{festoon_of, height_from, localization_radius, sample_limit_process, LimitWindow};
use crate::rng::purpose;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParalemRow {
    pub lambda: f64,
    pub h1: f64,
    pub direction: Direction,
    pub sup_distance: f64,
    /// `sup_distance * R_lambda`.
    pub scaled: f64,
}

/// Sup-distance between the quasi-paraboloid and the ideal paraboloid with
/// apex `(0, h1)` over the ball of radius `radius`, for every `(lambda, h1)`
/// and both directions.
pub fn paralem_scan(d: usize, lambdas: &[f64], heights: &[f64], radius: f64, per_axis: usize) -> Result<Vec<ParalemRow>> {
    let mut rows = Vec::new();
    for &lambda in lambdas {
        let ctx = ScalingContext::new(d, lambda)?;
        for &h1 in heights {
            let w = ScaledPoint::new(vec![0.0; d - 1], h1);
            for direction in [Direction::Up, Direction::Down] {
                let sup = paraboloid_sup_distance(&w, &ctx, direction, radius, per_axis);
                rows.push(ParalemRow { lambda, h1, direction, sup_distance: sup, scaled: sup * ctx.r() });
            }
        }
    }
    Ok(rows)
}

/// Histogram of rescaled heights in a fixed window against the `e^h` shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityFit {
    pub lambda: f64,
    pub bin_edges: Vec<f64>,
    pub observed: Vec<usize>,
    pub expected: Vec<f64>,
    /// Pearson statistic of the shape (expected counts normalised to the
    /// observed total).
    pub chi2: f64,
    pub dof: usize,
    /// Rescaled intensity divided by `e^h` at `(v, h) = (0, 0)`.
    pub density_ratio: f64,
}

/// Samples `reps` independent copies of the Gaussian Poisson process at
/// intensity `lambda` (as one process of intensity `lambda * reps`) in the
/// region mapping onto `|v| <= v_max`, `h in [h_lo, h_hi]`, and compares the
/// histogram of heights with the `e^h` shape. `d = 2` only.
#[allow(clippy::too_many_arguments)]
pub fn intensity_fit(lambda: f64, reps: usize, v_max: f64, h_lo: f64, h_hi: f64, bins: usize, seed: u64, grid_index: u32) -> Result<IntensityFit> {
    let d = 2;
    if !(h_lo < h_hi) || bins < 2 || reps == 0 {
        return Err(Error::OutOfRange("intensity fit needs h_lo < h_hi, >= 2 bins and >= 1 replicate".into()));
    }
    let ctx = ScalingContext::new(d, lambda)?;
    let r = ctx.r();
    let mut rng = crate::rng::stream(seed, purpose::DIAGNOSTIC, grid_index, 0);
    let cloud = sample_poisson_gaussian_region(lambda * reps as f64, d, r - h_hi / r, Some(v_max / r), &mut rng)?;
    let width = (h_hi - h_lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|i| h_lo + i as f64 * width).collect();
    let mut observed = vec![0usize; bins];
    for x in cloud.points() {
        let w = ctx.scale_transform(x);
        if w.v[0].abs() <= v_max && w.h >= h_lo && w.h < h_hi {
            observed[(((w.h - h_lo) / width) as usize).min(bins - 1)] += 1;
        }
    }
    let shape: Vec<f64> = bin_edges.windows(2).map(|e| e[1].exp() - e[0].exp()).collect();
    let total_obs: usize = observed.iter().sum();
    let total_shape: f64 = shape.iter().sum();
    let expected: Vec<f64> = shape.iter().map(|s| s / total_shape * total_obs as f64).collect();
    let chi2 = observed.iter().zip(&expected).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum();
    Ok(IntensityFit {
        lambda,
        bin_edges,
        observed,
        expected,
        chi2,
        dof: bins - 1,
        density_ratio: ctx.rescaled_intensity(&[0.0], 0.0),
    })
}

/// Which limit functional a tail scan looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailFunctional {
    /// Height functional `H` of extreme points.
    Height,
    /// Localization radius of the vertex score `xi_0`.
    Localization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub t: f64,
    pub survival: f64,
    pub exceedances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub functional: TailFunctional,
    pub samples: usize,
    pub replicates: usize,
    pub rows: Vec<TailRow>,
    pub monotone: bool,
    /// Correlation of the envelope transform with its abscissa on the grid
    /// points with `0 < survival < 1` and at least `min_exceedances`
    /// exceedances: `log(-log S)` against `t` for the height (double
    /// exponential envelope), `-log S` against `t^2` for the radius
    /// (Gaussian envelope).
    pub envelope_correlation: f64,
    pub fitted_points: usize,
}

/// Empirical survival function of `H` over the extreme points, or of the
/// `xi_0` localization radius over points of height `<= level`, for points
/// in the window eroded by its default margin.
#[allow(clippy::too_many_arguments)]
pub fn tail_scan(
    functional: TailFunctional,
    window: &LimitWindow,
    reps: usize,
    t_grid: &[f64],
    level: f64,
    min_exceedances: usize,
    seed: u64,
) -> Result<TailReport> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange("tail grid must be non-empty and increasing".into()));
    }
    let margin = window.erosion();
    let plan = ReplicationPlan {
        master_seed: seed,
        replicate_count: reps,
        parameter_grid: vec![window.half_width],
        functional_kind: format!("{functional:?}"),
        dim: window.dim_minus_1 + 1,
        purpose: purpose::DIAGNOSTIC,
    };
    let table = run_replications(&plan, |_, _, rng| -> Result<Vec<f64>> {
        let pts = sample_limit_process(window, rng);
        let all = pts.all();
        if all.is_empty() {
            return Ok(Vec::new());
        }
        let inside = |p: &ScaledPoint| window.eroded_contains(&p.v, margin);
        match functional {
            TailFunctional::Height => {
                let fest = festoon_of(&all, window.dim_minus_1)?;
                Ok(fest.extreme_ids.iter().filter(|&&i| inside(&all[i])).map(|&i| height_from(&fest, i)).collect())
            }
            TailFunctional::Localization => (0..all.len())
                .filter(|&i| inside(&all[i]) && all[i].h <= level)
                .map(|i| localization_radius(&pts, i, ScoreKind::KFace(0), t_grid).map(|r| r.radius))
                .collect(),
        }
    });
    let values: Vec<f64> = table.successes(0).into_iter().flatten().copied().collect();
    let n = values.len();
    let rows: Vec<TailRow> = t_grid
        .iter()
        .map(|&t| {
            let exceedances = values.iter().filter(|&&x| x >= t).count();
            TailRow { t, survival: if n == 0 { 0.0 } else { exceedances as f64 / n as f64 }, exceedances }
        })
        .collect();
    let monotone = rows.windows(2).all(|w| w[1].survival <= w[0].survival);
    let usable: Vec<&TailRow> =
        rows.iter().filter(|r| r.survival > 0.0 && r.survival < 1.0 && r.exceedances >= min_exceedances).collect();
    let (x, y): (Vec<f64>, Vec<f64>) = match functional {
        TailFunctional::Height => usable.iter().map(|r| (r.t, (-r.survival.ln()).ln())).unzip(),
        TailFunctional::Localization => usable.iter().map(|r| (r.t * r.t, -r.survival.ln())).unzip(),
    };
    Ok(TailReport {
        functional,
        samples: n,
        replicates: reps,
        rows,
        monotone,
        envelope_correlation: if x.len() >= 3 { correlation(&x, &y) } else { f64::NAN },
        fitted_points: x.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paralem_rows_shrink_with_lambda() {
        let rows = paralem_scan(2, &[1e4, 1e8], &[0.0], 3.0, 61).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[2].sup_distance < rows[0].sup_distance);
        assert!(rows.iter().all(|r| r.scaled.is_finite()));
    }

    #[test]
    fn intensity_histogram_is_consistent() {
        let f = intensity_fit(1e6, 200, 1.0, -3.0, 2.0, 10, 1, 0).unwrap();
        let total: usize = f.observed.iter().sum();
        assert!(total > 1000);
        assert!((f.expected.iter().sum::<f64>() - total as f64).abs() < 1e-6);
        assert!(f.density_ratio > 1.0);
    }

    #[test]
    fn height_tail_is_monotone() {
        let window = LimitWindow::new(20.0, 4.0, 1).unwrap();
        let grid: Vec<f64> = (0..12).map(|i| -1.0 + 0.25 * i as f64).collect();
        let rep = tail_scan(TailFunctional::Height, &window, 40, &grid, 0.0, 5, 3).unwrap();
        assert!(rep.monotone && rep.samples > 100);
    }
}
