//! Limit-model routes to the variance constants: Palm two-point
//! correlations, the `sigma^2` integral, and window counts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::replication::{run_replications, ReplicationPlan};
use super::stats::{linear_fit, mean_estimate, variance_estimate, Estimate, LinearFit};
use crate::gauss::{ScaledPoint, ScoreKind};
use crate::limit::{extreme_indices, point_score, sample_limit_process, LimitWindow};
use crate::linalg::unit_ball_volume;
use crate::rng::{purpose, StreamRng};
use crate::{Error, Result};

/// Score of `target` in `base ∪ extra`, where `target` indexes `extra`.
fn score_with(base: &[ScaledPoint], extra: &[&ScaledPoint], target: usize, m: usize, kind: ScoreKind) -> Result<f64> {
    let mut pts = Vec::with_capacity(base.len() + extra.len());
    pts.extend_from_slice(base);
    pts.extend(extra.iter().map(|&p| p.clone()));
    point_score(&pts, m, base.len() + target, kind, false)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// One coupled sample of `c(w0, w1)`.
///
/// `X = xi(w0, P ∪ {w0,w1}) xi(w1, P ∪ {w0,w1})` has mean
/// `E xi(w0, P ∪ {w0,w1}) xi(w1, ...)`. For the product of the one-point
/// means, the plane is split at the bisector of `v0, v1` and a second
/// independent process `Q` is drawn; then
/// `Y0 = xi(w0, P_near0 ∪ Q_near1 ∪ {w0})` and
/// `Y1 = xi(w1, Q_near0 ∪ P_near1 ∪ {w1})` are independent (they use
/// disjoint pieces of `P` and `Q`), each has the one-point law, and
/// `X - Y0 Y1` is an unbiased sample of the correlation. When the two points
/// are far apart their scores only see their own half, so `X = Y0 Y1` almost
/// surely and the sample variance collapses.
fn coupled_correlation_sample(
    w0: &ScaledPoint,
    w1: &ScaledPoint,
    kind: ScoreKind,
    window: &LimitWindow,
    rng: &mut StreamRng,
) -> Result<f64> {
    let m = window.dim_minus_1;
    let p = sample_limit_process(window, rng).points;
    let q = sample_limit_process(window, rng).points;
    let x0 = score_with(&p, &[w0, w1], 0, m, kind)?;
    let x1 = if x0 == 0.0 && matches!(kind, ScoreKind::KFace(_)) { 0.0 } else { score_with(&p, &[w0, w1], 1, m, kind)? };
    let near0 = |pt: &ScaledPoint| dist2(&pt.v, &w0.v) <= dist2(&pt.v, &w1.v);
    let mix = |a: &[ScaledPoint], b: &[ScaledPoint]| -> Vec<ScaledPoint> {
        a.iter().filter(|pt| near0(pt)).chain(b.iter().filter(|pt| !near0(pt))).cloned().collect()
    };
    let y0 = score_with(&mix(&p, &q), &[w0], 0, m, kind)?;
    let y1 = score_with(&mix(&q, &p), &[w1], 0, m, kind)?;
    Ok(x0 * x1 - y0 * y1)
}

fn check_inside(w: &ScaledPoint, window: &LimitWindow) -> Result<()> {
    if w.v.len() != window.dim_minus_1 {
        return Err(Error::DimensionMismatch { expected: window.dim_minus_1, got: w.v.len() });
    }
    if !window.eroded_contains(&w.v, window.erosion()) || w.h > window.h_max {
        return Err(Error::OutOfRange(format!(
            "Palm point {:?} must lie in the window eroded by {:.2} and below h_max",
            w.v,
            window.erosion()
        )));
    }
    Ok(())
}

/// Estimate of the second-order correlation
/// `c(w1, w2) = E xi(w1, P ∪ {w1,w2}) xi(w2, P ∪ {w1,w2}) - E xi(w1, P ∪ {w1}) E xi(w2, P ∪ {w2})`
/// from `reps` coupled replicates. Replicates whose scores fail are
/// censored and counted.
pub fn two_point_correlation(
    w1: &ScaledPoint,
    w2: &ScaledPoint,
    kind: ScoreKind,
    window: &LimitWindow,
    reps: usize,
    seed: u64,
) -> Result<Estimate> {
    if w1 == w2 {
        return Err(Error::OutOfRange("two-point correlation needs distinct points".into()));
    }
    check_inside(w1, window)?;
    check_inside(w2, window)?;
    let plan = ReplicationPlan {
        master_seed: seed,
        replicate_count: reps,
        parameter_grid: vec![0.0],
        functional_kind: format!("correlation_{kind}"),
        dim: window.dim_minus_1 + 1,
        purpose: purpose::PALM,
    };
    let table = run_replications(&plan, |_, _, rng| coupled_correlation_sample(w1, w2, kind, window, rng));
    let xs: Vec<f64> = table.successes(0).into_iter().copied().collect();
    Ok(mean_estimate(&xs, table.failures(0)))
}

/// Importance-sampling setup for the `sigma^2` integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProposalParams {
    /// Heights of Palm points are proposed on `(-inf, h_cap]`.
    pub h_cap: f64,
    /// Radius of the ball `v_1` is drawn from uniformly.
    pub v_max: f64,
    /// Height truncation of the background process.
    pub h_max: f64,
    /// Rate `a` of the Gumbel-type proposal `a e^h exp(-a e^h)`.
    pub gumbel_rate: f64,
    /// Mixture share of the heavy-tailed `e^{h - h_cap}` component, which
    /// keeps the importance weight `e^h / q(h)` bounded.
    pub tail_share: f64,
    /// The shell `|v_1| > shell_fraction * v_max` is audited.
    pub shell_fraction: f64,
    /// Largest tolerated shell share of `|term 2|`.
    pub shell_limit: f64,
}

impl Default for ProposalParams {
    fn default() -> Self {
        Self { h_cap: 4.0, v_max: 8.0, h_max: 4.0, gumbel_rate: 1.0, tail_share: 0.1, shell_fraction: 0.8, shell_limit: 0.05 }
    }
}

impl ProposalParams {
    fn validate(&self) -> Result<()> {
        let ok = self.h_cap.is_finite()
            && self.h_max >= self.h_cap
            && self.v_max > 0.0
            && self.gumbel_rate > 0.0
            && self.tail_share > 0.0
            && self.tail_share <= 1.0
            && self.shell_fraction > 0.0
            && self.shell_fraction < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("invalid proposal parameters {self:?}")))
        }
    }

    fn gumbel_mass(&self) -> f64 {
        -(-self.gumbel_rate * self.h_cap.exp()).exp_m1()
    }

    /// Proposal density on `(-inf, h_cap]`.
    pub fn density(&self, h: f64) -> f64 {
        if h > self.h_cap {
            return 0.0;
        }
        let a = self.gumbel_rate;
        let tail = (h - self.h_cap).exp();
        let gumbel = a * h.exp() * (-a * h.exp()).exp() / self.gumbel_mass();
        self.tail_share * tail + (1.0 - self.tail_share) * gumbel
    }

    /// Draws `h` and returns `(h, e^h / q(h))`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u: f64 = 1.0 - rng.random::<f64>();
        let h = if rng.random::<f64>() < self.tail_share {
            self.h_cap + u.ln()
        } else {
            let e = -(-u * self.gumbel_mass()).ln_1p();
            (e / self.gumbel_rate).ln()
        };
        (h, h.exp() / self.density(h))
    }

    /// Background window: `v_max` plus the erosion margin on each side.
    pub fn window(&self, dim_minus_1: usize) -> Result<LimitWindow> {
        let probe = LimitWindow::new(1.0, self.h_max, dim_minus_1)?;
        LimitWindow::new(self.v_max + probe.erosion(), self.h_max, dim_minus_1)
    }
}

/// Result of the `sigma^2` integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sigma2Report {
    pub kind: ScoreKind,
    pub dim_minus_1: usize,
    /// `∫ E xi((0,h), P ∪ {(0,h)})^2 e^h dh`.
    pub term1: Estimate,
    /// `∫∫∫ c((0,h0), (v1,h1)) e^{h0+h1} dh0 dh1 dv1` over `|v1| <= v_max`.
    pub term2: Estimate,
    pub sigma2: Estimate,
    /// Share of `|term 2|` carried by the outer shell.
    pub shell_share: f64,
    pub params: ProposalParams,
}

/// Monte-Carlo estimate of
/// `sigma^2 = ∫ E xi(w0)^2 e^{h0} dh0 + ∫∫∫ c(w0, w1) e^{h0+h1} dh0 dh1 dv1`.
///
/// Each replicate contributes one independent sample of each term; the two
/// are summed per replicate so the reported error is the plain standard
/// error of the sum. Fails with `TruncationDominates` when the shell near
/// `v_max` carries more than `shell_limit` of `|term 2|`.
pub fn sigma2_estimator(
    kind: ScoreKind,
    dim_minus_1: usize,
    reps: usize,
    params: &ProposalParams,
    seed: u64,
) -> Result<Sigma2Report> {
    let report = sigma2_unchecked(kind, dim_minus_1, reps, params, seed)?;
    if report.shell_share > params.shell_limit {
        return Err(Error::TruncationDominates { share: report.shell_share, limit: params.shell_limit });
    }
    Ok(report)
}

/// [`sigma2_estimator`] without the truncation verdict.
pub fn sigma2_unchecked(
    kind: ScoreKind,
    dim_minus_1: usize,
    reps: usize,
    params: &ProposalParams,
    seed: u64,
) -> Result<Sigma2Report> {
    params.validate()?;
    let window = params.window(dim_minus_1)?;
    let m = dim_minus_1;
    let ball = unit_ball_volume(m) * params.v_max.powi(m as i32);
    let plan = ReplicationPlan {
        master_seed: seed,
        replicate_count: reps,
        parameter_grid: vec![params.v_max],
        functional_kind: format!("sigma2_{kind}"),
        dim: m + 1,
        purpose: purpose::PALM,
    };
    let table = run_replications(&plan, |_, _, rng| -> Result<(f64, f64, bool)> {
        let origin = vec![0.0; m];
        // Term 1.
        let (h, wt) = params.sample(rng);
        let w = ScaledPoint::new(origin.clone(), h);
        let p = sample_limit_process(&window, rng).points;
        let s = score_with(&p, &[&w], 0, m, kind)?;
        let t1 = wt * s * s;
        // Term 2.
        let (h0, wt0) = params.sample(rng);
        let (h1, wt1) = params.sample(rng);
        let v1 = uniform_in_ball(m, params.v_max, rng);
        let shell = crate::linalg::norm(&v1) > params.shell_fraction * params.v_max;
        let w0 = ScaledPoint::new(origin, h0);
        let w1 = ScaledPoint::new(v1, h1);
        let c = coupled_correlation_sample(&w0, &w1, kind, &window, rng)?;
        Ok((t1, wt0 * wt1 * ball * c, shell))
    });
    let rows: Vec<&(f64, f64, bool)> = table.successes(0);
    let censored = table.failures(0);
    let t1: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let t2: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let total: Vec<f64> = rows.iter().map(|r| r.0 + r.1).collect();
    let shell_sum: f64 = rows.iter().filter(|r| r.2).map(|r| r.1).sum::<f64>() / rows.len().max(1) as f64;
    let term2 = mean_estimate(&t2, censored);
    let shell_share = if term2.value == 0.0 { 0.0 } else { (shell_sum / term2.value).abs() };
    Ok(Sigma2Report {
        kind,
        dim_minus_1,
        term1: mean_estimate(&t1, censored),
        term2,
        sigma2: mean_estimate(&total, censored),
        shell_share,
        params: *params,
    })
}

fn uniform_in_ball<R: Rng + ?Sized>(m: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.random_range(-radius..=radius)).collect();
        if crate::linalg::norm(&v) <= radius {
            return v;
        }
    }
}

/// Window-count statistics at one window volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowPoint {
    /// Spatial volume of the window `Q_lambda`.
    pub volume: f64,
    pub mean_per_volume: Estimate,
    pub variance_per_volume: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub dim_minus_1: usize,
    pub h_max: f64,
    pub points: Vec<WindowPoint>,
    /// Slope of the mean count against volume: the boundary excess is
    /// absorbed by the intercept.
    pub e_d: Estimate,
    /// Slope of the count variance against volume.
    pub n_d: Estimate,
    pub mean_fit: LinearFit,
    pub variance_fit: LinearFit,
}

/// `E_d` and `N_d` from `card Ext(P ∩ Q_lambda)` over cubes of spatial
/// volume `lambda` (heights truncated at `h_max`).
pub fn ed_nd_estimator(dim_minus_1: usize, volume_grid: &[f64], reps: usize, h_max: f64, seed: u64) -> Result<WindowReport> {
    if volume_grid.len() < 2 || volume_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange("window grid needs at least two increasing volumes".into()));
    }
    if reps < 2 {
        return Err(Error::OutOfRange("window route needs at least two replicates".into()));
    }
    let windows: Vec<LimitWindow> = volume_grid
        .iter()
        .map(|&vol| LimitWindow::new(vol.powf(1.0 / dim_minus_1 as f64) / 2.0, h_max, dim_minus_1))
        .collect::<Result<_>>()?;
    let plan = ReplicationPlan {
        master_seed: seed,
        replicate_count: reps,
        parameter_grid: volume_grid.to_vec(),
        functional_kind: "ext_count".into(),
        dim: dim_minus_1 + 1,
        purpose: purpose::WINDOW,
    };
    let table = run_replications(&plan, |g, _, rng| {
        let pts = sample_limit_process(&windows[g], rng);
        if pts.is_empty() {
            return Ok(0.0);
        }
        Ok(extreme_indices(&pts.points, dim_minus_1)?.len() as f64)
    });
    let mut points = Vec::new();
    let (mut means, mut mean_w, mut vars, mut var_w) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (g, &vol) in volume_grid.iter().enumerate() {
        let xs: Vec<f64> = table.successes(g).into_iter().copied().collect();
        let censored = table.failures(g);
        let me = mean_estimate(&xs, censored);
        let ve = variance_estimate(&xs, censored);
        means.push(me.value);
        mean_w.push(1.0 / me.std_error.powi(2).max(1e-300));
        vars.push(ve.value);
        var_w.push(1.0 / ve.std_error.powi(2).max(1e-300));
        points.push(WindowPoint { volume: vol, mean_per_volume: me.scaled(1.0 / vol), variance_per_volume: ve.scaled(1.0 / vol) });
    }
    let mean_fit = linear_fit(volume_grid, &means, Some(&mean_w))?;
    let variance_fit = linear_fit(volume_grid, &vars, Some(&var_w))?;
    let total = reps * volume_grid.len();
    let censored: usize = (0..volume_grid.len()).map(|g| table.failures(g)).sum();
    Ok(WindowReport {
        dim_minus_1,
        h_max,
        points,
        e_d: Estimate::new(mean_fit.slope, mean_fit.slope_se, total - censored, censored),
        n_d: Estimate::new(variance_fit.slope, variance_fit.slope_se, total - censored, censored),
        mean_fit,
        variance_fit,
    })
}

/// `d kappa_d`, the factor turning `sigma^2` and `N_d` into `F_{0,d}`.
pub fn sphere_factor(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// `E_2 = 1 / sqrt(pi)`: the planar expected-vertex asymptotics
/// `E f_0 ~ 2 sqrt(2 pi log n)` spread over a circle of circumference
/// `2 pi sqrt(2 log n)`.
pub const E2_REFERENCE: f64 = 0.564_189_583_547_756_3;
