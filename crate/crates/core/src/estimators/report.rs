//! The constants report: every estimate tagged with its route.

use serde::{Deserialize, Serialize};

use super::finite::{scaled_variance_trace, HullStudy, TraceStatistic};
use super::palm::{sphere_factor, Sigma2Report, WindowReport};
use super::stats::{variance_estimate, Estimate};
use crate::gauss::critical_radius;
use crate::Result;

/// How a constant was estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Finite-size replicates of the Gaussian polytope.
    Direct,
    /// Monte-Carlo evaluation of the limit-model integral.
    LimitIntegral,
    /// Extreme-point counts of the limit model on growing windows.
    Window,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::Direct => "direct",
            Route::LimitIntegral => "limit-integral",
            Route::Window => "window",
        })
    }
}

/// Which constant an entry estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "constant", content = "k", rename_all = "snake_case")]
pub enum Constant {
    /// Face-count variance constant `F_{k,d}`.
    FaceVariance(usize),
    /// Volume variance constant `V_d`.
    VolumeVariance,
    /// Mean extreme-point density `E_d`.
    ExtremeDensity,
    /// Extreme-point count variance density `N_d`.
    ExtremeVariance,
    /// Intrinsic-volume variance constant `v_k`.
    IntrinsicVariance(usize),
}

impl std::fmt::Display for Constant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Constant::FaceVariance(k) => write!(f, "F_{k}"),
            Constant::VolumeVariance => f.write_str("V"),
            Constant::ExtremeDensity => f.write_str("E"),
            Constant::ExtremeVariance => f.write_str("N"),
            Constant::IntrinsicVariance(k) => write!(f, "v_{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEntry {
    pub constant: Constant,
    pub route: Route,
    pub estimate: Estimate,
    /// Grid value (n, lambda or window volume) the estimate was read at.
    pub grid_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub statistic: TraceStatistic,
    pub size: f64,
    pub scaled_variance: Estimate,
}

/// Pairwise 95% interval overlap between two routes for one constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapVerdict {
    pub constant: Constant,
    pub first: Route,
    pub second: Route,
    pub overlap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ConstantsReport {
    pub dim: usize,
    pub entries: Vec<ConstantEntry>,
    pub traces: Vec<TraceRow>,
}

impl ConstantsReport {
    pub fn new(dim: usize) -> Self {
        Self { dim, ..Default::default() }
    }

    pub fn push(&mut self, constant: Constant, route: Route, estimate: Estimate, grid_value: Option<f64>) {
        self.entries.push(ConstantEntry { constant, route, estimate, grid_value });
    }

    pub fn get(&self, constant: Constant, route: Route) -> Option<&Estimate> {
        self.entries.iter().find(|e| e.constant == constant && e.route == route).map(|e| &e.estimate)
    }

    /// Overlap verdicts for every pair of routes reporting the same constant.
    pub fn overlaps(&self) -> Vec<OverlapVerdict> {
        let mut out = Vec::new();
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                if a.constant == b.constant && a.route != b.route {
                    out.push(OverlapVerdict {
                        constant: a.constant,
                        first: a.route,
                        second: b.route,
                        overlap: a.estimate.overlaps(&b.estimate),
                    });
                }
            }
        }
        out
    }

    /// Adds the scaled-variance trace of `stat` and its last grid point as
    /// the direct estimate of the matching constant (f_k traces excepted:
    /// see [`direct_face_variance`]).
    pub fn add_trace(&mut self, study: &HullStudy, stat: TraceStatistic) {
        let trace = scaled_variance_trace(study, stat);
        for t in &trace {
            self.traces.push(TraceRow { statistic: stat, size: t.size, scaled_variance: t.scaled_variance });
        }
        let constant = match stat {
            TraceStatistic::FaceCount(_) => return,
            TraceStatistic::Volume => Constant::VolumeVariance,
            TraceStatistic::IntrinsicVolume(k) => Constant::IntrinsicVariance(k),
        };
        if let Some(last) = trace.last() {
            self.push(constant, Route::Direct, last.scaled_variance, Some(last.size));
        }
    }

    /// `F_{k,d} = sigma^2(xi_k) d kappa_d` from the limit integral.
    pub fn add_sigma2(&mut self, s: &Sigma2Report) {
        if let crate::gauss::ScoreKind::KFace(k) = s.kind {
            self.push(Constant::FaceVariance(k), Route::LimitIntegral, s.sigma2.scaled(sphere_factor(self.dim)), None);
        }
    }

    /// `E_d`, `N_d`, and `F_{0,d} = N_d d kappa_d` from window counts.
    pub fn add_window(&mut self, w: &WindowReport) {
        let top = w.points.last().map(|p| p.volume);
        self.push(Constant::ExtremeDensity, Route::Window, w.e_d, top);
        self.push(Constant::ExtremeVariance, Route::Window, w.n_d, top);
        self.push(Constant::FaceVariance(0), Route::Window, w.n_d.scaled(sphere_factor(self.dim)), top);
    }
}

/// Direct estimate of `F_{k,d}` at grid point `g`: `Var f_k / R^{d-1}`.
///
/// The limit picture lives on the sphere of radius `R` (area
/// `d kappa_d R^{d-1}`), so dividing by `R^{d-1}` rather than the asymptotic
/// equivalent `(2 log n)^{(d-1)/2}` removes the leading finite-size bias
/// when comparing with the limit-model routes.
pub fn direct_face_variance(study: &HullStudy, k: usize, g: usize) -> Result<Estimate> {
    let size = study.grid[g];
    let r = critical_radius(size, study.dim)?;
    let xs: Vec<f64> = study.samples[g].iter().filter_map(|s| s.f_vector.get(k).map(|&f| f as f64)).collect();
    Ok(variance_estimate(&xs, study.failures[g]).scaled(1.0 / r.powi(study.dim as i32 - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_pairs_and_tags() {
        let mut r = ConstantsReport::new(2);
        r.push(Constant::FaceVariance(0), Route::Direct, Estimate::new(1.0, 0.1, 10, 0), None);
        r.push(Constant::FaceVariance(0), Route::Window, Estimate::new(1.3, 0.1, 10, 0), None);
        r.push(Constant::FaceVariance(0), Route::LimitIntegral, Estimate::new(2.0, 0.1, 10, 0), None);
        r.push(Constant::ExtremeDensity, Route::Window, Estimate::new(0.5, 0.1, 10, 0), None);
        let v = r.overlaps();
        assert_eq!(v.len(), 3);
        assert!(v[0].overlap);
        assert!(!v[1].overlap && !v[2].overlap);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"limit-integral\""));
        assert_eq!(Route::LimitIntegral.to_string(), "limit-integral");
    }
}
