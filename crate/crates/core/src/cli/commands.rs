//! The command implementations behind the binary.

use super::bundle::{Cell, ColumnKind as K, ReportBundle, Table};
use super::config::RunConfig;
use crate::estimators::{
    direct_face_variance, ed_nd_estimator, expectation_gp_check, hull_study, intensity_fit, paralem_scan,
    predicted_gp_slope, run_replications, sigma2_unchecked, tail_scan, with_workers, ConstantsReport, Estimate,
    HullExtras, InputModel, ProposalParams, ReplicationPlan, Route, TailFunctional, TraceStatistic,
};
use crate::gauss::{
    defect_volume_scores_of, intrinsic_volume, kface_counts, sample_binomial, sample_poisson_gaussian,
    ScalingContext, ScoreKind, DEFAULT_SUBSPACES,
};
use crate::hull::{convex_hull_with, face_lattice, polytope_volume, HullOptions};
use crate::limit::{festoon, sample_limit_process, shocks_2d, truncation_audit, LimitWindow};
use crate::rng::{purpose, StreamRng};
use crate::{Error, Result};

/// Default size grid for finite-size studies.
pub const DEFAULT_GRID: [f64; 4] = [1e3, 1e4, 1e5, 1e6];
/// Default intensity grid for the paraboloid and intensity scans.
pub const DIAGNOSTIC_GRID: [f64; 5] = [1e4, 1e5, 1e6, 1e7, 1e8];

/// Score functional selected by `--functional` / `--k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    KFace(usize),
    DefectVolume,
    Intrinsic(usize),
}

impl Functional {
    pub fn parse(cfg: &RunConfig, d: usize) -> Result<Self> {
        let k = cfg.k.unwrap_or(0);
        let f = match cfg.functional.as_deref().unwrap_or("kface") {
            "kface" | "f_k" => Functional::KFace(k),
            "defect_volume" | "volume" => Functional::DefectVolume,
            "intrinsic" | "v_k" => Functional::Intrinsic(k.max(1)),
            other => {
                return Err(Error::Config(format!("--functional: unknown functional {other:?} (kface | defect_volume | intrinsic)")))
            }
        };
        match f {
            Functional::KFace(k) if k >= d => Err(Error::Config(format!("--k: face dimension must be below d = {d} (got {k})"))),
            Functional::Intrinsic(k) if k > d => Err(Error::Config(format!("--k: intrinsic volume index must be at most d = {d} (got {k})"))),
            f => Ok(f),
        }
    }
}

fn check_budget(failed: usize, total: usize, cfg: &RunConfig) -> Result<()> {
    let budget = cfg.budget()?;
    if total > 0 && failed as f64 > budget * total as f64 {
        return Err(Error::DegeneracyBudget { failed, total, budget });
    }
    Ok(())
}

fn est_cells(e: &Estimate) -> Vec<Cell> {
    vec![e.value.into(), e.std_error.into(), e.ci95.0.into(), e.ci95.1.into(), e.replicate_count.into(), e.censored_count.into()]
}

const EST_COLUMNS: [(&str, K); 6] = [
    ("value", K::Float),
    ("std_error", K::Float),
    ("ci95_low", K::Float),
    ("ci95_high", K::Float),
    ("replicates", K::Int),
    ("censored", K::Int),
];

fn columns(head: &[(&'static str, K)], tail: &[(&'static str, K)]) -> Vec<(&'static str, K)> {
    head.iter().chain(tail).copied().collect()
}

/// Outcome of a command: the bundle is always produced; `status` carries an
/// error (budget or audit) detected after the data was assembled.
pub struct CommandOutput {
    pub bundle: ReportBundle,
    pub status: Result<()>,
}

impl CommandOutput {
    fn ok(bundle: ReportBundle) -> Self {
        Self { bundle, status: Ok(()) }
    }
}

/// Per-replicate finite-size simulation.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<CommandOutput> {
    let seed = cfg.require_seed()?;
    let d = cfg.dim_at_least(2, 2)?;
    let (model, single) = match (cfg.n, cfg.lambda) {
        (Some(_), Some(_)) => return Err(Error::Config("--n and --lambda are mutually exclusive".into())),
        (Some(n), None) => (InputModel::Binomial, Some(n)),
        (None, Some(l)) => (InputModel::Poisson, Some(l)),
        (None, None) => (InputModel::Binomial, None),
    };
    let grid = cfg.size_grid(single, &[1e3])?;
    if model == InputModel::Binomial && grid.iter().any(|n| n.fract() != 0.0 || *n < (d + 1) as f64) {
        return Err(Error::Config(format!("--n: binomial sizes must be integers >= d + 1 (got {grid:?})")));
    }
    let functional = Functional::parse(cfg, d)?;
    let reps = cfg.reps_or(10);
    let mut effective = cfg.clone();
    effective.dim = Some(d);
    effective.grid = Some(grid.clone());
    effective.reps = Some(reps);
    effective.functional = Some(match functional {
        Functional::KFace(_) => "kface",
        Functional::DefectVolume => "defect_volume",
        Functional::Intrinsic(_) => "intrinsic",
    }
    .into());
    effective.k = match functional {
        Functional::KFace(k) | Functional::Intrinsic(k) => Some(k),
        Functional::DefectVolume => None,
    };
    let plan = ReplicationPlan {
        master_seed: seed,
        replicate_count: reps,
        parameter_grid: grid.clone(),
        functional_kind: format!("{functional:?}"),
        dim: d,
        purpose: model.purpose(),
    };
    let table = with_workers(cfg.workers.unwrap_or(0), || {
        run_replications(&plan, |_, size, rng| simulate_row(model, size, d, functional, rng))
    });
    let mut head: Vec<(&str, K)> = vec![
        ("model", K::Str),
        ("grid_index", K::Int),
        ("size", K::Float),
        ("replicate", K::Int),
        ("status", K::Str),
        ("n_points", K::Int),
    ];
    let f_names: Vec<String> = (0..d).map(|k| format!("f_{k}")).collect();
    head.extend(f_names.iter().map(|n| (n.as_str(), K::Int)));
    head.extend([("volume", K::Float), ("score_total", K::Float), ("score_std_error", K::Float)]);
    let mut out = Table::new("replicates", &head);
    let model_name = match model {
        InputModel::Binomial => "binomial",
        InputModel::Poisson => "poisson",
    };
    let mut failed = 0;
    for row in &table.rows {
        let mut cells: Vec<Cell> =
            vec![model_name.into(), row.grid_index.into(), row.grid_value.into(), row.replicate.into()];
        match &row.outcome {
            Ok(s) => {
                cells.push("ok".into());
                cells.push(s.n_points.into());
                cells.extend(s.f_vector.iter().map(|&f| Cell::from(f)));
                cells.extend([s.volume.into(), s.score.into(), s.score_se.into()]);
            }
            Err(e) => {
                failed += 1;
                cells.push(e.to_string().into());
                cells.extend(std::iter::repeat_n(Cell::Missing, d + 4));
            }
        }
        out.push(cells);
    }
    let mut bundle = ReportBundle::new("simulate", &effective);
    bundle.tables.push(out);
    bundle.notes.push(format!("score_total is the sum of the per-point {functional:?} scores"));
    bundle.finish();
    let status = check_budget(failed, table.rows.len(), cfg);
    Ok(CommandOutput { bundle, status })
}

struct SimRow {
    n_points: usize,
    f_vector: Vec<usize>,
    volume: f64,
    score: f64,
    score_se: f64,
}

fn simulate_row(model: InputModel, size: f64, d: usize, functional: Functional, rng: &mut StreamRng) -> Result<SimRow> {
    let cloud = match model {
        InputModel::Binomial => sample_binomial(size as usize, d, rng),
        InputModel::Poisson => sample_poisson_gaussian(size, d, rng)?,
    };
    let poly = convex_hull_with(&cloud, &HullOptions::default(), rng)?;
    let lattice = face_lattice(&poly);
    let volume = polytope_volume(&poly, &cloud);
    let (score, score_se) = match functional {
        Functional::KFace(k) => {
            let counts = kface_counts(&lattice, cloud.len(), k);
            (counts.iter().sum::<usize>() as f64 / (k + 1) as f64, 0.0)
        }
        Functional::DefectVolume => {
            let ctx = ScalingContext::new(d, size)?;
            let scores = defect_volume_scores_of(&poly, &cloud, &ctx, rng)?;
            (scores.iter().map(|s| s.value).sum(), f64::NAN)
        }
        Functional::Intrinsic(k) => {
            let est = intrinsic_volume(&cloud.select(poly.vertices()), k, DEFAULT_SUBSPACES, rng)?;
            (est.value, est.std_error)
        }
    };
    Ok(SimRow { n_points: cloud.len(), f_vector: lattice.f_vector(), volume, score, score_se })
}

/// Limit-model sampling: extreme-point counts, festoon faces and shocks.
pub fn cmd_limit_model(cfg: &RunConfig) -> Result<CommandOutput> {
    let seed = cfg.require_seed()?;
    let d = cfg.dim_at_least(2, 2)?;
    let m = d - 1;
    let l = cfg.positive("window-l", cfg.window_l, 10.0)?;
    let h_max = cfg.hmax.unwrap_or(6.0);
    let window = LimitWindow::new(l, h_max, m).map_err(|e| Error::Config(format!("--window-l/--hmax: {e}")))?;
    let reps = cfg.reps_or(100);
    let sensitivity = cfg.sensitivity.unwrap_or(false);
    let mut effective = cfg.clone();
    effective.dim = Some(d);
    effective.window_l = Some(l);
    effective.hmax = Some(h_max);
    effective.reps = Some(reps);
    effective.sensitivity = Some(sensitivity);

    /// Face vertex ids, lifted-plane gradient and intercept, probe point.
    type FaceRow = (Vec<usize>, Vec<f64>, f64, Vec<f64>);
    struct LimitRow {
        n_points: usize,
        ext: usize,
        ext_eroded: usize,
        faces: Vec<FaceRow>,
        shocks: Vec<(&'static str, f64, f64)>,
        audit: Option<(usize, bool)>,
    }
    let plan = ReplicationPlan {
        master_seed: seed,
        replicate_count: reps,
        parameter_grid: vec![l],
        functional_kind: "limit".into(),
        dim: d,
        purpose: purpose::LIMIT,
    };
    let margin = window.erosion();
    let table = with_workers(cfg.workers.unwrap_or(0), || {
        run_replications(&plan, |_, _, rng| -> Result<LimitRow> {
            let pts = sample_limit_process(&window, rng);
            if pts.is_empty() {
                return Ok(LimitRow { n_points: 0, ext: 0, ext_eroded: 0, faces: vec![], shocks: vec![], audit: None });
            }
            let fest = festoon(&pts)?;
            let ext_eroded = fest.extreme_ids.iter().filter(|&&i| window.eroded_contains(&pts.get(i).v, margin)).count();
            let faces = fest
                .faces
                .iter()
                .map(|f| {
                    // Probe the face at its centroid in v.
                    let simplex = fest.face_simplex(f);
                    let probe: Vec<f64> =
                        (0..m).map(|j| simplex.iter().map(|p| p[j]).sum::<f64>() / simplex.len() as f64).collect();
                    let h = f.height(&probe);
                    let mut vp = probe;
                    vp.push(h);
                    (f.vertices.clone(), f.gradient.clone(), f.intercept, vp)
                })
                .collect();
            let shocks = if m == 1 {
                let s = shocks_2d(&pts)?;
                s.kinks.iter().map(|&(v, h)| ("kink", v, h)).chain(s.apices.iter().map(|&(v, h)| ("apex", v, h))).collect()
            } else {
                Vec::new()
            };
            let audit = if sensitivity {
                let a = truncation_audit(&pts, 2.0, margin, rng)?;
                Some((a.added_points, a.changed))
            } else {
                None
            };
            Ok(LimitRow { n_points: pts.len(), ext: fest.extreme_ids.len(), ext_eroded, faces, shocks, audit })
        })
    });
    let mut counts = Table::new(
        "ext_counts",
        &[
            ("window_l", K::Float),
            ("h_max", K::Float),
            ("replicate", K::Int),
            ("status", K::Str),
            ("n_points", K::Int),
            ("ext_count", K::Int),
            ("ext_eroded", K::Int),
            ("faces", K::Int),
        ],
    );
    let mut face_cols: Vec<(&str, K)> = vec![("replicate", K::Int), ("face", K::Int), ("vertices", K::Str)];
    let g_names: Vec<String> = (0..m).map(|j| format!("gradient_{j}")).collect();
    let p_names: Vec<String> = (0..m).map(|j| format!("probe_v{j}")).collect();
    face_cols.extend(g_names.iter().map(|n| (n.as_str(), K::Float)));
    face_cols.push(("intercept", K::Float));
    face_cols.extend(p_names.iter().map(|n| (n.as_str(), K::Float)));
    face_cols.push(("probe_height", K::Float));
    let mut faces = Table::new("festoon_faces", &face_cols);
    let mut shocks = Table::new("shocks", &[("replicate", K::Int), ("kind", K::Str), ("v", K::Float), ("h", K::Float)]);
    let mut audit = Table::new(
        "truncation_audit",
        &[("replicate", K::Int), ("extra_height", K::Float), ("added_points", K::Int), ("changed", K::Str)],
    );
    let (mut failed, mut audit_changed) = (0, 0);
    for row in &table.rows {
        match &row.outcome {
            Ok(r) => {
                counts.push(vec![
                    l.into(),
                    h_max.into(),
                    row.replicate.into(),
                    "ok".into(),
                    r.n_points.into(),
                    r.ext.into(),
                    r.ext_eroded.into(),
                    r.faces.len().into(),
                ]);
                for (i, (verts, grad, b, probe)) in r.faces.iter().enumerate() {
                    let ids: Vec<String> = verts.iter().map(usize::to_string).collect();
                    let mut cells: Vec<Cell> = vec![row.replicate.into(), i.into(), ids.join(";").into()];
                    cells.extend(grad.iter().map(|&g| Cell::from(g)));
                    cells.push((*b).into());
                    cells.extend(probe.iter().map(|&x| Cell::from(x)));
                    faces.push(cells);
                }
                for &(kind, v, h) in &r.shocks {
                    shocks.push(vec![row.replicate.into(), kind.into(), v.into(), h.into()]);
                }
                if let Some((added, changed)) = r.audit {
                    audit_changed += changed as usize;
                    audit.push(vec![row.replicate.into(), 2.0.into(), added.into(), changed.into()]);
                }
            }
            Err(e) => {
                failed += 1;
                counts.push(vec![
                    l.into(),
                    h_max.into(),
                    row.replicate.into(),
                    e.to_string().into(),
                    Cell::Missing,
                    Cell::Missing,
                    Cell::Missing,
                    Cell::Missing,
                ]);
            }
        }
    }
    let mut bundle = ReportBundle::new("limit-model", &effective);
    if margin >= l {
        bundle.notes.push(format!(
            "erosion margin {margin:.3} exceeds the window half-width {l}: the eroded window is empty, so ext_eroded and the truncation audit cover no points"
        ));
    }
    bundle.tables.push(counts);
    bundle.tables.push(faces);
    if m == 1 {
        bundle.tables.push(shocks);
    }
    if sensitivity {
        bundle.tables.push(audit);
    }
    bundle.finish();
    let mut status = check_budget(failed, table.rows.len(), cfg);
    if status.is_ok() && audit_changed > 0 {
        status = Err(Error::TruncationDominates { share: audit_changed as f64 / reps as f64, limit: 0.0 });
    }
    Ok(CommandOutput { bundle, status })
}

/// Constants estimation along the selected routes.
pub fn cmd_estimate(cfg: &RunConfig) -> Result<CommandOutput> {
    let seed = cfg.require_seed()?;
    let d = cfg.dim_at_least(2, 2)?;
    let k = cfg.k.unwrap_or(0);
    if k >= d {
        return Err(Error::Config(format!("--k: face dimension must be below d = {d} (got {k})")));
    }
    let route = cfg.route.clone().unwrap_or_else(|| "all".into());
    let routes: Vec<Route> = match route.as_str() {
        "direct" => vec![Route::Direct],
        "limit-integral" => vec![Route::LimitIntegral],
        "window" => vec![Route::Window],
        "all" => vec![Route::Direct, Route::LimitIntegral, Route::Window],
        other => return Err(Error::Config(format!("--route: unknown route {other:?} (direct | limit-integral | window | all)"))),
    };
    let intrinsic = cfg.functional.as_deref() == Some("intrinsic");
    // The expectation check needs beta_{k,d-1}; surface MissingBeta early.
    let target_slope = predicted_gp_slope(d, k)?;
    let reps = cfg.reps_or(200);
    let h_max = cfg.hmax.unwrap_or(4.0);
    let grid = cfg.size_grid(cfg.lambda.or(cfg.n), &DEFAULT_GRID)?;
    let window_l = cfg.positive("window-l", cfg.window_l, 1000.0)?;
    let mut effective = cfg.clone();
    effective.dim = Some(d);
    effective.k = Some(k);
    effective.route = Some(route.clone());
    effective.reps = Some(reps);
    effective.hmax = Some(h_max);
    effective.grid = Some(grid.clone());
    effective.window_l = Some(window_l);

    let mut report = ConstantsReport::new(d);
    let mut bundle = ReportBundle::new("estimate", &effective);
    let mut status = Ok(());
    let workers = cfg.workers.unwrap_or(0);
    for r in &routes {
        match r {
            Route::Direct => {
                let extras = HullExtras { kubota: intrinsic.then_some((k.max(1), DEFAULT_SUBSPACES)), defect: false };
                let study = with_workers(workers, || hull_study(InputModel::Poisson, d, &grid, reps, seed, extras));
                let failed: usize = study.failures.iter().sum();
                check_budget(failed, reps * grid.len(), cfg).or_else(|e| {
                    status = Err(e);
                    Ok::<(), Error>(())
                })?;
                report.add_trace(&study, TraceStatistic::FaceCount(k));
                report.add_trace(&study, TraceStatistic::Volume);
                if intrinsic {
                    report.add_trace(&study, TraceStatistic::IntrinsicVolume(k.max(1)));
                }
                let g = grid.len() - 1;
                report.push(crate::estimators::Constant::FaceVariance(k), Route::Direct, direct_face_variance(&study, k, g)?, Some(grid[g]));
                if grid.len() >= 2 {
                    let gp = expectation_gp_check(&study, k)?;
                    let mut t = Table::new(
                        "expectation_gp",
                        &columns(&[("size", K::Float)], &EST_COLUMNS)
                            .into_iter()
                            .chain([("fitted_slope", K::Float), ("slope_std_error", K::Float), ("target_slope", K::Float)])
                            .collect::<Vec<_>>(),
                    );
                    for (n, e) in &gp.means {
                        let mut cells = vec![Cell::from(*n)];
                        cells.extend(est_cells(e));
                        cells.extend([gp.fit.slope.into(), gp.fit.slope_se.into(), target_slope.into()]);
                        t.push(cells);
                    }
                    bundle.tables.push(t);
                }
            }
            Route::LimitIntegral => {
                let params = ProposalParams { h_cap: h_max, h_max, ..Default::default() };
                let s = with_workers(workers, || sigma2_unchecked(ScoreKind::KFace(k), d - 1, reps, &params, seed))?;
                let mut t = Table::new(
                    "sigma2_terms",
                    &columns(&[("term", K::Str)], &EST_COLUMNS).into_iter().chain([("shell_share", K::Float)]).collect::<Vec<_>>(),
                );
                for (name, e) in [("term1", &s.term1), ("term2", &s.term2), ("sigma2", &s.sigma2)] {
                    let mut cells = vec![Cell::from(name)];
                    cells.extend(est_cells(e));
                    cells.push(s.shell_share.into());
                    t.push(cells);
                }
                bundle.tables.push(t);
                report.add_sigma2(&s);
                if s.shell_share > params.shell_limit && status.is_ok() {
                    status = Err(Error::TruncationDominates { share: s.shell_share, limit: params.shell_limit });
                }
            }
            Route::Window => {
                if k != 0 {
                    bundle.notes.push(format!("window route estimates F_0 only; skipped for k = {k}"));
                    continue;
                }
                let m = d - 1;
                let volumes: Vec<f64> = [0.125, 0.25, 0.5, 1.0].iter().map(|f| (f * window_l).powi(m as i32)).collect();
                let w = with_workers(workers, || ed_nd_estimator(m, &volumes, reps, h_max, seed))?;
                let mut t = Table::new(
                    "window_counts",
                    &[("volume", K::Float), ("mean_per_volume", K::Float), ("mean_se", K::Float), ("variance_per_volume", K::Float), ("variance_se", K::Float), ("replicates", K::Int)],
                );
                for p in &w.points {
                    t.push(vec![
                        p.volume.into(),
                        p.mean_per_volume.value.into(),
                        p.mean_per_volume.std_error.into(),
                        p.variance_per_volume.value.into(),
                        p.variance_per_volume.std_error.into(),
                        p.mean_per_volume.replicate_count.into(),
                    ]);
                }
                bundle.tables.push(t);
                report.add_window(&w);
            }
        }
    }
    let mut constants = Table::new(
        "constants",
        &columns(&[("constant", K::Str), ("route", K::Str), ("grid_value", K::Float)], &EST_COLUMNS),
    );
    for e in &report.entries {
        let mut cells = vec![Cell::from(e.constant.to_string()), Cell::from(e.route.to_string()), e.grid_value.map_or(Cell::Missing, Cell::from)];
        cells.extend(est_cells(&e.estimate));
        constants.push(cells);
    }
    let mut traces = Table::new("traces", &columns(&[("statistic", K::Str), ("size", K::Float)], &EST_COLUMNS));
    for t in &report.traces {
        let name = match t.statistic {
            TraceStatistic::FaceCount(k) => format!("f_{k}"),
            TraceStatistic::Volume => "volume".into(),
            TraceStatistic::IntrinsicVolume(k) => format!("V_{k}"),
        };
        let mut cells = vec![Cell::from(name), t.size.into()];
        cells.extend(est_cells(&t.scaled_variance));
        traces.push(cells);
    }
    let mut overlaps = Table::new("overlaps", &[("constant", K::Str), ("first", K::Str), ("second", K::Str), ("overlap", K::Str)]);
    for v in report.overlaps() {
        overlaps.push(vec![v.constant.to_string().into(), v.first.to_string().into(), v.second.to_string().into(), v.overlap.into()]);
    }
    bundle.tables.insert(0, overlaps);
    bundle.tables.insert(0, traces);
    bundle.tables.insert(0, constants);
    bundle.constants = Some(report);
    bundle.finish();
    Ok(CommandOutput { bundle, status })
}

/// Known diagnostic names.
pub const DIAGNOSTICS: [&str; 4] = ["paralem", "h-tail", "r-tail", "intensity"];

/// Diagnostic scans; an empty selection yields an empty bundle.
pub fn cmd_diagnostics(cfg: &RunConfig) -> Result<CommandOutput> {
    let selection = cfg.diagnostics.clone().unwrap_or_default();
    if let Some(bad) = selection.iter().find(|s| !DIAGNOSTICS.contains(&s.as_str())) {
        return Err(Error::Config(format!("--diagnostics: unknown diagnostic {bad:?} (one of {DIAGNOSTICS:?})")));
    }
    let mut effective = cfg.clone();
    effective.diagnostics = Some(selection.clone());
    if selection.is_empty() {
        let mut b = ReportBundle::new("diagnostics", &effective);
        b.finish();
        return Ok(CommandOutput::ok(b));
    }
    let seed = cfg.require_seed()?;
    let d = cfg.dim_at_least(2, 2)?;
    effective.dim = Some(d);
    let mut bundle = ReportBundle::new("diagnostics", &effective);
    let workers = cfg.workers.unwrap_or(0);
    for name in &selection {
        match name.as_str() {
            "paralem" => {
                let grid = cfg.size_grid(cfg.lambda, &DIAGNOSTIC_GRID)?;
                let rows = paralem_scan(d, &grid, &[-2.0, 0.0, 2.0], 3.0, if d == 2 { 601 } else { 61 })?;
                let mut t = Table::new(
                    "paralem",
                    &[("lambda", K::Float), ("h1", K::Float), ("direction", K::Str), ("sup_distance", K::Float), ("sup_times_r", K::Float)],
                );
                for r in rows {
                    t.push(vec![r.lambda.into(), r.h1.into(), format!("{:?}", r.direction).to_lowercase().into(), r.sup_distance.into(), r.scaled.into()]);
                }
                bundle.tables.push(t);
            }
            "h-tail" | "r-tail" => {
                let l = cfg.positive("window-l", cfg.window_l, 20.0)?;
                let h_max = cfg.hmax.unwrap_or(4.0);
                let window = LimitWindow::new(l, h_max, d - 1).map_err(|e| Error::Config(format!("--window-l/--hmax: {e}")))?;
                let (functional, grid): (TailFunctional, Vec<f64>) = if name == "h-tail" {
                    (TailFunctional::Height, (0..24).map(|i| -2.0 + 0.25 * i as f64).collect())
                } else {
                    (TailFunctional::Localization, (1..=24).map(|i| 0.25 * i as f64).collect())
                };
                let rep = with_workers(workers, || tail_scan(functional, &window, cfg.reps_or(200), &grid, 1.0, 10, seed))?;
                let mut t = Table::new(
                    &name.replace('-', "_"),
                    &[("t", K::Float), ("survival", K::Float), ("exceedances", K::Int), ("samples", K::Int), ("replicates", K::Int)],
                );
                for r in &rep.rows {
                    t.push(vec![r.t.into(), r.survival.into(), r.exceedances.into(), rep.samples.into(), rep.replicates.into()]);
                }
                bundle.tables.push(t);
                bundle.notes.push(format!(
                    "{name}: monotone = {}, envelope correlation = {:.4} over {} grid points",
                    rep.monotone, rep.envelope_correlation, rep.fitted_points
                ));
            }
            "intensity" => {
                if d != 2 {
                    return Err(Error::Config("--diagnostics intensity: supported for --dim 2 only".into()));
                }
                let grid = cfg.size_grid(cfg.lambda, &DIAGNOSTIC_GRID)?;
                let reps = cfg.reps_or(2000);
                let mut t = Table::new(
                    "intensity_fit",
                    &[("lambda", K::Float), ("replicates", K::Int), ("points", K::Int), ("chi2", K::Float), ("dof", K::Int), ("density_ratio", K::Float)],
                );
                for (i, &lambda) in grid.iter().enumerate() {
                    let f = intensity_fit(lambda, reps, 1.0, -3.0, 2.0, 10, seed, i as u32)?;
                    t.push(vec![lambda.into(), reps.into(), f.observed.iter().sum::<usize>().into(), f.chi2.into(), f.dof.into(), f.density_ratio.into()]);
                }
                bundle.tables.push(t);
            }
            _ => unreachable!("validated above"),
        }
    }
    bundle.finish();
    Ok(CommandOutput::ok(bundle))
}

/// Re-reads and validates a bundle; re-renders it to `out` when given.
pub fn cmd_report(cfg: &RunConfig) -> Result<(ReportBundle, String)> {
    let input = cfg.input.as_ref().ok_or_else(|| Error::Config("--input: bundle directory required".into()))?;
    let bundle = ReportBundle::read(input)?;
    let mut s = format!(
        "command: {}\nconfig hash: {}\nversion: {}\n",
        bundle.command, bundle.provenance.config_hash, bundle.provenance.code_version
    );
    for t in &bundle.tables {
        s.push_str(&format!("table {}: {} rows x {} columns\n", t.name, t.rows.len(), t.columns.len()));
    }
    if let Some(c) = &bundle.constants {
        for e in &c.entries {
            s.push_str(&format!(
                "{} [{}] = {:.6} ± {:.6} (95% CI {:.6} .. {:.6})\n",
                e.constant, e.route, e.estimate.value, e.estimate.std_error, e.estimate.ci95.0, e.estimate.ci95.1
            ));
        }
        for v in c.overlaps() {
            s.push_str(&format!("{}: {} vs {} overlap = {}\n", v.constant, v.first, v.second, v.overlap));
        }
    }
    for n in &bundle.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    Ok((bundle, s))
}

