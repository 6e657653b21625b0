//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every verdict is printed even when
//! it passes. The process exits non-zero if any criterion fails. Tolerances
//! are fixed here and are not tuned to the measured values.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use gauss_festoon::estimators::*;
use gauss_festoon::gauss::{
    defect_volume_scores, intrinsic_volume, sample_poisson_gaussian, ScalingContext, ScoreKind,
};
use gauss_festoon::hull::*;
use gauss_festoon::limit::*;
use gauss_festoon::linalg::{binomial, unit_ball_volume};
use gauss_festoon::rng::stream;

/// Size grid shared by the finite-sample criteria.
const GRID: [f64; 4] = [1e3, 1e4, 1e5, 1e6];
const REPS: usize = 2000;
/// Kubota subspaces per replicate for the intrinsic-volume trace.
const TRACE_SUBSPACES: usize = 256;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn binomial_study() -> &'static HullStudy {
    static STUDY: OnceLock<HullStudy> = OnceLock::new();
    STUDY.get_or_init(|| hull_study(InputModel::Binomial, 2, &GRID, REPS, 401, HullExtras::default()))
}

fn poisson_study() -> &'static HullStudy {
    static STUDY: OnceLock<HullStudy> = OnceLock::new();
    STUDY.get_or_init(|| {
        let extras = HullExtras { kubota: Some((1, TRACE_SUBSPACES)), defect: false };
        hull_study(InputModel::Poisson, 2, &GRID, REPS, 402, extras)
    })
}

fn cloud_of(d: usize, points: &[Vec<f64>]) -> PointCloud {
    PointCloud::from_points(d, points).unwrap()
}

fn simplex(d: usize) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    pts.push(vec![0.0; d]);
    pts
}

fn cross_polytope(d: usize) -> Vec<Vec<f64>> {
    (0..2 * d).map(|i| (0..d).map(|j| if j == i / 2 { if i % 2 == 0 { 1.0 } else { -1.0 } } else { 0.0 }).collect()).collect()
}

fn cube(d: usize) -> Vec<Vec<f64>> {
    (0..1usize << d).map(|m| (0..d).map(|j| if m >> j & 1 == 1 { 1.0 } else { -1.0 }).collect()).collect()
}

fn f_vector(d: usize, pts: &[Vec<f64>]) -> Vec<usize> {
    face_lattice(&convex_hull(&cloud_of(d, pts)).unwrap()).f_vector()
}

fn criterion_1() -> Verdict {
    let mut failures = Vec::new();
    for d in 2..=4 {
        let mut bad = 0;
        for r in 0..1000u64 {
            let n = d + 2 + (r as usize * 37) % 190;
            let cloud = gauss_festoon::gauss::sample_binomial(n, d, &mut stream(101, 0xA1, d as u32, r));
            let lattice = face_lattice(&convex_hull(&cloud).unwrap());
            let expected = if d % 2 == 0 { 0 } else { 2 };
            if lattice.euler_characteristic() != expected {
                bad += 1;
            }
        }
        if bad > 0 {
            failures.push(format!("d={d}: {bad}/1000 Euler violations"));
        }
        let simplex_f: Vec<usize> = (0..d).map(|k| binomial(d + 1, k + 1) as usize).collect();
        let cross_f: Vec<usize> = (0..d).map(|k| (1usize << (k + 1)) * binomial(d, k + 1) as usize).collect();
        for (name, got, want) in
            [("simplex", f_vector(d, &simplex(d)), simplex_f), ("cross-polytope", f_vector(d, &cross_polytope(d)), cross_f)]
        {
            if got != want {
                failures.push(format!("d={d} {name}: {got:?} != {want:?}"));
            }
        }
        // The face lattice is simplicial: cube facets are triangulated. For
        // d <= 3 the triangulated counts are forced; in d = 4 the vertex
        // count, Euler relation and volume are.
        let cube_pts = cube(d);
        let cube_cloud = cloud_of(d, &cube_pts);
        let hull = convex_hull(&cube_cloud).unwrap();
        let got = face_lattice(&hull).f_vector();
        let exact_ok = match d {
            2 => got == vec![4, 4],
            3 => got == vec![8, 18, 12],
            _ => got[0] == 16 && face_lattice(&hull).euler_characteristic() == 0,
        };
        let vol = polytope_volume(&hull, &cube_cloud);
        if !exact_ok || (vol - 2f64.powi(d as i32)).abs() > 1e-12 {
            failures.push(format!("d={d} cube: f={got:?} vol={vol}"));
        }
    }
    if failures.is_empty() {
        verdict(true, "3000 random hulls satisfy Euler-Poincare; simplex, cross-polytope and cube fixtures exact for d=2..4")
    } else {
        verdict(false, failures.join("; "))
    }
}

fn oracle_instance(m: usize, rep: u64) -> LimitPointSet {
    let h_max = if m == 1 { 1.6 } else { 1.0 };
    let w = LimitWindow::new(1.0, h_max, m).unwrap();
    let mut attempt = 0;
    loop {
        let pts = sample_limit_process(&w, &mut stream(102, 0xA2, (m * 100 + attempt) as u32, rep));
        if !pts.is_empty() && pts.len() <= 20 {
            return pts;
        }
        attempt += 1;
    }
}

fn criterion_2() -> Verdict {
    let mut details = Vec::new();
    let mut pass = true;
    for m in 1..=2 {
        let mismatches = (0..500).filter(|&rep| {
            let pts = oracle_instance(m, rep);
            extreme_points(&pts).unwrap() != extreme_points_oracle(&pts).unwrap()
        });
        let count = mismatches.count();
        pass &= count == 0;
        details.push(format!("d-1={m}: {count}/500 mismatches"));
    }
    verdict(pass, details.join(", "))
}

fn criterion_3() -> Verdict {
    let mut worst = 0.0f64;
    let mut errors = 0;
    for d in 2..=3 {
        let ctx = ScalingContext::new(d, 1e4).unwrap();
        for r in 0..200u64 {
            let cloud = sample_poisson_gaussian(1e4, d, &mut stream(103, 0xA3, d as u32, r)).unwrap();
            let poly = convex_hull(&cloud).unwrap();
            match defect_volume_scores(&cloud, &ctx) {
                Ok(scores) => {
                    let total: f64 = scores.iter().map(|s| s.value / ctx.r()).sum();
                    let expected = unit_ball_volume(d) * ctx.r().powi(d as i32) - polytope_volume(&poly, &cloud);
                    worst = worst.max((total - expected).abs() / expected.abs());
                }
                Err(_) => errors += 1,
            }
        }
    }
    verdict(worst <= 1e-8 && errors == 0, format!("max relative gap {worst:.2e} over 2x200 replicates (tol 1e-8), {errors} errors"))
}

fn criterion_4() -> Verdict {
    match expectation_gp_check(binomial_study(), 0) {
        Ok(gp) => {
            let means: Vec<String> = gp.means.iter().map(|(n, e)| format!("{n:.0e}:{:.3}", e.value)).collect();
            verdict(
                gp.relative_gap.abs() <= 0.10,
                format!(
                    "slope {:.3} +/- {:.3} vs target {:.3} (gap {:+.1}%, tol 10%); mean f_0 [{}]",
                    gp.fit.slope,
                    gp.fit.slope_se,
                    gp.target_slope,
                    100.0 * gp.relative_gap,
                    means.join(", ")
                ),
            )
        }
        Err(e) => verdict(false, format!("error: {e}")),
    }
}

fn criterion_5() -> Verdict {
    let points = mainexpect_check(poisson_study());
    let Some(top) = points.iter().find(|p| p.lambda == 1e6) else {
        return verdict(false, "no lambda = 1e6 point");
    };
    let predicted = 0.9049;
    let gap = top.measured.value - predicted;
    verdict(
        gap.abs() <= 0.03,
        format!(
            "E Vol/(pi 2 log lambda) = {:.4} +/- {:.4} vs {predicted} (gap {gap:+.4}, tol 0.03; formula gives {:.4})",
            top.measured.value, top.measured.std_error, top.predicted
        ),
    )
}

fn trace_verdict(name: &str, trace: &[TracePoint]) -> (bool, String) {
    let values: Vec<f64> = trace.iter().map(|p| p.scaled_variance.value).collect();
    let positive = values.iter().all(|v| *v > 0.0 && v.is_finite());
    let ratio = values[values.len() - 1] / values[values.len() - 2];
    let ok = positive && (0.85..=1.15).contains(&ratio);
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    (ok, format!("{name} [{}] top ratio {ratio:.3}", shown.join(", ")))
}

fn criterion_6() -> Verdict {
    let (a, da) = trace_verdict("Var f_0 trace", &scaled_variance_trace(binomial_study(), TraceStatistic::FaceCount(0)));
    let (b, db) = trace_verdict("Var Vol trace", &scaled_variance_trace(poisson_study(), TraceStatistic::Volume));
    verdict(a && b, format!("{da}; {db} (ratios in [0.85, 1.15], values > 0)"))
}

fn criterion_7() -> Verdict {
    let factor = sphere_factor(2);
    let direct = direct_face_variance(poisson_study(), 0, GRID.len() - 1);
    let sigma2_reps = 100_000;
    let sigma2 = sigma2_estimator(ScoreKind::KFace(0), 1, sigma2_reps, &ProposalParams::default(), 407)
        .map(|s| (s.sigma2.scaled(factor), s.shell_share));
    let window_reps = 2000;
    let volumes = [125.0, 250.0, 500.0, 1000.0];
    let window = ed_nd_estimator(1, &volumes, window_reps, 4.0, 408).map(|w| w.n_d.scaled(factor));
    let (direct, (sigma2, shell), window) = match (direct, sigma2, window) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (a, b, c) => return verdict(false, format!("route error: {:?} {:?} {:?}", a.err(), b.err(), c.err())),
    };
    let total = REPS + sigma2_reps + window_reps * volumes.len();
    let routes = [("direct", direct), ("limit-integral", sigma2), ("window", window)];
    let mut pass = total >= 10_000;
    let mut pairs = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let ok = routes[i].1.overlaps(&routes[j].1);
            pass &= ok;
            pairs.push(format!("{}~{}:{}", routes[i].0, routes[j].0, if ok { "overlap" } else { "disjoint" }));
        }
    }
    let shown: Vec<String> = routes
        .iter()
        .map(|(n, e)| format!("{n} {:.3} [{:.3}, {:.3}]", e.value, e.ci95.0, e.ci95.1))
        .collect();
    verdict(
        pass,
        format!("F_0,2: {}; {}; {total} replicates; shell share {shell:.3}", shown.join(", "), pairs.join(", ")),
    )
}

fn criterion_8() -> Verdict {
    let lambdas = [1e4, 1e5, 1e6, 1e7, 1e8];
    let rows = match paralem_scan(2, &lambdas, &[-2.0, 0.0, 2.0], 3.0, 601) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    // "No growth": for each apex height and direction the scaled distance at
    // the top of the grid does not exceed the bottom value by more than 10%.
    let mut pass = rows.iter().all(|r| r.scaled.is_finite());
    let mut shown = Vec::new();
    for h1 in [-2.0, 0.0, 2.0] {
        for dir in [rows[0].direction, rows[1].direction] {
            let series: Vec<f64> = rows.iter().filter(|r| r.h1 == h1 && r.direction == dir).map(|r| r.scaled).collect();
            let (first, last) = (series[0], series[series.len() - 1]);
            pass &= last <= 1.10 * first;
            shown.push(format!("h1={h1} {dir:?}: {first:.3}->{last:.3}"));
        }
    }
    verdict(pass, format!("sup*R over lambda 1e4..1e8: {}", shown.join(", ")))
}

fn criterion_9() -> Verdict {
    let lambdas = [1e4, 1e5, 1e6, 1e7, 1e8];
    let mut fits = Vec::new();
    for (i, &l) in lambdas.iter().enumerate() {
        match intensity_fit(l, 20_000, 1.0, -3.0, 2.0, 10, 409, i as u32) {
            Ok(f) => fits.push(f),
            Err(e) => return verdict(false, format!("error at lambda={l}: {e}")),
        }
    }
    let chi2: Vec<f64> = fits.iter().map(|f| f.chi2).collect();
    let monotone = chi2.windows(2).all(|w| w[1] < w[0]);
    let ratio = fits.last().unwrap().density_ratio;
    let density_ok = (ratio - 1.0).abs() <= 1e-2;
    let shown: Vec<String> = chi2.iter().map(|c| format!("{c:.0}")).collect();
    verdict(
        monotone && density_ok,
        format!(
            "chi2 [{}] monotone={monotone}; density ratio at 1e8 = {ratio:.4} (tol 1e-2) ok={density_ok}",
            shown.join(", ")
        ),
    )
}

fn criterion_10() -> Verdict {
    let square = cloud_of(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]);
    let est = match intrinsic_volume(&square, 1, 10_000, &mut stream(110, 0xAA, 0, 0)) {
        Ok(e) => e,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let gap = (est.value - 2.0) / 2.0;
    let trace = scaled_variance_trace(poisson_study(), TraceStatistic::IntrinsicVolume(1));
    let finite = trace.iter().all(|p| p.scaled_variance.value.is_finite());
    let shown: Vec<String> = trace
        .iter()
        .map(|p| format!("{:.0e}:{:.4}+/-{:.4}", p.size, p.scaled_variance.value, p.scaled_variance.std_error))
        .collect();
    verdict(
        gap.abs() <= 0.01 && finite && trace.len() == GRID.len(),
        format!(
            "square V_1 = {:.4} vs 2 (gap {:+.2}%, tol 1%); scaled V_1 variance trace [{}] (sign not asserted)",
            est.value,
            100.0 * gap,
            shown.join(", ")
        ),
    )
}

fn criterion_11() -> Verdict {
    let window = LimitWindow::new(20.0, 4.0, 1).unwrap();
    let h_grid: Vec<f64> = (0..24).map(|i| -2.0 + 0.25 * i as f64).collect();
    let r_grid: Vec<f64> = (1..=24).map(|i| 0.25 * i as f64).collect();
    let h = tail_scan(TailFunctional::Height, &window, 400, &h_grid, 1.0, 10, 411);
    let r = tail_scan(TailFunctional::Localization, &window, 100, &r_grid, 1.0, 10, 412);
    match (h, r) {
        (Ok(h), Ok(r)) => {
            let ok = |t: &TailReport| t.monotone && t.envelope_correlation >= 0.95;
            verdict(
                ok(&h) && ok(&r),
                format!(
                    "H: monotone={} corr(log(-log S), t)={:.4} on {} points; R: monotone={} corr(-log S, t^2)={:.4} on {} points (tol 0.95)",
                    h.monotone, h.envelope_correlation, h.fitted_points, r.monotone, r.envelope_correlation, r.fitted_points
                ),
            )
        }
        (h, r) => verdict(false, format!("error: {:?} {:?}", h.err(), r.err())),
    }
}

fn main() {
    // libtest-style flags (filters, --list, --nocapture) are accepted and
    // ignored except for --list.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 11] = [
        ("hull correctness", criterion_1),
        ("extreme-point oracle", criterion_2),
        ("defect-volume telescoping", criterion_3),
        ("expectation slope in sqrt(log n)", criterion_4),
        ("mean volume at lambda=1e6", criterion_5),
        ("variance-trace stabilization", criterion_6),
        ("F_0 route consistency", criterion_7),
        ("quasi-paraboloid sup-distance", criterion_8),
        ("height law convergence", criterion_9),
        ("Kubota intrinsic volumes", criterion_10),
        ("tail diagnostics", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} [{name}] {} ({:.1}s)", i + 1, v.detail, start.elapsed().as_secs_f64());
        if !v.pass {
            failed.push(i + 1);
        }
    }
    println!("\nacceptance: {} passed, {} failed {failed:?}", criteria.len() - failed.len(), failed.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
