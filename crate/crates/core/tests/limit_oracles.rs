//! The lifted-lower-hull extreme points against the paraboloid-coverage
//! oracle, plus festoon integral and envelope properties.

use gauss_festoon::gauss::ScaledPoint;
use gauss_festoon::limit::*;
use gauss_festoon::rng::stream;
use rand::Rng;

fn small_instance(m: usize, rep: u64) -> LimitPointSet {
    // Mean of about ten points; instances above 20 points are redrawn.
    let h_max = if m == 1 { 1.6 } else { 1.0 };
    let w = LimitWindow::new(1.0, h_max, m).unwrap();
    let mut attempt = 0;
    loop {
        let pts = sample_limit_process(&w, &mut stream(11, 8, (m * 100 + attempt) as u32, rep));
        if !pts.is_empty() && pts.len() <= 20 {
            return pts;
        }
        attempt += 1;
    }
}

#[test]
fn extremes_match_oracle_on_random_instances() {
    for m in 1..=2 {
        let mut mismatches = 0;
        for rep in 0..500 {
            let pts = small_instance(m, rep);
            let fast = extreme_points(&pts).unwrap();
            let oracle = extreme_points_oracle(&pts).unwrap();
            if fast != oracle {
                mismatches += 1;
                eprintln!("d-1={m} rep={rep}: hull {fast:?} oracle {oracle:?}");
            }
        }
        assert_eq!(mismatches, 0, "d-1={m}");
    }
}

#[test]
fn lift_membership_equivalence() {
    // w' lies in the down-paraboloid with apex w0 iff its lift lies below
    // the hyperplane with gradient v0 through the lift of w0.
    let mut rng = stream(12, 8, 0, 0);
    for _ in 0..100_000 {
        let v0: f64 = rng.random_range(-3.0..3.0);
        let h0: f64 = rng.random_range(-3.0..3.0);
        let v1: f64 = rng.random_range(-3.0..3.0);
        let h1: f64 = rng.random_range(-3.0..3.0);
        let paraboloid = h1 <= h0 - (v1 - v0) * (v1 - v0) / 2.0;
        let l0 = lift(&ScaledPoint::new(vec![v0], h0));
        let l1 = lift(&ScaledPoint::new(vec![v1], h1));
        let lifted = l1[1] <= l0[1] + v0 * (v1 - v0);
        assert_eq!(paraboloid, lifted);
    }
}

#[test]
fn face_integrals_match_quadrature() {
    let mut rng = stream(13, 8, 0, 0);
    for _ in 0..100 {
        let a: f64 = rng.random_range(-2.0..2.0);
        let b: f64 = rng.random_range(-2.0..2.0);
        let x0: f64 = rng.random_range(-3.0..3.0);
        let x1 = x0 + rng.random_range(0.1..3.0);
        let face = FestoonFace { vertices: vec![0, 1], gradient: vec![a], intercept: b };
        let exact = signed_face_integral(&face, &[&[x0], &[x1]]);
        // Composite Simpson on 2000 panels is exact for quadratics up to rounding.
        let n = 2000;
        let hstep = (x1 - x0) / n as f64;
        let f = |v: f64| a * v + b - v * v / 2.0;
        let mut s = f(x0) + f(x1);
        for i in 1..n {
            s += f(x0 + i as f64 * hstep) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let simpson = s * hstep / 3.0;
        assert!((exact - simpson).abs() < 1e-8 * (1.0 + exact.abs()));
    }
}

#[test]
fn triangle_integrals_match_quadrature() {
    let mut rng = stream(13, 8, 1, 0);
    for _ in 0..100 {
        let a = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let b: f64 = rng.random_range(-2.0..2.0);
        let p: Vec<[f64; 2]> = (0..3).map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
        let face = FestoonFace { vertices: vec![0, 1, 2], gradient: a.to_vec(), intercept: b };
        let simplex: Vec<&[f64]> = p.iter().map(|q| q.as_slice()).collect();
        let exact = signed_face_integral(&face, &simplex);
        // Degree-2 exact rule (edge midpoints) summed over a 16-fold refinement.
        let f = |x: f64, y: f64| a[0] * x + a[1] * y + b - (x * x + y * y) / 2.0;
        let area = simplex_measure(&simplex);
        let n = 16;
        let mut total = 0.0;
        let pt = |i: f64, j: f64| {
            let (s, t) = (i / n as f64, j / n as f64);
            [p[0][0] + s * (p[1][0] - p[0][0]) + t * (p[2][0] - p[0][0]), p[0][1] + s * (p[1][1] - p[0][1]) + t * (p[2][1] - p[0][1])]
        };
        let mut tri = |q: [[f64; 2]; 3]| {
            let mids = [(0, 1), (1, 2), (0, 2)];
            total += mids.iter().map(|&(u, v)| f((q[u][0] + q[v][0]) / 2.0, (q[u][1] + q[v][1]) / 2.0)).sum::<f64>() / 3.0;
        };
        for i in 0..n {
            for j in 0..n - i {
                let (fi, fj) = (i as f64, j as f64);
                tri([pt(fi, fj), pt(fi + 1.0, fj), pt(fi, fj + 1.0)]);
                if i + j + 1 < n {
                    tri([pt(fi + 1.0, fj), pt(fi + 1.0, fj + 1.0), pt(fi, fj + 1.0)]);
                }
            }
        }
        let quad = total * area / (n * n) as f64;
        assert!((exact - quad).abs() < 1e-8 * (1.0 + exact.abs()), "{exact} {quad}");
    }
}

#[test]
fn festoon_dominates_face_paraboloids() {
    for m in 1..=2 {
        let w = LimitWindow::new(3.0, 2.0, m).unwrap();
        let pts = sample_limit_process(&w, &mut stream(14, 8, m as u32, 0));
        let f = festoon(&pts).unwrap();
        let mut rng = stream(14, 8, 10 + m as u32, 0);
        for _ in 0..2000 {
            let v: Vec<f64> = (0..m).map(|_| rng.random_range(-3.0..3.0)).collect();
            if let Ok(height) = f.festoon_height(&v) {
                // Every face's down-paraboloid stays below the festoon.
                for face in &f.faces {
                    assert!(height >= face.height(&v) - 1e-9);
                }
            }
        }
    }
}

#[test]
fn adding_a_point_above_keeps_faces() {
    let w = LimitWindow::new(3.0, 2.0, 1).unwrap();
    let pts = sample_limit_process(&w, &mut stream(15, 8, 0, 0));
    let f = festoon(&pts).unwrap();
    let v = f.apices[0].v[0] * 0.5 + f.apices[1].v[0] * 0.5;
    let above = f.festoon_height(&[v]).unwrap() + 1.0;
    let (bigger, _) = pts.with_inserted(ScaledPoint::new(vec![v], above)).unwrap();
    let g = festoon(&bigger).unwrap();
    assert_eq!(f.faces, g.faces);
}

#[test]
fn wide_windows_match_interval_test() {
    // Lifted heights reach L^2 / 2 ~ 1e5 here; extremality must still be
    // decided from local geometry.
    let window = LimitWindow::new(500.0, 2.0, 1).unwrap();
    let mut rng = stream(5, 8, 0, 0);
    let pts = sample_limit_process(&window, &mut rng).points;
    let lifted: Vec<(f64, f64)> = pts.iter().map(|p| (p.v[0], p.h + p.v[0] * p.v[0] / 2.0)).collect();
    let brute: Vec<usize> = (0..pts.len()).filter(|&i| is_extreme_lifted_1d(&lifted, i)).collect();
    assert!(brute.len() > 400);
    assert_eq!(extreme_indices(&pts, 1).unwrap(), brute);
}
