//! Property-based invariants of hulls, solid angles, the scaling transform
//! and limit-process extreme points.

use gauss_festoon::gauss::{sample_binomial, ScaledPoint, ScalingContext};
use gauss_festoon::hull::*;
use gauss_festoon::limit::{extreme_indices, lift};
use gauss_festoon::linalg::norm;
use gauss_festoon::rng::stream;
use proptest::prelude::*;

fn gaussian_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
    sample_binomial(n, d, &mut stream(seed, 0xA0, d as u32, n as u64))
}

fn scaled(cloud: &PointCloud, s: f64) -> PointCloud {
    PointCloud::new(cloud.dim(), cloud.coords().iter().map(|x| x * s).collect()).unwrap()
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Orthogonal matrix from Gram-Schmidt on a seeded Gaussian matrix.
fn random_rotation(d: usize, seed: u64) -> Vec<Vec<f64>> {
    let g = gaussian_cloud(d, d, seed ^ 0x5eed);
    let mut rows: Vec<Vec<f64>> = g.points().map(|p| p.to_vec()).collect();
    assert!(gauss_festoon::linalg::gram_schmidt(&mut rows, 1e-12));
    rows
}

fn rotate(cloud: &PointCloud, q: &[Vec<f64>]) -> PointCloud {
    let coords = cloud
        .points()
        .flat_map(|p| q.iter().map(move |row| row.iter().zip(p).map(|(a, b)| a * b).sum::<f64>()))
        .collect();
    PointCloud::new(cloud.dim(), coords).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euler_relation_holds(d in 2usize..=4, n in 8usize..160, seed in any::<u64>()) {
        let cloud = gaussian_cloud(n, d, seed);
        let lattice = face_lattice(&convex_hull(&cloud).unwrap());
        let expected = if d % 2 == 0 { 0 } else { 2 };
        prop_assert_eq!(lattice.euler_characteristic(), expected);
        prop_assert!(lattice.f(0) > d && lattice.f(0) <= n);
    }

    #[test]
    fn volume_scales_with_power_of_dimension(
        d in 2usize..=4, n in 10usize..120, seed in any::<u64>(), s in 0.1f64..10.0,
    ) {
        let cloud = gaussian_cloud(n, d, seed);
        let v = polytope_volume(&convex_hull(&cloud).unwrap(), &cloud);
        let big = scaled(&cloud, s);
        let vs = polytope_volume(&convex_hull(&big).unwrap(), &big);
        prop_assert!(v > 0.0);
        prop_assert!((vs / v / s.powi(d as i32) - 1.0).abs() < 1e-9, "ratio {}", vs / v);
    }

    #[test]
    fn facet_cone_solid_angles_sum_to_one(d in 2usize..=3, n in 10usize..200, seed in any::<u64>()) {
        let cloud = gaussian_cloud(n, d, seed);
        let hull = convex_hull(&cloud).unwrap();
        // The origin must be interior for the cones to tile space.
        prop_assume!(hull.contains_strictly(&vec![0.0; d], 1e-9));
        let total: f64 = hull
            .facets()
            .iter()
            .map(|f| {
                let pts: Vec<&[f64]> = f.vertices.iter().map(|&i| cloud.point(i)).collect();
                facet_cone_solid_angle(&pts).unwrap().fraction
            })
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "total {}", total);
    }

    #[test]
    fn lower_and_upper_facets_partition_the_hull(d in 2usize..=4, n in 10usize..150, seed in any::<u64>()) {
        let cloud = gaussian_cloud(n, d, seed);
        let hull = convex_hull(&cloud).unwrap();
        let lower = lower_hull(&cloud).unwrap();
        let down = hull.facets().iter().filter(|f| f.normal[d - 1] < 0.0).count();
        let up = hull.facets().iter().filter(|f| f.normal[d - 1] > 0.0).count();
        prop_assert_eq!(down + up, hull.facets().len());
        prop_assert_eq!(lower.facets.len(), down);
        for v in &lower.vertices {
            prop_assert!(hull.is_vertex(*v));
        }
    }

    #[test]
    fn scale_transform_round_trips(
        d in 2usize..=4, log_lambda in 6.0f64..40.0, seed in any::<u64>(), radius in 0.05f64..1.5,
    ) {
        let ctx = ScalingContext::new(d, log_lambda.exp()).unwrap();
        let pole = gaussian_cloud(1, d, seed ^ 1).coords().to_vec();
        let ctx = ctx.with_pole(&pole).unwrap();
        let dir = gaussian_cloud(1, d, seed).coords().to_vec();
        let len = norm(&dir);
        let x: Vec<f64> = dir.iter().map(|c| c / len * radius * ctx.r()).collect();
        let w = ctx.scale_transform(&x);
        prop_assert!(norm(&w.v) <= std::f64::consts::PI * ctx.r() + 1e-9);
        let back = ctx.inverse_scale_transform(&w);
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-9 * ctx.r(), "{:?} vs {:?}", x, back);
        }
    }

    #[test]
    fn extremes_invariant_under_paraboloid_symmetries(
        m in 1usize..=2, n in 3usize..40, seed in any::<u64>(),
        shift in -5.0f64..5.0, lift_by in -3.0f64..3.0, s in 0.3f64..3.0,
    ) {
        let raw = gaussian_cloud(n, m + 1, seed);
        let pts: Vec<ScaledPoint> = raw
            .points()
            .map(|p| ScaledPoint::new(p[..m].iter().map(|x| 3.0 * x).collect(), p[m]))
            .collect();
        let base = extreme_indices(&pts, m).unwrap();
        // Horizontal translation and a uniform height shift change lifted
        // heights by an affine function of v.
        let moved: Vec<ScaledPoint> = pts
            .iter()
            .map(|w| ScaledPoint::new(w.v.iter().map(|x| x + shift).collect(), w.h + lift_by))
            .collect();
        prop_assert_eq!(&extreme_indices(&moved, m).unwrap(), &base);
        // Parabolic dilation (v, h) -> (s v, s^2 h) scales the lift linearly.
        let dilated: Vec<ScaledPoint> = pts
            .iter()
            .map(|w| ScaledPoint::new(w.v.iter().map(|x| s * x).collect(), s * s * w.h))
            .collect();
        prop_assert_eq!(&extreme_indices(&dilated, m).unwrap(), &base);
        // Lifted points of extremes are hull vertices of the lifted cloud
        // (which needs d + 1 points to be full-dimensional).
        prop_assume!(n > m + 1);
        let lifted: Vec<Vec<f64>> = pts.iter().map(lift).collect();
        let cloud = PointCloud::from_points(m + 1, &lifted).unwrap();
        let hull = convex_hull(&cloud).unwrap();
        for i in &base {
            prop_assert!(hull.is_vertex(*i));
        }
    }
}

#[test]
fn hull_statistics_are_rotation_invariant_in_law() {
    // Two-sample KS test of f_0 and volume between Gaussian hulls and
    // randomly rotated copies of independent Gaussian hulls. The critical
    // value at level 0.001 is 1.949 * sqrt(2 / reps).
    let reps = 400;
    let (d, n) = (3, 200);
    let mut stats = [[Vec::new(), Vec::new()], [Vec::new(), Vec::new()]];
    for r in 0..reps {
        let plain = gaussian_cloud(n, d, 2 * r);
        let turned = rotate(&gaussian_cloud(n, d, 2 * r + 1), &random_rotation(d, r));
        for (side, cloud) in [plain, turned].iter().enumerate() {
            let hull = convex_hull(cloud).unwrap();
            stats[0][side].push(hull.vertices().len() as f64);
            stats[1][side].push(polytope_volume(&hull, cloud));
        }
    }
    let critical = 1.949 * (2.0 / reps as f64).sqrt();
    for (name, pair) in ["f_0", "volume"].iter().zip(stats.iter_mut()) {
        let [a, b] = pair;
        let ks = ks_statistic(a, b);
        assert!(ks < critical, "{name}: KS {ks:.4} exceeds {critical:.4}");
    }
}

#[test]
fn rotating_a_cloud_preserves_its_hull() {
    for seed in 0..20 {
        let cloud = gaussian_cloud(150, 3, seed);
        let turned = rotate(&cloud, &random_rotation(3, seed));
        let (h0, h1) = (convex_hull(&cloud).unwrap(), convex_hull(&turned).unwrap());
        assert_eq!(h0.vertices(), h1.vertices());
        assert_eq!(face_lattice(&h0).f_vector(), face_lattice(&h1).f_vector());
        let (v0, v1) = (polytope_volume(&h0, &cloud), polytope_volume(&h1, &turned));
        assert!((v0 - v1).abs() < 1e-10 * v0);
    }
}
