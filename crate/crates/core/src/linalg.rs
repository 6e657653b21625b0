//! Small dense linear algebra on row-major `f64` buffers.
//!
//! Dimensions here never exceed ~8, so everything is hand-rolled Gaussian
//! elimination with partial pivoting.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm2(a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Determinant of an `n x n` row-major matrix. The buffer is consumed as
/// scratch space.
pub fn det_in_place(m: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(m.len(), n * n);
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for r in col + 1..n {
            let v = m[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            if f != 0.0 {
                for c in col..n {
                    m[r * n + c] -= f * m[col * n + c];
                }
            }
        }
    }
    det
}

pub fn det(m: &[f64], n: usize) -> f64 {
    let mut scratch = m.to_vec();
    det_in_place(&mut scratch, n)
}

/// Solves `A x = b` for square row-major `A`. Returns `None` when `A` is
/// numerically singular.
pub fn solve(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for r in col + 1..n {
            let v = m[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best <= 1e-14 * scale {
            return None;
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
            x.swap(col, piv);
        }
        let p = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            if f != 0.0 {
                for c in col..n {
                    m[r * n + c] -= f * m[col * n + c];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for c in col + 1..n {
            s -= m[col * n + c] * x[c];
        }
        x[col] = s / m[col * n + col];
    }
    Some(x)
}

/// Normal vector (not normalised) of the hyperplane through `d` points in
/// `R^d`, computed by cofactor expansion of the difference matrix.
pub fn hyperplane_normal(points: &[&[f64]]) -> Vec<f64> {
    let d = points.len();
    debug_assert!(d >= 1);
    if d == 1 {
        return vec![1.0];
    }
    let base = points[0];
    let rows: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, base)).collect();
    let m = d - 1;
    let mut minor = vec![0.0; m * m];
    let mut normal = vec![0.0; d];
    for (j, nj) in normal.iter_mut().enumerate() {
        for (r, row) in rows.iter().enumerate() {
            let mut c2 = 0;
            for (c, v) in row.iter().enumerate() {
                if c != j {
                    minor[r * m + c2] = *v;
                    c2 += 1;
                }
            }
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *nj = sign * det_in_place(&mut minor, m);
    }
    normal
}

/// Orthonormalises the rows of `vectors` in place (modified Gram-Schmidt).
/// Returns `false` if a row collapses below `tol`.
pub fn gram_schmidt(vectors: &mut [Vec<f64>], tol: f64) -> bool {
    for i in 0..vectors.len() {
        for j in 0..i {
            let (head, tail) = vectors.split_at_mut(i);
            let p = dot(&tail[0], &head[j]);
            for (t, h) in tail[0].iter_mut().zip(&head[j]) {
                *t -= p * h;
            }
        }
        let n = norm(&vectors[i]);
        if n <= tol {
            return false;
        }
        for v in vectors[i].iter_mut() {
            *v /= n;
        }
    }
    true
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Volume of the unit ball in `R^d`, `pi^{d/2} / Gamma(1 + d/2)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // kappa_0 = 1, kappa_1 = 2, kappa_d = 2 pi / d * kappa_{d-2}
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Surface area of the unit sphere in `R^d`, `d * kappa_d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}
