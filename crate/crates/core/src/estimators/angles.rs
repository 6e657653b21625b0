//! Internal angles of regular simplices.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest simplex dimension covered by the table.
pub const MAX_SIMPLEX_DIM: usize = 4;

const MC_SAMPLES: usize = 2_000_000;

/// How an angle value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleSource {
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InternalAngle {
    pub value: f64,
    /// Zero for closed forms.
    pub std_error: f64,
    pub source: AngleSource,
}

/// Normalised internal angle `beta_{k,n}` of the regular `n`-simplex at a
/// `k`-face, `0 <= k <= n <= 4`.
///
/// Closed forms: `beta_{n,n} = 1` (the whole simplex), `beta_{n-1,n} = 1/2`,
/// `beta_{n-2,n} = arccos(1/n) / (2 pi)` (dihedral angle) and
/// `beta_{0,3} = (3 arccos(1/3) - pi) / (4 pi)` (spherical excess). The rest
/// use a fixed-seed Monte Carlo: with `z ~ N(0, I_{n+1})`, the angle at the
/// face spanned by the first `k+1` vertices equals
/// `P(z_j > mean(z) for every j > k)`.
pub fn internal_angle(k: usize, n: usize) -> Result<InternalAngle> {
    if n == 0 || n > MAX_SIMPLEX_DIM || k > n {
        return Err(Error::OutOfRange(format!("internal angle needs 0 <= k <= n, 1 <= n <= {MAX_SIMPLEX_DIM} (got k={k}, n={n})")));
    }
    let closed = |value| Ok(InternalAngle { value, std_error: 0.0, source: AngleSource::ClosedForm });
    match n - k {
        0 => closed(1.0),
        1 => closed(0.5),
        2 => closed((1.0 / n as f64).acos() / (2.0 * PI)),
        3 if n == 3 => closed((3.0 * (1.0f64 / 3.0).acos() - PI) / (4.0 * PI)),
        _ => Ok(monte_carlo_angle(k, n)),
    }
}

fn monte_carlo_angle(k: usize, n: usize) -> InternalAngle {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x616e_676c_6500 + (k * 16 + n) as u64);
    let mut z = vec![0.0; n + 1];
    let mut hits = 0usize;
    for _ in 0..MC_SAMPLES {
        z.iter_mut().for_each(|x| *x = StandardNormal.sample(&mut rng));
        let mean = z.iter().sum::<f64>() / (n + 1) as f64;
        if z[k + 1..].iter().all(|&x| x > mean) {
            hits += 1;
        }
    }
    let p = hits as f64 / MC_SAMPLES as f64;
    InternalAngle { value: p, std_error: (p * (1.0 - p) / MC_SAMPLES as f64).sqrt(), source: AngleSource::MonteCarlo }
}

/// `(k, n) -> beta_{k,n}` for every `0 <= k <= n <= 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InternalAngleTable {
    pub entries: BTreeMap<(usize, usize), InternalAngle>,
}

impl InternalAngleTable {
    pub fn build() -> Self {
        let mut entries = BTreeMap::new();
        for n in 1..=MAX_SIMPLEX_DIM {
            for k in 0..=n {
                entries.insert((k, n), internal_angle(k, n).expect("in range"));
            }
        }
        Self { entries }
    }

    /// `beta_{k, d-1}`, or `MissingBeta` when untabulated.
    pub fn beta(&self, k: usize, d_minus_1: usize) -> Result<f64> {
        self.entries.get(&(k, d_minus_1)).map(|a| a.value).ok_or(Error::MissingBeta { k, d_minus_1 })
    }
}
