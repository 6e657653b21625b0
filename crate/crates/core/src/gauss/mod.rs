//! Gaussian samples, the scaling transform and finite-intensity functionals.

mod kubota;
mod paraboloid;
mod sample;
mod scaling;
mod scores;

pub use kubota::{intrinsic_volume, kubota_constant, KubotaEstimate, DEFAULT_SUBSPACES};
pub use paraboloid::{
    ideal_paraboloid_height, paraboloid_sup_distance, quasi_paraboloid_boundary, quasi_paraboloid_height, Direction,
};
pub use sample::{sample_binomial, sample_poisson_count, sample_poisson_gaussian, sample_poisson_gaussian_region};
pub use scaling::{critical_radius, exp_map, inv_exp_map, lambda0, sphere_distance, ScaledPoint, ScalingContext};
pub use scores::{
    defect_volume_scores, defect_volume_scores_of, facet_defects, kface_counts, kface_scores, kface_scores_of,
    total_kface_score, ScoreKind, ScoreRecord,
};
