//! The parabolic limit model: Poisson process with intensity `e^h dh dv`,
//! its extreme points, the festoon and the limit score functionals.

mod diagnostics;
mod extreme;
mod festoon;
mod process;

pub use diagnostics::{
    ext_window_counts, height_from, height_functional, localization_radius, point_score, shocks_2d, truncation_audit,
    LocalizationRadius, Shocks, SpacingStats, SubWindow, TruncationAudit,
};
pub use extreme::{extreme_indices, extreme_points, extreme_points_oracle, is_extreme_lifted_1d, lifted_cloud, ORACLE_CAP};
pub use festoon::{
    defect_scores_from, festoon, festoon_of, kface_counts, kface_scores_from, limit_defect_volume_scores,
    limit_kface_scores, signed_face_integral, simplex_measure, up_envelope_height, Festoon, FestoonFace, LimitScore,
};
pub use process::{lift, sample_layer, sample_limit_process, InsertedPoint, LimitPointSet, LimitWindow};
