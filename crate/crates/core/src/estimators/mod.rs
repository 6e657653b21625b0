//! Replication engine and estimators for the limit constants and the
//! finite-size convergence statements.

mod angles;
mod finite;
mod palm;
mod replication;
mod report;
mod scans;
mod stats;

pub use angles::{internal_angle, AngleSource, InternalAngle, InternalAngleTable, MAX_SIMPLEX_DIM};
pub use finite::{
    expectation_gp_check, expectation_gp_check_run, hull_study, intensity_prefactor, mainexpect_check,
    mainexpect_prediction, predicted_gp_slope, scaled_variance_trace, simulate_hull, th5_measure_check, GpReport,
    HullExtras, HullSample, HullStudy, InputModel, MainExpectPoint, SphereFunction, Th5Point, TracePoint,
    TraceStatistic,
};
pub use palm::{
    ed_nd_estimator, sigma2_estimator, sigma2_unchecked, sphere_factor, two_point_correlation, ProposalParams,
    Sigma2Report, WindowPoint, WindowReport, E2_REFERENCE,
};
pub use replication::{run_replications, with_workers, ReplicateRow, ReplicationPlan, ReplicationTable};
pub use report::{direct_face_variance, Constant, ConstantEntry, ConstantsReport, OverlapVerdict, Route, TraceRow};
pub use scans::{
    intensity_fit, paralem_scan, tail_scan, IntensityFit, ParalemRow, TailFunctional, TailReport, TailRow,
};
pub use stats::{
    correlation, linear_fit, mean, mean_estimate, normality_diagnostics, variance, variance_estimate, Estimate,
    LinearFit, NormalityReport,
};
