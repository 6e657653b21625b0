//! Convex hull construction, face enumeration and hull measures.

mod cloud;
mod convex;
mod lattice;
mod lower;
mod measure;

pub use cloud::PointCloud;
pub use convex::{convex_hull, convex_hull_with, Facet, HullOptions, Polytope, DEFAULT_EPS};
pub use lattice::{face_lattice, FaceLattice};
pub use lower::{lower_hull, lower_hull_with, LowerHull};
pub use measure::{
    facet_cone_solid_angle, facet_cone_solid_angle_with, polytope_volume, simplex_volume,
    SolidAngle, DEFAULT_DIRECTION_BUDGET,
};
