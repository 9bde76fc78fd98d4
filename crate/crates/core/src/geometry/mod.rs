//! Tropical polytopes, extremal points, affine maps and the two
//! non-openness certificates.

pub mod affine;
pub mod certificate;
pub mod extremal;
pub mod polytope;
pub mod svg;

pub use affine::{affine_check, affine_check_on, AffineCounterexample, AffineVerdict};
pub use certificate::{certify_id_oplus_not_open, certify_y_beta_not_open, replay, Certificate, Witness};
pub use extremal::{check_extremal_points, extremal_points, find_decomposition, Decomposition, ExtremalCheck};
pub use polytope::{coefficient_levels, hull_membership, Membership, TropPolytope};
