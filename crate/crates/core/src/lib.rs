//! Exact max-plus arithmetic, finite-support idempotent measures, the
//! idempotent barycenter map, and constructive lifts for the maps `s` and `β`.

#![allow(clippy::result_large_err)]

pub mod approximation;
pub mod barycenter;
pub mod error;
pub mod geometry;
pub mod lifting;
pub mod measure;
pub mod params;
pub mod sampling;
pub mod scalar;
pub mod space;
pub mod vector;
pub mod verify;

pub use error::{Error, Result};
pub use measure::IdemMeasure;
pub use params::{s_point, ConvexParams};
pub use scalar::{Rational, TropScalar};
pub use space::{FiniteMeasure, PointMeasure};
pub use vector::TropVector;
