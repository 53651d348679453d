//! Numerical semistability of pairs of vectors in rational representations,
//! weight polytopes under (conjugated) maximal tori, Kempf-Ness energies,
//! and their plane-curve application to K-energy lower bounds.

pub mod binary;
pub mod curves;
pub mod elimination;
pub mod error;
pub mod geometry;
pub mod kempf_ness;
pub mod matrix;
pub mod number;
pub mod poly;
pub mod stability;
pub mod weights;

pub use error::{Error, Result};
