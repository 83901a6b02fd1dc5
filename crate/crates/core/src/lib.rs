//! Finite-truncation computations for groups acting on hyperbolic graphs:
//! Gromov products and hyperbolicity constants, classification and axes of
//! isometries, indices of compact open subgroups, scales, and the
//! pseudometric on directions.

pub mod commands;
pub mod cos;
pub mod directions;
pub mod error;
pub mod graph;
pub mod half;
pub mod instances;
pub mod isometry;
pub mod oracle;
pub mod profile;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use half::HalfInt;
pub use profile::TruncationProfile;
