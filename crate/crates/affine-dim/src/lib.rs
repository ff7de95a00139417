//! Dimension theory for planar self-affine iterated function systems.
//!
//! The library works with finite families `{A_1, ..., A_N}` of contracting,
//! invertible 2x2 matrices. It computes:
//!
//! * the affinity dimension, as the root of a finite-depth subadditive
//!   pressure ([`pressure`]);
//! * backward-invariant cone certificates for dominated splitting, together
//!   with the strong-stable and stable direction fields ([`splitting`]);
//! * Gibbs measures for singular-value potentials on the symbolic space,
//!   entropy and Lyapunov exponents ([`thermo`]);
//! * Lyapunov / Ledrappier-Young dimension formulas and the class conditions
//!   under which they are known to be sharp ([`dimension`]);
//! * transversality certificates for translation families of the induced
//!   interval maps ([`transversality`]);
//! * attractor rendering and box-counting estimates ([`geometry`]).
//!
//! The `affine-dim` binary exposes the same pipeline as subcommands; see
//! [`cli`]. Runnable walkthroughs live in the crate `examples/` directory.

pub mod cli;
pub mod dimension;
mod error;
mod fit;
pub mod geometry;
pub mod matrix;
pub mod pressure;
pub mod report;
pub mod splitting;
pub mod system_spec;
pub mod thermo;
pub mod transversality;

pub use error::{Error, Result};
pub use geometry::AffineIfs;
pub use matrix::{Mat2, MatOrder, ProjPoint, Word};
pub use report::{build_full_report, FullReport, ReportOptions};
pub use splitting::SplittingCertificate;
pub use system_spec::SystemSpecFile;
pub use thermo::{CylinderMeasure, Potential};
