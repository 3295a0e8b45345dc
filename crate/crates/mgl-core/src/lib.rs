//! Numerical toolkit around a uniqueness mechanism for minimal graphs.
//!
//! The crate verifies, at desk scale, the machinery behind a uniqueness
//! theorem for minimal maps into non-positively curved targets:
//!
//! * [`region`]: membership algebra for singular-value regions and slope
//!   bounds;
//! * [`majorization`]: weak-majorization bodies, their extreme points and
//!   hulls, and confinement checks;
//! * [`manifold`]: closed-form geometry of Euclidean and hyperbolic
//!   targets (exp/log, transport, curvature);
//! * [`grid`]: sampled maps on planar grids, Jacobian spectra, induced
//!   metrics, and graph volume;
//! * [`solver`]: a discrete Dirichlet solver for the minimal surface
//!   system and a volume-descent solver for curved targets;
//! * [`homotopy`]: geodesic homotopies between grid maps with spectrum
//!   traces and domination/convexity checks;
//! * [`variation`]: the volume functional along a homotopy, its first and
//!   second derivatives, and the five-term decomposition of the latter;
//! * [`report`]: deterministic CSV/JSON emission for all of the above.

pub mod error;
pub mod exec;
pub mod grid;
pub mod homotopy;
pub mod majorization;
pub mod manifold;
pub mod region;
pub mod report;
pub mod solver;
pub mod spectrum;
pub mod svd;
pub mod variation;

pub use error::{Error, Result};
pub use spectrum::{Spectrum, SquaredSpectrum};
