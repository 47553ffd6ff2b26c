//! Equivariant rank-2 vector bundles and torsion-free sheaves on smooth
//! complete toric surfaces.
//!
//! Bundles are described by one filtration of a two-dimensional vector space
//! per ray of the fan. From that data the crate builds Euler-type monomial
//! resolutions, decides local freeness of monomial presentations, computes
//! biduals and the skyscraper cokernel `E'' / E`, and classifies sheaves by
//! GIT stability of the associated configurations of points on the
//! projective line.
//!
//! The linear algebra is generic over [`scalar::Field`]; the geometric layers
//! use the exact rational instantiation through the aliases below.

pub mod bundle;
pub mod cli;
pub mod exactlin;
pub mod fan;
pub mod gen;
pub mod git;
pub mod io;
pub mod resolution;
pub mod scalar;
pub mod sheaf;

pub use scalar::Rational;

/// Dense matrix over the rationals.
pub type Mat = exactlin::Matrix<Rational>;

/// Point of the projective line over the rationals.
pub type LinePoint = exactlin::ProjectiveLinePoint<Rational>;

/// Divisor coefficient vector `Σ d_ρ D_ρ`, one entry per ray.
pub type Divisor = Vec<i64>;
