//! Visible lattice points and k-th-power-free integers.
//!
//! Both sets are uniformly discrete, have arbitrarily large holes (or
//! gaps) and yet a pure point diffraction spectrum. This crate builds the
//! sets, counts them in balls and boxes, and evaluates their densities,
//! autocorrelation weights and Bragg peak intensities twice: once from the
//! closed-form number-theoretic expressions and once from brute-force
//! counts and exponential sums, so that the two routes can be compared.
//!
//! Module map:
//!
//! - [`numtheory`]: sieved arithmetic functions, CRT and truncated Euler
//!   products for `zeta`, `1/zeta` and `xi`.
//! - [`lattice`]: lattice geometry, ball enumeration, content/visibility,
//!   holes.
//! - [`kfree`]: k-free membership, interval sieving and gaps.
//! - [`stats`]: empirical estimators with their closed-form counterparts.
//! - [`diffraction`]: Bragg peak supports, intensities and raster maps.
//! - [`export`]: CSV and PGM writers shared by the command-line tool.

pub mod diffraction;
pub mod error;
pub mod export;
pub mod kfree;
pub mod lattice;
pub mod numtheory;
pub mod stats;

pub use diffraction::{PeakLocation, RationalDualPoint, WeightedPeak};
pub use error::{Error, Result};
pub use lattice::{Content, Lattice, LatticeVector, PointFilter};
pub use numtheory::{ArithTables, SeriesKind, SeriesValue, Truncation};
pub use stats::{AutocorrEstimate, AutocorrMode, DensityEstimate, PointSet, Region};
