//! Exact verification toolkit for singular-point counts on surfaces.
//!
//! The crate is organized bottom-up: [`lattice`] holds the exact integer and
//! rational kernel, [`toric`] handles complete two-dimensional fans,
//! [`fan_census`] counts cones of simplicial fans in any dimension,
//! [`surface`] does Picard-lattice bookkeeping for blow-ups and contractions,
//! [`wps`] audits singular strata of weighted hypersurfaces, and [`harness`]
//! ties them into scans and a registry of checked claims.

pub mod fan_census;
pub mod harness;
pub mod lattice;
pub mod surface;
pub mod toric;
pub mod wps;
