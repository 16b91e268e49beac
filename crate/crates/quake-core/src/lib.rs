//! Geometry of hyperbolic surfaces with geodesic boundary: length functionals
//! for laminations with spiralling leaves, earthquake cocycles, and the
//! Weil-Petersson pairing, together with a small convex optimizer that locates
//! the unique minimum of the length functional for filling inputs.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! surface + laminations -> realize -> decompose -> length -> variation -> optimize
//! ```
//!
//! * [`minkowski`] — exact-formula kernel for the hyperboloid model of the
//!   hyperbolic plane inside three-dimensional Minkowski space.
//! * [`surface`] — Fenchel-Nielsen coordinates, holonomy representations,
//!   twist flows, the symplectic form, collar widths.
//! * [`lamination`] — weighted closed and spiralling leaves, signed masses,
//!   geodesic realization, filling tests.
//! * [`circuital`] — decomposition of balanced tuples into circuits of
//!   spiralling leaves over a signed multigraph.
//! * [`length`] — anchor points, circuit loops and the total length
//!   functional.
//! * [`variation`] — intersection angles, cosine sums, infinitesimal
//!   earthquake cocycles, first/second order identities, finite differences.
//! * [`optimize`] — minimization of the length functional, Hessian checks,
//!   recovery of the affine representation from a filling pair.

pub mod circuital;
pub mod json;
pub mod lamination;
pub mod length;
pub mod minkowski;
pub mod optimize;
pub mod surface;
pub mod variation;
pub mod words;

pub use minkowski::{HPoint, Isometry, MinkowskiVector, OrientedGeodesic};
pub use surface::{HolonomyRep, PantDecomposition, SurfaceTopology, TeichmullerPoint};
