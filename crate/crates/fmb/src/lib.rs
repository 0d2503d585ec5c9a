//! Numerics for convex-body covariograms, radial and Fourier mean bodies,
//! polar mean zonoids, polar centroid bodies and intersection bodies, with a
//! verification catalog of the identities, inclusion chains and affine
//! isoperimetric inequalities these families satisfy.
//!
//! The library works with exactly representable bodies (boxes, ellipsoids,
//! planar polygons, simplices) in dimensions one to three, where every
//! quantity of interest reduces to low-dimensional quadrature.

pub mod error;
pub mod quad;
pub mod bodies;
pub mod covariogram;
pub mod fourier;
pub mod linalg;
pub mod meanbodies;
pub mod specfun;
pub mod starops;

pub use error::{Error, Result};
