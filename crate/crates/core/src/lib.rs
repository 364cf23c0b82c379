//! Weierstrass data for zero mean curvature faces in isotropic 3-space.
//!
//! A surface is given by a meromorphic function `g` and a 1-form `w = w(z) dz`
//! on a punctured sphere or on the square torus; it is recovered as
//! `f = Re ∫ (g, 1, -i) w`. The crate validates such data, classifies its ends
//! and singular points, checks the three degree inequalities with their
//! equality cases, and meshes the surface.
//!
//! Layering, bottom to top:
//!
//! * [`cxpoly`]: exact polynomials and rational functions over `Q(i)`.
//! * [`elliptic`]: `℘` and `℘'` for the lattice `Z + Zi`, expression trees.
//! * [`localanalysis`]: orders, residues, Laurent jets and degrees.
//! * [`wdata`]: the data object, validation, duals, pointwise geometry.
//! * [`ends`], [`sing`], [`osserman`]: classification and inequalities.
//! * [`surface`]: evaluation of `f` and its dual, meshes, OBJ export.
//! * [`fixtures`]: the built-in example catalogue and its file format.
//! * [`report`]: the serializable report document used by the CLI.

pub mod cxpoly;
pub mod elliptic;
pub mod ends;
pub mod error;
pub mod fixtures;
pub mod localanalysis;
pub mod osserman;
pub mod point;
pub mod quad;
pub mod report;
pub mod sing;
pub mod surface;
pub mod wdata;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use point::Point;
