//! Exact polynomials and rational functions over the Gaussian rationals.

mod gauss;
mod poly;
mod rational;
mod roots;

pub use gauss::GaussRat;
pub use poly::CPoly;
pub use rational::{Antiderivative, LogTerm, RationalFn};
pub use roots::{aberth, root_points, roots, Root};
