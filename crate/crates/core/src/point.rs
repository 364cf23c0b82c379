use std::fmt;

use serde::{Serialize, Serializer};

use crate::cxpoly::GaussRat;
use crate::C64;

/// A point of the Riemann sphere, or of the torus via a representative.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Infinity,
    Exact(GaussRat),
    Approx(C64),
}

impl Point {
    pub fn exact(re: i64, im: i64) -> Point {
        Point::Exact(GaussRat::from_ints(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn finite(&self) -> Option<C64> {
        match self {
            Point::Infinity => None,
            Point::Exact(g) => Some(g.to_c64()),
            Point::Approx(z) => Some(*z),
        }
    }

    pub fn as_exact(&self) -> Option<&GaussRat> {
        match self {
            Point::Exact(g) => Some(g),
            _ => None,
        }
    }

    /// Same point, comparing exact values exactly and anything else to `tol`.
    pub fn same(&self, o: &Point, tol: f64) -> bool {
        match (self, o) {
            (Point::Infinity, Point::Infinity) => true,
            (Point::Exact(a), Point::Exact(b)) => a == b,
            (a, b) => match (a.finite(), b.finite()) {
                (Some(x), Some(y)) => (x - y).norm() <= tol,
                _ => false,
            },
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "inf"),
            Point::Exact(g) => write!(f, "{g}"),
            Point::Approx(z) => {
                if z.im.abs() < 1e-14 {
                    write!(f, "{:.12}", z.re)
                } else {
                    write!(f, "{:.12}{:+.12}i", z.re, z.im)
                }
            }
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl From<GaussRat> for Point {
    fn from(g: GaussRat) -> Self {
        Point::Exact(g)
    }
}
