//! Orders, residues, Laurent jets and mapping degrees, exact for rational
//! carriers and by contour integrals for any carrier.

mod degree;
mod divisor;
mod jet;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cxpoly::RationalFn;
use crate::elliptic::{self, MeroExpr, SquareLattice};
use crate::{Error, Point, Result, C64};

pub use degree::{degree_numeric, fs_density, DegreeEstimate};
pub use divisor::{divisor_of, divisor_search, DivisorPoint};
pub use jet::{laurent_jet, order_of_form_at, order_of_function_at, residue_numeric, LaurentJet, LocalAnalyzer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Sphere,
    Torus,
}

/// The compact surface and its punctures.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub punctures: Vec<Point>,
}

impl DomainSpec {
    pub fn sphere(punctures: Vec<Point>) -> DomainSpec {
        DomainSpec { kind: DomainKind::Sphere, punctures }
    }

    pub fn torus(punctures: Vec<Point>) -> DomainSpec {
        DomainSpec { kind: DomainKind::Torus, punctures }
    }

    /// Euler characteristic of the compact surface.
    pub fn chi(&self) -> i32 {
        match self.kind {
            DomainKind::Sphere => 2,
            DomainKind::Torus => 0,
        }
    }

    pub fn is_torus(&self) -> bool {
        self.kind == DomainKind::Torus
    }

    /// Distance between finite points, modulo the lattice on the torus.
    pub fn distance(&self, a: C64, b: C64) -> f64 {
        match self.kind {
            DomainKind::Sphere => (a - b).norm(),
            DomainKind::Torus => elliptic::reduce(a - b).norm(),
        }
    }

    pub fn same_point(&self, a: &Point, b: &Point, tol: f64) -> bool {
        match (self.kind, a.finite(), b.finite()) {
            (DomainKind::Torus, Some(x), Some(y)) => {
                matches!((a, b), (Point::Exact(p), Point::Exact(q)) if p == q) || self.distance(x, y) <= tol
            }
            _ => a.same(b, tol),
        }
    }

    pub fn is_puncture(&self, p: &Point, tol: f64) -> bool {
        self.punctures.iter().any(|q| self.same_point(p, q, tol))
    }

    /// Finite puncture locations.
    pub fn finite_punctures(&self) -> Vec<C64> {
        self.punctures.iter().filter_map(Point::finite).collect()
    }
}

/// Whether a carrier is read as a function or as the coefficient of a 1-form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Function,
    Form,
}

/// A meromorphic function on the sphere (rational) or on the square torus.
#[derive(Clone, Debug, PartialEq)]
pub enum MeroFn {
    Rational(RationalFn),
    Elliptic(MeroExpr),
}

impl MeroFn {
    pub fn as_rational(&self) -> Option<&RationalFn> {
        match self {
            MeroFn::Rational(r) => Some(r),
            MeroFn::Elliptic(_) => None,
        }
    }

    pub fn derivative(&self) -> MeroFn {
        match self {
            MeroFn::Rational(r) => MeroFn::Rational(r.derivative()),
            MeroFn::Elliptic(e) => MeroFn::Elliptic(e.derivative()),
        }
    }

    /// Structurally zero (rational) or zero at several generic points (elliptic).
    pub fn is_zero(&self) -> bool {
        match self {
            MeroFn::Rational(r) => r.is_zero(),
            MeroFn::Elliptic(MeroExpr::Const(c)) => c.norm() == 0.0,
            MeroFn::Elliptic(e) => [C64::new(0.123, 0.317), C64::new(-0.291, 0.077), C64::new(0.41, -0.233)]
                .iter()
                .all(|&z| e.eval(z).is_ok_and(|v| v.norm() < 1e-13)),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            MeroFn::Rational(r) => r.is_constant(),
            MeroFn::Elliptic(e) => !e.uses_wp() && matches!(e, MeroExpr::Const(_)),
        }
    }

    /// Value at `z`; `PoleProximity` at or numerically at a pole.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let v = match self {
            MeroFn::Rational(r) => r.eval_c64(z),
            MeroFn::Elliptic(e) => e.eval(z).map_err(|_| Error::PoleProximity(format!("{z}")))?,
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::PoleProximity(format!("{z}")))
        }
    }

    /// Evaluate several carriers at one point, sharing the lattice sum.
    pub fn eval_all<const N: usize>(fs: [&MeroFn; N], z: C64) -> Result<[C64; N]> {
        let need = fs.iter().any(|f| matches!(f, MeroFn::Elliptic(e) if e.uses_wp()));
        let w = if need {
            Some(SquareLattice::get().wp_both(z)?)
        } else {
            None
        };
        let mut out = [C64::new(0.0, 0.0); N];
        for (o, f) in out.iter_mut().zip(fs) {
            *o = match (f, w) {
                (MeroFn::Elliptic(e), Some(w)) => e
                    .eval_given(z, w)
                    .map_err(|_| Error::PoleProximity(format!("{z}")))?,
                _ => f.eval(z)?,
            };
            if !(o.re.is_finite() && o.im.is_finite()) {
                return Err(Error::PoleProximity(format!("{z}")));
            }
        }
        Ok(out)
    }

    /// Value at a point of the sphere including `∞`, evaluated as a function.
    pub fn eval_point(&self, p: &Point) -> Result<C64> {
        match (self, p) {
            (MeroFn::Rational(r), _) => match r.value_at(p) {
                Some(v) => Ok(v.finite().expect("finite value")),
                None => Err(Error::PoleProximity(p.to_string())),
            },
            (MeroFn::Elliptic(_), Point::Infinity) => {
                Err(Error::UnsupportedType("the torus has no point at infinity".into()))
            }
            (MeroFn::Elliptic(_), _) => self.eval(p.finite().expect("finite")),
        }
    }
}

impl fmt::Display for MeroFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeroFn::Rational(r) => write!(f, "{r}"),
            MeroFn::Elliptic(e) => write!(f, "{e}"),
        }
    }
}
