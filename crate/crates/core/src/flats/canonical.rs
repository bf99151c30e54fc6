use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{AffineFlat, FlatsError};
use crate::exact::{self, Point, Rational};

/// A line in normal form: `direction` has coprime integer entries with the first
/// nonzero one positive, and `base` is the point of the line nearest the origin.
/// Two lines are equal as sets iff their canonical forms are equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalLine {
    base: Point,
    direction: Point,
}

fn primitive_direction(u: &[Rational]) -> Point {
    let lcm = u.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = u.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|x| Rational::from(x / &gcd * &sign)).collect()
}

impl CanonicalLine {
    /// Panics on a zero direction.
    pub fn new(point: &[Rational], direction: &[Rational]) -> Self {
        assert!(direction.iter().any(|x| !x.is_zero()), "line direction must be nonzero");
        let u = primitive_direction(direction);
        let t = exact::dot(point, &u) / exact::norm_sq(&u);
        let base = point.iter().zip(&u).map(|(p, ui)| p - &t * ui).collect();
        CanonicalLine { base, direction: u }
    }

    pub fn through(p: &[Rational], q: &[Rational]) -> Self {
        CanonicalLine::new(p, &exact::sub(q, p))
    }

    /// Panics unless `f` is a line.
    pub fn from_flat(f: &AffineFlat) -> Self {
        assert_eq!(f.dim(), 1, "expected a line");
        CanonicalLine::new(f.base(), &f.directions()[0])
    }

    pub fn to_flat(&self) -> AffineFlat {
        AffineFlat::line(self.base.clone(), self.direction.clone()).expect("direction is nonzero")
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn direction(&self) -> &Point {
        &self.direction
    }

    pub fn ambient(&self) -> usize {
        self.base.len()
    }

    pub fn contains(&self, z: &[Rational]) -> bool {
        let v = exact::sub(z, &self.base);
        let t = exact::dot(&v, &self.direction) / exact::norm_sq(&self.direction);
        v.iter().zip(&self.direction).all(|(vi, ui)| *vi == &t * ui)
    }

    /// `base + t · direction`.
    pub fn at(&self, t: &Rational) -> Point {
        self.base.iter().zip(&self.direction).map(|(b, u)| b + t * u).collect()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, FlatsError> {
        let raw: CanonicalLine =
            serde_json::from_value(v.clone()).map_err(|_| FlatsError::NotALine(0))?;
        if raw.base.len() != raw.direction.len() {
            return Err(FlatsError::AmbientMismatch { expected: raw.base.len(), found: raw.direction.len() });
        }
        Ok(CanonicalLine::new(&raw.base, &raw.direction))
    }
}

impl fmt::Debug for CanonicalLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line({:?} + t{:?})", self.base, self.direction)
    }
}
