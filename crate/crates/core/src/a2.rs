//! Primitive vectors of A₂ and their orthogonal complements.
//!
//! For `v = a·e₁ + b·e₂` with `p = 2a − b`, `q = 2b − a` and `g = gcd(p, q)`,
//! the complement `v⊥` is generated by `u = ±(q/g, −p/g)` and
//! `u² = 3v²/g²`; since `g ∈ {1, 3}` this is `v²/3` when `3 | v²` and `3v²`
//! otherwise.

use std::fmt;

use num_integer::Integer;
use serde::Serialize;

pub use crate::isometry::definite_isometries;
use crate::catalog::a2;
use crate::isometry::{Isometry, DEFAULT_ISOMETRY_CAP};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct A2Vector {
    pub a: i64,
    pub b: i64,
}

/// Which closed form applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `3 | v²`, `g = 3`, `u² = v²/3`.
    #[serde(rename = "v2/3")]
    Third,
    /// `3 ∤ v²`, `g = 1`, `u² = 3v²`.
    #[serde(rename = "3v2")]
    Triple,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Third => "v²/3",
            Branch::Triple => "3v²",
        })
    }
}

impl A2Vector {
    pub fn new(a: i64, b: i64) -> Self {
        A2Vector { a, b }
    }

    /// `v² = 2a² − 2ab + 2b²`.
    pub fn square(self) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        2 * a * a - 2 * a * b + 2 * b * b
    }

    /// `v·w` for the A₂ Gram matrix.
    pub fn dot(self, w: A2Vector) -> i128 {
        let (a, b, c, d) = (self.a as i128, self.b as i128, w.a as i128, w.b as i128);
        2 * a * c - a * d - b * c + 2 * b * d
    }

    pub fn content(self) -> i64 {
        self.a.gcd(&self.b)
    }

    pub fn is_primitive(self) -> bool {
        self.content() == 1
    }

    /// `v / content(v)`; errors on the zero vector.
    pub fn primitive_part(self) -> Result<A2Vector> {
        let c = self.content();
        if c == 0 {
            return Err(Error::ZeroVector);
        }
        Ok(A2Vector { a: self.a / c, b: self.b / c })
    }

    fn check(self) -> Result<()> {
        if self.a == 0 && self.b == 0 {
            return Err(Error::ZeroVector);
        }
        if !self.is_primitive() {
            return Err(Error::NotPrimitive(self.to_string()));
        }
        Ok(())
    }

    /// `(p, q, g)` with `g > 0`.
    pub fn pqg(self) -> (i128, i128, i128) {
        let (a, b) = (self.a as i128, self.b as i128);
        let p = 2 * a - b;
        let q = 2 * b - a;
        (p, q, p.gcd(&q))
    }

    pub fn coords(self) -> [i64; 2] {
        [self.a, self.b]
    }
}

impl fmt::Display for A2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// The generator of `v⊥` with `x > 0`, or `x = 0` and `y > 0`.
pub fn a2_orthogonal_generator(v: A2Vector) -> Result<A2Vector> {
    v.check()?;
    let (p, q, g) = v.pqg();
    let (mut x, mut y) = (q / g, -p / g);
    if x < 0 || (x == 0 && y < 0) {
        x = -x;
        y = -y;
    }
    let x = i64::try_from(x).map_err(|_| Error::InvalidArgument("coordinates too large".into()))?;
    let y = i64::try_from(y).map_err(|_| Error::InvalidArgument("coordinates too large".into()))?;
    Ok(A2Vector { a: x, b: y })
}

/// The closed form for `u²`, with the branch taken.
pub fn a2_orthogonal_square_with_branch(v: A2Vector) -> Result<(i128, Branch)> {
    v.check()?;
    let s = v.square();
    Ok(if s % 3 == 0 { (s / 3, Branch::Third) } else { (3 * s, Branch::Triple) })
}

pub fn a2_orthogonal_square(v: A2Vector) -> Result<i128> {
    a2_orthogonal_square_with_branch(v).map(|(s, _)| s)
}

/// An isometry of A₂ taking `v` to `w`, found by searching all of O(A₂).
pub fn same_square_embedding_equivalence(v: A2Vector, w: A2Vector) -> Result<Option<Isometry>> {
    v.check()?;
    w.check()?;
    if v.square() != w.square() {
        return Ok(None);
    }
    let group = definite_isometries(&a2(), DEFAULT_ISOMETRY_CAP)?;
    let target = [w.a.into(), w.b.into()];
    Ok(group.into_iter().find(|g| g.apply(&[v.a.into(), v.b.into()]) == target))
}
