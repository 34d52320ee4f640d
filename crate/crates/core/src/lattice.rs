//! Integral lattices given by a Gram matrix.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::{IntMatrix, RatMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Numbers of positive and negative directions of a real quadratic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
}

impl Signature {
    pub fn new(pos: usize, neg: usize) -> Self {
        Signature { pos, neg }
    }

    pub fn swapped(self) -> Self {
        Signature { pos: self.neg, neg: self.pos }
    }

    pub fn rank(self) -> usize {
        self.pos + self.neg
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.pos, self.neg)
    }
}

/// A free ℤ-module with a nondegenerate symmetric integer bilinear form.
///
/// The form is stored as its Gram matrix in a fixed basis. Vectors are
/// integer coordinate columns in that basis. The zero lattice (rank 0) is
/// allowed and has determinant 1.
#[derive(Clone)]
pub struct Lattice {
    gram: IntMatrix,
    name: Option<String>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for Lattice {}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(n) => write!(f, "Lattice({n}: {})", self.gram),
            None => write!(f, "Lattice({})", self.gram),
        }
    }
}

impl Lattice {
    /// Validates a Gram matrix: square, symmetric and nondegenerate.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::NotSquare);
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if gram.det().is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(Lattice { gram, name: None })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Error::NotSquare);
        }
        Lattice::new(IntMatrix::from_i64_rows(rows))
    }

    /// Diagonal lattice `[d₁] ⊕ … ⊕ [dₖ]`.
    pub fn diagonal(entries: &[BigInt]) -> Result<Self> {
        Lattice::new(IntMatrix::diagonal(entries))
    }

    pub fn zero() -> Self {
        Lattice { gram: IntMatrix::zeros(0, 0), name: None }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det()
    }

    /// `|det gram|`, the order of the discriminant group.
    pub fn disc(&self) -> BigInt {
        self.det().abs()
    }

    pub fn is_unimodular(&self) -> bool {
        self.disc().is_one()
    }

    /// Orthogonal direct sum; Gram matrices are placed block-diagonally.
    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice { gram: self.gram.block_diag(&other.gram), name: None }
    }

    /// The `k`-fold orthogonal sum of `self` (the zero lattice for `k = 0`).
    pub fn power(&self, k: usize) -> Lattice {
        (0..k).fold(Lattice::zero(), |acc, _| acc.direct_sum(self))
    }

    /// `L(q)`: the Gram matrix multiplied entrywise by `q`.
    ///
    /// Fails unless every scaled entry is an integer.
    pub fn rescale(&self, q: &BigRational) -> Result<Lattice> {
        if q.is_zero() {
            return Err(Error::ZeroScale);
        }
        let scaled = self.gram.to_rational().map(|x| x * q);
        let gram = scaled.to_integer().ok_or_else(|| Error::NonIntegralRescale(q.to_string()))?;
        Ok(Lattice { gram, name: None })
    }

    pub fn rescale_int(&self, n: i64) -> Result<Lattice> {
        self.rescale(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Even iff every diagonal Gram entry is even.
    pub fn parity(&self) -> Parity {
        if (0..self.rank()).all(|i| self.gram[(i, i)].is_even()) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// Signature by exact congruence diagonalization over ℚ.
    pub fn signature(&self) -> Signature {
        let n = self.rank();
        let mut a: RatMatrix = self.gram.to_rational();
        let (mut pos, mut neg) = (0, 0);
        for k in 0..n {
            if a[(k, k)].is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !a[(j, j)].is_zero()) {
                    a.swap_rows(k, j);
                    a.swap_cols(k, j);
                } else {
                    // all remaining diagonal entries vanish; pair with an off-diagonal partner
                    let j = (k + 1..n)
                        .find(|&j| !a[(k, j)].is_zero())
                        .expect("nondegenerate Gram has a nonzero pairing");
                    for c in 0..n {
                        let v = a[(j, c)].clone();
                        a[(k, c)] += v;
                    }
                    for r in 0..n {
                        let v = a[(r, j)].clone();
                        a[(r, k)] += v;
                    }
                }
            }
            let piv = a[(k, k)].clone();
            debug_assert!(!piv.is_zero());
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = &a[(i, k)] / &piv;
                for c in k..n {
                    let d = &f * &a[(k, c)];
                    a[(i, c)] -= d;
                }
                for r in k..n {
                    let d = &f * &a[(r, k)];
                    a[(r, i)] -= d;
                }
            }
            if piv.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        Signature { pos, neg }
    }

    pub fn is_definite(&self) -> bool {
        let s = self.signature();
        s.pos == 0 || s.neg == 0
    }

    pub fn is_indefinite(&self) -> bool {
        let s = self.signature();
        s.pos > 0 && s.neg > 0
    }

    fn check_len(&self, v: &[BigInt]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a lattice of rank {}",
                v.len(),
                self.rank()
            )));
        }
        Ok(())
    }

    /// `v · w`.
    pub fn pair(&self, v: &[BigInt], w: &[BigInt]) -> Result<BigInt> {
        self.check_len(v)?;
        self.check_len(w)?;
        Ok(self.gram.pair(v, w))
    }

    /// `v²`.
    pub fn square(&self, v: &[BigInt]) -> Result<BigInt> {
        self.pair(v, v)
    }

    /// `gcd { v·w : w ∈ L }`, the gcd of the entries of `gram · v`.
    pub fn divisibility(&self, v: &[BigInt]) -> Result<BigInt> {
        self.check_len(v)?;
        if v.iter().all(Zero::is_zero) {
            return Err(Error::ZeroVector);
        }
        Ok(self.gram.mul_vec(v).iter().fold(BigInt::zero(), |g, x| g.gcd(x)))
    }

    /// The lattice in the basis given by the columns of `p`: Gram `pᵀ·G·p`.
    ///
    /// `p` must be unimodular for the result to be the same lattice.
    pub fn change_basis(&self, p: &IntMatrix) -> Result<Lattice> {
        if p.rows() != self.rank() || !p.is_square() {
            return Err(Error::DimensionMismatch("basis change shape".into()));
        }
        if !p.det().abs().is_one() {
            return Err(Error::InvalidArgument("basis change is not unimodular".into()));
        }
        Ok(Lattice { gram: &(&p.transpose() * &self.gram) * p, name: self.name.clone() })
    }
}
