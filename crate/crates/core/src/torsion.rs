//! Discriminant groups and torsion quadratic forms.
//!
//! A [`TorsionQuadraticForm`] is a finite abelian group `⊕ ℤ/dᵢ` with a
//! symmetric bilinear form into ℚ/ℤ and, for forms coming from even
//! lattices, a quadratic refinement into ℚ/2ℤ. Elements are coordinate
//! vectors with `xᵢ ∈ [0, dᵢ)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::lattice::{Lattice, Parity};
use crate::matrix::{is_integral_vec, rat_mod, IntMatrix, RatMatrix};
use crate::snf::smith;
use crate::{Error, Result};

/// Maps a dual vector (rational coordinates in the source lattice basis)
/// to group coordinates: `cᵢ = dᵢ · (rowᵢ · x) mod dᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct CoordMap {
    rows: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionQuadraticForm {
    factors: Vec<BigInt>,
    lifts: Option<Vec<Vec<BigRational>>>,
    coords: Option<CoordMap>,
    bilinear: RatMatrix,
    quadratic: Option<Vec<BigRational>>,
    parity: Parity,
}

fn two() -> BigInt {
    BigInt::from(2)
}

impl TorsionQuadraticForm {
    /// `D(L) = L^∨ / L` read off the Smith form `U·G·V = diag(d)`: the classes
    /// of `V·eᵢ / dᵢ` for `dᵢ > 1` generate, with orders `dᵢ`.
    pub fn of_lattice(lat: &Lattice) -> Self {
        let g = lat.gram();
        let n = lat.rank();
        let s = smith(g);
        let idx: Vec<usize> = (0..n).filter(|&i| s.diagonal[i] > BigInt::one()).collect();
        let factors: Vec<BigInt> = idx.iter().map(|&i| s.diagonal[i].clone()).collect();
        let lifts: Vec<Vec<BigRational>> = idx
            .iter()
            .map(|&i| {
                s.right
                    .column(i)
                    .into_iter()
                    .map(|x| BigRational::new(x, s.diagonal[i].clone()))
                    .collect()
            })
            .collect();
        let gq = g.to_rational();
        let k = idx.len();
        let bilinear = RatMatrix::from_fn(k, k, |i, j| {
            rat_mod(&gq.pair(&lifts[i], &lifts[j]), &BigInt::one())
        });
        let parity = lat.parity();
        let quadratic = (parity == Parity::Even)
            .then(|| lifts.iter().map(|x| rat_mod(&gq.pair(x, x), &two())).collect());
        TorsionQuadraticForm {
            factors,
            lifts: Some(lifts),
            coords: Some(CoordMap { rows: s.right_inv.select_rows(&idx) }),
            bilinear,
            quadratic,
            parity,
        }
    }

    /// Builds an abstract form (no source lattice) and normalizes it to
    /// invariant factors. Values are reduced mod 1 / mod 2.
    pub fn from_parts(
        factors: Vec<BigInt>,
        bilinear: RatMatrix,
        quadratic: Option<Vec<BigRational>>,
    ) -> Result<Self> {
        let k = factors.len();
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if bilinear.rows() != k || bilinear.cols() != k {
            return bad(format!("bilinear matrix must be {k}x{k}"));
        }
        if !bilinear.is_symmetric() {
            return bad("bilinear matrix is not symmetric".into());
        }
        if factors.iter().any(|d| *d < two()) {
            return bad("invariant factors must be at least 2".into());
        }
        for i in 0..k {
            for j in 0..k {
                let v = &bilinear[(i, j)] * BigRational::from_integer(factors[i].clone());
                if !v.is_integer() {
                    return bad(format!("bilinear[{i}][{j}] is not killed by {}", factors[i]));
                }
            }
        }
        if let Some(q) = &quadratic {
            if q.len() != k {
                return bad(format!("quadratic values must have length {k}"));
            }
            for i in 0..k {
                if !(&q[i] - &bilinear[(i, i)]).is_integer() {
                    return bad(format!("quadratic[{i}] disagrees with bilinear[{i}][{i}] mod 1"));
                }
            }
        }
        let form = TorsionQuadraticForm {
            bilinear: bilinear.map(|x| rat_mod(x, &BigInt::one())),
            quadratic: quadratic.map(|q| q.iter().map(|x| rat_mod(x, &two())).collect()),
            parity: Parity::Even,
            factors,
            lifts: None,
            coords: None,
        };
        let parity = if form.quadratic.is_some() { Parity::Even } else { Parity::Odd };
        Ok(TorsionQuadraticForm { parity, ..form }.normalized())
    }

    pub fn trivial(parity: Parity) -> Self {
        TorsionQuadraticForm {
            factors: vec![],
            lifts: Some(vec![]),
            coords: None,
            bilinear: RatMatrix::zeros(0, 0),
            quadratic: (parity == Parity::Even).then(Vec::new),
            parity,
        }
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    /// Number of invariant factors, the minimal number of generators.
    pub fn length(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    /// Largest element order (1 for the trivial group).
    pub fn exponent(&self) -> BigInt {
        self.factors.iter().fold(BigInt::one(), |l, d| l.lcm(d))
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn bilinear(&self) -> &RatMatrix {
        &self.bilinear
    }

    pub fn quadratic(&self) -> Option<&[BigRational]> {
        self.quadratic.as_deref()
    }

    /// Generator lifts in `L ⊗ ℚ`, when the form came from a lattice.
    pub fn lifts(&self) -> Option<&[Vec<BigRational>]> {
        self.lifts.as_deref()
    }

    /// The form with bilinear and quadratic values negated, `q ↦ −q`.
    pub fn negate(&self) -> Self {
        let one = BigInt::one();
        TorsionQuadraticForm {
            bilinear: self.bilinear.map(|x| rat_mod(&-x, &one)),
            quadratic: self
                .quadratic
                .as_ref()
                .map(|q| q.iter().map(|x| rat_mod(&-x, &two())).collect()),
            ..self.clone()
        }
    }

    /// The underlying bilinear form, forgetting quadratic values. This is
    /// the structure the glue of an odd lattice respects.
    pub fn bilinear_only(&self) -> Self {
        TorsionQuadraticForm { quadratic: None, parity: Parity::Odd, ..self.clone() }
    }

    /// Orthogonal sum, renormalized to invariant factors (so ℤ/3 ⊕ ℤ/2 becomes ℤ/6).
    /// Lifts are concatenated block-wise when both sides carry them.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let parity = if self.parity == Parity::Even && other.parity == Parity::Even {
            Parity::Even
        } else {
            Parity::Odd
        };
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        let bilinear = self.bilinear.block_diag(&other.bilinear);
        let quadratic = match (parity, &self.quadratic, &other.quadratic) {
            (Parity::Even, Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        let lifts = match (&self.lifts, &other.lifts) {
            (Some(a), Some(b)) => {
                let (na, nb) = (a.first().map_or(0, Vec::len), b.first().map_or(0, Vec::len));
                let zero = BigRational::zero();
                let mut l: Vec<Vec<BigRational>> = a
                    .iter()
                    .map(|x| x.iter().cloned().chain(std::iter::repeat_n(zero.clone(), nb)).collect())
                    .collect();
                l.extend(b.iter().map(|y| {
                    std::iter::repeat_n(zero.clone(), na).chain(y.iter().cloned()).collect()
                }));
                Some(l)
            }
            _ => None,
        };
        TorsionQuadraticForm { factors, lifts, coords: None, bilinear, quadratic, parity }
            .normalized()
    }

    /// Re-expresses the form on generators whose orders are the invariant
    /// factors `d₁ | d₂ | …` (all > 1).
    pub fn normalized(&self) -> Self {
        let k = self.factors.len();
        let s = smith(&IntMatrix::diagonal(&self.factors));
        let keep: Vec<usize> = (0..k).filter(|&j| s.diagonal[j] > BigInt::one()).collect();
        // generator j of the new presentation has old coordinates column j of U⁻¹
        let cols: Vec<Vec<BigInt>> = keep.iter().map(|&j| s.left_inv.column(j)).collect();
        let factors: Vec<BigInt> = keep.iter().map(|&j| s.diagonal[j].clone()).collect();
        let m = cols.len();
        let bilinear = RatMatrix::from_fn(m, m, |a, b| self.b_value(&cols[a], &cols[b]));
        let quadratic = self
            .quadratic
            .as_ref()
            .map(|_| cols.iter().map(|c| self.q_value(c).expect("even form")).collect());
        let lifts = self.lifts.as_ref().map(|lifts| {
            cols.iter()
                .map(|c| {
                    let dim = lifts.first().map_or(0, Vec::len);
                    let mut acc = vec![BigRational::zero(); dim];
                    for (ci, l) in c.iter().zip(lifts) {
                        let ci = BigRational::from_integer(ci.clone());
                        for (a, x) in acc.iter_mut().zip(l) {
                            *a += &ci * x;
                        }
                    }
                    acc
                })
                .collect()
        });
        let coords = self.coords.as_ref().map(|cm| {
            let r = &s.right_inv * &cm.rows;
            CoordMap { rows: r.select_rows(&keep) }
        });
        TorsionQuadraticForm { factors, lifts, coords, bilinear, quadratic, parity: self.parity }
    }

    /// Reduces a coordinate vector into `[0, dᵢ)`.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter().zip(&self.factors).map(|(a, d)| a.mod_floor(d)).collect()
    }

    /// `b(x, y) ∈ [0, 1)`.
    pub fn b_value(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                acc += &self.bilinear[(i, j)] * BigRational::from_integer(xi * yj);
            }
        }
        rat_mod(&acc, &BigInt::one())
    }

    /// `q(x) ∈ [0, 2)`, only for forms from even lattices.
    pub fn q_value(&self, x: &[BigInt]) -> Option<BigRational> {
        let q = self.quadratic.as_ref()?;
        let mut acc = BigRational::zero();
        for i in 0..x.len() {
            if x[i].is_zero() {
                continue;
            }
            acc += &q[i] * BigRational::from_integer(&x[i] * &x[i]);
            for j in i + 1..x.len() {
                acc += &self.bilinear[(i, j)] * BigRational::from_integer(two() * &x[i] * &x[j]);
            }
        }
        Some(rat_mod(&acc, &two()))
    }

    /// Group coordinates of the class of a dual vector given in source
    /// coordinates. Fails if the form has no source lattice or `x ∉ L^∨`.
    pub fn coordinates(&self, x: &[BigRational]) -> Result<Vec<BigInt>> {
        let cm = self
            .coords
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("torsion form has no source lattice".into()))?;
        if x.len() != cm.rows.cols() && !self.factors.is_empty() {
            return Err(Error::DimensionMismatch("dual vector length".into()));
        }
        let mut out = Vec::with_capacity(self.factors.len());
        for (i, d) in self.factors.iter().enumerate() {
            let mut acc = BigRational::zero();
            for (r, xi) in cm.rows.row(i).iter().zip(x) {
                acc += BigRational::from_integer(r.clone()) * xi;
            }
            let y = acc * BigRational::from_integer(d.clone());
            if !y.is_integer() {
                return Err(Error::InvalidArgument("vector is not in the dual lattice".into()));
            }
            out.push(y.to_integer().mod_floor(d));
        }
        Ok(out)
    }

    /// A lift in `L ⊗ ℚ` of the element with coordinates `x`.
    pub fn lift(&self, x: &[BigInt]) -> Option<Vec<BigRational>> {
        let lifts = self.lifts.as_ref()?;
        let dim = lifts.first().map_or(0, Vec::len);
        let mut acc = vec![BigRational::zero(); dim];
        for (c, l) in x.iter().zip(lifts) {
            let c = BigRational::from_integer(c.clone());
            for (a, v) in acc.iter_mut().zip(l) {
                *a += &c * v;
            }
        }
        Some(acc)
    }

    /// Checks `dᵢ · liftᵢ ∈ L` for every generator (when lifts are present).
    pub fn lifts_are_torsion(&self) -> bool {
        match &self.lifts {
            None => true,
            Some(lifts) => lifts.iter().zip(&self.factors).all(|(l, d)| {
                let d = BigRational::from_integer(d.clone());
                is_integral_vec(&l.iter().map(|x| x * &d).collect::<Vec<_>>())
            }),
        }
    }

    pub(crate) fn table(&self) -> Option<FormTable> {
        FormTable::new(self)
    }
}

impl Lattice {
    /// The discriminant group `D(L)` with its form.
    pub fn discriminant_group(&self) -> TorsionQuadraticForm {
        TorsionQuadraticForm::of_lattice(self)
    }
}

impl fmt::Display for TorsionQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let groups: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", groups.join(" + "))?;
        match &self.quadratic {
            Some(q) => {
                let qs: Vec<String> = q.iter().map(ToString::to_string).collect();
                write!(f, " q=[{}]", qs.join(", "))
            }
            None => {
                let bs: Vec<String> =
                    (0..self.factors.len()).map(|i| self.bilinear[(i, i)].to_string()).collect();
                write!(f, " b=[{}]", bs.join(", "))
            }
        }
    }
}

/// Fixed-width view of a small form for exhaustive searches. Values are
/// scaled by a common denominator `n`: bilinear values live in `ℤ/n`,
/// quadratic values in `ℤ/2n`.
#[derive(Clone, Debug)]
pub(crate) struct FormTable {
    pub factors: Vec<u64>,
    pub n: u128,
    pub b: Vec<Vec<u128>>,
    pub q: Option<Vec<u128>>,
}

impl FormTable {
    fn new(form: &TorsionQuadraticForm) -> Option<FormTable> {
        let factors: Vec<u64> = form.factors.iter().map(|d| d.to_u64()).collect::<Option<_>>()?;
        let mut den = form.bilinear.common_denominator();
        if let Some(q) = &form.quadratic {
            for x in q {
                den = den.lcm(x.denom());
            }
        }
        let n = den.to_u128().filter(|&n| n < (1u128 << 40))?;
        let scale = |x: &BigRational, m: u128| -> u128 {
            let v = (x * BigRational::from_integer(BigInt::from(n))).to_integer();
            v.mod_floor(&BigInt::from(m)).to_u128().expect("reduced value fits")
        };
        let k = factors.len();
        let b = (0..k).map(|i| (0..k).map(|j| scale(&form.bilinear[(i, j)], n)).collect()).collect();
        let q = form.quadratic.as_ref().map(|q| q.iter().map(|x| scale(x, 2 * n)).collect());
        Some(FormTable { factors, n, b, q })
    }

    /// Re-expresses all values over the denominator `n`, a multiple of `self.n`.
    pub fn rescale_to(&mut self, n: u128) {
        let k = n / self.n;
        for row in &mut self.b {
            for v in row.iter_mut() {
                *v *= k;
            }
        }
        if let Some(q) = &mut self.q {
            for v in q.iter_mut() {
                *v *= k;
            }
        }
        self.n = n;
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&d| d as u128).product()
    }

    pub fn element(&self, mut idx: u128) -> Vec<u64> {
        self.factors
            .iter()
            .map(|&d| {
                let c = (idx % d as u128) as u64;
                idx /= d as u128;
                c
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn b(&self, x: &[u64], y: &[u64]) -> u128 {
        let mut acc = 0u128;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let prod = ((xi as u128 * yj as u128) % self.n) * self.b[i][j] % self.n;
                acc = (acc + prod) % self.n;
            }
        }
        acc
    }

    /// The self-value that must be preserved: `q(x)` mod `2n` for even forms,
    /// `b(x, x)` mod `n` otherwise.
    pub fn norm(&self, x: &[u64]) -> u128 {
        match &self.q {
            None => self.b(x, x),
            Some(q) => {
                let m = 2 * self.n;
                let mut acc = 0u128;
                for i in 0..x.len() {
                    if x[i] == 0 {
                        continue;
                    }
                    let xi = x[i] as u128;
                    acc = (acc + (xi * xi % m) * q[i] % m) % m;
                    for j in i + 1..x.len() {
                        let t = (2 * ((xi * x[j] as u128) % self.n) % m) * self.b[i][j] % m;
                        acc = (acc + t) % m;
                    }
                }
                acc
            }
        }
    }

    /// Adds `k · y` to `x` coordinatewise.
    pub fn add_scaled(&self, x: &[u64], y: &[u64], k: u64) -> Vec<u64> {
        x.iter()
            .zip(y)
            .zip(&self.factors)
            .map(|((&a, &b), &d)| {
                ((a as u128 + (k as u128 % d as u128) * b as u128) % d as u128) as u64
            })
            .collect()
    }

    /// Whether `d · x = 0`.
    pub fn killed_by(&self, x: &[u64], d: u64) -> bool {
        x.iter().zip(&self.factors).all(|(&c, &f)| (c as u128 * d as u128) % f as u128 == 0)
    }
}
