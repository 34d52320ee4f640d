//! Isometries between lattices and enumeration of O(L) for definite L.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::lattice::Lattice;
use crate::matrix::{IntMatrix, RatMatrix};
use crate::torsion::TorsionQuadraticForm;
use crate::{Error, Result};

/// Default node budget for the isometry backtracking search.
pub const DEFAULT_ISOMETRY_CAP: u64 = 1_000_000;

/// An integer basis change `P` from `source` to `target` with
/// `Pᵀ · G_target · P = G_source` and `det P = ±1`. Column `i` of `P` is the
/// image of the `i`-th source basis vector in target coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    source: Lattice,
    target: Lattice,
    matrix: IntMatrix,
}

impl Isometry {
    pub fn new(source: Lattice, target: Lattice, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::InvalidIsometry(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        if !matrix.is_square() || !matrix.det().abs().is_one() {
            return Err(Error::InvalidIsometry("matrix is not unimodular".into()));
        }
        let pulled = &(&matrix.transpose() * target.gram()) * &matrix;
        if &pulled != source.gram() {
            return Err(Error::InvalidIsometry("matrix does not preserve the Gram matrix".into()));
        }
        Ok(Isometry { source, target, matrix })
    }

    pub fn identity(lat: &Lattice) -> Self {
        Isometry { source: lat.clone(), target: lat.clone(), matrix: IntMatrix::identity(lat.rank()) }
    }

    /// `−id`.
    pub fn negation(lat: &Lattice) -> Self {
        let n = lat.rank();
        let m = IntMatrix::from_fn(n, n, |i, j| if i == j { -BigInt::one() } else { BigInt::zero() });
        Isometry { source: lat.clone(), target: lat.clone(), matrix: m }
    }

    pub fn source(&self) -> &Lattice {
        &self.source
    }

    pub fn target(&self) -> &Lattice {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Isometry) -> Result<Isometry> {
        if first.target != self.source {
            return Err(Error::InvalidIsometry("composition of mismatched isometries".into()));
        }
        Ok(Isometry {
            source: first.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix * &first.matrix,
        })
    }

    pub fn inverse(&self) -> Isometry {
        let inv = self
            .matrix
            .to_rational()
            .inverse()
            .and_then(|m| m.to_integer())
            .expect("unimodular matrix has an integral inverse");
        Isometry { source: self.target.clone(), target: self.source.clone(), matrix: inv }
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(v)
    }

    pub fn apply_rational(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.matrix.to_rational().mul_vec(v)
    }

    /// The induced map `D(source) → D(target)` as a matrix whose column `i`
    /// holds the target coordinates of the image of generator `i`.
    pub fn discriminant_action(
        &self,
        ds: &TorsionQuadraticForm,
        dt: &TorsionQuadraticForm,
    ) -> Result<IntMatrix> {
        let lifts = ds
            .lifts()
            .ok_or_else(|| Error::InvalidArgument("source form has no lifts".into()))?;
        let cols: Vec<Vec<BigInt>> = lifts
            .iter()
            .map(|l| dt.coordinates(&self.apply_rational(l)))
            .collect::<Result<_>>()?;
        Ok(IntMatrix::from_fn(dt.length(), cols.len(), |i, j| cols[j][i].clone()))
    }
}

/// `G = Σ qᵢᵢ (xᵢ + Σ_{j>i} qᵢⱼ xⱼ)²` for positive definite `G`.
fn quadratic_completion(g: &IntMatrix) -> RatMatrix {
    let n = g.rows();
    let mut q = g.to_rational();
    for i in 0..n {
        for j in i + 1..n {
            let v = q[(i, j)].clone();
            q[(j, i)] = v;
            q[(i, j)] = &q[(i, j)] / &q[(i, i)];
        }
        for k in i + 1..n {
            for l in k..n {
                let d = &q[(k, i)] * &q[(i, l)];
                q[(k, l)] -= d;
            }
        }
    }
    q
}

/// All nonzero `x` with `xᵀ G x ≤ bound` for positive definite `G`
/// (Fincke–Pohst, exact). Errors with `TooLarge` once `cap` enumeration
/// nodes have been visited.
pub fn short_vectors(g: &IntMatrix, bound: &BigInt, cap: u64) -> Result<Vec<Vec<BigInt>>> {
    let n = g.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    let q = quadratic_completion(g);
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    let mut nodes = 0u64;
    let budget = BigRational::from_integer(bound.clone());
    enumerate_level(&q, n - 1, budget, &mut x, &mut out, &mut nodes, cap)?;
    Ok(out)
}

fn enumerate_level(
    q: &RatMatrix,
    i: usize,
    budget: BigRational,
    x: &mut Vec<BigInt>,
    out: &mut Vec<Vec<BigInt>>,
    nodes: &mut u64,
    cap: u64,
) -> Result<()> {
    let n = x.len();
    let mut center = BigRational::zero();
    for j in i + 1..n {
        center += &q[(i, j)] * BigRational::from_integer(x[j].clone());
    }
    let t = &budget / &q[(i, i)];
    let s = t.floor().to_integer().sqrt() + BigInt::one();
    let lo = (-&center).floor().to_integer() - &s;
    let hi = (-&center).ceil().to_integer() + &s;
    let mut xi = lo;
    while xi <= hi {
        let shifted = BigRational::from_integer(xi.clone()) + &center;
        let used = &q[(i, i)] * &shifted * &shifted;
        if used <= budget {
            *nodes += 1;
            if *nodes > cap {
                return Err(Error::TooLarge(cap));
            }
            x[i] = xi.clone();
            if i == 0 {
                if x.iter().any(|c| !c.is_zero()) {
                    out.push(x.clone());
                }
            } else {
                enumerate_level(q, i - 1, &budget - used, x, out, nodes, cap)?;
            }
        }
        xi += 1;
    }
    x[i] = BigInt::zero();
    Ok(())
}

/// The full isometry group O(L) of a definite lattice, by matching basis
/// images among vectors of the right norm. Negative definite inputs are
/// handled through the negated Gram matrix.
pub fn definite_isometries(lat: &Lattice, cap: u64) -> Result<Vec<Isometry>> {
    let n = lat.rank();
    if n == 0 {
        return Ok(vec![Isometry::identity(lat)]);
    }
    let sig = lat.signature();
    let g = if sig.neg == 0 {
        lat.gram().clone()
    } else if sig.pos == 0 {
        lat.gram().map(|x| -x)
    } else {
        return Err(Error::NotDefinite);
    };
    let bound = (0..n).map(|i| g[(i, i)].clone()).max().expect("rank > 0");
    let vecs = short_vectors(&g, &bound, cap)?;
    let norms: Vec<BigInt> = vecs.iter().map(|v| g.pair(v, v)).collect();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..vecs.len()).filter(|&k| norms[k] == g[(i, i)]).collect())
        .collect();

    // |x·y| ≤ bound for candidates, so the pairing table fits in i64 whenever the bound does
    let small = |x: &BigInt| x.to_i64().ok_or(Error::TooLarge(cap));
    let gram: Vec<Vec<i64>> =
        (0..n).map(|i| (0..n).map(|j| small(&g[(i, j)])).collect()).collect::<Result<_>>()?;
    let table: Vec<Vec<i64>> = vecs
        .iter()
        .map(|x| {
            let gx = g.mul_vec(x);
            vecs.iter().map(|y| small(&y.iter().zip(&gx).map(|(a, b)| a * b).sum())).collect()
        })
        .collect::<Result<_>>()?;

    let search = Backtrack { gram: &gram, table: &table, candidates: &candidates, cap };
    let mut images: Vec<usize> = Vec::with_capacity(n);
    let mut found = Vec::new();
    let mut nodes = 0u64;
    search.run(&mut images, &mut found, &mut nodes)?;
    found
        .into_iter()
        .map(|cols: Vec<usize>| {
            let m = IntMatrix::from_fn(n, n, |r, c| vecs[cols[c]][r].clone());
            Isometry::new(lat.clone(), lat.clone(), m)
        })
        .collect()
}

struct Backtrack<'a> {
    gram: &'a [Vec<i64>],
    table: &'a [Vec<i64>],
    candidates: &'a [Vec<usize>],
    cap: u64,
}

impl Backtrack<'_> {
    fn run(&self, images: &mut Vec<usize>, found: &mut Vec<Vec<usize>>, nodes: &mut u64) -> Result<()> {
        let i = images.len();
        if i == self.candidates.len() {
            found.push(images.clone());
            return Ok(());
        }
        for &k in &self.candidates[i] {
            let ok = images.iter().enumerate().all(|(j, &kj)| self.table[k][kj] == self.gram[i][j]);
            if !ok {
                continue;
            }
            *nodes += 1;
            if *nodes > self.cap {
                return Err(Error::TooLarge(self.cap));
            }
            images.push(k);
            self.run(images, found, nodes)?;
            images.pop();
        }
        Ok(())
    }
}
