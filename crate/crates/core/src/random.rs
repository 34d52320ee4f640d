//! Seeded generators of lattices and sublattices for property tests and
//! the verification suite.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{e8, hyperbolic, odd_unimodular};
use crate::embed::{glue_data, saturate, PrimitiveSublattice};
use crate::lattice::Lattice;
use crate::matrix::IntMatrix;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A product of `steps` random elementary matrices `I ± E_ij`, with an
/// occasional row swap.
pub fn random_unimodular(rng: &mut Rng, n: usize, steps: usize) -> IntMatrix {
    let mut p = IntMatrix::identity(n);
    if n < 2 {
        return p;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        if rng.gen_bool(0.1) {
            p.swap_rows(i, j);
            continue;
        }
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        for c in 0..n {
            let d = &p[(j, c)] * BigInt::from(s);
            p[(i, c)] += d;
        }
    }
    p
}

/// A random nondegenerate symmetric Gram matrix of rank `1..=max_rank`
/// with entries in `[-3, 3]`.
pub fn random_lattice(rng: &mut Rng, max_rank: usize) -> Lattice {
    let n = rng.gen_range(1..=max_rank.max(1));
    loop {
        let mut g = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = BigInt::from(rng.gen_range(-3i64..=3));
                g[(i, j)] = x.clone();
                g[(j, i)] = x;
            }
        }
        if let Ok(l) = Lattice::new(g) {
            return l;
        }
    }
}

/// A primitive sublattice of `m` of random rank `1..rank(m)` (or `1` when
/// `m` has rank one) whose complement is nondegenerate.
pub fn random_primitive_sublattice(rng: &mut Rng, m: &Lattice) -> PrimitiveSublattice {
    let n = m.rank();
    loop {
        let k = if n == 1 { 1 } else { rng.gen_range(1..n) };
        let rows: Vec<Vec<BigInt>> = (0..k)
            .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-2i64..=2))).collect())
            .collect();
        if rows.iter().all(|r| r.iter().all(Zero::is_zero)) {
            continue;
        }
        let Ok(s) = saturate(m, &rows) else { continue };
        if s.is_nondegenerate() && glue_data(m, &s).is_ok() {
            return s;
        }
    }
}

/// A unimodular lattice of rank `2..=max_rank` (at least 2) built from `U`,
/// `E8` and `I(p,q)` summands, in a randomly changed basis.
pub fn random_unimodular_lattice(rng: &mut Rng, max_rank: usize) -> Lattice {
    let max_rank = max_rank.max(2);
    let n = rng.gen_range(2..=max_rank);
    let mut parts: Vec<Lattice> = Vec::new();
    let mut left = n;
    if left >= 8 && rng.gen_bool(0.4) {
        let e = e8();
        parts.push(if rng.gen_bool(0.5) { e } else { e.rescale_int(-1).expect("E8(-1)") });
        left -= 8;
    }
    while left >= 2 && rng.gen_bool(0.5) {
        parts.push(hyperbolic());
        left -= 2;
    }
    if left > 0 {
        let p = rng.gen_range(0..=left);
        parts.push(odd_unimodular(p, left - p));
    }
    parts.shuffle(rng);
    let base = parts.iter().fold(Lattice::zero(), |acc, l| acc.direct_sum(l));
    let p = random_unimodular(rng, n, 2 * n);
    base.change_basis(&p.transpose()).expect("unimodular change of basis")
}

/// Largest absolute entry, for keeping random instances small.
pub fn height(m: &IntMatrix) -> BigInt {
    let mut h = BigInt::zero();
    for r in m.to_rows() {
        for x in r {
            if x.abs() > h {
                h = x.abs();
            }
        }
    }
    h
}
