//! Named lattices.
//!
//! | name        | lattice                        |
//! |-------------|--------------------------------|
//! | `U`         | hyperbolic plane               |
//! | `A2`        | root lattice A₂, Gram [[2,−1],[−1,2]] |
//! | `E8`, `E8(-1)` | root lattice E₈ and its negative |
//! | `[n]`       | rank one, Gram [n]             |
//! | `I(p,q)`    | diagonal ⟨1⟩ᵖ ⊕ ⟨−1⟩^q         |
//! | `CubicH4`   | I(21,2)                        |
//! | `CubicPrim` | U² ⊕ E8² ⊕ A2                  |
//! | `Mukai`, `Lambda24` | U⁴ ⊕ E8(−1)²           |
//! | `OG10`      | U³ ⊕ E8(−1)² ⊕ A2(−1)          |
//! | `K3`        | U³ ⊕ E8(−1)²                   |
//! | `K3n(n)`    | U³ ⊕ E8(−1)² ⊕ [−2(n−1)], n ≥ 2 |
//! | `Lambda26`  | U⁵ ⊕ E8(−1)²                   |

use num_bigint::BigInt;

use crate::lattice::Lattice;
use crate::matrix::IntMatrix;
use crate::{Error, Result};

/// Names accepted by [`catalog`] without arguments.
pub const PLAIN_NAMES: &[&str] = &[
    "U", "A2", "E8", "E8(-1)", "CubicH4", "CubicPrim", "Mukai", "OG10", "K3", "Lambda24",
    "Lambda26",
];

pub fn hyperbolic() -> Lattice {
    Lattice::from_i64(&[&[0, 1], &[1, 0]]).expect("U").named("U")
}

pub fn a2() -> Lattice {
    Lattice::from_i64(&[&[2, -1], &[-1, 2]]).expect("A2").named("A2")
}

/// The E₈ root lattice as its Cartan matrix (Bourbaki labelling).
pub fn e8() -> Lattice {
    const EDGES: [(usize, usize); 7] = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    let mut g = IntMatrix::zeros(8, 8);
    for i in 0..8 {
        g[(i, i)] = BigInt::from(2);
    }
    for (i, j) in EDGES {
        g[(i, j)] = BigInt::from(-1);
        g[(j, i)] = BigInt::from(-1);
    }
    Lattice::new(g).expect("E8").named("E8")
}

pub fn e8_neg() -> Lattice {
    e8().rescale_int(-1).expect("E8(-1)").named("E8(-1)")
}

pub fn rank_one(n: i64) -> Result<Lattice> {
    Ok(Lattice::diagonal(&[BigInt::from(n)])?.named(format!("[{n}]")))
}

pub fn odd_unimodular(p: usize, q: usize) -> Lattice {
    let mut d = vec![BigInt::from(1); p];
    d.extend(std::iter::repeat_n(BigInt::from(-1), q));
    Lattice::diagonal(&d).expect("diagonal ±1").named(format!("I({p},{q})"))
}

/// U³ ⊕ E8(−1)², the K3 lattice.
pub fn k3() -> Lattice {
    hyperbolic().power(3).direct_sum(&e8_neg().power(2)).named("K3")
}

/// U³ ⊕ E8(−1)² ⊕ [−2(n−1)].
pub fn k3n(n: i64) -> Result<Lattice> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("K3n needs n >= 2, got {n}")));
    }
    Ok(k3().direct_sum(&rank_one(-2 * (n - 1))?).named(format!("K3n({n})")))
}

/// U⁴ ⊕ E8(−1)².
pub fn mukai() -> Lattice {
    hyperbolic().power(4).direct_sum(&e8_neg().power(2)).named("Mukai")
}

/// U³ ⊕ E8(−1)² ⊕ A2(−1).
pub fn og10() -> Lattice {
    k3().direct_sum(&a2().rescale_int(-1).expect("A2(-1)")).named("OG10")
}

/// U² ⊕ E8² ⊕ A2.
pub fn cubic_primitive() -> Lattice {
    hyperbolic().power(2).direct_sum(&e8().power(2)).direct_sum(&a2()).named("CubicPrim")
}

/// Looks up a lattice by name. Accepts the names in [`PLAIN_NAMES`] plus
/// `[n]`, `I(p,q)` and `K3n(n)`.
pub fn catalog(name: &str) -> Result<Lattice> {
    let unknown = || Error::UnknownName(name.to_string());
    let s: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let lat = match s.as_str() {
        "U" => hyperbolic(),
        "A2" => a2(),
        "E8" => e8(),
        "E8(-1)" => e8_neg(),
        "CubicH4" => odd_unimodular(21, 2).named("CubicH4"),
        "CubicPrim" => cubic_primitive(),
        "Mukai" => mukai(),
        "Lambda24" => mukai().named("Lambda24"),
        "OG10" => og10(),
        "K3" => k3(),
        "Lambda26" => hyperbolic().power(5).direct_sum(&e8_neg().power(2)).named("Lambda26"),
        other => {
            if let Some(inner) = other.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                let n: i64 = inner.parse().map_err(|_| unknown())?;
                return rank_one(n);
            }
            if let Some(inner) = other.strip_prefix("I(").and_then(|r| r.strip_suffix(')')) {
                let (p, q) = inner.split_once(',').ok_or_else(unknown)?;
                let p: usize = p.parse().map_err(|_| unknown())?;
                let q: usize = q.parse().map_err(|_| unknown())?;
                return Ok(odd_unimodular(p, q));
            }
            if let Some(inner) = other.strip_prefix("K3n(").and_then(|r| r.strip_suffix(')')) {
                let n: i64 = inner.parse().map_err(|_| unknown())?;
                return k3n(n);
            }
            return Err(unknown());
        }
    };
    Ok(lat)
}
