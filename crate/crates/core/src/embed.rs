//! Primitive sublattices, orthogonal complements, gluing subgroups and
//! overlattice reconstruction, plus two arithmetic embedding obstructions.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::lattice::{Lattice, Parity};
use crate::matrix::{is_integral_vec, rat_mod, IntMatrix, RatMatrix};
use crate::snf::{hermite_rows, integer_kernel, saturation, smith, subgroup_order};
use crate::torsion::TorsionQuadraticForm;
use crate::{Error, Result};

/// A saturated sublattice of `ambient`, given by basis rows in ambient
/// coordinates. The rows are kept in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveSublattice {
    ambient: Lattice,
    basis: IntMatrix,
    induced_gram: IntMatrix,
}

impl PrimitiveSublattice {
    /// Wraps `basis` after checking the rows are independent and span a
    /// saturated sublattice.
    pub fn from_basis(ambient: &Lattice, basis: IntMatrix) -> Result<Self> {
        if basis.cols() != ambient.rank() {
            return Err(Error::DimensionMismatch(format!(
                "basis has {} columns, ambient rank is {}",
                basis.cols(),
                ambient.rank()
            )));
        }
        if basis.to_rational().rank() != basis.rows() {
            return Err(Error::InvalidArgument("basis rows are linearly dependent".into()));
        }
        let h = hermite_rows(&basis);
        if saturation(&basis) != h {
            return Err(Error::NotPrimitive("span is not saturated".into()));
        }
        Ok(Self::from_hnf(ambient, h))
    }

    fn from_hnf(ambient: &Lattice, basis: IntMatrix) -> Self {
        let induced_gram = ambient.gram().congruent_rows(&basis);
        PrimitiveSublattice { ambient: ambient.clone(), basis, induced_gram }
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn induced_gram(&self) -> &IntMatrix {
        &self.induced_gram
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.induced_gram.det().is_zero()
    }

    /// The sublattice as a lattice in its own basis.
    pub fn as_lattice(&self) -> Result<Lattice> {
        Lattice::new(self.induced_gram.clone())
    }

    /// Ambient coordinates of the sublattice vector with coordinates `x`.
    pub fn embed(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.basis.vec_mul(x)
    }
}

impl fmt::Display for PrimitiveSublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "basis {} gram {}", self.basis, self.induced_gram)
    }
}

/// The smallest primitive sublattice of `m` containing `span`.
pub fn saturate(m: &Lattice, span: &[Vec<BigInt>]) -> Result<PrimitiveSublattice> {
    let n = m.rank();
    if span.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!("span vectors must have length {n}")));
    }
    let a = IntMatrix::from_rows_with_cols(span.to_vec(), n)?;
    if a.is_zero() {
        return Err(Error::ZeroSpan);
    }
    Ok(PrimitiveSublattice::from_hnf(m, saturation(&a)))
}

/// `S⊥ = {x ∈ M : x·s = 0 for all s ∈ S}`. Errors when `S` (equivalently
/// `S⊥`) is degenerate.
pub fn orthogonal_complement(m: &Lattice, s: &PrimitiveSublattice) -> Result<PrimitiveSublattice> {
    check_ambient(m, s)?;
    if !s.is_nondegenerate() {
        return Err(Error::DegenerateComplement);
    }
    let bg = &s.basis * m.gram();
    let k = integer_kernel(&bg);
    let basis = if k.rows() == 0 { k } else { hermite_rows(&k) };
    let c = PrimitiveSublattice::from_hnf(m, basis);
    if !c.is_nondegenerate() {
        return Err(Error::DegenerateComplement);
    }
    Ok(c)
}

fn check_ambient(m: &Lattice, s: &PrimitiveSublattice) -> Result<()> {
    if s.ambient.gram() != m.gram() {
        return Err(Error::DimensionMismatch("sublattice lives in a different ambient".into()));
    }
    Ok(())
}

/// The gluing subgroup `G = M / (L ⊕ L⊥)` of a primitive nondegenerate
/// `L ⊂ M`, with explicit coset representatives and both discriminant maps.
#[derive(Clone, Debug)]
pub struct GlueData {
    pub ambient: Lattice,
    pub sublattice: PrimitiveSublattice,
    pub complement: PrimitiveSublattice,
    pub order: BigInt,
    /// Coset representatives as integer vectors of `M`.
    pub generators: Vec<Vec<BigInt>>,
    /// `generators[i] = a·B_L + c·B_⊥` with `(a, c)` reduced into `[0, 1)`.
    pub projections: Vec<(Vec<BigRational>, Vec<BigRational>)>,
    pub form_l: TorsionQuadraticForm,
    pub form_perp: TorsionQuadraticForm,
    /// Coordinates in `D(L)` of each generator's image.
    pub map_to_dl: Vec<Vec<BigInt>>,
    /// Coordinates in `D(L⊥)` of each generator's image.
    pub map_to_dperp: Vec<Vec<BigInt>>,
    /// Orders of the generators.
    pub generator_orders: Vec<BigInt>,
}

impl GlueData {
    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }

    /// `(a, c)` pairs suitable for [`overlattice_from_glue`].
    pub fn graph(&self) -> Vec<(Vec<BigRational>, Vec<BigRational>)> {
        self.projections.clone()
    }

    /// Stacked basis `[B_L; B_⊥]`.
    pub fn relation_matrix(&self) -> IntMatrix {
        self.sublattice
            .basis
            .vstack(&self.complement.basis)
            .expect("sublattice and complement share the ambient rank")
    }
}

pub fn glue_data(m: &Lattice, s: &PrimitiveSublattice) -> Result<GlueData> {
    let comp = orthogonal_complement(m, s)?;
    let l = s.as_lattice()?;
    let lp = comp.as_lattice()?;
    let r = s.basis.vstack(&comp.basis)?;
    let k = s.rank();
    let sf = smith(&r);
    let idx: Vec<usize> = (0..r.rows()).filter(|&j| sf.diagonal[j] > BigInt::one()).collect();
    let order: BigInt = sf.diagonal.iter().product();
    let rinv = r.to_rational().inverse().ok_or(Error::DegenerateComplement)?;
    let form_l = l.discriminant_group();
    let form_perp = lp.discriminant_group();

    let one = BigInt::one();
    let mut generators = Vec::new();
    let mut projections = Vec::new();
    let mut map_to_dl = Vec::new();
    let mut map_to_dperp = Vec::new();
    for &j in &idx {
        let g = sf.right_inv.row(j).to_vec();
        let coeffs = rinv.vec_mul(&g.iter().cloned().map(BigRational::from_integer).collect::<Vec<_>>());
        let a: Vec<BigRational> = coeffs[..k].iter().map(|x| rat_mod(x, &one)).collect();
        let c: Vec<BigRational> = coeffs[k..].iter().map(|x| rat_mod(x, &one)).collect();
        map_to_dl.push(form_l.coordinates(&a)?);
        map_to_dperp.push(form_perp.coordinates(&c)?);
        let ac: Vec<BigRational> = a.iter().chain(&c).cloned().collect();
        let rep = r
            .to_rational()
            .vec_mul(&ac)
            .into_iter()
            .map(|x| x.to_integer())
            .collect();
        debug_assert!(is_integral_vec(&r.to_rational().vec_mul(&ac)));
        generators.push(rep);
        projections.push((a, c));
    }
    let glue = GlueData {
        ambient: m.clone(),
        sublattice: s.clone(),
        complement: comp,
        order,
        generators,
        projections,
        generator_orders: idx.iter().map(|&j| sf.diagonal[j].clone()).collect(),
        form_l,
        form_perp,
        map_to_dl,
        map_to_dperp,
    };
    glue.check_invariants(&l, &lp)?;
    Ok(glue)
}

impl GlueData {
    fn check_invariants(&self, l: &Lattice, lp: &Lattice) -> Result<()> {
        let bad = |s: &str| Err(Error::InvariantViolated(s.into()));
        if &(&self.order * &self.order) * self.ambient.disc() != l.disc() * lp.disc() {
            return bad("|G|^2 disc M != disc L disc L-perp");
        }
        if subgroup_order(&self.map_to_dl, self.form_l.factors()) != self.order {
            return bad("glue map into D(L) is not injective");
        }
        if subgroup_order(&self.map_to_dperp, self.form_perp.factors()) != self.order {
            return bad("glue map into D(L-perp) is not injective");
        }
        let (gl, gp) = (l.gram().to_rational(), lp.gram().to_rational());
        let two = BigInt::from(2);
        for (i, (ai, ci)) in self.projections.iter().enumerate() {
            for (aj, cj) in &self.projections[i..] {
                let s = gl.pair(ai, aj) + gp.pair(ci, cj);
                if !s.is_integer() {
                    return bad("glue images do not have opposite bilinear values");
                }
            }
            if self.ambient.parity() == Parity::Even {
                let q = gl.pair(ai, ai) + gp.pair(ci, ci);
                if !rat_mod(&q, &two).is_zero() {
                    return bad("glue images do not have opposite quadratic values");
                }
            }
        }
        Ok(())
    }
}

/// An overlattice of `L ⊕ T` with its basis in `L ⊕ T` coordinates.
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: Lattice,
    /// Rows are the basis vectors, in rational `L ⊕ T` coordinates.
    pub basis: RatMatrix,
    pub index: BigInt,
}

/// The integral overlattice of `L ⊕ T` generated by the glue vectors
/// `(aᵢ, cᵢ)`. Each vector must lie in `L^∨ ⊕ T^∨`; the subgroup they
/// generate must be isotropic for the bilinear form (integral self-pairings)
/// and pair integrally. Parity of the result is read off its Gram matrix.
pub fn overlattice_from_glue(
    l: &Lattice,
    t: &Lattice,
    graph: &[(Vec<BigRational>, Vec<BigRational>)],
) -> Result<Overlattice> {
    let (k, r) = (l.rank(), t.rank());
    let n = k + r;
    let sum = l.direct_sum(t);
    let g = sum.gram().to_rational();
    let mut xs: Vec<Vec<BigRational>> = Vec::with_capacity(graph.len());
    for (a, c) in graph {
        if a.len() != k || c.len() != r {
            return Err(Error::DimensionMismatch(format!("glue pair must have sizes ({k}, {r})")));
        }
        let x: Vec<BigRational> = a.iter().chain(c).cloned().collect();
        if !is_integral_vec(&g.mul_vec(&x)) {
            return Err(Error::NonIntegralGlue(format!("{} is not in the dual", show(&x))));
        }
        xs.push(x);
    }
    // an odd M can contain an even L ⊕ T whose glue has odd squares
    let self_ok = |v: &BigRational| v.is_integer();
    for x in &xs {
        let v = g.pair(x, x);
        if !self_ok(&v) {
            return Err(Error::NotIsotropic(format!("{} has square {v}", show(x))));
        }
    }
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let b = g.pair(&xs[i], &xs[j]);
            if b.is_integer() {
                continue;
            }
            let s: Vec<BigRational> = xs[i].iter().zip(&xs[j]).map(|(p, q)| p + q).collect();
            if !self_ok(&g.pair(&s, &s)) {
                return Err(Error::NotIsotropic(format!("{} has square {}", show(&s), g.pair(&s, &s))));
            }
            return Err(Error::NonIntegralGlue(format!("glue vectors {i} and {j} pair to {b}")));
        }
    }

    let mut den = BigInt::one();
    for x in &xs {
        for c in x {
            den = den.lcm(c.denom());
        }
    }
    let dq = BigRational::from_integer(den.clone());
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { den.clone() } else { BigInt::zero() }).collect())
        .collect();
    rows.extend(xs.iter().map(|x| x.iter().map(|c| (c * &dq).to_integer()).collect()));
    let h = hermite_rows(&IntMatrix::from_rows_with_cols(rows, n)?);
    let basis = h.to_rational().map(|x| x / &dq);
    let gram = g
        .congruent_rows(&basis)
        .to_integer()
        .ok_or_else(|| Error::NonIntegralGlue("generated form is not integral".into()))?;
    let lattice = Lattice::new(gram)?;
    let index = num_traits::pow(den, n) / h.det().abs();
    Ok(Overlattice { lattice, basis, index })
}

fn show(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Reconstruction of `M` from `S`, `S⊥` and the glue graph.
#[derive(Clone, Debug)]
pub struct RoundTrip {
    pub overlattice: Overlattice,
    /// Rows: overlattice basis vectors in `M` coordinates. Integral,
    /// unimodular, and `P · G_M · Pᵀ` equals the overlattice Gram.
    pub basis_change: IntMatrix,
}

pub fn reconstruct(m: &Lattice, s: &PrimitiveSublattice) -> Result<RoundTrip> {
    let glue = glue_data(m, s)?;
    let overlattice =
        overlattice_from_glue(&s.as_lattice()?, &glue.complement.as_lattice()?, &glue.graph())?;
    let r = glue.relation_matrix().to_rational();
    let p = (&overlattice.basis * &r)
        .to_integer()
        .ok_or_else(|| Error::InvariantViolated("overlattice is not contained in M".into()))?;
    if !p.det().abs().is_one() {
        return Err(Error::InvariantViolated("overlattice differs from M".into()));
    }
    if &m.gram().congruent_rows(&p) != overlattice.lattice.gram() {
        return Err(Error::InvariantViolated("basis change does not preserve the form".into()));
    }
    Ok(RoundTrip { overlattice, basis_change: p })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Obstruction {
    Obstructed,
    Inconclusive,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Obstruction::Obstructed => "obstructed",
            Obstruction::Inconclusive => "inconclusive",
        })
    }
}

/// Length test for primitive embeddings of `T(n)` into a unimodular lattice
/// of rank `rank_ambient`: the complement would need a discriminant group
/// of length `l(D(T(n)))` on only `rank_ambient − rk T` generators.
pub fn unimodular_embedding_obstruction(
    t: &Lattice,
    n: i64,
    rank_ambient: usize,
) -> Result<Obstruction> {
    if n == 0 {
        return Err(Error::ZeroScale);
    }
    let scaled = t.rescale_int(n)?;
    if n.unsigned_abs() < 2 {
        return Ok(Obstruction::Inconclusive);
    }
    let length = scaled.discriminant_group().length() as i128;
    let room = rank_ambient as i128 - t.rank() as i128;
    Ok(if length > room { Obstruction::Obstructed } else { Obstruction::Inconclusive })
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Discriminants `t` admitting `t · s = p·m²` with the glue order `m`
/// dividing both `t` and `s`.
pub fn transcendental_disc_candidates(p: u64, m: u64) -> Result<BTreeSet<u64>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("glue order must be positive".into()));
    }
    let total = p as u128 * m as u128 * m as u128;
    let m128 = m as u128;
    let mut out = BTreeSet::new();
    // t = m·s with s | p·m, so only divisors of p·m need scanning
    let pm = p as u128 * m128;
    let mut d = 1u128;
    while d * d <= pm {
        if pm % d == 0 {
            for s in [d, pm / d] {
                let t = m128 * s;
                if total % t == 0 && (total / t) % m128 == 0 {
                    out.insert(u64::try_from(t).map_err(|_| Error::TooLarge(u64::MAX))?);
                }
            }
        }
        d += 1;
    }
    Ok(out)
}
