//! Extending isometries across a glue: given `H ⊃ A ⊕ T` and `H' ⊃ A' ⊕ T'`
//! with isometries `g: A → A'` and `f: T → T'`, the map `g ⊕ f` extends to
//! `H → H'` exactly when it carries the glue of `H` onto the glue of `H'`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::discform::{same_genus, torsion_form_isomorphic, Decision, DEFAULT_FORM_CAP};
use crate::embed::{glue_data, GlueData, Obstruction, PrimitiveSublattice};
use crate::isometry::Isometry;
use crate::lattice::Lattice;
use crate::matrix::{is_integral_vec, IntMatrix};
use crate::snf::saturation;
use crate::torsion::TorsionQuadraticForm;
use crate::{Error, Result};

/// `H` with a primitive nondegenerate `A ⊂ H`, `T = A⊥` and the glue between them.
#[derive(Clone, Debug)]
pub struct SplitLattice {
    pub total: Lattice,
    pub algebraic: PrimitiveSublattice,
    pub transcendental: PrimitiveSublattice,
    pub glue: GlueData,
}

impl SplitLattice {
    pub fn new(total: &Lattice, algebraic: PrimitiveSublattice) -> Result<Self> {
        let glue = glue_data(total, &algebraic)?;
        Ok(SplitLattice {
            total: total.clone(),
            transcendental: glue.complement.clone(),
            algebraic,
            glue,
        })
    }

    pub fn algebraic_lattice(&self) -> Lattice {
        self.algebraic.as_lattice().expect("validated by glue_data")
    }

    pub fn transcendental_lattice(&self) -> Lattice {
        self.transcendental.as_lattice().expect("validated by glue_data")
    }

    /// `[B_A; B_T]`.
    fn relation_matrix(&self) -> IntMatrix {
        self.glue.relation_matrix()
    }
}

/// A glue generator whose images under `g` and `f` disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueWitness {
    pub generator: usize,
    /// The generator as a vector of `H`.
    pub vector: Vec<BigInt>,
    /// Image of its `A`-part under `g`, as coordinates in `D(A')`.
    pub image_via_g: Vec<BigInt>,
    /// Image of its `T`-part under `f`, as coordinates in `D(T')`.
    pub image_via_f: Vec<BigInt>,
    /// The `f`-image transported to `D(A')` through the glue of `H'`, when
    /// it lies in that glue at all.
    pub image_via_f_in_a: Option<Vec<BigInt>>,
}

#[derive(Clone, Debug)]
pub enum Extension {
    Extended(Isometry),
    Incompatible(GlueWitness),
}

impl Extension {
    pub fn isometry(&self) -> Option<&Isometry> {
        match self {
            Extension::Extended(h) => Some(h),
            Extension::Incompatible(_) => None,
        }
    }
}

fn check_piece(iso: &Isometry, src: &PrimitiveSublattice, dst: &PrimitiveSublattice, what: &str) -> Result<()> {
    if iso.source().gram() != src.induced_gram() || iso.target().gram() != dst.induced_gram() {
        return Err(Error::InvalidIsometry(format!("{what} does not match the split pieces")));
    }
    Ok(())
}

/// Extends `g ⊕ f` from `A ⊕ T` to `H`, or reports the first glue
/// generator on which it fails.
pub fn extend_isometry(h: &SplitLattice, hp: &SplitLattice, f: &Isometry, g: &Isometry) -> Result<Extension> {
    check_piece(f, &h.transcendental, &hp.transcendental, "f")?;
    check_piece(g, &h.algebraic, &hp.algebraic, "g")?;
    let (pf, pg) = (f.matrix().to_rational(), g.matrix().to_rational());
    let rp = hp.relation_matrix().to_rational();
    let k = h.algebraic.rank();
    let image = |a: &[BigRational], c: &[BigRational]| -> Vec<BigRational> {
        let coeffs: Vec<BigRational> = pg.mul_vec(a).into_iter().chain(pf.mul_vec(c)).collect();
        rp.vec_mul(&coeffs)
    };

    for (i, (a, c)) in h.glue.projections.iter().enumerate() {
        if !is_integral_vec(&image(a, c)) {
            let ga = pg.mul_vec(a);
            let fc = pf.mul_vec(c);
            let image_via_g = hp.glue.form_l.coordinates(&ga)?;
            let image_via_f = hp.glue.form_perp.coordinates(&fc)?;
            let image_via_f_in_a = transport_to_algebraic(&hp.glue, &image_via_f);
            return Ok(Extension::Incompatible(GlueWitness {
                generator: i,
                vector: h.glue.generators[i].clone(),
                image_via_g,
                image_via_f,
                image_via_f_in_a,
            }));
        }
    }

    let rinv = h
        .relation_matrix()
        .to_rational()
        .inverse()
        .ok_or(Error::DegenerateComplement)?;
    let n = h.total.rank();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let coeffs = rinv.row(i);
        let col = image(&coeffs[..k], &coeffs[k..]);
        let col: Vec<BigInt> = col
            .iter()
            .map(|x| x.is_integer().then(|| x.to_integer()))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvariantViolated("extension is not integral".into()))?;
        cols.push(col);
    }
    let m = IntMatrix::from_fn(n, n, |r, c| cols[c][r].clone());
    let iso = Isometry::new(h.total.clone(), hp.total.clone(), m)?;
    check_restrictions(h, hp, f, g, &iso)?;
    Ok(Extension::Extended(iso))
}

/// `h · B_Aᵀ = B'_Aᵀ · P_g` and `h · B_Tᵀ = B'_Tᵀ · P_f`, entrywise.
pub fn check_restrictions(
    h: &SplitLattice,
    hp: &SplitLattice,
    f: &Isometry,
    g: &Isometry,
    iso: &Isometry,
) -> Result<()> {
    let pieces = [
        (&h.algebraic, &hp.algebraic, g.matrix(), "A"),
        (&h.transcendental, &hp.transcendental, f.matrix(), "T"),
    ];
    for (src, dst, p, name) in pieces {
        let lhs = iso.matrix() * &src.basis().transpose();
        let rhs = &dst.basis().transpose() * p;
        if lhs != rhs {
            return Err(Error::InvariantViolated(format!("extension does not restrict correctly on {name}")));
        }
    }
    Ok(())
}

/// Enumerates the glue of `H'` for an element with the given `D(T')`
/// coordinates and returns its `D(A')` coordinates.
fn transport_to_algebraic(glue: &GlueData, target: &[BigInt]) -> Option<Vec<BigInt>> {
    let orders: Vec<u64> = glue.generator_orders.iter().map(|d| d.to_u64()).collect::<Option<_>>()?;
    let total: u64 = orders.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d))?;
    if total > DEFAULT_FORM_CAP {
        return None;
    }
    let fa = &glue.form_l;
    let fp = &glue.form_perp;
    for mut idx in 0..total {
        let mut a = vec![BigInt::zero(); fa.length()];
        let mut c = vec![BigInt::zero(); fp.length()];
        for (j, &d) in orders.iter().enumerate() {
            let e = BigInt::from(idx % d);
            idx /= d;
            for (x, y) in a.iter_mut().zip(&glue.map_to_dl[j]) {
                *x += &e * y;
            }
            for (x, y) in c.iter_mut().zip(&glue.map_to_dperp[j]) {
                *x += &e * y;
            }
        }
        if fp.reduce(&c) == target {
            return Some(fa.reduce(&a));
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionCriterion {
    pub applies: bool,
    pub reasons: Vec<String>,
    /// Set when `applies`: the existence of a glue-compatible `g` is a
    /// cited theorem, not something computed here.
    pub theorem_asserted: bool,
}

/// Hypotheses under which any `f` admits a glue-compatible `g`: the totals
/// and the `A`-parts are in the same genus, and the `A`-part is even,
/// indefinite and has rank at least `l(D(A)) + 2`.
pub fn extension_criterion(h: &SplitLattice, hp: &SplitLattice) -> ExtensionCriterion {
    let a = h.algebraic_lattice();
    let ap = hp.algebraic_lattice();
    let mut reasons = Vec::new();
    if same_genus(&h.total, &hp.total, DEFAULT_FORM_CAP).decision != Decision::Yes {
        reasons.push("total genus mismatch".to_string());
    }
    if !a.is_even() || !ap.is_even() {
        reasons.push("not even".to_string());
    }
    if !a.is_indefinite() || !ap.is_indefinite() {
        reasons.push("not indefinite".to_string());
    }
    if same_genus(&a, &ap, DEFAULT_FORM_CAP).decision != Decision::Yes {
        reasons.push("genus mismatch".to_string());
    }
    if a.rank() < a.discriminant_group().length() + 2 {
        reasons.push("rank below length + 2".to_string());
    }
    let applies = reasons.is_empty();
    ExtensionCriterion { applies, reasons, theorem_asserted: applies }
}

/// `L ≅ L(−1)` forces equal signature components.
pub fn minus_one_obstruction(lat: &Lattice) -> Obstruction {
    let s = lat.signature();
    if s.pos != s.neg {
        Obstruction::Obstructed
    } else {
        Obstruction::Inconclusive
    }
}

/// Gluing data of a primitive `T ⊂ H` compared against the coprime split.
///
/// `embedding_subgroup_order = disc T / |G|` is the order of the subgroup of
/// `D(T)` that the embedding identifies with a subgroup of `D(H)`; when it
/// is 1 the complement satisfies `D(T⊥) ≅ D(T)(−1) ⊕ D(H)`.
#[derive(Clone, Debug)]
pub struct CoprimeSplit {
    pub glue_order: BigInt,
    pub embedding_subgroup_order: BigInt,
    /// The embedding subgroup is trivial.
    pub trivial: bool,
    /// `gcd(disc T, disc H) = 1`, which forces `trivial`.
    pub embedding_certificate: bool,
    /// `gcd(disc T, exponent of D(T⊥)) = 1`, which forces `|G| = 1`.
    pub glue_certificate: bool,
    pub complement_disc_form: TorsionQuadraticForm,
    /// `D(T⊥) ≅ D(T)(−1) ⊕ D(H)`, decided when `trivial`.
    pub split_form: Option<Decision>,
}

pub fn coprime_glue_triviality(t: &Lattice, h: &Lattice, embedding: &PrimitiveSublattice) -> Result<CoprimeSplit> {
    if embedding.ambient().gram() != h.gram() {
        return Err(Error::DimensionMismatch("embedding lives in a different ambient".into()));
    }
    if saturation(embedding.basis()) != *embedding.basis() {
        return Err(Error::NotPrimitive("embedding is not saturated".into()));
    }
    if embedding.induced_gram() != t.gram() {
        return Err(Error::InvalidArgument("embedding does not induce the Gram matrix of T".into()));
    }
    let glue = glue_data(h, embedding)?;
    let dt = t.disc();
    let embedding_subgroup_order = &dt / &glue.order;
    let trivial = embedding_subgroup_order.is_one();
    let complement_disc_form = glue.form_perp.clone();
    let split_form = trivial.then(|| {
        let expected = t.discriminant_group().negate().direct_sum(&h.discriminant_group());
        torsion_form_isomorphic(&complement_disc_form, &expected, DEFAULT_FORM_CAP)
    });
    Ok(CoprimeSplit {
        embedding_certificate: dt.gcd(&h.disc()).is_one(),
        glue_certificate: dt.gcd(&complement_disc_form.exponent()).is_one(),
        glue_order: glue.order,
        embedding_subgroup_order,
        trivial,
        complement_disc_form,
        split_form,
    })
}

impl fmt::Display for CoprimeSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "glue order {}, embedding subgroup order {}, D(T-perp) = {}",
            self.glue_order, self.embedding_subgroup_order, self.complement_disc_form
        )
    }
}

/// `−h` as an isometry (the ±id freedom on the total lattice).
pub fn negated(h: &Isometry) -> Isometry {
    Isometry::new(h.source().clone(), h.target().clone(), h.matrix().map(|x| -x))
        .expect("negation preserves the form")
}
