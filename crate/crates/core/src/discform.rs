//! Comparison and automorphisms of torsion quadratic forms, genus tuples,
//! and the hypotheses of the uniqueness/surjectivity criterion for even
//! indefinite lattices.
//!
//! All searches are exhaustive over group elements and refuse to run past a
//! configurable group-order cap, answering [`Decision::TooLarge`] instead.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::isometry::{definite_isometries, DEFAULT_ISOMETRY_CAP};
use crate::lattice::{Lattice, Parity, Signature};
use crate::matrix::IntMatrix;
use crate::torsion::{FormTable, TorsionQuadraticForm};
use crate::{Error, Result};

/// Default cap on the order of discriminant groups searched exhaustively.
pub const DEFAULT_FORM_CAP: u64 = 10_000;

/// Environment variable overriding [`DEFAULT_FORM_CAP`].
pub const CAP_ENV: &str = "LATKIT_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Yes,
    No,
    TooLarge,
}

impl Decision {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Yes => "yes",
            Decision::No => "no",
            Decision::TooLarge => "too-large",
        })
    }
}

/// Enumeration limits: the largest discriminant-group order searched and
/// the node budget of the definite isometry search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchCap {
    pub form_order: u64,
    pub isometry_nodes: u64,
}

impl Default for SearchCap {
    fn default() -> Self {
        SearchCap { form_order: DEFAULT_FORM_CAP, isometry_nodes: DEFAULT_ISOMETRY_CAP }
    }
}

impl SearchCap {
    pub fn with_form_order(form_order: u64) -> Self {
        SearchCap { form_order, ..SearchCap::default() }
    }

    /// Defaults, with the form-order cap taken from `LATKIT_CAP` if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAP_ENV) {
            Err(_) => Ok(SearchCap::default()),
            Ok(v) => match v.trim().parse::<u64>() {
                Ok(n) if n > 0 => Ok(SearchCap::with_form_order(n)),
                _ => Err(Error::InvalidArgument(format!("{CAP_ENV} must be a positive integer"))),
            },
        }
    }
}

/// An automorphism of a torsion form; column `i` holds the coordinates of
/// the image of generator `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorsionFormAutomorphism {
    pub matrix: IntMatrix,
}

impl TorsionFormAutomorphism {
    pub fn apply(&self, form: &TorsionQuadraticForm, x: &[BigInt]) -> Vec<BigInt> {
        form.reduce(&self.matrix.mul_vec(x))
    }

    /// `self ∘ first`, reduced modulo the invariant factors.
    pub fn after(&self, first: &Self, form: &TorsionQuadraticForm) -> Self {
        let k = form.length();
        let cols: Vec<Vec<BigInt>> =
            (0..k).map(|j| self.apply(form, &first.matrix.column(j))).collect();
        TorsionFormAutomorphism { matrix: IntMatrix::from_fn(k, k, |i, j| cols[j][i].clone()) }
    }
}

/// Both tables scaled by a common denominator so norms compare directly.
fn common_tables(
    a: &TorsionQuadraticForm,
    b: &TorsionQuadraticForm,
) -> Option<(FormTable, FormTable)> {
    let (mut ta, mut tb) = (a.table()?, b.table()?);
    let n = num_integer::lcm(ta.n, tb.n);
    ta.rescale_to(n);
    tb.rescale_to(n);
    Some((ta, tb))
}

struct Search<'a> {
    src: &'a FormTable,
    dst: &'a FormTable,
    respect_form: bool,
    src_gens: Vec<Vec<u64>>,
    dst_elems: Vec<Vec<u64>>,
    dst_norms: Vec<u128>,
    want_all: bool,
}

impl Search<'_> {
    fn run(&self, images: &mut Vec<Vec<u64>>, found: &mut Vec<Vec<Vec<u64>>>) {
        if !self.want_all && !found.is_empty() {
            return;
        }
        let i = images.len();
        let k = self.src.factors.len();
        if i == k {
            if self.injective(images) {
                found.push(images.clone());
            }
            return;
        }
        let d = self.src.factors[i];
        let gi = &self.src_gens[i];
        let target_norm = self.src.norm(gi);
        for (y, &ny) in self.dst_elems.iter().zip(&self.dst_norms) {
            if !self.dst.killed_by(y, d) {
                continue;
            }
            if self.respect_form {
                if ny != target_norm {
                    continue;
                }
                let ok = (0..i).all(|j| {
                    self.dst.b(y, &images[j]) == self.src.b(gi, &self.src_gens[j])
                });
                if !ok {
                    continue;
                }
            }
            images.push(y.clone());
            self.run(images, found);
            images.pop();
            if !self.want_all && !found.is_empty() {
                return;
            }
        }
    }

    // |src| = |dst| is checked up front, so injective means bijective
    fn injective(&self, images: &[Vec<u64>]) -> bool {
        let mut seen = HashSet::new();
        for x in self.src.elements() {
            let mut y = vec![0u64; self.dst.factors.len()];
            for (c, img) in x.iter().zip(images) {
                y = self.dst.add_scaled(&y, img, *c);
            }
            if !seen.insert(y) {
                return false;
            }
        }
        true
    }
}

fn search(
    a: &TorsionQuadraticForm,
    b: &TorsionQuadraticForm,
    respect_form: bool,
    want_all: bool,
    cap: u64,
) -> Result<Vec<IntMatrix>> {
    if a.order() != b.order() {
        return Ok(vec![]);
    }
    if a.order() > BigInt::from(cap) {
        return Err(Error::TooLarge(cap));
    }
    let (mut ta, mut tb) = common_tables(a, b).ok_or(Error::TooLarge(cap))?;
    if ta.q.is_none() || tb.q.is_none() {
        ta.q = None;
        tb.q = None;
    }
    let k = ta.factors.len();
    let src_gens: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            let mut e = vec![0u64; k];
            e[i] = 1;
            e
        })
        .collect();
    let dst_elems: Vec<Vec<u64>> = tb.elements().collect();
    let dst_norms = dst_elems.iter().map(|y| tb.norm(y)).collect();
    let s = Search {
        src: &ta,
        dst: &tb,
        respect_form,
        src_gens,
        dst_elems,
        dst_norms,
        want_all,
    };
    let mut found = Vec::new();
    s.run(&mut Vec::with_capacity(k), &mut found);
    let rows = tb.factors.len();
    Ok(found
        .into_iter()
        .map(|imgs| IntMatrix::from_fn(rows, k, |r, c| BigInt::from(imgs[c][r])))
        .collect())
}

/// An isomorphism `a → b` of torsion forms, if one exists.
pub fn find_isomorphism(
    a: &TorsionQuadraticForm,
    b: &TorsionQuadraticForm,
    cap: u64,
) -> Result<Option<IntMatrix>> {
    Ok(search(a, b, true, false, cap)?.into_iter().next())
}

/// Whether two torsion forms are isomorphic: a group isomorphism preserving
/// the bilinear form, and the quadratic form when both carry one.
pub fn torsion_form_isomorphic(
    a: &TorsionQuadraticForm,
    b: &TorsionQuadraticForm,
    cap: u64,
) -> Decision {
    match find_isomorphism(a, b, cap) {
        Ok(Some(_)) => Decision::Yes,
        Ok(None) => Decision::No,
        Err(_) => Decision::TooLarge,
    }
}

/// The full automorphism group O(D) of a torsion form.
pub fn disc_form_automorphisms(
    form: &TorsionQuadraticForm,
    cap: u64,
) -> Result<Vec<TorsionFormAutomorphism>> {
    Ok(search(form, form, true, true, cap)?
        .into_iter()
        .map(|matrix| TorsionFormAutomorphism { matrix })
        .collect())
}

/// Number of automorphisms of the underlying abelian group, ignoring the form.
pub fn group_automorphism_count(form: &TorsionQuadraticForm, cap: u64) -> Result<usize> {
    Ok(search(form, form, false, true, cap)?.len())
}

/// Signature, parity and discriminant form of a lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusTuple {
    pub signature: Signature,
    pub parity: Parity,
    pub disc_form: TorsionQuadraticForm,
}

pub fn genus_tuple(lat: &Lattice) -> GenusTuple {
    GenusTuple {
        signature: lat.signature(),
        parity: lat.parity(),
        disc_form: lat.discriminant_group(),
    }
}

/// Outcome of a genus comparison. For odd lattices only the bilinear
/// discriminant form is compared, so `bilinear_only` flags that the answer
/// follows the (signature, parity, discriminant form) definition and
/// nothing finer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenusComparison {
    pub decision: Decision,
    pub bilinear_only: bool,
}

pub fn same_genus(a: &Lattice, b: &Lattice, cap: u64) -> GenusComparison {
    let (ga, gb) = (genus_tuple(a), genus_tuple(b));
    let bilinear_only = ga.parity == Parity::Odd || gb.parity == Parity::Odd;
    let decision = if ga.signature != gb.signature
        || ga.parity != gb.parity
        || ga.disc_form.order() != gb.disc_form.order()
    {
        Decision::No
    } else {
        torsion_form_isomorphic(&ga.disc_form, &gb.disc_form, cap)
    };
    GenusComparison { decision, bilinear_only }
}

/// The three hypotheses (even, indefinite, `rank ≥ length + 2`) under which
/// an even lattice is unique in its genus and `O(L) → O(D(L))` is onto.
/// `conclusion` is never computed directly; it rests on the cited theorem,
/// which `theorem_asserted` records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NikulinCriteria {
    pub even: bool,
    pub indefinite: bool,
    pub rank_ge_length_plus_2: bool,
    pub conclusion: bool,
    pub theorem_asserted: bool,
}

pub fn nikulin_criteria(lat: &Lattice) -> NikulinCriteria {
    let even = lat.is_even();
    let indefinite = lat.is_indefinite();
    let rank_ge_length_plus_2 = lat.rank() >= lat.discriminant_group().length() + 2;
    let conclusion = even && indefinite && rank_ge_length_plus_2;
    NikulinCriteria { even, indefinite, rank_ge_length_plus_2, conclusion, theorem_asserted: conclusion }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Surjectivity {
    Yes,
    No,
    TooLarge,
    TheoremAsserted,
}

impl fmt::Display for Surjectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Surjectivity::Yes => "yes",
            Surjectivity::No => "no",
            Surjectivity::TooLarge => "too-large",
            Surjectivity::TheoremAsserted => "theorem-asserted",
        })
    }
}

/// Image of `O(L)` in `O(D(L))` as a set of action matrices (definite `L` only).
pub fn discriminant_image(lat: &Lattice, cap: SearchCap) -> Result<HashSet<IntMatrix>> {
    let d = lat.discriminant_group();
    let group = definite_isometries(lat, cap.isometry_nodes)?;
    group.iter().map(|g| g.discriminant_action(&d, &d)).collect()
}

/// Whether `O(L) → O(D(L))` is surjective.
///
/// Definite lattices are enumerated; otherwise a trivial discriminant group
/// gives `Yes`, and an even indefinite lattice meeting [`nikulin_criteria`]
/// gives `TheoremAsserted`. Anything else is `TooLarge`.
pub fn lattice_to_disc_image_surjective(lat: &Lattice, cap: SearchCap) -> Surjectivity {
    if lat.is_definite() && lat.rank() > 0 {
        let d = lat.discriminant_group();
        let image = match discriminant_image(lat, cap) {
            Ok(i) => i,
            Err(_) => return Surjectivity::TooLarge,
        };
        let full = match disc_form_automorphisms(&d, cap.form_order) {
            Ok(a) => a,
            Err(_) => return Surjectivity::TooLarge,
        };
        let all: HashSet<IntMatrix> = full.into_iter().map(|a| a.matrix).collect();
        return if image == all { Surjectivity::Yes } else { Surjectivity::No };
    }
    if lat.discriminant_group().is_trivial() {
        return Surjectivity::Yes;
    }
    if nikulin_criteria(lat).conclusion {
        return Surjectivity::TheoremAsserted;
    }
    Surjectivity::TooLarge
}

/// Group order as `u64`, if it fits.
pub fn small_order(form: &TorsionQuadraticForm) -> Option<u64> {
    form.order().to_u64()
}
