use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use latkit::catalog::{a2, hyperbolic, odd_unimodular};
use latkit::discform::{
    disc_form_automorphisms, group_automorphism_count, nikulin_criteria, same_genus,
    torsion_form_isomorphic, Decision, DEFAULT_FORM_CAP,
};
use latkit::embed::{
    glue_data, orthogonal_complement, reconstruct, saturate, transcendental_disc_candidates,
    unimodular_embedding_obstruction, Obstruction,
};
use latkit::extend::{extend_isometry, minus_one_obstruction, Extension, SplitLattice};
use latkit::isometry::{definite_isometries, Isometry, DEFAULT_ISOMETRY_CAP};
use latkit::random::{random_lattice, random_primitive_sublattice, random_unimodular, random_unimodular_lattice, seeded};
use latkit::Lattice;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn small_disc(l: &Lattice) -> bool {
    l.disc() <= BigInt::from(500)
}

fn v(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

fn splits() -> Vec<SplitLattice> {
    let u = hyperbolic();
    let i3 = odd_unimodular(3, 0);
    vec![
        SplitLattice::new(&u, saturate(&u, &[v(&[1, 1])]).unwrap()).unwrap(),
        SplitLattice::new(&i3, saturate(&i3, &[v(&[1, 1, 1])]).unwrap()).unwrap(),
    ]
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn torsion_isomorphism_is_an_equivalence(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let l = random_lattice(&mut rng, 4);
        prop_assume!(small_disc(&l));
        let p = random_unimodular(&mut rng, l.rank(), 8);
        let l2 = l.change_basis(&p).unwrap();
        let (d, d2) = (l.discriminant_group(), l2.discriminant_group());
        prop_assert_eq!(torsion_form_isomorphic(&d, &d, DEFAULT_FORM_CAP), Decision::Yes);
        prop_assert_eq!(torsion_form_isomorphic(&d, &d2, DEFAULT_FORM_CAP), Decision::Yes);
        prop_assert_eq!(torsion_form_isomorphic(&d2, &d, DEFAULT_FORM_CAP), Decision::Yes);
        prop_assert_eq!(same_genus(&l, &l2, DEFAULT_FORM_CAP).decision, Decision::Yes);
        prop_assert_eq!(nikulin_criteria(&l), nikulin_criteria(&l2));
    }

    #[test]
    fn discriminant_of_sum_is_sum(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (a, b) = (random_lattice(&mut rng, 3), random_lattice(&mut rng, 3));
        prop_assume!(a.disc() * b.disc() <= BigInt::from(500));
        let joint = a.direct_sum(&b).discriminant_group();
        let split = a.discriminant_group().direct_sum(&b.discriminant_group());
        prop_assert_eq!(torsion_form_isomorphic(&joint, &split, DEFAULT_FORM_CAP), Decision::Yes);
    }

    #[test]
    fn complement_is_an_involution(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let m = random_lattice(&mut rng, 6);
        let s = random_primitive_sublattice(&mut rng, &m);
        let perp = orthogonal_complement(&m, &s).unwrap();
        let back = orthogonal_complement(&m, &perp).unwrap();
        let canon = saturate(&m, &s.basis().to_rows()).unwrap();
        prop_assert_eq!(back.basis(), canon.basis());
        prop_assert_eq!(s.rank() + perp.rank(), m.rank());
    }

    /// Inside a unimodular lattice the glue is the graph of a bijection
    /// `D(L) → D(L⊥)` that negates the form, checked element by element.
    #[test]
    fn unimodular_glue_is_an_anti_isometric_bijection(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let m = random_unimodular_lattice(&mut rng, 8);
        let s = random_primitive_sublattice(&mut rng, &m);
        let g = glue_data(&m, &s).unwrap();
        prop_assume!(g.order <= BigInt::from(2000));
        let (dl, dp) = (&g.form_l, &g.form_perp);
        prop_assert_eq!(&g.order, &dl.order());
        prop_assert_eq!(&g.order, &dp.order());
        let mut elements = vec![(vec![BigInt::zero(); dl.length()], vec![BigInt::zero(); dp.length()])];
        let mut seen: HashSet<(Vec<BigInt>, Vec<BigInt>)> = elements.iter().cloned().collect();
        while let Some((x, y)) = elements.pop() {
            for (gx, gy) in g.map_to_dl.iter().zip(&g.map_to_dperp) {
                let sx = dl.reduce(&x.iter().zip(gx).map(|(a, b)| a + b).collect::<Vec<_>>());
                let sy = dp.reduce(&y.iter().zip(gy).map(|(a, b)| a + b).collect::<Vec<_>>());
                if seen.insert((sx.clone(), sy.clone())) {
                    elements.push((sx, sy));
                }
            }
        }
        let firsts: HashSet<_> = seen.iter().map(|p| p.0.clone()).collect();
        let seconds: HashSet<_> = seen.iter().map(|p| p.1.clone()).collect();
        prop_assert_eq!(BigInt::from(seen.len()), g.order.clone());
        prop_assert_eq!(firsts.len(), seen.len());
        prop_assert_eq!(seconds.len(), seen.len());
        for (x, y) in &seen {
            let total = dl.b_value(x, x) + dp.b_value(y, y);
            prop_assert!(total.is_integer());
            if m.is_even() {
                let q = dl.q_value(x).unwrap() + dp.q_value(y).unwrap();
                prop_assert!((q / BigInt::from(2)).is_integer());
            }
        }
    }

    #[test]
    fn round_trip_preserves_invariants(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let m = random_lattice(&mut rng, 6);
        let s = random_primitive_sublattice(&mut rng, &m);
        let rt = reconstruct(&m, &s).unwrap();
        let o = &rt.overlattice.lattice;
        prop_assert_eq!(o.rank(), m.rank());
        prop_assert_eq!(o.signature(), m.signature());
        prop_assert_eq!(o.parity(), m.parity());
        prop_assert_eq!(o.disc(), m.disc());
        let (dm, dov) = (m.discriminant_group(), o.discriminant_group());
        prop_assert_eq!(dov.factors(), dm.factors());
        prop_assert_eq!(&rt.overlattice.index, &glue_data(&m, &s).unwrap().order);
    }

    #[test]
    fn obstruction_is_monotone(seed in any::<u64>(), n in -6i64..=6, r in 1usize..30) {
        prop_assume!(n != 0);
        let t = random_lattice(&mut seeded(seed), 5);
        let here = unimodular_embedding_obstruction(&t, n, r).unwrap();
        if n.abs() == 1 {
            prop_assert_eq!(here, Obstruction::Inconclusive);
        }
        if here == Obstruction::Obstructed {
            for smaller in 1..r {
                prop_assert_eq!(unimodular_embedding_obstruction(&t, n, smaller).unwrap(), Obstruction::Obstructed);
            }
        }
    }

    #[test]
    fn hyperbolic_doubles_are_never_obstructed(seed in any::<u64>()) {
        let l = random_lattice(&mut seeded(seed), 4);
        let doubled = l.direct_sum(&l.rescale_int(-1).unwrap());
        prop_assert_eq!(minus_one_obstruction(&doubled), Obstruction::Inconclusive);
    }

    #[test]
    fn candidates_are_m_and_pm(p in proptest::sample::select(vec![2u64, 3, 5, 7, 11, 13]), m in 1u64..200) {
        let set = transcendental_disc_candidates(p, m).unwrap();
        prop_assert_eq!(set.into_iter().collect::<Vec<_>>(), vec![m, p * m]);
    }
}

#[test]
fn minus_one_fixtures_are_inconclusive() {
    for l in [hyperbolic(), hyperbolic().power(2), odd_unimodular(1, 1)] {
        assert_eq!(minus_one_obstruction(&l), Obstruction::Inconclusive);
    }
}

#[test]
fn definite_isometries_form_a_group() {
    for l in [a2(), odd_unimodular(3, 0), Lattice::from_i64(&[&[2, 1], &[1, 4]]).unwrap()] {
        let group = definite_isometries(&l, DEFAULT_ISOMETRY_CAP).unwrap();
        let set: HashSet<_> = group.iter().map(|g| g.matrix().clone()).collect();
        assert_eq!(set.len(), group.len());
        assert!(set.contains(Isometry::identity(&l).matrix()));
        assert!(set.contains(Isometry::negation(&l).matrix()));
        for a in &group {
            assert!(set.contains(a.inverse().matrix()));
            for b in &group {
                assert!(set.contains(a.after(b).unwrap().matrix()));
            }
        }
    }
}

#[test]
fn disc_form_automorphisms_form_a_subgroup() {
    for l in [a2(), a2().rescale_int(2).unwrap(), Lattice::from_i64(&[&[2, 0], &[0, 6]]).unwrap()] {
        let d = l.discriminant_group();
        let auts = disc_form_automorphisms(&d, DEFAULT_FORM_CAP).unwrap();
        let set: HashSet<_> = auts.iter().map(|a| a.matrix.clone()).collect();
        assert_eq!(set.len(), auts.len());
        for a in &auts {
            for b in &auts {
                assert!(set.contains(&a.after(b, &d).matrix));
            }
        }
        let all = group_automorphism_count(&d, DEFAULT_FORM_CAP).unwrap();
        assert_eq!(all % auts.len(), 0);
    }
}

#[test]
fn extension_respects_composition() {
    for h in splits() {
        let ga = definite_isometries(&h.algebraic_lattice(), DEFAULT_ISOMETRY_CAP).unwrap();
        let gt = definite_isometries(&h.transcendental_lattice(), DEFAULT_ISOMETRY_CAP).unwrap();
        let ext = |f: &Isometry, g: &Isometry| match extend_isometry(&h, &h, f, g).unwrap() {
            Extension::Extended(iso) => Some(iso),
            Extension::Incompatible(_) => None,
        };
        let mut checked = 0;
        for (f1, g1) in gt.iter().flat_map(|f| ga.iter().map(move |g| (f, g))) {
            let Some(h1) = ext(f1, g1) else { continue };
            for (f2, g2) in gt.iter().flat_map(|f| ga.iter().map(move |g| (f, g))) {
                let Some(h2) = ext(f2, g2) else { continue };
                let composed = ext(&f2.after(f1).unwrap(), &g2.after(g1).unwrap())
                    .expect("composites of extendable pairs extend");
                assert_eq!(composed.matrix(), h2.after(&h1).unwrap().matrix());
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn identity_pairs_extend_to_identity() {
    for h in splits() {
        let f = Isometry::identity(&h.transcendental_lattice());
        let g = Isometry::identity(&h.algebraic_lattice());
        let iso = extend_isometry(&h, &h, &f, &g).unwrap();
        assert_eq!(iso.isometry().unwrap().matrix(), Isometry::identity(&h.total).matrix());
        assert!(h.glue.order > BigInt::one());
    }
}
