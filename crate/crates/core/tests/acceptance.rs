//! Acceptance checks. Each criterion prints one PASS/FAIL line; the binary
//! exits nonzero if any criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use latkit::a2::{a2_orthogonal_square_with_branch, A2Vector, Branch};
use latkit::catalog::{self, a2, hyperbolic, k3n, odd_unimodular};
use latkit::discform::{
    disc_form_automorphisms, discriminant_image, nikulin_criteria, torsion_form_isomorphic,
    Decision, SearchCap, DEFAULT_FORM_CAP,
};
use latkit::embed::{glue_data, reconstruct, saturate, transcendental_disc_candidates};
use latkit::extend::{coprime_glue_triviality, extend_isometry, Extension, SplitLattice};
use latkit::isometry::{definite_isometries, Isometry, DEFAULT_ISOMETRY_CAP};
use latkit::random::{random_lattice, random_primitive_sublattice, random_unimodular_lattice, seeded};
use latkit::{IntMatrix, Lattice, Parity, Signature};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn v(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

fn unit(n: usize, i: usize) -> Vec<BigInt> {
    (0..n).map(|j| BigInt::from((i == j) as i64)).collect()
}

fn det(m: &IntMatrix) -> BigInt {
    // cofactor-free oracle: exact rational elimination
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> =
        m.to_rows().into_iter().map(|r| r.into_iter().map(BigRational::from_integer).collect()).collect();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return BigInt::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    d.to_integer()
}

fn c1_catalog() -> Outcome {
    let og10 = catalog::catalog("OG10").map_err(|e| e.to_string())?;
    let k3n2 = catalog::catalog("K3n(2)").map_err(|e| e.to_string())?;
    let mukai = catalog::catalog("Mukai").map_err(|e| e.to_string())?;
    let h4 = catalog::catalog("CubicH4").map_err(|e| e.to_string())?;
    let prim = catalog::catalog("CubicPrim").map_err(|e| e.to_string())?;
    ensure(det(og10.gram()).abs() == BigInt::from(3), || "disc OG10 != 3".into())?;
    ensure(det(k3n2.gram()).abs() == BigInt::from(2), || "disc K3n(2) != 2".into())?;
    ensure(det(mukai.gram()).abs() == BigInt::one(), || "disc Mukai != 1".into())?;
    ensure(det(h4.gram()).abs() == BigInt::one(), || "disc I(21,2) != 1".into())?;
    ensure(h4.parity() == Parity::Odd, || "I(21,2) not odd".into())?;
    ensure(h4.signature() == Signature::new(21, 2), || "I(21,2) signature".into())?;
    ensure(prim.parity() == Parity::Even && prim.rank() == 22, || "CubicPrim".into())?;
    Ok("disc OG10=3, K3n(2)=2, Mukai=1, I(21,2)=1 odd (21,2), CubicPrim even rank 22".into())
}

fn c2_glue_order_identity() -> Outcome {
    let mut rng = seeded(2024);
    let trials = 1000;
    for t in 0..trials {
        let m = random_lattice(&mut rng, 8);
        let s = random_primitive_sublattice(&mut rng, &m);
        let g = glue_data(&m, &s).map_err(|e| format!("trial {t}: {e}"))?;
        let r = s.basis().vstack(g.complement.basis()).map_err(|e| e.to_string())?;
        let index = det(&r).abs();
        let lhs = &index * &index * det(m.gram()).abs();
        let rhs = det(s.induced_gram()).abs() * det(g.complement.induced_gram()).abs();
        ensure(lhs == rhs, || format!("trial {t}: {lhs} != {rhs}"))?;
        ensure(g.order == index, || format!("trial {t}: glue order {} != index {index}", g.order))?;
    }
    Ok(format!("{trials} random sublattices, rank <= 8"))
}

fn c3_anti_isometry() -> Outcome {
    let mut rng = seeded(7);
    let trials = 200;
    let mut done = 0;
    let mut redraws = 0;
    let mut even = 0;
    while done < trials {
        let m = random_unimodular_lattice(&mut rng, 10);
        let s = random_primitive_sublattice(&mut rng, &m);
        let l = s.as_lattice().map_err(|e| e.to_string())?;
        // instances are drawn inside the search cap
        if l.disc() > BigInt::from(DEFAULT_FORM_CAP) {
            redraws += 1;
            continue;
        }
        let g = glue_data(&m, &s).map_err(|e| e.to_string())?;
        let perp = g.complement.as_lattice().map_err(|e| e.to_string())?;
        let (dl, dp) = (l.discriminant_group(), perp.discriminant_group().negate());
        // an odd ambient only pins q mod 1, i.e. the bilinear form
        let d = if m.is_even() {
            even += 1;
            torsion_form_isomorphic(&dl, &dp, DEFAULT_FORM_CAP)
        } else {
            torsion_form_isomorphic(&dl.bilinear_only(), &dp.bilinear_only(), DEFAULT_FORM_CAP)
        };
        ensure(d == Decision::Yes, || format!("instance {done}: {d} for {}", l.gram()))?;
        done += 1;
    }
    Ok(format!("{trials} sublattices of unimodular lattices, rank <= 10 ({even} even ambients, {redraws} redrawn over cap)"))
}

/// Square of a primitive generator of `v⊥`, by scanning `|x|, |y| ≤ 3(|a| + |b|)`.
/// `None` if no solution or two different squares turn up.
fn brute_square(a: i64, b: i64) -> Option<i64> {
    let bound = 3 * (a.abs() + b.abs());
    // u·v = x(2a - b) + y(2b - a)
    let (p, q) = (2 * a - b, 2 * b - a);
    let mut found = None;
    for x in -bound..=bound {
        let ys: Vec<i64> = if q == 0 {
            (-bound..=bound).collect()
        } else if (x * p) % q == 0 {
            vec![-(x * p) / q]
        } else {
            continue;
        };
        for y in ys {
            if x * p + y * q != 0 || y.abs() > bound || (x == 0 && y == 0) || x.gcd(&y) != 1 {
                continue;
            }
            let s = 2 * x * x - 2 * x * y + 2 * y * y;
            match found {
                None => found = Some(s),
                Some(t) if t != s => return None,
                _ => {}
            }
        }
    }
    found
}

fn c4_a2_exhaustive() -> Outcome {
    let mut count = 0;
    for a in -100i64..=100 {
        for b in -100i64..=100 {
            if a.gcd(&b) != 1 {
                continue;
            }
            let vv = A2Vector::new(a, b);
            let (closed, branch) = a2_orthogonal_square_with_branch(vv).map_err(|e| e.to_string())?;
            let brute = brute_square(a, b);
            ensure(brute == Some(closed as i64), || format!("({a},{b}): closed {closed}, brute {brute:?}"))?;
            let sq = 2 * a * a - 2 * a * b + 2 * b * b;
            let g = (2 * a - b).gcd(&(2 * b - a));
            ensure((sq % 3 == 0) == (g == 3), || format!("({a},{b}): dichotomy"))?;
            ensure((branch == Branch::Third) == (g == 3), || format!("({a},{b}): branch"))?;
            count += 1;
        }
    }
    Ok(format!("{count} primitive vectors with |a|,|b| <= 100"))
}

fn c5_a2_surjectivity() -> Outcome {
    let lat = a2();
    let group = definite_isometries(&lat, DEFAULT_ISOMETRY_CAP).map_err(|e| e.to_string())?;
    ensure(group.len() == 12, || format!("|O(A2)| = {}", group.len()))?;
    let d = lat.discriminant_group();
    let auts = disc_form_automorphisms(&d, DEFAULT_FORM_CAP).map_err(|e| e.to_string())?;
    let image = discriminant_image(&lat, SearchCap::default()).map_err(|e| e.to_string())?;
    let all: HashSet<IntMatrix> = auts.into_iter().map(|a| a.matrix).collect();
    ensure(image.len() == 2 && all.len() == 2 && image == all, || {
        format!("image {} vs O(D) {}", image.len(), all.len())
    })?;
    Ok("|O(A2)| = 12, image = O(D(A2)) of order 2".into())
}

/// Whether `f ⊕ g` respects the glue, computed on discriminant groups:
/// every glue element `(x, y)` must map to a glue element `(ḡx, f̄y)`.
fn glue_maps_agree(h: &SplitLattice, f: &Isometry, g: &Isometry) -> Result<bool, String> {
    let (da, dt) = (&h.glue.form_l, &h.glue.form_perp);
    let act_g = g.discriminant_action(da, da).map_err(|e| e.to_string())?;
    let act_f = f.discriminant_action(dt, dt).map_err(|e| e.to_string())?;
    let pairs: HashSet<(Vec<BigInt>, Vec<BigInt>)> = glue_elements(h);
    for (x, y) in &pairs {
        let gx = da.reduce(&act_g.mul_vec(x));
        let fy = dt.reduce(&act_f.mul_vec(y));
        if !pairs.contains(&(gx, fy)) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn glue_elements(h: &SplitLattice) -> HashSet<(Vec<BigInt>, Vec<BigInt>)> {
    let (da, dt) = (&h.glue.form_l, &h.glue.form_perp);
    let mut out = HashSet::new();
    out.insert((vec![BigInt::zero(); da.length()], vec![BigInt::zero(); dt.length()]));
    loop {
        let before = out.len();
        let current: Vec<_> = out.iter().cloned().collect();
        for (x, y) in current {
            for (gx, gy) in h.glue.map_to_dl.iter().zip(&h.glue.map_to_dperp) {
                let sx: Vec<BigInt> = x.iter().zip(gx).map(|(a, b)| a + b).collect();
                let sy: Vec<BigInt> = y.iter().zip(gy).map(|(a, b)| a + b).collect();
                out.insert((da.reduce(&sx), dt.reduce(&sy)));
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

fn c6_extension() -> Outcome {
    let u = hyperbolic();
    let i3 = odd_unimodular(3, 0);
    let fixtures = [
        SplitLattice::new(&u, saturate(&u, &[v(&[1, 1])]).map_err(|e| e.to_string())?),
        SplitLattice::new(&i3, saturate(&i3, &[v(&[1, 1, 1])]).map_err(|e| e.to_string())?),
    ];
    let (mut extended, mut incompatible) = (0, 0);
    for h in fixtures {
        let h = h.map_err(|e| e.to_string())?;
        let a = h.algebraic_lattice();
        let t = h.transcendental_lattice();
        let ga = definite_isometries(&a, DEFAULT_ISOMETRY_CAP).map_err(|e| e.to_string())?;
        let gt = definite_isometries(&t, DEFAULT_ISOMETRY_CAP).map_err(|e| e.to_string())?;
        for g in &ga {
            for f in &gt {
                let agree = glue_maps_agree(&h, f, g)?;
                let ext = extend_isometry(&h, &h, f, g).map_err(|e| e.to_string())?;
                match ext {
                    Extension::Extended(iso) => {
                        ensure(agree, || "extended although glue maps differ".into())?;
                        let m = iso.matrix();
                        let gm = h.total.gram();
                        ensure(&(&(&m.transpose() * gm) * m) == gm, || "Gram contract".into())?;
                        ensure(det(m).abs().is_one(), || "not unimodular".into())?;
                        let ba = h.algebraic.basis().transpose();
                        let bt = h.transcendental.basis().transpose();
                        ensure(&(m * &ba) == &(&ba * g.matrix()), || "restriction to A".into())?;
                        ensure(&(m * &bt) == &(&bt * f.matrix()), || "restriction to T".into())?;
                        extended += 1;
                    }
                    Extension::Incompatible(_) => {
                        ensure(!agree, || "incompatible although glue maps agree".into())?;
                        incompatible += 1;
                    }
                }
            }
        }
    }
    ensure(extended > 0 && incompatible > 0, || "both outcomes should occur".into())?;
    Ok(format!("U and I(3,0) splits: {extended} extended, {incompatible} incompatible"))
}

fn c7_candidates() -> Outcome {
    let set = |xs: &[u64]| xs.iter().copied().collect::<BTreeSet<u64>>();
    let a = transcendental_disc_candidates(3, 1).map_err(|e| e.to_string())?;
    let b = transcendental_disc_candidates(2, 5).map_err(|e| e.to_string())?;
    ensure(a == set(&[1, 3]), || format!("(3,1) -> {a:?}"))?;
    ensure(b == set(&[5, 10]), || format!("(2,5) -> {b:?}"))?;
    Ok("(3,1) -> {1,3}, (2,5) -> {5,10}".into())
}

fn c8_coprime_split() -> Outcome {
    let h = k3n(2).map_err(|e| e.to_string())?;
    let n = h.rank();
    // two adjacent roots of the first E8(-1) summand span A2(-1)
    let s = saturate(&h, &[unit(n, 6), unit(n, 8)]).map_err(|e| e.to_string())?;
    let t = s.as_lattice().map_err(|e| e.to_string())?;
    ensure(t.disc() == BigInt::from(3), || "fixture T must have disc 3".into())?;
    let c = coprime_glue_triviality(&t, &h, &s).map_err(|e| e.to_string())?;
    ensure(c.trivial, || format!("disc-3 fixture not trivial: {c}"))?;
    let minus_two = Lattice::from_i64(&[&[-2]]).map_err(|e| e.to_string())?;
    let expected = t.discriminant_group().negate().direct_sum(&minus_two.discriminant_group());
    let perp = glue_data(&h, &s).map_err(|e| e.to_string())?.complement.as_lattice().map_err(|e| e.to_string())?;
    let d = torsion_form_isomorphic(&perp.discriminant_group(), &expected, DEFAULT_FORM_CAP);
    ensure(d == Decision::Yes, || format!("D(T-perp) vs D(T)(-1) + D([-2]): {d}"))?;

    let u = hyperbolic();
    let s = saturate(&u, &[v(&[1, 1])]).map_err(|e| e.to_string())?;
    let t = s.as_lattice().map_err(|e| e.to_string())?;
    let c = coprime_glue_triviality(&t, &u, &s).map_err(|e| e.to_string())?;
    ensure(!c.trivial, || format!("control [2] in U reported trivial: {c}"))?;
    Ok("disc-3 T in K3n(2) splits; [2] in U is not trivial".into())
}

fn c9_nikulin() -> Outcome {
    let ns = hyperbolic().direct_sum(&a2().rescale_int(-1).map_err(|e| e.to_string())?);
    let rank3 = hyperbolic().direct_sum(&Lattice::from_i64(&[&[-6]]).map_err(|e| e.to_string())?);
    let small = Lattice::from_i64(&[&[2, 0], &[0, -2]]).map_err(|e| e.to_string())?;
    ensure(nikulin_criteria(&ns).conclusion, || "U + A2(-1)".into())?;
    ensure(rank3.discriminant_group().length() == 1, || "rank-3 fixture not cyclic".into())?;
    ensure(nikulin_criteria(&rank3).conclusion, || "U + [-6]".into())?;
    ensure(!nikulin_criteria(&small).conclusion, || "[2] + [-2]".into())?;
    Ok("U+A2(-1) true, U+[-6] true, [2]+[-2] false".into())
}

fn c10_round_trip() -> Outcome {
    let mut rng = seeded(10);
    let trials = 100;
    for t in 0..trials {
        let m = random_lattice(&mut rng, 6);
        let s = random_primitive_sublattice(&mut rng, &m);
        let rt = reconstruct(&m, &s).map_err(|e| format!("trial {t}: {e}"))?;
        let p = &rt.basis_change;
        ensure(det(p).abs().is_one(), || format!("trial {t}: basis change not unimodular"))?;
        let moved = &(p * m.gram()) * &p.transpose();
        ensure(&moved == rt.overlattice.lattice.gram(), || format!("trial {t}: Gram mismatch"))?;
    }
    Ok(format!("{trials} random (M, S) with rank(M) <= 6"))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "catalog discriminants", Duration::from_secs(1), c1_catalog),
        (2, "glue order identity", Duration::from_secs(60), c2_glue_order_identity),
        (3, "glue anti-isometry", Duration::from_secs(60), c3_anti_isometry),
        (4, "A2 orthogonal squares", Duration::from_secs(30), c4_a2_exhaustive),
        (5, "O(A2) onto O(D(A2))", Duration::from_secs(5), c5_a2_surjectivity),
        (6, "isometry extension", Duration::from_secs(10), c6_extension),
        (7, "transcendental candidates", Duration::from_secs(1), c7_candidates),
        (8, "coprime split", Duration::from_secs(5), c8_coprime_split),
        (9, "uniqueness criterion", Duration::from_secs(1), c9_nikulin),
        (10, "overlattice round trip", Duration::from_secs(60), c10_round_trip),
    ];
    let mut failed = 0;
    for (n, name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > limit => Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {n:>2} PASS  {name}: {msg} [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {msg} [{elapsed:.2?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
