//! The `verify` runner: a fixed list of named checks, each
//! reported as one record.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use latkit::a2::{a2_orthogonal_generator, a2_orthogonal_square_with_branch, A2Vector, Branch};
use latkit::catalog::{self, a2, hyperbolic, k3n, odd_unimodular};
use latkit::discform::{
    disc_form_automorphisms, discriminant_image, lattice_to_disc_image_surjective,
    torsion_form_isomorphic, Decision, SearchCap, Surjectivity,
};
use latkit::embed::{
    glue_data, saturate, transcendental_disc_candidates, unimodular_embedding_obstruction,
    Obstruction,
};
use latkit::extend::{
    coprime_glue_triviality, extend_isometry, extension_criterion, minus_one_obstruction,
    Extension, SplitLattice,
};
use latkit::isometry::{definite_isometries, Isometry, DEFAULT_ISOMETRY_CAP};
use latkit::json::int_matrix_to_json;
use latkit::random::{random_lattice, random_primitive_sublattice, random_unimodular_lattice, seeded};
use latkit::{Parity, Signature};

pub const SUITES: &[&str] = &["paper"];
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TRIALS: u64 = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    TheoremAsserted,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::TheoremAsserted => "theorem-asserted",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub check_id: &'static str,
    pub anchor: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub suite: String,
    pub seed: u64,
    pub trials: u64,
    pub passed: usize,
    pub failed: usize,
    pub theorem_asserted: usize,
    pub status: Status,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn failed(&self) -> bool {
        self.summary.failed > 0
    }

    /// One JSON object per line, summary last.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary).expect("summary serializes"));
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!("{:<17} {:<31} {}\n", r.status.as_str(), r.check_id, r.anchor));
            if r.status == Status::Fail {
                if let Some(w) = &r.witness {
                    out.push_str(&format!("    witness: {w}\n"));
                }
            }
        }
        let s = &self.summary;
        out.push_str(&format!(
            "suite {} seed {} trials {}: {} passed, {} theorem-asserted, {} failed\n",
            s.suite, s.seed, s.trials, s.passed, s.theorem_asserted, s.failed
        ));
        out
    }
}

struct Ctx {
    seed: u64,
    trials: u64,
    cap: SearchCap,
}

type Outcome = (Status, Option<Value>);

fn pass() -> Outcome {
    (Status::Pass, None)
}

fn fail(witness: Value) -> Outcome {
    (Status::Fail, Some(witness))
}

fn error(e: impl std::fmt::Display) -> Outcome {
    fail(json!({"error": e.to_string()}))
}

/// Unwraps a library result inside a check, turning errors into failures.
macro_rules! tryc {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return error(e),
        }
    };
}

type Check = (&'static str, &'static str, fn(&Ctx) -> Outcome);

const CHECKS: &[Check] = &[
    ("catalog-discs", "discriminants, parity and signature of the named lattices", catalog_discs),
    ("glue-order-identity", "|G|^2 disc M = disc L disc L-perp on random sublattices", glue_order_identity),
    ("glue-anti-isometry", "D(L) = -D(L-perp) inside unimodular lattices", glue_anti_isometry),
    ("scaled-embedding-obstruction", "length of D(T(n)) bounds the unimodular embedding rank", scaled_embedding),
    ("isometry-extension", "g + f extends across the glue iff the glue maps agree", isometry_extension),
    ("extension-criterion", "even indefinite same-genus parts with rank >= l + 2", extension_criterion_check),
    ("signature-obstruction", "L = L(-1) forces equal signature components", signature_obstruction),
    ("transcendental-disc-candidates", "disc T in {m, pm} for ambient disc p and glue order m", candidates),
    ("divisibility-three", "a square -6 vector of divisibility 3 in A2(-1) and in OG10", divisibility_three),
    ("coprime-split", "coprime discriminants give D(T-perp) = D(T)(-1) + D(H)", coprime_split),
    ("a2-orthogonal-exhaustive", "u^2 = v^2/3 or 3v^2 for |a|,|b| <= 100", a2_orthogonal_exhaustive),
    ("a2-disc-surjectivity", "O(A2) has order 12 and maps onto O(D(A2))", a2_disc_surjectivity),
];

pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

pub fn run(suite: &str, seed: u64, trials: u64, cap: SearchCap) -> Option<Report> {
    if !SUITES.contains(&suite) {
        return None;
    }
    let ctx = Ctx { seed, trials, cap };
    let records: Vec<Record> = CHECKS
        .iter()
        .map(|&(check_id, anchor, check)| {
            let (status, witness) = check(&ctx);
            Record { check_id, anchor, status, witness }
        })
        .collect();
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let failed = count(Status::Fail);
    let summary = Summary {
        suite: suite.to_string(),
        seed,
        trials,
        passed: count(Status::Pass),
        failed,
        theorem_asserted: count(Status::TheoremAsserted),
        status: if failed > 0 { Status::Fail } else { Status::Pass },
    };
    Some(Report { records, summary })
}

fn v(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

fn unit(n: usize, i: usize) -> Vec<BigInt> {
    (0..n).map(|j| BigInt::from((i == j) as i64)).collect()
}

fn catalog_discs(_: &Ctx) -> Outcome {
    let expect: [(&str, i64, Parity, Signature); 5] = [
        ("OG10", 3, Parity::Even, Signature::new(3, 21)),
        ("K3n(2)", 2, Parity::Even, Signature::new(3, 20)),
        ("Mukai", 1, Parity::Even, Signature::new(4, 20)),
        ("CubicH4", 1, Parity::Odd, Signature::new(21, 2)),
        ("CubicPrim", 3, Parity::Even, Signature::new(20, 2)),
    ];
    for (name, disc, parity, sig) in expect {
        let l = tryc!(catalog::catalog(name));
        if l.disc() != BigInt::from(disc) || l.parity() != parity || l.signature() != sig {
            return fail(json!({
                "lattice": name,
                "disc": l.disc().to_string(),
                "parity": l.parity().to_string(),
                "signature": [l.signature().pos, l.signature().neg],
            }));
        }
    }
    pass()
}

fn glue_order_identity(ctx: &Ctx) -> Outcome {
    let mut rng = seeded(ctx.seed);
    for trial in 0..ctx.trials {
        let m = random_lattice(&mut rng, 8);
        let s = random_primitive_sublattice(&mut rng, &m);
        let g = tryc!(glue_data(&m, &s));
        let r = tryc!(s.basis().vstack(g.complement.basis()));
        let index = r.det().abs();
        let lhs = &g.order * &g.order * m.disc();
        let rhs = s.induced_gram().det().abs() * g.complement.induced_gram().det().abs();
        if lhs != rhs || g.order != index {
            return fail(json!({
                "trial": trial,
                "gram": int_matrix_to_json(m.gram()),
                "basis": int_matrix_to_json(s.basis()),
                "glue_order": g.order.to_string(),
                "index": index.to_string(),
            }));
        }
    }
    pass()
}

fn glue_anti_isometry(ctx: &Ctx) -> Outcome {
    let mut rng = seeded(ctx.seed.wrapping_add(1));
    let cap = ctx.cap.form_order;
    let mut done = 0;
    let mut skipped = 0u64;
    while done < ctx.trials {
        let m = random_unimodular_lattice(&mut rng, 10);
        let s = random_primitive_sublattice(&mut rng, &m);
        let l = tryc!(s.as_lattice());
        // instances are drawn inside the search cap
        if l.disc() > BigInt::from(cap) {
            skipped += 1;
            if skipped > 100 * ctx.trials.max(1) {
                return fail(json!({"error": "no instances inside the search cap", "cap": cap}));
            }
            continue;
        }
        let g = tryc!(glue_data(&m, &s));
        let perp = tryc!(g.complement.as_lattice());
        let (dl, dp) = (l.discriminant_group(), perp.discriminant_group().negate());
        // odd ambients only determine q mod 1, i.e. the bilinear form
        let d = if m.is_even() {
            torsion_form_isomorphic(&dl, &dp, cap)
        } else {
            torsion_form_isomorphic(&dl.bilinear_only(), &dp.bilinear_only(), cap)
        };
        if d != Decision::Yes {
            return fail(json!({
                "trial": done,
                "decision": d.to_string(),
                "ambient": int_matrix_to_json(m.gram()),
                "basis": int_matrix_to_json(s.basis()),
            }));
        }
        done += 1;
    }
    pass()
}

fn scaled_embedding(_: &Ctx) -> Outcome {
    // rank 12, disc 1: T(2) has length 12 > 22 - 12
    let t12 = hyperbolic().power(2).direct_sum(&catalog::e8());
    let cases = [
        (t12, 2, 22, Obstruction::Obstructed),
        (a2(), 2, 24, Obstruction::Inconclusive),
        (a2(), 1, 24, Obstruction::Inconclusive),
        (hyperbolic().power(6), 1, 12, Obstruction::Inconclusive),
    ];
    for (t, n, r, expected) in cases {
        let got = tryc!(unimodular_embedding_obstruction(&t, n, r));
        if got != expected {
            return fail(json!({
                "gram": int_matrix_to_json(t.gram()),
                "scale": n,
                "ambient_rank": r,
                "got": got.to_string(),
            }));
        }
    }
    pass()
}

/// Glue elements as pairs of `D(A)` and `D(T)` coordinates, enumerated from
/// the generators.
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

fn glue_maps_agree(h: &SplitLattice, f: &Isometry, g: &Isometry) -> latkit::Result<bool> {
    let (da, dt) = (&h.glue.form_l, &h.glue.form_perp);
    let act_g = g.discriminant_action(da, da)?;
    let act_f = f.discriminant_action(dt, dt)?;
    let pairs = glue_elements(h);
    Ok(pairs.iter().all(|(x, y)| {
        let image = (da.reduce(&act_g.mul_vec(x)), dt.reduce(&act_f.mul_vec(y)));
        pairs.contains(&image)
    }))
}

fn isometry_extension(_: &Ctx) -> Outcome {
    let u = hyperbolic();
    let i3 = odd_unimodular(3, 0);
    let splits = [
        tryc!(SplitLattice::new(&u, tryc!(saturate(&u, &[v(&[1, 1])])))),
        tryc!(SplitLattice::new(&i3, tryc!(saturate(&i3, &[v(&[1, 1, 1])])))),
    ];
    let (mut extended, mut incompatible) = (0, 0);
    for (k, h) in splits.iter().enumerate() {
        let ga = tryc!(definite_isometries(&h.algebraic_lattice(), DEFAULT_ISOMETRY_CAP));
        let gt = tryc!(definite_isometries(&h.transcendental_lattice(), DEFAULT_ISOMETRY_CAP));
        for g in &ga {
            for f in &gt {
                let agree = tryc!(glue_maps_agree(h, f, g));
                let witness = || {
                    json!({
                        "split": k,
                        "f": int_matrix_to_json(f.matrix()),
                        "g": int_matrix_to_json(g.matrix()),
                        "glue_maps_agree": agree,
                    })
                };
                match tryc!(extend_isometry(h, h, f, g)) {
                    Extension::Extended(iso) => {
                        let m = iso.matrix();
                        let gm = h.total.gram();
                        let bt = h.transcendental.basis().transpose();
                        let ba = h.algebraic.basis().transpose();
                        let ok = agree
                            && &(&(&m.transpose() * gm) * m) == gm
                            && m.det().abs().is_one()
                            && m * &ba == &ba * g.matrix()
                            && m * &bt == &bt * f.matrix();
                        if !ok {
                            return fail(witness());
                        }
                        extended += 1;
                    }
                    Extension::Incompatible(_) => {
                        if agree {
                            return fail(witness());
                        }
                        incompatible += 1;
                    }
                }
            }
        }
    }
    if extended == 0 || incompatible == 0 {
        return fail(json!({"extended": extended, "incompatible": incompatible}));
    }
    pass()
}

fn extension_criterion_check(_: &Ctx) -> Outcome {
    // A = U + A2(-1) inside U + A2(-1) + U^2
    let a = tryc!(a2().rescale_int(-1));
    let a = hyperbolic().direct_sum(&a);
    let m = a.direct_sum(&hyperbolic().power(2));
    let span: Vec<Vec<BigInt>> = (0..4).map(|i| unit(8, i)).collect();
    let h = tryc!(SplitLattice::new(&m, tryc!(saturate(&m, &span))));
    let c = extension_criterion(&h, &h);
    if !c.applies {
        return fail(json!({"reasons": c.reasons}));
    }
    let i3 = odd_unimodular(3, 0);
    let definite = tryc!(SplitLattice::new(&i3, tryc!(saturate(&i3, &[v(&[1, 1, 1])]))));
    let c = extension_criterion(&definite, &definite);
    if c.applies || !c.reasons.iter().any(|r| r == "not indefinite") {
        return fail(json!({"definite_reasons": c.reasons}));
    }
    (Status::TheoremAsserted, None)
}

fn signature_obstruction(_: &Ctx) -> Outcome {
    let cases = [
        (odd_unimodular(2, 20), Obstruction::Obstructed),
        (odd_unimodular(2, 2), Obstruction::Inconclusive),
        (odd_unimodular(21, 2), Obstruction::Obstructed),
        (hyperbolic(), Obstruction::Inconclusive),
        (hyperbolic().power(2), Obstruction::Inconclusive),
        (odd_unimodular(1, 1), Obstruction::Inconclusive),
    ];
    for (l, expected) in cases {
        let got = minus_one_obstruction(&l);
        if got != expected {
            let s = l.signature();
            return fail(json!({"signature": [s.pos, s.neg], "got": got.to_string()}));
        }
    }
    pass()
}

fn candidates(_: &Ctx) -> Outcome {
    let cases: [(u64, u64, &[u64]); 3] = [(3, 1, &[1, 3]), (2, 5, &[5, 10]), (3, 3, &[3, 9])];
    for (p, m, want) in cases {
        let got = tryc!(transcendental_disc_candidates(p, m));
        if got != want.iter().copied().collect::<BTreeSet<u64>>() {
            return fail(json!({"p": p, "m": m, "got": got}));
        }
    }
    if transcendental_disc_candidates(4, 1).is_ok() {
        return fail(json!({"p": 4, "error": "composite p accepted"}));
    }
    pass()
}

fn divisibility_three(_: &Ctx) -> Outcome {
    let block = tryc!(a2().rescale_int(-1));
    let sigma = v(&[1, -1]);
    let (sq, div) = (tryc!(block.square(&sigma)), tryc!(block.divisibility(&sigma)));
    if sq != BigInt::from(-6) || div != BigInt::from(3) {
        return fail(json!({"lattice": "A2(-1)", "square": sq.to_string(), "divisibility": div.to_string()}));
    }
    // the A2(-1) block of OG10 sits at indices 22, 23
    let og = catalog::og10();
    let mut x = vec![BigInt::zero(); og.rank()];
    x[22] = BigInt::one();
    x[23] = -BigInt::one();
    let (sq, div) = (tryc!(og.square(&x)), tryc!(og.divisibility(&x)));
    if sq != BigInt::from(-6) || div != BigInt::from(3) {
        return fail(json!({"lattice": "OG10", "square": sq.to_string(), "divisibility": div.to_string()}));
    }
    pass()
}

fn coprime_split(_: &Ctx) -> Outcome {
    let h = tryc!(k3n(2));
    let n = h.rank();
    // two adjacent roots of the first E8(-1) summand span A2(-1)
    let s = tryc!(saturate(&h, &[unit(n, 6), unit(n, 8)]));
    let t = tryc!(s.as_lattice());
    let c = tryc!(coprime_glue_triviality(&t, &h, &s));
    if t.disc() != BigInt::from(3) || !c.trivial || !c.embedding_certificate || c.split_form != Some(Decision::Yes) {
        return fail(json!({"case": "A2(-1) in K3n(2)", "result": c.to_string()}));
    }
    // the [-2] summand shares its discriminant with K3n(2)
    let s = tryc!(saturate(&h, &[unit(n, n - 1)]));
    let t = tryc!(s.as_lattice());
    let c = tryc!(coprime_glue_triviality(&t, &h, &s));
    if c.trivial || c.embedding_certificate {
        return fail(json!({"case": "[-2] in K3n(2)", "result": c.to_string()}));
    }
    // the A2(-1) block of OG10 carries no glue at all
    let og = catalog::og10();
    let s = tryc!(saturate(&og, &[unit(24, 22), unit(24, 23)]));
    let t = tryc!(s.as_lattice());
    let c = tryc!(coprime_glue_triviality(&t, &og, &s));
    if !c.glue_order.is_one() || !c.glue_certificate {
        return fail(json!({"case": "A2(-1) in OG10", "result": c.to_string()}));
    }
    pass()
}

/// Square of a primitive generator of `v⊥` by direct search, `None` when the
/// search finds nothing or two different squares.
fn brute_square(a: i64, b: i64) -> Option<i64> {
    let bound = 3 * (a.abs() + b.abs());
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
            if x * p + y * q != 0 || y.abs() > bound || (x, y) == (0, 0) || gcd(x, y) != 1 {
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

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn a2_orthogonal_exhaustive(_: &Ctx) -> Outcome {
    for a in -100i64..=100 {
        for b in -100i64..=100 {
            if gcd(a, b) != 1 {
                continue;
            }
            let w = A2Vector::new(a, b);
            let (closed, branch) = tryc!(a2_orthogonal_square_with_branch(w));
            let u = tryc!(a2_orthogonal_generator(w));
            let brute = brute_square(a, b);
            let g = gcd(2 * a - b, 2 * b - a);
            let ok = brute == Some(closed as i64)
                && u.dot(w) == 0
                && u.square() == closed
                && (w.square() % 3 == 0) == (g == 3)
                && (branch == Branch::Third) == (g == 3);
            if !ok {
                return fail(json!({"v": [a, b], "closed_form": closed.to_string(), "brute_force": brute}));
            }
        }
    }
    pass()
}

fn a2_disc_surjectivity(ctx: &Ctx) -> Outcome {
    let lat = a2();
    let group = tryc!(definite_isometries(&lat, ctx.cap.isometry_nodes));
    let auts = tryc!(disc_form_automorphisms(&lat.discriminant_group(), ctx.cap.form_order));
    let image = tryc!(discriminant_image(&lat, ctx.cap));
    let all: HashSet<_> = auts.into_iter().map(|a| a.matrix).collect();
    let surj = lattice_to_disc_image_surjective(&lat, ctx.cap);
    if group.len() != 12 || all.len() != 2 || image != all || surj != Surjectivity::Yes {
        return fail(json!({
            "isometries": group.len(),
            "disc_automorphisms": all.len(),
            "image": image.len(),
        }));
    }
    pass()
}
