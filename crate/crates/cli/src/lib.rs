//! Command-line front end for `latkit`.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage,
//! parse or input errors.

pub mod dsl;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use latkit::a2::{a2_orthogonal_generator, a2_orthogonal_square_with_branch, A2Vector, Branch};
use latkit::discform::{genus_tuple, same_genus, SearchCap};
use latkit::embed::{glue_data, saturate, transcendental_disc_candidates, unimodular_embedding_obstruction};
use latkit::extend::{extend_isometry, Extension, SplitLattice};
use latkit::json::{
    glue_graph_to_json, int_matrix_from_json, int_to_json, int_matrix_to_json, int_vec_to_json, lattice_from_json,
    torsion_to_json,
};
use latkit::{IntMatrix, Isometry, Lattice};

use dsl::ExprError;

#[derive(Debug, Parser)]
#[command(name = "latkit", version, about = "Exact computations with integral lattices")]
pub struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discriminant |det G| of a lattice expression.
    Disc { expr: String },
    /// Signature (pos, neg).
    Sig { expr: String },
    /// Whether two lattices share signature, parity and discriminant form.
    GenusEq { left: String, right: String },
    /// Glue between the saturated span and its orthogonal complement.
    Glue {
        expr: String,
        /// Vectors separated by `;`, entries by `,`, e.g. `1,1;0,1`.
        #[arg(long, allow_hyphen_values = true)]
        span: String,
    },
    /// Whether T(n) cannot embed primitively in a unimodular lattice of the given rank.
    Obstruct {
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        scale: i64,
        #[arg(long)]
        ambient_rank: usize,
    },
    /// Orthogonal complements of primitive vectors of A2.
    A2 {
        /// Check every primitive vector with |a|, |b| <= N.
        #[arg(long, conflicts_with = "vector")]
        bound: Option<i64>,
        /// A single vector `a,b`.
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
    },
    /// Admissible transcendental discriminants {m, pm}.
    Candidates {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        glue: u64,
    },
    /// Extend g + f across the glue of a split lattice described in a JSON file.
    Extend {
        #[arg(long)]
        case: PathBuf,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = verify::DEFAULT_TRIALS)]
        trials: u64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Lattice(#[from] latkit::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lattice(latkit::Error::InvariantViolated(_)) => 1,
            _ => 2,
        }
    }
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Default)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_command<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok((code, stdout)) => Output { code, stdout, stderr: String::new() },
        Err(e) => Output { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn lattice(expr: &str) -> Result<Lattice, CliError> {
    Ok(dsl::lattice(expr)?)
}

fn render(json_mode: bool, value: Value, text: String) -> String {
    if json_mode {
        format!("{}\n", serde_json::to_string_pretty(&value).expect("values serialize"))
    } else {
        text
    }
}

fn parse_ints(s: &str) -> Result<Vec<BigInt>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| CliError::Usage(format!("`{}` is not an integer", x.trim()))))
        .collect()
}

fn execute(cli: &Cli) -> Result<(i32, String), CliError> {
    let j = cli.json;
    match &cli.command {
        Command::Disc { expr } => {
            let l = lattice(expr)?;
            let d = l.discriminant_group();
            let value = json!({
                "disc": int_to_json(&l.disc()),
                "length": d.length(),
                "discriminant_form": torsion_to_json(&d),
            });
            Ok((0, render(j, value, format!("{}\n", l.disc()))))
        }
        Command::Sig { expr } => {
            let s = lattice(expr)?.signature();
            Ok((0, render(j, json!({"pos": s.pos, "neg": s.neg}), format!("({},{})\n", s.pos, s.neg))))
        }
        Command::GenusEq { left, right } => {
            let (a, b) = (lattice(left)?, lattice(right)?);
            let cap = SearchCap::from_env()?;
            let c = same_genus(&a, &b, cap.form_order);
            let describe = |l: &Lattice| {
                let g = genus_tuple(l);
                json!({
                    "signature": [g.signature.pos, g.signature.neg],
                    "parity": g.parity.to_string(),
                    "discriminant_form": g.disc_form.to_string(),
                })
            };
            let mut text = format!("{}\n", c.decision);
            if c.bilinear_only {
                text.push_str("note: odd lattice involved; discriminant bilinear forms compared\n");
            }
            let value = json!({
                "decision": c.decision,
                "bilinear_only": c.bilinear_only,
                "left": describe(&a),
                "right": describe(&b),
            });
            Ok((0, render(j, value, text)))
        }
        Command::Glue { expr, span } => {
            let m = lattice(expr)?;
            let vectors: Vec<Vec<BigInt>> = span
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(parse_ints)
                .collect::<Result<_, _>>()?;
            let s = saturate(&m, &vectors)?;
            let g = glue_data(&m, &s)?;
            let l = s.as_lattice()?;
            let perp = g.complement.as_lattice()?;
            let mut text = format!(
                "sublattice basis {}\ncomplement basis {}\ndisc L = {}, disc L-perp = {}, disc M = {}\nglue order {}\nD(L) = {}\nD(L-perp) = {}\n",
                s.basis(),
                g.complement.basis(),
                l.disc(),
                perp.disc(),
                m.disc(),
                g.order,
                g.form_l,
                g.form_perp
            );
            for (i, v) in g.generators.iter().enumerate() {
                let coords: Vec<String> = v.iter().map(ToString::to_string).collect();
                text.push_str(&format!(
                    "generator {i}: ({}) of order {}\n",
                    coords.join(","),
                    g.generator_orders[i]
                ));
            }
            let value = json!({
                "sublattice_basis": int_matrix_to_json(s.basis()),
                "complement_basis": int_matrix_to_json(g.complement.basis()),
                "order": g.order.to_string(),
                "generators": g.generators.iter().map(|v| int_vec_to_json(v)).collect::<Vec<_>>(),
                "generator_orders": int_vec_to_json(&g.generator_orders),
                "graph": glue_graph_to_json(&g.projections),
                "form_l": torsion_to_json(&g.form_l),
                "form_perp": torsion_to_json(&g.form_perp),
            });
            Ok((0, render(j, value, text)))
        }
        Command::Obstruct { expr, scale, ambient_rank } => {
            let t = lattice(expr)?;
            let o = unimodular_embedding_obstruction(&t, *scale, *ambient_rank)?;
            Ok((0, render(j, json!({"result": o}), format!("{o}\n"))))
        }
        Command::A2 { bound, vector } => match vector {
            Some(v) => a2_vector(j, v),
            None => a2_bound(j, bound.unwrap_or(100)),
        },
        Command::Candidates { prime, glue } => {
            let set = transcendental_disc_candidates(*prime, *glue)?;
            let items: Vec<String> = set.iter().map(ToString::to_string).collect();
            Ok((0, render(j, json!(set), format!("{{{}}}\n", items.join(", ")))))
        }
        Command::Extend { case } => extend_case(j, case),
        Command::Verify { suite, seed, trials } => {
            let cap = SearchCap::from_env()?;
            let report = verify::run(suite, *seed, *trials, cap).ok_or_else(|| {
                CliError::Usage(format!("unknown suite `{suite}`; known: {}", verify::SUITES.join(", ")))
            })?;
            let out = if j { report.to_ndjson() } else { report.to_text() };
            Ok((if report.failed() { 1 } else { 0 }, out))
        }
    }
}

fn a2_vector(j: bool, v: &str) -> Result<(i32, String), CliError> {
    let xs = parse_ints(v)?;
    let [a, b] = xs.as_slice() else {
        return Err(CliError::Usage("--vector takes two integers `a,b`".into()));
    };
    let conv = |x: &BigInt| i64::try_from(x).map_err(|_| CliError::Usage(format!("{x} is too large")));
    let given = A2Vector::new(conv(a)?, conv(b)?);
    let w = given.primitive_part()?;
    let u = a2_orthogonal_generator(w)?;
    let (sq, branch) = a2_orthogonal_square_with_branch(w)?;
    let mut text = String::new();
    if w != given {
        text.push_str(&format!("note: {given} is not primitive; using {w}\n"));
    }
    text.push_str(&format!("v = {w}, v² = {}\nu = {u}\nu² = {sq}\nbranch {branch}\n", w.square()));
    let value = json!({
        "v": w.coords(),
        "v_square": w.square().to_string(),
        "u": u.coords(),
        "u_square": sq.to_string(),
        "branch": branch,
        "normalized": w != given,
    });
    Ok((0, render(j, value, text)))
}

fn a2_bound(j: bool, n: i64) -> Result<(i32, String), CliError> {
    if !(1..=10_000).contains(&n) {
        return Err(CliError::Usage("--bound must be between 1 and 10000".into()));
    }
    let (mut third, mut triple, mut mismatches) = (0u64, 0u64, Vec::new());
    for a in -n..=n {
        for b in -n..=n {
            let w = A2Vector::new(a, b);
            if !w.is_primitive() {
                continue;
            }
            let (sq, branch) = a2_orthogonal_square_with_branch(w)?;
            let u = a2_orthogonal_generator(w)?;
            match branch {
                Branch::Third => third += 1,
                Branch::Triple => triple += 1,
            }
            let (_, _, g) = w.pqg();
            if u.dot(w) != 0 || u.square() != sq || (branch == Branch::Third) != (g == 3) {
                mismatches.push(w);
            }
        }
    }
    let text = format!(
        "{} primitive vectors with |a|,|b| <= {n}: {third} with u² = v²/3, {triple} with u² = 3v², {} mismatches\n",
        third + triple,
        mismatches.len()
    );
    let value = json!({
        "bound": n,
        "vectors": third + triple,
        "third": third,
        "triple": triple,
        "mismatches": mismatches.iter().map(|w| w.coords()).collect::<Vec<_>>(),
    });
    Ok((if mismatches.is_empty() { 0 } else { 1 }, render(j, value, text)))
}

/// Reads `{"total", "algebraic", "total_prime"?, "algebraic_prime"?, "f", "g"}`.
/// `f` and `g` are matrices in the bases of T and A, or `"id"` / `"-id"`.
fn extend_case(j: bool, path: &PathBuf) -> Result<(i32, String), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let case: Value = serde_json::from_str(&text)?;
    let field = |k: &str| case.get(k).ok_or_else(|| CliError::Usage(format!("case is missing `{k}`")));
    let split = |total: &Value, basis: &Value| -> Result<SplitLattice, CliError> {
        let m = lattice_from_json(total)?;
        let b = int_matrix_from_json(basis, Some(m.rank()))?;
        Ok(SplitLattice::new(&m, latkit::PrimitiveSublattice::from_basis(&m, b)?)?)
    };
    let h = split(field("total")?, field("algebraic")?)?;
    let hp = match (case.get("total_prime"), case.get("algebraic_prime")) {
        (None, None) => h.clone(),
        (Some(t), Some(a)) => split(t, a)?,
        _ => return Err(CliError::Usage("give both `total_prime` and `algebraic_prime` or neither".into())),
    };
    let piece = |key: &str, src: Lattice, dst: Lattice| -> Result<Isometry, CliError> {
        let v = field(key)?;
        let n = src.rank();
        let m = match v.as_str() {
            Some("id") => IntMatrix::identity(n),
            Some("-id") => IntMatrix::identity(n).map(|x| -x),
            Some(other) => return Err(CliError::Usage(format!("`{key}` must be a matrix, \"id\" or \"-id\", not `{other}`"))),
            None => int_matrix_from_json(v, Some(n))?,
        };
        Ok(Isometry::new(src, dst, m)?)
    };
    let f = piece("f", h.transcendental_lattice(), hp.transcendental_lattice())?;
    let g = piece("g", h.algebraic_lattice(), hp.algebraic_lattice())?;
    let bases = json!({
        "algebraic_basis": int_matrix_to_json(h.algebraic.basis()),
        "transcendental_basis": int_matrix_to_json(h.transcendental.basis()),
        "glue_order": h.glue.order.to_string(),
    });
    match extend_isometry(&h, &hp, &f, &g)? {
        Extension::Extended(iso) => {
            let value = json!({"result": "extended", "matrix": int_matrix_to_json(iso.matrix()), "split": bases});
            let text = format!(
                "extended\nT basis {}\nglue order {}\nh = {}\n",
                h.transcendental.basis(),
                h.glue.order,
                iso.matrix()
            );
            Ok((0, render(j, value, text)))
        }
        Extension::Incompatible(w) => {
            let value = json!({
                "result": "incompatible",
                "witness": {
                    "generator": w.generator,
                    "vector": int_vec_to_json(&w.vector),
                    "image_via_g": int_vec_to_json(&w.image_via_g),
                    "image_via_f": int_vec_to_json(&w.image_via_f),
                    "image_via_f_in_a": w.image_via_f_in_a.as_deref().map(int_vec_to_json),
                },
                "split": bases,
            });
            let via_f_in_a = match &w.image_via_f_in_a {
                Some(x) => format!("{x:?}"),
                None => "outside the glue".to_string(),
            };
            let text = format!(
                "incompatible\nT basis {}\nglue order {}\nglue generator {} = {:?}: g gives {:?} in D(A'), f gives {:?} in D(T') ({} in D(A'))\n",
                h.transcendental.basis(),
                h.glue.order,
                w.generator,
                w.vector,
                w.image_via_g,
                w.image_via_f,
                via_f_in_a
            );
            Ok((0, render(j, value, text)))
        }
    }
}
