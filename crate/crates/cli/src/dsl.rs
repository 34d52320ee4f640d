//! Lattice expressions.
//!
//! ```text
//! Expr     := Term ("+" Term)*
//! Term     := Atom ("^" UInt)?
//! Atom     := Name | Name "(" Rational ")" | "[" Int ("," Int)* "]"
//!           | "I(" UInt "," UInt ")" | "gram[" Row ("," Row)* "]"
//! Row      := "[" Int ("," Int)* "]"
//! Rational := Int | Int "/" UInt
//! ```
//!
//! Whitespace is ignored between tokens. `K3n(n)` is the one name whose
//! argument selects a family member instead of rescaling.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use latkit::catalog::{self, k3n, odd_unimodular};
use latkit::{IntMatrix, Lattice};

/// Names usable as atoms; `E8(-1)` is the rescale `E8` by `-1`.
pub const NAMES: &[&str] = &[
    "U", "A2", "E8", "CubicH4", "CubicPrim", "Mukai", "OG10", "K3", "Lambda24", "Lambda26",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Name(String),
    Diagonal(Vec<BigInt>),
    Gram(Vec<Vec<BigInt>>),
    Odd(usize, usize),
    K3n(BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeExpr {
    Atom(Atom),
    /// `Name(q)`.
    Rescale(String, BigRational),
    Power(Box<LatticeExpr>, u32),
    Sum(Vec<LatticeExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("parse error at offset {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<String>, found: String },
    #[error("unknown lattice name `{name}` at offset {offset}")]
    UnknownName { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownName { offset, .. } => *offset,
        }
    }

    pub fn expected(&self) -> &[String] {
        match self {
            ParseError::Syntax { expected, .. } => expected,
            ParseError::UnknownName { .. } => &[],
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn error(&mut self, expected: &[&str]) -> ParseError {
        let found = match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_string(),
        };
        ParseError::Syntax {
            offset: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{c}`")]))
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn uint(&mut self) -> Result<BigInt, ParseError> {
        match self.digits() {
            Some(d) => Ok(d.parse().expect("ascii digits")),
            None => Err(self.error(&["unsigned integer"])),
        }
    }

    fn small_uint<T: TryFrom<BigInt>>(&mut self) -> Result<T, ParseError> {
        let start = self.pos;
        let n = self.uint()?;
        T::try_from(n).map_err(|_| ParseError::Syntax {
            offset: start,
            expected: vec!["smaller unsigned integer".into()],
            found: "overflow".into(),
        })
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        let neg = self.eat('-');
        match self.digits() {
            Some(d) => {
                let n: BigInt = d.parse().expect("ascii digits");
                Ok(if neg { -n } else { n })
            }
            None => Err(self.error(&["integer"])),
        }
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let n = self.int()?;
        if !self.eat('/') {
            return Ok(BigRational::from_integer(n));
        }
        let start = self.pos;
        let d = self.uint()?;
        if d.is_zero() {
            return Err(ParseError::Syntax {
                offset: start,
                expected: vec!["positive denominator".into()],
                found: "`0`".into(),
            });
        }
        Ok(BigRational::new(n, d))
    }

    fn int_list(&mut self) -> Result<Vec<BigInt>, ParseError> {
        self.expect('[')?;
        let mut out = vec![self.int()?];
        while self.eat(',') {
            out.push(self.int()?);
        }
        self.expect(']')?;
        Ok(out)
    }

    fn name(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        if !rest.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return None;
        }
        let len = rest.bytes().take_while(u8::is_ascii_alphanumeric).count();
        self.pos += len;
        Some((start, &rest[..len]))
    }

    fn atom(&mut self) -> Result<LatticeExpr, ParseError> {
        if self.peek() == Some('[') {
            return Ok(LatticeExpr::Atom(Atom::Diagonal(self.int_list()?)));
        }
        let Some((start, name)) = self.name() else {
            return Err(self.error(&["lattice name", "`[`"]));
        };
        match name {
            "I" => {
                self.expect('(')?;
                let p = self.small_uint()?;
                self.expect(',')?;
                let q = self.small_uint()?;
                self.expect(')')?;
                Ok(LatticeExpr::Atom(Atom::Odd(p, q)))
            }
            "gram" => {
                self.expect('[')?;
                let mut rows = vec![self.int_list()?];
                while self.eat(',') {
                    rows.push(self.int_list()?);
                }
                self.expect(']')?;
                Ok(LatticeExpr::Atom(Atom::Gram(rows)))
            }
            "K3n" => {
                self.expect('(')?;
                let n = self.int()?;
                self.expect(')')?;
                Ok(LatticeExpr::Atom(Atom::K3n(n)))
            }
            n if NAMES.contains(&n) => {
                if self.eat('(') {
                    let q = self.rational()?;
                    self.expect(')')?;
                    Ok(LatticeExpr::Rescale(n.to_string(), q))
                } else {
                    Ok(LatticeExpr::Atom(Atom::Name(n.to_string())))
                }
            }
            other => Err(ParseError::UnknownName { offset: start, name: other.to_string() }),
        }
    }

    fn term(&mut self) -> Result<LatticeExpr, ParseError> {
        let atom = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            let n: u32 = self.small_uint()?;
            if n == 0 {
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: vec!["positive exponent".into()],
                    found: "`0`".into(),
                });
            }
            return Ok(LatticeExpr::Power(Box::new(atom), n));
        }
        Ok(atom)
    }

    fn expr(&mut self) -> Result<LatticeExpr, ParseError> {
        let mut terms = vec![self.term()?];
        while self.eat('+') {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one term") } else { LatticeExpr::Sum(terms) })
    }
}

pub fn parse_lattice_expr(text: &str) -> Result<LatticeExpr, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error(&["`+`", "`^`", "end of input"]));
    }
    Ok(e)
}

fn join(xs: &[BigInt]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Name(n) => f.write_str(n),
            Atom::Diagonal(d) => write!(f, "[{}]", join(d)),
            Atom::Gram(rows) => {
                let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", join(r))).collect();
                write!(f, "gram[{}]", rows.join(","))
            }
            Atom::Odd(p, q) => write!(f, "I({p},{q})"),
            Atom::K3n(n) => write!(f, "K3n({n})"),
        }
    }
}

/// Canonical form: no spaces except around `+`, reduced rationals.
impl fmt::Display for LatticeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeExpr::Atom(a) => a.fmt(f),
            LatticeExpr::Rescale(n, q) => write!(f, "{n}({q})"),
            LatticeExpr::Power(e, k) => write!(f, "{e}^{k}"),
            LatticeExpr::Sum(terms) => {
                let parts: Vec<String> = terms.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join(" + "))
            }
        }
    }
}

impl LatticeExpr {
    pub fn eval(&self) -> latkit::Result<Lattice> {
        match self {
            LatticeExpr::Atom(Atom::Name(n)) => catalog::catalog(n),
            LatticeExpr::Atom(Atom::Diagonal(d)) => Lattice::diagonal(d),
            LatticeExpr::Atom(Atom::Gram(rows)) => Lattice::new(IntMatrix::from_rows(rows.clone())?),
            LatticeExpr::Atom(Atom::Odd(p, q)) => Ok(odd_unimodular(*p, *q)),
            LatticeExpr::Atom(Atom::K3n(n)) => {
                let n = i64::try_from(n)
                    .map_err(|_| latkit::Error::InvalidArgument(format!("K3n({n}) is out of range")))?;
                k3n(n)
            }
            LatticeExpr::Rescale(n, q) => {
                let base = catalog::catalog(n)?;
                if q.is_one() {
                    Ok(base)
                } else {
                    base.rescale(q)
                }
            }
            LatticeExpr::Power(e, k) => Ok(e.eval()?.power(*k as usize)),
            LatticeExpr::Sum(terms) => {
                let mut acc = Lattice::zero();
                for t in terms {
                    acc = acc.direct_sum(&t.eval()?);
                }
                Ok(acc)
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Lattice(#[from] latkit::Error),
}

/// Parses and evaluates.
pub fn lattice(text: &str) -> Result<Lattice, ExprError> {
    Ok(parse_lattice_expr(text)?.eval()?)
}
