//! Smith and Hermite normal forms over the integers, with transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

/// `left · a · right = diag(diagonal)` with `left`, `right` unimodular.
///
/// `diagonal` has length `min(rows, cols)`, is nonnegative and forms a
/// divisibility chain; zeros (if any) come last.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub left_inv: IntMatrix,
    pub right: IntMatrix,
    pub right_inv: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !d.is_zero()).count()
    }
}

struct Calc {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Calc {
    // row_i += k * row_j on a and u; inverse op on u_inv (column j -= k * column i)
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols() {
                let d = k * &m[(j, c)];
                m[(i, c)] += d;
            }
        }
        let m = &mut self.u_inv;
        for r in 0..m.rows() {
            let d = k * &m[(r, i)];
            m[(r, j)] -= d;
        }
    }

    // col_i += k * col_j on a and v; inverse op on v_inv (row j -= k * row i)
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows() {
                let d = k * &m[(r, j)];
                m[(r, i)] += d;
            }
        }
        let m = &mut self.v_inv;
        for c in 0..m.cols() {
            let d = k * &m[(i, c)];
            m[(j, c)] -= d;
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.a.cols() {
            self.a[(i, c)] = -&self.a[(i, c)];
        }
        for c in 0..self.u.cols() {
            self.u[(i, c)] = -&self.u[(i, c)];
        }
        for r in 0..self.u_inv.rows() {
            self.u_inv[(r, i)] = -&self.u_inv[(r, i)];
        }
    }
}

/// Smith normal form with unimodular transforms on both sides.
pub fn smith(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut c = Calc {
        a: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    let steps = m.min(n);
    'outer: for t in 0..steps {
        loop {
            // pivot: smallest nonzero absolute value in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &c.a[(i, j)];
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < c.a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break 'outer };
            c.swap_rows(t, pi);
            c.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if c.a[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&c.a[(i, t)] / &c.a[(t, t)]);
                c.add_row(i, t, &q);
                if !c.a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if c.a[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&c.a[(t, j)] / &c.a[(t, t)]);
                c.add_col(j, t, &q);
                if !c.a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let piv = c.a[(t, t)].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !c.a[(i, j)].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    c.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if c.a[(t, t)].is_negative() {
            c.negate_row(t);
        }
    }
    let diagonal = (0..steps).map(|i| c.a[(i, i)].clone()).collect();
    SmithForm { diagonal, left: c.u, left_inv: c.u_inv, right: c.v, right_inv: c.v_inv }
}

/// Row-style Hermite normal form with zero rows removed.
///
/// The rows of the result are a canonical basis of the row lattice of `a`:
/// pivots are positive and entries above a pivot lie in `[0, pivot)`.
pub fn hermite_rows(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    let (m, n) = (h.rows(), h.cols());
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if h[(i, col)].is_zero() {
                    continue;
                }
                if best.is_none_or(|b| h[(i, col)].abs() < h[(b, col)].abs()) {
                    best = Some(i);
                }
            }
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[(i, col)].is_zero() {
                    continue;
                }
                let q = &h[(i, col)] / &h[(r, col)];
                for j in col..n {
                    let d = &q * &h[(r, j)];
                    h[(i, j)] -= d;
                }
                if !h[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, col)].is_zero() {
            continue;
        }
        if h[(r, col)].is_negative() {
            for j in col..n {
                h[(r, j)] = -&h[(r, j)];
            }
        }
        for i in 0..r {
            let q = h[(i, col)].div_floor(&h[(r, col)]);
            if q.is_zero() {
                continue;
            }
            for j in col..n {
                let d = &q * &h[(r, j)];
                h[(i, j)] -= d;
            }
        }
        r += 1;
    }
    h.select_rows(&(0..r).collect::<Vec<_>>())
}

/// A basis (as rows) of `{x ∈ ℤⁿ : a·x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let s = smith(a);
    let r = s.rank();
    let idx: Vec<usize> = (r..a.cols()).collect();
    s.right.select_cols(&idx).transpose()
}

/// A ℤ-basis (as rows) of `(ℚ-span of the rows of a) ∩ ℤⁿ`.
pub fn saturation(a: &IntMatrix) -> IntMatrix {
    let s = smith(a);
    let r = s.rank();
    let idx: Vec<usize> = (0..r).collect();
    hermite_rows(&s.right_inv.select_rows(&idx))
}

/// Order of the subgroup of `⊕ ℤ/dᵢ` generated by `gens` (coordinate vectors).
pub fn subgroup_order(gens: &[Vec<BigInt>], factors: &[BigInt]) -> BigInt {
    let k = factors.len();
    if k == 0 {
        return BigInt::one();
    }
    let mut rows: Vec<Vec<BigInt>> = gens.to_vec();
    for (i, d) in factors.iter().enumerate() {
        let mut r = vec![BigInt::zero(); k];
        r[i] = d.clone();
        rows.push(r);
    }
    let m = IntMatrix::from_rows_with_cols(rows, k).expect("uniform rows");
    let index: BigInt = smith(&m).diagonal.iter().product();
    let total: BigInt = factors.iter().product();
    total / index
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &IntMatrix) -> SmithForm {
        let s = smith(a);
        let d = &(&s.left * a) * &s.right;
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i == j {
                    assert_eq!(d[(i, j)], s.diagonal[i]);
                } else {
                    assert!(d[(i, j)].is_zero(), "off-diagonal entry in {d}");
                }
            }
        }
        assert_eq!(&s.left * &s.left_inv, IntMatrix::identity(a.rows()));
        assert_eq!(&s.right * &s.right_inv, IntMatrix::identity(a.cols()));
        for w in s.diagonal.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        s
    }

    #[test]
    fn a2_and_scaled_a2() {
        let s = check(&IntMatrix::from_i64_rows(&[&[2, -1], &[-1, 2]]));
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(3)]);
        let s = check(&IntMatrix::from_i64_rows(&[&[4, -2], &[-2, 4]]));
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6)]);
    }

    #[test]
    fn rectangular_and_zero() {
        let s = check(&IntMatrix::from_i64_rows(&[&[2, 4, 6], &[4, 8, 12]]));
        assert_eq!(s.rank(), 1);
        check(&IntMatrix::zeros(2, 3));
        check(&IntMatrix::zeros(0, 0));
    }

    #[test]
    fn hermite_is_canonical() {
        let a = IntMatrix::from_i64_rows(&[&[2, 2], &[0, 0]]);
        assert_eq!(hermite_rows(&a), IntMatrix::from_i64_rows(&[&[2, 2]]));
        let a = IntMatrix::from_i64_rows(&[&[3, 1], &[1, 1]]);
        let b = IntMatrix::from_i64_rows(&[&[1, 1], &[4, 2]]);
        assert_eq!(hermite_rows(&a), hermite_rows(&b));
    }

    #[test]
    fn kernel_and_saturation() {
        let a = IntMatrix::from_i64_rows(&[&[1, 1, 0]]);
        let k = integer_kernel(&a);
        assert_eq!(k.rows(), 2);
        for i in 0..2 {
            assert!(a.mul_vec(k.row(i)).iter().all(Zero::is_zero));
        }
        let s = saturation(&IntMatrix::from_i64_rows(&[&[2, 2]]));
        assert_eq!(s, IntMatrix::from_i64_rows(&[&[1, 1]]));
    }

    #[test]
    fn subgroup_orders() {
        let f = vec![BigInt::from(2), BigInt::from(6)];
        assert_eq!(subgroup_order(&[vec![1.into(), 0.into()]], &f), BigInt::from(2));
        assert_eq!(subgroup_order(&[vec![0.into(), 2.into()]], &f), BigInt::from(3));
        assert_eq!(subgroup_order(&[vec![1.into(), 1.into()]], &f), BigInt::from(6));
        assert_eq!(subgroup_order(&[], &f), BigInt::from(1));
    }

    proptest! {
        #[test]
        fn smith_contract(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-9i64..10, 25)) {
            let a = IntMatrix::from_fn(rows, cols, |i, j| BigInt::from(seed[i * 5 + j]));
            let s = check(&a);
            let prod: BigInt = s.diagonal.iter().product();
            if rows == cols {
                prop_assert_eq!(prod, a.det().abs());
            }
        }

        #[test]
        fn hermite_spans_same_lattice(seed in proptest::collection::vec(-6i64..7, 12)) {
            let a = IntMatrix::from_fn(3, 4, |i, j| BigInt::from(seed[i * 4 + j]));
            let h = hermite_rows(&a);
            // same row lattice: stacking does not change the HNF
            prop_assert_eq!(hermite_rows(&h.vstack(&a).unwrap()), h.clone());
            prop_assert_eq!(hermite_rows(&h), h);
        }
    }
}
