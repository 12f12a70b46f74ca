//! Smith normal form with explicit unimodular transforms.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::serde_ext;

pub type IntMatrix = Vec<Vec<BigInt>>;

/// `left * input * right = diag`, with `diag` padded to the input's shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithDecomposition {
    #[serde(with = "serde_ext::int_matrix")]
    pub left: IntMatrix,
    #[serde(with = "serde_ext::dec_string_vec")]
    pub diag: Vec<BigInt>,
    #[serde(with = "serde_ext::int_matrix")]
    pub right: IntMatrix,
}

impl SmithDecomposition {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(BigInt::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<BigInt>]) -> IntMatrix {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    rows: usize,
    cols: usize,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
    }

    /// row_i -= q * row_j
    fn sub_row(&mut self, i: usize, j: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let (ri, rj) = if i < j {
                let (lo, hi) = m.split_at_mut(j);
                (&mut lo[i], &hi[0])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&mut hi[0], &lo[j])
            };
            for (x, y) in ri.iter_mut().zip(rj) {
                *x -= q * y;
            }
        }
    }

    /// col_i -= q * col_j
    fn sub_col(&mut self, i: usize, j: usize, q: &BigInt) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            let y = row[j].clone();
            row[i] -= q * y;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -&*x;
        }
    }

    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn run(&mut self) {
        let steps = self.rows.min(self.cols);
        for t in 0..steps {
            loop {
                let Some((pi, pj)) = self.min_pivot(t) else {
                    return;
                };
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
                let pivot = self.a[t][t].clone();
                let mut clean = true;
                for i in t + 1..self.rows {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = &self.a[i][t] / &pivot;
                    self.sub_row(i, t, &q);
                    clean &= self.a[i][t].is_zero();
                }
                for j in t + 1..self.cols {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = &self.a[t][j] / &pivot;
                    self.sub_col(j, t, &q);
                    clean &= self.a[t][j].is_zero();
                }
                if !clean {
                    continue;
                }
                let offender = (t + 1..self.rows).find(|&i| {
                    (t + 1..self.cols).any(|j| !(&self.a[i][j] % &pivot).is_zero())
                });
                match offender {
                    Some(i) => {
                        // row_t += row_i brings a non-multiple into the pivot row
                        self.sub_row(t, i, &BigInt::from(-1));
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

/// Smith normal form of an arbitrary integer matrix.
pub fn smith_normal_form(m: &[Vec<BigInt>]) -> SmithDecomposition {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = Reducer {
        a: m.to_vec(),
        u: identity(rows),
        v: identity(cols),
        rows,
        cols,
    };
    r.run();
    let diag = (0..rows.min(cols)).map(|i| r.a[i][i].clone()).collect();
    SmithDecomposition {
        left: r.u,
        diag,
        right: r.v,
    }
}

/// Integer basis of the kernel `{x : m x = 0}`, one basis vector per column.
pub fn integer_kernel(m: &[Vec<BigInt>]) -> IntMatrix {
    let cols = m.first().map_or(0, Vec::len);
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    snf.right
        .iter()
        .map(|row| row[rank..cols].to_vec())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn check(input: &IntMatrix, snf: &SmithDecomposition) {
        let prod = mat_mul(&mat_mul(&snf.left, input), &snf.right);
        for (i, row) in prod.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let expect = if i == j { snf.diag[i].clone() } else { BigInt::zero() };
                assert_eq!(*x, expect);
            }
        }
        for w in snf.diag.windows(2) {
            if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero());
            } else {
                assert!(w[1].is_zero());
            }
        }
    }

    #[test]
    fn worked_examples() {
        let a = m(&[&[0, 3], &[3, 2]]);
        let s = smith_normal_form(&a);
        check(&a, &s);
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(9)]);

        let a = m(&[&[2, 0], &[0, 4]]);
        assert_eq!(smith_normal_form(&a).diag, vec![BigInt::from(2), BigInt::from(4)]);

        let a = identity(3);
        assert!(smith_normal_form(&a).diag.iter().all(One::is_one));
    }

    #[test]
    fn divisibility_fixup() {
        let a = m(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&a);
        check(&a, &s);
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn rectangular_and_kernel() {
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 6, 9]]);
        let s = smith_normal_form(&a);
        check(&a, &s);
        let k = integer_kernel(&a);
        assert_eq!(k[0].len(), 2);
        let prod = mat_mul(&a, &k);
        assert!(prod.iter().flatten().all(Zero::is_zero));
    }
}
