//! Even integral lattices given by Gram matrices.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::exact_sqrt;
use crate::error::{Error, Result};
use crate::serde_ext;
use crate::snf::{self, IntMatrix, SmithDecomposition};

/// A nondegenerate even lattice, stored as its symmetric Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GramDoc", into = "GramDoc")]
pub struct GramLattice {
    gram: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct GramDoc {
    #[serde(with = "serde_ext::int_matrix")]
    gram: IntMatrix,
}

impl TryFrom<GramDoc> for GramLattice {
    type Error = Error;
    fn try_from(doc: GramDoc) -> Result<Self> {
        GramLattice::new(doc.gram)
    }
}

impl From<GramLattice> for GramDoc {
    fn from(l: GramLattice) -> Self {
        GramDoc { gram: l.gram }
    }
}

/// Coordinates of a lattice vector in the lattice's basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeVector {
    #[serde(with = "serde_ext::int_vec")]
    pub coords: Vec<BigInt>,
}

impl LatticeVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        LatticeVector { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

/// Outcome of an isotropic-vector query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Isotropy {
    Yes(LatticeVector),
    No,
    /// Nothing found in the coordinate box; not a proof of anisotropy.
    Unknown { bound: u64 },
}

/// The standard building blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardKind {
    /// The hyperbolic plane.
    U,
    /// The hyperbolic plane scaled by `n`.
    ScaledU,
    /// The rank-one lattice with generator of norm `2n`.
    Rank1,
}

impl GramLattice {
    /// Validates a Gram matrix: square, symmetric, even diagonal, nonzero determinant.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        let n = gram.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for (row, r) in gram.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), expected: n });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        for (index, r) in gram.iter().enumerate() {
            if r[index].is_odd() {
                return Err(Error::NotEven { index, value: r[index].clone() });
            }
        }
        if bareiss_det(&gram).is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(GramLattice { gram })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        GramLattice::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.gram[i][j]
    }

    pub fn determinant(&self) -> BigInt {
        bareiss_det(&self.gram)
    }

    /// `(n_plus, n_minus)` by exact rational congruence diagonalization.
    pub fn signature(&self) -> (usize, usize) {
        let diag = congruence_diagonal(&self.gram);
        let plus = diag.iter().filter(|d| d.is_positive()).count();
        (plus, diag.len() - plus)
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.signature().0 == 1
    }

    /// Errors unless the signature is `(1, rank - 1)`.
    pub fn require_hyperbolic(&self) -> Result<()> {
        let (plus, minus) = self.signature();
        if plus == 1 {
            Ok(())
        } else {
            Err(Error::WrongSignature {
                expected: format!("(1, {})", self.rank() - 1),
                plus,
                minus,
            })
        }
    }

    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                acc += xi * &self.gram[i][j] * yj;
            }
        }
        acc
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.pair(x, x)
    }

    /// Bilinear pairing of rational coordinate vectors.
    pub fn pair_rational(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc += xi * yj * BigRational::from_integer(self.gram[i][j].clone());
            }
        }
        acc
    }

    pub fn direct_sum(&self, other: &GramLattice) -> GramLattice {
        let (n, m) = (self.rank(), other.rank());
        let mut g = vec![vec![BigInt::zero(); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                g[n + i][n + j] = other.gram[i][j].clone();
            }
        }
        GramLattice { gram: g }
    }

    /// The lattice with form multiplied by a nonzero integer `n`.
    pub fn rescale(&self, n: &BigInt) -> Result<GramLattice> {
        if n.is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(GramLattice {
            gram: self
                .gram
                .iter()
                .map(|r| r.iter().map(|x| x * n).collect())
                .collect(),
        })
    }

    /// `U`, `U(n)` or `<2n>`. The parameter is ignored for `U`.
    pub fn standard(kind: StandardKind, n: i64) -> Result<GramLattice> {
        match kind {
            StandardKind::U => GramLattice::from_i64(&[&[0, 1], &[1, 0]]),
            StandardKind::ScaledU => GramLattice::from_i64(&[&[0, n], &[n, 0]]),
            StandardKind::Rank1 => GramLattice::from_i64(&[&[2 * n]]),
        }
    }

    pub fn u() -> GramLattice {
        GramLattice::standard(StandardKind::U, 1).expect("U is valid")
    }

    /// Smallest vector (in [`canonical_box`] order) of norm `m` with all
    /// coordinates bounded by `bound`. `None` is a bounded verdict only.
    pub fn represents(&self, m: &BigInt, bound: u64) -> Option<LatticeVector> {
        canonical_box(self.rank(), bound)
            .find(|v| {
                let v: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
                self.norm(&v) == *m
            })
            .map(|v| LatticeVector::from_i64(&v))
    }

    /// Exact for definite lattices and rank <= 2; bounded search beyond.
    pub fn has_isotropic_vector(&self, bound: u64) -> Isotropy {
        let (plus, minus) = self.signature();
        if plus == 0 || minus == 0 {
            return Isotropy::No;
        }
        if self.rank() == 2 {
            let a2 = &self.gram[0][0];
            let b = &self.gram[0][1];
            if a2.is_zero() {
                return Isotropy::Yes(LatticeVector::from_i64(&[1, 0]));
            }
            let Some(n) = exact_sqrt(&-self.determinant()) else {
                return Isotropy::No;
            };
            // D = (n - b) e1 + 2a e2
            let coords = [&n - b, a2.clone()];
            let g = coords[0].gcd(&coords[1]);
            return Isotropy::Yes(LatticeVector::new(coords.iter().map(|c| c / &g).collect()));
        }
        let zero = BigInt::zero();
        match canonical_box(self.rank(), bound)
            .skip(1)
            .find(|v| {
                let v: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
                self.norm(&v) == zero
            }) {
            Some(v) => Isotropy::Yes(LatticeVector::from_i64(&v)),
            None => Isotropy::Unknown { bound },
        }
    }

    pub fn smith(&self) -> SmithDecomposition {
        snf::smith_normal_form(&self.gram)
    }
}

impl fmt::Display for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.gram.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Diagonal entries of a rational congruence diagonalization `P^T G P`.
fn congruence_diagonal(gram: &[Vec<BigInt>]) -> Vec<BigRational> {
    let n = gram.len();
    let mut a: Vec<Vec<BigRational>> = gram
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // e_k += e_j turns the zero pivot into 2 a_kj
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[k][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][k] += v;
                }
            }
        }
        let pivot = a[k][k].clone();
        if pivot.is_zero() {
            out.push(pivot);
            continue;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &pivot;
            if f.is_zero() {
                continue;
            }
            for c in 0..n {
                let v = &f * &a[k][c];
                a[i][c] -= v;
            }
            for r in 0..n {
                let v = &f * &a[r][k];
                a[r][i] -= v;
            }
        }
        out.push(pivot);
    }
    out
}

/// Integers ordered `0, 1, -1, 2, -2, ...`.
pub fn canonical_cmp(a: i64, b: i64) -> Ordering {
    (a.unsigned_abs(), a < 0).cmp(&(b.unsigned_abs(), b < 0))
}

/// Every vector of `[-bound, bound]^rank` in canonical order: by sup-norm
/// shell, then comparing the last coordinate first under [`canonical_cmp`].
/// The zero vector comes first.
pub fn canonical_box(rank: usize, bound: u64) -> impl Iterator<Item = Vec<i64>> {
    let bound = bound as i64;
    let values: Vec<i64> = std::iter::once(0)
        .chain((1..=bound).flat_map(|k| [k, -k]))
        .collect();
    (0..=bound).flat_map(move |shell| {
        let vals: Vec<i64> = values
            .iter()
            .copied()
            .filter(|v| v.abs() <= shell)
            .collect();
        let k = vals.len();
        let mut idx = vec![0usize; rank];
        let mut done = rank == 0 && shell > 0;
        std::iter::from_fn(move || loop {
            if done {
                return None;
            }
            let v: Vec<i64> = idx.iter().map(|&i| vals[i]).collect();
            // odometer with the first coordinate least significant
            let mut pos = 0;
            loop {
                if pos == rank {
                    done = true;
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < k {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if v.iter().map(|c| c.abs()).max().unwrap_or(0) == shell {
                return Some(v);
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[&[i64]]) -> GramLattice {
        GramLattice::from_i64(rows).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            GramLattice::from_i64(&[&[1, 0], &[0, 2]]),
            Err(Error::NotEven { index: 0, .. })
        ));
        assert!(matches!(
            GramLattice::from_i64(&[&[0, 1], &[2, 0]]),
            Err(Error::NotSymmetric { i: 0, j: 1 })
        ));
        assert!(matches!(
            GramLattice::from_i64(&[&[2, 2], &[2, 2]]),
            Err(Error::Degenerate)
        ));
        assert!(matches!(
            GramLattice::from_i64(&[&[2, 0]]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(GramLattice::new(vec![]), Err(Error::Empty)));
        assert_eq!(lat(&[&[0, 3], &[3, 2]]).rank(), 2);
    }

    #[test]
    fn signatures() {
        assert_eq!(GramLattice::u().signature(), (1, 1));
        assert_eq!(lat(&[&[2]]).signature(), (1, 0));
        assert_eq!(lat(&[&[-4]]).signature(), (0, 1));
        assert_eq!(lat(&[&[2, 3], &[3, 2]]).signature(), (1, 1));
        assert_eq!(lat(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, -4]]).signature(), (1, 2));
        let u3 = GramLattice::u().direct_sum(&GramLattice::u()).direct_sum(&GramLattice::u());
        assert_eq!(u3.signature(), (3, 3));
    }

    #[test]
    fn determinants_and_sums() {
        let u = GramLattice::u();
        let u3 = u.direct_sum(&u).direct_sum(&u);
        assert_eq!(u3.determinant(), BigInt::from(-1));
        let n = 7;
        let s = GramLattice::standard(StandardKind::Rank1, n).unwrap().direct_sum(&u);
        assert_eq!(s.gram()[0][0], BigInt::from(14));
        assert_eq!(s.determinant(), BigInt::from(-14));
        let un = u.rescale(&BigInt::from(5)).unwrap();
        assert_eq!(un, GramLattice::standard(StandardKind::ScaledU, 5).unwrap());
        assert_eq!(un.determinant(), BigInt::from(-25));
    }

    #[test]
    fn representation_examples() {
        let u = GramLattice::u();
        assert_eq!(u.represents(&BigInt::from(2), 2), Some(LatticeVector::from_i64(&[1, 1])));
        let l = lat(&[&[2, 1], &[1, -2]]);
        assert_eq!(l.represents(&BigInt::from(2), 3), Some(LatticeVector::from_i64(&[1, 0])));
        assert_eq!(lat(&[&[-4]]).represents(&BigInt::from(2), 10), None);
    }

    #[test]
    fn isotropy_examples() {
        assert_eq!(
            lat(&[&[0, 3], &[3, 2]]).has_isotropic_vector(8),
            Isotropy::Yes(LatticeVector::from_i64(&[1, 0]))
        );
        assert_eq!(lat(&[&[2, 3], &[3, 2]]).has_isotropic_vector(8), Isotropy::No);
        assert_eq!(
            GramLattice::u().has_isotropic_vector(8),
            Isotropy::Yes(LatticeVector::from_i64(&[1, 0]))
        );
        // positive definite with square determinant
        assert_eq!(lat(&[&[2, 0], &[0, 2]]).has_isotropic_vector(8), Isotropy::No);
        let w = match lat(&[&[2, 1], &[1, -4]]).has_isotropic_vector(8) {
            Isotropy::Yes(w) => w,
            other => panic!("{other:?}"),
        };
        assert!(lat(&[&[2, 1], &[1, -4]]).norm(&w.coords).is_zero());
    }

    #[test]
    fn canonical_box_order() {
        let v: Vec<Vec<i64>> = canonical_box(2, 1).collect();
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], vec![0, 0]);
        assert_eq!(v[1], vec![1, 0]);
        assert_eq!(v[2], vec![-1, 0]);
        assert_eq!(v[3], vec![0, 1]);
        assert_eq!(v[4], vec![1, 1]);
        assert_eq!(canonical_box(3, 2).count(), 125);
    }
}
