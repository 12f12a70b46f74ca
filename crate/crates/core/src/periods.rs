//! Periods of marked complex 2-tori: Plucker coordinates of a `2 x 4`
//! period matrix in the wedge basis of `L^2`, where `L = Z^4`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::snf::IntMatrix;

/// Index pairs of the wedge basis, in lexicographic order.
pub const WEDGE_BASIS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Relative tolerance used by the floating backend.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    #[default]
    Exact,
    Float,
}

/// Real scalars usable as period coordinates.
pub trait PeriodScalar: Clone + Debug + PartialEq + Num + Signed {
    const MODE: NumericMode;
    /// `x` compared to zero, with values negligible against `scale` treated as zero.
    fn sign_relative(x: &Self, scale: &Self) -> i8;
    fn from_i64(n: i64) -> Self;
}

impl PeriodScalar for BigRational {
    const MODE: NumericMode = NumericMode::Exact;
    fn sign_relative(x: &Self, _scale: &Self) -> i8 {
        if x.is_zero() {
            0
        } else if x.is_positive() {
            1
        } else {
            -1
        }
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

impl PeriodScalar for f64 {
    const MODE: NumericMode = NumericMode::Float;
    fn sign_relative(x: &Self, scale: &Self) -> i8 {
        if x.abs() <= FLOAT_TOLERANCE * scale.abs().max(f64::MIN_POSITIVE) {
            0
        } else if *x > 0.0 {
            1
        } else {
            -1
        }
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

/// A `2 x 4` complex matrix whose rows span the holomorphic part.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix<T> {
    pub rows: [[Complex<T>; 4]; 2],
}

/// The six Plucker coordinates `v_ij`, ordered as [`WEDGE_BASIS`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodVector<T> {
    pub coords: [Complex<T>; 6],
}

impl<T: PeriodScalar> PeriodMatrix<T> {
    pub fn new(rows: [[Complex<T>; 4]; 2]) -> Self {
        PeriodMatrix { rows }
    }

    pub fn swap_rows(&self) -> Self {
        PeriodMatrix { rows: [self.rows[1].clone(), self.rows[0].clone()] }
    }

    /// `g * Pi` for a `2 x 2` complex matrix `g`.
    pub fn left_multiply(&self, g: &[[Complex<T>; 2]; 2]) -> Self {
        let row = |i: usize| -> [Complex<T>; 4] {
            std::array::from_fn(|j| {
                g[i][0].clone() * self.rows[0][j].clone() + g[i][1].clone() * self.rows[1][j].clone()
            })
        };
        PeriodMatrix { rows: [row(0), row(1)] }
    }
}

impl<T: PeriodScalar> PeriodVector<T> {
    pub fn conj(&self) -> Self {
        PeriodVector { coords: std::array::from_fn(|i| self.coords[i].conj()) }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// `sum |v_ij|^2`, the scale for relative tolerances.
    pub fn norm_sqr(&self) -> T {
        self.coords.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    pub fn scale(&self, k: &Complex<T>) -> Self {
        PeriodVector { coords: std::array::from_fn(|i| self.coords[i].clone() * k.clone()) }
    }

    pub fn from_integers(v: &[i64]) -> Self {
        PeriodVector { coords: std::array::from_fn(|i| Complex::new(T::from_i64(v[i]), T::zero())) }
    }
}

/// The six `2 x 2` minors `Pi_1i Pi_2j - Pi_1j Pi_2i`.
pub fn plucker_period<T: PeriodScalar>(pi: &PeriodMatrix<T>) -> PeriodVector<T> {
    let [a, b] = &pi.rows;
    PeriodVector {
        coords: std::array::from_fn(|k| {
            let (i, j) = WEDGE_BASIS[k];
            a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone()
        }),
    }
}

/// `v.w = v12 w34 + v34 w12 - v13 w24 - v24 w13 + v14 w23 + v23 w14`.
pub fn wedge_pairing<T: PeriodScalar>(v: &PeriodVector<T>, w: &PeriodVector<T>) -> Complex<T> {
    let (a, b) = (&v.coords, &w.coords);
    let p = |i: usize, j: usize| a[i].clone() * b[j].clone() + a[j].clone() * b[i].clone();
    p(0, 5) - p(1, 4) + p(2, 3)
}

/// Integer Gram matrix of the wedge form in the basis [`WEDGE_BASIS`].
pub fn wedge_gram() -> IntMatrix {
    let mut g = vec![vec![BigInt::zero(); 6]; 6];
    for (i, j, s) in [(0, 5, 1), (1, 4, -1), (2, 3, 1)] {
        g[i][j] = BigInt::from(s);
        g[j][i] = BigInt::from(s);
    }
    g
}

/// Columns `(12, 34), (13, -24), (14, 23)`: conjugates the wedge form to `U + U + U`.
pub fn wedge_to_u3() -> IntMatrix {
    let mut p = vec![vec![BigInt::zero(); 6]; 6];
    for (col, (row, s)) in [(0, 1), (5, 1), (1, 1), (4, -1), (2, 1), (3, 1)].into_iter().enumerate() {
        p[row][col] = BigInt::from(s);
    }
    p
}

/// Sign of the real number `v . conj(v)`; `None` if it has a visible
/// imaginary part (impossible for exact inputs).
fn hermitian_sign<T: PeriodScalar>(v: &PeriodVector<T>) -> Option<i8> {
    let h = wedge_pairing(v, &v.conj());
    let scale = v.norm_sqr();
    if T::sign_relative(&h.im, &scale) != 0 {
        return None;
    }
    Some(T::sign_relative(&h.re, &scale))
}

/// `v . conj(v) != 0`.
pub fn is_torus<T: PeriodScalar>(pi: &PeriodMatrix<T>) -> bool {
    let v = plucker_period(pi);
    matches!(hermitian_sign(&v), Some(s) if s != 0)
}

/// `v . conj(v) > 0`.
pub fn is_admissible<T: PeriodScalar>(pi: &PeriodMatrix<T>) -> bool {
    hermitian_sign(&plucker_period(pi)) == Some(1)
}

/// Whether `[v]` lies in the period domain of the lattice spanned by
/// `m_basis` (integer vectors in the wedge basis): orthogonal to every basis
/// vector, isotropic, and with `v . conj(v) > 0`.
pub fn lies_in_period_domain<T: PeriodScalar>(v: &PeriodVector<T>, m_basis: &[Vec<i64>]) -> bool {
    let scale = v.norm_sqr();
    let negligible = |c: &Complex<T>| {
        T::sign_relative(&c.re, &scale) == 0 && T::sign_relative(&c.im, &scale) == 0
    };
    m_basis
        .iter()
        .all(|m| negligible(&wedge_pairing(v, &PeriodVector::from_integers(m))))
        && negligible(&wedge_pairing(v, v))
        && hermitian_sign(v) == Some(1)
}
