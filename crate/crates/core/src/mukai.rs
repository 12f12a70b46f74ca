//! Mukai pairing, the numerical lattice `NS + U` and the symplectic dual
//! `omega -> omega / vol(omega)` on complexified Kahler classes.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{canonical_box, GramLattice};
use crate::serde_ext;
use crate::snf::IntMatrix;

/// Exact complex rational.
pub type ComplexRational = Complex<BigRational>;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn real(x: BigRational) -> ComplexRational {
    Complex::new(x, BigRational::zero())
}

/// `(r, D, s)` with `D` in `NS (x) C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MukaiVector {
    pub r: ComplexRational,
    pub d: Vec<ComplexRational>,
    pub s: ComplexRational,
}

impl MukaiVector {
    pub fn new(r: ComplexRational, d: Vec<ComplexRational>, s: ComplexRational) -> Self {
        MukaiVector { r, d, s }
    }

    pub fn from_integers(r: i64, d: &[i64], s: i64) -> Self {
        let c = |x: i64| real(rat(x));
        MukaiVector { r: c(r), d: d.iter().map(|&x| c(x)).collect(), s: c(s) }
    }

    /// Coordinates in the order `(D..., r, s)` used by [`numerical_lattice`].
    pub fn coordinates(&self) -> Vec<ComplexRational> {
        let mut v = self.d.clone();
        v.push(self.r.clone());
        v.push(self.s.clone());
        v
    }

    pub fn from_coordinates(c: &[ComplexRational]) -> Self {
        let n = c.len() - 2;
        MukaiVector { r: c[n].clone(), d: c[..n].to_vec(), s: c[n + 1].clone() }
    }

    pub fn scale(&self, k: &ComplexRational) -> Self {
        MukaiVector {
            r: &self.r * k,
            d: self.d.iter().map(|x| x * k).collect(),
            s: &self.s * k,
        }
    }
}

fn pair_complex(ns: &GramLattice, x: &[ComplexRational], y: &[ComplexRational]) -> ComplexRational {
    let mut acc = real(BigRational::zero());
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            let g = ns.entry(i, j);
            if !g.is_zero() {
                acc += xi * yj * real(BigRational::from_integer(g.clone()));
            }
        }
    }
    acc
}

fn pair_real(ns: &GramLattice, x: &[BigRational], y: &[BigRational]) -> BigRational {
    ns.pair_rational(x, y)
}

/// `D.D' - r s' - s r'`.
pub fn mukai_pairing(v: &MukaiVector, w: &MukaiVector, ns: &GramLattice) -> Result<ComplexRational> {
    for d in [&v.d, &w.d] {
        if d.len() != ns.rank() {
            return Err(Error::DimensionMismatch { expected: ns.rank(), found: d.len() });
        }
    }
    Ok(pair_complex(ns, &v.d, &w.d) - &v.r * &w.s - &v.s * &w.r)
}

/// `NS + U` with the `U` block on `(r, s)` carrying the pairing `-rs' - sr'`.
pub fn numerical_lattice(ns: &GramLattice) -> GramLattice {
    let u_minus = GramLattice::from_i64(&[&[0, -1], &[-1, 0]]).expect("valid");
    ns.direct_sum(&u_minus)
}

/// Identity on `NS`, `(r, s) -> (-s, -r)`; coordinates `(D..., r, s)`.
pub fn dual_isometry(ns: &GramLattice) -> IntMatrix {
    let n = ns.rank();
    let mut m = crate::snf::identity(n + 2);
    m[n][n] = BigInt::zero();
    m[n + 1][n + 1] = BigInt::zero();
    m[n][n + 1] = BigInt::from(-1);
    m[n + 1][n] = BigInt::from(-1);
    m
}

/// Applies an integer matrix to the coordinate vector of `v`.
pub fn apply_isometry(m: &IntMatrix, v: &MukaiVector) -> MukaiVector {
    let c = v.coordinates();
    let out: Vec<ComplexRational> = m
        .iter()
        .map(|row| {
            row.iter().zip(&c).fold(real(BigRational::zero()), |acc, (a, x)| {
                acc + x * real(BigRational::from_integer(a.clone()))
            })
        })
        .collect();
    MukaiVector::from_coordinates(&out)
}

/// `omega = B + i kappa` with `kappa` in the positive cone component
/// containing `reference`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexifiedKahlerClass {
    #[serde(with = "serde_ext::rational_vec")]
    pub b: Vec<BigRational>,
    #[serde(with = "serde_ext::rational_vec")]
    pub kappa: Vec<BigRational>,
    #[serde(with = "serde_ext::rational_vec")]
    pub reference: Vec<BigRational>,
}

/// A vector of positive norm fixing the cone component: the first basis
/// vector when it has positive norm, else the first positive vector in
/// canonical search order.
pub fn default_reference(ns: &GramLattice) -> Result<Vec<BigRational>> {
    ns.require_hyperbolic()?;
    let mut bound = 1;
    loop {
        let found = canonical_box(ns.rank(), bound).find(|v| {
            let v: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
            ns.norm(&v).is_positive()
        });
        if let Some(v) = found {
            return Ok(v.into_iter().map(rat).collect());
        }
        bound *= 2;
    }
}

impl ComplexifiedKahlerClass {
    pub fn new(
        ns: &GramLattice,
        b: Vec<BigRational>,
        kappa: Vec<BigRational>,
        reference: Option<Vec<BigRational>>,
    ) -> Result<Self> {
        ns.require_hyperbolic()?;
        let reference = match reference {
            Some(r) => r,
            None => default_reference(ns)?,
        };
        let c = ComplexifiedKahlerClass { b, kappa, reference };
        c.validate(ns)?;
        Ok(c)
    }

    pub fn validate(&self, ns: &GramLattice) -> Result<()> {
        let n = ns.rank();
        for v in [&self.b, &self.kappa, &self.reference] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        if !pair_real(ns, &self.reference, &self.reference).is_positive() {
            return Err(Error::InvalidKahlerClass("reference vector must have positive norm".into()));
        }
        if !pair_real(ns, &self.kappa, &self.kappa).is_positive() {
            return Err(Error::InvalidKahlerClass("kappa^2 must be positive".into()));
        }
        if !pair_real(ns, &self.kappa, &self.reference).is_positive() {
            return Err(Error::InvalidKahlerClass(
                "kappa lies in the opposite cone component".into(),
            ));
        }
        Ok(())
    }

    /// `omega` as a complex coefficient vector.
    pub fn omega(&self) -> Vec<ComplexRational> {
        self.b
            .iter()
            .zip(&self.kappa)
            .map(|(x, y)| Complex::new(x.clone(), y.clone()))
            .collect()
    }

    /// `omega^2 = B^2 - kappa^2 + 2i B.kappa`.
    pub fn omega_squared(&self, ns: &GramLattice) -> ComplexRational {
        let bb = pair_real(ns, &self.b, &self.b);
        let kk = pair_real(ns, &self.kappa, &self.kappa);
        let bk = pair_real(ns, &self.b, &self.kappa);
        Complex::new(bb - kk, bk * rat(2))
    }
}

/// `vol(omega) = -omega^2 / 2`.
pub fn kahler_volume(ns: &GramLattice, omega: &ComplexifiedKahlerClass) -> ComplexRational {
    let w2 = omega.omega_squared(ns);
    let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
    Complex::new(w2.re * &half, w2.im * half)
}

/// `omega / vol(omega)`; an involution inverting the volume.
pub fn symplectic_dual(ns: &GramLattice, omega: &ComplexifiedKahlerClass) -> Result<ComplexifiedKahlerClass> {
    let v = kahler_volume(ns, omega);
    let norm = v.norm_sqr();
    if norm.is_zero() {
        return Err(Error::InvalidKahlerClass("omega^2 vanishes".into()));
    }
    // (B + i kappa)(x - i y) / |v|^2
    let (x, y) = (&v.re / &norm, &v.im / &norm);
    let b = omega
        .b
        .iter()
        .zip(&omega.kappa)
        .map(|(bi, ki)| bi * &x + ki * &y)
        .collect();
    let kappa = omega
        .b
        .iter()
        .zip(&omega.kappa)
        .map(|(bi, ki)| ki * &x - bi * &y)
        .collect();
    let out = ComplexifiedKahlerClass { b, kappa, reference: omega.reference.clone() };
    out.validate(ns)
        .map_err(|e| Error::Internal(format!("dual class left the cone: {e}")))?;
    Ok(out)
}

/// `(1, omega, omega^2 / 2)`.
pub fn exp_class(ns: &GramLattice, omega: &ComplexifiedKahlerClass) -> MukaiVector {
    let w2 = omega.omega_squared(ns);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    MukaiVector {
        r: real(BigRational::one()),
        d: omega.omega(),
        s: Complex::new(w2.re * &half, w2.im * half),
    }
}
