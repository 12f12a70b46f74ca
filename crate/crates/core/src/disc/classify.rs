//! Normal forms of quadratic forms on abelian p-groups with at most two
//! generators.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::form::{reduce_mod, FiniteQuadraticForm};
use crate::arith::{factorize, hensel_lift, inv_mod, modp};
use crate::error::{Error, Result};
use crate::serde_ext;

/// The local shapes a nondegenerate form on a p-group of rank at most two
/// can take. `theta` values are canonical residues: modulo `p^k` for odd
/// `p`, modulo `2^{k+1}` for `p = 2`; the hyperbolic 2-adic shapes are
/// normalized to `theta = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape")]
pub enum LocalBlock {
    /// `q(a) = 2 theta a^2 / p^k`
    OddCyclic {
        #[serde(with = "serde_ext::dec_string")]
        p: BigInt,
        k: u32,
        #[serde(with = "serde_ext::dec_string")]
        theta: BigInt,
    },
    /// `q(a1, a2) = 2 theta1 a1^2 / p^k1 + 2 theta2 a2^2 / p^k2`, `k1 <= k2`
    OddDiagonal {
        #[serde(with = "serde_ext::dec_string")]
        p: BigInt,
        k1: u32,
        k2: u32,
        #[serde(with = "serde_ext::dec_string")]
        theta1: BigInt,
        #[serde(with = "serde_ext::dec_string")]
        theta2: BigInt,
    },
    /// `q(a) = theta a^2 / 2^k`
    TwoCyclic {
        k: u32,
        #[serde(with = "serde_ext::dec_string")]
        theta: BigInt,
    },
    /// `q(a1, a2) = theta1 a1^2 / 2^k1 + theta2 a2^2 / 2^k2`, `k1 <= k2`
    TwoDiagonal {
        k1: u32,
        k2: u32,
        #[serde(with = "serde_ext::dec_string")]
        theta1: BigInt,
        #[serde(with = "serde_ext::dec_string")]
        theta2: BigInt,
    },
    /// `q(a1, a2) = theta a1 a2 / 2^(k-1)`
    TwoU {
        k: u32,
        #[serde(with = "serde_ext::dec_string")]
        theta: BigInt,
    },
    /// `q(a1, a2) = theta (a1^2 + a1 a2 + a2^2) / 2^(k-1)`
    TwoV {
        k: u32,
        #[serde(with = "serde_ext::dec_string")]
        theta: BigInt,
    },
}

fn two() -> BigInt {
    BigInt::from(2)
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

impl LocalBlock {
    pub fn prime(&self) -> BigInt {
        match self {
            LocalBlock::OddCyclic { p, .. } | LocalBlock::OddDiagonal { p, .. } => p.clone(),
            _ => two(),
        }
    }

    /// Generator orders, ascending.
    pub fn orders(&self) -> Vec<BigInt> {
        let p = self.prime();
        match self {
            LocalBlock::OddCyclic { k, .. } | LocalBlock::TwoCyclic { k, .. } => vec![p.pow(*k)],
            LocalBlock::OddDiagonal { k1, k2, .. } | LocalBlock::TwoDiagonal { k1, k2, .. } => {
                vec![p.pow(*k1), p.pow(*k2)]
            }
            LocalBlock::TwoU { k, .. } | LocalBlock::TwoV { k, .. } => vec![p.pow(*k), p.pow(*k)],
        }
    }

    /// The block as a form on its standard generators.
    pub fn canonical_form(&self) -> FiniteQuadraticForm {
        let r = |n: &BigInt, d: BigInt| BigRational::new(n.clone(), d);
        let zero = BigRational::zero();
        let gram = match self {
            LocalBlock::OddCyclic { p, k, theta } => vec![vec![r(&(theta * 2), p.pow(*k))]],
            LocalBlock::OddDiagonal { p, k1, k2, theta1, theta2 } => vec![
                vec![r(&(theta1 * 2), p.pow(*k1)), zero.clone()],
                vec![zero.clone(), r(&(theta2 * 2), p.pow(*k2))],
            ],
            LocalBlock::TwoCyclic { k, theta } => vec![vec![r(theta, two().pow(*k))]],
            LocalBlock::TwoDiagonal { k1, k2, theta1, theta2 } => vec![
                vec![r(theta1, two().pow(*k1)), zero.clone()],
                vec![zero.clone(), r(theta2, two().pow(*k2))],
            ],
            LocalBlock::TwoU { k, theta } => {
                let b = r(theta, two().pow(*k));
                vec![vec![zero.clone(), b.clone()], vec![b, zero.clone()]]
            }
            LocalBlock::TwoV { k, theta } => {
                let d = r(theta, two().pow(*k - 1));
                let b = r(theta, two().pow(*k));
                vec![vec![d.clone(), b.clone()], vec![b, d]]
            }
        };
        FiniteQuadraticForm::new(self.orders(), gram).expect("canonical block is well defined")
    }

    /// Whether the block carries a bijection `f` with `q o f = -q`.
    pub fn admits_anti_automorphism(&self) -> bool {
        let four = big(4);
        match self {
            LocalBlock::OddCyclic { p, .. } => modp(p, &four).is_one(),
            LocalBlock::OddDiagonal { p, k1, k2, .. } => modp(p, &four).is_one() || k1 == k2,
            LocalBlock::TwoCyclic { .. } => false,
            LocalBlock::TwoDiagonal { k1, k2, theta1, theta2 } => {
                k2 - k1 <= 1 && modp(&(theta1 + theta2), &four).is_zero()
            }
            LocalBlock::TwoU { .. } | LocalBlock::TwoV { .. } => true,
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            LocalBlock::OddCyclic { p, k, .. } => format!("cyclic {p}-group of order {}", p.pow(*k)),
            LocalBlock::OddDiagonal { p, k1, k2, .. } => {
                format!("diagonal {p}-group Z/{} + Z/{}", p.pow(*k1), p.pow(*k2))
            }
            LocalBlock::TwoCyclic { k, .. } => format!("cyclic 2-group of order {}", two().pow(*k)),
            LocalBlock::TwoDiagonal { k1, k2, theta1, theta2 } => format!(
                "diagonal 2-group Z/{} + Z/{} (theta {theta1}, {theta2})",
                two().pow(*k1),
                two().pow(*k2)
            ),
            LocalBlock::TwoU { k, .. } => format!("hyperbolic 2-group u(2^{k})"),
            LocalBlock::TwoV { k, .. } => format!("anisotropic 2-group v(2^{k})"),
        }
    }
}

impl fmt::Display for LocalBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Element arithmetic on a form's group.
pub(crate) struct Elements<'a> {
    pub q: &'a FiniteQuadraticForm,
}

impl Elements<'_> {
    pub fn add(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let s: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.q.reduce(&s)
    }

    pub fn scale(&self, c: &BigInt, x: &[BigInt]) -> Vec<BigInt> {
        let s: Vec<BigInt> = x.iter().map(|a| c * a).collect();
        self.q.reduce(&s)
    }

    /// `b(x, y) * n` as an integer residue modulo `n`; `n` must kill `b(x, y)`.
    pub fn b_scaled(&self, x: &[BigInt], y: &[BigInt], n: &BigInt) -> BigInt {
        let v = self.q.bilinear_b(x, y) * BigRational::from_integer(n.clone());
        debug_assert!(v.denom().is_one());
        modp(&v.to_integer(), n)
    }

    /// `q(x) * n` as an integer residue modulo `2n`.
    pub fn q_scaled(&self, x: &[BigInt], n: &BigInt) -> BigInt {
        let v = self.q.evaluate_q(x).value() * BigRational::from_integer(n.clone());
        debug_assert!(v.denom().is_one());
        modp(&v.to_integer(), &(n * 2))
    }
}

/// Splits `p^v` into `(p, v)`, failing for non-prime-powers.
fn prime_power(n: &BigInt) -> Option<(BigInt, u32)> {
    let f = factorize(n);
    (f.len() == 1).then(|| f.into_iter().next().expect("one factor"))
}

/// `theta` with `q(x) = 2 theta / p^k` (odd `p`) or `q(x) = theta / 2^k`.
fn theta_of(el: &Elements, x: &[BigInt], p: &BigInt, k: u32) -> Result<BigInt> {
    let pk = p.pow(k);
    let n = el.q_scaled(x, &pk);
    let theta = if *p == two() {
        n
    } else {
        let n = if n.is_odd() { n + &pk } else { n };
        modp(&(n / 2), &pk)
    };
    if (&theta % p).is_zero() {
        return Err(Error::InvalidForm(format!("degenerate {p}-part")));
    }
    Ok(theta)
}

fn unclassifiable(q: &FiniteQuadraticForm, p: &BigInt) -> Error {
    Error::Unclassifiable { prime: p.clone(), generators: q.num_generators() }
}

/// Classifies a form on a p-group and returns the generator change realizing
/// the normal form: `basis[i]` is the image of the block's `i`-th standard
/// generator, in the coordinates of `q`.
pub fn classify_local_with_basis(q: &FiniteQuadraticForm) -> Result<(LocalBlock, Vec<Vec<BigInt>>)> {
    let Some((p, _)) = prime_power(&q.order()) else {
        return Err(Error::InvalidForm("not a p-group form".into()));
    };
    if q.num_generators() > 2 {
        return Err(unclassifiable(q, &p));
    }
    let el = Elements { q };
    let odd = p != two();
    let ks: Vec<u32> = q.orders().iter().map(|d| prime_power(d).expect("p-power").1).collect();
    let (block, basis) = if ks.len() == 1 {
        let g = q.unit(0);
        let theta = theta_of(&el, &g, &p, ks[0])?;
        let block = if odd {
            LocalBlock::OddCyclic { p: p.clone(), k: ks[0], theta }
        } else {
            LocalBlock::TwoCyclic { k: ks[0], theta }
        };
        (block, vec![g])
    } else {
        classify_rank_two(&el, &p, ks[0], ks[1])?
    };
    if !realizes(q, &block, &basis) {
        return Err(Error::Internal(format!("normal form of the {p}-part failed verification")));
    }
    Ok((block, basis))
}

pub fn classify_local(q: &FiniteQuadraticForm) -> Result<LocalBlock> {
    classify_local_with_basis(q).map(|(b, _)| b)
}

fn classify_rank_two(
    el: &Elements,
    p: &BigInt,
    k1: u32,
    k2: u32,
) -> Result<(LocalBlock, Vec<Vec<BigInt>>)> {
    let q = el.q;
    let (g1, g2) = (q.unit(0), q.unit(1));
    let top = p.pow(k2);
    let unit_norm = |x: &[BigInt]| {
        q.element_order(x) == top && !(el.b_scaled(x, x, &top) % p).is_zero()
    };
    let candidates = [g2.clone(), g1.clone(), el.add(&g1, &g2)];
    if let Some(x) = candidates.iter().find(|x| unit_norm(x)) {
        let xx = el.b_scaled(x, x, &top);
        let inv = inv_mod(&xx, &top).expect("unit norm");
        let project = |z: &[BigInt]| {
            let c = modp(&(el.b_scaled(x, z, &top) * &inv), &top);
            el.add(z, &el.scale(&-c, x))
        };
        let (y1, y2) = (project(&g1), project(&g2));
        let y = if q.element_order(&y2) > q.element_order(&y1) { y2 } else { y1 };
        if q.element_order(&y) != p.pow(k1) {
            return Err(Error::InvalidForm(format!("degenerate {p}-part")));
        }
        let theta1 = theta_of(el, &y, p, k1)?;
        let theta2 = theta_of(el, x, p, k2)?;
        let block = if *p != two() {
            LocalBlock::OddDiagonal { p: p.clone(), k1, k2, theta1, theta2 }
        } else {
            LocalBlock::TwoDiagonal { k1, k2, theta1, theta2 }
        };
        return Ok((block, vec![y, x.clone()]));
    }
    if *p != two() || k1 != k2 {
        return Err(Error::InvalidForm(format!("degenerate {p}-part")));
    }
    even_block(el, k2, &g1, &g2)
}

/// Both generators have even norm: the form is `u` or `v` scaled by `2^k`.
fn even_block(
    el: &Elements,
    k: u32,
    g1: &[BigInt],
    g2: &[BigInt],
) -> Result<(LocalBlock, Vec<Vec<BigInt>>)> {
    let m = two().pow(k);
    let two_big = two();
    let alpha = el.q_scaled(g1, &m);
    let gamma = el.q_scaled(g2, &m);
    let beta = el.b_scaled(g1, g2, &m);
    if beta.is_even() {
        return Err(Error::InvalidForm("degenerate 2-part".into()));
    }
    let (a, c): (BigInt, BigInt) = (&alpha / 2, &gamma / 2);
    if (&a * &c).is_even() {
        // isotropic x = g1 + t g2 with c t^2 + beta t + a = 0 mod 2^k
        let t0 = if c.is_even() { modp(&a, &two_big) } else { BigInt::zero() };
        let t = hensel_lift(&[a.clone(), beta.clone(), c.clone()], &t0, &two_big, 1, k)
            .ok_or_else(|| Error::Internal("isotropic lift failed".into()))?;
        let x = el.add(g1, &el.scale(&t, g2));
        let bxy = modp(&(&beta + &gamma * &t), &m);
        let binv = inv_mod(&bxy, &m).expect("odd");
        let s = modp(&(-&c * &binv), &m);
        let y = el.add(g2, &el.scale(&s, &x));
        let y = el.scale(&binv, &y);
        return Ok((LocalBlock::TwoU { k, theta: BigInt::one() }, vec![x, y]));
    }
    // x = s g1 + g2 with a s^2 + beta s + c = 1 mod 2^k
    let s = hensel_lift(&[&c - 1, beta.clone(), a.clone()], &BigInt::zero(), &two_big, 1, k)
        .ok_or_else(|| Error::Internal("norm-two lift failed".into()))?;
    let x = el.add(&el.scale(&s, g1), g2);
    let beta2 = modp(&(&s * &alpha + &beta), &m);
    let bi = inv_mod(&beta2, &m).expect("odd");
    // e2 = u x + w g1 with w = bi (1 - 2u); solve the norm condition in u
    let c0 = &a * &bi * &bi - 1;
    let c1 = &beta2 * &bi - big(4) * &a * &bi * &bi;
    let c2 = 1 - big(2) * &beta2 * &bi + big(4) * &a * &bi * &bi;
    let u = hensel_lift(&[c0, c1, c2], &BigInt::zero(), &two_big, 1, k)
        .ok_or_else(|| Error::Internal("anisotropic lift failed".into()))?;
    let w = modp(&(&bi * (1 - big(2) * &u)), &m);
    let e2 = el.add(&el.scale(&u, &x), &el.scale(&w, g1));
    Ok((LocalBlock::TwoV { k, theta: BigInt::one() }, vec![x, e2]))
}

/// Checks that `basis` generates `q` and carries the block's canonical values.
pub(crate) fn realizes(q: &FiniteQuadraticForm, block: &LocalBlock, basis: &[Vec<BigInt>]) -> bool {
    let canon = block.canonical_form();
    if basis.len() != canon.num_generators() || !q.generates(basis) {
        return false;
    }
    for (i, e) in basis.iter().enumerate() {
        if q.element_order(e) != canon.orders()[i] {
            return false;
        }
        for (j, f) in basis.iter().enumerate() {
            let got = if i == j {
                q.evaluate_q(e).value().clone()
            } else {
                q.bilinear_b(e, f)
            };
            let want = &canon.q_gram()[i][j];
            let modulus = if i == j { 2 } else { 1 };
            if reduce_mod(&got, modulus) != *want {
                return false;
            }
        }
    }
    true
}
