//! Anti-automorphisms: existence by the local criteria and explicit
//! construction by Hensel-style lifting on each local block.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::classify::{classify_local_with_basis, Elements, LocalBlock};
use super::form::{FiniteQuadraticForm, SylowPart};
use crate::arith::{inv_mod, modp, sqrt_mod_prime, sqrt_neg_one};
use crate::error::{Error, Result};
use crate::serde_ext;
use crate::snf::IntMatrix;

/// A group automorphism `f` with `q(f(x)) = -q(x)`. Column `j` of `matrix`
/// holds the coordinates of `f(g_j)`, reduced modulo the generator orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntiAutomorphism {
    #[serde(with = "serde_ext::int_matrix")]
    matrix: IntMatrix,
}

impl AntiAutomorphism {
    /// Wraps a matrix after checking it against `q`.
    pub fn new(q: &FiniteQuadraticForm, matrix: IntMatrix) -> Result<Self> {
        if !is_isometry(q, q, &matrix, -1) {
            return Err(Error::InvalidForm("matrix is not an anti-automorphism".into()));
        }
        Ok(AntiAutomorphism { matrix: reduce_columns(q, matrix) })
    }

    pub(crate) fn from_verified(q: &FiniteQuadraticForm, matrix: IntMatrix) -> Self {
        AntiAutomorphism { matrix: reduce_columns(q, matrix) }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, q: &FiniteQuadraticForm, x: &[BigInt]) -> Vec<BigInt> {
        apply_matrix(q, &self.matrix, x)
    }

    /// `f o f`, an automorphism preserving `q`.
    pub fn square(&self, q: &FiniteQuadraticForm) -> IntMatrix {
        let k = q.num_generators();
        let cols: Vec<Vec<BigInt>> = (0..k)
            .map(|j| self.apply(q, &self.apply(q, &q.unit(j))))
            .collect();
        from_columns(k, &cols)
    }
}

fn reduce_columns(q: &FiniteQuadraticForm, mut m: IntMatrix) -> IntMatrix {
    for (row, d) in m.iter_mut().zip(q.orders()) {
        for x in row.iter_mut() {
            *x = modp(x, d);
        }
    }
    m
}

pub(crate) fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> IntMatrix {
    (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

pub(crate) fn apply_matrix(target: &FiniteQuadraticForm, m: &IntMatrix, x: &[BigInt]) -> Vec<BigInt> {
    let y: Vec<BigInt> = m
        .iter()
        .map(|row| row.iter().zip(x).fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
        .collect();
    target.reduce(&y)
}

/// Checks that `m` (columns = images of the generators of `q1` in `q2`)
/// is a well-defined bijective homomorphism with `q2 o f = sign * q1`.
pub fn is_isometry(q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm, m: &IntMatrix, sign: i32) -> bool {
    let (k1, k2) = (q1.num_generators(), q2.num_generators());
    if q1.order() != q2.order() {
        return false;
    }
    if k1 == 0 {
        return true;
    }
    if m.len() != k2 || m.iter().any(|r| r.len() != k1) {
        return false;
    }
    let cols: Vec<Vec<BigInt>> = (0..k1)
        .map(|j| q2.reduce(&m.iter().map(|r| r[j].clone()).collect::<Vec<_>>()))
        .collect();
    let signed = |v: &BigRational| if sign < 0 { -v.clone() } else { v.clone() };
    for j in 0..k1 {
        if !(&q1.orders()[j] % q2.element_order(&cols[j])).is_zero() {
            return false;
        }
    }
    for i in 0..k1 {
        for j in i..k1 {
            let x = if i == j {
                q1.unit(i)
            } else {
                let mut s = q1.unit(i);
                s[j] = BigInt::one();
                s
            };
            let y: Vec<BigInt> = cols[i].iter().zip(&cols[j]).map(|(a, b)| if i == j { a.clone() } else { a + b }).collect();
            let lhs = q2.evaluate_q(&y);
            let rhs = super::QMod2Z::new(signed(q1.evaluate_q(&x).value()));
            if lhs != rhs {
                return false;
            }
        }
    }
    q2.generates(&cols)
}

/// Whether every Sylow part admits an anti-automorphism.
pub fn has_anti_automorphism(q: &FiniteQuadraticForm) -> Result<bool> {
    for part in q.sylow_parts() {
        let (block, _) = classify_local_with_basis(&part.form)?;
        if !block.admits_anti_automorphism() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The first Sylow block without an anti-automorphism, if any.
pub fn obstruction(q: &FiniteQuadraticForm) -> Result<Option<LocalBlock>> {
    for part in q.sylow_parts() {
        let (block, _) = classify_local_with_basis(&part.form)?;
        if !block.admits_anti_automorphism() {
            return Ok(Some(block));
        }
    }
    Ok(None)
}

/// Builds an anti-automorphism block by block and glues the local maps.
pub fn construct_anti_automorphism(q: &FiniteQuadraticForm) -> Result<AntiAutomorphism> {
    let parts = q.sylow_parts();
    let mut local_maps = Vec::with_capacity(parts.len());
    for part in &parts {
        let (block, basis) = classify_local_with_basis(&part.form)?;
        let Some(rows) = block_anti_automorphism(&block) else {
            return Err(Error::NoAntiAutomorphism);
        };
        local_maps.push(local_matrix(&part.form, &block, &basis, &rows)?);
    }
    let m = assemble(q, q, &parts, &parts, &local_maps);
    if !is_isometry(q, q, &m, -1) {
        return Err(Error::Internal("constructed map failed verification".into()));
    }
    Ok(AntiAutomorphism::from_verified(q, m))
}

/// Glues per-prime maps (columns = images of the local generators of
/// `parts1[i]` in local coordinates of `parts2[i]`) into an ambient matrix.
pub(crate) fn assemble(
    q1: &FiniteQuadraticForm,
    q2: &FiniteQuadraticForm,
    parts1: &[SylowPart],
    parts2: &[SylowPart],
    maps: &[IntMatrix],
) -> IntMatrix {
    let k1 = q1.num_generators();
    let cols: Vec<Vec<BigInt>> = (0..k1)
        .map(|j| {
            let g = q1.unit(j);
            let mut img = vec![BigInt::zero(); q2.num_generators()];
            for ((p1, p2), m) in parts1.iter().zip(parts2).zip(maps) {
                let local = p1.to_local(q1, &g);
                let image = apply_matrix(&p2.form, m, &local);
                for (acc, v) in img.iter_mut().zip(p2.to_ambient(q2, &image)) {
                    *acc += v;
                }
            }
            q2.reduce(&img)
        })
        .collect();
    from_columns(q2.num_generators(), &cols)
}

/// Translates a block map (rows = images of standard generators in block
/// coordinates) into a matrix on the local generators of `form`.
fn local_matrix(
    form: &FiniteQuadraticForm,
    block: &LocalBlock,
    basis: &[Vec<BigInt>],
    rows: &[Vec<BigInt>],
) -> Result<IntMatrix> {
    let el = Elements { q: form };
    let k = form.num_generators();
    let cols: Vec<Vec<BigInt>> = (0..k)
        .map(|j| {
            let c = block_coordinates(&el, block, basis, &form.unit(j))?;
            // f(sum c_i e_i) = sum c_i f(e_i)
            let mut img = vec![BigInt::zero(); k];
            for (ci, row) in c.iter().zip(rows) {
                for (coef, e) in row.iter().zip(basis) {
                    for (acc, x) in img.iter_mut().zip(e) {
                        *acc += ci * coef * x;
                    }
                }
            }
            Ok(form.reduce(&img))
        })
        .collect::<Result<_>>()?;
    Ok(from_columns(k, &cols))
}

/// Coordinates of `h` with respect to the block basis, read off through the
/// bilinear form.
fn block_coordinates(
    el: &Elements,
    block: &LocalBlock,
    basis: &[Vec<BigInt>],
    h: &[BigInt],
) -> Result<Vec<BigInt>> {
    let orders = block.orders();
    let fail = || Error::Internal("block basis is not orthogonal-unimodular".into());
    match block {
        LocalBlock::TwoU { .. } | LocalBlock::TwoV { .. } => {
            let m = &orders[0];
            let g = |a: &[BigInt], b: &[BigInt]| el.b_scaled(a, b, m);
            let (a, b, d) = (g(&basis[0], &basis[0]), g(&basis[0], &basis[1]), g(&basis[1], &basis[1]));
            let det = modp(&(&a * &d - &b * &b), m);
            let inv = inv_mod(&det, m).ok_or_else(fail)?;
            let (t1, t2) = (g(h, &basis[0]), g(h, &basis[1]));
            Ok(vec![
                modp(&((&d * &t1 - &b * &t2) * &inv), m),
                modp(&((&a * &t2 - &b * &t1) * &inv), m),
            ])
        }
        _ => basis
            .iter()
            .zip(&orders)
            .map(|(e, o)| {
                let ee = el.b_scaled(e, e, o);
                let inv = inv_mod(&ee, o).ok_or_else(fail)?;
                Ok(modp(&(el.b_scaled(h, e, o) * inv), o))
            })
            .collect(),
    }
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Explicit anti-automorphism of a block, or `None` when the block has none.
/// Row `i` holds the image of the `i`-th standard generator.
pub fn block_anti_automorphism(block: &LocalBlock) -> Option<Vec<Vec<BigInt>>> {
    if !block.admits_anti_automorphism() {
        return None;
    }
    let z = BigInt::zero;
    let rows = match block {
        LocalBlock::OddCyclic { p, k, .. } => vec![vec![sqrt_neg_one(p, *k)?]],
        LocalBlock::OddDiagonal { p, k1, k2, theta1, theta2 } => {
            if modp(p, &big(4)).is_one() {
                let u = sqrt_neg_one(p, *k2)?;
                vec![vec![u.clone(), z()], vec![z(), u]]
            } else {
                debug_assert_eq!(k1, k2);
                odd_equal_exponents(p, *k1, theta1, theta2)?
            }
        }
        LocalBlock::TwoCyclic { .. } => return None,
        LocalBlock::TwoDiagonal { k1, k2, theta1, theta2 } => {
            if k1 == k2 {
                two_equal_exponents(*k1, theta1, theta2)
            } else {
                two_adjacent_exponents(*k1, theta1, theta2)
            }
        }
        LocalBlock::TwoU { .. } => vec![vec![big(1), z()], vec![z(), big(-1)]],
        LocalBlock::TwoV { k, .. } => two_anisotropic(*k),
    };
    Some(rows)
}

/// `p = 3 mod 4`, `q = 2 theta1 a1^2 / p^k + 2 theta2 a2^2 / p^k`.
fn odd_equal_exponents(p: &BigInt, k: u32, t1: &BigInt, t2: &BigInt) -> Option<Vec<Vec<BigInt>>> {
    let tt = modp(&(t1 * t2), p);
    let tt_inv = inv_mod(&tt, p)?;
    // p | m^2 + n^2 theta1 theta2 + 1
    let (m, n) = {
        let mut m = BigInt::zero();
        loop {
            if &m >= p {
                return None;
            }
            let r = modp(&(-(BigInt::one() + &m * &m) * &tt_inv), p);
            if !r.is_zero() {
                if let Some(n) = sqrt_mod_prime(&r, p) {
                    break (m, n);
                }
            }
            m += 1;
        }
    };
    let (mut u11, mut u12, mut u21) = (m.clone(), &n * t1, -(&n * t2));
    let u22 = m.clone();
    let inv2 = inv_mod(&big(2), p)?;
    let t1_inv = inv_mod(t1, p)?;
    let t2_inv = inv_mod(t2, p)?;
    let n_t2_inv = inv_mod(&(&n * t2), p)?;
    let n_tt_inv = inv_mod(&(&n * t1 * t2), p)?;
    for j in 1..k {
        let pj = p.pow(j);
        let first: BigInt = (&u11 * &u11 + 1) * t1 + &u12 * &u12 * t2;
        let second: BigInt = &u21 * &u21 * t1 + (&u22 * &u22 + 1) * t2;
        let third: BigInt = &u11 * &u21 * t1 + &u12 * &u22 * t2;
        let g1 = modp(&(-(first / &pj) * &inv2), p);
        let g2 = modp(&(-(second / &pj) * &inv2), p);
        let g3 = modp(&(-(third / &pj)), p);
        let a = modp(&(-&m * &t1_inv * &g1 + &m * &t2_inv * &g2 + &n * &g3), p);
        let b = modp(&((&t1_inv * &g1 - &m * &a) * &n_t2_inv), p);
        let c = modp(&(-&n_tt_inv * &g2), p);
        u11 += &pj * a;
        u12 += &pj * b;
        u21 += &pj * c;
    }
    Some(vec![vec![u11, u12], vec![u21, u22]])
}

/// `q = theta1 a1^2 / 2^k + theta2 a2^2 / 2^k`, `theta1 + theta2 = 0 mod 4`.
fn two_equal_exponents(k: u32, t1: &BigInt, t2: &BigInt) -> Vec<Vec<BigInt>> {
    if k == 1 {
        return vec![vec![big(0), big(1)], vec![big(1), big(0)]];
    }
    let d = if modp(&(t1 + t2), &big(8)).is_zero() { big(0) } else { big(2) };
    let (mut u11, mut u12, mut u21, u22) = (d.clone(), big(1), big(1), d);
    let two = big(2);
    for j in 2..k {
        let first = (&u11 * &u11 + 1) * t1 + &u12 * &u12 * t2;
        let second = &u21 * &u21 * t1 + (&u22 * &u22 + 1) * t2;
        let third = &u11 * &u21 * t1 + &u12 * &u22 * t2;
        let g1 = modp(&(first / two.pow(j + 1)), &two);
        let g2 = modp(&(second / two.pow(j + 1)), &two);
        let g3 = modp(&(third / two.pow(j)), &two);
        let pj = two.pow(j);
        u11 += &pj * g3;
        u12 += &pj * g1;
        u21 += &pj * g2;
    }
    vec![vec![u11, u12], vec![u21, u22]]
}

/// `q = theta1 a1^2 / 2^k + theta2 a2^2 / 2^(k+1)`, `theta1 + theta2 = 0 mod 4`.
fn two_adjacent_exponents(k: u32, t1: &BigInt, t2: &BigInt) -> Vec<Vec<BigInt>> {
    let two = big(2);
    let (mut u11, mut t12, u21, mut u22) = if k == 1 {
        (big(1), big(1), big(1), big(1))
    } else {
        let d = if modp(&(t1 + t2), &big(8)).is_zero() { big(1) } else { big(5) };
        (big(1), big(1), big(1), d)
    };
    for j in 2..k {
        let first = (&u11 * &u11 + 1) * t1 + 2 * &t12 * &t12 * t2;
        let second = 2 * &u21 * &u21 * t1 + (&u22 * &u22 + 1) * t2;
        let third = &u11 * &u21 * t1 + &t12 * &u22 * t2;
        let g1 = modp(&(first / two.pow(j + 1)), &two);
        let g2 = modp(&(second / two.pow(j + 2)), &two);
        let g3 = modp(&(third / two.pow(j)), &two);
        let b = modp(&(&g3 - &g1), &two);
        u11 += two.pow(j) * g1;
        t12 += two.pow(j) * b;
        u22 += two.pow(j + 1) * g2;
    }
    vec![vec![u11, 2 * t12], vec![u21, u22]]
}

/// `q = (a1^2 + a1 a2 + a2^2) / 2^(k-1)`.
fn two_anisotropic(k: u32) -> Vec<Vec<BigInt>> {
    let two = big(2);
    let (mut u11, mut u12, mut u21, u22) = (big(1), big(0), big(0), big(1));
    for j in 1..k {
        let e1 = &u11 * &u11 + &u11 * &u12 + &u12 * &u12 + 1;
        let e2 = &u21 * &u21 + &u21 * &u22 + &u22 * &u22 + 1;
        let e3 = 2 * (&u11 * &u21 + &u12 * &u22) + (&u11 * &u22 + &u12 * &u21) + 1;
        let pj = two.pow(j);
        let (g1, g2, g3) = (
            modp(&(e1 / &pj), &two),
            modp(&(e2 / &pj), &two),
            modp(&(e3 / &pj), &two),
        );
        u11 += &pj * g3;
        u12 += &pj * g1;
        u21 += &pj * g2;
    }
    vec![vec![u11, u12], vec![u21, u22]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::discriminant_form;
    use crate::lattice::GramLattice;

    fn form(rows: &[&[i64]]) -> FiniteQuadraticForm {
        discriminant_form(&GramLattice::from_i64(rows).unwrap())
    }

    fn check_block(block: LocalBlock) {
        let q = block.canonical_form();
        let rows = block_anti_automorphism(&block).unwrap_or_else(|| panic!("{block:?}"));
        let m = crate::snf::transpose(&rows);
        assert!(is_isometry(&q, &q, &m, -1), "{block:?}: {rows:?}");
    }

    #[test]
    fn z5_uses_square_root_of_minus_one() {
        let q = FiniteQuadraticForm::new(vec![big(5)], vec![vec![BigRational::new(big(2), big(5))]]).unwrap();
        let f = construct_anti_automorphism(&q).unwrap();
        let u = &f.matrix()[0][0];
        assert!(u == &big(2) || u == &big(3));
    }

    #[test]
    fn hyperbolic_and_anisotropic_blocks() {
        for k in 1..8 {
            let rows = block_anti_automorphism(&LocalBlock::TwoU { k, theta: big(1) }).unwrap();
            assert_eq!(rows, vec![vec![big(1), big(0)], vec![big(0), big(-1)]]);
            check_block(LocalBlock::TwoU { k, theta: big(1) });
            check_block(LocalBlock::TwoV { k, theta: big(1) });
        }
        let v1 = block_anti_automorphism(&LocalBlock::TwoV { k: 1, theta: big(1) }).unwrap();
        assert_eq!(v1, vec![vec![big(1), big(0)], vec![big(0), big(1)]]);
    }

    #[test]
    fn odd_blocks_lift() {
        for p in [3i64, 7, 11, 19, 23] {
            for k in 1..5 {
                for t1 in 1..p.min(6) {
                    for t2 in 1..p.min(6) {
                        check_block(LocalBlock::OddDiagonal { p: big(p), k1: k, k2: k, theta1: big(t1), theta2: big(t2) });
                    }
                }
            }
        }
        for p in [5i64, 13, 17] {
            for k in 1..5 {
                check_block(LocalBlock::OddCyclic { p: big(p), k, theta: big(1) });
                check_block(LocalBlock::OddDiagonal { p: big(p), k1: 1, k2: k, theta1: big(2), theta2: big(1) });
            }
        }
    }

    #[test]
    fn two_diagonal_blocks_lift() {
        for k in 1..9u32 {
            let m = 1i64 << (k + 1);
            for t1 in (1..m).step_by(2) {
                for t2 in (1..m).step_by(2) {
                    if (t1 + t2) % 4 != 0 {
                        continue;
                    }
                    check_block(LocalBlock::TwoDiagonal { k1: k, k2: k, theta1: big(t1), theta2: big(t2) });
                }
            }
            for t1 in (1..m).step_by(2) {
                for t2 in (1..2 * m).step_by(2) {
                    if (t1 + t2) % 4 != 0 {
                        continue;
                    }
                    check_block(LocalBlock::TwoDiagonal { k1: k, k2: k + 1, theta1: big(t1), theta2: big(t2) });
                }
            }
        }
    }

    #[test]
    fn nine_has_none_and_five_has_one() {
        assert!(!has_anti_automorphism(&form(&[&[0, 3], &[3, 2]])).unwrap());
        assert!(has_anti_automorphism(&form(&[&[2, 3], &[3, 2]])).unwrap());
        assert!(matches!(
            construct_anti_automorphism(&form(&[&[0, 3], &[3, 2]])),
            Err(Error::NoAntiAutomorphism)
        ));
        let q = FiniteQuadraticForm::trivial();
        assert!(has_anti_automorphism(&q).unwrap());
        assert!(construct_anti_automorphism(&q).unwrap().matrix().is_empty());
    }

    #[test]
    fn scaled_hyperbolic_planes() {
        for n in 1..=50 {
            let q = form(&[&[0, n], &[n, 0]]);
            assert!(has_anti_automorphism(&q).unwrap());
            let f = construct_anti_automorphism(&q).unwrap();
            assert!(is_isometry(&q, &q, f.matrix(), -1));
            assert!(is_isometry(&q, &q, &f.square(&q), 1));
        }
    }
}
