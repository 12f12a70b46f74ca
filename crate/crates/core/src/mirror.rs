//! Mirror-symmetry decision procedures on Neron-Severi lattices.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::disc::{are_anti_isometric, are_isometric, discriminant_form, has_anti_automorphism};
use crate::error::{Error, Result};
use crate::lattice::{canonical_box, GramLattice, LatticeVector, StandardKind};
use crate::snf::{integer_kernel, mat_mul, transpose, IntMatrix};

/// Default coordinate bound for embedding and representation searches.
pub const DEFAULT_BOUND: u64 = 8;

/// Three-valued verdict for bounded searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl From<bool> for Tri {
    fn from(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }
}

/// A primitive embedding of a lattice into `U + U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingWitness {
    /// Image of each basis vector, in the basis `(e1, f1, e2, f2)` of `U + U`.
    pub images: Vec<LatticeVector>,
    /// Gram matrix of the orthogonal complement.
    pub complement_gram: GramLattice,
}

fn wrong_rank(expected: &str, found: usize) -> Error {
    Error::WrongRank { expected: expected.into(), found }
}

fn negative_rank1(n: &BigInt) -> GramLattice {
    GramLattice::new(vec![vec![-(n * BigInt::from(2))]]).expect("nonzero")
}

/// `U + <-2n>`.
pub fn u_plus_negative(n: &BigInt) -> GramLattice {
    GramLattice::u().direct_sum(&negative_rank1(n))
}

/// The equivalent conditions guaranteeing a mirror partner.
pub fn satisfies_condition_diamond(m: &GramLattice) -> Result<bool> {
    m.require_hyperbolic()?;
    match m.rank() {
        0..=2 => Ok(true),
        3 => {
            let d = m.determinant().abs();
            if d.is_odd() {
                return Ok(false);
            }
            let q = discriminant_form(m);
            if !q.is_cyclic() {
                return Ok(false);
            }
            let reference = discriminant_form(&u_plus_negative(&(d / 2)));
            are_isometric(&q, &reference, crate::disc::DEFAULT_CAP)
        }
        _ => Ok(false),
    }
}

pub fn admits_mirror_partner(ns: &GramLattice) -> Result<bool> {
    if ns.rank() > 4 {
        return Err(wrong_rank("1..=4", ns.rank()));
    }
    satisfies_condition_diamond(ns)
}

/// `NS_X` and `NS_Y` are mirror partners iff their ranks sum to 4 and their
/// discriminant forms are anti-isometric.
pub fn are_mirror_partners(x: &GramLattice, y: &GramLattice, cap: u64) -> Result<bool> {
    x.require_hyperbolic()?;
    y.require_hyperbolic()?;
    if x.rank() + y.rank() != 4 {
        return Ok(false);
    }
    are_anti_isometric(&discriminant_form(x), &discriminant_form(y), cap)
}

/// A Neron-Severi lattice for a mirror partner; `None` when no mirror exists.
pub fn mirror_ns_representative(ns: &GramLattice, bound: u64, cap: u64) -> Result<Option<GramLattice>> {
    if !admits_mirror_partner(ns)? {
        return Ok(None);
    }
    let d = ns.determinant().abs();
    let rep = match ns.rank() {
        1 => u_plus_negative(&(&d / 2)),
        3 => GramLattice::new(vec![vec![d]]).expect("nonzero"),
        _ => primitive_embedding_into_2u(ns, bound, cap)?.complement_gram,
    };
    if !are_mirror_partners(ns, &rep, cap)? {
        return Err(Error::Internal("mirror representative failed the partner test".into()));
    }
    Ok(Some(rep))
}

fn require_rank_two_hyperbolic(ns: &GramLattice) -> Result<()> {
    if ns.rank() != 2 {
        return Err(wrong_rank("2", ns.rank()));
    }
    ns.require_hyperbolic()
}

/// `T(X) = N(X)`: decided by the anti-automorphism criterion.
pub fn is_self_mirror(ns: &GramLattice) -> Result<bool> {
    require_rank_two_hyperbolic(ns)?;
    has_anti_automorphism(&discriminant_form(ns))
}

/// For a principally polarized surface (a class of square 2 exists), the
/// self-mirror property depends only on the determinant. `None` when no
/// such class is found within `bound`.
pub fn is_self_mirror_principally_polarized(ns: &GramLattice, bound: u64) -> Result<Option<bool>> {
    require_rank_two_hyperbolic(ns)?;
    if ns.represents(&BigInt::from(2), bound).is_none() {
        return Ok(None);
    }
    Ok(Some(determinant_criterion(&ns.determinant())))
}

/// `|d|` divisible neither by 16 nor by a prime `p = 3 mod 4`.
pub fn determinant_criterion(d: &BigInt) -> bool {
    let d = d.abs();
    if (&d % 16u32).is_zero() {
        return false;
    }
    factorize(&d)
        .iter()
        .all(|(p, _)| (p % 4u32) != BigInt::from(3u32))
}

pub fn are_stably_equivalent(a: &GramLattice, b: &GramLattice, cap: u64) -> Result<bool> {
    require_rank_two_hyperbolic(a)?;
    require_rank_two_hyperbolic(b)?;
    are_isometric(&discriminant_form(a), &discriminant_form(b), cap)
}

/// Whether an abelian surface with this Neron-Severi lattice is simple, i.e.
/// the lattice has no nonzero isotropic vector.
pub fn is_simple(ns: &GramLattice, bound: u64) -> Tri {
    match ns.has_isotropic_vector(bound) {
        crate::lattice::Isotropy::Yes(_) => Tri::No,
        crate::lattice::Isotropy::No => Tri::Yes,
        crate::lattice::Isotropy::Unknown { .. } => Tri::Unknown,
    }
}

fn pair_2u(x: &[i64], y: &[i64]) -> i64 {
    x[0] * y[1] + x[1] * y[0] + x[2] * y[3] + x[3] * y[2]
}

fn gram_2u() -> IntMatrix {
    let u = GramLattice::u();
    u.direct_sum(&u).gram().clone()
}

/// gcd of the maximal minors of the `4 x r` matrix with the given columns.
fn is_primitive(cols: &[Vec<i64>]) -> bool {
    let r = cols.len();
    let mut g = BigInt::zero();
    let rows: Vec<usize> = (0..4).collect();
    for subset in combinations(&rows, r) {
        let minor: IntMatrix = subset
            .iter()
            .map(|&i| cols.iter().map(|c| BigInt::from(c[i])).collect())
            .collect();
        g = g.gcd(&crate::lattice::bareiss_det(&minor));
        if g.is_one() {
            return true;
        }
    }
    false
}

fn combinations(items: &[usize], r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], r - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Searches images of the basis vectors with coordinates in `[-bound, bound]`
/// and returns the first primitive embedding in canonical order.
pub fn primitive_embedding_into_2u(m: &GramLattice, bound: u64, cap: u64) -> Result<EmbeddingWitness> {
    let r = m.rank();
    if r > 3 {
        return Err(wrong_rank("<= 3", r));
    }
    let exhausted = Error::SearchExhausted { bound };
    let Some(target): Option<Vec<Vec<i64>>> = m
        .gram()
        .iter()
        .map(|row| row.iter().map(|x| x.to_i64()).collect())
        .collect()
    else {
        return Err(exhausted);
    };
    let vectors: Vec<Vec<i64>> = canonical_box(4, bound).skip(1).collect();
    let mut by_norm: HashMap<i64, Vec<usize>> = HashMap::new();
    for (i, v) in vectors.iter().enumerate() {
        by_norm.entry(pair_2u(v, v)).or_default().push(i);
    }
    let empty = Vec::new();
    let buckets: Vec<&Vec<usize>> = (0..r).map(|i| by_norm.get(&target[i][i]).unwrap_or(&empty)).collect();
    let md = discriminant_form(m);
    let mut chosen: Vec<usize> = Vec::with_capacity(r);
    let mut stack: Vec<usize> = vec![0];
    // iterative DFS: stack[i] is the next candidate position at depth i
    while let Some(pos) = stack.last_mut() {
        let depth = chosen.len();
        let bucket = buckets[depth];
        if *pos >= bucket.len() {
            stack.pop();
            chosen.pop();
            continue;
        }
        let idx = bucket[*pos];
        *pos += 1;
        let v = &vectors[idx];
        if !chosen.iter().enumerate().all(|(j, &c)| pair_2u(v, &vectors[c]) == target[depth][j]) {
            continue;
        }
        chosen.push(idx);
        if chosen.len() < r {
            stack.push(0);
            continue;
        }
        let cols: Vec<Vec<i64>> = chosen.iter().map(|&c| vectors[c].clone()).collect();
        if is_primitive(&cols) {
            if let Some(w) = complement(&cols, &md, cap)? {
                return Ok(w);
            }
        }
        chosen.pop();
    }
    Err(exhausted)
}

fn complement(
    cols: &[Vec<i64>],
    md: &crate::disc::FiniteQuadraticForm,
    cap: u64,
) -> Result<Option<EmbeddingWitness>> {
    let g4 = gram_2u();
    let v: IntMatrix = cols.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect();
    // rows of v are the images; kernel of v * G4 is the complement
    let k = integer_kernel(&mat_mul(&v, &g4));
    let gram = mat_mul(&mat_mul(&transpose(&k), &g4), &k);
    let Ok(comp) = GramLattice::new(gram) else {
        return Ok(None);
    };
    if !are_anti_isometric(md, &discriminant_form(&comp), cap)? {
        return Ok(None);
    }
    Ok(Some(EmbeddingWitness {
        images: cols.iter().map(|c| LatticeVector::from_i64(c)).collect(),
        complement_gram: comp,
    }))
}

/// Gram matrix of `U + U + U` in the basis `(e1, f1, e2, f2, e3, f3)`.
pub fn lambda_gram() -> IntMatrix {
    let u = GramLattice::u();
    u.direct_sum(&u).direct_sum(&u).gram().clone()
}

/// Isometries of `U + U + U` used to compare the two orientations: `phi`
/// fixes the first two summands and swaps the basis of the third
/// (determinant -1); `psi` negates the first two summands and fixes the
/// third (determinant +1).
pub fn shioda_involutions() -> (IntMatrix, IntMatrix) {
    let mut phi = crate::snf::identity(6);
    phi[4][4] = BigInt::zero();
    phi[5][5] = BigInt::zero();
    phi[4][5] = BigInt::one();
    phi[5][4] = BigInt::one();
    let mut psi = crate::snf::identity(6);
    for (i, row) in psi.iter_mut().enumerate().take(4) {
        row[i] = BigInt::from(-1);
    }
    (phi, psi)
}

/// Scales `<2n>` for use in tables.
pub fn rank_one(n: i64) -> GramLattice {
    GramLattice::standard(StandardKind::Rank1, n).expect("n != 0")
}
