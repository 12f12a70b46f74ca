//! Exhaustive isometry search between small finite quadratic forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::anti::{assemble, is_isometry, AntiAutomorphism};
use super::form::FiniteQuadraticForm;
use crate::error::{Error, Result};
use crate::snf::IntMatrix;

/// Default group-order limit for exhaustive searches.
pub const DEFAULT_CAP: u64 = 512;

/// Cyclic groups are searched in linear time and may exceed the cap up to here.
const CYCLIC_LIMIT: u64 = 1 << 22;

/// A form with values scaled to integers: `q * level` modulo `2 level` and
/// `b * level` modulo `level`.
struct Scaled {
    orders: Vec<i64>,
    b: Vec<Vec<i128>>,
    qd: Vec<i128>,
    level: i128,
}

impl Scaled {
    fn new(q: &FiniteQuadraticForm, level: &BigInt) -> Self {
        let lv = BigRational::from_integer(level.clone());
        let to = |r: &BigRational| -> i128 {
            let v = r * &lv;
            debug_assert!(v.denom().is_one());
            v.to_integer().to_i128().expect("scaled value fits")
        };
        let k = q.num_generators();
        let level = level.to_i128().expect("level fits");
        let qd: Vec<i128> = (0..k).map(|i| to(&q.q_gram()[i][i])).collect();
        let b = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { qd[i].rem_euclid(level) } else { to(&q.q_gram()[i][j]) })
                    .collect()
            })
            .collect();
        Scaled {
            orders: q.orders().iter().map(|d| d.to_i64().expect("order fits")).collect(),
            b,
            qd,
            level,
        }
    }

    fn q(&self, x: &[i64]) -> i128 {
        let m = 2 * self.level;
        let mut acc = 0i128;
        for i in 0..x.len() {
            let xi = x[i] as i128;
            acc = (acc + (xi * xi % m) * self.qd[i]).rem_euclid(m);
            for j in i + 1..x.len() {
                acc = (acc + (2 * xi * x[j] as i128 % m) * self.b[i][j]).rem_euclid(m);
            }
        }
        acc
    }

    fn b(&self, x: &[i64], y: &[i64]) -> i128 {
        let mut acc = 0i128;
        for i in 0..x.len() {
            for j in 0..y.len() {
                acc = (acc + (x[i] as i128 * y[j] as i128 % self.level) * self.b[i][j]).rem_euclid(self.level);
            }
        }
        acc
    }

    /// All elements, lexicographic in coordinates.
    fn elements(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for &d in &self.orders {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn kills(&self, n: i64, y: &[i64]) -> bool {
        y.iter().zip(&self.orders).all(|(c, d)| (c * n) % d == 0)
    }
}

fn level_of(forms: &[&FiniteQuadraticForm]) -> BigInt {
    forms
        .iter()
        .flat_map(|q| q.q_gram().iter().flatten())
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

fn signed(v: i128, sign: i32, m: i128) -> i128 {
    if sign < 0 {
        (-v).rem_euclid(m)
    } else {
        v
    }
}

/// Rank of an integer matrix modulo a prime.
fn rank_mod_p(mut m: Vec<Vec<i64>>, p: i64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows).find(|&r| m[r][c].rem_euclid(p) != 0) else {
            continue;
        };
        m.swap(rank, r);
        let inv = BigInt::from(m[rank][c])
            .modpow(&BigInt::from(p - 2), &BigInt::from(p))
            .to_i64()
            .expect("residue");
        for r2 in 0..rows {
            if r2 != rank {
                let f = (m[r2][c] * inv).rem_euclid(p);
                for c2 in 0..cols {
                    m[r2][c2] = (m[r2][c2] - f * m[rank][c2]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// First local map `P1 -> P2` with `q2 o f = sign q1`, images of the local
/// generators enumerated lexicographically.
fn local_search(p1: &Scaled, p2: &Scaled, prime: i64, sign: i32) -> Option<Vec<Vec<i64>>> {
    let elems = p2.elements();
    let q2: Vec<i128> = elems.iter().map(|y| p2.q(y)).collect();
    let r = p1.orders.len();
    let gens: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect();
    let m2 = 2 * p1.level;
    let want_q: Vec<i128> = gens.iter().map(|g| signed(p1.q(g), sign, m2)).collect();
    let candidates: Vec<Vec<usize>> = (0..r)
        .map(|i| {
            (0..elems.len())
                .filter(|&e| q2[e] == want_q[i] && p2.kills(p1.orders[i], &elems[e]))
                .collect()
        })
        .collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(r);
    fn dfs(
        i: usize,
        chosen: &mut Vec<usize>,
        cands: &[Vec<usize>],
        elems: &[Vec<i64>],
        p1: &Scaled,
        p2: &Scaled,
        gens: &[Vec<i64>],
        prime: i64,
        sign: i32,
    ) -> bool {
        if i == cands.len() {
            let m: Vec<Vec<i64>> = chosen.iter().map(|&e| elems[e].clone()).collect();
            return rank_mod_p(m, prime) == cands.len();
        }
        for &e in &cands[i] {
            let y = &elems[e];
            let ok = chosen.iter().enumerate().all(|(j, &ej)| {
                p2.b(y, &elems[ej]) == signed(p1.b(&gens[i], &gens[j]), sign, p1.level)
            });
            if !ok {
                continue;
            }
            chosen.push(e);
            if dfs(i + 1, chosen, cands, elems, p1, p2, gens, prime, sign) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    dfs(0, &mut chosen, &candidates, &elems, p1, p2, &gens, prime, sign)
        .then(|| chosen.iter().map(|&e| elems[e].clone()).collect())
}

/// First bijection `f: A1 -> A2` with `q2 o f = sign * q1` (columns are the
/// images of the generators of `q1`), searched prime by prime.
pub fn find_isometry(
    q1: &FiniteQuadraticForm,
    q2: &FiniteQuadraticForm,
    sign: i32,
    cap: u64,
) -> Result<Option<IntMatrix>> {
    if q1.orders() != q2.orders() {
        return Ok(None);
    }
    if q1.is_trivial() {
        return Ok(Some(vec![]));
    }
    let order = q1.order();
    let limit = if q1.is_cyclic() { CYCLIC_LIMIT.max(cap) } else { cap };
    if order > BigInt::from(limit) {
        return Err(Error::CapExceeded { order, cap });
    }
    let level = level_of(&[q1, q2]);
    let (parts1, parts2) = (q1.sylow_parts(), q2.sylow_parts());
    let mut maps = Vec::with_capacity(parts1.len());
    for (a, b) in parts1.iter().zip(&parts2) {
        let s1 = Scaled::new(&a.form, &level);
        let s2 = Scaled::new(&b.form, &level);
        if !q1.is_cyclic() && !same_value_counts(&s1, &s2, sign) {
            return Ok(None);
        }
        let prime = a.prime.to_i64().expect("small prime");
        let Some(images) = local_search(&s1, &s2, prime, sign) else {
            return Ok(None);
        };
        maps.push(to_matrix(&images));
    }
    let m = assemble(q1, q2, &parts1, &parts2, &maps);
    debug_assert!(is_isometry(q1, q2, &m, sign));
    Ok(Some(m))
}

fn to_matrix(images: &[Vec<i64>]) -> IntMatrix {
    let rows = images.first().map_or(0, Vec::len);
    (0..rows)
        .map(|i| images.iter().map(|c| BigInt::from(c[i])).collect())
        .collect()
}

/// Invariant prefilter: the multiset of values of `sign * q1` and `q2`.
fn same_value_counts(s1: &Scaled, s2: &Scaled, sign: i32) -> bool {
    let m = 2 * s1.level;
    let mut v1: Vec<i128> = s1.elements().iter().map(|x| signed(s1.q(x), sign, m)).collect();
    let mut v2: Vec<i128> = s2.elements().iter().map(|x| s2.q(x)).collect();
    v1.sort_unstable();
    v2.sort_unstable();
    v1 == v2
}

pub fn are_isometric(q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm, cap: u64) -> Result<bool> {
    find_isometry(q1, q2, 1, cap).map(|m| m.is_some())
}

/// `q1` and `q2` are anti-isometric iff `q1` is isometric to `-q2`.
pub fn are_anti_isometric(q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm, cap: u64) -> Result<bool> {
    are_isometric(q1, &q2.negate(), cap)
}

/// Exhaustive search for an anti-automorphism; requires `|A| <= cap`.
pub fn brute_force_anti_automorphism(
    q: &FiniteQuadraticForm,
    cap: u64,
) -> Result<Option<AntiAutomorphism>> {
    let order = q.order();
    if order > BigInt::from(cap) {
        return Err(Error::CapExceeded { order, cap });
    }
    Ok(find_isometry(q, q, -1, cap)?.map(|m| AntiAutomorphism::from_verified(q, m)))
}
