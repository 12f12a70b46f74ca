//! Modular arithmetic over arbitrary-precision integers: residues, inverses,
//! factorization by trial division, square roots modulo primes and Hensel
//! lifting of simple roots to prime powers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Least nonnegative residue of `a` modulo `m` (`m > 0`).
pub fn modp(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn egcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let (g, x, _) = egcd(&modp(a, m), m);
    g.is_one().then(|| modp(&x, m))
}

pub fn pow_mod(base: &BigInt, exp: &BigInt, m: &BigInt) -> BigInt {
    modp(base, m).modpow(exp, m)
}

/// Returns `sqrt(n)` when `n >= 0` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Prime factorization of `|n|` by trial division, primes ascending.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut p = BigInt::from(2u32);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            let mut e = 0;
            while (&n % &p).is_zero() {
                n /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    let mut n = n.abs();
    let mut v = 0;
    if n.is_zero() {
        return 0;
    }
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// Euler criterion for an odd prime `p`: 1, -1 or 0.
pub fn legendre(a: &BigInt, p: &BigInt) -> i32 {
    let a = modp(a, p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - 1u32) / 2u32;
    if a.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// Tonelli-Shanks square root modulo an odd prime. `None` for non-residues.
pub fn sqrt_mod_prime(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = modp(a, p);
    if a.is_zero() {
        return Some(BigInt::zero());
    }
    if legendre(&a, p) != 1 {
        return None;
    }
    let one = BigInt::one();
    let mut q: BigInt = p - 1u32;
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = BigInt::from(2u32);
    while legendre(&z, p) != -1 {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) / 2u32), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(&one << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    Some(r)
}

/// Evaluates an integer polynomial given by ascending coefficients.
fn eval_poly(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn derivative(coeffs: &[BigInt]) -> Vec<BigInt> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// Lifts a root of `f` modulo `p^from` to a root modulo `p^to`, one power at a
/// time. The derivative at the root must be a unit modulo `p`.
pub fn hensel_lift(
    coeffs: &[BigInt],
    root: &BigInt,
    p: &BigInt,
    from: u32,
    to: u32,
) -> Option<BigInt> {
    let df = derivative(coeffs);
    let mut t = root.clone();
    if !(eval_poly(coeffs, &t) % p.pow(from.max(1))).is_zero() {
        return None;
    }
    for j in from..to {
        let m = p.pow(j + 1);
        let d = eval_poly(&df, &t);
        let dinv = inv_mod(&d, &m)?;
        t = modp(&(&t - eval_poly(coeffs, &t) * dinv), &m);
    }
    Some(modp(&t, &p.pow(to.max(1))))
}

/// A square root of `-1` modulo `p^k` for a prime `p = 1 (mod 4)`.
pub fn sqrt_neg_one(p: &BigInt, k: u32) -> Option<BigInt> {
    if modp(p, &BigInt::from(4u32)) != BigInt::one() {
        return None;
    }
    let base = sqrt_mod_prime(&BigInt::from(-1), p)?;
    let poly = [BigInt::one(), BigInt::zero(), BigInt::one()];
    hensel_lift(&poly, &base, p, 1, k)
}

/// Chinese remainder combination of pairwise coprime congruences.
pub fn crt(residues: &[(BigInt, BigInt)]) -> BigInt {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (r, mi) in residues {
        let inv = inv_mod(&m, mi).expect("moduli must be coprime");
        let k = modp(&((r - &x) * inv), mi);
        x += &m * k;
        m *= mi;
    }
    x
}
