use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, modp, valuation};
use crate::error::{Error, Result};
use crate::lattice::GramLattice;
use crate::serde_ext::{self, format_rational};
use crate::snf::{mat_mul, smith_normal_form, IntMatrix};

/// A rational number modulo `2Z`, kept in `[0, 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QMod2Z(BigRational);

impl QMod2Z {
    pub fn new(value: BigRational) -> Self {
        QMod2Z(reduce_mod(&value, 2))
    }

    pub fn zero() -> Self {
        QMod2Z(BigRational::zero())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn neg(&self) -> Self {
        QMod2Z::new(-self.0.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for QMod2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// Representative of `r` modulo `m` in `[0, m)`.
pub(crate) fn reduce_mod(r: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(m));
    let q = (r / &m).floor();
    r - q * m
}

/// A finite abelian group `Z/d_1 + ... + Z/d_k` (`d_i | d_{i+1}`, `d_i >= 2`)
/// with a quadratic form valued in `Q/2Z`.
///
/// `q_gram[i][i] = q(g_i)` in `[0, 2)` and `q_gram[i][j] = b(g_i, g_j)` in
/// `[0, 1)` for `i != j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FormDoc", into = "FormDoc")]
pub struct FiniteQuadraticForm {
    orders: Vec<BigInt>,
    q_gram: Vec<Vec<BigRational>>,
    generator_lifts: Option<Vec<Vec<BigRational>>>,
}

#[derive(Serialize, Deserialize)]
struct FormDoc {
    #[serde(with = "serde_ext::dec_string_vec")]
    orders: Vec<BigInt>,
    #[serde(with = "serde_ext::rational_vec")]
    q_diagonal: Vec<BigRational>,
    /// Upper-triangular bilinear values, row by row.
    #[serde(with = "serde_ext::rational_vec")]
    bilinear: Vec<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator_lifts: Option<LiftsDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct LiftsDoc(#[serde(with = "serde_ext::rational_matrix")] Vec<Vec<BigRational>>);

impl TryFrom<FormDoc> for FiniteQuadraticForm {
    type Error = Error;
    fn try_from(doc: FormDoc) -> Result<Self> {
        let k = doc.orders.len();
        if doc.q_diagonal.len() != k || doc.bilinear.len() != k * k.saturating_sub(1) / 2 {
            return Err(Error::InvalidForm(format!(
                "{k} orders need {k} diagonal and {} bilinear values",
                k * k.saturating_sub(1) / 2
            )));
        }
        let mut gram = vec![vec![BigRational::zero(); k]; k];
        let mut it = doc.bilinear.into_iter();
        for i in 0..k {
            gram[i][i] = doc.q_diagonal[i].clone();
            for j in i + 1..k {
                let v = it.next().expect("length checked");
                gram[i][j] = v.clone();
                gram[j][i] = v;
            }
        }
        let mut form = FiniteQuadraticForm::new(doc.orders, gram)?;
        if let Some(LiftsDoc(l)) = doc.generator_lifts {
            if l.len() != k {
                return Err(Error::InvalidForm("one lift per generator required".into()));
            }
            form.generator_lifts = Some(l);
        }
        Ok(form)
    }
}

impl From<FiniteQuadraticForm> for FormDoc {
    fn from(f: FiniteQuadraticForm) -> Self {
        let k = f.orders.len();
        let mut bilinear = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                bilinear.push(f.q_gram[i][j].clone());
            }
        }
        FormDoc {
            q_diagonal: (0..k).map(|i| f.q_gram[i][i].clone()).collect(),
            orders: f.orders,
            bilinear,
            generator_lifts: f.generator_lifts.map(LiftsDoc),
        }
    }
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

impl FiniteQuadraticForm {
    /// Validates and canonicalizes a form given on generators.
    pub fn new(orders: Vec<BigInt>, q_gram: Vec<Vec<BigRational>>) -> Result<Self> {
        let k = orders.len();
        if q_gram.len() != k || q_gram.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidForm("q_gram must be k x k".into()));
        }
        for (i, d) in orders.iter().enumerate() {
            if *d < BigInt::from(2) {
                return Err(Error::InvalidForm(format!("order {d} < 2")));
            }
            if i > 0 && !(d % &orders[i - 1]).is_zero() {
                return Err(Error::InvalidForm("orders must form a divisibility chain".into()));
            }
        }
        let mut g = q_gram;
        for i in 0..k {
            for j in i + 1..k {
                if reduce_mod(&g[i][j], 1) != reduce_mod(&g[j][i], 1) {
                    return Err(Error::InvalidForm(format!("bilinear values ({i},{j}) asymmetric")));
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                g[i][j] = reduce_mod(&g[i][j], if i == j { 2 } else { 1 });
            }
        }
        for i in 0..k {
            let d = rat(&orders[i]);
            for j in 0..k {
                if !is_integer(&(&d * &g[i][j])) {
                    return Err(Error::InvalidForm(format!(
                        "b(g_{i}, g_{j}) is not killed by the order of g_{i}"
                    )));
                }
            }
            let dq = &d * &d * &g[i][i];
            if !is_integer(&dq) || dq.numer().is_odd() {
                return Err(Error::InvalidForm(format!("q(d_{i} g_{i}) is not 0 mod 2")));
            }
        }
        Ok(FiniteQuadraticForm { orders, q_gram: g, generator_lifts: None })
    }

    pub fn trivial() -> Self {
        FiniteQuadraticForm { orders: vec![], q_gram: vec![], generator_lifts: None }
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn q_gram(&self) -> &[Vec<BigRational>] {
        &self.q_gram
    }

    pub fn generator_lifts(&self) -> Option<&[Vec<BigRational>]> {
        self.generator_lifts.as_deref()
    }

    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.orders.len() <= 1
    }

    /// `|A|`.
    pub fn order(&self) -> BigInt {
        self.orders.iter().product()
    }

    /// Largest element order.
    pub fn exponent(&self) -> BigInt {
        self.orders.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Reduces coordinates modulo the generator orders.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter().zip(&self.orders).map(|(c, d)| modp(c, d)).collect()
    }

    pub fn evaluate_q(&self, x: &[BigInt]) -> QMod2Z {
        let mut acc = BigRational::zero();
        for i in 0..self.orders.len() {
            if x[i].is_zero() {
                continue;
            }
            acc += rat(&(&x[i] * &x[i])) * &self.q_gram[i][i];
            for j in i + 1..self.orders.len() {
                acc += rat(&(BigInt::from(2) * &x[i] * &x[j])) * &self.q_gram[i][j];
            }
        }
        QMod2Z::new(acc)
    }

    /// `b(x, y)` in `[0, 1)`.
    pub fn bilinear_b(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..self.orders.len() {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.orders.len() {
                acc += rat(&(&x[i] * &y[j])) * &self.q_gram[i][j];
            }
        }
        reduce_mod(&acc, 1)
    }

    /// Order of an element.
    pub fn element_order(&self, x: &[BigInt]) -> BigInt {
        x.iter()
            .zip(&self.orders)
            .fold(BigInt::one(), |acc, (c, d)| acc.lcm(&(d / c.gcd(d))))
    }

    /// The same group with `-q`.
    pub fn negate(&self) -> Self {
        let k = self.orders.len();
        let mut g = self.q_gram.clone();
        for i in 0..k {
            for j in 0..k {
                g[i][j] = reduce_mod(&-&g[i][j], if i == j { 2 } else { 1 });
            }
        }
        FiniteQuadraticForm {
            orders: self.orders.clone(),
            q_gram: g,
            generator_lifts: self.generator_lifts.clone(),
        }
    }

    /// Orthogonal direct sum, brought back to invariant-factor form.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (n, m) = (self.num_generators(), other.num_generators());
        let mut g = vec![vec![BigRational::zero(); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = self.q_gram[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                g[n + i][n + j] = other.q_gram[i][j].clone();
            }
        }
        let mut orders = self.orders.clone();
        orders.extend(other.orders.iter().cloned());
        FiniteQuadraticForm::from_any_generators(orders, g)
    }

    /// Form on `Z/d_1 + ... + Z/d_k` with arbitrary orders.
    pub fn from_any_generators(orders: Vec<BigInt>, q_gram: Vec<Vec<BigRational>>) -> Result<Self> {
        let k = orders.len();
        if q_gram.len() != k || q_gram.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidForm("q_gram must be k x k".into()));
        }
        if orders.iter().any(|d| !d.is_positive()) {
            return Err(Error::InvalidForm("orders must be positive".into()));
        }
        if k == 0 {
            return Ok(FiniteQuadraticForm::trivial());
        }
        let mut rel = vec![vec![BigInt::zero(); k]; k];
        for (i, d) in orders.iter().enumerate() {
            rel[i][i] = d.clone();
        }
        // x -> left * x identifies the group with Z^k / diag(snf)
        let s = smith_normal_form(&rel);
        let inv = smith_normal_form(&s.left);
        let back = mat_mul(&inv.right, &inv.left);
        let mut new_orders = vec![];
        let mut cols: Vec<Vec<BigRational>> = vec![];
        for (i, d) in s.diag.iter().enumerate() {
            if d.is_one() {
                continue;
            }
            new_orders.push(d.clone());
            cols.push((0..k).map(|r| rat(&back[r][i])).collect());
        }
        let pair = |x: &[BigRational], y: &[BigRational]| -> BigRational {
            let mut acc = BigRational::zero();
            for i in 0..k {
                for j in 0..k {
                    acc += &x[i] * &q_gram[i][j] * &y[j];
                }
            }
            acc
        };
        let gram = cols.iter().map(|x| cols.iter().map(|y| pair(x, y)).collect()).collect();
        FiniteQuadraticForm::new(new_orders, gram)
    }

    /// Primes dividing `|A|`, ascending.
    pub fn primes(&self) -> Vec<BigInt> {
        factorize(&self.exponent()).into_iter().map(|(p, _)| p).collect()
    }

    /// Restriction of `q` to each Sylow subgroup, keyed by prime.
    pub fn sylow_decompose(&self) -> BTreeMap<BigInt, FiniteQuadraticForm> {
        self.sylow_parts()
            .into_iter()
            .map(|part| (part.prime.clone(), part.form))
            .collect()
    }

    pub(crate) fn sylow_parts(&self) -> Vec<SylowPart> {
        self.primes()
            .into_iter()
            .map(|p| SylowPart::new(self, p))
            .collect()
    }

    /// Does the set of vectors generate the whole group?
    pub fn generates(&self, vectors: &[Vec<BigInt>]) -> bool {
        let k = self.num_generators();
        if k == 0 {
            return true;
        }
        // columns: the vectors, then the relations d_i e_i
        let mut m: IntMatrix = vec![Vec::with_capacity(vectors.len() + k); k];
        for (i, row) in m.iter_mut().enumerate() {
            for v in vectors {
                row.push(v[i].clone());
            }
            for j in 0..k {
                row.push(if i == j { self.orders[i].clone() } else { BigInt::zero() });
            }
        }
        smith_normal_form(&m).diag.iter().all(One::is_one)
    }

    pub(crate) fn unit(&self, i: usize) -> Vec<BigInt> {
        (0..self.num_generators())
            .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
            .collect()
    }
}

/// One Sylow subgroup together with how it sits in the ambient generators.
#[derive(Debug, Clone)]
pub(crate) struct SylowPart {
    pub prime: BigInt,
    pub form: FiniteQuadraticForm,
    /// Ambient generator index of each local generator.
    pub indices: Vec<usize>,
    /// Local generator `h = multiplier * g_index`.
    pub multipliers: Vec<BigInt>,
    /// CRT idempotent for `p` modulo the ambient exponent.
    pub idempotent: BigInt,
}

impl SylowPart {
    fn new(form: &FiniteQuadraticForm, p: BigInt) -> Self {
        let mut indices = Vec::new();
        let mut multipliers = Vec::new();
        let mut orders = Vec::new();
        for (i, d) in form.orders.iter().enumerate() {
            let v = valuation(d, &p);
            if v > 0 {
                let pv = p.pow(v);
                multipliers.push(d / &pv);
                orders.push(pv);
                indices.push(i);
            }
        }
        let k = indices.len();
        let mut g = vec![vec![BigRational::zero(); k]; k];
        for a in 0..k {
            for b in 0..k {
                let scale = rat(&(&multipliers[a] * &multipliers[b]));
                g[a][b] = scale * &form.q_gram[indices[a]][indices[b]];
            }
        }
        let exponent = form.exponent();
        let pe = p.pow(valuation(&exponent, &p));
        let rest = &exponent / &pe;
        // e = 1 mod p^e, 0 mod rest
        let idempotent = crate::arith::crt(&[(BigInt::one(), pe), (BigInt::zero(), rest)]);
        let local = FiniteQuadraticForm::new(orders, g).expect("restriction of a valid form");
        SylowPart { prime: p, form: local, indices, multipliers, idempotent }
    }

    /// Local coordinates of the `p`-component of an ambient element.
    pub fn to_local(&self, ambient: &FiniteQuadraticForm, x: &[BigInt]) -> Vec<BigInt> {
        let _ = ambient;
        self.indices
            .iter()
            .zip(&self.multipliers)
            .zip(self.form.orders())
            .map(|((&i, m), o)| modp(&(&self.idempotent / m * &x[i]), o))
            .collect()
    }

    /// Ambient coordinates of a local element.
    pub fn to_ambient(&self, ambient: &FiniteQuadraticForm, c: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); ambient.num_generators()];
        for ((&i, m), ci) in self.indices.iter().zip(&self.multipliers).zip(c) {
            out[i] = modp(&(m * ci), &ambient.orders()[i]);
        }
        out
    }
}

/// The discriminant form `L^* / L` of an even lattice, on SNF generators.
pub fn discriminant_form(l: &GramLattice) -> FiniteQuadraticForm {
    let snf = l.smith();
    let n = l.rank();
    let mut lifts = Vec::new();
    let mut orders = Vec::new();
    for i in 0..n {
        let d = snf.diag[i].abs();
        if d.is_one() {
            continue;
        }
        // lift = (column i of right) / d
        let lift: Vec<BigRational> = (0..n)
            .map(|r| BigRational::new(snf.right[r][i].clone(), d.clone()))
            .collect();
        lifts.push(lift);
        orders.push(d);
    }
    let k = orders.len();
    let mut g = vec![vec![BigRational::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = l.pair_rational(&lifts[i], &lifts[j]);
        }
    }
    let mut form = FiniteQuadraticForm::new(orders, g).expect("even nondegenerate lattice");
    form.generator_lifts = Some(lifts);
    form
}

impl fmt::Display for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("trivial");
        }
        let groups: Vec<String> = self.orders.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", groups.join(" + "))?;
        let q: Vec<String> = (0..self.orders.len())
            .map(|i| format_rational(&self.q_gram[i][i]))
            .collect();
        write!(f, ", q = ({})", q.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[&[i64]]) -> GramLattice {
        GramLattice::from_i64(rows).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn coprime_sum_is_cyclic() {
        let a = FiniteQuadraticForm::new(vec![BigInt::from(2)], vec![vec![r(1, 2)]]).unwrap();
        let b = FiniteQuadraticForm::new(vec![BigInt::from(3)], vec![vec![r(2, 3)]]).unwrap();
        let s = a.direct_sum(&b).unwrap();
        assert_eq!(s.orders(), &[BigInt::from(6)]);
        let mut values: Vec<BigRational> =
            (0..6).map(|x| s.evaluate_q(&v(&[x])).value().clone()).collect();
        values.sort();
        let mut expected: Vec<BigRational> = (0..2)
            .flat_map(|x| (0..3).map(move |y| (x, y)))
            .map(|(x, y)| reduce_mod(&(r(x * x, 2) + r(2 * y * y, 3)), 2))
            .collect();
        expected.sort();
        assert_eq!(values, expected);
    }

    #[test]
    fn scaled_hyperbolic_plane() {
        for n in 2..12 {
            let q = discriminant_form(&lat(&[&[0, n], &[n, 0]]));
            assert_eq!(q.orders(), &[BigInt::from(n), BigInt::from(n)]);
            // q(a1 g1 + a2 g2) must agree with 2 a1 a2 / n up to automorphism; check
            // the invariant statistic: number of isotropic elements
            let mut iso = 0;
            for a in 0..n {
                for b in 0..n {
                    if q.evaluate_q(&v(&[a, b])).is_zero() {
                        iso += 1;
                    }
                }
            }
            let mut expect = 0;
            for a in 0..n {
                for b in 0..n {
                    if (2 * a * b) % (2 * n) == 0 {
                        expect += 1;
                    }
                }
            }
            assert_eq!(iso, expect, "n = {n}");
        }
    }

    #[test]
    fn u5_value() {
        // generators of U(5)^*/U(5) are e/5 and f/5 up to SNF sign; q(e/5 + f/5) = 2/5
        let q = discriminant_form(&lat(&[&[0, 5], &[5, 0]]));
        let lifts = q.generator_lifts().unwrap();
        let l = lat(&[&[0, 5], &[5, 0]]);
        let e = vec![r(1, 5), r(0, 1)];
        let f = vec![r(0, 1), r(1, 5)];
        assert_eq!(reduce_mod(&l.pair_rational(&e, &f), 1), r(1, 5));
        assert_eq!(lifts.len(), 2);
        let s: Vec<BigRational> = e.iter().zip(&f).map(|(a, b)| a + b).collect();
        assert_eq!(reduce_mod(&l.pair_rational(&s, &s), 2), r(2, 5));
    }

    #[test]
    fn cyclic_examples() {
        let q = discriminant_form(&lat(&[&[0, 3], &[3, 2]]));
        assert_eq!(q.orders(), &[BigInt::from(9)]);
        for n in 1..10 {
            let q = discriminant_form(&lat(&[&[2, 1], &[1, -2 * n]]));
            assert_eq!(q.orders(), &[BigInt::from(4 * n + 1)]);
        }
        assert!(discriminant_form(&GramLattice::u()).is_trivial());
    }

    #[test]
    fn q_of_generator_for_disc_minus_five() {
        let q = discriminant_form(&lat(&[&[2, 3], &[3, 2]]));
        assert_eq!(q.orders(), &[BigInt::from(5)]);
        // G^{-1} = (1/-5)[[2,-3],[-3,2]]; the values on Z/5 are {0, 2/5, 8/5, ...} scaled
        let values: Vec<QMod2Z> = (0..5).map(|a| q.evaluate_q(&v(&[a]))).collect();
        let mut sorted: Vec<BigRational> = values.iter().map(|x| x.value().clone()).collect();
        sorted.sort();
        assert_eq!(sorted, vec![r(0, 1), r(2, 5), r(2, 5), r(8, 5), r(8, 5)]);
        // the dual vector e1^* = G^{-1} e1 has norm (G^{-1})_{11} = -2/5 = 8/5 mod 2
        let l = lat(&[&[2, 3], &[3, 2]]);
        let dual = vec![r(-2, 5), r(3, 5)];
        assert_eq!(reduce_mod(&l.pair_rational(&dual, &dual), 2), r(8, 5));
    }

    #[test]
    fn sylow_split() {
        let q = discriminant_form(&lat(&[&[2, 0], &[0, -12]]));
        assert_eq!(q.order(), BigInt::from(24));
        let parts = q.sylow_decompose();
        let keys: Vec<_> = parts.keys().cloned().collect();
        assert_eq!(keys, vec![BigInt::from(2), BigInt::from(3)]);
        assert_eq!(parts[&BigInt::from(2)].order(), BigInt::from(8));
        assert_eq!(parts[&BigInt::from(3)].order(), BigInt::from(3));
        assert!(FiniteQuadraticForm::trivial().sylow_decompose().is_empty());
    }

    #[test]
    fn rejects_ill_defined_forms() {
        assert!(FiniteQuadraticForm::new(v(&[3]), vec![vec![r(1, 3)]]).is_err());
        assert!(FiniteQuadraticForm::new(v(&[3]), vec![vec![r(2, 3)]]).is_ok());
        assert!(FiniteQuadraticForm::new(v(&[2, 3]), vec![vec![r(1, 2), r(0, 1)], vec![r(0, 1), r(2, 3)]]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let q = discriminant_form(&lat(&[&[2, 0], &[0, -12]]));
        let s = serde_json::to_string(&q).unwrap();
        let back: FiniteQuadraticForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        assert!(s.contains("\"q_diagonal\""));
    }
}
