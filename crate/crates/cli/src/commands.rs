use abmirror_core::disc::{find_isometry, is_isometry};
use abmirror_core::mirror::{are_mirror_partners, determinant_criterion, is_self_mirror, rank_one, u_plus_negative};
use abmirror_core::mukai::{kahler_volume, symplectic_dual};
use abmirror_core::periods::{is_admissible, is_torus, plucker_period, wedge_pairing, NumericMode, PeriodScalar};
use abmirror_core::report::self_mirror_verdict;
use abmirror_core::serde_ext::{format_rational, WireInt, WireRational};
use abmirror_core::{
    analyze as analyze_lattice, brute_force_anti_automorphism, construct_anti_automorphism,
    discriminant_form, has_anti_automorphism, ComplexRational, ComplexifiedKahlerClass, GramLattice,
    IntMatrix, PeriodMatrix, SearchOptions,
};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{CliError, Options, Status};

type Outcome = Result<(Value, Status), CliError>;

type WireMatrix = Vec<Vec<WireInt>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramDoc {
    pub gram: WireMatrix,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorPairDoc {
    pub a: WireMatrix,
    pub b: WireMatrix,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualDoc {
    pub gram: WireMatrix,
    pub b: Vec<WireRational>,
    pub kappa: Vec<WireRational>,
    #[serde(default)]
    pub reference: Option<Vec<WireRational>>,
}

/// Two rows of four complex entries, each `[re, im]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodDoc {
    pub rows: Vec<Vec<(WireRational, WireRational)>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDoc {
    #[serde(default = "default_entry_bound")]
    pub entry_bound: i64,
    #[serde(default = "default_max_det")]
    pub max_det: i64,
    /// Draw this many lattices from the box instead of running all of them.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Explicit lattices; overrides the box.
    #[serde(default)]
    pub grams: Option<Vec<WireMatrix>>,
}

fn default_entry_bound() -> i64 {
    12
}

fn default_max_det() -> i64 {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepFamily {
    /// `[[2,1],[1,-2n]]` and `[[2,0],[0,-2n]]`.
    PrincipallyPolarized,
    /// `U(n)`.
    ScaledU,
    /// `<2n>` against `U + <-2n>`.
    RankOne,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDoc {
    pub family: SweepFamily,
    #[serde(default = "one")]
    pub from: i64,
    pub to: i64,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn one() -> i64 {
    1
}

fn lattice(m: &WireMatrix) -> Result<GramLattice, CliError> {
    Ok(GramLattice::new(m.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect())?)
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::Internal(e.to_string()))
}

fn matrix_value(m: &IntMatrix) -> Value {
    Value::Array(
        m.iter()
            .map(|r| Value::Array(r.iter().map(|x| to_value(&WireInt(x.clone())).unwrap()).collect()))
            .collect(),
    )
}

fn orders_value(orders: &[BigInt]) -> Value {
    Value::Array(orders.iter().map(|d| Value::String(d.to_string())).collect())
}

fn complex_value(z: &ComplexRational) -> Value {
    json!({ "re": format_rational(&z.re), "im": format_rational(&z.im) })
}

fn rationals_value(v: &[BigRational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_rational(x))).collect())
}

pub fn analyze(doc: &GramDoc, opts: &Options) -> Outcome {
    let ns = lattice(&doc.gram)?;
    let report = analyze_lattice(&ns, SearchOptions { bound: opts.bound, cap: opts.cap })?;
    Ok((to_value(&report)?, Status::Ok))
}

pub fn mirror_pair(doc: &MirrorPairDoc, opts: &Options) -> Outcome {
    let (x, y) = (lattice(&doc.a)?, lattice(&doc.b)?);
    let verdict = are_mirror_partners(&x, &y, opts.cap)?;
    let (qx, qy) = (discriminant_form(&x), discriminant_form(&y));
    let rank_sum = x.rank() + y.rank();
    let (reason, witness) = if rank_sum != 4 {
        (format!("Picard numbers sum to {rank_sum}, not 4"), Value::Null)
    } else if verdict {
        let m = find_isometry(&qx, &qy, -1, opts.cap)?
            .ok_or_else(|| CliError::Internal("partner test passed without a witness".into()))?;
        ("discriminant forms are anti-isometric".to_string(), matrix_value(&m))
    } else {
        ("discriminant forms are not anti-isometric".to_string(), Value::Null)
    };
    let doc = json!({
        "mirror_partners": verdict,
        "reason": reason,
        "disc_orders_a": orders_value(qx.orders()),
        "disc_orders_b": orders_value(qy.orders()),
        "anti_isometry": witness,
    });
    Ok((doc, Status::Ok))
}

pub fn self_mirror(doc: &GramDoc) -> Outcome {
    let ns = lattice(&doc.gram)?;
    Ok((to_value(&self_mirror_verdict(&ns)?)?, Status::Ok))
}

fn rationals(v: &[WireRational]) -> Vec<BigRational> {
    v.iter().map(|x| x.0.clone()).collect()
}

pub fn dual(doc: &DualDoc) -> Outcome {
    let ns = lattice(&doc.gram)?;
    let omega = ComplexifiedKahlerClass::new(
        &ns,
        rationals(&doc.b),
        rationals(&doc.kappa),
        doc.reference.as_deref().map(rationals),
    )?;
    let d = symplectic_dual(&ns, &omega)?;
    let class = |c: &ComplexifiedKahlerClass| json!({ "b": rationals_value(&c.b), "kappa": rationals_value(&c.kappa) });
    let doc = json!({
        "omega": class(&omega),
        "dual": class(&d),
        "volume": complex_value(&kahler_volume(&ns, &omega)),
        "dual_volume": complex_value(&kahler_volume(&ns, &d)),
        "reference": rationals_value(&omega.reference),
    });
    Ok((doc, Status::Ok))
}

fn period_entries(doc: &PeriodDoc) -> Result<Vec<Vec<(BigRational, BigRational)>>, CliError> {
    if doc.rows.len() != 2 || doc.rows.iter().any(|r| r.len() != 4) {
        return Err(CliError::Validation("at rows: expected 2 rows of 4 complex entries".into()));
    }
    Ok(doc.rows.iter().map(|r| r.iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect()).collect())
}

fn period_document<T: PeriodScalar>(
    pi: PeriodMatrix<T>,
    show: impl Fn(&T) -> Value,
) -> Value {
    let v = plucker_period(&pi);
    let pair = |z: &Complex<T>| json!([show(&z.re), show(&z.im)]);
    json!({
        "mode": T::MODE,
        "plucker": v.coords.iter().map(pair).collect::<Vec<_>>(),
        "wedge_square": pair(&wedge_pairing(&v, &v)),
        "hermitian": pair(&wedge_pairing(&v, &v.conj())),
        "torus": is_torus(&pi),
        "admissible": is_admissible(&pi),
    })
}

pub fn period(doc: &PeriodDoc, opts: &Options) -> Outcome {
    let e = period_entries(doc)?;
    let doc = match opts.numeric {
        NumericMode::Exact => {
            let pi = PeriodMatrix::new(std::array::from_fn(|i| {
                std::array::from_fn(|j| Complex::new(e[i][j].0.clone(), e[i][j].1.clone()))
            }));
            period_document(pi, |x: &BigRational| Value::String(format_rational(x)))
        }
        NumericMode::Float => {
            let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
            let pi = PeriodMatrix::new(std::array::from_fn(|i| {
                std::array::from_fn(|j| Complex::new(f(&e[i][j].0), f(&e[i][j].1)))
            }));
            period_document(pi, |x: &f64| json!(x))
        }
    };
    Ok((doc, Status::Ok))
}

fn box_grams(e: i64, max_det: i64) -> Vec<IntMatrix> {
    let mut out = vec![];
    for a in (-e..=e).filter(|x| x % 2 == 0) {
        for c in (-e..=e).filter(|x| x % 2 == 0) {
            for b in -e..=e {
                let det = a * c - b * b;
                if det != 0 && det.abs() <= max_det {
                    out.push(vec![vec![a.into(), b.into()], vec![b.into(), c.into()]]);
                }
            }
        }
    }
    out
}

pub fn oracle(doc: &OracleDoc, opts: &Options) -> Outcome {
    let grams: Vec<IntMatrix> = match &doc.grams {
        Some(gs) => gs.iter().map(|m| m.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect()).collect(),
        None => {
            if doc.entry_bound < 0 || doc.max_det < 1 {
                return Err(CliError::Validation("at entry_bound/max_det: must be positive".into()));
            }
            let mut all = box_grams(doc.entry_bound, doc.max_det);
            if let Some(n) = doc.samples {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                all.shuffle(&mut rng);
                all.truncate(n);
            }
            all
        }
    };
    let mut rows = Vec::with_capacity(grams.len());
    let mut disagreements = 0;
    for g in grams {
        let l = GramLattice::new(g)?;
        let q = discriminant_form(&l);
        let criterion = has_anti_automorphism(&q)?;
        let brute = brute_force_anti_automorphism(&q, opts.cap)?.is_some();
        let witness_ok = if criterion {
            let f = construct_anti_automorphism(&q)?;
            Some(is_isometry(&q, &q, f.matrix(), -1))
        } else {
            None
        };
        let agree = criterion == brute && witness_ok != Some(false);
        if !agree {
            disagreements += 1;
        }
        rows.push(json!({
            "gram": matrix_value(l.gram()),
            "disc_orders": orders_value(q.orders()),
            "criterion": criterion,
            "brute_force": brute,
            "witness_verified": witness_ok,
            "agree": agree,
        }));
    }
    let status = if disagreements == 0 { Status::Ok } else { Status::Disagreement };
    let doc = json!({
        "instances": rows.len(),
        "disagreements": disagreements,
        "rows": rows,
    });
    Ok((doc, status))
}

fn sweep_item(family: SweepFamily, n: i64) -> Result<Value, CliError> {
    Ok(match family {
        SweepFamily::PrincipallyPolarized => {
            let mut cases = vec![];
            for off in [1, 0] {
                let l = GramLattice::from_i64(&[&[2, off], &[off, -2 * n]])?;
                let verdict = is_self_mirror(&l)?;
                let rule = determinant_criterion(&l.determinant());
                cases.push(json!({
                    "gram": matrix_value(l.gram()),
                    "determinant": l.determinant().to_string(),
                    "self_mirror": verdict,
                    "determinant_rule": rule,
                    "agree": verdict == rule,
                }));
            }
            json!({ "n": n, "cases": cases })
        }
        SweepFamily::ScaledU => {
            let l = GramLattice::from_i64(&[&[0, n], &[n, 0]])?;
            let v = self_mirror_verdict(&l)?;
            json!({
                "n": n,
                "self_mirror": v.self_mirror,
                "witness": v.witness.as_ref().map(|w| matrix_value(w.matrix())),
            })
        }
        SweepFamily::RankOne => {
            let x = rank_one(n);
            let y = u_plus_negative(&BigInt::from(n));
            json!({
                "n": n,
                "ns": matrix_value(x.gram()),
                "mirror_ns": matrix_value(y.gram()),
                "mirror_partners": are_mirror_partners(&x, &y, abmirror_core::disc::DEFAULT_CAP)?,
            })
        }
    })
}

pub fn sweep(doc: &SweepDoc) -> Outcome {
    if doc.from < 1 || doc.to < doc.from {
        return Err(CliError::Validation("at from/to: need 1 <= from <= to".into()));
    }
    let ns: Vec<i64> = (doc.from..=doc.to).collect();
    let threads = doc
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, ns.len());
    let chunk = ns.len().div_ceil(threads);
    let results: Vec<Result<Value, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = ns
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|&n| sweep_item(doc.family, n)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let items = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let doc = json!({ "family": doc.family_name(), "items": items });
    Ok((doc, Status::Ok))
}

impl SweepDoc {
    fn family_name(&self) -> &'static str {
        match self.family {
            SweepFamily::PrincipallyPolarized => "principally-polarized",
            SweepFamily::ScaledU => "scaled-u",
            SweepFamily::RankOne => "rank-one",
        }
    }
}
