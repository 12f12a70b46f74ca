use std::process::ExitCode;
use std::time::{Duration, Instant};

use abmirror_core::disc::{obstruction, FiniteQuadraticForm};
use abmirror_core::lattice::bareiss_det;
use abmirror_core::mirror::{
    admits_mirror_partner, are_mirror_partners, determinant_criterion, is_self_mirror,
    primitive_embedding_into_2u, rank_one, satisfies_condition_diamond, u_plus_negative,
};
use abmirror_core::mukai::{
    apply_isometry, dual_isometry, exp_class, kahler_volume, numerical_lattice, symplectic_dual,
    ComplexifiedKahlerClass,
};
use abmirror_core::periods::{is_admissible, is_torus, plucker_period, wedge_pairing};
use abmirror_core::snf::{identity, mat_mul, transpose};
use abmirror_core::{
    analyze, are_anti_isometric, brute_force_anti_automorphism, construct_anti_automorphism,
    discriminant_form, has_anti_automorphism, AntiAutomorphism, GramLattice, IntMatrix,
    PeriodMatrix, SearchOptions, Tri,
};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lat(rows: &[&[i64]]) -> GramLattice {
    GramLattice::from_i64(rows).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Even rank-2 Gram matrices with entries in `[-e, e]`, nonzero determinant
/// bounded by `max_det` in absolute value.
fn rank_two_grams(e: i64, max_det: i64) -> Vec<[[i64; 2]; 2]> {
    let mut out = vec![];
    for a in (-e..=e).filter(|x| x % 2 == 0) {
        for c in (-e..=e).filter(|x| x % 2 == 0) {
            for b in -e..=e {
                let det = a * c - b * b;
                if det != 0 && det.abs() <= max_det {
                    out.push([[a, b], [b, c]]);
                }
            }
        }
    }
    out
}

/// Independent check that `m` (columns = images of generators) is a
/// bijective map with `q(f(x)) = -q(x)`: compares `q` on generators and `b`
/// on generator pairs, which determine `q` on the whole group.
fn oracle_anti(q: &FiniteQuadraticForm, m: &IntMatrix) -> bool {
    let k = q.num_generators();
    let image = |j: usize| -> Vec<BigInt> { q.reduce(&(0..k).map(|i| m[i][j].clone()).collect::<Vec<_>>()) };
    let unit = |j: usize| -> Vec<BigInt> { (0..k).map(|i| BigInt::from((i == j) as i64)).collect() };
    let images: Vec<Vec<BigInt>> = (0..k).map(image).collect();
    for j in 0..k {
        if !(&q.orders()[j] % q.element_order(&images[j])).is_zero() {
            return false;
        }
        if q.evaluate_q(&images[j]) != q.evaluate_q(&unit(j)).neg() {
            return false;
        }
        for i in 0..j {
            let lhs = q.bilinear_b(&images[i], &images[j]);
            let rhs = q.bilinear_b(&unit(i), &unit(j));
            let sum = lhs + rhs;
            if !sum.is_integer() {
                return false;
            }
        }
    }
    q.generates(&images)
}

fn criterion_1() -> Outcome {
    let opts = SearchOptions::default();
    let r = analyze(&lat(&[&[0, 3], &[3, 2]]), opts).map_err(|e| e.to_string())?;
    ensure(r.disc_orders == vec![BigInt::from(9)], || format!("disc {:?}", r.disc_orders))?;
    ensure(r.simple == Tri::No, || "[[0,3],[3,2]] reported simple".into())?;
    ensure(r.self_mirror == Some(false), || "[[0,3],[3,2]] reported self-mirror".into())?;
    let r = analyze(&lat(&[&[2, 3], &[3, 2]]), opts).map_err(|e| e.to_string())?;
    ensure(r.disc_orders == vec![BigInt::from(5)], || format!("disc {:?}", r.disc_orders))?;
    ensure(r.simple == Tri::Yes, || "[[2,3],[3,2]] not simple".into())?;
    ensure(r.self_mirror == Some(true), || "[[2,3],[3,2]] not self-mirror".into())?;
    Ok("both worked examples match".into())
}

fn criterion_2() -> Outcome {
    for n in 1..=50i64 {
        let l = lat(&[&[0, n], &[n, 0]]);
        ensure(is_self_mirror(&l) == Ok(true), || format!("U({n}) not self-mirror"))?;
        if n == 1 {
            continue;
        }
        let bn = BigInt::from(n);
        let q = FiniteQuadraticForm::new(
            vec![bn.clone(), bn.clone()],
            vec![vec![rat(0, 1), rat(1, n)], vec![rat(1, n), rat(0, 1)]],
        )
        .map_err(|e| e.to_string())?;
        let m: IntMatrix = vec![
            vec![BigInt::one(), BigInt::zero()],
            vec![BigInt::zero(), BigInt::from(-1)],
        ];
        ensure(oracle_anti(&q, &m), || format!("witness fails for U({n})"))?;
        AntiAutomorphism::new(&q, m).map_err(|e| format!("U({n}): {e}"))?;
        ensure(discriminant_form(&l).order() == &bn * &bn, || format!("|A| wrong for U({n})"))?;
    }
    Ok("n = 1..50".into())
}

fn criterion_3() -> Outcome {
    for n in 1..=50i64 {
        let x = rank_one(n);
        let y = u_plus_negative(&BigInt::from(n));
        ensure(are_mirror_partners(&x, &y, 512) == Ok(true), || format!("<{}> vs U+<-{}>", 2 * n, 2 * n))?;
    }
    let three = lat(&[&[2, 0, 0], &[0, -2, 0], &[0, 0, -2]]);
    ensure(admits_mirror_partner(&three) == Ok(false), || "<2>+<-2>+<-2> admits a mirror".into())?;
    let four = lat(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, -2, 0], &[0, 0, 0, -2]]);
    ensure(admits_mirror_partner(&four) == Ok(false), || "rank-4 example admits a mirror".into())?;
    Ok("50 partner pairs; both negative cases rejected".into())
}

fn criterion_4() -> Outcome {
    let grams = rank_two_grams(12, 200);
    let mut with_witness = 0;
    for g in &grams {
        let l = lat(&[&g[0], &g[1]]);
        let q = discriminant_form(&l);
        let fast = has_anti_automorphism(&q).map_err(|e| format!("{g:?}: {e}"))?;
        let brute = brute_force_anti_automorphism(&q, 512).map_err(|e| format!("{g:?}: {e}"))?;
        ensure(fast == brute.is_some(), || format!("disagreement on {g:?}: criterion {fast}"))?;
        if let Some(b) = &brute {
            ensure(oracle_anti(&q, b.matrix()), || format!("brute witness invalid on {g:?}"))?;
        }
        if fast {
            let f = construct_anti_automorphism(&q).map_err(|e| format!("{g:?}: {e}"))?;
            ensure(oracle_anti(&q, f.matrix()), || format!("constructed witness invalid on {g:?}"))?;
            with_witness += 1;
        }
    }
    Ok(format!("{} lattices, {with_witness} witnesses verified, 0 disagreements", grams.len()))
}

fn criterion_5() -> Outcome {
    for n in 1..=200i64 {
        for g in [[[2, 1], [1, -2 * n]], [[2, 0], [0, -2 * n]]] {
            let l = lat(&[&g[0], &g[1]]);
            let verdict = is_self_mirror(&l).map_err(|e| e.to_string())?;
            let rule = determinant_criterion(&l.determinant());
            ensure(verdict == rule, || format!("{g:?}: Sylow criterion {verdict}, determinant rule {rule}"))?;
            let obstructed = obstruction(&discriminant_form(&l)).map_err(|e| e.to_string())?.is_some();
            ensure(obstructed != verdict, || format!("{g:?}: obstruction inconsistent"))?;
        }
    }
    Ok("400 lattices, 0 disagreements".into())
}

fn random_hyperbolic(rng: &mut ChaCha8Rng) -> GramLattice {
    loop {
        let r = rng.gen_range(1..=3usize);
        let mut g = vec![vec![0i64; r]; r];
        for i in 0..r {
            g[i][i] = 2 * rng.gen_range(-4..=4);
            for j in 0..i {
                let x = rng.gen_range(-5..=5);
                g[i][j] = x;
                g[j][i] = x;
            }
        }
        let rows: Vec<&[i64]> = g.iter().map(|r| r.as_slice()).collect();
        if let Ok(l) = GramLattice::from_i64(&rows) {
            if l.is_hyperbolic() {
                return l;
            }
        }
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    rat(rng.gen_range(-30..=30), rng.gen_range(1..=12))
}

fn pair(l: &GramLattice, x: &[BigRational], y: &[BigRational]) -> BigRational {
    l.pair_rational(x, y)
}

fn random_class(l: &GramLattice, rng: &mut ChaCha8Rng) -> ComplexifiedKahlerClass {
    let n = l.rank();
    loop {
        let b: Vec<BigRational> = (0..n).map(|_| random_rational(rng)).collect();
        let kappa: Vec<BigRational> = (0..n).map(|_| random_rational(rng)).collect();
        if !pair(l, &kappa, &kappa).is_positive() {
            continue;
        }
        let reference = abmirror_core::mukai::default_reference(l).unwrap();
        let kappa = if pair(l, &kappa, &reference).is_positive() {
            kappa
        } else {
            kappa.into_iter().map(|x| -x).collect()
        };
        return ComplexifiedKahlerClass::new(l, b, kappa, Some(reference)).unwrap();
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut classes = 0;
    for _ in 0..10 {
        let l = random_hyperbolic(&mut rng);
        let n = l.rank();
        let m = dual_isometry(&l);
        let big = numerical_lattice(&l);
        ensure(bareiss_det(&m) == BigInt::from(-1), || "det of dual isometry is not -1".into())?;
        ensure(mat_mul(&m, &m) == identity(n + 2), || "dual isometry is not an involution".into())?;
        ensure(
            mat_mul(&mat_mul(&transpose(&m), big.gram()), &m) == *big.gram(),
            || "dual isometry does not preserve the Mukai pairing".into(),
        )?;
        ensure(
            (0..n).all(|i| (0..n + 2).all(|j| m[i][j] == BigInt::from((i == j) as i64))),
            || "dual isometry moves NS".into(),
        )?;
        for _ in 0..100 {
            let w = random_class(&l, &mut rng);
            let d = symplectic_dual(&l, &w).map_err(|e| e.to_string())?;
            let dd = symplectic_dual(&l, &d).map_err(|e| e.to_string())?;
            ensure(dd == w, || format!("dual of dual differs on {:?}", l.gram()))?;
            let prod = kahler_volume(&l, &w) * kahler_volume(&l, &d);
            ensure(prod == Complex::new(BigRational::one(), BigRational::zero()), || {
                format!("volume product {prod}")
            })?;
            ensure(pair(&l, &d.kappa, &d.kappa).is_positive(), || "dual kappa not positive".into())?;
            ensure(pair(&l, &d.kappa, &w.reference).is_positive(), || "dual left the cone component".into())?;
            let image = apply_isometry(&m, &exp_class(&l, &w));
            let expected = exp_class(&l, &d).scale(&kahler_volume(&l, &w));
            ensure(image == expected, || "exp class not mapped projectively".into())?;
            classes += 1;
        }
    }
    Ok(format!("{classes} classes on 10 lattices"))
}

fn random_entry(rng: &mut ChaCha8Rng) -> Complex<BigRational> {
    Complex::new(random_rational(rng), random_rational(rng))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..1000 {
        let rows: [[Complex<BigRational>; 4]; 2] =
            std::array::from_fn(|_| std::array::from_fn(|_| random_entry(&mut rng)));
        let v = plucker_period(&PeriodMatrix::new(rows));
        ensure(wedge_pairing(&v, &v).is_zero(), || format!("Plucker relation fails on sample {k}"))?;
    }
    let c = |re: i64, im: i64| Complex::new(rat(re, 1), rat(im, 1));
    let first = PeriodMatrix::new([
        [c(1, 0), c(0, 1), c(0, 0), c(0, 0)],
        [c(0, 0), c(0, 0), c(1, 0), c(0, 1)],
    ]);
    let v = plucker_period(&first);
    let h = wedge_pairing(&v, &v.conj());
    ensure(h == c(4, 0), || format!("first fixture gives {h}"))?;
    ensure(is_admissible(&first), || "first fixture not admissible".into())?;
    let second = PeriodMatrix::new([
        [c(1, 0), c(0, 0), c(0, 1), c(0, 0)],
        [c(0, 0), c(1, 0), c(0, 0), c(0, 1)],
    ]);
    let v = plucker_period(&second);
    let h = wedge_pairing(&v, &v.conj());
    ensure(h == c(-4, 0), || format!("second fixture gives {h}"))?;
    ensure(is_torus(&second) && !is_admissible(&second), || "second fixture misclassified".into())?;
    Ok("1000 random matrices; fixtures give 4 and -4".into())
}

fn criterion_8() -> Outcome {
    let mut lattices: Vec<GramLattice> = (1..=30).map(rank_one).collect();
    lattices.extend(
        rank_two_grams(12, 60)
            .into_iter()
            .map(|g| lat(&[&g[0], &g[1]]))
            .filter(|l| l.is_hyperbolic()),
    );
    for l in &lattices {
        ensure(satisfies_condition_diamond(l) == Ok(true), || format!("condition fails on {:?}", l.gram()))?;
        let w = primitive_embedding_into_2u(l, 8, 512).map_err(|e| format!("{:?}: {e}", l.gram()))?;
        let ok = are_anti_isometric(&discriminant_form(l), &discriminant_form(&w.complement_gram), 512)
            .map_err(|e| e.to_string())?;
        ensure(ok, || format!("complement of {:?} not anti-isometric", l.gram()))?;
    }
    Ok(format!("{} lattices embedded", lattices.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("worked examples", criterion_1, 1),
        ("U(n) self-mirror witnesses", criterion_2, 5),
        ("mirror partner table", criterion_3, 10),
        ("anti-automorphism criterion vs brute force", criterion_4, 300),
        ("determinant rule for principal polarizations", criterion_5, 30),
        ("symplectic dual laws", criterion_6, 10),
        ("period vectors", criterion_7, 5),
        ("embeddings into U+U", criterion_8, 120),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget}s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {} ({name}): {detail} [{:.2}s]", i + 1, elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
