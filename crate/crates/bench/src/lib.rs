//! Fixed inputs shared by the benchmarks.

use abmirror_core::{FiniteQuadraticForm, GramLattice, discriminant_form};

/// Dense integer matrix with entries in `[-9, 9]`, from a fixed LCG.
pub fn dense_matrix(n: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut state = seed;
    (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 33) % 19) as i64 - 9
                })
                .collect()
        })
        .collect()
}

pub fn lattice(rows: &[&[i64]]) -> GramLattice {
    GramLattice::from_i64(rows).expect("fixture is a valid even lattice")
}

/// `(name, lattice)` pairs with discriminant groups of varied shape.
pub fn rank_two_fixtures() -> Vec<(&'static str, GramLattice)> {
    vec![
        ("cyclic-5", lattice(&[&[2, 3], &[3, 2]])),
        ("cyclic-9", lattice(&[&[0, 3], &[3, 2]])),
        ("u-12", lattice(&[&[0, 12], &[12, 0]])),
        ("split-2x50", lattice(&[&[2, 0], &[0, -100]])),
        ("cyclic-197", lattice(&[&[2, 1], &[1, -98]])),
    ]
}

pub fn discriminant_fixtures() -> Vec<(&'static str, FiniteQuadraticForm)> {
    rank_two_fixtures().into_iter().map(|(n, l)| (n, discriminant_form(&l))).collect()
}
