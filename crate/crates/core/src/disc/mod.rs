//! Discriminant forms: finite quadratic forms on finite abelian groups.

mod anti;
mod classify;
mod form;
mod search;

pub use anti::{
    block_anti_automorphism, construct_anti_automorphism, has_anti_automorphism, is_isometry,
    obstruction, AntiAutomorphism,
};
pub use classify::{classify_local, classify_local_with_basis, LocalBlock};
pub use form::{discriminant_form, FiniteQuadraticForm, QMod2Z};
pub use search::{
    are_anti_isometric, are_isometric, brute_force_anti_automorphism, find_isometry, DEFAULT_CAP,
};
