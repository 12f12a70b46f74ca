//! Exact lattice algorithms for mirror symmetry of lattice-polarized abelian
//! surfaces.

pub mod arith;
pub mod disc;
pub mod error;
pub mod lattice;
pub mod mirror;
pub mod mukai;
pub mod periods;
pub mod report;
pub mod serde_ext;
pub mod snf;

pub use disc::{
    are_anti_isometric, are_isometric, brute_force_anti_automorphism, classify_local,
    construct_anti_automorphism, discriminant_form, has_anti_automorphism, AntiAutomorphism,
    FiniteQuadraticForm, LocalBlock, QMod2Z,
};
pub use error::{Error, Result};
pub use lattice::{GramLattice, Isotropy, LatticeVector, StandardKind};
pub use mirror::{EmbeddingWitness, Tri};
pub use mukai::{ComplexRational, ComplexifiedKahlerClass, MukaiVector};
pub use periods::{NumericMode, PeriodMatrix, PeriodVector};
pub use report::{analyze, MirrorReport, SearchOptions};
pub use snf::{smith_normal_form, IntMatrix, SmithDecomposition};
