//! Structured analysis of a Neron-Severi lattice.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::disc::{
    classify_local, construct_anti_automorphism, discriminant_form, obstruction, AntiAutomorphism,
    FiniteQuadraticForm, LocalBlock,
};
use crate::error::{Error, Result};
use crate::lattice::GramLattice;
use crate::mirror::{
    admits_mirror_partner, is_simple, mirror_ns_representative, satisfies_condition_diamond, Tri,
};
use crate::serde_ext;
use crate::snf::IntMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub bound: u64,
    pub cap: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { bound: crate::mirror::DEFAULT_BOUND, cap: crate::disc::DEFAULT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MirrorReport {
    #[serde(with = "serde_ext::int_matrix")]
    pub input_gram: IntMatrix,
    pub signature: (usize, usize),
    #[serde(with = "serde_ext::dec_string")]
    pub determinant: BigInt,
    #[serde(with = "serde_ext::dec_string_vec")]
    pub disc_orders: Vec<BigInt>,
    pub local_blocks: Vec<LocalBlock>,
    pub simple: Tri,
    pub condition_diamond: bool,
    pub admits_mirror: bool,
    pub self_mirror: Option<bool>,
    #[serde(default, with = "opt_matrix")]
    pub mirror_representative_gram: Option<IntMatrix>,
    pub notes: Vec<String>,
}

mod opt_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "serde_ext::int_matrix")] IntMatrix);

    pub fn serialize<S: Serializer>(m: &Option<IntMatrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
        m.clone().map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<IntMatrix>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// `Z/a + Z/b`, or `trivial`.
pub fn describe_group(q: &FiniteQuadraticForm) -> String {
    if q.is_trivial() {
        return "trivial".into();
    }
    q.orders().iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" + ")
}

/// Local normal forms of every Sylow part.
pub fn local_blocks(q: &FiniteQuadraticForm) -> Result<Vec<LocalBlock>> {
    q.sylow_decompose().values().map(classify_local).collect()
}

/// Self-mirror verdict with its evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfMirrorVerdict {
    pub self_mirror: bool,
    pub reason: String,
    pub disc_form: FiniteQuadraticForm,
    pub witness: Option<AntiAutomorphism>,
}

pub fn self_mirror_verdict(ns: &GramLattice) -> Result<SelfMirrorVerdict> {
    crate::mirror::is_self_mirror(ns)?;
    let q = discriminant_form(ns);
    if let Some(block) = obstruction(&q)? {
        return Ok(SelfMirrorVerdict {
            self_mirror: false,
            reason: format!("Sylow criterion: {block} admits no anti-automorphism"),
            disc_form: q,
            witness: None,
        });
    }
    let f = construct_anti_automorphism(&q)?;
    Ok(SelfMirrorVerdict {
        self_mirror: true,
        reason: "Sylow criterion: every local block admits an anti-automorphism; \
                 constructed witness verified"
            .into(),
        disc_form: q,
        witness: Some(f),
    })
}

/// Runs every applicable decision procedure on a hyperbolic even lattice.
pub fn analyze(ns: &GramLattice, opts: SearchOptions) -> Result<MirrorReport> {
    ns.require_hyperbolic()?;
    let rank = ns.rank();
    let q = discriminant_form(ns);
    let mut notes = vec![format!("discriminant group {}", describe_group(&q))];
    let blocks = match local_blocks(&q) {
        Ok(b) => b,
        Err(Error::Unclassifiable { .. }) => {
            notes.push("Sylow parts with more than two generators are not classified".into());
            vec![]
        }
        Err(e) => return Err(e),
    };
    let simple = is_simple(ns, opts.bound);
    if simple == Tri::Unknown {
        notes.push(format!("no isotropic vector within bound {}; simplicity undecided", opts.bound));
    }
    let condition_diamond = satisfies_condition_diamond(ns)?;
    let admits_mirror = rank <= 4 && admits_mirror_partner(ns)?;
    let self_mirror = match rank {
        2 => {
            let v = self_mirror_verdict(ns)?;
            notes.push(v.reason.clone());
            Some(v.self_mirror)
        }
        1 | 3 => {
            notes.push("self-mirror requires Picard number 2".into());
            Some(false)
        }
        _ => None,
    };
    let mut mirror_representative_gram = None;
    if admits_mirror {
        notes.push(format!("mirror family has moduli dimension {}", 4 - rank));
        match mirror_ns_representative(ns, opts.bound, opts.cap) {
            Ok(Some(rep)) => {
                if rank == 2 {
                    notes.push(format!(
                        "mirror representative from a primitive embedding into U+U (bound {}); \
                         unique only up to stable equivalence",
                        opts.bound
                    ));
                }
                mirror_representative_gram = Some(rep.gram().clone());
            }
            Ok(None) => {}
            Err(Error::SearchExhausted { bound }) => {
                notes.push(format!("no primitive embedding into U+U found within bound {bound}"))
            }
            Err(Error::CapExceeded { order, cap }) => notes.push(format!(
                "representative not verified: group order {order} exceeds cap {cap}"
            )),
            Err(e) => return Err(e),
        }
    } else if rank > 4 {
        notes.push("Picard number above 4: no mirror partner".into());
    }
    Ok(MirrorReport {
        input_gram: ns.gram().clone(),
        signature: ns.signature(),
        determinant: ns.determinant(),
        disc_orders: q.orders().to_vec(),
        local_blocks: blocks,
        simple,
        condition_diamond,
        admits_mirror,
        self_mirror,
        mirror_representative_gram,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let r = analyze(&GramLattice::from_i64(&[&[0, 3], &[3, 2]]).unwrap(), SearchOptions::default()).unwrap();
        assert_eq!(r.disc_orders, vec![BigInt::from(9)]);
        assert_eq!(r.simple, Tri::No);
        assert_eq!(r.self_mirror, Some(false));
        assert!(r.notes.iter().any(|n| n.contains("cyclic 3-group")));

        let r = analyze(&GramLattice::from_i64(&[&[2, 3], &[3, 2]]).unwrap(), SearchOptions::default()).unwrap();
        assert_eq!(r.disc_orders, vec![BigInt::from(5)]);
        assert_eq!(r.simple, Tri::Yes);
        assert_eq!(r.self_mirror, Some(true));
        assert!(r.mirror_representative_gram.is_some());
    }

    #[test]
    fn report_round_trips() {
        let r = analyze(&GramLattice::from_i64(&[&[4]]).unwrap(), SearchOptions::default()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: MirrorReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(s.contains("\"mirror_representative_gram\":[[0,1,0],[1,0,0],[0,0,-4]]"));
    }
}
