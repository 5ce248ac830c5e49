//! Overlap resolution: the confluence test for skew systems.
//!
//! Every pair of rules whose left-hand words overlap does so on a word
//! `x_k x_j x_i` with `k > j > i`: the `(j,i)` rule rewrites the right half
//! while the `(k,j)` rule rewrites the left half.  The system is confluent —
//! equivalently, the standard words descend to a basis of the quotient
//! algebra — exactly when both rewrite routes reduce to the same standard
//! form:
//!
//! ```text
//! stred(x_k * f_ji)  ==  stred(f_kj * x_i)    for all k > j > i
//! ```
//!
//! [`check_pbw`] evaluates that test on every overlap and retains the full
//! evidence; [`QuotientAlgebra`] then exposes multiplication on the standard
//! basis of a verified system.  Because all left-hand words have length two
//! and are pairwise distinct, no other ambiguity shape exists: resolving
//! these overlaps decides confluence outright.

use crate::freealg::{FreeAlgError, NCPoly, Word};
use crate::reduce::{ReduceError, SkewSystem};
use thiserror::Error;

/// Errors from the overlap checker and quotient operations.
#[derive(Debug, Error)]
pub enum DiamondError {
    /// A quotient-algebra operation was requested on an unverified system.
    #[error("system is not confluent: overlap ({k},{j},{i}) fails to resolve")]
    NotPbw { k: u8, j: u8, i: u8 },
    /// Quotient multiplication requires operands already in standard form.
    #[error("quotient operands must be standard polynomials")]
    NonStandardOperand,
    /// Reduction failed underneath.
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    /// Polynomial arithmetic failed underneath.
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
}

/// One overlap ambiguity: the word `x_k x_j x_i` with `k > j > i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overlap {
    /// Largest index.
    pub k: u8,
    /// Middle index.
    pub j: u8,
    /// Smallest index.
    pub i: u8,
}

impl Overlap {
    /// The ambiguous word `x_k x_j x_i`.
    pub fn word(&self) -> Word {
        Word::from_indices([self.k, self.j, self.i])
    }
}

/// The two standard reductions of one overlap and their difference.
#[derive(Debug, Clone)]
pub struct OverlapWitness {
    /// Which overlap this resolves.
    pub overlap: Overlap,
    /// `stred(x_k * f_ji)`: rewrite the right pair first, then straighten.
    pub left: NCPoly,
    /// `stred(f_kj * x_i)`: rewrite the left pair first, then straighten.
    pub right: NCPoly,
    /// `left - right`; zero exactly when the overlap resolves.
    pub difference: NCPoly,
}

impl OverlapWitness {
    /// Whether both routes agree.
    pub fn resolves(&self) -> bool {
        self.difference.is_zero()
    }
}

/// The outcome of the confluence test, with evidence for every overlap.
#[derive(Debug, Clone)]
pub struct PbwVerdict {
    /// True when every overlap resolves; the standard words then form a
    /// basis of the quotient algebra.
    pub is_pbw: bool,
    /// One witness per overlap, in enumeration order.
    pub witnesses: Vec<OverlapWitness>,
    /// The first overlap (in enumeration order) whose routes disagree.
    pub first_failure: Option<Overlap>,
}

/// All overlaps of a system over `n` generators: the C(n,3) triples
/// `k > j > i`, enumerated in lexicographic `(i, j, k)` order.
pub fn enumerate_overlaps(system: &SkewSystem) -> Vec<Overlap> {
    let n = system.n();
    let mut out = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            for k in (j + 1)..=n {
                out.push(Overlap { k, j, i });
            }
        }
    }
    out
}

/// Decides whether the standard words form a basis of the quotient: reduces
/// every overlap word along both routes and compares the standard forms.
/// Witnesses are retained for all overlaps, not only the first failure.
pub fn check_pbw(system: &SkewSystem) -> Result<PbwVerdict, DiamondError> {
    let mut witnesses = Vec::new();
    let mut first_failure = None;
    for overlap in enumerate_overlaps(system) {
        let Overlap { k, j, i } = overlap;
        let rule_ji = system
            .rule(j, i)
            .expect("validated systems carry every descending pair");
        let rule_kj = system
            .rule(k, j)
            .expect("validated systems carry every descending pair");
        let xk = NCPoly::monomial(system.n(), Word::gen(k), crate::coeff::Scalar::one())?;
        let xi = NCPoly::monomial(system.n(), Word::gen(i), crate::coeff::Scalar::one())?;
        let via_right = xk.mul(&rule_ji.rhs()?)?;
        let via_left = rule_kj.rhs()?.mul(&xi)?;
        let (left, _) = system.stred(&via_right)?;
        let (right, _) = system.stred(&via_left)?;
        let difference = left.sub(&right)?;
        if !difference.is_zero() && first_failure.is_none() {
            first_failure = Some(overlap);
        }
        witnesses.push(OverlapWitness { overlap, left, right, difference });
    }
    Ok(PbwVerdict { is_pbw: first_failure.is_none(), witnesses, first_failure })
}

/// A verified quotient algebra: the standard words are a basis, and
/// multiplication is `stred` of the free product.
#[derive(Debug, Clone)]
pub struct QuotientAlgebra {
    system: SkewSystem,
    verdict: PbwVerdict,
}

impl QuotientAlgebra {
    /// Verifies the system and wraps it; refuses non-confluent systems.
    pub fn new(system: SkewSystem) -> Result<QuotientAlgebra, DiamondError> {
        let verdict = check_pbw(&system)?;
        if let Some(Overlap { k, j, i }) = verdict.first_failure {
            return Err(DiamondError::NotPbw { k, j, i });
        }
        Ok(QuotientAlgebra { system, verdict })
    }

    /// The underlying reduction system.
    pub fn system(&self) -> &SkewSystem {
        &self.system
    }

    /// The confluence evidence computed at construction.
    pub fn verdict(&self) -> &PbwVerdict {
        &self.verdict
    }

    /// The algebra product on the standard basis: multiply freely, then
    /// reduce to standard form.  Operands must already be standard.
    pub fn multiply(&self, f: &NCPoly, g: &NCPoly) -> Result<NCPoly, DiamondError> {
        if !f.all_standard() || !g.all_standard() {
            return Err(DiamondError::NonStandardOperand);
        }
        let product = f.mul(g)?;
        let (reduced, _) = self.system.stred(&product)?;
        Ok(reduced)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Scalar;
    use crate::reduce::ExhaustiveConfig;
    use crate::testutil::{
        commutative_system, dispin_system, ex3_numeric, ex3_symbolic, quantum3_system,
        woronowicz_symbolic,
    };
    use proptest::prelude::*;

    fn w(ix: &[u8]) -> Word {
        Word::from_indices(ix.to_vec())
    }

    #[test]
    fn overlap_enumeration_counts_and_orders_triples() {
        assert!(enumerate_overlaps(&commutative_system(2)).is_empty());
        assert_eq!(
            enumerate_overlaps(&commutative_system(3)),
            vec![Overlap { k: 3, j: 2, i: 1 }]
        );
        let four = enumerate_overlaps(&commutative_system(4));
        assert_eq!(
            four,
            vec![
                Overlap { k: 3, j: 2, i: 1 },
                Overlap { k: 4, j: 2, i: 1 },
                Overlap { k: 4, j: 3, i: 1 },
                Overlap { k: 4, j: 3, i: 2 },
            ]
        );
        assert_eq!(four[0].word(), w(&[3, 2, 1]));
    }

    #[test]
    fn two_generator_systems_are_vacuously_confluent() {
        let sys = commutative_system(2);
        let verdict = check_pbw(&sys).unwrap();
        assert!(verdict.is_pbw);
        assert!(verdict.witnesses.is_empty());
        assert!(verdict.first_failure.is_none());
    }

    #[test]
    fn dispin_overlap_resolves_to_the_known_standard_form() {
        let verdict = check_pbw(&dispin_system()).unwrap();
        assert!(verdict.is_pbw);
        assert_eq!(verdict.witnesses.len(), 1);
        let witness = &verdict.witnesses[0];
        assert_eq!(witness.left.to_string(), "-x1*x2*x3 + x2^2 + 2*x1*x3 - x2");
        assert_eq!(witness.right, witness.left);
        assert!(witness.resolves());
    }

    #[test]
    fn symbolic_unit_system_resolves_with_the_closed_form_value() {
        let (_, sys) = woronowicz_symbolic();
        let verdict = check_pbw(&sys).unwrap();
        assert!(verdict.is_pbw);
        let witness = &verdict.witnesses[0];
        assert_eq!(witness.left.to_string(), "nu^-2*x1*x2*x3 - nu^-1*x3^2");
        assert!(witness.resolves());
    }

    #[test]
    fn conflicting_system_reports_the_exact_difference() {
        let (_, sys) = ex3_symbolic();
        let verdict = check_pbw(&sys).unwrap();
        assert!(!verdict.is_pbw);
        assert_eq!(verdict.first_failure, Some(Overlap { k: 3, j: 2, i: 1 }));
        let witness = &verdict.witnesses[0];
        assert_eq!(witness.difference.to_string(), "(alpha - 1)*x2*x3 + x3");
    }

    #[test]
    fn failed_overlap_word_has_two_exhaustive_normal_forms() {
        let sys = ex3_numeric(2, 3);
        let verdict = check_pbw(&sys).unwrap();
        assert!(!verdict.is_pbw);
        let word = verdict.first_failure.unwrap().word();
        let f = NCPoly::monomial(3, word, Scalar::one()).unwrap();
        let nfs = sys.normal_forms_exhaustive(&f, &ExhaustiveConfig::default()).unwrap();
        assert_eq!(nfs.len(), 2, "non-confluence shows up as multiple normal forms");
    }

    #[test]
    fn quotient_multiplication_reduces_products() {
        let q = QuotientAlgebra::new(dispin_system()).unwrap();
        let x2 = NCPoly::monomial(3, w(&[2]), Scalar::one()).unwrap();
        let x1 = NCPoly::monomial(3, w(&[1]), Scalar::one()).unwrap();
        let prod = q.multiply(&x2, &x1).unwrap();
        assert_eq!(prod.to_string(), "x1*x2 - x1");

        let one = NCPoly::constant(3, Scalar::one());
        let f = NCPoly::from_terms(
            3,
            vec![(w(&[1, 3]), Scalar::from_int(2)), (w(&[2]), Scalar::from_int(-1))],
        )
        .unwrap();
        assert_eq!(q.multiply(&one, &f).unwrap(), f);
        assert_eq!(q.multiply(&f, &one).unwrap(), f);
    }

    #[test]
    fn quotient_multiplication_is_associative_on_the_generators() {
        let q = QuotientAlgebra::new(dispin_system()).unwrap();
        let x1 = NCPoly::monomial(3, w(&[1]), Scalar::one()).unwrap();
        let x2 = NCPoly::monomial(3, w(&[2]), Scalar::one()).unwrap();
        let x3 = NCPoly::monomial(3, w(&[3]), Scalar::one()).unwrap();
        let left = q.multiply(&q.multiply(&x3, &x2).unwrap(), &x1).unwrap();
        let right = q.multiply(&x3, &q.multiply(&x2, &x1).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn quotient_construction_refuses_conflicting_systems() {
        let err = QuotientAlgebra::new(ex3_numeric(2, 3)).unwrap_err();
        assert!(matches!(err, DiamondError::NotPbw { k: 3, j: 2, i: 1 }));
    }

    #[test]
    fn quotient_multiplication_refuses_non_standard_operands() {
        let q = QuotientAlgebra::new(dispin_system()).unwrap();
        let bad = NCPoly::monomial(3, w(&[2, 1]), Scalar::one()).unwrap();
        let one = NCPoly::constant(3, Scalar::one());
        assert!(matches!(
            q.multiply(&bad, &one),
            Err(DiamondError::NonStandardOperand)
        ));
    }

    #[test]
    fn zero_tail_scaling_system_is_confluent() {
        let verdict = check_pbw(&quantum3_system()).unwrap();
        assert!(verdict.is_pbw);
    }

    prop_compose! {
        fn arb_standard_poly() (terms in proptest::collection::vec(
            (proptest::collection::vec(1u8..=3, 0..=3), -3i64..=3),
            0..=4,
        )) -> NCPoly {
            NCPoly::from_terms(
                3,
                terms.into_iter().map(|(mut ix, c)| {
                    ix.sort_unstable();
                    (Word::from_indices(ix), Scalar::from_int(c))
                }),
            )
            .expect("indices within range")
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn verified_systems_have_unique_normal_forms(word in proptest::collection::vec(1u8..=3, 0..=4)) {
            let sys = dispin_system();
            let f = NCPoly::monomial(3, Word::from_indices(word), Scalar::one()).unwrap();
            let nfs = sys.normal_forms_exhaustive(&f, &ExhaustiveConfig::default()).unwrap();
            prop_assert_eq!(nfs.len(), 1);
            let (streded, _) = sys.stred(&f).unwrap();
            prop_assert_eq!(&nfs[0], &streded, "the canonical strategy lands on the unique form");
        }

        #[test]
        fn quotient_product_is_associative_on_random_standard_triples(
            a in arb_standard_poly(), b in arb_standard_poly(), c in arb_standard_poly()
        ) {
            let q = QuotientAlgebra::new(dispin_system()).unwrap();
            let left = q.multiply(&q.multiply(&a, &b).unwrap(), &c).unwrap();
            let right = q.multiply(&a, &q.multiply(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
