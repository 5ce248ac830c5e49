//! Exact-arithmetic engine that decides whether an algebra presented by
//! generators and relations is a three-dimensional skew polynomial algebra.
//!
//! The pipeline, bottom to top:
//!
//! * [`coeff`] — exact scalars: arbitrary-precision rationals, plus Laurent
//!   polynomials in declared parameters (negative powers only for parameters
//!   declared invertible).
//! * [`freealg`] — words and noncommutative polynomials over the free
//!   associative algebra, ordered by degree-lexicographic comparison.
//! * [`reduce`] — skew reduction systems (one rewrite rule per descending
//!   generator pair), single-step and full reduction to standard form, an
//!   exhaustive all-paths oracle, and replayable reduction traces.
//! * [`diamond`] — overlap enumeration and the confluence check: the system
//!   admits a PBW basis of standard words iff every overlap word reduces to
//!   the same standard form along both routes.
//! * [`skewcheck`] — the three-generator specialization: coefficient
//!   extraction, the ten closed-form conditions equivalent to the PBW
//!   property, their symbolic re-derivation, and classification of verified
//!   algebras into the standard case families.
//! * [`presentio`] — the text format for presentations, parameter
//!   substitution, and expression parsing.
//!
//! All arithmetic is exact; no floating point appears anywhere.

pub mod coeff;
pub mod diamond;
pub mod freealg;
pub mod presentio;
pub mod reduce;
pub mod skewcheck;

#[cfg(test)]
pub(crate) mod testutil;

pub use coeff::{CoeffError, ParamContext, ParamDecl, Rat, Scalar};
pub use diamond::{
    check_pbw, enumerate_overlaps, DiamondError, Overlap, OverlapWitness, PbwVerdict,
    QuotientAlgebra,
};
pub use freealg::{count_standard_words, word_cmp_deglex, NCPoly, Word};
pub use presentio::{parse_rational, ParseError, PresError, Presentation};
pub use reduce::{apply_reduction, ExhaustiveConfig, ReduceError, ReductionTrace, Rule, SkewSystem, SystemError, TraceStep};
pub use skewcheck::{
    check_conditions, classify, derive_conditions, extract_coefficients, generic_context,
    CaseFamily, Classification, ConditionIdentity, ConditionOutcome, ConditionReport,
    DerivedConditions, SkewCoefficients, SkewError,
};
