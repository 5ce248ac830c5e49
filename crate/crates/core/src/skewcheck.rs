//! The three-generator specialization: coefficient extraction, the ten
//! closed-form confluence conditions, their symbolic re-derivation, and
//! case classification.
//!
//! A three-generator skew system whose tails are affine (degree at most one)
//! is determined by fifteen scalars: the three leading coefficients, written
//! α⁻¹, β, γ⁻¹ by convention, and twelve tail coefficients r. The single
//! overlap `x3*x2*x1` resolves exactly when ten polynomial identities in
//! those scalars hold. This module stores the identities as data
//! ([`check_conditions`]), re-derives them from the overlap calculus over a
//! fully symbolic system ([`derive_conditions`]), and sorts confluent systems
//! into the five case families determined by the unit pattern ([`classify`]).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::coeff::{CoeffError, ParamContext, ParamDecl, Scalar};
use crate::diamond::{check_pbw, DiamondError};
use crate::freealg::{FreeAlgError, NCPoly, Word};
use crate::reduce::{ReduceError, Rule, SkewSystem, SystemError};
use thiserror::Error;

/// Errors from extraction, condition evaluation, and classification.
#[derive(Debug, Error)]
pub enum SkewError {
    /// The coefficient test covers exactly three generators.
    #[error("expected exactly 3 generators, found {n}")]
    NotThreeGenerators {
        /// Actual generator count.
        n: u8,
    },
    /// A rule tail contains a term of degree two or more.
    #[error("rule for pair ({j},{i}) has tail term {word} of degree > 1; only affine tails are covered")]
    QuadraticTail {
        /// Larger generator index of the offending rule.
        j: u8,
        /// Smaller generator index of the offending rule.
        i: u8,
        /// Rendered offending word.
        word: String,
    },
    /// Classification requires a confluent system.
    #[error("system is not confluent: overlap x{k}*x{j}*x{i} does not resolve")]
    NotPbw {
        /// Largest index of the failing overlap.
        k: u8,
        /// Middle index.
        j: u8,
        /// Smallest index.
        i: u8,
    },
    /// A branch predicate on symbolic parameters cannot be decided.
    #[error("classification is indeterminate; undecided: {}", predicates.join(", "))]
    IndeterminateClassification {
        /// The branch predicates that could not be decided.
        predicates: Vec<String>,
    },
    /// The concrete unit pattern matches no case header.
    #[error(
        "unit pattern alpha={alpha}, beta={beta}, gamma={gamma} matches no \
         case; a change of variables may be needed first"
    )]
    NoCaseMatched {
        /// Rendered α.
        alpha: String,
        /// Rendered β.
        beta: String,
        /// Rendered γ.
        gamma: String,
    },
    /// Error from the overlap check.
    #[error(transparent)]
    Diamond(#[from] DiamondError),
    /// Error from reduction.
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    /// Error from system construction.
    #[error(transparent)]
    System(#[from] SystemError),
    /// Error from free-algebra arithmetic.
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    /// Error from coefficient arithmetic.
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// The two-index pairs `(i, j)` with `i < j`, in the order the tail
/// coefficients are stored: `(2,3)`, `(1,3)`, `(1,2)`.
const PAIRS: [(u8, u8); 3] = [(2, 3), (1, 3), (1, 2)];

/// The fifteen scalars of a three-generator affine skew system.
///
/// Leading coefficients follow the asymmetric convention: the rule for
/// `x3*x2` leads with α⁻¹, the rule for `x3*x1` with β, and the rule for
/// `x2*x1` with γ⁻¹. Tail coefficients `r(t, i, j)` give the coefficient of
/// `x_t` (with `x_0 = 1`) in the tail of the rule for the pair `(i, j)`;
/// zeros are stored explicitly, so exactly twelve are always present.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewCoefficients {
    alpha_inv: Scalar,
    beta: Scalar,
    gamma_inv: Scalar,
    /// `r[p][t]` for `p` indexing [`PAIRS`] and `t` in `0..4`.
    r: [[Scalar; 4]; 3],
}

impl SkewCoefficients {
    /// Builds the coefficient record directly.
    ///
    /// `r[p][t]` is the coefficient of `x_t` (`x_0 = 1`) in the tail of the
    /// rule for pair `PAIRS[p]`, i.e. `p = 0` for `(2,3)`, `1` for `(1,3)`,
    /// `2` for `(1,2)`.
    pub fn new(
        alpha_inv: Scalar,
        beta: Scalar,
        gamma_inv: Scalar,
        r: [[Scalar; 4]; 3],
    ) -> SkewCoefficients {
        SkewCoefficients { alpha_inv, beta, gamma_inv, r }
    }

    /// Leading coefficient of the `x3*x2` rule.
    pub fn alpha_inv(&self) -> &Scalar {
        &self.alpha_inv
    }

    /// Leading coefficient of the `x3*x1` rule.
    pub fn beta(&self) -> &Scalar {
        &self.beta
    }

    /// Leading coefficient of the `x2*x1` rule.
    pub fn gamma_inv(&self) -> &Scalar {
        &self.gamma_inv
    }

    /// The unit α, inverted from the stored α⁻¹.
    pub fn alpha(&self) -> Result<Scalar, SkewError> {
        Ok(self.alpha_inv.invert()?)
    }

    /// The unit γ, inverted from the stored γ⁻¹.
    pub fn gamma(&self) -> Result<Scalar, SkewError> {
        Ok(self.gamma_inv.invert()?)
    }

    /// Tail coefficient of `x_t` (with `x_0 = 1`) in the rule for the pair
    /// `(i, j)`, `i < j`.
    ///
    /// # Panics
    ///
    /// Panics when `(i, j)` is not one of `(2,3)`, `(1,3)`, `(1,2)` or
    /// `t > 3`.
    pub fn r(&self, t: usize, i: u8, j: u8) -> &Scalar {
        let p = PAIRS
            .iter()
            .position(|&q| q == (i, j))
            .expect("pair must be (2,3), (1,3), or (1,2)");
        &self.r[p][t]
    }

    /// Rebuilds the rewriting system these coefficients describe.
    pub fn to_system(&self) -> Result<SkewSystem, SkewError> {
        let leads = [&self.alpha_inv, &self.beta, &self.gamma_inv];
        let mut rules = Vec::with_capacity(3);
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            let mut terms = vec![(Word::from_indices([i, j]), leads[p].clone())];
            for (t, c) in self.r[p].iter().enumerate() {
                if !c.is_zero() {
                    terms.push((basis_word(t), c.clone()));
                }
            }
            rules.push(Rule::new(j, i, NCPoly::from_terms(3, terms)?)?);
        }
        Ok(SkewSystem::new(3, rules)?)
    }

    /// The tail of the pair-`p` rule as a polynomial.
    fn tail_poly(&self, p: usize) -> Result<NCPoly, SkewError> {
        let terms = self.r[p]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| (basis_word(t), c.clone()));
        Ok(NCPoly::from_terms(3, terms)?)
    }
}

/// The word for tail slot `t`: the empty word for `t = 0`, else `x_t`.
fn basis_word(t: usize) -> Word {
    if t == 0 {
        Word::empty()
    } else {
        Word::gen(t as u8)
    }
}

/// Reads the fifteen defining scalars off a three-generator system.
///
/// Requires every rule tail to be affine: constants and single generators
/// only. A tail term of degree two or more is rejected with the offending
/// rule and word.
pub fn extract_coefficients(system: &SkewSystem) -> Result<SkewCoefficients, SkewError> {
    if system.n() != 3 {
        return Err(SkewError::NotThreeGenerators { n: system.n() });
    }
    let mut leads = Vec::with_capacity(3);
    let mut r: Vec<[Scalar; 4]> = Vec::with_capacity(3);
    for &(i, j) in &PAIRS {
        let rule = system.rule(j, i).expect("validated systems have every pair");
        for (w, _) in rule.tail().terms() {
            if w.degree() > 1 {
                return Err(SkewError::QuadraticTail {
                    j,
                    i,
                    word: w.render(system.names()),
                });
            }
        }
        let slot = |t: usize| {
            rule.tail()
                .coeff(&basis_word(t))
                .cloned()
                .unwrap_or_else(Scalar::zero)
        };
        leads.push(rule.lead_coeff().clone());
        r.push([slot(0), slot(1), slot(2), slot(3)]);
    }
    let [s, u, v] = <[[Scalar; 4]; 3]>::try_from(r).expect("three pairs");
    let gamma_inv = leads.pop().expect("three leads");
    let beta = leads.pop().expect("three leads");
    let alpha_inv = leads.pop().expect("three leads");
    Ok(SkewCoefficients { alpha_inv, beta, gamma_inv, r: [s, u, v] })
}

// ---------------------------------------------------------------------------
// The generic symbolic system and the ten conditions
// ---------------------------------------------------------------------------

/// Parameter positions in the generic context.
const IDX_ALPHA: usize = 0;
const IDX_BETA: usize = 1;
const IDX_GAMMA: usize = 2;

/// Position of the tail parameter `r{t}_{pair}` in the generic context.
fn r_index(p: usize, t: usize) -> usize {
    3 + 4 * p + t
}

/// The fifteen-parameter context of the fully symbolic three-generator
/// system: units `alpha`, `beta`, `gamma`, then the twelve tail coefficients
/// `r0_23 .. r3_23, r0_13 .. r3_13, r0_12 .. r3_12`.
pub fn generic_context() -> Arc<ParamContext> {
    let mut params = vec![
        ParamDecl::new("alpha", true),
        ParamDecl::new("beta", true),
        ParamDecl::new("gamma", true),
    ];
    for (i, j) in PAIRS {
        for t in 0..4 {
            params.push(ParamDecl::new(format!("r{t}_{i}{j}"), false));
        }
    }
    Arc::new(ParamContext::new(params).expect("names are distinct"))
}

/// The generic coefficient record over [`generic_context`]: leading
/// coefficients `alpha^-1`, `beta`, `gamma^-1` and twelve independent tail
/// parameters.
pub fn generic_coefficients(ctx: &Arc<ParamContext>) -> Result<SkewCoefficients, SkewError> {
    let mut r: Vec<[Scalar; 4]> = Vec::with_capacity(3);
    for p in 0..3 {
        r.push([
            Scalar::param(ctx, r_index(p, 0)),
            Scalar::param(ctx, r_index(p, 1)),
            Scalar::param(ctx, r_index(p, 2)),
            Scalar::param(ctx, r_index(p, 3)),
        ]);
    }
    Ok(SkewCoefficients {
        alpha_inv: Scalar::param_pow(ctx, IDX_ALPHA, -1)?,
        beta: Scalar::param(ctx, IDX_BETA),
        gamma_inv: Scalar::param_pow(ctx, IDX_GAMMA, -1)?,
        r: <[[Scalar; 4]; 3]>::try_from(r).expect("three pairs"),
    })
}

/// One of the ten identities, as coefficient polynomials over
/// [`generic_context`].
///
/// `lhs` is the coefficient the monomial picks up when the overlap
/// `x3*x2*x1` is resolved right pair first (`stred(x3 * f_21)`), `rhs` when
/// it is resolved left pair first (`stred(f_32 * x1)`); the identity demands
/// they agree.
#[derive(Debug, Clone)]
pub struct ConditionIdentity {
    /// Condition label.
    pub label: &'static str,
    /// The standard monomial whose coefficients are compared.
    pub monomial: Word,
    /// Right-pair-first coefficient.
    pub lhs: Scalar,
    /// Left-pair-first coefficient.
    pub rhs: Scalar,
}

/// Labels and comparison monomials of the ten conditions, in report order.
const CONDITION_TABLE: [(&str, &[u8]); 10] = [
    ("gordito", &[1]),
    ("flaquito", &[2]),
    ("moder", &[3]),
    ("pss1", &[1, 2]),
    ("pss2", &[1, 3]),
    ("pss3", &[2, 3]),
    ("cattt", &[1, 1]),
    ("doggg", &[2, 2]),
    ("delfi", &[3, 3]),
    ("pss6", &[]),
];

/// The ten conditions as stored closed forms over `ctx` (which must have the
/// shape of [`generic_context`]).
fn transcribed_conditions(ctx: &Arc<ParamContext>) -> Result<Vec<ConditionIdentity>, SkewError> {
    let a = Scalar::param_pow(ctx, IDX_ALPHA, -1)?;
    let b = Scalar::param(ctx, IDX_BETA);
    let g = Scalar::param_pow(ctx, IDX_GAMMA, -1)?;
    let gen = |p: usize, t: usize| Scalar::param(ctx, r_index(p, t));
    let s: Vec<Scalar> = (0..4).map(|t| gen(0, t)).collect();
    let u: Vec<Scalar> = (0..4).map(|t| gen(1, t)).collect();
    let v: Vec<Scalar> = (0..4).map(|t| gen(2, t)).collect();

    let mul = |fs: &[&Scalar]| -> Result<Scalar, CoeffError> {
        fs[1..].iter().try_fold(fs[0].clone(), |acc, f| acc.mul(f))
    };
    let sum = |ts: &[Scalar]| -> Result<Scalar, CoeffError> {
        ts.iter().try_fold(Scalar::zero(), |acc, t| acc.add(t))
    };

    let sides: [(Scalar, Scalar); 10] = [
        // x1
        (
            sum(&[mul(&[&g, &b, &s[0]])?, mul(&[&g, &u[3], &s[1]])?, mul(&[&v[1], &u[1]])?, mul(&[&v[2], &s[1]])?])?,
            sum(&[s[0].clone(), mul(&[&s[3], &u[1]])?, mul(&[&a, &u[1], &v[1]])?, mul(&[&s[2], &v[1]])?])?,
        ),
        // x2
        (
            sum(&[mul(&[&g, &u[0]])?, mul(&[&g, &u[3], &s[2]])?, mul(&[&v[1], &u[2]])?, mul(&[&v[2], &s[2]])?])?,
            sum(&[mul(&[&a, &u[0]])?, mul(&[&s[3], &u[2]])?, mul(&[&a, &u[1], &v[2]])?, mul(&[&s[2], &v[2]])?])?,
        ),
        // x3
        (
            sum(&[v[0].clone(), mul(&[&g, &u[3], &s[3]])?, mul(&[&v[1], &u[3]])?, mul(&[&v[2], &s[3]])?])?,
            sum(&[mul(&[&a, &b, &v[0]])?, mul(&[&s[3], &u[3]])?, mul(&[&a, &u[1], &v[3]])?, mul(&[&s[2], &v[3]])?])?,
        ),
        // x1*x2
        (
            sum(&[mul(&[&g, &u[1]])?, mul(&[&g, &b, &s[2]])?])?,
            sum(&[mul(&[&g, &a, &u[1]])?, mul(&[&g, &s[2]])?])?,
        ),
        // x1*x3
        (
            sum(&[mul(&[&g, &b, &s[3]])?, mul(&[&b, &v[1]])?])?,
            sum(&[mul(&[&b, &a, &v[1]])?, mul(&[&b, &s[3]])?])?,
        ),
        // x2*x3
        (
            sum(&[mul(&[&g, &a, &u[3]])?, mul(&[&a, &v[2]])?])?,
            sum(&[mul(&[&b, &a, &v[2]])?, mul(&[&a, &u[3]])?])?,
        ),
        // x1^2
        (mul(&[&g, &b, &s[1]])?, s[1].clone()),
        // x2^2
        (mul(&[&g, &u[2]])?, mul(&[&a, &u[2]])?),
        // x3^2
        (v[3].clone(), mul(&[&b, &a, &v[3]])?),
        // 1
        (
            sum(&[mul(&[&g, &u[3], &s[0]])?, mul(&[&v[1], &u[0]])?, mul(&[&v[2], &s[0]])?])?,
            sum(&[mul(&[&s[3], &u[0]])?, mul(&[&a, &u[1], &v[0]])?, mul(&[&s[2], &v[0]])?])?,
        ),
    ];

    Ok(CONDITION_TABLE
        .iter()
        .zip(sides)
        .map(|(&(label, idx), (lhs, rhs))| ConditionIdentity {
            label,
            monomial: Word::from_indices(idx),
            lhs,
            rhs,
        })
        .collect())
}

/// One condition, evaluated at concrete coefficients.
#[derive(Debug, Clone)]
pub struct ConditionOutcome {
    /// Condition label.
    pub label: &'static str,
    /// The standard monomial the condition compares coefficients of.
    pub monomial: Word,
    /// Evaluated left side.
    pub lhs: Scalar,
    /// Evaluated right side.
    pub rhs: Scalar,
    /// Whether `lhs - rhs` vanishes.
    pub satisfied: bool,
}

/// The ten conditions evaluated at one coefficient record.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    /// Outcomes in the fixed report order.
    pub outcomes: Vec<ConditionOutcome>,
    /// Whether every condition holds.
    pub all_satisfied: bool,
}

impl ConditionReport {
    /// Looks up one outcome by label.
    pub fn outcome(&self, label: &str) -> Option<&ConditionOutcome> {
        self.outcomes.iter().find(|o| o.label == label)
    }

    /// The unsatisfied conditions, in report order.
    pub fn violations(&self) -> impl Iterator<Item = &ConditionOutcome> {
        self.outcomes.iter().filter(|o| !o.satisfied)
    }
}

/// Values for the generic parameters at a concrete coefficient record, in
/// context order.
fn assemble_values(coeffs: &SkewCoefficients) -> Result<Vec<Scalar>, SkewError> {
    let mut values = Vec::with_capacity(15);
    values.push(coeffs.alpha_inv.invert()?);
    values.push(coeffs.beta.clone());
    values.push(coeffs.gamma_inv.invert()?);
    for p in 0..3 {
        values.extend(coeffs.r[p].iter().cloned());
    }
    Ok(values)
}

/// Evaluates stored identities at one coefficient record.
fn evaluate_identities(
    identities: &[ConditionIdentity],
    coeffs: &SkewCoefficients,
) -> Result<ConditionReport, SkewError> {
    let values = assemble_values(coeffs)?;
    let mut outcomes = Vec::with_capacity(identities.len());
    for id in identities {
        let lhs = id.lhs.eval_with(&values)?;
        let rhs = id.rhs.eval_with(&values)?;
        let satisfied = lhs.sub(&rhs)?.is_zero();
        outcomes.push(ConditionOutcome {
            label: id.label,
            monomial: id.monomial.clone(),
            lhs,
            rhs,
            satisfied,
        });
    }
    let all_satisfied = outcomes.iter().all(|o| o.satisfied);
    Ok(ConditionReport { outcomes, all_satisfied })
}

/// Evaluates the ten stored conditions at `coeffs`.
///
/// For a three-generator system with affine tails, all ten hold exactly when
/// the system is confluent, so this decides the basis question without
/// running any reduction.
pub fn check_conditions(coeffs: &SkewCoefficients) -> Result<ConditionReport, SkewError> {
    let ctx = generic_context();
    let identities = transcribed_conditions(&ctx)?;
    evaluate_identities(&identities, coeffs)
}

/// The conditions recovered from the overlap calculus, monomial by monomial.
#[derive(Debug, Clone)]
pub struct DerivedConditions {
    /// The symbolic parameter context the identities live over.
    pub context: Arc<ParamContext>,
    /// One identity per comparison monomial, in report order.
    pub identities: Vec<ConditionIdentity>,
    /// The coefficient of `x1*x2*x3`, identical on both resolution routes
    /// and therefore never a condition.
    pub cube_coefficient: Scalar,
}

impl DerivedConditions {
    /// Whether the derived identities agree with the stored closed forms,
    /// side by side, as ring elements in canonical form.
    pub fn matches_transcription(&self) -> Result<bool, SkewError> {
        let reference = transcribed_conditions(&self.context)?;
        Ok(self.identities.len() == reference.len()
            && self.identities.iter().zip(&reference).all(|(d, r)| {
                d.label == r.label
                    && d.monomial == r.monomial
                    && d.lhs == r.lhs
                    && d.rhs == r.rhs
            }))
    }

    /// Evaluates the derived identities at concrete coefficients.
    pub fn specialize(&self, coeffs: &SkewCoefficients) -> Result<ConditionReport, SkewError> {
        evaluate_identities(&self.identities, coeffs)
    }
}

/// Re-derives the ten conditions from the overlap calculus.
///
/// Builds the fully symbolic three-generator system over
/// [`generic_context`], resolves its single overlap both ways, and reads one
/// identity per support monomial of the two results. The `x1*x2*x3`
/// coefficient agrees identically on both routes and is reported separately.
pub fn derive_conditions() -> Result<DerivedConditions, SkewError> {
    let ctx = generic_context();
    let coeffs = generic_coefficients(&ctx)?;
    let system = coeffs.to_system()?;
    let verdict = check_pbw(&system)?;
    let witness = &verdict.witnesses[0];
    let (g, h) = (&witness.left, &witness.right);

    let cube = Word::from_indices([1, 2, 3]);
    let cube_coefficient = g.coeff(&cube).cloned().unwrap_or_else(Scalar::zero);
    assert_eq!(
        Some(&cube_coefficient),
        h.coeff(&cube),
        "the top coefficient must agree on both resolution routes"
    );
    let expected: BTreeSet<Word> = CONDITION_TABLE
        .iter()
        .map(|&(_, idx)| Word::from_indices(idx))
        .chain([cube.clone()])
        .collect();
    for (w, _) in g.terms().chain(h.terms()) {
        assert!(
            expected.contains(w),
            "unexpected monomial {w:?} in an overlap resolution"
        );
    }

    let identities = CONDITION_TABLE
        .iter()
        .map(|&(label, idx)| {
            let monomial = Word::from_indices(idx);
            let side = |poly: &NCPoly| {
                poly.coeff(&monomial).cloned().unwrap_or_else(Scalar::zero)
            };
            ConditionIdentity { label, monomial: monomial.clone(), lhs: side(g), rhs: side(h) }
        })
        .collect();

    Ok(DerivedConditions { context: ctx, identities, cube_coefficient })
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// The five case families, determined by the pattern of the units α, β, γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseFamily {
    /// All three units distinct.
    A,
    /// α = γ = 1 ≠ β.
    B,
    /// α = γ ≠ 1, β ≠ α.
    C,
    /// α = β = γ ≠ 1.
    D,
    /// α = β = γ = 1.
    E,
}

impl CaseFamily {
    /// The lowercase case letter.
    pub fn letter(&self) -> char {
        match self {
            CaseFamily::A => 'a',
            CaseFamily::B => 'b',
            CaseFamily::C => 'c',
            CaseFamily::D => 'd',
            CaseFamily::E => 'e',
        }
    }
}

impl fmt::Display for CaseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Where a confluent three-generator system lands among the five case
/// families, with the syntactic subcase when one of the listed relation
/// patterns matches exactly.
#[derive(Debug, Clone)]
pub struct Classification {
    /// Case family, determined by the units alone.
    pub case: CaseFamily,
    /// Matched relation-pattern label (for instance `"b.i"`), or `None` when
    /// no listed pattern matches syntactically.
    pub subcase: Option<String>,
    /// The unit α.
    pub alpha: Scalar,
    /// The unit β.
    pub beta: Scalar,
    /// The unit γ.
    pub gamma: Scalar,
    /// Human-readable remarks about the match.
    pub notes: Vec<String>,
}

/// Three-valued scalar equality: structural equality decides positively,
/// two rationals decide either way, and anything else is undecided.
fn decide_eq(x: &Scalar, y: &Scalar) -> Option<bool> {
    if x == y {
        Some(true)
    } else if matches!((x, y), (Scalar::Rat(_), Scalar::Rat(_))) {
        Some(false)
    } else {
        None
    }
}

/// A pattern one bracket-form tail is matched against.
enum TailPat {
    /// Exactly zero.
    Zero,
    /// Exactly the stated combination of generators, as `(coefficient,
    /// generator)` pairs.
    Exact(&'static [(i64, u8)]),
    /// Any constant, zero included.
    AnyConst,
    /// Any scalar multiple of the stated generator, zero included.
    MultipleOf(u8),
    /// The stated generator plus any constant.
    GenPlusConst(u8),
    /// Any combination of the stated generator and a constant.
    AffineIn(u8),
}

impl TailPat {
    fn matches(&self, f: &NCPoly) -> bool {
        match self {
            TailPat::Zero => f.is_zero(),
            TailPat::Exact(spec) => {
                let expected = NCPoly::from_terms(
                    3,
                    spec.iter().map(|&(c, g)| (Word::gen(g), Scalar::from_int(c))),
                )
                .expect("pattern indices are in range");
                f == &expected
            }
            TailPat::AnyConst => f.terms().all(|(w, _)| w.is_empty()),
            TailPat::MultipleOf(g) => f.terms().all(|(w, _)| w.indices() == [*g]),
            TailPat::GenPlusConst(g) => {
                f.coeff(&Word::gen(*g)) == Some(&Scalar::one())
                    && f.terms().all(|(w, _)| w.is_empty() || w.indices() == [*g])
            }
            TailPat::AffineIn(g) => {
                f.terms().all(|(w, _)| w.is_empty() || w.indices() == [*g])
            }
        }
    }
}

/// The listed relation patterns per case family, as `(λ, μ, ν)` triples in
/// the bracket form, first match wins.
fn subcase_patterns(case: CaseFamily) -> &'static [(&'static str, [TailPat; 3])] {
    use TailPat::{AnyConst, Exact, GenPlusConst, MultipleOf, Zero};
    match case {
        CaseFamily::B => &[
            ("b.i", [Exact(&[(1, 3)]), Exact(&[(1, 2)]), Exact(&[(1, 1)])]),
            ("b.ii", [Exact(&[(1, 3)]), AnyConst, Exact(&[(1, 1)])]),
            ("b.iii", [Zero, Exact(&[(1, 2)]), Zero]),
            ("b.iv", [Zero, AnyConst, Zero]),
            ("b.v", [MultipleOf(3), Zero, Exact(&[(1, 1)])]),
            ("b.vi", [Exact(&[(1, 3)]), Zero, Zero]),
        ],
        CaseFamily::C => &[
            ("c.i", [Zero, GenPlusConst(2), Zero]),
            ("c.ii", [Zero, AnyConst, Zero]),
        ],
        CaseFamily::E => &[
            ("e.i", [Exact(&[(1, 1)]), Exact(&[(1, 2)]), Exact(&[(1, 3)])]),
            ("e.ii", [Zero, Zero, Exact(&[(1, 3)])]),
            ("e.iii", [Zero, Zero, AnyConst]),
            ("e.iv", [Exact(&[(-1, 2)]), Exact(&[(1, 1), (1, 2)]), Zero]),
            ("e.v", [MultipleOf(3), Exact(&[(1, 3)]), Zero]),
        ],
        CaseFamily::A | CaseFamily::D => &[],
    }
}

/// Decides the case family from the three units, or reports which branch
/// predicates stand in the way.
fn classify_units(
    alpha: &Scalar,
    beta: &Scalar,
    gamma: &Scalar,
) -> Result<CaseFamily, SkewError> {
    // pairwise equalities: [α=β, α=γ, β=γ], closed under transitivity
    let mut eq = [
        decide_eq(alpha, beta),
        decide_eq(alpha, gamma),
        decide_eq(beta, gamma),
    ];
    loop {
        let before = eq;
        for (x, y, z) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            if let (Some(a), Some(b)) = (eq[x], eq[y]) {
                if a && b {
                    eq[z] = Some(true);
                } else if a != b {
                    eq[z] = Some(false);
                }
            }
        }
        if eq == before {
            break;
        }
    }

    let names = ["alpha = beta", "alpha = gamma", "beta = gamma"];
    let undecided = |eq: &[Option<bool>; 3]| -> Vec<String> {
        eq.iter()
            .zip(names)
            .filter(|(e, _)| e.is_none())
            .map(|(_, n)| n.to_string())
            .collect()
    };

    let one = Scalar::one();
    match eq {
        [Some(true), Some(true), Some(true)] => match decide_eq(alpha, &one) {
            Some(true) => Ok(CaseFamily::E),
            Some(false) => Ok(CaseFamily::D),
            None => Err(SkewError::IndeterminateClassification {
                predicates: vec!["alpha = 1".to_string()],
            }),
        },
        [Some(false), Some(true), Some(false)] => match decide_eq(alpha, &one) {
            Some(true) => Ok(CaseFamily::B),
            Some(false) => Ok(CaseFamily::C),
            None => Err(SkewError::IndeterminateClassification {
                predicates: vec!["alpha = 1".to_string()],
            }),
        },
        [Some(false), Some(false), Some(false)] => Ok(CaseFamily::A),
        [Some(true), Some(false), Some(false)] | [Some(false), Some(false), Some(true)] => {
            Err(SkewError::NoCaseMatched {
                alpha: alpha.to_string(),
                beta: beta.to_string(),
                gamma: gamma.to_string(),
            })
        }
        _ => Err(SkewError::IndeterminateClassification { predicates: undecided(&eq) }),
    }
}

/// Sorts a confluent three-generator system into its case family.
///
/// The case letter is decided by the units α, β, γ alone. The subcase is
/// assigned only when the relations, rewritten in the bracket form
/// `yz - αzy = λ`, `zx - βxz = μ`, `xy - γyx = ν` with `(x, y, z) = (x1, x2,
/// x3)`, match one of the listed patterns syntactically; no change of
/// variables is attempted. Requires the system to be confluent and refuses
/// to guess undecidable predicates on symbolic units.
pub fn classify(
    coeffs: &SkewCoefficients,
    system: &SkewSystem,
) -> Result<Classification, SkewError> {
    let verdict = check_pbw(system)?;
    if !verdict.is_pbw {
        let o = verdict.first_failure.expect("non-confluent verdicts name a failure");
        return Err(SkewError::NotPbw { k: o.k, j: o.j, i: o.i });
    }

    let alpha = coeffs.alpha()?;
    let beta = coeffs.beta.clone();
    let gamma = coeffs.gamma()?;
    let case = classify_units(&alpha, &beta, &gamma)?;

    // bracket-form tails: λ = −α·t32, μ = t31, ν = −γ·t21
    let lambda = self::lambda(coeffs, &alpha)?;
    let mu = coeffs.tail_poly(1)?;
    let nu = coeffs.tail_poly(2)?.scalar_mul(&gamma.neg())?;
    let tails = [&lambda, &mu, &nu];

    let mut subcase = None;
    for (label, pats) in subcase_patterns(case) {
        if pats.iter().zip(tails).all(|(p, t)| p.matches(t)) {
            subcase = Some(label.to_string());
            break;
        }
    }

    let mut notes = Vec::new();
    match case {
        CaseFamily::A => {
            if tails.iter().all(|t| t.is_zero()) {
                notes.push("relations already have the canonical zero tails".to_string());
            } else {
                notes.push(
                    "case assigned by the units; the canonical presentation has zero tails"
                        .to_string(),
                );
            }
        }
        CaseFamily::D => {
            let canonical = [TailPat::AffineIn(1), TailPat::AffineIn(2), TailPat::AffineIn(3)];
            if canonical.iter().zip(tails).all(|(p, t)| p.matches(t)) {
                notes.push("tails have the canonical affine shape".to_string());
            } else {
                notes.push(
                    "case assigned by the units; tails differ from the canonical affine shape"
                        .to_string(),
                );
            }
        }
        CaseFamily::B | CaseFamily::C | CaseFamily::E => {
            if subcase.is_none() {
                notes.push("no listed relation pattern matches the tails syntactically".to_string());
            }
        }
    }

    Ok(Classification { case, subcase, alpha, beta, gamma, notes })
}

/// The bracket-form tail λ = −α·t32.
fn lambda(coeffs: &SkewCoefficients, alpha: &Scalar) -> Result<NCPoly, SkewError> {
    Ok(coeffs.tail_poly(0)?.scalar_mul(&alpha.neg())?)
}
