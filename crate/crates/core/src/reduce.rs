//! Skew reduction systems and the reduction engine.
//!
//! A skew system over `n` generators has exactly one rewrite rule per
//! descending pair `(j, i)` with `j > i`:
//!
//! ```text
//! x_j x_i  ->  c * x_i x_j + tail
//! ```
//!
//! where `c` is an invertible scalar and every tail word is strictly below
//! `x_i x_j` in the degree-lexicographic order.  Because each rewrite
//! strictly lowers the leading monomial, every chain of reductions
//! terminates.
//!
//! Three reduction operators live here: [`SkewSystem::red`] performs the
//! single canonical step on a non-standard monomial (rewriting at the
//! leftmost descent), [`SkewSystem::stred`] drives the leading term to
//! standard form repeatedly and returns a [`ReductionTrace`] witnessing the
//! rewrites used, and [`SkewSystem::normal_forms_exhaustive`] explores
//! *every* possible reduction sequence to independently decide whether the
//! result is unique.

use crate::coeff::{CoeffError, ParamContext, Scalar};
use crate::freealg::{default_names, FreeAlgError, NCPoly, Word};
use std::collections::{BTreeMap, HashSet, VecDeque};
use std::sync::Arc;
use thiserror::Error;

/// Errors raised while validating a candidate skew system.
#[derive(Debug, Error)]
pub enum SystemError {
    /// A rule's pair indices were not a strict descent inside `1..=n`.
    #[error("rule pair ({j},{i}) is invalid: need n >= j > i >= 1 with n = {n}")]
    BadPair { j: u8, i: u8, n: u8 },
    /// Two rules were supplied for the same pair.
    #[error("duplicate rule for pair ({j},{i})")]
    DuplicatePair { j: u8, i: u8 },
    /// No rule was supplied for a descending pair.
    #[error("missing rule for pair ({j},{i})")]
    MissingPair { j: u8, i: u8 },
    /// The coefficient of `x_i x_j` on the right-hand side is not invertible.
    #[error("rule ({j},{i}) has non-invertible leading coefficient {coeff}")]
    NonUnitLeading { j: u8, i: u8, coeff: String },
    /// A tail word is not strictly below `x_i x_j` in deglex order.
    #[error("rule ({j},{i}) has tail word {word} not below its leading word")]
    TailExceedsLeading { j: u8, i: u8, word: String },
    /// A rule's right-hand side was built over a different generator arity.
    #[error("rule ({j},{i}) right-hand side uses arity {got}, system has {expected}")]
    RuleArityMismatch { j: u8, i: u8, expected: u8, got: u8 },
    /// Name list length differs from the generator count.
    #[error("expected {expected} generator names, got {got}")]
    NameCountMismatch { expected: u8, got: usize },
    /// Underlying polynomial arithmetic failed.
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    /// Underlying scalar arithmetic failed.
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Errors raised by the reduction operators.
#[derive(Debug, Error)]
pub enum ReduceError {
    /// `red` was asked to reduce a monomial that is already standard.
    #[error("cannot reduce a standard monomial")]
    StandardInput,
    /// Exhaustive search received an input above its degree cap.
    #[error("input degree {degree} exceeds the exhaustive-search cap {max_degree}")]
    DegreeCapExceeded { degree: usize, max_degree: usize },
    /// Exhaustive search visited more polynomials than the node cap allows.
    #[error("exhaustive search exceeded the node cap of {cap}")]
    NodeCapExceeded { cap: usize },
    /// Underlying polynomial arithmetic failed.
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    /// Underlying scalar arithmetic failed.
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// One rewrite rule `x_j x_i -> c * x_i x_j + tail` with `j > i`.
#[derive(Debug, Clone)]
pub struct Rule {
    j: u8,
    i: u8,
    lead_coeff: Scalar,
    tail: NCPoly,
}

impl Rule {
    /// Builds a rule from its full right-hand side.  The coefficient of
    /// `x_i x_j` in `rhs` (which may have been written as part of the tail)
    /// becomes the leading coefficient and must be invertible; every
    /// remaining word must be strictly below `x_i x_j`.
    pub fn new(j: u8, i: u8, rhs: NCPoly) -> Result<Rule, SystemError> {
        if i == 0 || j <= i {
            return Err(SystemError::BadPair { j, i, n: rhs.n() });
        }
        let lead_word = Word::from_indices([i, j]);
        let lead_coeff = match rhs.coeff(&lead_word) {
            Some(c) => c.clone(),
            None => Scalar::zero(),
        };
        if lead_coeff.invert().is_err() {
            return Err(SystemError::NonUnitLeading {
                j,
                i,
                coeff: lead_coeff.to_string(),
            });
        }
        let lead_part = NCPoly::monomial(rhs.n(), lead_word.clone(), lead_coeff.clone())?;
        let tail = rhs.sub(&lead_part)?;
        let names = default_names(rhs.n());
        for (w, _) in tail.terms() {
            if *w >= lead_word {
                return Err(SystemError::TailExceedsLeading {
                    j,
                    i,
                    word: w.render(&names),
                });
            }
        }
        Ok(Rule { j, i, lead_coeff, tail })
    }

    /// The descending pair `(j, i)`.
    pub fn pair(&self) -> (u8, u8) {
        (self.j, self.i)
    }

    /// The word this rule rewrites: `x_j x_i`.
    pub fn lhs_word(&self) -> Word {
        Word::from_indices([self.j, self.i])
    }

    /// The invertible coefficient of `x_i x_j` on the right-hand side.
    pub fn lead_coeff(&self) -> &Scalar {
        &self.lead_coeff
    }

    /// The strictly-smaller remainder of the right-hand side.
    pub fn tail(&self) -> &NCPoly {
        &self.tail
    }

    /// The full right-hand side `c * x_i x_j + tail`.
    pub fn rhs(&self) -> Result<NCPoly, FreeAlgError> {
        let lead = NCPoly::monomial(
            self.tail.n(),
            Word::from_indices([self.i, self.j]),
            self.lead_coeff.clone(),
        )?;
        lead.add(&self.tail)
    }
}

/// A validated skew reduction system: one rule per descending pair, all
/// leading coefficients invertible, all tails strictly below their leading
/// words, and one coherent parameter context across every coefficient.
#[derive(Debug, Clone)]
pub struct SkewSystem {
    n: u8,
    rules: BTreeMap<(u8, u8), Rule>,
    names: Vec<String>,
    ctx: Option<Arc<ParamContext>>,
}

impl SkewSystem {
    /// Validates a candidate rule set over `n` generators.
    pub fn new(n: u8, rules: Vec<Rule>) -> Result<SkewSystem, SystemError> {
        let mut map: BTreeMap<(u8, u8), Rule> = BTreeMap::new();
        let mut ctx: Option<Arc<ParamContext>> = None;
        for rule in rules {
            let (j, i) = rule.pair();
            if i == 0 || j <= i || j > n {
                return Err(SystemError::BadPair { j, i, n });
            }
            if rule.tail.n() != n {
                return Err(SystemError::RuleArityMismatch {
                    j,
                    i,
                    expected: n,
                    got: rule.tail.n(),
                });
            }
            // require one coherent parameter context across the whole system
            let mut scalars: Vec<&Scalar> = vec![&rule.lead_coeff];
            scalars.extend(rule.tail.terms().map(|(_, c)| c));
            for s in scalars {
                if let Some(c) = s.context() {
                    match &ctx {
                        None => ctx = Some(Arc::clone(c)),
                        Some(existing) if existing.as_ref() == c.as_ref() => {}
                        Some(existing) => {
                            return Err(SystemError::Coeff(CoeffError::ContextMismatch {
                                left: existing.describe(),
                                right: c.describe(),
                            }))
                        }
                    }
                }
            }
            if map.insert((j, i), rule).is_some() {
                return Err(SystemError::DuplicatePair { j, i });
            }
        }
        for j in 1..=n {
            for i in 1..j {
                if !map.contains_key(&(j, i)) {
                    return Err(SystemError::MissingPair { j, i });
                }
            }
        }
        Ok(SkewSystem { n, rules: map, names: default_names(n), ctx })
    }

    /// Replaces the default `x1..xn` display names.
    pub fn with_names(mut self, names: Vec<String>) -> Result<SkewSystem, SystemError> {
        if names.len() != usize::from(self.n) {
            return Err(SystemError::NameCountMismatch { expected: self.n, got: names.len() });
        }
        self.names = names;
        Ok(self)
    }

    /// Generator count.
    pub fn n(&self) -> u8 {
        self.n
    }

    /// Display names, one per generator.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The shared parameter context, if any coefficient is symbolic.
    pub fn context(&self) -> Option<&Arc<ParamContext>> {
        self.ctx.as_ref()
    }

    /// The rule for pair `(j, i)`, if `j > i` are in range.
    pub fn rule(&self, j: u8, i: u8) -> Option<&Rule> {
        self.rules.get(&(j, i))
    }

    /// All rules, ordered by pair.
    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.values()
    }

    /// Single canonical reduction of the non-standard monomial
    /// `coeff * word`: rewrites at the *leftmost* descent, splitting the
    /// word as `A x_j x_i B` and returning `coeff * A * rhs(j,i) * B`.
    pub fn red(&self, coeff: &Scalar, word: &Word) -> Result<NCPoly, ReduceError> {
        let (poly, _) = self.red_step(coeff, word)?;
        Ok(poly)
    }

    /// `red` plus the step descriptor it performed.
    fn red_step(&self, coeff: &Scalar, word: &Word) -> Result<(NCPoly, TraceStep), ReduceError> {
        let k = word.first_descent().ok_or(ReduceError::StandardInput)?;
        let letters = word.indices();
        let (j, i) = (letters[k], letters[k + 1]);
        let a = Word::from_indices(letters[..k].to_vec());
        let b = Word::from_indices(letters[k + 2..].to_vec());
        let rule = self
            .rule(j, i)
            .expect("validated systems carry a rule for every descending pair");
        let poly = rule.rhs()?.sandwich(&a, &b).scalar_mul(coeff)?;
        let step = TraceStep { j, i, left: a, right: b, coeff: coeff.clone() };
        Ok((poly, step))
    }

    /// Reduces `f` to standard form: while the polynomial is nonzero, move
    /// its leading term to the output if standard, otherwise replace it by
    /// its canonical reduction.  The leading monomial strictly decreases on
    /// every rewrite, so the loop terminates; the returned trace records
    /// each rewrite performed.
    pub fn stred(&self, f: &NCPoly) -> Result<(NCPoly, ReductionTrace), ReduceError> {
        let mut work = f.clone();
        let mut out = NCPoly::zero(self.n);
        let mut steps = Vec::new();
        while !work.is_zero() {
            let (w, c) = {
                let (w, c) = work.leading()?;
                (w.clone(), c.clone())
            };
            let term = NCPoly::monomial(self.n, w.clone(), c.clone())?;
            if w.is_standard() {
                out = out.add(&term)?;
                work = work.sub(&term)?;
            } else {
                let (replacement, step) = self.red_step(&c, &w)?;
                work = work.sub(&term)?.add(&replacement)?;
                steps.push(step);
            }
        }
        let trace = ReductionTrace { original: f.clone(), result: out.clone(), steps };
        Ok((out, trace))
    }

    /// Every polynomial reachable from `f` by exhausting reductions in all
    /// possible orders, deduplicated: the set of irreducible results.  A
    /// singleton means `f` reduces uniquely.  The search memoizes visited
    /// polynomials by canonical rendering and respects the configured caps.
    pub fn normal_forms_exhaustive(
        &self,
        f: &NCPoly,
        config: &ExhaustiveConfig,
    ) -> Result<Vec<NCPoly>, ReduceError> {
        let degree = f.degree().unwrap_or(0);
        if degree > config.max_degree {
            return Err(ReduceError::DegreeCapExceeded {
                degree,
                max_degree: config.max_degree,
            });
        }
        let names = default_names(self.n);
        let mut visited: HashSet<String> = HashSet::new();
        let mut results: BTreeMap<String, NCPoly> = BTreeMap::new();
        let mut queue: VecDeque<NCPoly> = VecDeque::new();
        visited.insert(f.render(&names));
        queue.push_back(f.clone());
        while let Some(p) = queue.pop_front() {
            let mut reducible = false;
            for (w, c) in p.terms() {
                if w.is_standard() {
                    continue;
                }
                reducible = true;
                // every occurrence of every rule's left word inside w is a move
                for rule in self.rules() {
                    let lhs = rule.lhs_word();
                    for (a, b) in w.occurrences(&lhs) {
                        let term = NCPoly::monomial(self.n, w.clone(), c.clone())?;
                        let replacement = rule.rhs()?.sandwich(&a, &b).scalar_mul(c)?;
                        let succ = p.sub(&term)?.add(&replacement)?;
                        let key = succ.render(&names);
                        if visited.insert(key) {
                            if visited.len() > config.node_cap {
                                return Err(ReduceError::NodeCapExceeded {
                                    cap: config.node_cap,
                                });
                            }
                            queue.push_back(succ);
                        }
                    }
                }
            }
            if !reducible {
                results.insert(p.render(&names), p);
            }
        }
        Ok(results.into_values().collect())
    }
}

/// Search budget for [`SkewSystem::normal_forms_exhaustive`].
#[derive(Debug, Clone)]
pub struct ExhaustiveConfig {
    /// Maximum total degree of the input polynomial.
    pub max_degree: usize,
    /// Maximum number of distinct polynomials visited.
    pub node_cap: usize,
}

impl Default for ExhaustiveConfig {
    fn default() -> Self {
        ExhaustiveConfig { max_degree: 4, node_cap: 1_000_000 }
    }
}

/// Replaces the term on `A x_j x_i B` in `f` (for the given rule with left
/// word `x_j x_i`) by the same coefficient times `A * rhs * B`.  When that
/// word is absent from `f`, the reduction acts trivially and `f` is
/// returned unchanged.
pub fn apply_reduction(
    f: &NCPoly,
    rule: &Rule,
    a: &Word,
    b: &Word,
) -> Result<NCPoly, ReduceError> {
    let target = a.concat(&rule.lhs_word()).concat(b);
    let Some(c) = f.coeff(&target) else {
        return Ok(f.clone());
    };
    let c = c.clone();
    let term = NCPoly::monomial(f.n(), target, c.clone())?;
    let replacement = rule.rhs()?.sandwich(a, b).scalar_mul(&c)?;
    Ok(f.sub(&term)?.add(&replacement)?)
}

/// One rewrite performed by `stred`: the rule pair, the flanking words, and
/// the coefficient carried through.
#[derive(Debug, Clone)]
pub struct TraceStep {
    /// Rule pair, `j > i`.
    pub j: u8,
    /// Rule pair, `j > i`.
    pub i: u8,
    /// Word to the left of the rewritten `x_j x_i`.
    pub left: Word,
    /// Word to the right of the rewritten `x_j x_i`.
    pub right: Word,
    /// Coefficient of the term that was rewritten.
    pub coeff: Scalar,
}

impl TraceStep {
    /// The contribution `coeff * A * (lhs - rhs) * B` this step removed.
    pub fn delta(&self, system: &SkewSystem) -> Result<NCPoly, ReduceError> {
        let rule = system
            .rule(self.j, self.i)
            .expect("trace steps reference rules of their own system");
        let lhs = NCPoly::monomial(system.n(), rule.lhs_word(), Scalar::one())?;
        let diff = lhs.sub(&rule.rhs()?)?;
        Ok(diff.sandwich(&self.left, &self.right).scalar_mul(&self.coeff)?)
    }

    /// Audit form: `σ=(j,i) A=<word> B=<word> c=<scalar>`.
    pub fn render(&self, names: &[String]) -> String {
        format!(
            "σ=({},{}) A={} B={} c={}",
            self.j,
            self.i,
            self.left.render(names),
            self.right.render(names),
            self.coeff
        )
    }
}

/// The full record of a `stred` run: input, output, and every rewrite in
/// order.  Summing `coeff * A * (lhs - rhs) * B` over the steps recovers
/// `original - result` exactly, which witnesses that both sides represent
/// the same element of the quotient algebra.
#[derive(Debug, Clone)]
pub struct ReductionTrace {
    original: NCPoly,
    result: NCPoly,
    steps: Vec<TraceStep>,
}

impl ReductionTrace {
    /// The polynomial the run started from.
    pub fn original(&self) -> &NCPoly {
        &self.original
    }

    /// The standard polynomial the run produced.
    pub fn result(&self) -> &NCPoly {
        &self.result
    }

    /// The rewrites in the order they were applied.
    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    /// The telescoping sum of all step contributions.
    pub fn delta(&self, system: &SkewSystem) -> Result<NCPoly, ReduceError> {
        let mut acc = NCPoly::zero(system.n());
        for step in &self.steps {
            acc = acc.add(&step.delta(system)?)?;
        }
        Ok(acc)
    }

    /// Replays the trace: checks `original - result == delta` exactly.
    pub fn verify(&self, system: &SkewSystem) -> Result<bool, ReduceError> {
        let lhs = self.original.sub(&self.result)?;
        Ok(lhs == self.delta(system)?)
    }

    /// Audit form, one line per step.
    pub fn render_lines(&self, names: &[String]) -> Vec<String> {
        self.steps.iter().map(|s| s.render(names)).collect()
    }
}
