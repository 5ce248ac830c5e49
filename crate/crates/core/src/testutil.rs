//! Shared fixtures for the unit tests: the worked example systems used
//! across the reduce, diamond, and skewcheck test suites.

use crate::coeff::{ParamContext, ParamDecl, Scalar};
use crate::freealg::{NCPoly, Word};
use crate::reduce::{Rule, SkewSystem};
use std::sync::Arc;

/// A rule over three generators with integer coefficients:
/// `x_j x_i -> sum of c * word`.
pub(crate) fn rational_rule(j: u8, i: u8, terms: &[(i64, &[u8])]) -> Rule {
    rational_rule_n(3, j, i, terms)
}

/// As [`rational_rule`] with an explicit generator count.
pub(crate) fn rational_rule_n(n: u8, j: u8, i: u8, terms: &[(i64, &[u8])]) -> Rule {
    let rhs = NCPoly::from_terms(
        n,
        terms
            .iter()
            .map(|&(c, ix)| (Word::from_indices(ix.to_vec()), Scalar::from_int(c))),
    )
    .expect("fixture indices are in range");
    Rule::new(j, i, rhs).expect("fixture rules are valid")
}

/// A rule over three generators from explicit scalar coefficients.
pub(crate) fn scalar_rule(j: u8, i: u8, terms: Vec<(Scalar, &[u8])>) -> Rule {
    let rhs = NCPoly::from_terms(
        3,
        terms
            .into_iter()
            .map(|(c, ix)| (Word::from_indices(ix.to_vec()), c)),
    )
    .expect("fixture indices are in range");
    Rule::new(j, i, rhs).expect("fixture rules are valid")
}

/// The dispin algebra: `x3x2 -> x2x3 - x3`, `x3x1 -> -x1x3 + x2`,
/// `x2x1 -> x1x2 - x1`.  Conflict-free; classifies as case b, subcase b.i.
pub(crate) fn dispin_system() -> SkewSystem {
    SkewSystem::new(
        3,
        vec![
            rational_rule(3, 2, &[(1, &[2, 3]), (-1, &[3])]),
            rational_rule(3, 1, &[(-1, &[1, 3]), (1, &[2])]),
            rational_rule(2, 1, &[(1, &[1, 2]), (-1, &[1])]),
        ],
    )
    .expect("dispin is a valid skew system")
}

/// The quantum-group system with a symbolic unit `nu`:
/// `x3x2 -> nu^4 x2x3 + (1 + nu^2) x2`,
/// `x3x1 -> nu^-4 x1x3 - (nu^-4 + nu^-2) x1`,
/// `x2x1 -> nu^-2 x1x2 - nu^-1 x3`.
pub(crate) fn woronowicz_symbolic() -> (Arc<ParamContext>, SkewSystem) {
    let ctx = Arc::new(
        ParamContext::new(vec![ParamDecl::new("nu", true)]).expect("one parameter"),
    );
    let nu = |e: i32| Scalar::param_pow(&ctx, 0, e).expect("nu is a unit");
    let one_plus_nu2 = Scalar::one().add(&nu(2)).expect("same context");
    let sys = SkewSystem::new(
        3,
        vec![
            scalar_rule(3, 2, vec![(nu(4), &[2, 3]), (one_plus_nu2.clone(), &[2])]),
            scalar_rule(
                3,
                1,
                vec![
                    (nu(-4), &[1, 3]),
                    (nu(-4).mul(&one_plus_nu2).expect("same context").neg(), &[1]),
                ],
            ),
            scalar_rule(2, 1, vec![(nu(-2), &[1, 2]), (nu(-1).neg(), &[3])]),
        ],
    )
    .expect("the quantum-group rules form a valid skew system");
    (ctx, sys)
}

/// The conflicting two-parameter system: `x2x1 -> alpha x1x2 + x1`,
/// `x3x1 -> beta x1x3 + x3`, `x3x2 -> x2x3`.  Not conflict-free.
pub(crate) fn ex3_symbolic() -> (Arc<ParamContext>, SkewSystem) {
    let ctx = Arc::new(
        ParamContext::new(vec![ParamDecl::new("alpha", true), ParamDecl::new("beta", true)])
            .expect("two parameters"),
    );
    let alpha = Scalar::param(&ctx, 0);
    let beta = Scalar::param(&ctx, 1);
    let sys = SkewSystem::new(
        3,
        vec![
            scalar_rule(3, 2, vec![(Scalar::one(), &[2, 3])]),
            scalar_rule(3, 1, vec![(beta, &[1, 3]), (Scalar::one(), &[3])]),
            scalar_rule(2, 1, vec![(alpha, &[1, 2]), (Scalar::one(), &[1])]),
        ],
    )
    .expect("rules are individually valid even though the system conflicts");
    (ctx, sys)
}

/// The conflicting system at concrete parameter values.
pub(crate) fn ex3_numeric(alpha: i64, beta: i64) -> SkewSystem {
    SkewSystem::new(
        3,
        vec![
            rational_rule(3, 2, &[(1, &[2, 3])]),
            rational_rule(3, 1, &[(beta, &[1, 3]), (1, &[3])]),
            rational_rule(2, 1, &[(alpha, &[1, 2]), (1, &[1])]),
        ],
    )
    .expect("valid rules")
}

/// Plain commutation on `n` generators: `x_j x_i -> x_i x_j`.
pub(crate) fn commutative_system(n: u8) -> SkewSystem {
    let mut rules = Vec::new();
    for j in 1..=n {
        for i in 1..j {
            rules.push(rational_rule_n(n, j, i, &[(1, &[i, j])]));
        }
    }
    SkewSystem::new(n, rules).expect("commutation is a valid skew system")
}

/// Quantum 3-space with three distinct scaling units and no tails:
/// `x3x2 -> (1/2) x2x3`, `x3x1 -> 3 x1x3`, `x2x1 -> (1/5) x1x2`.
pub(crate) fn quantum3_system() -> SkewSystem {
    SkewSystem::new(
        3,
        vec![
            scalar_rule(3, 2, vec![(Scalar::rational(1, 2).expect("nonzero"), &[2, 3])]),
            scalar_rule(3, 1, vec![(Scalar::from_int(3), &[1, 3])]),
            scalar_rule(2, 1, vec![(Scalar::rational(1, 5).expect("nonzero"), &[1, 2])]),
        ],
    )
    .expect("valid rules")
}
