//! Cross-module properties: the closed-form conditions against overlap
//! resolution, reduction traces against direct subtraction, standardness
//! against irreducibility, and the exhaustive reducer against the verdict.
//!
//! Systems are generated as presentation text and parsed, so every property
//! also exercises the parsing pipeline.

use proptest::prelude::*;

use skewpbw::{
    check_conditions, check_pbw, extract_coefficients, ExhaustiveConfig, NCPoly, Presentation,
    QuotientAlgebra, Scalar, SkewSystem, Word,
};

/// Unit pool for lead coefficients, as presentation-text fragments.
const UNITS: [&str; 4] = ["(1/2)", "1", "2", "3"];

/// One relation line `name_j*name_i = u*name_i*name_j + affine tail`.
fn relation_line(j: usize, i: usize, unit: &str, tail: [i64; 4]) -> String {
    let names = ["x", "y", "z"];
    let mut rhs = format!("({unit})*{}*{}", names[i - 1], names[j - 1]);
    for (slot, c) in tail.iter().enumerate() {
        if *c != 0 {
            if slot == 0 {
                rhs.push_str(&format!(" + ({c})"));
            } else {
                rhs.push_str(&format!(" + ({c})*{}", names[slot - 1]));
            }
        }
    }
    format!("{}*{} = {rhs}", names[j - 1], names[i - 1])
}

prop_compose! {
    /// A random three-generator presentation with unit leads and affine
    /// tails, in source form.
    fn arb_presentation_text()(
        units in prop::array::uniform3(0usize..UNITS.len()),
        tails in prop::array::uniform3(prop::array::uniform4(-2i64..=2)),
    ) -> String {
        let pairs = [(2, 1), (3, 1), (3, 2)];
        let mut text = String::from("generators: x, y, z\n");
        for (idx, (j, i)) in pairs.into_iter().enumerate() {
            text.push_str(&relation_line(j, i, UNITS[units[idx]], tails[idx]));
            text.push('\n');
        }
        text
    }
}

fn parse_system(text: &str) -> SkewSystem {
    Presentation::parse(text)
        .expect("generated text parses")
        .to_system()
        .expect("generated text is a valid system")
}

/// Every word over three generators with degree in `0..=max_degree`.
fn words_up_to(max_degree: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 1..=max_degree {
        let mut next = Vec::new();
        for w in &layer {
            for g in 1..=3u8 {
                let mut v = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.into_iter().map(Word::from_indices).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The ten closed-form coefficient conditions hold exactly when every
    /// overlap resolves.
    #[test]
    fn conditions_decide_exactly_the_confluent_systems(text in arb_presentation_text()) {
        let system = parse_system(&text);
        let verdict = check_pbw(&system).expect("check runs");
        let coeffs = extract_coefficients(&system).expect("affine tails");
        let report = check_conditions(&coeffs).expect("conditions evaluate");
        prop_assert_eq!(report.all_satisfied, verdict.is_pbw);
    }

    /// `stred` fixes a monomial iff its word is non-decreasing.
    #[test]
    fn standard_words_are_exactly_the_irreducible_ones(text in arb_presentation_text()) {
        let system = parse_system(&text);
        for word in words_up_to(4) {
            let f = NCPoly::monomial(3, word.clone(), Scalar::one()).expect("monomial");
            let (nf, trace) = system.stred(&f).expect("stred runs");
            let fixed = nf == f && trace.steps().is_empty();
            prop_assert_eq!(fixed, word.is_standard(), "word {:?}", word);
        }
    }

    /// Replaying a trace reconstructs `original - result` exactly.
    #[test]
    fn traces_replay_to_the_reduction_difference(
        text in arb_presentation_text(),
        terms in prop::collection::vec(
            (prop::collection::vec(1u8..=3, 0..=4), -3i64..=3i64),
            1..=3,
        ),
    ) {
        let system = parse_system(&text);
        let mut f = NCPoly::zero(3);
        for (letters, c) in terms {
            let term = NCPoly::monomial(3, Word::from_indices(letters), Scalar::from_int(c))
                .expect("term");
            f = f.add(&term).expect("sum");
        }
        let (nf, trace) = system.stred(&f).expect("stred runs");
        prop_assert!(nf.all_standard());
        prop_assert_eq!(trace.original(), &f);
        prop_assert_eq!(trace.result(), &nf);
        let delta = trace.delta(&system).expect("replay runs");
        prop_assert_eq!(delta, f.sub(&nf).expect("difference"));
        prop_assert!(trace.verify(&system).expect("verification runs"));
    }
}

proptest! {
    // the exhaustive reducer walks every reduction order, so keep the sample
    // count modest
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// For three generators there is a single overlap word, and the verdict
    /// is equivalent to that word reducing uniquely.
    #[test]
    fn overlap_word_reduces_uniquely_iff_verified(text in arb_presentation_text()) {
        let system = parse_system(&text);
        let verdict = check_pbw(&system).expect("check runs");
        let config = ExhaustiveConfig { max_degree: 4, node_cap: 1_000_000 };
        let overlap = NCPoly::monomial(3, Word::from_indices([3, 2, 1]), Scalar::one())
            .expect("overlap word");
        let nfs = system.normal_forms_exhaustive(&overlap, &config).expect("bounded search");
        let (stred, _) = system.stred(&overlap).expect("stred runs");
        prop_assert_eq!(nfs.len() == 1 && nfs[0] == stred, verdict.is_pbw);
    }

    /// On a verified system the quotient product of standard polynomials is
    /// standard and associative.
    #[test]
    fn quotient_products_stay_standard_and_associate(
        units in prop::array::uniform3(0usize..UNITS.len()),
        exps in prop::array::uniform3(prop::array::uniform3(0usize..=2)),
    ) {
        // zero tails satisfy all ten conditions, so the algebra always
        // verifies; the units still vary
        let pairs = [(2, 1), (3, 1), (3, 2)];
        let mut text = String::from("generators: x, y, z\n");
        for (idx, (j, i)) in pairs.into_iter().enumerate() {
            text.push_str(&relation_line(j, i, UNITS[units[idx]], [0; 4]));
            text.push('\n');
        }
        let algebra = QuotientAlgebra::new(parse_system(&text)).expect("zero tails verify");

        let monomial = |e: [usize; 3]| {
            let mut letters = vec![1u8; e[0]];
            letters.extend(std::iter::repeat_n(2u8, e[1]));
            letters.extend(std::iter::repeat_n(3u8, e[2]));
            NCPoly::monomial(3, Word::from_indices(letters), Scalar::one()).expect("monomial")
        };
        let (f, g, h) = (monomial(exps[0]), monomial(exps[1]), monomial(exps[2]));

        let fg = algebra.multiply(&f, &g).expect("f*g");
        prop_assert!(fg.all_standard());
        let fg_h = algebra.multiply(&fg, &h).expect("(f*g)*h");
        let gh = algebra.multiply(&g, &h).expect("g*h");
        let f_gh = algebra.multiply(&f, &gh).expect("f*(g*h)");
        prop_assert_eq!(fg_h, f_gh);
    }
}
