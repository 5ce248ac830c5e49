//! Words and noncommutative polynomials over the free associative algebra.
//!
//! A [`Word`] is a finite product of generators, stored as 1-based indices.
//! Words are totally ordered by the degree-lexicographic order: shorter words
//! first, ties broken left to right with `x1 < x2 < ... < xn`.  This order is
//! compatible with concatenation on both sides and has no infinite descending
//! chains, which is what makes the reduction machinery terminate.
//!
//! An [`NCPoly`] is a finitely supported map from words to nonzero scalars
//! over a fixed generator arity.  Terms iterate in descending order, so the
//! leading monomial is always the first one handed out.

use crate::coeff::{CoeffError, Scalar};
use num_bigint::BigUint;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Errors from free-algebra operations.
#[derive(Debug, Error)]
pub enum FreeAlgError {
    /// Polynomials over different generator arities were combined.
    #[error("generator arity mismatch: {left} vs {right}")]
    ArityMismatch { left: u8, right: u8 },
    /// The zero polynomial has no leading term.
    #[error("the zero polynomial has no leading term")]
    EmptyPolynomial,
    /// A word used a generator index outside `1..=n`.
    #[error("generator index {index} out of range for {n} generators")]
    IndexOutOfRange { index: u8, n: u8 },
    /// Scalar arithmetic failed underneath.
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// A word in the free monoid on generators `x1..xn`, stored as 1-based
/// indices.  The empty word is the monoid identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    /// The empty word.
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// The length-one word for generator `i` (1-based).
    pub fn gen(i: u8) -> Self {
        assert!(i >= 1, "generator indices are 1-based");
        Word(vec![i])
    }

    /// A word from explicit 1-based indices.
    pub fn from_indices(indices: impl Into<Vec<u8>>) -> Self {
        let indices = indices.into();
        assert!(indices.iter().all(|&i| i >= 1), "generator indices are 1-based");
        Word(indices)
    }

    /// The underlying index sequence.
    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    /// Total degree (word length).
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Whether the word is empty.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// A standard word is non-decreasing: `x_{j1}..x_{jr}` with
    /// `j1 <= j2 <= ... <= jr`.  Words of length 0 or 1 are standard.
    pub fn is_standard(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    /// Index of the leftmost descent (`w[k] > w[k+1]`), if any.
    pub fn first_descent(&self) -> Option<usize> {
        self.0.windows(2).position(|w| w[0] > w[1])
    }

    /// All ways of writing `self = a · pattern · b`, as `(a, b)` pairs in
    /// left-to-right order of the occurrence.
    pub fn occurrences(&self, pattern: &Word) -> Vec<(Word, Word)> {
        let p = &pattern.0;
        if p.is_empty() || p.len() > self.0.len() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for start in 0..=(self.0.len() - p.len()) {
            if &self.0[start..start + p.len()] == p.as_slice() {
                out.push((
                    Word(self.0[..start].to_vec()),
                    Word(self.0[start + p.len()..].to_vec()),
                ));
            }
        }
        out
    }

    /// The word with the same letters sorted ascending (its standard
    /// rearrangement).
    pub fn sorted(&self) -> Word {
        let mut v = self.0.clone();
        v.sort_unstable();
        Word(v)
    }

    /// Renders with the given generator names, collapsing runs into powers:
    /// `x1*x2^2*x3`.  The empty word renders as `1`.
    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut k = 0;
        while k < self.0.len() {
            let idx = self.0[k];
            let mut run = 1;
            while k + run < self.0.len() && self.0[k + run] == idx {
                run += 1;
            }
            let name = &names[(idx - 1) as usize];
            if run == 1 {
                parts.push(name.clone());
            } else {
                parts.push(format!("{name}^{run}"));
            }
            k += run;
        }
        parts.join("*")
    }
}

impl Ord for Word {
    /// Degree-lexicographic order: compare total degree first, then the
    /// index sequences left to right.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree-lexicographic comparison, exposed by name.
pub fn word_cmp_deglex(a: &Word, b: &Word) -> Ordering {
    a.cmp(b)
}

/// Default generator names `x1..xn`, used by `Display`.
pub fn default_names(n: u8) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Number of standard (non-decreasing) words of length `d` over `n`
/// generators: the binomial coefficient `C(d + n - 1, n - 1)`.
pub fn count_standard_words(n: u8, d: u32) -> BigUint {
    if n == 0 {
        return if d == 0 { BigUint::from(1u32) } else { BigUint::from(0u32) };
    }
    // multiplicative evaluation of C(d + n - 1, n - 1)
    let k = u64::from(n) - 1;
    let m = u64::from(d) + k;
    let mut acc = BigUint::from(1u32);
    for t in 1..=k {
        acc = acc * BigUint::from(m - k + t) / BigUint::from(t);
    }
    acc
}

/// A noncommutative polynomial: finitely many words with nonzero scalar
/// coefficients, over a fixed number of generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCPoly {
    n: u8,
    terms: BTreeMap<Word, Scalar>,
}

impl NCPoly {
    /// The zero polynomial over `n` generators.
    pub fn zero(n: u8) -> Self {
        NCPoly { n, terms: BTreeMap::new() }
    }

    /// A constant polynomial.
    pub fn constant(n: u8, c: Scalar) -> Self {
        let mut p = NCPoly::zero(n);
        if !c.is_zero() {
            p.terms.insert(Word::empty(), c);
        }
        p
    }

    /// The single-term polynomial `c · w`.
    pub fn monomial(n: u8, w: Word, c: Scalar) -> Result<Self, FreeAlgError> {
        for &idx in w.indices() {
            if idx == 0 || idx > n {
                return Err(FreeAlgError::IndexOutOfRange { index: idx, n });
            }
        }
        let mut p = NCPoly::zero(n);
        if !c.is_zero() {
            p.terms.insert(w, c);
        }
        Ok(p)
    }

    /// Builds a polynomial from `(word, coefficient)` pairs, merging
    /// duplicates exactly.
    pub fn from_terms(
        n: u8,
        terms: impl IntoIterator<Item = (Word, Scalar)>,
    ) -> Result<Self, FreeAlgError> {
        let mut acc = NCPoly::zero(n);
        for (w, c) in terms {
            acc = acc.add(&NCPoly::monomial(n, w, c)?)?;
        }
        Ok(acc)
    }

    /// Generator arity.
    pub fn n(&self) -> u8 {
        self.n
    }

    /// Whether this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending degree-lexicographic order (leading term first).
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter().rev()
    }

    /// Coefficient of a word, if present.
    pub fn coeff(&self, w: &Word) -> Option<&Scalar> {
        self.terms.get(w)
    }

    /// Leading term: the deglex-greatest word and its coefficient.
    pub fn leading(&self) -> Result<(&Word, &Scalar), FreeAlgError> {
        self.terms.iter().next_back().ok_or(FreeAlgError::EmptyPolynomial)
    }

    /// Total degree of the leading word; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Word::degree)
    }

    /// Whether every support word is standard.
    pub fn all_standard(&self) -> bool {
        self.terms.keys().all(Word::is_standard)
    }

    fn check_arity(&self, other: &NCPoly) -> Result<(), FreeAlgError> {
        if self.n != other.n {
            return Err(FreeAlgError::ArityMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// Exact sum.
    pub fn add(&self, other: &NCPoly) -> Result<NCPoly, FreeAlgError> {
        self.check_arity(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            match terms.remove(w) {
                None => {
                    terms.insert(w.clone(), c.clone());
                }
                Some(existing) => {
                    let sum = existing.add(c)?;
                    if !sum.is_zero() {
                        terms.insert(w.clone(), sum);
                    }
                }
            }
        }
        Ok(NCPoly { n: self.n, terms })
    }

    /// Exact negation.
    pub fn neg(&self) -> NCPoly {
        NCPoly {
            n: self.n,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect(),
        }
    }

    /// Exact difference.
    pub fn sub(&self, other: &NCPoly) -> Result<NCPoly, FreeAlgError> {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by `c`.
    pub fn scalar_mul(&self, c: &Scalar) -> Result<NCPoly, FreeAlgError> {
        if c.is_zero() {
            return Ok(NCPoly::zero(self.n));
        }
        let mut terms = BTreeMap::new();
        for (w, k) in &self.terms {
            let prod = k.mul(c)?;
            if !prod.is_zero() {
                terms.insert(w.clone(), prod);
            }
        }
        Ok(NCPoly { n: self.n, terms })
    }

    /// Exact product by concatenation of words, extended bilinearly.
    pub fn mul(&self, other: &NCPoly) -> Result<NCPoly, FreeAlgError> {
        self.check_arity(other)?;
        let mut terms: BTreeMap<Word, Scalar> = BTreeMap::new();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let prod = ca.mul(cb)?;
                if prod.is_zero() {
                    continue;
                }
                let w = wa.concat(wb);
                match terms.remove(&w) {
                    None => {
                        terms.insert(w, prod);
                    }
                    Some(existing) => {
                        let sum = existing.add(&prod)?;
                        if !sum.is_zero() {
                            terms.insert(w, sum);
                        }
                    }
                }
            }
        }
        Ok(NCPoly { n: self.n, terms })
    }

    /// The product `a · self · b` for words `a`, `b`.
    pub fn sandwich(&self, a: &Word, b: &Word) -> NCPoly {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (a.concat(w).concat(b), c.clone()))
            .collect();
        NCPoly { n: self.n, terms }
    }

    /// Renders with explicit generator names; terms descend in deglex order.
    pub fn render(&self, names: &[String]) -> String {
        debug_assert_eq!(names.len(), usize::from(self.n), "one name per generator");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (w, c)) in self.terms().enumerate() {
            let (neg, piece) = if w.is_empty() {
                // constant term: render the scalar magnitude standalone
                match c {
                    Scalar::Rat(_) => {
                        let (neg, _) = c.render_product();
                        let shown = if neg { c.neg() } else { c.clone() };
                        (neg, shown.to_string())
                    }
                    Scalar::Param(_) => {
                        let (neg, mag) = c.render_product();
                        (neg, mag.unwrap_or_else(|| "1".to_string()))
                    }
                }
            } else {
                let (neg, mag) = c.render_product();
                let ws = w.render(names);
                match mag {
                    None => (neg, ws),
                    Some(m) => (neg, format!("{m}*{ws}")),
                }
            };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&piece);
        }
        out
    }
}

impl fmt::Display for NCPoly {
    /// Renders with the default names `x1..xn`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&default_names(self.n)))
    }
}
