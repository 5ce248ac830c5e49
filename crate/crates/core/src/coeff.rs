//! Exact scalar arithmetic for the engine.
//!
//! Scalars come in two tiers sharing one interface:
//!
//! * [`Scalar::Rat`] — an arbitrary-precision rational, used whenever no
//!   symbolic parameters are in play.  `num_rational::BigRational` keeps the
//!   canonical reduced form (gcd 1, positive denominator) for us.
//! * [`Scalar::Param`] — a Laurent polynomial over a declared
//!   [`ParamContext`]: a finitely supported map from exponent vectors to
//!   rationals.  Negative exponents are only permitted at positions declared
//!   invertible (`unit`), so every stored value is a genuine element of the
//!   coefficient ring.
//!
//! Canonical form is unique: zero coefficients are never stored, a parameter
//! polynomial that collapses to a constant is normalized down to the rational
//! tier, and exponent keys live in an ordered map.  Two scalars are equal
//! exactly when their stored representations are equal, which makes equality
//! checks (and therefore every verdict downstream) purely structural.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Exact rational number; always stored in reduced canonical form.
pub type Rat = BigRational;

/// Errors arising in scalar arithmetic and parameter management.
#[derive(Debug, Error)]
pub enum CoeffError {
    /// Two parameter-bearing scalars were combined across different contexts.
    #[error("parameter context mismatch: [{left}] vs [{right}]")]
    ContextMismatch { left: String, right: String },
    /// Inversion of zero.
    #[error("division by zero")]
    DivisionByZero,
    /// Inversion of a scalar that is not a unit of the coefficient ring.
    #[error("scalar `{scalar}` is not a unit")]
    NotAUnit { scalar: String },
    /// A parameter name that is not declared in the context.
    #[error("unknown parameter `{name}`")]
    UnknownParameter { name: String },
    /// The same parameter name declared twice.
    #[error("duplicate parameter `{name}`")]
    DuplicateParameter { name: String },
    /// A negative power was requested on a parameter not declared `unit`.
    #[error("parameter `{name}` is not declared unit; negative powers are not available")]
    NonUnitNegativePower { name: String },
    /// A unit parameter was assigned the value zero during substitution.
    #[error("cannot substitute 0 for unit parameter `{name}`")]
    UnitSubstitutedZero { name: String },
}

/// Declaration of one symbolic parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamDecl {
    /// Parameter name as written in presentations and reports.
    pub name: String,
    /// Whether the parameter is invertible (may carry negative exponents).
    pub unit: bool,
}

impl ParamDecl {
    /// Convenience constructor.
    pub fn new(name: impl Into<String>, unit: bool) -> Self {
        ParamDecl { name: name.into(), unit }
    }
}

/// An ordered list of parameter declarations, fixed per presentation.
///
/// Every `Scalar::Param` carries (a shared handle to) the context it was
/// built over; mixing scalars from different contexts is a hard error, never
/// a silent coercion.  Plain rationals are context-free constants and embed
/// into any context.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamContext {
    params: Vec<ParamDecl>,
}

impl ParamContext {
    /// Builds a context, rejecting duplicate names.
    pub fn new(params: Vec<ParamDecl>) -> Result<Self, CoeffError> {
        for (k, p) in params.iter().enumerate() {
            if params[..k].iter().any(|q| q.name == p.name) {
                return Err(CoeffError::DuplicateParameter { name: p.name.clone() });
            }
        }
        Ok(ParamContext { params })
    }

    /// The context with no parameters.
    pub fn empty() -> Arc<Self> {
        Arc::new(ParamContext::default())
    }

    /// Number of declared parameters.
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// All declarations, in order.
    pub fn decls(&self) -> &[ParamDecl] {
        &self.params
    }

    /// Index of a parameter by name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    /// Whether the parameter at `idx` is invertible.
    pub fn is_unit(&self, idx: usize) -> bool {
        self.params[idx].unit
    }

    /// Name of the parameter at `idx`.
    pub fn name(&self, idx: usize) -> &str {
        &self.params[idx].name
    }

    /// Comma-separated parameter names, for error messages.
    pub(crate) fn describe(&self) -> String {
        let names: Vec<&str> = self.params.iter().map(|p| p.name.as_str()).collect();
        names.join(", ")
    }
}

/// Exponent vector of a Laurent monomial; one entry per context parameter.
type Expo = Vec<i32>;

/// A nonconstant Laurent polynomial over a parameter context.
///
/// Invariants: at least one term, no zero coefficients, not a lone constant
/// term (constants normalize to [`Scalar::Rat`]), and negative exponents only
/// at unit positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamPoly {
    ctx: Arc<ParamContext>,
    terms: BTreeMap<Expo, Rat>,
}

impl ParamPoly {
    /// The context this polynomial lives over.
    pub fn context(&self) -> &Arc<ParamContext> {
        &self.ctx
    }

    /// Terms in ascending exponent-vector order.
    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &Rat)> {
        self.terms.iter()
    }
}

/// An exact scalar: plain rational, or Laurent polynomial in parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    /// Context-free rational constant.
    Rat(Rat),
    /// Parameter-bearing value over a fixed context.
    Param(ParamPoly),
}

impl Scalar {
    /// The zero scalar.
    pub fn zero() -> Self {
        Scalar::Rat(Rat::zero())
    }

    /// The unit scalar 1.
    pub fn one() -> Self {
        Scalar::Rat(Rat::one())
    }

    /// A scalar from a machine integer.
    pub fn from_int(v: i64) -> Self {
        Scalar::Rat(Rat::from_integer(BigInt::from(v)))
    }

    /// A scalar from an exact rational.
    pub fn from_rat(r: Rat) -> Self {
        Scalar::Rat(r)
    }

    /// The rational `num/den`; `den` must be nonzero.
    pub fn rational(num: i64, den: i64) -> Result<Self, CoeffError> {
        if den == 0 {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Scalar::Rat(Rat::new(BigInt::from(num), BigInt::from(den))))
    }

    /// The parameter at `idx` of `ctx`, to the first power.
    pub fn param(ctx: &Arc<ParamContext>, idx: usize) -> Self {
        Scalar::param_pow(ctx, idx, 1).expect("first power is always valid")
    }

    /// The parameter at `idx` raised to `exp`; negative `exp` requires the
    /// parameter to be declared unit.
    pub fn param_pow(ctx: &Arc<ParamContext>, idx: usize, exp: i32) -> Result<Self, CoeffError> {
        assert!(idx < ctx.arity(), "parameter index out of range");
        if exp < 0 && !ctx.is_unit(idx) {
            return Err(CoeffError::NonUnitNegativePower { name: ctx.name(idx).to_string() });
        }
        if exp == 0 {
            return Ok(Scalar::one());
        }
        let mut expo = vec![0i32; ctx.arity()];
        expo[idx] = exp;
        let mut terms = BTreeMap::new();
        terms.insert(expo, Rat::one());
        Ok(Scalar::Param(ParamPoly { ctx: Arc::clone(ctx), terms }))
    }

    /// Looks a parameter up by name and returns it to the first power.
    pub fn param_by_name(ctx: &Arc<ParamContext>, name: &str) -> Result<Self, CoeffError> {
        let idx = ctx
            .index_of(name)
            .ok_or_else(|| CoeffError::UnknownParameter { name: name.to_string() })?;
        Ok(Scalar::param(ctx, idx))
    }

    /// True exactly for the zero scalar.
    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    /// True exactly for the unit scalar 1.
    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    /// The parameter context, if this scalar carries one.
    pub fn context(&self) -> Option<&Arc<ParamContext>> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Param(p) => Some(&p.ctx),
        }
    }

    /// Normalizes a term map back into a scalar, collapsing constants.
    fn normalize(ctx: &Arc<ParamContext>, mut terms: BTreeMap<Expo, Rat>) -> Scalar {
        terms.retain(|_, c| !c.is_zero());
        if terms.is_empty() {
            return Scalar::zero();
        }
        if terms.len() == 1 {
            let (expo, coeff) = terms.iter().next().expect("nonempty");
            if expo.iter().all(|&e| e == 0) {
                return Scalar::Rat(coeff.clone());
            }
        }
        Scalar::Param(ParamPoly { ctx: Arc::clone(ctx), terms })
    }

    /// Lifts a rational constant into a term map over `ctx`.
    fn constant_terms(ctx: &Arc<ParamContext>, r: &Rat) -> BTreeMap<Expo, Rat> {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(vec![0i32; ctx.arity()], r.clone());
        }
        terms
    }

    fn unify<'a>(a: &'a Scalar, b: &'a Scalar) -> Result<Option<&'a Arc<ParamContext>>, CoeffError> {
        match (a.context(), b.context()) {
            (None, None) => Ok(None),
            (Some(c), None) | (None, Some(c)) => Ok(Some(c)),
            (Some(ca), Some(cb)) => {
                if ca == cb {
                    Ok(Some(ca))
                } else {
                    Err(CoeffError::ContextMismatch { left: ca.describe(), right: cb.describe() })
                }
            }
        }
    }

    fn into_terms(&self, ctx: &Arc<ParamContext>) -> BTreeMap<Expo, Rat> {
        match self {
            Scalar::Rat(r) => Scalar::constant_terms(ctx, r),
            Scalar::Param(p) => p.terms.clone(),
        }
    }

    /// Exact sum.  Errors when both operands carry distinct contexts.
    pub fn add(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        match Scalar::unify(self, other)? {
            None => {
                let (Scalar::Rat(a), Scalar::Rat(b)) = (self, other) else { unreachable!() };
                Ok(Scalar::Rat(a + b))
            }
            Some(ctx) => {
                let ctx = Arc::clone(ctx);
                let mut terms = self.into_terms(&ctx);
                for (expo, coeff) in other.into_terms(&ctx) {
                    let entry = terms.entry(expo).or_insert_with(Rat::zero);
                    *entry += coeff;
                }
                Ok(Scalar::normalize(&ctx, terms))
            }
        }
    }

    /// Exact negation.
    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Param(p) => Scalar::Param(ParamPoly {
                ctx: Arc::clone(&p.ctx),
                terms: p.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            }),
        }
    }

    /// Exact difference.
    pub fn sub(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.add(&other.neg())
    }

    /// Exact product.  Errors when both operands carry distinct contexts.
    pub fn mul(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        match Scalar::unify(self, other)? {
            None => {
                let (Scalar::Rat(a), Scalar::Rat(b)) = (self, other) else { unreachable!() };
                Ok(Scalar::Rat(a * b))
            }
            Some(ctx) => {
                let ctx = Arc::clone(ctx);
                let left = self.into_terms(&ctx);
                let right = other.into_terms(&ctx);
                let mut terms: BTreeMap<Expo, Rat> = BTreeMap::new();
                for (ea, ca) in &left {
                    for (eb, cb) in &right {
                        let expo: Expo = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                        let entry = terms.entry(expo).or_insert_with(Rat::zero);
                        *entry += ca * cb;
                    }
                }
                Ok(Scalar::normalize(&ctx, terms))
            }
        }
    }

    /// Multiplicative inverse.
    ///
    /// Rationals invert unless zero.  A parameter scalar inverts exactly when
    /// it is a single term whose exponents touch only unit parameters.
    pub fn invert(&self) -> Result<Scalar, CoeffError> {
        match self {
            Scalar::Rat(r) => {
                if r.is_zero() {
                    Err(CoeffError::DivisionByZero)
                } else {
                    Ok(Scalar::Rat(r.recip()))
                }
            }
            Scalar::Param(p) => {
                if p.terms.len() != 1 {
                    return Err(CoeffError::NotAUnit { scalar: self.to_string() });
                }
                let (expo, coeff) = p.terms.iter().next().expect("single term");
                for (idx, &e) in expo.iter().enumerate() {
                    if e != 0 && !p.ctx.is_unit(idx) {
                        return Err(CoeffError::NotAUnit { scalar: self.to_string() });
                    }
                }
                let inv_expo: Expo = expo.iter().map(|e| -e).collect();
                let mut terms = BTreeMap::new();
                terms.insert(inv_expo, coeff.recip());
                Ok(Scalar::normalize(&p.ctx, terms))
            }
        }
    }

    /// Integer power; negative exponents go through [`Scalar::invert`].
    pub fn pow(&self, exp: i32) -> Result<Scalar, CoeffError> {
        if exp < 0 {
            return self.invert()?.pow(-exp);
        }
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Substitutes scalar values for every context parameter.
    ///
    /// `values[i]` replaces parameter `i`; the result lives wherever the
    /// values live.  Negative exponents invert the substituted value.
    pub fn eval_with(&self, values: &[Scalar]) -> Result<Scalar, CoeffError> {
        match self {
            Scalar::Rat(_) => Ok(self.clone()),
            Scalar::Param(p) => {
                assert_eq!(values.len(), p.ctx.arity(), "one value per parameter");
                let mut acc = Scalar::zero();
                for (expo, coeff) in &p.terms {
                    let mut term = Scalar::Rat(coeff.clone());
                    for (idx, &e) in expo.iter().enumerate() {
                        if e != 0 {
                            term = term.mul(&values[idx].pow(e)?)?;
                        }
                    }
                    acc = acc.add(&term)?;
                }
                Ok(acc)
            }
        }
    }

    /// Rewrites this scalar over a smaller context, assigning rational values
    /// to some parameters and carrying the rest over.
    ///
    /// `plan[i]` states the fate of old parameter `i`.  Assigning zero to a
    /// parameter that appears with a negative exponent is division by zero.
    pub fn substitute(
        &self,
        new_ctx: &Arc<ParamContext>,
        plan: &[SubstTarget],
    ) -> Result<Scalar, CoeffError> {
        match self {
            Scalar::Rat(_) => Ok(self.clone()),
            Scalar::Param(p) => {
                assert_eq!(plan.len(), p.ctx.arity(), "one plan entry per parameter");
                let mut terms: BTreeMap<Expo, Rat> = BTreeMap::new();
                'term: for (expo, coeff) in &p.terms {
                    let mut new_expo = vec![0i32; new_ctx.arity()];
                    let mut new_coeff = coeff.clone();
                    for (idx, &e) in expo.iter().enumerate() {
                        match &plan[idx] {
                            SubstTarget::Keep(j) => new_expo[*j] = e,
                            SubstTarget::Set(v) => {
                                if e < 0 && v.is_zero() {
                                    return Err(CoeffError::DivisionByZero);
                                }
                                if e != 0 && v.is_zero() {
                                    continue 'term; // the whole term vanishes
                                }
                                let mut pow = Rat::one();
                                for _ in 0..e.abs() {
                                    pow *= v;
                                }
                                if e < 0 {
                                    pow = pow.recip();
                                }
                                new_coeff *= pow;
                            }
                        }
                    }
                    let entry = terms.entry(new_expo).or_insert_with(Rat::zero);
                    *entry += new_coeff;
                }
                Ok(Scalar::normalize(new_ctx, terms))
            }
        }
    }

    /// Splits into sign and magnitude for rendering inside a product.
    ///
    /// Returns `(negative, factor)`; `factor` is `None` when the magnitude is
    /// exactly 1 (so callers can drop `1*`).  Multi-term parameter scalars
    /// never pull a sign and render parenthesized.
    pub(crate) fn render_product(&self) -> (bool, Option<String>) {
        match self {
            Scalar::Rat(r) => {
                let neg = r.is_negative();
                let mag = r.abs();
                if mag.is_one() {
                    (neg, None)
                } else {
                    (neg, Some(rat_factor(&mag)))
                }
            }
            Scalar::Param(p) => {
                if p.terms.len() == 1 {
                    let (expo, coeff) = p.terms.iter().next().expect("single term");
                    let neg = coeff.is_negative();
                    let mag = coeff.abs();
                    let mut parts: Vec<String> = Vec::new();
                    if !mag.is_one() {
                        parts.push(rat_factor(&mag));
                    }
                    parts.extend(expo_factors(&p.ctx, expo));
                    (neg, Some(parts.join("*")))
                } else if p.terms.values().all(|c| c.is_negative()) {
                    // pull the sign when every term carries one, so products
                    // read `- (a + b)*w` rather than `+ (-a - b)*w`
                    match self.neg() {
                        Scalar::Param(np) => (true, Some(format!("({})", render_sum(&np)))),
                        Scalar::Rat(_) => unreachable!("negation preserves the parametric tier"),
                    }
                } else {
                    (false, Some(format!("({})", render_sum(p))))
                }
            }
        }
    }
}

/// One entry of a substitution plan: keep a parameter (at a new index) or
/// assign it a rational value.
#[derive(Debug, Clone)]
pub enum SubstTarget {
    /// Parameter survives, at the given index of the new context.
    Keep(usize),
    /// Parameter is assigned this rational value.
    Set(Rat),
}

/// Renders a nonnegative rational as a product factor: integers bare,
/// fractions parenthesized.
fn rat_factor(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

/// Renders the parameter part of a Laurent monomial, e.g. `a^-2*b`.
fn expo_factors(ctx: &Arc<ParamContext>, expo: &Expo) -> Vec<String> {
    let mut parts = Vec::new();
    for (idx, &e) in expo.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if e == 1 {
            parts.push(ctx.name(idx).to_string());
        } else {
            parts.push(format!("{}^{}", ctx.name(idx), e));
        }
    }
    parts
}

/// Renders a parameter polynomial as a sum, highest exponent vector first.
fn render_sum(p: &ParamPoly) -> String {
    let mut out = String::new();
    for (k, (expo, coeff)) in p.terms.iter().rev().enumerate() {
        let neg = coeff.is_negative();
        let mag = coeff.abs();
        let factors = expo_factors(&p.ctx, expo);
        let body = if factors.is_empty() {
            rat_display(&mag)
        } else if mag.is_one() {
            factors.join("*")
        } else {
            format!("{}*{}", rat_factor(&mag), factors.join("*"))
        };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

/// Renders a nonnegative rational standalone: `p/q` or `p`.
fn rat_display(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.is_negative() {
                    write!(f, "-{}", rat_display(&r.abs()))
                } else {
                    write!(f, "{}", rat_display(r))
                }
            }
            Scalar::Param(p) => {
                if p.terms.len() == 1 {
                    let (neg, mag) = self.render_product();
                    let body = mag.unwrap_or_else(|| "1".to_string());
                    if neg {
                        write!(f, "-{body}")
                    } else {
                        write!(f, "{body}")
                    }
                } else {
                    write!(f, "{}", render_sum(p))
                }
            }
        }
    }
}
