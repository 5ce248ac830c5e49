//! The text format for presentations: parsing, validation, parameter
//! substitution, and canonical rendering.
//!
//! A presentation file is line-oriented:
//!
//! ```text
//! generators: x, y, z        # order fixes the monomial order
//! unit nu                    # invertible parameter
//! param a                    # ordinary parameter
//! z*y = nu^4*y*z + (1 + nu^2)*y
//! z*x = nu^-4*x*z - (nu^-4 + nu^-2)*x
//! y*x = nu^-2*x*y - nu^-1*z
//! ```
//!
//! A `#` starts a comment that runs to the end of the line. Parameter
//! declarations must precede the relations. Each relation is written either
//! in rewrite form `xj*xi = <expr>` with the left side a descending product,
//! or in bracket form such as `y*z - alpha*z*y = <expr>`, which is converted
//! by solving for the descending product. Exactly one relation per
//! descending pair is required. Scalars are exact: integers, rationals
//! `p/q`, declared parameters, `^` integer powers, and parenthesized sums;
//! no floating point is accepted.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use crate::coeff::{CoeffError, ParamContext, ParamDecl, Rat, Scalar, SubstTarget};
use crate::freealg::{FreeAlgError, NCPoly, Word};
use crate::reduce::{Rule, SkewSystem, SystemError};
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

/// Largest accepted `^` exponent magnitude, to keep parsing allocations sane.
const MAX_EXPONENT: i64 = 10_000;

/// A syntax or symbol error, located in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based column number, counted in characters.
    pub col: usize,
    /// What went wrong.
    pub msg: String,
}

impl ParseError {
    fn new(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line, col, msg: msg.into() }
    }
}

/// Errors from working with presentations beyond parsing.
#[derive(Debug, Error)]
pub enum PresError {
    /// The text does not parse.
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// A substitution names a parameter the presentation does not declare.
    #[error("unknown parameter {name}")]
    UnknownParameter {
        /// The undeclared name.
        name: String,
    },
    /// A substitution assigns the same parameter twice.
    #[error("parameter {name} is assigned more than once")]
    DuplicateAssignment {
        /// The doubly-assigned name.
        name: String,
    },
    /// A substitution sends an invertible parameter to zero.
    #[error("cannot set unit parameter {name} to zero")]
    ZeroUnit {
        /// The unit parameter's name.
        name: String,
    },
    /// The relations do not form a valid rewriting system.
    #[error(transparent)]
    System(#[from] SystemError),
    /// Error from free-algebra arithmetic.
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    /// Error from coefficient arithmetic.
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// A parsed presentation: ordered generator names, parameter declarations,
/// and one normalized relation per descending generator pair.
///
/// Relations are stored in rewrite form: the polynomial the descending
/// product `xj*xi` rewrites to, lead term included.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    names: Vec<String>,
    decls: Vec<ParamDecl>,
    ctx: Option<Arc<ParamContext>>,
    relations: BTreeMap<(u8, u8), NCPoly>,
}

impl Presentation {
    /// Parses presentation text.
    ///
    /// Errors carry a line and column. Beyond syntax, parsing checks that
    /// every symbol is declared, that relation left sides solve for a
    /// descending product, and that exactly one relation is given per
    /// descending pair.
    pub fn parse(text: &str) -> Result<Presentation, ParseError> {
        let mut names: Option<Vec<String>> = None;
        let mut decls: Vec<ParamDecl> = Vec::new();
        let mut ctx: Option<Option<Arc<ParamContext>>> = None;
        let mut relations: BTreeMap<(u8, u8), NCPoly> = BTreeMap::new();
        let mut last_line = 1;

        for (line_no, raw) in text.lines().enumerate() {
            let line_no = line_no + 1;
            last_line = line_no;
            let toks = tokenize_line(line_no, raw)?;
            let Some(first) = toks.first() else { continue };

            let Some(names) = &names else {
                names = Some(parse_header(&toks)?);
                continue;
            };

            if let TokKind::Ident(word) = &first.kind {
                if word == "unit" || word == "param" {
                    if ctx.is_some() {
                        return Err(ParseError::new(
                            first.line,
                            first.col,
                            "parameter declarations must come before the relations",
                        ));
                    }
                    decls.push(parse_decl(&toks, names, &decls)?);
                    continue;
                }
            }

            let ctx = ctx.get_or_insert_with(|| {
                if decls.is_empty() {
                    None
                } else {
                    Some(Arc::new(
                        ParamContext::new(decls.clone()).expect("declaration names are unique"),
                    ))
                }
            });
            let (j, i, rhs) = parse_relation(&toks, names, ctx.as_ref())?;
            if relations.contains_key(&(j, i)) {
                return Err(ParseError::new(
                    first.line,
                    first.col,
                    format!(
                        "a second relation for {}*{}",
                        names[(j - 1) as usize],
                        names[(i - 1) as usize]
                    ),
                ));
            }
            relations.insert((j, i), rhs);
        }

        let Some(names) = names else {
            return Err(ParseError::new(1, 1, "expected a 'generators:' header"));
        };
        if relations.is_empty() {
            return Err(ParseError::new(last_line, 1, "expected at least one relation"));
        }
        let n = names.len() as u8;
        for j in 2..=n {
            for i in 1..j {
                if !relations.contains_key(&(j, i)) {
                    return Err(ParseError::new(
                        last_line,
                        1,
                        format!(
                            "missing a relation for {}*{}",
                            names[(j - 1) as usize],
                            names[(i - 1) as usize]
                        ),
                    ));
                }
            }
        }
        let ctx = ctx.flatten();
        Ok(Presentation { names, decls, ctx, relations })
    }

    /// Generator names, in monomial order.
    pub fn generators(&self) -> &[String] {
        &self.names
    }

    /// Declared parameters, in declaration order.
    pub fn parameters(&self) -> &[ParamDecl] {
        &self.decls
    }

    /// The parameter context, when any parameter is declared.
    pub fn context(&self) -> Option<&Arc<ParamContext>> {
        self.ctx.as_ref()
    }

    /// Number of generators.
    pub fn n(&self) -> u8 {
        self.names.len() as u8
    }

    /// The relations as `((j, i), rewrite polynomial)`, descending pairs in
    /// canonical order (largest first).
    pub fn relations(&self) -> impl Iterator<Item = ((u8, u8), &NCPoly)> {
        self.relations.iter().rev().map(|(&pair, rhs)| (pair, rhs))
    }

    /// The rewrite polynomial for one descending pair.
    pub fn relation(&self, j: u8, i: u8) -> Option<&NCPoly> {
        self.relations.get(&(j, i))
    }

    /// Builds and validates the rewriting system these relations define.
    pub fn to_system(&self) -> Result<SkewSystem, PresError> {
        let rules = self
            .relations
            .iter()
            .map(|(&(j, i), rhs)| Rule::new(j, i, rhs.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SkewSystem::new(self.n(), rules)?.with_names(self.names.clone())?)
    }

    /// Assigns rational values to some declared parameters, producing a new
    /// presentation over the remaining ones.
    ///
    /// Setting a unit parameter to zero is rejected, as is naming an
    /// undeclared parameter or assigning one twice.
    pub fn substitute(&self, assignments: &[(String, Rat)]) -> Result<Presentation, PresError> {
        if assignments.is_empty() {
            return Ok(self.clone());
        }
        let Some(ctx) = &self.ctx else {
            return Err(PresError::UnknownParameter { name: assignments[0].0.clone() });
        };
        let mut assigned: Vec<Option<Rat>> = vec![None; ctx.arity()];
        for (name, value) in assignments {
            let idx = ctx
                .index_of(name)
                .ok_or_else(|| PresError::UnknownParameter { name: name.clone() })?;
            if assigned[idx].is_some() {
                return Err(PresError::DuplicateAssignment { name: name.clone() });
            }
            if ctx.is_unit(idx) && value.is_zero() {
                return Err(PresError::ZeroUnit { name: name.clone() });
            }
            assigned[idx] = Some(value.clone());
        }

        let mut kept: Vec<ParamDecl> = Vec::new();
        let mut plan: Vec<SubstTarget> = Vec::with_capacity(ctx.arity());
        for (idx, decl) in ctx.decls().iter().enumerate() {
            match &assigned[idx] {
                Some(v) => plan.push(SubstTarget::Set(v.clone())),
                None => {
                    plan.push(SubstTarget::Keep(kept.len()));
                    kept.push(decl.clone());
                }
            }
        }
        let new_ctx = if kept.is_empty() {
            None
        } else {
            Some(Arc::new(ParamContext::new(kept.clone()).expect("names stay unique")))
        };
        let scalar_ctx = new_ctx.clone().unwrap_or_else(ParamContext::empty);

        let mut relations = BTreeMap::new();
        for (&pair, rhs) in &self.relations {
            let terms = rhs
                .terms()
                .map(|(w, c)| Ok((w.clone(), c.substitute(&scalar_ctx, &plan)?)))
                .collect::<Result<Vec<_>, CoeffError>>()?;
            relations.insert(pair, NCPoly::from_terms(self.n(), terms)?);
        }
        Ok(Presentation { names: self.names.clone(), decls: kept, ctx: new_ctx, relations })
    }

    /// Renders the presentation in canonical form: header, declarations,
    /// then one rewrite-form relation per line, largest pair first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("generators: ");
        out.push_str(&self.names.join(", "));
        out.push('\n');
        for d in &self.decls {
            out.push_str(if d.unit { "unit " } else { "param " });
            out.push_str(&d.name);
            out.push('\n');
        }
        for ((j, i), rhs) in self.relations() {
            out.push_str(&format!(
                "{}*{} = {}\n",
                self.names[(j - 1) as usize],
                self.names[(i - 1) as usize],
                rhs.render(&self.names)
            ));
        }
        out
    }

    /// Parses a standalone expression over this presentation's generators
    /// and parameters.
    ///
    /// The expression grammar is richer than the one for relation sides:
    /// parentheses may enclose full polynomial subexpressions, products
    /// multiply noncommutatively in the written order, and any factor takes
    /// an integer power (negative powers need an invertible constant base).
    pub fn parse_expr(&self, text: &str) -> Result<NCPoly, ParseError> {
        let toks = tokenize_line(1, text)?;
        if let Some(eq) = toks.iter().find(|t| t.kind == TokKind::Equals) {
            return Err(ParseError::new(eq.line, eq.col, "unexpected '=' in an expression"));
        }
        if toks.is_empty() {
            return Err(ParseError::new(1, 1, "empty expression"));
        }
        let mut parser = ExprParser::new(&toks, &self.names, self.ctx.as_ref());
        let poly = parser.parse_poly_expr(None)?;
        parser.expect_end()?;
        Ok(poly)
    }
}

/// Parses a rational literal: an optional minus sign, an integer, and an
/// optional `/denominator`.
pub fn parse_rational(text: &str) -> Result<Rat, ParseError> {
    let toks = tokenize_line(1, text)?;
    let end = text.chars().count() + 1;
    let err = |pos: usize, msg: &str| {
        let (line, col) = toks.get(pos).map(|t| (t.line, t.col)).unwrap_or((1, end));
        Err(ParseError::new(line, col, msg.to_string()))
    };
    let mut pos = 0;
    let negative = matches!(toks.first().map(|t| &t.kind), Some(TokKind::Minus));
    if negative {
        pos += 1;
    }
    let Some(TokKind::Number(numer)) = toks.get(pos).map(|t| &t.kind) else {
        return err(pos, "expected a rational like 2 or -5/16");
    };
    pos += 1;
    let numer = BigInt::from_str(numer).expect("digit runs parse");
    let denom = if matches!(toks.get(pos).map(|t| &t.kind), Some(TokKind::Slash)) {
        pos += 1;
        let Some(TokKind::Number(d)) = toks.get(pos).map(|t| &t.kind) else {
            return err(pos, "expected a denominator after '/'");
        };
        pos += 1;
        BigInt::from_str(d).expect("digit runs parse")
    } else {
        BigInt::from(1)
    };
    if pos != toks.len() {
        return err(pos, "trailing input after the rational");
    }
    if denom.is_zero() {
        return Err(ParseError::new(1, 1, "zero denominator"));
    }
    let value = Rat::new(numer, denom);
    Ok(if negative { -value } else { value })
}

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokKind {
    Ident(String),
    Number(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Equals,
    Comma,
    Colon,
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    line: usize,
    col: usize,
    end_col: usize,
}

fn tokenize_line(line: usize, text: &str) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = k + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            let word: String = chars[start..k].iter().collect();
            toks.push(Tok { kind: TokKind::Ident(word), line, col, end_col: k + 1 });
            continue;
        }
        if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let digits: String = chars[start..k].iter().collect();
            toks.push(Tok { kind: TokKind::Number(digits), line, col, end_col: k + 1 });
            continue;
        }
        let kind = match c {
            '+' => TokKind::Plus,
            '-' => TokKind::Minus,
            '*' => TokKind::Star,
            '/' => TokKind::Slash,
            '^' => TokKind::Caret,
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            '=' => TokKind::Equals,
            ',' => TokKind::Comma,
            ':' => TokKind::Colon,
            '.' => {
                return Err(ParseError::new(
                    line,
                    col,
                    "floating point is not accepted; write rationals as p/q",
                ));
            }
            other => {
                return Err(ParseError::new(line, col, format!("unexpected character '{other}'")));
            }
        };
        toks.push(Tok { kind, line, col, end_col: col + 1 });
        k += 1;
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Line parsers
// ---------------------------------------------------------------------------

/// Reserved line-leading words that cannot name a generator or parameter.
const RESERVED: [&str; 3] = ["generators", "unit", "param"];

fn parse_header(toks: &[Tok]) -> Result<Vec<String>, ParseError> {
    let first = &toks[0];
    if !matches!(&first.kind, TokKind::Ident(w) if w == "generators") {
        return Err(ParseError::new(
            first.line,
            first.col,
            "expected a 'generators:' header as the first content line",
        ));
    }
    let line = first.line;
    let end = toks.last().map(|t| t.end_col).unwrap_or(1);
    if !matches!(toks.get(1).map(|t| &t.kind), Some(TokKind::Colon)) {
        let (l, c) = toks.get(1).map(|t| (t.line, t.col)).unwrap_or((line, end));
        return Err(ParseError::new(l, c, "expected ':' after 'generators'"));
    }
    let mut names: Vec<String> = Vec::new();
    let mut pos = 2;
    loop {
        match toks.get(pos) {
            Some(Tok { kind: TokKind::Ident(name), line, col, .. }) => {
                if RESERVED.contains(&name.as_str()) {
                    return Err(ParseError::new(*line, *col, format!("'{name}' is a reserved word")));
                }
                if names.iter().any(|n| n == name) {
                    return Err(ParseError::new(
                        *line,
                        *col,
                        format!("duplicate generator name {name}"),
                    ));
                }
                names.push(name.clone());
            }
            Some(t) => return Err(ParseError::new(t.line, t.col, "expected a generator name")),
            None => return Err(ParseError::new(line, end, "expected a generator name")),
        }
        pos += 1;
        match toks.get(pos) {
            Some(Tok { kind: TokKind::Comma, .. }) => pos += 1,
            Some(t) => {
                return Err(ParseError::new(t.line, t.col, "expected ',' between generator names"));
            }
            None => break,
        }
    }
    if names.len() < 2 {
        return Err(ParseError::new(line, 1, "at least two generators are required"));
    }
    if names.len() > 255 {
        return Err(ParseError::new(line, 1, "at most 255 generators are supported"));
    }
    Ok(names)
}

fn parse_decl(toks: &[Tok], names: &[String], decls: &[ParamDecl]) -> Result<ParamDecl, ParseError> {
    let first = &toks[0];
    let unit = matches!(&first.kind, TokKind::Ident(w) if w == "unit");
    match toks.get(1) {
        Some(Tok { kind: TokKind::Ident(name), line, col, .. }) => {
            if RESERVED.contains(&name.as_str()) {
                return Err(ParseError::new(*line, *col, format!("'{name}' is a reserved word")));
            }
            if names.iter().any(|n| n == name) {
                return Err(ParseError::new(
                    *line,
                    *col,
                    format!("{name} is already a generator name"),
                ));
            }
            if decls.iter().any(|d| &d.name == name) {
                return Err(ParseError::new(
                    *line,
                    *col,
                    format!("duplicate parameter declaration for {name}"),
                ));
            }
            if let Some(extra) = toks.get(2) {
                return Err(ParseError::new(
                    extra.line,
                    extra.col,
                    "expected nothing after the parameter name",
                ));
            }
            Ok(ParamDecl::new(name.clone(), unit))
        }
        Some(t) => Err(ParseError::new(t.line, t.col, "expected a parameter name")),
        None => Err(ParseError::new(first.line, first.end_col, "expected a parameter name")),
    }
}

fn parse_relation(
    toks: &[Tok],
    names: &[String],
    ctx: Option<&Arc<ParamContext>>,
) -> Result<(u8, u8, NCPoly), ParseError> {
    let first = &toks[0];
    let Some(eq_pos) = toks.iter().position(|t| t.kind == TokKind::Equals) else {
        return Err(ParseError::new(
            first.line,
            first.col,
            "expected a relation of the form <left side> = <right side>",
        ));
    };
    if let Some(extra) = toks[eq_pos + 1..].iter().find(|t| t.kind == TokKind::Equals) {
        return Err(ParseError::new(extra.line, extra.col, "more than one '=' in a relation"));
    }
    let eq = &toks[eq_pos];
    if eq_pos == 0 {
        return Err(ParseError::new(eq.line, eq.col, "missing left side before '='"));
    }
    if eq_pos + 1 == toks.len() {
        return Err(ParseError::new(eq.line, eq.end_col, "missing right side after '='"));
    }

    let mut lhs_parser = ExprParser::new(&toks[..eq_pos], names, ctx);
    let lhs = lhs_parser.parse_expr()?;
    lhs_parser.expect_end()?;
    let mut rhs_parser = ExprParser::new(&toks[eq_pos + 1..], names, ctx);
    let rhs = rhs_parser.parse_expr()?;
    rhs_parser.expect_end()?;

    normalize_relation(first, names, &lhs, &rhs)
}

/// Solves a relation for its descending product, converting bracket form
/// into rewrite form.
fn normalize_relation(
    at: &Tok,
    names: &[String],
    lhs: &NCPoly,
    rhs: &NCPoly,
) -> Result<(u8, u8, NCPoly), ParseError> {
    let err = |msg: String| Err(ParseError::new(at.line, at.col, msg));
    let name = |g: u8| names[(g - 1) as usize].clone();

    let descending: Vec<(&Word, &Scalar)> = lhs
        .terms()
        .filter(|(w, _)| w.degree() == 2 && w.indices()[0] > w.indices()[1])
        .collect();
    match descending.len() {
        0 => {
            if lhs.num_terms() == 1 {
                let (w, c) = lhs.leading().expect("one term");
                if w.degree() == 2 && w.indices()[0] < w.indices()[1] && c.is_one() {
                    let (i, j) = (w.indices()[0], w.indices()[1]);
                    return err(format!(
                        "the left side {}*{} is ascending; write the relation for the \
                         descending product as {}*{} = ...",
                        name(i),
                        name(j),
                        name(j),
                        name(i)
                    ));
                }
            }
            err(format!(
                "the relation's left side must contain a descending product such as {}*{}",
                name(lhs.n().max(2)),
                name(1)
            ))
        }
        1 => {
            let (w, d) = descending[0];
            let (j, i) = (w.indices()[0], w.indices()[1]);
            let d_inv = match d.invert() {
                Ok(v) => v,
                Err(_) => {
                    return err(format!(
                        "the coefficient of {}*{} on the left, {}, is not invertible",
                        name(j),
                        name(i),
                        d
                    ));
                }
            };
            let lead = NCPoly::monomial(lhs.n(), w.clone(), d.clone()).expect("index in range");
            let rest = lhs.sub(&lead).expect("same arity");
            let moved = rhs.sub(&rest).expect("same arity");
            let rule_rhs = moved.scalar_mul(&d_inv).expect("same context");
            Ok((j, i, rule_rhs))
        }
        _ => err(
            "the relation's left side mentions more than one descending product".to_string(),
        ),
    }
}

// ---------------------------------------------------------------------------
// Expression parsing
// ---------------------------------------------------------------------------

/// The scalar value of a constant polynomial, `None` for anything with a
/// nonempty word.
fn constant_of(p: &NCPoly) -> Option<Scalar> {
    match p.num_terms() {
        0 => Some(Scalar::zero()),
        1 => {
            let (w, c) = p.leading().expect("one term");
            w.is_empty().then(|| c.clone())
        }
        _ => None,
    }
}

struct ExprParser<'a> {
    toks: &'a [Tok],
    pos: usize,
    names: &'a [String],
    ctx: Option<&'a Arc<ParamContext>>,
    line: usize,
    end_col: usize,
}

impl<'a> ExprParser<'a> {
    fn new(toks: &'a [Tok], names: &'a [String], ctx: Option<&'a Arc<ParamContext>>) -> Self {
        let line = toks.first().map(|t| t.line).unwrap_or(1);
        let end_col = toks.last().map(|t| t.end_col).unwrap_or(1);
        ExprParser { toks, pos: 0, names, ctx, line, end_col }
    }

    fn n(&self) -> u8 {
        self.names.len() as u8
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos)
    }

    fn advance(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self
            .peek()
            .map(|t| (t.line, t.col))
            .unwrap_or((self.line, self.end_col));
        Err(ParseError::new(line, col, msg))
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(Tok { kind: TokKind::RParen, .. }) => self.fail("unmatched ')'"),
            Some(_) => self.fail("expected '+' or '-' between terms"),
        }
    }

    /// Maps a scalar-arithmetic failure to a located error.
    fn lift<T>(&self, at: &Tok, r: Result<T, CoeffError>) -> Result<T, ParseError> {
        r.map_err(|e| ParseError::new(at.line, at.col, e.to_string()))
    }

    fn parse_expr(&mut self) -> Result<NCPoly, ParseError> {
        let mut acc = NCPoly::zero(self.n());
        let mut negative = match self.peek().map(|t| &t.kind) {
            Some(TokKind::Plus) => {
                self.pos += 1;
                false
            }
            Some(TokKind::Minus) => {
                self.pos += 1;
                true
            }
            _ => false,
        };
        loop {
            let term = self.parse_term()?;
            let term = if negative { term.neg() } else { term };
            acc = acc.add(&term).expect("same arity");
            match self.peek().map(|t| &t.kind) {
                Some(TokKind::Plus) => {
                    self.pos += 1;
                    negative = false;
                }
                Some(TokKind::Minus) => {
                    self.pos += 1;
                    negative = true;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<NCPoly, ParseError> {
        let mut scalar = Scalar::one();
        let mut word: Vec<u8> = Vec::new();
        let mut saw_word = false;
        'factors: loop {
            let Some(tok) = self.advance() else {
                return self.fail("expected a factor");
            };
            match &tok.kind {
                TokKind::Number(digits) => {
                    if saw_word {
                        return Err(ParseError::new(
                            tok.line,
                            tok.col,
                            "scalar factors must come before generators in a term",
                        ));
                    }
                    let mut value =
                        Scalar::from_rat(Rat::from_integer(BigInt::from_str(digits).expect("digits")));
                    if let Some(exp) = self.maybe_exponent()? {
                        value = self.lift(tok, value.pow(exp))?;
                    }
                    scalar = self.lift(tok, scalar.mul(&value))?;
                }
                TokKind::Ident(name) => {
                    if let Some(g) = self.generator_index(name) {
                        saw_word = true;
                        let exp = match self.maybe_exponent()? {
                            Some(e) if e < 1 => {
                                return Err(ParseError::new(
                                    tok.line,
                                    tok.col,
                                    "generator powers must be positive",
                                ));
                            }
                            Some(e) => e,
                            None => 1,
                        };
                        word.extend(std::iter::repeat_n(g, exp as usize));
                    } else {
                        let known = self.ctx.is_some_and(|c| c.index_of(name).is_some());
                        if !known {
                            return Err(ParseError::new(
                                tok.line,
                                tok.col,
                                format!("unknown symbol {name}"),
                            ));
                        }
                        if saw_word {
                            return Err(ParseError::new(
                                tok.line,
                                tok.col,
                                "scalar factors must come before generators in a term",
                            ));
                        }
                        let value = self.parameter_factor(tok, name)?;
                        scalar = self.lift(tok, scalar.mul(&value))?;
                    }
                }
                TokKind::LParen => {
                    if saw_word {
                        return Err(ParseError::new(
                            tok.line,
                            tok.col,
                            "scalar factors must come before generators in a term",
                        ));
                    }
                    let mut value = self.parse_scalar_parens(tok)?;
                    if let Some(exp) = self.maybe_exponent()? {
                        value = self.lift(tok, value.pow(exp))?;
                    }
                    scalar = self.lift(tok, scalar.mul(&value))?;
                }
                _ => {
                    return Err(ParseError::new(
                        tok.line,
                        tok.col,
                        "expected a number, name, or '('",
                    ));
                }
            }
            loop {
                match self.peek().map(|t| &t.kind) {
                    Some(TokKind::Star) => {
                        self.pos += 1;
                        continue 'factors;
                    }
                    Some(TokKind::Slash) => {
                        let slash = self.advance().expect("just peeked");
                        if saw_word {
                            return Err(ParseError::new(
                                slash.line,
                                slash.col,
                                "division applies to scalar factors only",
                            ));
                        }
                        let divisor = self.parse_scalar_factor()?;
                        let inv = self.lift(slash, divisor.invert())?;
                        scalar = self.lift(slash, scalar.mul(&inv))?;
                    }
                    _ => break 'factors,
                }
            }
        }
        Ok(NCPoly::monomial(self.n(), Word::from_indices(word), scalar).expect("index in range"))
    }

    /// A parameter reference with its optional exponent.
    fn parameter_factor(&mut self, at: &Tok, name: &str) -> Result<Scalar, ParseError> {
        let Some(ctx) = self.ctx else {
            return Err(ParseError::new(at.line, at.col, format!("unknown symbol {name}")));
        };
        let Some(idx) = ctx.index_of(name) else {
            return Err(ParseError::new(at.line, at.col, format!("unknown symbol {name}")));
        };
        let exp = self.maybe_exponent()?.unwrap_or(1);
        if exp < 0 && !ctx.is_unit(idx) {
            return Err(ParseError::new(
                at.line,
                at.col,
                format!(
                    "parameter {name} is not invertible; declare it with 'unit {name}' \
                     to allow negative powers"
                ),
            ));
        }
        self.lift(at, Scalar::param_pow(ctx, idx, exp))
    }

    /// A parenthesized scalar subexpression; the opening '(' is consumed.
    fn parse_scalar_parens(&mut self, open: &Tok) -> Result<Scalar, ParseError> {
        let value = self.parse_scalar_expr(open)?;
        match self.advance() {
            Some(Tok { kind: TokKind::RParen, .. }) => Ok(value),
            Some(t) => Err(ParseError::new(t.line, t.col, "expected ')'")),
            None => Err(ParseError::new(open.line, open.col, "missing ')' for this '('")),
        }
    }

    fn parse_scalar_expr(&mut self, open: &Tok) -> Result<Scalar, ParseError> {
        let mut acc = Scalar::zero();
        let mut negative = match self.peek().map(|t| &t.kind) {
            Some(TokKind::Plus) => {
                self.pos += 1;
                false
            }
            Some(TokKind::Minus) => {
                self.pos += 1;
                true
            }
            _ => false,
        };
        loop {
            let term = self.parse_scalar_term()?;
            let term = if negative { term.neg() } else { term };
            acc = self.lift(open, acc.add(&term))?;
            match self.peek().map(|t| &t.kind) {
                Some(TokKind::Plus) => {
                    self.pos += 1;
                    negative = false;
                }
                Some(TokKind::Minus) => {
                    self.pos += 1;
                    negative = true;
                }
                Some(TokKind::RParen) => break,
                Some(_) => return self.fail("expected '+', '-', or ')'"),
                None => {
                    return Err(ParseError::new(
                        open.line,
                        open.col,
                        "missing ')' for this '('",
                    ));
                }
            }
        }
        Ok(acc)
    }

    fn parse_scalar_term(&mut self) -> Result<Scalar, ParseError> {
        let mut acc = self.parse_scalar_factor()?;
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokKind::Star) => {
                    let star = self.advance().expect("just peeked");
                    let rhs = self.parse_scalar_factor()?;
                    acc = self.lift(star, acc.mul(&rhs))?;
                }
                Some(TokKind::Slash) => {
                    let slash = self.advance().expect("just peeked");
                    let rhs = self.parse_scalar_factor()?;
                    let inv = self.lift(slash, rhs.invert())?;
                    acc = self.lift(slash, acc.mul(&inv))?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_scalar_factor(&mut self) -> Result<Scalar, ParseError> {
        let Some(tok) = self.advance() else {
            return self.fail("expected a scalar factor");
        };
        match &tok.kind {
            TokKind::Number(digits) => {
                let mut value =
                    Scalar::from_rat(Rat::from_integer(BigInt::from_str(digits).expect("digits")));
                if let Some(exp) = self.maybe_exponent()? {
                    value = self.lift(tok, value.pow(exp))?;
                }
                Ok(value)
            }
            TokKind::Ident(name) => {
                if self.generator_index(name).is_some() {
                    return Err(ParseError::new(
                        tok.line,
                        tok.col,
                        format!("generator {name} cannot appear inside a scalar factor"),
                    ));
                }
                self.parameter_factor(tok, name)
            }
            TokKind::LParen => {
                let mut value = self.parse_scalar_parens(tok)?;
                if let Some(exp) = self.maybe_exponent()? {
                    value = self.lift(tok, value.pow(exp))?;
                }
                Ok(value)
            }
            _ => Err(ParseError::new(tok.line, tok.col, "expected a number, parameter, or '('")),
        }
    }

    /// Full polynomial expression: sums of noncommutative products.
    ///
    /// With `open` set to the opening parenthesis, stops in front of the
    /// matching `)` (not consumed); at top level (`None`), stops at the end
    /// of the tokens.
    fn parse_poly_expr(&mut self, open: Option<&Tok>) -> Result<NCPoly, ParseError> {
        let mut acc = NCPoly::zero(self.n());
        let mut negative = match self.peek().map(|t| &t.kind) {
            Some(TokKind::Plus) => {
                self.pos += 1;
                false
            }
            Some(TokKind::Minus) => {
                self.pos += 1;
                true
            }
            _ => false,
        };
        loop {
            let prod = self.parse_poly_product()?;
            let prod = if negative { prod.neg() } else { prod };
            acc = acc.add(&prod).expect("same arity");
            match self.peek().map(|t| &t.kind) {
                Some(TokKind::Plus) => {
                    self.pos += 1;
                    negative = false;
                }
                Some(TokKind::Minus) => {
                    self.pos += 1;
                    negative = true;
                }
                Some(TokKind::RParen) if open.is_some() => break,
                Some(TokKind::RParen) => return self.fail("unmatched ')'"),
                Some(_) => return self.fail("expected '+' or '-' between terms"),
                None => match open {
                    Some(open) => {
                        return Err(ParseError::new(
                            open.line,
                            open.col,
                            "missing ')' for this '('",
                        ));
                    }
                    None => break,
                },
            }
        }
        Ok(acc)
    }

    fn parse_poly_product(&mut self) -> Result<NCPoly, ParseError> {
        let mut acc = self.parse_poly_atom()?;
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokKind::Star) => {
                    let star = self.advance().expect("just peeked");
                    let rhs = self.parse_poly_atom()?;
                    acc = self.checked_mul(star, &acc, &rhs)?;
                }
                Some(TokKind::Slash) => {
                    let slash = self.advance().expect("just peeked");
                    let rhs = self.parse_poly_atom()?;
                    let Some(c) = constant_of(&rhs) else {
                        return Err(ParseError::new(
                            slash.line,
                            slash.col,
                            "division needs a scalar divisor",
                        ));
                    };
                    let inv = self.lift(slash, c.invert())?;
                    acc = acc.scalar_mul(&inv).expect("same context");
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_poly_atom(&mut self) -> Result<NCPoly, ParseError> {
        let Some(tok) = self.advance() else {
            return self.fail("expected a factor");
        };
        let base = match &tok.kind {
            TokKind::Number(digits) => {
                let value = Scalar::from_rat(Rat::from_integer(
                    BigInt::from_str(digits).expect("digits"),
                ));
                NCPoly::monomial(self.n(), Word::empty(), value).expect("empty word")
            }
            TokKind::Ident(name) => {
                if let Some(g) = self.generator_index(name) {
                    NCPoly::monomial(self.n(), Word::gen(g), Scalar::one())
                        .expect("index in range")
                } else {
                    let Some(ctx) = self.ctx else {
                        return Err(ParseError::new(
                            tok.line,
                            tok.col,
                            format!("unknown symbol {name}"),
                        ));
                    };
                    let Some(idx) = ctx.index_of(name) else {
                        return Err(ParseError::new(
                            tok.line,
                            tok.col,
                            format!("unknown symbol {name}"),
                        ));
                    };
                    NCPoly::monomial(self.n(), Word::empty(), Scalar::param(ctx, idx))
                        .expect("empty word")
                }
            }
            TokKind::LParen => {
                let inner = self.parse_poly_expr(Some(tok))?;
                match self.advance() {
                    Some(Tok { kind: TokKind::RParen, .. }) => inner,
                    _ => {
                        return Err(ParseError::new(
                            tok.line,
                            tok.col,
                            "missing ')' for this '('",
                        ));
                    }
                }
            }
            _ => {
                return Err(ParseError::new(tok.line, tok.col, "expected a number, name, or '('"));
            }
        };
        match self.maybe_exponent()? {
            Some(exp) => self.poly_pow(tok, base, exp),
            None => Ok(base),
        }
    }

    fn poly_pow(&self, at: &Tok, base: NCPoly, exp: i32) -> Result<NCPoly, ParseError> {
        if exp < 0 {
            let Some(c) = constant_of(&base) else {
                return Err(ParseError::new(
                    at.line,
                    at.col,
                    "negative powers need an invertible constant base",
                ));
            };
            let value = self.lift(at, c.pow(exp))?;
            return Ok(NCPoly::monomial(self.n(), Word::empty(), value).expect("empty word"));
        }
        let mut acc =
            NCPoly::monomial(self.n(), Word::empty(), Scalar::one()).expect("empty word");
        for _ in 0..exp {
            acc = self.checked_mul(at, &acc, &base)?;
        }
        Ok(acc)
    }

    /// Polynomial product with a term-count budget so runaway expressions
    /// fail fast instead of exhausting memory.
    fn checked_mul(&self, at: &Tok, a: &NCPoly, b: &NCPoly) -> Result<NCPoly, ParseError> {
        if a.num_terms().saturating_mul(b.num_terms()) > 200_000 {
            return Err(ParseError::new(at.line, at.col, "expression is too large"));
        }
        Ok(a.mul(b).expect("same arity"))
    }

    /// Consumes `^` and a signed integer exponent when present.
    fn maybe_exponent(&mut self) -> Result<Option<i32>, ParseError> {
        if !matches!(self.peek().map(|t| &t.kind), Some(TokKind::Caret)) {
            return Ok(None);
        }
        self.pos += 1;
        let negative = if matches!(self.peek().map(|t| &t.kind), Some(TokKind::Minus)) {
            self.pos += 1;
            true
        } else {
            false
        };
        let Some(tok) = self.advance() else {
            return self.fail("expected an integer exponent after '^'");
        };
        let TokKind::Number(digits) = &tok.kind else {
            return Err(ParseError::new(
                tok.line,
                tok.col,
                "expected an integer exponent after '^'",
            ));
        };
        let magnitude: i64 = digits.parse().unwrap_or(MAX_EXPONENT + 1);
        if magnitude > MAX_EXPONENT {
            return Err(ParseError::new(
                tok.line,
                tok.col,
                format!("exponent exceeds the supported range (at most {MAX_EXPONENT})"),
            ));
        }
        let exp = magnitude as i32;
        Ok(Some(if negative { -exp } else { exp }))
    }

    /// 1-based generator index for a name, when it names a generator.
    fn generator_index(&self, name: &str) -> Option<u8> {
        self.names.iter().position(|n| n == name).map(|k| (k + 1) as u8)
    }
}
