//! Exact multivariate polynomials with rational coefficients, their
//! reductions to prime fields, and the textual input grammar.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Q;
use crate::error::{Error, Result};
use crate::geometry::{Face, NewtonPolyhedron};

/// Exponent vector `m` of a monomial `x^m`.
pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, Q>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exp: Exponent, c: Q) -> Self {
        let nvars = exp.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { nvars, terms }
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        let mut exp = vec![0; nvars];
        exp[index] = 1;
        Self::monomial(exp, Q::one())
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, collecting
    /// repeated exponents and dropping zero coefficients.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Q)>,
    {
        let mut out = Self::zero(nvars);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: exp.len() });
            }
            out.add_term(exp, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, exp: Exponent, c: Q) {
        let entry = self.terms.entry(exp).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &[u32]) -> Q {
        self.terms.get(exp).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn support(&self) -> BTreeSet<Exponent> {
        self.terms.keys().cloned().collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, Q::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Keeps only the terms whose exponent satisfies `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&[u32]) -> bool) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// `f_tau`: the sum of the terms whose exponents lie on the face.
    pub fn face_restriction(&self, poly: &NewtonPolyhedron, face: &Face) -> Result<Self> {
        if poly.nvars() != self.nvars {
            return Err(Error::DimensionMismatch { expected: poly.nvars(), found: self.nvars });
        }
        Ok(self.filter_terms(|m| poly.face_contains(face, m)))
    }

    /// Reduction of every coefficient modulo `p`.
    pub fn reduce_mod_p(&self, p: u64) -> Result<PrimeFieldPolynomial> {
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let bp = BigInt::from(p);
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let den = c.denom().mod_floor(&bp);
            if den.is_zero() {
                return Err(Error::DenominatorDivisible { denominator: c.denom().to_string(), p });
            }
            let num = c.numer().mod_floor(&bp).to_u64().expect("residue fits");
            let den = den.to_u64().expect("residue fits");
            let r = mulmod(num, invmod(den, p), p);
            if r != 0 {
                terms.insert(e.clone(), r);
            }
        }
        Ok(PrimeFieldPolynomial { p, nvars: self.nvars, terms })
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn to_text(&self, vars: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        // highest degree first reads more naturally
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .zip(vars)
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            if mono.is_empty() {
                write!(out, "{abs}").unwrap();
            } else {
                if !abs.is_one() {
                    write!(out, "{abs}*").unwrap();
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

/// An ordered list of polynomial components `(f_1, ..., f_l)` with `f(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mapping {
    vars: Vec<String>,
    components: Vec<Polynomial>,
}

impl Mapping {
    pub fn new(vars: Vec<String>, components: Vec<Polynomial>) -> Result<Self> {
        validate_vars(&vars)?;
        if components.is_empty() {
            return Err(Error::InvalidMapping("no components".into()));
        }
        for f in &components {
            if f.nvars() != vars.len() {
                return Err(Error::DimensionMismatch { expected: vars.len(), found: f.nvars() });
            }
            if !f.constant_term().is_zero() {
                return Err(Error::InvalidMapping("component with nonzero constant term".into()));
            }
        }
        if components.iter().all(Polynomial::is_zero) {
            return Err(Error::InvalidMapping("all components are zero".into()));
        }
        Ok(Self { vars, components })
    }

    /// Parses `;`-separated components over the given variable names.
    pub fn parse(text: &str, vars: &[String]) -> Result<Self> {
        let mut components = vec![];
        let mut offset = 0;
        for piece in text.split(';') {
            let f = parse_polynomial(piece, vars).map_err(|e| shift_position(e, offset))?;
            components.push(f);
            offset += piece.len() + 1;
        }
        Self::new(vars.to_vec(), components)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Number of components `l`.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    /// Union of the component supports.
    pub fn support(&self) -> BTreeSet<Exponent> {
        self.components.iter().flat_map(|f| f.support()).collect()
    }

    pub fn to_text(&self) -> String {
        self.components
            .iter()
            .map(|f| f.to_text(&self.vars))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn shift_position(e: Error, offset: usize) -> Error {
    match e {
        Error::Syntax { position, message } => Error::Syntax { position: position + offset, message },
        Error::UnknownVariable { name, position } => {
            Error::UnknownVariable { name, position: position + offset }
        }
        Error::NegativeExponent { position } => Error::NegativeExponent { position: position + offset },
        other => other,
    }
}

pub fn validate_vars(vars: &[String]) -> Result<()> {
    if vars.is_empty() {
        return Err(Error::Variables("no variables".into()));
    }
    let mut seen = BTreeSet::new();
    for v in vars {
        let mut chars = v.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(Error::Variables(format!("invalid name `{v}`")));
        }
        if !seen.insert(v.as_str()) {
            return Err(Error::Variables(format!("duplicate name `{v}`")));
        }
    }
    Ok(())
}

/// Splits a comma separated variable list such as `x,y,z`.
pub fn parse_vars(list: &str) -> Result<Vec<String>> {
    let vars: Vec<String> = list.split(',').map(|s| s.trim().to_string()).collect();
    validate_vars(&vars)?;
    Ok(vars)
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(Q),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = vec![];
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Token::Plus)),
            '-' => out.push((start, Token::Minus)),
            '*' => out.push((start, Token::Star)),
            '/' => out.push((start, Token::Slash)),
            '^' => out.push((start, Token::Caret)),
            '(' => out.push((start, Token::LParen)),
            ')' => out.push((start, Token::RParen)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let num: BigInt = text[start..i].parse().expect("digits");
                let mut value = Q::from_integer(num);
                if i < bytes.len() && bytes[i] == b'/' {
                    let ds = i + 1;
                    let mut j = ds;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == ds {
                        return Err(Error::Syntax { position: i, message: "expected denominator".into() });
                    }
                    let den: BigInt = text[ds..j].parse().expect("digits");
                    if den.is_zero() {
                        return Err(Error::Syntax { position: ds, message: "zero denominator".into() });
                    }
                    value /= Q::from_integer(den);
                    i = j;
                }
                out.push((start, Token::Number(value)));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(Error::Syntax { position: start, message: format!("unexpected character `{other}`") })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    vars: &'a [String],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn syntax<T>(&self, message: &str) -> Result<T> {
        Err(Error::Syntax { position: self.position(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let at = self.position();
                    let d = self.unary()?;
                    let c = d.constant_term();
                    if d.terms().len() != 1 || c.is_zero() {
                        return Err(Error::Syntax { position: at, message: "can only divide by a nonzero constant".into() });
                    }
                    acc = acc.mul(&Polynomial::constant(self.vars.len(), c.recip()));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            let at = self.position();
            let negative = matches!(self.peek(), Some(Token::Minus));
            if negative {
                return Err(Error::NegativeExponent { position: at });
            }
            match self.peek().cloned() {
                Some(Token::Number(k)) if k.is_integer() => {
                    self.pos += 1;
                    let k = k.to_integer().to_u32().ok_or(Error::Syntax {
                        position: at,
                        message: "exponent too large".into(),
                    })?;
                    Ok(base.pow(k))
                }
                _ => self.syntax("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let n = self.vars.len();
        let at = self.position();
        match self.peek().cloned() {
            Some(Token::Number(c)) => {
                self.pos += 1;
                Ok(Polynomial::constant(n, c))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or(Error::UnknownVariable { name, position: at })?;
                Ok(Polynomial::variable(n, idx))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return self.syntax("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => self.syntax("expected a number, variable or `(`"),
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parses a single polynomial over the ordered variable list.
pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial> {
    validate_vars(vars)?;
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0, vars, end: text.len() };
    let f = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return parser.syntax("expected an operator");
    }
    Ok(f)
}

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// A polynomial over the prime field `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFieldPolynomial {
    p: u64,
    nvars: usize,
    terms: BTreeMap<Exponent, u64>,
}

impl PrimeFieldPolynomial {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, u64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, z: &[u64]) -> u64 {
        let p = self.p;
        self.terms.iter().fold(0, |acc, (e, c)| {
            let mono = e
                .iter()
                .zip(z)
                .fold(*c, |m, (&k, &x)| mulmod(m, powmod(x, k as u64, p), p));
            (acc + mono) % p
        })
    }

    /// Formal partial derivative with respect to variable `j`.
    pub fn partial(&self, j: usize) -> Self {
        let p = self.p;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let r = mulmod(*c, e[j] as u64 % p, p);
            if r != 0 {
                let mut e2 = e.clone();
                e2[j] -= 1;
                terms.insert(e2, r);
            }
        }
        Self { p, nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.p;
        let mut terms: BTreeMap<Exponent, u64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let v = terms.entry(e).or_insert(0);
                *v = (*v + mulmod(*ca, *cb, p)) % p;
            }
        }
        terms.retain(|_, v| *v != 0);
        Self { p, nvars: self.nvars, terms }
    }
}

/// Rank over `F_p` of a matrix with entries already reduced mod `p`.
#[allow(clippy::needless_range_loop)]
pub fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = invmod(m[rank][col], p);
        for c in 0..cols {
            m[rank][c] = mulmod(m[rank][c], inv, p);
        }
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..cols {
                    let sub = mulmod(f, m[rank][c], p);
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Jacobian matrix `[d g_i / d x_j]` of a system, precomputed for repeated
/// evaluation on torus points.
#[derive(Clone, Debug)]
pub struct Jacobian {
    p: u64,
    partials: Vec<Vec<PrimeFieldPolynomial>>,
}

impl Jacobian {
    pub fn new(system: &[PrimeFieldPolynomial]) -> Self {
        let p = system.first().map_or(2, |g| g.p);
        let n = system.first().map_or(0, |g| g.nvars);
        let partials = system
            .iter()
            .map(|g| (0..n).map(|j| g.partial(j)).collect())
            .collect();
        Self { p, partials }
    }

    pub fn rank_at(&self, z: &[u64]) -> usize {
        let m = self
            .partials
            .iter()
            .map(|row| row.iter().map(|d| d.eval(z)).collect())
            .collect();
        rank_mod_p(m, self.p)
    }
}

/// Rank over `F_p` of the Jacobian of `system` at a torus point `z`.
pub fn jacobian_rank_at(system: &[PrimeFieldPolynomial], z: &[u64]) -> Result<usize> {
    let Some(first) = system.first() else {
        return Ok(0);
    };
    let p = first.p;
    for g in system {
        if g.p != p {
            return Err(Error::InvalidMapping("components reduced modulo different primes".into()));
        }
        if g.nvars != z.len() {
            return Err(Error::DimensionMismatch { expected: g.nvars, found: z.len() });
        }
    }
    if let Some(index) = z.iter().position(|&x| x % p == 0) {
        return Err(Error::ZeroCoordinate { index, p });
    }
    let z: Vec<u64> = z.iter().map(|x| x % p).collect();
    Ok(Jacobian::new(system).rank_at(&z))
}
