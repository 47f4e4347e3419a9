//! Sparse exact multivariate polynomials over ℚ with role-tagged
//! indeterminates.
//!
//! Every polynomial carries its ring context (an ordered indeterminate
//! list). The canonical order is graded lexicographic with the `Partial`
//! indeterminate first, then λ-variables in declaration order, then
//! parameters; display and equality both use it.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Rational = BigRational;

/// Parse a rational from `p` or `p/q` form.
pub fn rational(text: &str) -> Option<Rational> {
    match text.split_once('/') {
        None => BigInt::from_str(text.trim()).ok().map(Rational::from),
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Partial,
    LambdaVar,
    Parameter,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Indeterminate {
    pub name: String,
    pub role: Role,
}

/// Ordered indeterminate list shared by all polynomials of one context.
#[derive(Debug, PartialEq, Eq)]
pub struct Ring {
    vars: Vec<Indeterminate>,
}

impl Ring {
    /// Standard ring: `del`, the given λ-variables, then parameters.
    pub fn new(lambda_vars: &[&str], params: &[&str]) -> Arc<Ring> {
        let mut vars = vec![Indeterminate {
            name: "del".into(),
            role: Role::Partial,
        }];
        for v in lambda_vars {
            vars.push(Indeterminate {
                name: (*v).into(),
                role: Role::LambdaVar,
            });
        }
        for p in params {
            vars.push(Indeterminate {
                name: (*p).into(),
                role: Role::Parameter,
            });
        }
        Ring::custom(vars)
    }

    /// Ring with an explicit indeterminate list.
    pub fn custom(vars: Vec<Indeterminate>) -> Arc<Ring> {
        let names: Vec<_> = vars.iter().map(|v| v.name.as_str()).collect();
        let mut dedup = names.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), names.len(), "indeterminate names must be unique");
        Arc::new(Ring { vars })
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Indeterminate] {
        &self.vars
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.vars[idx].name
    }

    pub fn role(&self, idx: usize) -> Role {
        self.vars[idx].role
    }

    fn describe(&self) -> String {
        self.vars
            .iter()
            .map(|v| v.name.clone())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Exponent vector with graded-lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Monomial {
        Monomial(vec![0; arity])
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in canonical form: no zero coefficients stored.
#[derive(Clone, Debug)]
pub struct Polynomial {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(ring: &Arc<Ring>) -> Polynomial {
        Polynomial {
            ring: Arc::clone(ring),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring>, value: Rational) -> Polynomial {
        let mut p = Polynomial::zero(ring);
        if !value.is_zero() {
            p.terms.insert(Monomial::one(ring.arity()), value);
        }
        p
    }

    pub fn one(ring: &Arc<Ring>) -> Polynomial {
        Polynomial::constant(ring, Rational::one())
    }

    pub fn var(ring: &Arc<Ring>, name: &str) -> crate::Result<Polynomial> {
        let idx = ring
            .index_of(name)
            .ok_or_else(|| crate::Error::UnknownIndeterminate(name.into()))?;
        let mut m = Monomial::one(ring.arity());
        m.0[idx] = 1;
        let mut p = Polynomial::zero(ring);
        p.terms.insert(m, Rational::one());
        Ok(p)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of an exponent vector (zero when absent).
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Degree in one indeterminate; `None` for the zero polynomial.
    pub fn degree_in(&self, idx: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[idx]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// True if the given indeterminate occurs with a positive exponent.
    pub fn uses(&self, idx: usize) -> bool {
        self.terms.keys().any(|m| m.0[idx] > 0)
    }

    fn same_ring(&self, other: &Polynomial) -> crate::Result<()> {
        if *self.ring == *other.ring {
            Ok(())
        } else {
            Err(crate::Error::RingMismatch(
                self.ring.describe(),
                other.ring.describe(),
            ))
        }
    }

    fn insert(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> crate::Result<Polynomial> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> crate::Result<Polynomial> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = Polynomial::zero(&self.ring);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> crate::Result<Polynomial> {
        self.same_ring(other)?;
        let mut out = Polynomial::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        let mut out = Polynomial::zero(&self.ring);
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one(&self.ring);
        for _ in 0..e {
            out = out.mul(self).expect("same ring");
        }
        out
    }

    /// Simultaneous substitution; unbound indeterminates pass through.
    pub fn substitute(&self, bindings: &[(usize, Polynomial)]) -> crate::Result<Polynomial> {
        for (_, p) in bindings {
            self.same_ring(p)?;
        }
        let arity = self.ring.arity();
        // images[i] = None means the variable passes through
        let mut images: Vec<Option<&Polynomial>> = vec![None; arity];
        for (idx, p) in bindings {
            images[*idx] = Some(p);
        }
        // cache powers per variable
        let mut powers: Vec<Vec<Polynomial>> = vec![Vec::new(); arity];
        let mut out = Polynomial::zero(&self.ring);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(&self.ring, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match images[i] {
                    None => {
                        let mut mv = Monomial::one(arity);
                        mv.0[i] = e;
                        let mut shifted = Polynomial::zero(&self.ring);
                        for (tm, tc) in &term.terms {
                            shifted.terms.insert(tm.mul(&mv), tc.clone());
                        }
                        term = shifted;
                    }
                    Some(img) => {
                        let cache = &mut powers[i];
                        if cache.is_empty() {
                            cache.push(Polynomial::one(&self.ring));
                        }
                        while cache.len() <= e as usize {
                            let next = cache.last().unwrap().mul(img)?;
                            cache.push(next);
                        }
                        term = term.mul(&cache[e as usize])?;
                    }
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    pub fn substitute_by_name(
        &self,
        bindings: &[(&str, Polynomial)],
    ) -> crate::Result<Polynomial> {
        let mut by_index = Vec::with_capacity(bindings.len());
        for (name, p) in bindings {
            let idx = self
                .ring
                .index_of(name)
                .ok_or_else(|| crate::Error::UnknownIndeterminate((*name).into()))?;
            by_index.push((idx, p.clone()));
        }
        self.substitute(&by_index)
    }

    /// Split `self` as a polynomial in the chosen indeterminates with
    /// coefficients in the remaining ones. Keys are exponent vectors over
    /// `vars` (in the given order); coefficients are nonzero.
    pub fn coefficients_in(&self, vars: &[usize]) -> BTreeMap<Monomial, Polynomial> {
        let arity = self.ring.arity();
        let mut out: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key = Monomial(vars.iter().map(|&v| m.0[v]).collect());
            let mut rest = m.clone();
            for &v in vars {
                rest.0[v] = 0;
            }
            let entry = out
                .entry(key)
                .or_insert_with(|| Polynomial::zero(&self.ring));
            entry.insert(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        let _ = arity;
        out
    }

    /// Division with remainder by a divisor regarded as univariate in `var`.
    /// Requires the divisor's leading coefficient in `var` to be a nonzero
    /// rational constant. Returns (quotient, remainder).
    pub fn divmod_in(
        &self,
        divisor: &Polynomial,
        var: usize,
    ) -> crate::Result<(Polynomial, Polynomial)> {
        self.same_ring(divisor)?;
        let d = divisor
            .degree_in(var)
            .ok_or_else(|| crate::Error::Precondition("division by zero polynomial".into()))?;
        // leading coefficient of divisor in `var`
        let lead = divisor.coefficients_in(&[var]);
        let lead_key = Monomial(vec![d]);
        let lead_poly = lead
            .get(&lead_key)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(&self.ring));
        if lead_poly.num_terms() != 1 || !lead_poly.terms.keys().next().unwrap().is_one() {
            return Err(crate::Error::Precondition(
                "divisor leading coefficient must be a rational constant".into(),
            ));
        }
        let lc = lead_poly.terms.values().next().unwrap().clone();
        let mut rem = self.clone();
        let mut quo = Polynomial::zero(&self.ring);
        loop {
            let rd = match rem.degree_in(var) {
                None => break,
                Some(rd) => rd,
            };
            if rd < d {
                break;
            }
            // extract the leading part of rem in `var`
            let mut lead_terms = Polynomial::zero(&self.ring);
            for (m, c) in &rem.terms {
                if m.0[var] == rd {
                    let mut m2 = m.clone();
                    m2.0[var] = rd - d;
                    lead_terms.insert(m2, c / &lc);
                }
            }
            quo = quo.add(&lead_terms)?;
            rem = rem.sub(&lead_terms.mul(divisor)?)?;
            if let Some(nrd) = rem.degree_in(var) {
                if nrd >= rd {
                    // no progress: the leading terms did not cancel cleanly
                    return Err(crate::Error::Precondition(
                        "division did not reduce the degree".into(),
                    ));
                }
            }
        }
        Ok((quo, rem))
    }

    /// Re-express this polynomial in another ring, matching indeterminates
    /// by name. Fails when a used indeterminate is absent from the target.
    pub fn into_ring(&self, target: &Arc<Ring>) -> crate::Result<Polynomial> {
        if **target == *self.ring {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.ring.arity());
        for v in self.ring.vars() {
            map.push(target.index_of(&v.name));
        }
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut m2 = Monomial::one(target.arity());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[i] {
                    Some(t) => m2.0[t] += e,
                    None => {
                        return Err(crate::Error::UnknownIndeterminate(
                            self.ring.name(i).into(),
                        ))
                    }
                }
            }
            out.insert(m2, c.clone());
        }
        Ok(out)
    }

    /// Parse an expression in the external text grammar.
    pub fn parse(text: &str, ring: &Arc<Ring>) -> crate::Result<Polynomial> {
        Parser::new(text, ring).parse()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(format_rational(&abs));
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if e == 1 {
                    factors.push(self.ring.name(i).to_string());
                } else {
                    factors.push(format!("{}^{}", self.ring.name(i), e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// Expression parser
//
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' uint)?
//   atom   := rational | ident | '(' expr ')'
// ---------------------------------------------------------------------------

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    ring: Arc<Ring>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, ring: &Arc<Ring>) -> Parser<'a> {
        Parser {
            text,
            bytes: text.as_bytes(),
            pos: 0,
            ring: Arc::clone(ring),
        }
    }

    fn parse(mut self) -> crate::Result<Polynomial> {
        let p = self.expr()?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(p)
    }

    fn err(&self, msg: &str) -> crate::Error {
        crate::Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> crate::Result<Polynomial> {
        let mut negate = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> crate::Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> crate::Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == start {
                return Err(self.err("expected an unsigned integer exponent"));
            }
            let e: u32 = self.text[start..self.pos]
                .parse()
                .map_err(|_| crate::Error::ExponentOverflow(start))?;
            if e > 10_000 {
                return Err(crate::Error::ExponentOverflow(start));
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> crate::Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let numer = BigInt::from_str(&self.text[start..self.pos]).unwrap();
                let mut value = Rational::from(numer);
                // optional '/ posint' — only when directly followed by digits
                let save = self.pos;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let dstart = self.pos;
                    while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if self.pos == dstart {
                        self.pos = save;
                    } else {
                        let denom = BigInt::from_str(&self.text[dstart..self.pos]).unwrap();
                        if denom.is_zero() {
                            return Err(self.err("zero denominator"));
                        }
                        value = Rational::new(value.numer().clone(), denom);
                    }
                }
                Ok(Polynomial::constant(&self.ring, value))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = &self.text[start..self.pos];
                Polynomial::var(&self.ring, name).map_err(|_| crate::Error::Syntax {
                    pos: start,
                    msg: format!("unknown identifier `{name}`"),
                })
            }
            _ => Err(self.err("expected a rational, identifier or `(`")),
        }
    }
}
