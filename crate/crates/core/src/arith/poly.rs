//! Sparse multivariate polynomials over F_p with a canonical text form.
//!
//! A [`Ring`] fixes the prime, the ordered coordinate names and an optional
//! parameter `t`. The parameter is an ordinary commuting variable that no
//! derivation acts on; it always sits after the coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::fp::Prime;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    prime: Prime,
    names: Vec<String>,
    has_param: bool,
}

impl Ring {
    pub fn new<S: AsRef<str>>(prime: Prime, coords: &[S], param: Option<&str>) -> Arc<Ring> {
        let mut names: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        if let Some(t) = param {
            names.push(t.to_string());
        }
        Arc::new(Ring { prime, names, has_param: param.is_some() })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn p(&self) -> u64 {
        self.prime.get()
    }

    /// Total number of variables, parameter included.
    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    /// Number of coordinates, i.e. variables that derivations act on.
    pub fn ncoords(&self) -> usize {
        self.names.len() - usize::from(self.has_param)
    }

    pub fn param(&self) -> Option<usize> {
        self.has_param.then(|| self.names.len() - 1)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn coord_names(&self) -> &[String] {
        &self.names[..self.ncoords()]
    }

    pub fn param_name(&self) -> Option<&str> {
        self.param().map(|i| self.names[i].as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The same coordinates with a parameter appended (or `self` if present).
    pub fn with_param(self: &Arc<Self>, name: &str) -> Arc<Ring> {
        if self.has_param {
            return self.clone();
        }
        Ring::new(self.prime, self.coord_names(), Some(name))
    }

    /// The same coordinates without the parameter.
    pub fn without_param(self: &Arc<Self>) -> Arc<Ring> {
        if !self.has_param {
            return self.clone();
        }
        Ring::new(self.prime, self.coord_names(), None)
    }
}

pub(crate) fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A dense exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn zero(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Monomial(v)
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        Monomial(v)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn add(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` if every entry stays nonnegative.
    pub fn checked_sub(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn with(&self, i: usize, e: u32) -> Monomial {
        let mut v = self.0.clone();
        v[i] = e;
        Monomial(v)
    }

    pub fn bump(&self, i: usize) -> Monomial {
        let mut v = self.0.clone();
        v[i] += 1;
        Monomial(v)
    }

    pub fn scale(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * k).collect())
    }

    /// All multi-indices of length `n` with total degree at most `max_degree`, ascending.
    pub fn all_up_to(n: usize, max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == cur.len() {
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        rec(0, max_degree, &mut cur, &mut out);
        out.sort();
        out
    }

    /// All `k` with `k <= self` entrywise.
    pub fn divisors(&self) -> Vec<Monomial> {
        let mut out = vec![Vec::with_capacity(self.0.len())];
        for &e in &self.0 {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..=e).map(move |j| {
                        let mut w = v.clone();
                        w.push(j);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(Monomial).collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial over F_p; no zero coefficients are stored.
#[derive(Clone, Debug)]
pub struct ModPoly {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, u64>,
}

impl PartialEq for ModPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for ModPoly {}

impl ModPoly {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        ModPoly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<Ring>, c: i64) -> Self {
        Self::monomial(ring, Monomial::zero(ring.nvars()), ring.prime().reduce_signed(c))
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, 1)
    }

    pub fn var(ring: &Arc<Ring>, i: usize) -> Self {
        Self::monomial(ring, Monomial::unit(ring.nvars(), i), 1)
    }

    /// The parameter `t`; panics if the ring has none.
    pub fn param(ring: &Arc<Ring>) -> Self {
        Self::var(ring, ring.param().expect("ring has no parameter"))
    }

    pub fn monomial(ring: &Arc<Ring>, m: Monomial, c: u64) -> Self {
        assert_eq!(m.len(), ring.nvars(), "exponent arity");
        let c = ring.prime().reduce(c);
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        ModPoly { ring: ring.clone(), terms }
    }

    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (Monomial, u64)>) -> Self {
        let mut out = ModPoly::zero(ring);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn prime(&self) -> Prime {
        self.ring.prime()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coeff(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// `Some(c)` when the polynomial is the constant `c` (zero included).
    pub fn constant_value(&self) -> Option<u64> {
        match self.terms.len() {
            0 => Some(0),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_zero().then_some(*c)
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.get(var)).max()
    }

    /// Total degree counting only coordinates.
    pub fn coord_degree(&self) -> Option<u32> {
        let n = self.ring.ncoords();
        self.terms.keys().map(|m| m.exps()[..n].iter().sum()).max()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: u64) {
        let p = self.ring.prime();
        let c = p.reduce(c);
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = p.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_ring(&self, other: &ModPoly) {
        assert!(same_ring(&self.ring, &other.ring), "polynomials from different rings");
    }

    pub fn add(&self, other: &ModPoly) -> ModPoly {
        self.check_ring(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &ModPoly) -> ModPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ModPoly {
        let p = self.prime();
        ModPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), p.neg(*c))).collect(),
        }
    }

    pub fn scale(&self, c: u64) -> ModPoly {
        let p = self.prime();
        let c = p.reduce(c);
        if c == 0 {
            return ModPoly::zero(&self.ring);
        }
        ModPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), p.mul(*a, c))).collect(),
        }
    }

    pub fn mul(&self, other: &ModPoly) -> ModPoly {
        self.check_ring(other);
        let p = self.prime();
        let mut out = ModPoly::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.add(mb), p.mul(*ca, *cb));
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: u64) -> ModPoly {
        let p = self.prime();
        ModPoly::from_terms(
            &self.ring,
            self.terms.iter().map(|(a, ca)| (a.add(m), p.mul(*ca, c))),
        )
    }

    pub fn pow(&self, mut e: u64) -> ModPoly {
        let mut acc = ModPoly::one(&self.ring);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn derive(&self, i: usize) -> ModPoly {
        assert!(i < self.ring.ncoords(), "derivations act on coordinates only");
        let p = self.prime();
        let mut out = ModPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.get(i);
            if e == 0 {
                continue;
            }
            out.add_term(m.with(i, e - 1), p.mul(*c, p.reduce(e as u64)));
        }
        out
    }

    /// Iterated derivative ∂^α.
    pub fn derive_multi(&self, alpha: &Monomial) -> ModPoly {
        let mut out = self.clone();
        for (i, &e) in alpha.exps().iter().enumerate() {
            for _ in 0..e {
                if out.is_zero() {
                    return out;
                }
                out = out.derive(i);
            }
        }
        out
    }

    /// f^p computed by repeated multiplication.
    pub fn frobenius(&self) -> ModPoly {
        self.pow(self.prime().get())
    }

    /// f^p computed as x_i -> x_i^p on the coefficient-Frobenius image (c^p = c in F_p).
    pub fn frobenius_by_substitution(&self) -> ModPoly {
        let p = self.prime();
        ModPoly::from_terms(
            &self.ring,
            self.terms.iter().map(|(m, c)| (m.scale(p.get() as u32), p.pow(*c, p.get()))),
        )
    }

    /// Ring map sending variable `i` of `self.ring` to `images[i]` in `target`.
    pub fn substitute(&self, target: &Arc<Ring>, images: &[ModPoly]) -> ModPoly {
        assert_eq!(images.len(), self.ring.nvars(), "one image per variable");
        assert_eq!(target.prime(), self.ring.prime(), "substitution preserves the prime");
        let mut cache: Vec<Vec<ModPoly>> = images.iter().map(|f| vec![ModPoly::one(target), f.clone()]).collect();
        let mut out = ModPoly::zero(target);
        for (m, c) in &self.terms {
            let mut term = ModPoly::constant(target, *c as i64);
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let powers = &mut cache[i];
                while powers.len() <= e as usize {
                    let next = powers.last().unwrap().mul(&powers[1]);
                    powers.push(next);
                }
                term = term.mul(&powers[e as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// Re-expresses the polynomial in `target`, mapping variable `i` to variable `var_map[i]`.
    pub fn embed(&self, target: &Arc<Ring>, var_map: &[usize]) -> ModPoly {
        assert_eq!(var_map.len(), self.ring.nvars());
        let mut out = ModPoly::zero(target);
        for (m, c) in &self.terms {
            let mut v = vec![0; target.nvars()];
            for (i, &e) in m.exps().iter().enumerate() {
                v[var_map[i]] += e;
            }
            out.add_term(Monomial(v), *c);
        }
        out
    }

    /// Moves the polynomial into a ring with the same coordinates, matching the
    /// parameter by position. Fails if `self` uses a parameter `target` lacks.
    pub fn to_ring(&self, target: &Arc<Ring>) -> Result<ModPoly> {
        if same_ring(&self.ring, target) {
            return Ok(self.clone());
        }
        if self.ring.coord_names() != target.coord_names() || self.ring.prime() != target.prime() {
            return Err(Error::RingMismatch(format!(
                "cannot move {:?} into {:?}",
                self.ring.names(),
                target.names()
            )));
        }
        let mut map: Vec<usize> = (0..self.ring.ncoords()).collect();
        if let Some(t) = self.ring.param() {
            match target.param() {
                Some(tt) => map.push(tt),
                None => {
                    if self.degree_in(t).unwrap_or(0) > 0 {
                        return Err(Error::RingMismatch("parameter present in source only".into()));
                    }
                    let stripped = ModPoly::from_terms(
                        target,
                        self.terms.iter().map(|(m, c)| (Monomial(m.exps()[..m.len() - 1].to_vec()), *c)),
                    );
                    return Ok(stripped);
                }
            }
        }
        Ok(self.embed(target, &map))
    }

    /// Sets variable `var` to the scalar `value`, staying in the same ring.
    pub fn specialize(&self, var: usize, value: u64) -> ModPoly {
        let p = self.prime();
        let mut out = ModPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.get(var) as u64;
            out.add_term(m.with(var, 0), p.mul(*c, p.pow(value, e)));
        }
        out
    }

    /// Splits by the exponent of `var`: f = Σ_k var^k f_k with f_k free of `var`.
    pub fn split_by(&self, var: usize) -> BTreeMap<u32, ModPoly> {
        let mut out: BTreeMap<u32, ModPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.get(var))
                .or_insert_with(|| ModPoly::zero(&self.ring))
                .add_term(m.with(var, 0), *c);
        }
        out
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> ModPoly {
        ModPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), *c)).collect(),
        }
    }

    pub fn parse(ring: &Arc<Ring>, src: &str) -> Result<ModPoly> {
        Parser::new(ring, src).parse_all()
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write_term(f, &self.ring.names, m, *c)?;
        }
        Ok(())
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, names: &[String], m: &Monomial, c: u64) -> fmt::Result {
    let mut first = true;
    if c != 1 || m.is_zero() {
        write!(f, "{c}")?;
        first = false;
    }
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "{}", names[i])?;
        } else {
            write!(f, "{}^{}", names[i], e)?;
        }
    }
    Ok(())
}

impl std::ops::Add for &ModPoly {
    type Output = ModPoly;
    fn add(self, rhs: &ModPoly) -> ModPoly {
        ModPoly::add(self, rhs)
    }
}

impl std::ops::Sub for &ModPoly {
    type Output = ModPoly;
    fn sub(self, rhs: &ModPoly) -> ModPoly {
        ModPoly::sub(self, rhs)
    }
}

impl std::ops::Mul for &ModPoly {
    type Output = ModPoly;
    fn mul(self, rhs: &ModPoly) -> ModPoly {
        ModPoly::mul(self, rhs)
    }
}

impl std::ops::Neg for &ModPoly {
    type Output = ModPoly;
    fn neg(self) -> ModPoly {
        ModPoly::neg(self)
    }
}

struct Parser<'a> {
    ring: &'a Arc<Ring>,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(ring: &'a Arc<Ring>, src: &str) -> Self {
        Parser { ring, chars: src.chars().collect(), pos: 0 }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<ModPoly> {
        if self.peek().is_none() {
            return self.err("empty polynomial");
        }
        let f = self.expr()?;
        match self.peek() {
            None => Ok(f),
            Some(c) => self.err(format!("unexpected `{c}`")),
        }
    }

    fn expr(&mut self) -> Result<ModPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ModPoly> {
        let mut acc = self.unary()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ModPoly> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        match s.parse::<u64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("integer out of range")
            }
        }
    }

    fn atom(&mut self) -> Result<ModPoly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(ModPoly::constant(self.ring, (v % self.ring.p()) as i64))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                while self.pos < self.chars.len() && self.chars[self.pos] == '\'' {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.ring.index_of(&name) {
                    Some(i) => Ok(ModPoly::var(self.ring, i)),
                    None => {
                        self.pos = start;
                        self.err(format!("unknown variable `{name}`"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, names: &[&str]) -> Arc<Ring> {
        Ring::new(Prime::new(p).unwrap(), names, None)
    }

    #[test]
    fn derive_examples() {
        let r = ring(3, &["x"]);
        let x = ModPoly::var(&r, 0);
        assert!(x.pow(3).derive(0).is_zero());
        assert!(ModPoly::constant(&r, 2).derive(0).is_zero());

        let r = ring(5, &["x", "y"]);
        let f = ModPoly::parse(&r, "x^2*y").unwrap();
        assert_eq!(f.derive(0), ModPoly::parse(&r, "2*x*y").unwrap());
    }

    #[test]
    fn frobenius_examples() {
        let r = ring(2, &["x"]);
        assert_eq!(ModPoly::parse(&r, "x + 1").unwrap().frobenius().to_string(), "x^2 + 1");
        assert!(ModPoly::zero(&r).frobenius().is_zero());
        let r = ring(3, &["x"]);
        assert_eq!(ModPoly::parse(&r, "2*x").unwrap().frobenius().to_string(), "2*x^3");
    }

    #[test]
    fn canonical_rendering_is_graded_lex_descending() {
        let r = ring(7, &["x", "y"]);
        let f = ModPoly::parse(&r, "1 + y + x + x*y + y^2 - x^2").unwrap();
        assert_eq!(f.to_string(), "6*x^2 + x*y + y^2 + x + y + 1");
        assert_eq!(ModPoly::parse(&r, &f.to_string()).unwrap(), f);
    }

    #[test]
    fn parse_errors_carry_columns() {
        let r = ring(3, &["x"]);
        match ModPoly::parse(&r, "x + z") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(ModPoly::parse(&r, "(x + 1").is_err());
        assert!(ModPoly::parse(&r, "").is_err());
        assert!(ModPoly::parse(&r, "x ^").is_err());
    }

    #[test]
    fn parameter_is_not_differentiated_and_specializes() {
        let r = Ring::new(Prime::new(3).unwrap(), &["x"], Some("t"));
        assert_eq!(r.ncoords(), 1);
        let f = ModPoly::parse(&r, "t^2*x + t").unwrap();
        assert_eq!(f.specialize(1, 1), ModPoly::parse(&r, "x + 1").unwrap());
        assert!(f.specialize(1, 0).is_zero());
        let split = f.split_by(1);
        assert_eq!(split[&2], ModPoly::var(&r, 0));
    }

    #[test]
    fn primed_names_parse() {
        let r = ring(3, &["x'", "y'"]);
        let f = ModPoly::parse(&r, "x'^2*y' + 1").unwrap();
        assert_eq!(f.to_string(), "x'^2*y' + 1");
    }

    #[test]
    fn monomial_enumeration() {
        let all = Monomial::all_up_to(2, 2);
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Monomial::from_vec(vec![2, 1]).divisors().len(), 6);
    }
}
