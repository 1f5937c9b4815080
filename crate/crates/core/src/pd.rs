//! Truncated divided-power algebras P^n = O<τ_1..τ_m>/J^[n+1] in the diagonal
//! coordinates τ_i = 1⊗x_i − x_i⊗1, with the comultiplication, the quotient by
//! the ideal generated by the τ_i, and PD Taylor expansion.
//!
//! Elements are left O-modules: coefficients f(x) sit to the left of the PD
//! monomials τ^[k] = Π τ_i^[k_i].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::arith::{multi_binom_mod_p, ModPoly, Monomial, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDElement {
    ring: Arc<Ring>,
    level: u32,
    terms: BTreeMap<Monomial, ModPoly>,
}

fn insert_coeff(map: &mut BTreeMap<Monomial, ModPoly>, k: Monomial, f: ModPoly) {
    if f.is_zero() {
        return;
    }
    match map.get_mut(&k) {
        Some(g) => {
            let s = g.add(&f);
            if s.is_zero() {
                map.remove(&k);
            } else {
                *g = s;
            }
        }
        None => {
            map.insert(k, f);
        }
    }
}

impl PDElement {
    pub fn zero(ring: &Arc<Ring>, level: u32) -> Self {
        PDElement { ring: ring.clone(), level, terms: BTreeMap::new() }
    }

    /// f(x) * τ^[k]; zero if |k| exceeds the level.
    pub fn monomial(f: ModPoly, k: Monomial, level: u32) -> Self {
        let ring = f.ring().clone();
        assert_eq!(k.len(), ring.ncoords(), "one PD index per coordinate");
        let mut out = PDElement::zero(&ring, level);
        if k.degree() <= level {
            insert_coeff(&mut out.terms, k, f);
        }
        out
    }

    pub fn basis(ring: &Arc<Ring>, k: Monomial, level: u32) -> Self {
        Self::monomial(ModPoly::one(ring), k, level)
    }

    pub fn one(ring: &Arc<Ring>, level: u32) -> Self {
        Self::basis(ring, Monomial::zero(ring.ncoords()), level)
    }

    /// τ_i = τ_i^[1].
    pub fn tau(ring: &Arc<Ring>, i: usize, level: u32) -> Self {
        Self::basis(ring, Monomial::unit(ring.ncoords(), i), level)
    }

    pub fn from_coefficient(f: ModPoly, level: u32) -> Self {
        let n = f.ring().ncoords();
        Self::monomial(f, Monomial::zero(n), level)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ModPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, k: &Monomial) -> ModPoly {
        self.terms.get(k).cloned().unwrap_or_else(|| ModPoly::zero(&self.ring))
    }

    /// The counit: kill every τ.
    pub fn counit(&self) -> ModPoly {
        self.coefficient(&Monomial::zero(self.ring.ncoords()))
    }

    /// Every basis monomial τ^[k] with |k| <= level.
    pub fn basis_monomials(ring: &Arc<Ring>, level: u32) -> Vec<Monomial> {
        Monomial::all_up_to(ring.ncoords(), level)
    }

    fn check_level(&self, other: &PDElement) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { left: self.level, right: other.level });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &PDElement) -> Result<PDElement> {
        self.check_level(other)?;
        let mut out = self.clone();
        for (k, f) in &other.terms {
            insert_coeff(&mut out.terms, k.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn add(&self, other: &PDElement) -> PDElement {
        self.try_add(other).expect("PD levels agree")
    }

    pub fn sub(&self, other: &PDElement) -> PDElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PDElement {
        self.map_coefficients(ModPoly::neg)
    }

    /// Left O-action on coefficients.
    pub fn mul_coefficient(&self, f: &ModPoly) -> PDElement {
        self.map_coefficients(|g| f.mul(g))
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&ModPoly) -> ModPoly) -> PDElement {
        let mut out = PDElement::zero(&self.ring, self.level);
        for (k, g) in &self.terms {
            insert_coeff(&mut out.terms, k.clone(), f(g));
        }
        out
    }

    /// Product in P^n: τ_i^[a] τ_i^[b] = C(a+b, a) τ_i^[a+b], truncated above the level.
    pub fn pd_mul(&self, other: &PDElement) -> Result<PDElement> {
        self.check_level(other)?;
        let p = self.ring.prime();
        let mut out = PDElement::zero(&self.ring, self.level);
        for (a, fa) in &self.terms {
            for (b, fb) in &other.terms {
                let k = a.add(b);
                if k.degree() > self.level {
                    continue;
                }
                let c = multi_binom_mod_p(k.exps(), a.exps(), p);
                if c == 0 {
                    continue;
                }
                insert_coeff(&mut out.terms, k, fa.mul(fb).scale(c));
            }
        }
        Ok(out)
    }

    pub fn truncate(&self, level: u32) -> PDElement {
        PDElement {
            ring: self.ring.clone(),
            level,
            terms: self.terms.iter().filter(|(k, _)| k.degree() <= level).map(|(k, f)| (k.clone(), f.clone())).collect(),
        }
    }

    /// PD Taylor expansion g(x + τ) = Σ_{|k| <= n} ∂^k(g) τ^[k].
    pub fn taylor(g: &ModPoly, level: u32) -> PDElement {
        let ring = g.ring().clone();
        let n = ring.ncoords();
        let mut out = PDElement::zero(&ring, level);
        // breadth-first over multi-indices so each derivative is computed once
        let mut layer: Vec<(Monomial, ModPoly)> = vec![(Monomial::zero(n), g.clone())];
        for deg in 0..=level {
            let mut next: BTreeMap<Monomial, ModPoly> = BTreeMap::new();
            for (k, dk) in &layer {
                insert_coeff(&mut out.terms, k.clone(), dk.clone());
                if deg == level {
                    continue;
                }
                // extend only in coordinates >= the last nonzero one, so each index is reached once
                let start = k.exps().iter().rposition(|&e| e > 0).unwrap_or(0);
                for i in start..n {
                    let d = dk.derive(i);
                    if !d.is_zero() {
                        next.insert(k.bump(i), d);
                    }
                }
            }
            layer = next.into_iter().collect();
            if layer.is_empty() {
                break;
            }
        }
        out
    }

    /// Image in P/I: keeps exactly the monomials τ^[pk], i.e. every index divisible by p.
    pub fn quotient_mod_i(&self) -> PDElement {
        let p = self.ring.p() as u32;
        PDElement {
            ring: self.ring.clone(),
            level: self.level,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.exps().iter().all(|e| e % p == 0))
                .map(|(k, f)| (k.clone(), f.clone()))
                .collect(),
        }
    }

    /// Δ(f τ^[n]) = f Σ_{i+j=n} τ^[i] ⊗ τ^[j], coordinate-wise for multi-indices.
    pub fn comultiply(&self) -> PDTensorElement {
        let mut out = PDTensorElement::zero(&self.ring, self.level);
        for (k, f) in &self.terms {
            for i in k.divisors() {
                let j = k.checked_sub(&i).unwrap();
                out.insert((i, j), f.clone());
            }
        }
        out
    }
}

fn write_pd_monomial(f: &mut fmt::Formatter<'_>, k: &Monomial) -> fmt::Result {
    for (i, &e) in k.exps().iter().enumerate() {
        if e > 0 {
            write!(f, "T{}^[{}]", i + 1, e)?;
        }
    }
    Ok(())
}

fn write_coefficient(f: &mut fmt::Formatter<'_>, c: &ModPoly, bare: bool) -> fmt::Result {
    if bare {
        return write!(f, "{c}");
    }
    if c.len() > 1 {
        write!(f, "({c})*")
    } else if c.constant_value() == Some(1) {
        Ok(())
    } else {
        write!(f, "{c}*")
    }
}

impl fmt::Display for PDElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write_coefficient(f, c, k.is_zero())?;
            write_pd_monomial(f, k)?;
        }
        Ok(())
    }
}

/// Element of P^n ⊗_{2,O,1} P^n in normal form: Σ g(x) τ_(1)^[i] ⊗ τ_(2)^[j],
/// coefficients pushed to the far left. Each factor is truncated at the level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDTensorElement {
    ring: Arc<Ring>,
    level: u32,
    terms: BTreeMap<(Monomial, Monomial), ModPoly>,
}

impl PDTensorElement {
    pub fn zero(ring: &Arc<Ring>, level: u32) -> Self {
        PDTensorElement { ring: ring.clone(), level, terms: BTreeMap::new() }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &ModPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, left: &Monomial, right: &Monomial) -> ModPoly {
        self.terms
            .get(&(left.clone(), right.clone()))
            .cloned()
            .unwrap_or_else(|| ModPoly::zero(&self.ring))
    }

    fn insert(&mut self, key: (Monomial, Monomial), f: ModPoly) {
        if f.is_zero() || key.0.degree() > self.level || key.1.degree() > self.level {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(g) => {
                let s = g.add(&f);
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *g = s;
                }
            }
            None => {
                self.terms.insert(key, f);
            }
        }
    }

    /// a ⊗ 1.
    pub fn from_left(a: &PDElement) -> Self {
        let n = a.ring.ncoords();
        let mut out = PDTensorElement::zero(&a.ring, a.level);
        for (k, f) in &a.terms {
            out.insert((k.clone(), Monomial::zero(n)), f.clone());
        }
        out
    }

    /// 1 ⊗ b. A coefficient g(x) of the right factor crosses the middle as
    /// g(x + τ_(1)) = Σ_k ∂^k(g) τ_(1)^[k].
    pub fn from_right(b: &PDElement) -> Self {
        let n = b.ring.ncoords();
        let mut out = PDTensorElement::zero(&b.ring, b.level);
        for (k, g) in &b.terms {
            for (i, dg) in PDElement::taylor(g, b.level).terms {
                out.insert((i, k.clone()), dg);
            }
        }
        debug_assert!(out.terms.keys().all(|(i, j)| i.len() == n && j.len() == n));
        out
    }

    /// Multiplies by 1 ⊗ g, i.e. g acting through the right factor's left structure.
    pub fn mul_right_coefficient(&self, g: &ModPoly) -> Self {
        let shifted = PDTensorElement::from_left(&PDElement::taylor(g, self.level));
        self.mul(&shifted).expect("same level")
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { left: self.level, right: other.level });
        }
        let mut out = self.clone();
        for (k, f) in &other.terms {
            out.insert(k.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("tensor levels agree")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = PDTensorElement::zero(&self.ring, self.level);
        for (k, f) in &self.terms {
            out.insert(k.clone(), f.neg());
        }
        out
    }

    /// Product in the normal-form algebra (both factors are commutative PD algebras).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { left: self.level, right: other.level });
        }
        let p = self.ring.prime();
        let mut out = PDTensorElement::zero(&self.ring, self.level);
        for ((a1, a2), fa) in &self.terms {
            for ((b1, b2), fb) in &other.terms {
                let k1 = a1.add(b1);
                let k2 = a2.add(b2);
                if k1.degree() > self.level || k2.degree() > self.level {
                    continue;
                }
                let c = p.mul(multi_binom_mod_p(k1.exps(), a1.exps(), p), multi_binom_mod_p(k2.exps(), a2.exps(), p));
                if c == 0 {
                    continue;
                }
                out.insert((k1, k2), fa.mul(fb).scale(c));
            }
        }
        Ok(out)
    }

    /// Drops terms with |i| + |j| above `n`.
    pub fn truncate_total(&self, n: u32) -> Self {
        let mut out = PDTensorElement::zero(&self.ring, self.level);
        for ((i, j), f) in &self.terms {
            if i.degree() + j.degree() <= n {
                out.insert((i.clone(), j.clone()), f.clone());
            }
        }
        out
    }
}

impl fmt::Display for PDTensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((i, j), c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if c.len() > 1 {
                write!(f, "({c})*")?;
            } else if c.constant_value() != Some(1) {
                write!(f, "{c}*")?;
            }
            if i.is_zero() {
                write!(f, "1")?;
            } else {
                write_pd_monomial(f, i)?;
            }
            write!(f, " (x) ")?;
            if j.is_zero() {
                write!(f, "1")?;
            } else {
                write_pd_monomial(f, j)?;
            }
        }
        Ok(())
    }
}
