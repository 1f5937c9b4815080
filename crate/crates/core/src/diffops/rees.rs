//! Rees deformations of Λ along the order (Hodge) and conjugate filtrations.

use std::collections::BTreeMap;
use std::fmt;

use super::op::DiffOp;
use crate::arith::{Monomial, PolyMatrix};
use crate::error::{Error, Result};

/// An element of a Rees algebra of Λ.
///
/// * `Hodge`: an operator over F_p[x][t] in Σ_m t^m Λ_m, i.e. every term
///   t^j f ∂^α has j >= |α|.
/// * `Conj`: Σ_k t^{-pk} op_k with op_k ∈ Λ^{>=pk}. Pairs with k <= 0 carry the
///   nonnegative power t^{p|k|}; for those the membership condition is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReesOpElement {
    Hodge(DiffOp),
    Conj(Vec<(i32, DiffOp)>),
}

/// Commutative symbol Σ σ_α ξ^α in the associated graded of the order filtration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSymbol {
    pub terms: BTreeMap<Monomial, PolyMatrix>,
}

impl GradedSymbol {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for GradedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (a, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &e) in a.exps().iter().enumerate() {
                if e > 0 {
                    write!(f, " xi{}^{}", i + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

/// A fiber of a Rees element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReesFiber {
    /// Fiber at t = c ≠ 0: an honest operator.
    Op(DiffOp),
    /// Hodge fiber at t = 0.
    Symbol(GradedSymbol),
    /// Conjugate fiber at t = 0: classes op_k mod Λ^{>=p(k+1)}.
    ConjGraded(Vec<(i32, DiffOp)>),
}

fn param_index(op: &DiffOp) -> Result<usize> {
    op.ring().param().ok_or_else(|| Error::InvalidRees("Hodge elements live over a ring with parameter t".into()))
}

impl ReesOpElement {
    pub fn hodge(op: DiffOp) -> Result<Self> {
        let t = param_index(&op)?;
        for (alpha, c) in op.terms() {
            for f in c.entries() {
                if let Some((m, _)) = f.terms().find(|(m, _)| m.get(t) < alpha.degree()) {
                    return Err(Error::InvalidRees(format!(
                        "term with t^{} on an order-{} monomial",
                        m.get(t),
                        alpha.degree()
                    )));
                }
            }
        }
        Ok(ReesOpElement::Hodge(op))
    }

    pub fn conj(parts: Vec<(i32, DiffOp)>) -> Result<Self> {
        for (k, op) in &parts {
            if *k > 0 && !op.conj_level_membership(*k as u32) {
                return Err(Error::InvalidRees(format!("component t^(-p*{k}) is not in the level-{k} ideal")));
            }
        }
        Ok(ReesOpElement::Conj(parts))
    }

    /// The generator t^{-p} ∂_i^p of the conjugate Rees algebra.
    pub fn conj_generator(op_ring: &std::sync::Arc<crate::arith::Ring>, i: usize) -> Self {
        let p = op_ring.p() as u32;
        let alpha = Monomial::unit(op_ring.ncoords(), i).scale(p);
        ReesOpElement::Conj(vec![(1, DiffOp::partial_power(op_ring, 1, alpha))])
    }

    pub fn mul(&self, other: &ReesOpElement) -> Result<ReesOpElement> {
        match (self, other) {
            (ReesOpElement::Hodge(a), ReesOpElement::Hodge(b)) => Ok(ReesOpElement::Hodge(a.op_mul(b)?)),
            (ReesOpElement::Conj(a), ReesOpElement::Conj(b)) => {
                let mut out = Vec::new();
                for (ka, oa) in a {
                    for (kb, ob) in b {
                        out.push((ka + kb, oa.op_mul(ob)?));
                    }
                }
                Ok(ReesOpElement::Conj(out))
            }
            _ => Err(Error::InvalidRees("cannot multiply Hodge and conjugate elements".into())),
        }
    }

    /// [a, b] of two Hodge elements.
    pub fn commutator(&self, other: &ReesOpElement) -> Result<ReesOpElement> {
        match (self, other) {
            (ReesOpElement::Hodge(a), ReesOpElement::Hodge(b)) => ReesOpElement::hodge(a.commutator(b)?),
            _ => Err(Error::InvalidRees("commutators are taken between Hodge elements".into())),
        }
    }

    /// Multiplies a conjugate element by t^{pj}.
    pub fn mul_t_p(&self, j: i32) -> Result<ReesOpElement> {
        match self {
            ReesOpElement::Conj(parts) => Ok(ReesOpElement::Conj(parts.iter().map(|(k, op)| (k - j, op.clone())).collect())),
            ReesOpElement::Hodge(_) => Err(Error::InvalidRees("t^p shift applies to conjugate elements".into())),
        }
    }

    pub fn specialize(&self, t0: u64) -> Result<ReesFiber> {
        match self {
            ReesOpElement::Hodge(op) => {
                let t = param_index(op)?;
                if op.ring().prime().reduce(t0) != 0 {
                    return Ok(ReesFiber::Op(op.specialize(t, t0)));
                }
                // t^j f ∂^α survives at t = 0 exactly when j = |α|
                let mut terms = BTreeMap::new();
                for (alpha, c) in op.terms() {
                    let top = c.map(|f| f.filter_terms(|m| m.get(t) == alpha.degree()).specialize(t, 1));
                    if !top.is_zero() {
                        terms.insert(alpha.clone(), top);
                    }
                }
                Ok(ReesFiber::Symbol(GradedSymbol { terms }))
            }
            ReesOpElement::Conj(parts) => {
                let Some((_, first)) = parts.first() else {
                    return Err(Error::InvalidRees("empty conjugate element".into()));
                };
                let prime = first.ring().prime();
                if prime.reduce(t0) != 0 {
                    let inv = prime.inv(t0).unwrap();
                    let mut acc = DiffOp::zero(first.ring(), first.dim());
                    for (k, op) in parts {
                        // t^{-pk} at t = t0
                        let e = (prime.get() as i64) * (*k as i64);
                        let c = if e >= 0 { prime.pow(inv, e as u64) } else { prime.pow(t0, (-e) as u64) };
                        acc = acc.try_add(&op.scale(c))?;
                    }
                    return Ok(ReesFiber::Op(acc));
                }
                let mut classes: BTreeMap<i32, DiffOp> = BTreeMap::new();
                for (k, op) in parts {
                    if *k < 0 {
                        continue;
                    }
                    let class = op.reduce_conj(*k as u32 + 1);
                    let slot = classes.entry(*k).or_insert_with(|| DiffOp::zero(op.ring(), op.dim()));
                    *slot = slot.try_add(&class)?;
                }
                Ok(ReesFiber::ConjGraded(classes.into_iter().filter(|(_, op)| !op.is_zero()).collect()))
            }
        }
    }
}

/// Dispatches to [`ReesOpElement::specialize`].
pub fn rees_specialize(a: &ReesOpElement, t0: u64) -> Result<ReesFiber> {
    a.specialize(t0)
}
