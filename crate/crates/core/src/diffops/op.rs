use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::arith::{multi_binom_mod_p, ModPoly, Monomial, PolyMatrix, Ring};
use crate::error::{Error, Result};
use crate::pd::PDElement;

/// Crystalline differential operator Σ_α f_α(x) ∂^α in normal form.
///
/// Coefficients are d x d polynomial matrices; scalar operators use d = 1.
/// The ∂-exponent vectors have one entry per coordinate of the ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    ring: Arc<Ring>,
    dim: usize,
    terms: BTreeMap<Monomial, PolyMatrix>,
}

impl DiffOp {
    pub fn zero(ring: &Arc<Ring>, dim: usize) -> Self {
        DiffOp { ring: ring.clone(), dim, terms: BTreeMap::new() }
    }

    pub fn identity(ring: &Arc<Ring>, dim: usize) -> Self {
        Self::from_coefficient(PolyMatrix::identity(ring, dim))
    }

    pub fn monomial(coefficient: PolyMatrix, alpha: Monomial) -> Self {
        assert!(coefficient.is_square());
        let ring = coefficient.ring().clone();
        assert_eq!(alpha.len(), ring.ncoords());
        let mut out = DiffOp::zero(&ring, coefficient.rows());
        out.insert(alpha, coefficient);
        out
    }

    pub fn from_coefficient(coefficient: PolyMatrix) -> Self {
        let n = coefficient.ring().ncoords();
        Self::monomial(coefficient, Monomial::zero(n))
    }

    /// ∂^α times the d x d identity.
    pub fn partial_power(ring: &Arc<Ring>, dim: usize, alpha: Monomial) -> Self {
        Self::monomial(PolyMatrix::identity(ring, dim), alpha)
    }

    pub fn partial(ring: &Arc<Ring>, dim: usize, i: usize) -> Self {
        Self::partial_power(ring, dim, Monomial::unit(ring.ncoords(), i))
    }

    pub fn scalar(f: ModPoly, alpha: Monomial) -> Self {
        let ring = f.ring().clone();
        Self::monomial(PolyMatrix::scalar(&ring, 1, &f), alpha)
    }

    pub fn scalar_poly(f: ModPoly) -> Self {
        let n = f.ring().ncoords();
        Self::scalar(f, Monomial::zero(n))
    }

    fn insert(&mut self, alpha: Monomial, c: PolyMatrix) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&alpha);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &PolyMatrix)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &Monomial) -> PolyMatrix {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| PolyMatrix::zero(&self.ring, self.dim, self.dim))
    }

    /// Scalar coefficient of ∂^α (for d = 1 operators).
    pub fn scalar_coefficient(&self, alpha: &Monomial) -> ModPoly {
        assert_eq!(self.dim, 1, "scalar coefficient of a matrix operator");
        self.coefficient(alpha).get(0, 0).clone()
    }

    /// The order-0 coefficient.
    pub fn order_zero(&self) -> PolyMatrix {
        self.coefficient(&Monomial::zero(self.ring.ncoords()))
    }

    /// max |α| over nonzero terms; zero operator has order 0.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn check(&self, other: &DiffOp, what: &str) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!("{what}: operator dimensions {} vs {}", self.dim, other.dim)));
        }
        if !crate::arith::poly::same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch(what.into()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check(other, "add")?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.insert(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        self.try_add(other).expect("operator add")
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffOp {
        self.map_coefficients(|c| c.neg())
    }

    pub fn scale(&self, k: u64) -> DiffOp {
        self.map_coefficients(|c| c.scale(k))
    }

    /// Left multiplication by a function.
    pub fn mul_poly_left(&self, f: &ModPoly) -> DiffOp {
        self.map_coefficients(|c| c.mul_poly(f))
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&PolyMatrix) -> PolyMatrix) -> DiffOp {
        let mut out = DiffOp::zero(&self.ring, self.dim);
        for (a, c) in &self.terms {
            out.insert(a.clone(), f(c));
        }
        out
    }

    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> DiffOp {
        DiffOp {
            ring: self.ring.clone(),
            dim: self.dim,
            terms: self.terms.iter().filter(|(a, _)| keep(a)).map(|(a, c)| (a.clone(), c.clone())).collect(),
        }
    }

    /// Product in Λ via ∂^α g = Σ_{κ<=α} C(α, κ) ∂^{α−κ}(g) ∂^κ.
    pub fn op_mul(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check(other, "multiply")?;
        let p = self.ring.prime();
        let mut out = DiffOp::zero(&self.ring, self.dim);
        let mut derivatives: HashMap<(Monomial, Monomial), PolyMatrix> = HashMap::new();
        for (alpha, a) in &self.terms {
            let kappas = alpha.divisors();
            for (beta, b) in &other.terms {
                for kappa in &kappas {
                    let c = multi_binom_mod_p(alpha.exps(), kappa.exps(), p);
                    if c == 0 {
                        continue;
                    }
                    let delta = alpha.checked_sub(kappa).unwrap();
                    let db = derivatives
                        .entry((beta.clone(), delta.clone()))
                        .or_insert_with(|| b.map(|f| f.derive_multi(&delta)));
                    if db.is_zero() {
                        continue;
                    }
                    let coeff = a.try_mul(db)?.scale(c);
                    out.insert(kappa.add(beta), coeff);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u64) -> Result<DiffOp> {
        let mut acc = DiffOp::identity(&self.ring, self.dim);
        for _ in 0..e {
            acc = acc.op_mul(self)?;
        }
        Ok(acc)
    }

    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        Ok(self.op_mul(other)?.sub(&other.op_mul(self)?))
    }

    /// Evaluates Σ f_α ∂^α(v) on a d x k matrix of sections (columns).
    pub fn apply(&self, v: &PolyMatrix) -> Result<PolyMatrix> {
        if v.rows() != self.dim {
            return Err(Error::Dimension(format!("operator of dimension {} applied to {} rows", self.dim, v.rows())));
        }
        let mut out = PolyMatrix::zero(&self.ring, v.rows(), v.cols());
        for (alpha, c) in &self.terms {
            let dv = v.map(|f| f.derive_multi(alpha));
            if dv.is_zero() {
                continue;
            }
            out = out.add(&c.try_mul(&dv)?);
        }
        Ok(out)
    }

    /// Scalar action on a single function.
    pub fn apply_poly(&self, f: &ModPoly) -> Result<ModPoly> {
        let v = PolyMatrix::scalar(&self.ring, 1, f);
        Ok(self.apply(&v)?.get(0, 0).clone())
    }

    /// Sets a ring variable (typically the parameter) to a scalar in every coefficient.
    pub fn specialize(&self, var: usize, value: u64) -> DiffOp {
        self.map_coefficients(|c| c.specialize(var, value))
    }

    /// Whether the operator lies in Λ^{>=pk}: every normal-form monomial has Σ_i floor(α_i / p) >= k.
    pub fn conj_level_membership(&self, k: u32) -> bool {
        let p = self.ring.p() as u32;
        self.terms.keys().all(|a| a.exps().iter().map(|e| e / p).sum::<u32>() >= k)
    }

    /// Drops monomials lying in Λ^{>=pk}.
    pub fn reduce_conj(&self, k: u32) -> DiffOp {
        let p = self.ring.p() as u32;
        self.filter_terms(|a| a.exps().iter().map(|e| e / p).sum::<u32>() < k)
    }
}

/// Left-bilinear pairing ⟨τ^[k], ∂^α⟩ = δ_{k,α} between P^n and scalar Λ_n.
pub fn pair(a: &PDElement, b: &DiffOp) -> Result<ModPoly> {
    if b.dim() != 1 {
        return Err(Error::Dimension("pairing needs a scalar operator".into()));
    }
    if b.order() > a.level() {
        return Err(Error::OrderExceedsLevel { order: b.order(), level: a.level() });
    }
    let mut acc = ModPoly::zero(a.ring());
    for (alpha, c) in b.terms() {
        acc = acc.add(&a.coefficient(alpha).mul(c.get(0, 0)));
    }
    Ok(acc)
}

/// The product of scalar operators computed by duality with the comultiplication:
/// the coefficient of ∂^k in Θ(a, b) is ⟨Δ(τ^[k]), (a, b)⟩, where b's coefficients
/// act on the right factor and cross the middle as Taylor series.
pub fn dual_product(a: &DiffOp, b: &DiffOp) -> Result<DiffOp> {
    if a.dim() != 1 || b.dim() != 1 {
        return Err(Error::Dimension("dual product is defined for scalar operators".into()));
    }
    let ring = a.ring().clone();
    let level = a.order() + b.order();
    let mut out = DiffOp::zero(&ring, 1);
    for k in PDElement::basis_monomials(&ring, level) {
        let delta = PDElement::basis(&ring, k.clone(), level).comultiply();
        let mut value = ModPoly::zero(&ring);
        for (beta, c) in b.terms() {
            let moved = delta.mul_right_coefficient(c.get(0, 0));
            for ((left, right), g) in moved.terms() {
                if right != beta {
                    continue;
                }
                let a_coeff = a.scalar_coefficient(left);
                if !a_coeff.is_zero() {
                    value = value.add(&g.mul(&a_coeff));
                }
            }
        }
        out.insert(k, PolyMatrix::scalar(&ring, 1, &value));
    }
    Ok(out)
}

fn write_partials(f: &mut fmt::Formatter<'_>, alpha: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in alpha.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, " ")?;
        }
        first = false;
        if e == 1 {
            write!(f, "D{}", i + 1)?;
        } else {
            write!(f, "D{}^{}", i + 1, e)?;
        }
    }
    Ok(())
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (alpha, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if self.dim == 1 {
                let g = c.get(0, 0);
                if alpha.is_zero() {
                    write!(f, "{g}")?;
                    continue;
                }
                if g.len() > 1 {
                    write!(f, "({g}) ")?;
                } else if g.constant_value() != Some(1) {
                    write!(f, "{g} ")?;
                }
            } else {
                write!(f, "{c}")?;
                if alpha.is_zero() {
                    continue;
                }
                write!(f, " ")?;
            }
            write_partials(f, alpha)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring;

    fn m(v: &[u32]) -> Monomial {
        Monomial::from_vec(v.to_vec())
    }

    fn d(r: &Arc<Ring>, k: u32) -> DiffOp {
        DiffOp::partial_power(r, 1, m(&[k]))
    }

    fn x(r: &Arc<Ring>) -> DiffOp {
        DiffOp::scalar_poly(ModPoly::var(r, 0))
    }

    #[test]
    fn rewrite_examples() {
        let r = ring(5, &["x"], None).unwrap();
        assert_eq!(d(&r, 1).op_mul(&x(&r)).unwrap().to_string(), "x D1 + 1");
        assert_eq!(d(&r, 2).op_mul(&x(&r)).unwrap().to_string(), "x D1^2 + 2 D1");
        let r3 = ring(3, &["x"], None).unwrap();
        assert_eq!(d(&r3, 3).op_mul(&x(&r3)).unwrap().to_string(), "x D1^3");
    }

    #[test]
    fn action_examples() {
        let r = ring(5, &["x"], None).unwrap();
        let xv = ModPoly::var(&r, 0);
        assert_eq!(d(&r, 1).apply_poly(&xv.pow(2)).unwrap(), xv.scale(2));
        let euler = x(&r).op_mul(&d(&r, 1)).unwrap();
        for n in 0..8u64 {
            assert_eq!(euler.apply_poly(&xv.pow(n)).unwrap(), xv.pow(n).scale(n));
        }
        let r2 = ring(2, &["x"], None).unwrap();
        let f = ModPoly::parse(&r2, "x^5 + x^3 + x^2 + 1").unwrap();
        assert!(d(&r2, 2).apply_poly(&f).unwrap().is_zero());
    }

    #[test]
    fn pairing_examples() {
        let r = ring(5, &["x"], None).unwrap();
        let t2 = PDElement::basis(&r, m(&[2]), 3);
        assert_eq!(pair(&t2, &d(&r, 2)).unwrap(), ModPoly::one(&r));
        let t1 = PDElement::basis(&r, m(&[1]), 3);
        assert!(pair(&t1, &d(&r, 2)).unwrap().is_zero());
        let xv = ModPoly::var(&r, 0);
        for k in 0..=4 {
            let lhs = pair(&PDElement::taylor(&xv.pow(4), 4), &d(&r, k)).unwrap();
            assert_eq!(lhs, xv.pow(4).derive_multi(&m(&[k])));
        }
        assert_eq!(pair(&t1, &d(&r, 4)), Err(Error::OrderExceedsLevel { order: 4, level: 3 }));
    }

    #[test]
    fn conj_membership_examples() {
        let r = ring(3, &["x"], None).unwrap();
        assert!(d(&r, 3).conj_level_membership(1));
        let f_d = DiffOp::scalar(ModPoly::parse(&r, "x + 1").unwrap(), m(&[1]));
        assert!(!f_d.conj_level_membership(1));
        let x_d4 = DiffOp::scalar(ModPoly::var(&r, 0), m(&[4]));
        assert!(x_d4.conj_level_membership(1));
        assert!(!x_d4.conj_level_membership(2));
    }

    #[test]
    fn matrix_dimension_mismatch() {
        let r = ring(3, &["x"], None).unwrap();
        let a = DiffOp::partial(&r, 2, 0);
        let b = DiffOp::partial(&r, 3, 0);
        assert!(matches!(a.op_mul(&b), Err(Error::Dimension(_))));
        let v = PolyMatrix::zero(&r, 3, 1);
        assert!(matches!(a.apply(&v), Err(Error::Dimension(_))));
    }

    #[test]
    fn rendering_multivariate() {
        let r = ring(5, &["x", "y"], None).unwrap();
        let op = DiffOp::scalar(ModPoly::parse(&r, "x + y").unwrap(), m(&[1, 2]))
            .add(&DiffOp::scalar(ModPoly::constant(&r, 3), m(&[1, 0])));
        assert_eq!(op.to_string(), "(x + y) D1 D2^2 + 3 D1");
    }
}
