//! Frobenius twists and pullbacks, the Cartier operator and its splittings,
//! Cartier descent, and the p-curvature morphism θ.

mod cartier;
mod theta;

use std::fmt;
use std::sync::Arc;

pub use cartier::{
    cartier_descend, cartier_operator, cartier_splitting, CartierImage, CartierSplitting, Descent, OneForm,
};
pub use theta::{
    perturbed_theta, standard_theta, theta_coalgebra_check, theta_map, theta_map_with, theta_rees_compat, DolElement,
    DolTensorElement, ThetaReport,
};

use crate::arith::{ModPoly, Monomial, PolyMatrix, Ring};
use crate::connections::{ConnectionData, WeightMode};
use crate::error::{Error, Result};

/// The ring of X': the same coordinates with primed names, same parameter.
pub fn twisted_ring(base: &Arc<Ring>) -> Arc<Ring> {
    let names: Vec<String> = base.coord_names().iter().map(|n| format!("{n}'")).collect();
    Ring::new(base.prime(), &names, base.param_name())
}

/// Images of the untwisting map x'_i ↦ x_i^p (the parameter is fixed).
fn untwist_images(base: &Arc<Ring>) -> Vec<ModPoly> {
    let p = base.p();
    let mut images: Vec<ModPoly> = (0..base.ncoords()).map(|i| ModPoly::var(base, i).pow(p)).collect();
    if base.param().is_some() {
        images.push(ModPoly::param(base));
    }
    images
}

/// A polynomial on X', i.e. in the twisted variables x'_1..x'_m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistPoly {
    poly: ModPoly,
}

impl TwistPoly {
    /// Wraps a polynomial whose ring is the twist of some base ring.
    pub fn new(poly: ModPoly) -> Self {
        TwistPoly { poly }
    }

    pub fn zero(base: &Arc<Ring>) -> Self {
        TwistPoly { poly: ModPoly::zero(&twisted_ring(base)) }
    }

    pub fn parse(base: &Arc<Ring>, src: &str) -> Result<Self> {
        Ok(TwistPoly { poly: ModPoly::parse(&twisted_ring(base), src)? })
    }

    pub fn poly(&self) -> &ModPoly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// x'_i ↦ x_i^p into `base`.
    pub fn untwist(&self, base: &Arc<Ring>) -> ModPoly {
        self.poly.substitute(base, &untwist_images(base))
    }

    /// The inverse of [`TwistPoly::untwist`] on F_p[x^p]; `None` if some
    /// coordinate exponent is not divisible by p.
    pub fn descend(f: &ModPoly) -> Option<TwistPoly> {
        let base = f.ring();
        let p = base.p() as u32;
        let n = base.ncoords();
        let target = twisted_ring(base);
        let mut terms = Vec::with_capacity(f.len());
        for (m, c) in f.terms() {
            if m.exps()[..n].iter().any(|e| e % p != 0) {
                return None;
            }
            let v: Vec<u32> = m.exps().iter().enumerate().map(|(i, &e)| if i < n { e / p } else { e }).collect();
            terms.push((Monomial::from_vec(v), c));
        }
        Some(TwistPoly { poly: ModPoly::from_terms(&target, terms) })
    }
}

impl fmt::Display for TwistPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

/// Entrywise untwisting of a matrix over X'.
pub fn untwist_matrix(m: &PolyMatrix, base: &Arc<Ring>) -> Result<PolyMatrix> {
    let expected = twisted_ring(base);
    if m.ring().names() != expected.names() || m.ring().prime() != expected.prime() {
        return Err(Error::RingMismatch(format!(
            "expected a matrix over {:?}, got {:?}",
            expected.names(),
            m.ring().names()
        )));
    }
    Ok(m.substitute(base, &untwist_images(base)))
}

/// F*(E', θ'): the canonical connection (all A_i = 0 in the pulled-back frame)
/// and the F-Higgs matrices B_i(x) = B'_i(x^p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusPullback {
    pub connection: ConnectionData,
    pub higgs: Vec<PolyMatrix>,
}

pub fn frobenius_pullback(base: &Arc<Ring>, rank: usize, higgs: &[PolyMatrix]) -> Result<FrobeniusPullback> {
    if !higgs.is_empty() && higgs.len() != base.ncoords() {
        return Err(Error::Dimension(format!("{} Higgs matrices for {} coordinates", higgs.len(), base.ncoords())));
    }
    let pulled = higgs
        .iter()
        .map(|b| {
            if b.rows() != rank || !b.is_square() {
                return Err(Error::Dimension(format!("Higgs matrix must be {rank}x{rank}")));
            }
            untwist_matrix(b, base)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrobeniusPullback { connection: ConnectionData::trivial(base, WeightMode::Dr, rank)?, higgs: pulled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring;

    #[test]
    fn untwist_and_descend() {
        let r = ring(3, &["x", "y"], Some("t")).unwrap();
        let f = TwistPoly::parse(&r, "x'^2*y' + t*x' + 2").unwrap();
        let g = f.untwist(&r);
        assert_eq!(g.to_string(), "x^6*y^3 + x^3*t + 2");
        assert_eq!(TwistPoly::descend(&g), Some(f));
        assert_eq!(TwistPoly::descend(&ModPoly::parse(&r, "x^2").unwrap()), None);
    }

    #[test]
    fn pullback_examples() {
        let r = ring(3, &["x"], None).unwrap();
        let rp = twisted_ring(&r);
        let b = PolyMatrix::parse(&rp, "[[0, x'^2 + 1], [0, 0]]").unwrap();
        let pb = frobenius_pullback(&r, 2, &[b]).unwrap();
        assert_eq!(pb.higgs[0], PolyMatrix::parse(&r, "[[0, x^6 + 1], [0, 0]]").unwrap());
        assert!(pb.connection.p_curvature().unwrap().is_zero());
        assert!(pb.connection.is_integrable());
        let wrong = PolyMatrix::parse(&r, "[[x]]").unwrap();
        assert!(frobenius_pullback(&r, 1, &[wrong]).is_err());
    }
}
