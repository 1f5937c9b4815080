use std::fmt;
use std::sync::Arc;

use super::op::DiffOp;
use crate::arith::{ModPoly, Monomial, Ring};
use crate::error::Result;

/// A vector field D = Σ g_i ∂_i on the coordinates of a ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    ring: Arc<Ring>,
    coeffs: Vec<ModPoly>,
}

impl Derivation {
    pub fn new(ring: &Arc<Ring>, coeffs: Vec<ModPoly>) -> Self {
        assert_eq!(coeffs.len(), ring.ncoords(), "one coefficient per coordinate");
        Derivation { ring: ring.clone(), coeffs }
    }

    pub fn zero(ring: &Arc<Ring>) -> Self {
        Self::new(ring, vec![ModPoly::zero(ring); ring.ncoords()])
    }

    /// The coordinate field ∂_i.
    pub fn partial(ring: &Arc<Ring>, i: usize) -> Self {
        let mut d = Self::zero(ring);
        d.coeffs[i] = ModPoly::one(ring);
        d
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[ModPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &ModPoly {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ModPoly::is_zero)
    }

    pub fn apply(&self, f: &ModPoly) -> ModPoly {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.is_zero())
            .fold(ModPoly::zero(&self.ring), |acc, (i, g)| acc.add(&g.mul(&f.derive(i))))
    }

    /// D applied `n` times.
    pub fn apply_iter(&self, f: &ModPoly, n: u64) -> ModPoly {
        let mut out = f.clone();
        for _ in 0..n {
            if out.is_zero() {
                break;
            }
            out = self.apply(&out);
        }
        out
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        Derivation::new(&self.ring, self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, other: &Derivation) -> Derivation {
        self.add(&other.scale_poly(&ModPoly::constant(&self.ring, -1)))
    }

    pub fn scale_poly(&self, f: &ModPoly) -> Derivation {
        Derivation::new(&self.ring, self.coeffs.iter().map(|g| f.mul(g)).collect())
    }

    /// [D, E] = Σ_i (D(E_i) − E(D_i)) ∂_i.
    pub fn bracket(&self, other: &Derivation) -> Derivation {
        Derivation::new(
            &self.ring,
            (0..self.coeffs.len())
                .map(|i| self.apply(&other.coeffs[i]).sub(&other.apply(&self.coeffs[i])))
                .collect(),
        )
    }

    /// The p-th iterate D^{∘p} as a derivation, via its values on the coordinates.
    pub fn iterate(&self, n: u64) -> Derivation {
        Derivation::new(
            &self.ring,
            (0..self.coeffs.len()).map(|i| self.apply_iter(&ModPoly::var(&self.ring, i), n)).collect(),
        )
    }

    /// D as a scalar element of Λ.
    pub fn to_op(&self) -> DiffOp {
        let n = self.ring.ncoords();
        self.coeffs.iter().enumerate().fold(DiffOp::zero(&self.ring, 1), |acc, (i, g)| {
            acc.add(&DiffOp::scalar(g.clone(), Monomial::unit(n, i)))
        })
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_op())
    }
}

/// ψ(D) = D^p − D^{∘p}, with D^p the product in Λ and D^{∘p} the iterated derivation.
pub fn p_curvature_derivation(d: &Derivation) -> Result<DiffOp> {
    let p = d.ring().p();
    let power = d.to_op().pow(p)?;
    Ok(power.sub(&d.iterate(p).to_op()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring;

    #[test]
    fn psi_of_coordinate_field_is_its_pth_power() {
        for q in [2, 3, 5, 7] {
            let r = ring(q, &["x", "y"], None).unwrap();
            for i in 0..2 {
                let psi = p_curvature_derivation(&Derivation::partial(&r, i)).unwrap();
                let expected = DiffOp::partial_power(&r, 1, Monomial::unit(2, i).scale(q as u32));
                assert_eq!(psi, expected);
            }
        }
    }

    #[test]
    fn psi_of_euler_field() {
        for q in [2, 3, 5, 7] {
            let r = ring(q, &["x"], None).unwrap();
            let x = ModPoly::var(&r, 0);
            let euler = Derivation::new(&r, vec![x.clone()]);
            let psi = p_curvature_derivation(&euler).unwrap();
            assert_eq!(psi, DiffOp::scalar(x.pow(q), Monomial::from_vec(vec![q as u32])));
            assert_eq!(euler.iterate(q), euler);
        }
    }

    #[test]
    fn psi_of_zero() {
        let r = ring(3, &["x"], None).unwrap();
        assert!(p_curvature_derivation(&Derivation::zero(&r)).unwrap().is_zero());
    }

    #[test]
    fn bracket_of_coordinate_fields_vanishes() {
        let r = ring(5, &["x", "y"], None).unwrap();
        assert!(Derivation::partial(&r, 0).bracket(&Derivation::partial(&r, 1)).is_zero());
        let x = ModPoly::var(&r, 0);
        let e = Derivation::new(&r, vec![x.clone(), ModPoly::zero(&r)]);
        assert_eq!(Derivation::partial(&r, 0).bracket(&e), Derivation::partial(&r, 0));
    }
}
