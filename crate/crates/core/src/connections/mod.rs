//! λ-connections on a free module of rank d over an affine patch.
//!
//! A connection is stored through its matrices A_1..A_m acting on column
//! vectors: ∇_{∂_i} v = λ ∂_i(v) + A_i v, with λ = 1 (de Rham), 0 (Higgs) or
//! the Rees parameter t (Hodge).

mod flat;
mod horizontal;
mod stratification;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use flat::{flat_sections, FlatSections};
pub use horizontal::{bracket_closure, horizontal_fields, p_power_closure, HorizontalField};
pub(crate) use stratification::mode_name;
pub use stratification::{cocycle_check, taylor_stratification, Stratification};

use crate::arith::{ModPoly, Monomial, PolyMatrix, Ring};
use crate::diffops::DiffOp;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightMode {
    /// λ = 1.
    Dr,
    /// λ = 0.
    Dol,
    /// λ = t.
    Hod,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Dr => "dr",
            WeightMode::Dol => "dol",
            WeightMode::Hod => "hod",
        })
    }
}

impl FromStr for WeightMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dr" => Ok(WeightMode::Dr),
            "dol" => Ok(WeightMode::Dol),
            "hod" => Ok(WeightMode::Hod),
            other => Err(format!("unknown weight mode `{other}` (expected dr, dol or hod)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionData {
    ring: Arc<Ring>,
    mode: WeightMode,
    rank: usize,
    matrices: Vec<PolyMatrix>,
}

/// Result of a p-curvature computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PCurvature {
    /// ψ(∂_i) as the order-0 matrix of (λ∂_i + A_i)^p.
    pub psi: Vec<PolyMatrix>,
    pub integrable: bool,
}

impl PCurvature {
    pub fn is_zero(&self) -> bool {
        self.psi.iter().all(PolyMatrix::is_zero)
    }
}

impl ConnectionData {
    pub fn new(ring: &Arc<Ring>, mode: WeightMode, matrices: Vec<PolyMatrix>) -> Result<Self> {
        if matrices.len() != ring.ncoords() {
            return Err(Error::Dimension(format!(
                "{} connection matrices for {} coordinates",
                matrices.len(),
                ring.ncoords()
            )));
        }
        if mode == WeightMode::Hod && ring.param().is_none() {
            return Err(Error::Precondition("Hodge mode needs a ring with parameter t".into()));
        }
        let rank = matrices.first().map_or(0, PolyMatrix::rows);
        for (i, a) in matrices.iter().enumerate() {
            if !a.is_square() || a.rows() != rank {
                return Err(Error::Dimension(format!("A{} is {}x{}, expected {rank}x{rank}", i + 1, a.rows(), a.cols())));
            }
            if !crate::arith::poly::same_ring(a.ring(), ring) {
                return Err(Error::RingMismatch(format!("A{}", i + 1)));
            }
        }
        Ok(ConnectionData { ring: ring.clone(), mode, rank, matrices })
    }

    /// All matrices zero.
    pub fn trivial(ring: &Arc<Ring>, mode: WeightMode, rank: usize) -> Result<Self> {
        Self::new(ring, mode, vec![PolyMatrix::zero(ring, rank, rank); ring.ncoords()])
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[PolyMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, i: usize) -> &PolyMatrix {
        &self.matrices[i]
    }

    pub fn lambda(&self) -> ModPoly {
        match self.mode {
            WeightMode::Dr => ModPoly::one(&self.ring),
            WeightMode::Dol => ModPoly::zero(&self.ring),
            WeightMode::Hod => ModPoly::param(&self.ring),
        }
    }

    pub fn with_mode(&self, mode: WeightMode) -> Result<Self> {
        Self::new(&self.ring, mode, self.matrices.clone())
    }

    /// ∇_{∂_i} as an element of Λ with matrix coefficients.
    pub fn op_form(&self, i: usize) -> DiffOp {
        let n = self.ring.ncoords();
        let lam = PolyMatrix::scalar(&self.ring, self.rank, &self.lambda());
        DiffOp::monomial(lam, Monomial::unit(n, i)).add(&DiffOp::from_coefficient(self.matrices[i].clone()))
    }

    /// ∇_{∂_i} applied to the columns of `v`.
    pub fn apply(&self, i: usize, v: &PolyMatrix) -> Result<PolyMatrix> {
        v.derive(i).mul_poly(&self.lambda()).try_add(&self.matrices[i].try_mul(v)?)
    }

    /// Checks ∇_i(f v) = λ ∂_i(f) v + f ∇_i(v) with the operator form.
    pub fn leibniz_check(&self, f: &ModPoly, v: &PolyMatrix) -> Result<bool> {
        for i in 0..self.nvars() {
            let op = self.op_form(i);
            let lhs = op.apply(&v.mul_poly(f))?;
            let rhs = v.mul_poly(&self.lambda().mul(&f.derive(i))).try_add(&op.apply(v)?.mul_poly(f))?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// K_ij = λ∂_i(A_j) − λ∂_j(A_i) + [A_i, A_j].
    pub fn curvature(&self, i: usize, j: usize) -> PolyMatrix {
        let lam = self.lambda();
        let (ai, aj) = (&self.matrices[i], &self.matrices[j]);
        aj.derive(i).sub(&ai.derive(j)).mul_poly(&lam).add(&ai.commutator(aj).expect("square matrices"))
    }

    pub fn is_integrable(&self) -> bool {
        self.first_curvature_witness().is_none()
    }

    /// The first pair (i, j) with K_ij ≠ 0.
    pub fn first_curvature_witness(&self) -> Option<(usize, usize, PolyMatrix)> {
        let m = self.nvars();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.curvature(i, j)))
            .find(|(_, _, k)| !k.is_zero())
    }

    /// (λ∂_i + A_i)^p in normal form.
    pub fn p_power_expansion(&self, i: usize) -> Result<DiffOp> {
        self.op_form(i).pow(self.ring.p())
    }

    /// ψ(∂_i) for every coordinate. Terms of order 0 < |α| must vanish and the
    /// top term must be λ^p ∂_i^p; anything else is reported as non-O-linear.
    pub fn p_curvature(&self) -> Result<PCurvature> {
        let p = self.ring.p();
        let n = self.ring.ncoords();
        let mut psi = Vec::with_capacity(n);
        for i in 0..self.nvars() {
            let expansion = self.p_power_expansion(i)?;
            let top = Monomial::unit(n, i).scale(p as u32);
            let lam_p = PolyMatrix::scalar(&self.ring, self.rank, &self.lambda().pow(p));
            for (alpha, c) in expansion.terms() {
                if alpha.is_zero() {
                    continue;
                }
                if *alpha == top && *c == lam_p {
                    continue;
                }
                return Err(Error::NotOLinear { var: i, witness: DiffOp::monomial(c.clone(), alpha.clone()).to_string() });
            }
            psi.push(expansion.order_zero());
        }
        Ok(PCurvature { psi, integrable: self.is_integrable() })
    }

    /// Whether ψ(∂_i) commutes with every ∇_j: λ∂_j(ψ_i) + [A_j, ψ_i] = 0.
    pub fn psi_is_horizontal(&self, pc: &PCurvature) -> bool {
        let lam = self.lambda();
        pc.psi.iter().all(|psi| {
            (0..self.nvars()).all(|j| {
                psi.derive(j)
                    .mul_poly(&lam)
                    .add(&self.matrices[j].commutator(psi).expect("square"))
                    .is_zero()
            })
        })
    }

    /// A_i ↦ S^{-1} A_i S + λ S^{-1} ∂_i(S); requires det S a nonzero constant.
    pub fn gauge_transform(&self, s: &PolyMatrix) -> Result<ConnectionData> {
        if s.rows() != self.rank || !s.is_square() {
            return Err(Error::Dimension(format!("gauge matrix must be {0}x{0}", self.rank)));
        }
        let s_inv = s.inverse()?;
        let lam = self.lambda();
        let matrices = self
            .matrices
            .iter()
            .enumerate()
            .map(|(i, a)| s_inv.mul(&a.mul(s)).add(&s_inv.mul(&s.derive(i)).mul_poly(&lam)))
            .collect();
        ConnectionData::new(&self.ring, self.mode, matrices)
    }
}

impl fmt::Display for ConnectionData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} connection of rank {}", self.mode, self.rank)?;
        for (i, a) in self.matrices.iter().enumerate() {
            write!(f, "; A{} = {}", i + 1, a)?;
        }
        Ok(())
    }
}

/// Free function form of [`ConnectionData::curvature`].
pub fn curvature(c: &ConnectionData, i: usize, j: usize) -> PolyMatrix {
    c.curvature(i, j)
}

pub fn p_curvature(c: &ConnectionData) -> Result<PCurvature> {
    c.p_curvature()
}

pub fn gauge_transform(c: &ConnectionData, s: &PolyMatrix) -> Result<ConnectionData> {
    c.gauge_transform(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring;

    fn m(r: &Arc<Ring>, s: &str) -> PolyMatrix {
        PolyMatrix::parse(r, s).unwrap()
    }

    #[test]
    fn curvature_examples() {
        let r = ring(5, &["x1", "x2"], None).unwrap();
        let c = ConnectionData::new(&r, WeightMode::Dr, vec![m(&r, "[[0, 1], [0, 0]]"), m(&r, "[[0, 0], [0, 0]]")]).unwrap();
        assert!(c.curvature(0, 1).is_zero());
        let c = ConnectionData::new(&r, WeightMode::Dr, vec![m(&r, "[[0, x2], [0, 0]]"), m(&r, "[[0, 0], [0, 0]]")]).unwrap();
        assert_eq!(c.curvature(0, 1), m(&r, "[[0, -1], [0, 0]]"));
        assert!(!c.is_integrable());
        // Higgs mode only sees the commutator
        let h = c.with_mode(WeightMode::Dol).unwrap();
        assert!(h.is_integrable());
    }

    #[test]
    fn p_curvature_examples() {
        let r = ring(2, &["x"], None).unwrap();
        let c = ConnectionData::new(&r, WeightMode::Dr, vec![m(&r, "[[x]]")]).unwrap();
        assert_eq!(c.p_curvature().unwrap().psi, vec![m(&r, "[[x^2 + 1]]")]);

        let r3 = ring(3, &["x"], None).unwrap();
        let cx = ModPoly::parse(&r3, "x^4 + 2*x^2 + x + 1").unwrap();
        let c = ConnectionData::new(&r3, WeightMode::Dr, vec![PolyMatrix::scalar(&r3, 1, &cx)]).unwrap();
        let expected = cx.pow(3).add(&cx.derive(0).derive(0));
        assert_eq!(c.p_curvature().unwrap().psi[0].get(0, 0), &expected);

        let z = ConnectionData::trivial(&r3, WeightMode::Dr, 2).unwrap();
        assert!(z.p_curvature().unwrap().is_zero());
    }

    #[test]
    fn gauge_of_trivial() {
        let r = ring(3, &["x"], None).unwrap();
        let s = m(&r, "[[1, x], [0, 1]]");
        let g = ConnectionData::trivial(&r, WeightMode::Dr, 2).unwrap().gauge_transform(&s).unwrap();
        assert_eq!(g.matrix(0), &s.inverse().unwrap().mul(&s.derive(0)));
        assert!(g.p_curvature().unwrap().is_zero());
        assert!(g.gauge_transform(&m(&r, "[[x, 0], [0, 1]]")).is_err());
    }

    #[test]
    fn hodge_mode_p_curvature_scales_by_t() {
        let r = ring(3, &["x"], Some("t")).unwrap();
        let c = ConnectionData::new(&r, WeightMode::Hod, vec![m(&r, "[[x]]")]).unwrap();
        // (t∂ + x)^3 = t^3 ∂^3 + x^3 because ∂^2(x) = 0
        let psi = c.p_curvature().unwrap().psi[0].get(0, 0).clone();
        assert_eq!(psi, ModPoly::parse(&r, "x^3").unwrap());
    }

    #[test]
    fn leibniz() {
        let r = ring(5, &["x", "y"], Some("t")).unwrap();
        for mode in [WeightMode::Dr, WeightMode::Dol, WeightMode::Hod] {
            let c = ConnectionData::new(&r, mode, vec![m(&r, "[[x, y], [1, 0]]"), m(&r, "[[0, x*y], [y^2, 3]]")]).unwrap();
            let f = ModPoly::parse(&r, "x^2*y + 3*x + t").unwrap();
            let v = m(&r, "[[y^3], [x + 1]]");
            assert!(c.leibniz_check(&f, &v).unwrap());
        }
    }
}
