use std::sync::Arc;

use crate::arith::{ModPoly, PolyMatrix, Prime, Ring};
use crate::connections::{mode_name, ConnectionData, WeightMode};
use crate::error::{Error, Result};
use crate::frobenius::{frobenius_pullback, CartierSplitting};

/// (∇, ψ) over F_p[x][t] with pairwise commuting O-linear ψ_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjTriple {
    connection: ConnectionData,
    psi: Vec<PolyMatrix>,
}

fn first_noncommuting(ms: &[PolyMatrix]) -> Result<Option<(usize, usize)>> {
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            if !ms[i].commutator(&ms[j])?.is_zero() {
                return Ok(Some((i + 1, j + 1)));
            }
        }
    }
    Ok(None)
}

impl ConjTriple {
    pub fn new(connection: ConnectionData, psi: Vec<PolyMatrix>) -> Result<Self> {
        let ring = connection.ring().clone();
        if ring.param().is_none() {
            return Err(Error::Precondition("conjugate triples live over a ring with parameter t".into()));
        }
        if connection.mode() != WeightMode::Dr {
            return Err(Error::WrongMode { expected: "dr", got: mode_name(connection.mode()) });
        }
        if psi.len() != connection.nvars() {
            return Err(Error::Dimension(format!("{} ψ matrices for {} coordinates", psi.len(), connection.nvars())));
        }
        let d = connection.rank();
        let psi = psi
            .iter()
            .map(|m| {
                if m.rows() != d || !m.is_square() {
                    return Err(Error::Dimension(format!("ψ matrices must be {d}x{d}")));
                }
                m.to_ring(&ring)
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some((i, j)) = first_noncommuting(&psi)? {
            return Err(Error::NonCommuting(i, j));
        }
        Ok(ConjTriple { connection, psi })
    }

    pub fn connection(&self) -> &ConnectionData {
        &self.connection
    }

    pub fn psi(&self) -> &[PolyMatrix] {
        &self.psi
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.connection.ring()
    }

    /// Gauge transform of ∇ by S together with ψ ↦ S^{-1}ψS.
    pub fn gauge(&self, s: &PolyMatrix) -> Result<ConjTriple> {
        let s = s.to_ring(self.ring())?;
        let inv = s.inverse()?;
        let psi = self.psi.iter().map(|m| inv.try_mul(&m.try_mul(&s)?)).collect::<Result<Vec<_>>>()?;
        Ok(ConjTriple { connection: self.connection.gauge_transform(&s)?, psi })
    }
}

/// Whether the p-curvature of ∇ equals t^p·ψ.
pub fn mconj_member(triple: &ConjTriple) -> Result<bool> {
    let c = &triple.connection;
    if let Some((i, j, k)) = c.first_curvature_witness() {
        return Err(Error::NotIntegrable { i: i + 1, j: j + 1, witness: k.to_string() });
    }
    let ring = c.ring();
    let tp = ModPoly::param(ring).pow(ring.p());
    let pc = c.p_curvature()?;
    Ok(pc.psi.iter().zip(&triple.psi).all(|(lhs, psi)| *lhs == psi.mul_poly(&tp)))
}

/// (p−1)! mod p.
pub fn kappa(p: Prime) -> u64 {
    (1..p.get()).fold(1, |acc, k| p.mul(acc, k))
}

/// The family ∇ = ∇_can + t^e·ζ(F*ψ') over F_p[x][t] with its measurements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjDeformation {
    /// (∇, κ·F*ψ').
    pub triple: ConjTriple,
    /// F*ψ' without normalization.
    pub raw_psi: Vec<PolyMatrix>,
    pub kappa: u64,
    pub exponent: u32,
    pub p_curvature: Vec<PolyMatrix>,
    /// Smallest power of t among the p-curvature entries; `None` if it vanishes.
    pub measured_exponent: Option<u32>,
    pub integrable: bool,
    /// Σ_j A_j dx_j is closed.
    pub closed: bool,
    pub member: bool,
}

/// Builds the deformation from Higgs matrices B'_i over the Frobenius twist of
/// `zeta.base()`. The B'_i must commute pairwise and satisfy B'^p = 0.
pub fn conj_deform(higgs: &[PolyMatrix], zeta: &CartierSplitting, exponent: u32, t_name: &str) -> Result<ConjDeformation> {
    let base = zeta.base();
    let p = base.prime();
    let m = base.ncoords();
    if higgs.len() != m {
        return Err(Error::Dimension(format!("{} Higgs matrices for {m} coordinates", higgs.len())));
    }
    let d = higgs.first().map_or(0, PolyMatrix::rows);
    if let Some((i, j)) = first_noncommuting(higgs)? {
        return Err(Error::NonCommuting(i, j));
    }
    for (i, b) in higgs.iter().enumerate() {
        if !b.is_square() || b.rows() != d {
            return Err(Error::Dimension(format!("Higgs matrix {} must be {d}x{d}", i + 1)));
        }
        if !b.pow(p.get())?.is_zero() {
            return Err(Error::NotNilpotent(i + 1));
        }
    }
    let pulled = frobenius_pullback(&base.without_param(), d, higgs)?;
    let ring = base.with_param(t_name);
    let raw_psi = pulled.higgs.iter().map(|b| b.to_ring(&ring)).collect::<Result<Vec<_>>>()?;
    let te = ModPoly::param(&ring).pow(u64::from(exponent));
    let matrices: Vec<PolyMatrix> = zeta.apply_matrices(&raw_psi)?.iter().map(|a| a.mul_poly(&te)).collect();
    let closed = (0..m).all(|i| (i + 1..m).all(|j| matrices[j].derive(i) == matrices[i].derive(j)));
    let connection = ConnectionData::new(&ring, WeightMode::Dr, matrices)?;
    let integrable = connection.is_integrable();
    let k = kappa(p);
    let psi: Vec<PolyMatrix> = raw_psi.iter().map(|b| b.scale(k)).collect();
    let pc = connection.p_curvature()?.psi;
    let t = ring.param().expect("ring with parameter");
    let measured_exponent = pc.iter().flat_map(|a| a.entries()).flat_map(|f| f.terms().map(|(mo, _)| mo.get(t))).min();
    let triple = ConjTriple::new(connection, psi)?;
    let member = integrable && mconj_member(&triple)?;
    Ok(ConjDeformation {
        triple,
        raw_psi,
        kappa: k,
        exponent,
        p_curvature: pc,
        measured_exponent,
        integrable,
        closed,
        member,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring;
    use crate::frobenius::{cartier_splitting, twisted_ring};

    fn triple(r: &Arc<Ring>, a: &str, psi: &str) -> ConjTriple {
        let c = ConnectionData::new(r, WeightMode::Dr, vec![PolyMatrix::parse(r, a).unwrap()]).unwrap();
        ConjTriple::new(c, vec![PolyMatrix::parse(r, psi).unwrap()]).unwrap()
    }

    #[test]
    fn membership_examples() {
        for p in [2u64, 3] {
            let r = ring(p, &["x"], Some("t")).unwrap();
            let a = format!("[[0, t^{p}*x^{}*(x^{p} + 1)], [0, 0]]", p - 1);
            let psi = format!("[[0, -(x^{p} + 1)], [0, 0]]");
            assert!(mconj_member(&triple(&r, &a, &psi)).unwrap(), "p = {p}");
        }
        let r = ring(2, &["x"], Some("t")).unwrap();
        assert!(mconj_member(&triple(&r, "[[0, 0], [0, 0]]", "[[0, 0], [0, 0]]")).unwrap());
        assert!(!mconj_member(&triple(&r, "[[x]]", "[[0]]")).unwrap());
    }

    #[test]
    fn gauge_invariance() {
        let r = ring(3, &["x"], Some("t")).unwrap();
        let tr = triple(&r, "[[0, t^3*x^2*(x^3 + 1)], [0, 0]]", "[[0, -(x^3 + 1)], [0, 0]]");
        let s = PolyMatrix::parse(&r, "[[1, 0], [x + t, 1]]").unwrap();
        let moved = tr.gauge(&s).unwrap();
        assert_ne!(moved, tr);
        assert!(mconj_member(&moved).unwrap());
    }

    #[test]
    fn deformation_examples() {
        let r = ring(3, &["x"], None).unwrap();
        let rp = twisted_ring(&r);
        let b = PolyMatrix::parse(&rp, "[[0, x' + 1], [0, 0]]").unwrap();
        let zeta = CartierSplitting::standard(&r);
        let dp = conj_deform(std::slice::from_ref(&b), &zeta, 3, "t").unwrap();
        assert!(dp.integrable && dp.closed && dp.member);
        assert_eq!(dp.kappa, 2);
        assert_eq!(dp.measured_exponent, Some(3));
        let rt = dp.triple.ring().clone();
        assert_eq!(dp.p_curvature[0], PolyMatrix::parse(&rt, "[[0, -t^3*(x^3 + 1)], [0, 0]]").unwrap());

        let d1 = conj_deform(std::slice::from_ref(&b), &zeta, 1, "t").unwrap();
        assert_eq!(d1.measured_exponent, Some(1));
        assert!(!d1.member);

        let zero = PolyMatrix::zero(&rp, 2, 2);
        let d0 = conj_deform(&[zero], &zeta, 3, "t").unwrap();
        assert!(d0.member && d0.measured_exponent.is_none());

        let lifted = cartier_splitting(&r, vec![ModPoly::parse(&r, "x^2").unwrap()]).unwrap();
        assert!(conj_deform(&[b], &lifted, 3, "t").unwrap().member);
    }

    #[test]
    fn rejects_bad_higgs() {
        let r = ring(2, &["x", "y"], None).unwrap();
        let rp = twisted_ring(&r);
        let zeta = CartierSplitting::standard(&r);
        let e12 = PolyMatrix::parse(&rp, "[[0, 1], [0, 0]]").unwrap();
        let e21 = PolyMatrix::parse(&rp, "[[0, 0], [1, 0]]").unwrap();
        assert!(matches!(conj_deform(&[e12.clone(), e21], &zeta, 2, "t"), Err(Error::NonCommuting(1, 2))));
        let unip = PolyMatrix::parse(&rp, "[[1, 0], [0, 0]]").unwrap();
        let zero = PolyMatrix::zero(&rp, 2, 2);
        assert!(matches!(conj_deform(&[unip, zero], &zeta, 2, "t"), Err(Error::NotNilpotent(1))));
    }
}
