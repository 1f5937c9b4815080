use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{ConnectionData, WeightMode};
use crate::arith::{Monomial, PolyMatrix, Ring};
use crate::error::{Error, Result};
use crate::pd::{PDElement, PDTensorElement};

/// ε = Σ_{|α|<=n} M_α τ^[α], stored as a d x d matrix of PD elements; column s
/// is the image of the frame vector e_s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratification {
    ring: Arc<Ring>,
    rank: usize,
    level: u32,
    entries: Vec<PDElement>,
}

impl Stratification {
    pub fn from_entries(ring: &Arc<Ring>, rank: usize, level: u32, entries: Vec<PDElement>) -> Result<Self> {
        if entries.len() != rank * rank {
            return Err(Error::Dimension(format!("{} entries for rank {rank}", entries.len())));
        }
        if let Some(e) = entries.iter().find(|e| e.level() != level) {
            return Err(Error::LevelMismatch { left: e.level(), right: level });
        }
        Ok(Stratification { ring: ring.clone(), rank, level, entries })
    }

    /// Assembles ε from the matrices M_α.
    pub fn from_matrices(ring: &Arc<Ring>, rank: usize, level: u32, ms: &BTreeMap<Monomial, PolyMatrix>) -> Self {
        let mut entries = vec![PDElement::zero(ring, level); rank * rank];
        for (alpha, m) in ms {
            for r in 0..rank {
                for s in 0..rank {
                    let term = PDElement::monomial(m.get(r, s).clone(), alpha.clone(), level);
                    entries[r * rank + s] = entries[r * rank + s].add(&term);
                }
            }
        }
        Stratification { ring: ring.clone(), rank, level, entries }
    }

    /// Entrywise PD Taylor expansion of a matrix: g(x) ↦ g(x + τ).
    pub fn taylor_of(m: &PolyMatrix, level: u32) -> Self {
        let d = m.rows();
        let entries = m.entries().iter().map(|g| PDElement::taylor(g, level)).collect();
        Stratification { ring: m.ring().clone(), rank: d, level, entries }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn get(&self, r: usize, s: usize) -> &PDElement {
        &self.entries[r * self.rank + s]
    }

    pub fn set(&mut self, r: usize, s: usize, e: PDElement) {
        assert_eq!(e.level(), self.level);
        self.entries[r * self.rank + s] = e;
    }

    pub fn entries(&self) -> &[PDElement] {
        &self.entries
    }

    /// M_α: the coefficient matrix of τ^[α].
    pub fn coefficient(&self, alpha: &Monomial) -> PolyMatrix {
        PolyMatrix::from_fn(&self.ring, self.rank, self.rank, |r, s| self.get(r, s).coefficient(alpha))
    }

    /// ε mod (τ).
    pub fn counit(&self) -> PolyMatrix {
        PolyMatrix::from_fn(&self.ring, self.rank, self.rank, |r, s| self.get(r, s).counit())
    }

    /// The matrices M_{e_i}, i.e. the connection recovered from level 1.
    pub fn level_one_matrices(&self) -> Vec<PolyMatrix> {
        let n = self.ring.ncoords();
        (0..n).map(|i| self.coefficient(&Monomial::unit(n, i))).collect()
    }

    /// Matrix product with the PD algebra's own multiplication.
    pub fn mul(&self, other: &Stratification) -> Result<Stratification> {
        if self.rank != other.rank {
            return Err(Error::Dimension("stratification ranks differ".into()));
        }
        let d = self.rank;
        let mut entries = Vec::with_capacity(d * d);
        for r in 0..d {
            for s in 0..d {
                let mut acc = PDElement::zero(&self.ring, self.level);
                for k in 0..d {
                    acc = acc.try_add(&self.get(r, k).pd_mul(other.get(k, s))?)?;
                }
                entries.push(acc);
            }
        }
        Stratification::from_entries(&self.ring, d, self.level, entries)
    }

    /// Entrywise image in P/I.
    pub fn quotient_mod_i(&self) -> Stratification {
        Stratification {
            ring: self.ring.clone(),
            rank: self.rank,
            level: self.level,
            entries: self.entries.iter().map(PDElement::quotient_mod_i).collect(),
        }
    }

    /// Whether every entry is the corresponding entry of the identity matrix.
    pub fn is_identity(&self) -> bool {
        let d = self.rank;
        (0..d).all(|r| {
            (0..d).all(|s| {
                let e = self.get(r, s);
                if r == s {
                    *e == PDElement::one(&self.ring, self.level)
                } else {
                    e.is_zero()
                }
            })
        })
    }
}

impl fmt::Display for Stratification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rank {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for s in 0..self.rank {
                if s > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, s))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// ε for an integrable de Rham connection: M_0 = I, M_{α+e_i} = ∂_i(M_α) + A_i M_α.
pub fn taylor_stratification(c: &ConnectionData, n: u32) -> Result<Stratification> {
    if c.mode() != WeightMode::Dr {
        return Err(Error::WrongMode { expected: "dr", got: mode_name(c.mode()) });
    }
    if let Some((i, j, k)) = c.first_curvature_witness() {
        return Err(Error::NotIntegrable { i: i + 1, j: j + 1, witness: k.to_string() });
    }
    let ring = c.ring();
    let m = ring.ncoords();
    let d = c.rank();
    let mut ms: BTreeMap<Monomial, PolyMatrix> = BTreeMap::new();
    ms.insert(Monomial::zero(m), PolyMatrix::identity(ring, d));
    for alpha in Monomial::all_up_to(m, n) {
        if alpha.is_zero() {
            continue;
        }
        // integrability makes the choice of the last step irrelevant
        let i = (0..m).find(|&i| alpha.get(i) > 0).unwrap();
        let prev = alpha.with(i, alpha.get(i) - 1);
        let next = c.apply(i, &ms[&prev])?;
        ms.insert(alpha, next);
    }
    Ok(Stratification::from_matrices(ring, d, n, &ms))
}

pub(crate) fn mode_name(mode: WeightMode) -> &'static str {
    match mode {
        WeightMode::Dr => "dr",
        WeightMode::Dol => "dol",
        WeightMode::Hod => "hod",
    }
}

/// Both sides of the cocycle identity Δ(ε) = ε_(1) · ε_(2), where the second
/// factor's coefficients are transported across the tensor by Taylor expansion.
pub fn cocycle_sides(s: &Stratification) -> Result<(Vec<PDTensorElement>, Vec<PDTensorElement>)> {
    let d = s.rank;
    let n = s.level;
    let lefts: Vec<PDTensorElement> = s.entries.iter().map(PDTensorElement::from_left).collect();
    let rights: Vec<PDTensorElement> = s.entries.iter().map(PDTensorElement::from_right).collect();
    let mut delta = Vec::with_capacity(d * d);
    let mut composed = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in 0..d {
            delta.push(s.get(r, c).comultiply().truncate_total(n));
            let mut acc = PDTensorElement::zero(&s.ring, n);
            for k in 0..d {
                acc = acc.try_add(&lefts[r * d + k].mul(&rights[k * d + c])?)?;
            }
            composed.push(acc.truncate_total(n));
        }
    }
    Ok((delta, composed))
}

/// ε mod τ = I and Δ(ε) = ε_(1) · ε_(2) up to total PD degree n.
pub fn cocycle_check(s: &Stratification) -> Result<bool> {
    if s.counit() != PolyMatrix::identity(&s.ring, s.rank) {
        return Ok(false);
    }
    let (delta, composed) = cocycle_sides(s)?;
    Ok(delta == composed)
}
