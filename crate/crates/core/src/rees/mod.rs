//! Filtered modules and their Rees modules over F_p[x][t], Griffiths
//! transversality, associated Higgs fields, and conjugate triples.

mod conj;

use std::fmt;
use std::sync::Arc;

pub use conj::{conj_deform, kappa, mconj_member, ConjDeformation, ConjTriple};

use crate::arith::{FpMatrix, ModPoly, PolyMatrix, Ring};
use crate::connections::{mode_name, ConnectionData, WeightMode};
use crate::error::{Error, Result};

/// A free module O^d with a decreasing filtration by constant free summands,
/// stored through an adapted basis: F^n is spanned by the basis vectors of
/// weight >= n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredModule {
    ring: Arc<Ring>,
    vectors: Vec<Vec<u64>>,
    weights: Vec<u32>,
}

fn rank_of(ring: &Ring, vectors: &[Vec<u64>], d: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    FpMatrix::from_columns(ring.prime(), d, vectors).rank()
}

impl FilteredModule {
    /// The filtration with F^0 = O^d and F^1 = 0.
    pub fn trivial(ring: &Arc<Ring>, d: usize) -> Self {
        let vectors = (0..d).map(|i| (0..d).map(|j| u64::from(i == j)).collect()).collect();
        FilteredModule { ring: ring.clone(), vectors, weights: vec![0; d] }
    }

    /// `steps[n-1]` spans F^n for n >= 1; F^0 is everything. Each step must
    /// contain the next one.
    pub fn from_steps(ring: &Arc<Ring>, d: usize, steps: &[Vec<Vec<u64>>]) -> Result<Self> {
        let p = ring.prime();
        let steps: Vec<Vec<Vec<u64>>> =
            steps.iter().map(|s| s.iter().map(|v| v.iter().map(|&x| p.reduce(x)).collect()).collect()).collect();
        for (n, step) in steps.iter().enumerate() {
            if let Some(v) = step.iter().find(|v| v.len() != d) {
                return Err(Error::InvalidFiltration(format!("F^{} has a vector of length {}", n + 1, v.len())));
            }
            if rank_of(ring, step, d) != step.len() {
                return Err(Error::InvalidFiltration(format!("F^{} is spanned by dependent vectors", n + 1)));
            }
            if n > 0 {
                let mut joint = steps[n - 1].clone();
                joint.extend(step.iter().cloned());
                if rank_of(ring, &joint, d) != steps[n - 1].len() {
                    return Err(Error::InvalidFiltration(format!("F^{} is not contained in F^{}", n + 1, n)));
                }
            }
        }
        let mut vectors: Vec<Vec<u64>> = Vec::with_capacity(d);
        let mut weights = Vec::with_capacity(d);
        for n in (1..=steps.len()).rev() {
            for v in &steps[n - 1] {
                let mut probe = vectors.clone();
                probe.push(v.clone());
                if rank_of(ring, &probe, d) == probe.len() {
                    vectors = probe;
                    weights.push(n as u32);
                }
            }
        }
        for i in 0..d {
            let e: Vec<u64> = (0..d).map(|j| u64::from(i == j)).collect();
            let mut probe = vectors.clone();
            probe.push(e);
            if rank_of(ring, &probe, d) == probe.len() {
                vectors = probe;
                weights.push(0);
            }
        }
        Ok(FilteredModule { ring: ring.clone(), vectors, weights })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn vectors(&self) -> &[Vec<u64>] {
        &self.vectors
    }

    /// The adapted basis as the columns of a constant matrix over `ring`.
    pub fn basis_matrix(&self, ring: &Arc<Ring>) -> PolyMatrix {
        let d = self.rank();
        PolyMatrix::from_fn(ring, d, d, |i, j| ModPoly::constant(ring, self.vectors[j][i] as i64))
    }

    pub fn max_weight(&self) -> u32 {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    /// Basis vectors of F^n.
    pub fn step(&self, n: u32) -> Vec<Vec<u64>> {
        self.vectors.iter().zip(&self.weights).filter(|(_, &w)| w >= n).map(|(v, _)| v.clone()).collect()
    }

    /// Connection matrices in the adapted basis (a constant change of frame).
    pub fn adapted_matrices(&self, c: &ConnectionData) -> Result<Vec<PolyMatrix>> {
        let pm = self.basis_matrix(c.ring());
        let inv = pm.inverse()?;
        c.matrices().iter().map(|a| inv.try_mul(&a.try_mul(&pm)?)).collect()
    }
}

impl fmt::Display for FilteredModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, (v, w)) in self.vectors.iter().zip(&self.weights).enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            let parts: Vec<String> = v.iter().map(u64::to_string).collect();
            write!(f, "({}) @ {}", parts.join(", "), w)?;
        }
        Ok(())
    }
}

/// The Rees module ⊕_j F_p[x, t]·t^{-w_j} v_j, stored after multiplying by t^N
/// (N the largest weight) so that every generator t^{N−w_j} v_j is polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReesModule {
    ring: Arc<Ring>,
    shift: u32,
    weights: Vec<u32>,
    generators: PolyMatrix,
}

pub fn rees_build(v: &FilteredModule, t_name: &str) -> Result<ReesModule> {
    let ring = v.ring.with_param(t_name);
    let t = ModPoly::param(&ring);
    let shift = v.max_weight();
    let base = v.basis_matrix(&ring);
    let d = v.rank();
    let generators =
        PolyMatrix::from_fn(&ring, d, d, |i, j| base.get(i, j).mul(&t.pow(u64::from(shift - v.weights[j]))));
    Ok(ReesModule { ring, shift, weights: v.weights.clone(), generators })
}

/// A fiber of a Rees module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReesModuleFiber {
    /// t = t0 ≠ 0: a basis of the underlying module.
    Underlying(PolyMatrix),
    /// t = 0: (weight, vector) pairs spanning gr^weight.
    Graded(Vec<(u32, PolyMatrix)>),
}

impl ReesModule {
    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    /// Columns t^{N−w_j} v_j.
    pub fn generators(&self) -> &PolyMatrix {
        &self.generators
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// The generators are independent over F_p[x, t] (nonzero determinant),
    /// so the module is free and in particular has no t-torsion.
    pub fn is_free(&self) -> bool {
        self.generators.det().map(|d| !d.is_zero()).unwrap_or(false)
    }

    pub fn fiber(&self, t0: u64) -> ReesModuleFiber {
        let t = self.ring.param().expect("Rees modules carry t");
        let p = self.ring.prime();
        if p.reduce(t0) != 0 {
            // t0^{w_j − N} rescales each generator back to v_j
            let inv = p.inv(t0).unwrap();
            let d = self.generators.rows();
            let at = self.generators.specialize(t, t0);
            let scaled = PolyMatrix::from_fn(&self.ring, d, d, |i, j| {
                at.get(i, j).scale(p.pow(inv, u64::from(self.shift - self.weights[j])))
            });
            return ReesModuleFiber::Underlying(scaled);
        }
        // t^{-w_j} v_j spans t^{-w_j} F^{w_j}; modulo t it gives its class in gr^{w_j}
        let pieces = (0..self.generators.cols())
            .map(|j| (self.weights[j], self.generators.col(j).specialize(t, 1)))
            .collect();
        ReesModuleFiber::Graded(pieces)
    }
}

pub fn rees_fiber(r: &ReesModule, t0: u64) -> ReesModuleFiber {
    r.fiber(t0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GriffithsClass {
    /// ∇F^n ⊆ F^n ⊗ Ω.
    Preserves,
    /// ∇F^n ⊆ F^{n−1} ⊗ Ω but not always into F^n.
    Griffiths,
    Neither,
}

impl fmt::Display for GriffithsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GriffithsClass::Preserves => "PRESERVES",
            GriffithsClass::Griffiths => "GRIFFITHS",
            GriffithsClass::Neither => "NEITHER",
        })
    }
}

fn check_filtered_connection(v: &FilteredModule, c: &ConnectionData) -> Result<()> {
    if v.rank() != c.rank() {
        return Err(Error::Dimension(format!("filtration of rank {} for a rank-{} connection", v.rank(), c.rank())));
    }
    Ok(())
}

/// Classification read off the adapted matrices: entry (k, j) moves v_j into
/// weight w_k.
pub fn griffiths_check(v: &FilteredModule, c: &ConnectionData) -> Result<GriffithsClass> {
    check_filtered_connection(v, c)?;
    if c.mode() != WeightMode::Dr {
        return Err(Error::WrongMode { expected: "dr", got: mode_name(c.mode()) });
    }
    if let Some((i, j, k)) = c.first_curvature_witness() {
        return Err(Error::NotIntegrable { i: i + 1, j: j + 1, witness: k.to_string() });
    }
    let adapted = v.adapted_matrices(c)?;
    let w = &v.weights;
    let worst_drop = adapted
        .iter()
        .flat_map(|a| {
            let d = a.rows();
            (0..d).flat_map(move |k| (0..d).map(move |j| (k, j))).filter(|&(k, j)| !a.get(k, j).is_zero()).collect::<Vec<_>>()
        })
        .map(|(k, j)| i64::from(w[j]) - i64::from(w[k]))
        .max()
        .unwrap_or(0);
    Ok(match worst_drop {
        i64::MIN..=0 => GriffithsClass::Preserves,
        1 => GriffithsClass::Griffiths,
        _ => GriffithsClass::Neither,
    })
}

/// The same classification computed on the Rees module: with G the generator
/// matrix, the coefficients of ∇ (resp. t∇) on the generators are
/// adj(G)·A·G / det(G), and membership means every t-exponent of the
/// numerator is at least that of det(G).
pub fn griffiths_check_rees(v: &FilteredModule, c: &ConnectionData) -> Result<GriffithsClass> {
    check_filtered_connection(v, c)?;
    let r = rees_build(v, "t")?;
    let lifted_ring = r.ring().clone();
    let g = r.generators();
    let det = g.det()?;
    let t = lifted_ring.param().unwrap();
    let det_exp = det.terms().map(|(m, _)| m.get(t)).min().unwrap_or(0);
    let adj = g.adjugate()?;
    let mut preserves = true;
    let mut griffiths = true;
    for a in c.matrices() {
        let a = a.to_ring(&lifted_ring)?;
        let numer = adj.try_mul(&a.try_mul(g)?)?;
        for f in numer.entries() {
            if let Some(e) = f.terms().map(|(m, _)| m.get(t)).min() {
                preserves &= e >= det_exp;
                griffiths &= e + 1 >= det_exp;
            }
        }
    }
    Ok(if preserves {
        GriffithsClass::Preserves
    } else if griffiths {
        GriffithsClass::Griffiths
    } else {
        GriffithsClass::Neither
    })
}

/// The O-linear maps gr^n → gr^{n−1} ⊗ Ω induced by ∇ (the t = 0 fiber of t∇),
/// in the adapted basis. A Higgs (λ = 0) input is already graded and is
/// returned through its weight-preserving part.
pub fn associated_higgs(v: &FilteredModule, c: &ConnectionData) -> Result<Vec<PolyMatrix>> {
    check_filtered_connection(v, c)?;
    let drop = match c.mode() {
        WeightMode::Dol => 0,
        _ => {
            if griffiths_check(v, c)? == GriffithsClass::Neither {
                return Err(Error::Precondition("the connection is not Griffiths transverse".into()));
            }
            1
        }
    };
    let adapted = v.adapted_matrices(c)?;
    let w = &v.weights;
    Ok(adapted
        .iter()
        .map(|a| {
            let d = a.rows();
            PolyMatrix::from_fn(a.ring(), d, d, |k, j| {
                if i64::from(w[j]) - i64::from(w[k]) == drop {
                    a.get(k, j).clone()
                } else {
                    ModPoly::zero(a.ring())
                }
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring;

    fn conn(r: &Arc<Ring>, a: &str) -> ConnectionData {
        ConnectionData::new(r, WeightMode::Dr, vec![PolyMatrix::parse(r, a).unwrap()]).unwrap()
    }

    #[test]
    fn rees_examples() {
        let r = ring(3, &["x"], None).unwrap();
        let triv = FilteredModule::trivial(&r, 2);
        let rm = rees_build(&triv, "t").unwrap();
        assert!(rm.is_free());
        let id = PolyMatrix::identity(rm.ring(), 2);
        assert_eq!(rm.fiber(1), ReesModuleFiber::Underlying(id.clone()));

        let v = FilteredModule::from_steps(&r, 2, &[vec![vec![1, 0]]]).unwrap();
        assert_eq!(v.weights(), &[1, 0]);
        let rm = rees_build(&v, "t").unwrap();
        assert_eq!(rm.generators().to_string(), "[[1, 0], [0, t]]");
        assert_eq!(rm.fiber(1), ReesModuleFiber::Underlying(id));
        match rm.fiber(0) {
            ReesModuleFiber::Graded(pieces) => {
                let ws: Vec<u32> = pieces.iter().map(|(w, _)| *w).collect();
                assert_eq!(ws, vec![1, 0]);
            }
            other => panic!("{other:?}"),
        }
        assert!(FilteredModule::from_steps(&r, 2, &[vec![vec![1, 0]], vec![vec![0, 1]]]).is_err());
    }

    #[test]
    fn griffiths_examples() {
        let r = ring(5, &["x"], None).unwrap();
        let v = FilteredModule::from_steps(&r, 2, &[vec![vec![1, 0]]]).unwrap();
        let down = conn(&r, "[[0, 0], [1, 0]]");
        assert_eq!(griffiths_check(&v, &down).unwrap(), GriffithsClass::Griffiths);
        assert_eq!(griffiths_check_rees(&v, &down).unwrap(), GriffithsClass::Griffiths);
        assert_eq!(associated_higgs(&v, &down).unwrap()[0], PolyMatrix::parse(&r, "[[0, 0], [1, 0]]").unwrap());

        let keep = conn(&r, "[[1, 0], [0, 0]]");
        assert_eq!(griffiths_check(&v, &keep).unwrap(), GriffithsClass::Preserves);
        assert_eq!(griffiths_check_rees(&v, &keep).unwrap(), GriffithsClass::Preserves);
        assert!(associated_higgs(&v, &keep).unwrap()[0].is_zero());

        let triv = FilteredModule::trivial(&r, 2);
        assert_eq!(griffiths_check(&triv, &down).unwrap(), GriffithsClass::Preserves);

        let three = FilteredModule::from_steps(&r, 3, &[vec![vec![1, 0, 0], vec![0, 1, 0]], vec![vec![1, 0, 0]]]).unwrap();
        let jump = conn(&r, "[[0, 0, 0], [0, 0, 0], [1, 0, 0]]");
        assert_eq!(griffiths_check(&three, &jump).unwrap(), GriffithsClass::Neither);
        assert_eq!(griffiths_check_rees(&three, &jump).unwrap(), GriffithsClass::Neither);
    }

    #[test]
    fn higgs_input_is_its_own_graded() {
        let r = ring(3, &["x"], None).unwrap();
        let a = PolyMatrix::parse(&r, "[[0, x], [0, 0]]").unwrap();
        let h = ConnectionData::new(&r, WeightMode::Dol, vec![a.clone()]).unwrap();
        assert_eq!(associated_higgs(&FilteredModule::trivial(&r, 2), &h).unwrap(), vec![a]);
    }
}
