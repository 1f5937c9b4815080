use std::collections::HashMap;

use super::stratification::mode_name;
use super::{ConnectionData, WeightMode};
use crate::arith::{FpMatrix, ModPoly, Monomial, PolyMatrix};
use crate::error::{Error, Result};

/// A frame of flat sections found by exact linear algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatSections {
    /// d x d matrix whose columns are flat; its determinant is a nonzero constant.
    pub frame: PolyMatrix,
    /// F_p-dimension of the flat sections of degree <= `bound`.
    pub solution_dim: usize,
    pub bound: u32,
}

impl FlatSections {
    pub fn columns(&self) -> Vec<PolyMatrix> {
        (0..self.frame.cols()).map(|j| self.frame.col(j)).collect()
    }
}

/// p · (max entry degree + 1).
pub fn default_flat_bound(c: &ConnectionData) -> u32 {
    let deg = c.matrices().iter().filter_map(PolyMatrix::coord_degree).max().unwrap_or(0);
    c.ring().p() as u32 * (deg + 1)
}

/// Solves ∇_i v = 0 for all i on sections of degree <= `bound` and extracts a
/// frame: solutions are taken in order of increasing leading degree, keeping
/// those whose values at the origin are independent. The frame is normalized
/// to equal the identity at the origin.
pub fn flat_sections(c: &ConnectionData, bound: Option<u32>) -> Result<FlatSections> {
    if c.mode() != WeightMode::Dr {
        return Err(Error::WrongMode { expected: "dr", got: mode_name(c.mode()) });
    }
    if c.ring().param().is_some() {
        return Err(Error::Precondition("flat sections are computed over a ring without parameter".into()));
    }
    if let Some((i, j, k)) = c.first_curvature_witness() {
        return Err(Error::NotIntegrable { i: i + 1, j: j + 1, witness: k.to_string() });
    }
    let bound = bound.unwrap_or_else(|| default_flat_bound(c));
    let ring = c.ring();
    let prime = ring.prime();
    let m = ring.ncoords();
    let d = c.rank();

    // unknowns ordered by descending degree so that row reduction pivots on leading terms
    let mut monos = Monomial::all_up_to(m, bound);
    monos.reverse();
    let unknowns: Vec<(Monomial, usize)> = monos.iter().flat_map(|mu| (0..d).map(move |s| (mu.clone(), s))).collect();

    let mut row_index: HashMap<(usize, usize, Monomial), usize> = HashMap::new();
    let mut columns: Vec<Vec<(usize, u64)>> = Vec::with_capacity(unknowns.len());
    for (mu, s) in &unknowns {
        let mut entries = vec![ModPoly::zero(ring); d];
        entries[*s] = ModPoly::monomial(ring, mu.clone(), 1);
        let v = PolyMatrix::column(ring, entries);
        let mut col = Vec::new();
        for i in 0..m {
            let image = c.apply(i, &v)?;
            for r in 0..d {
                for (mono, coef) in image.get(r, 0).terms() {
                    let next = row_index.len();
                    let row = *row_index.entry((i, r, mono.clone())).or_insert(next);
                    col.push((row, coef));
                }
            }
        }
        columns.push(col);
    }
    let mut system = FpMatrix::zero(prime, row_index.len(), unknowns.len());
    for (j, col) in columns.iter().enumerate() {
        for &(i, v) in col {
            system.set(i, j, v);
        }
    }
    let kernel = system.nullspace();
    let solution_dim = kernel.len();

    // echelon form of the kernel: every row has a distinct leading (highest) term
    let mut ech = FpMatrix::zero(prime, kernel.len(), unknowns.len());
    for (i, v) in kernel.iter().enumerate() {
        for (j, &x) in v.iter().enumerate() {
            ech.set(i, j, x);
        }
    }
    let pivots = ech.rref();
    let origin: Vec<usize> = (0..d).map(|s| unknowns.len() - d + s).collect();
    let mut chosen: Vec<Vec<u64>> = Vec::new();
    let mut frame_cols: Vec<PolyMatrix> = Vec::new();
    for row in (0..pivots.len()).rev() {
        if chosen.len() == d {
            break;
        }
        let at_origin: Vec<u64> = origin.iter().map(|&j| ech.get(row, j)).collect();
        let mut probe = chosen.clone();
        probe.push(at_origin);
        if FpMatrix::from_columns(prime, d, &probe).rank() < probe.len() {
            continue;
        }
        chosen = probe;
        let mut entries = vec![ModPoly::zero(ring); d];
        for (j, (mu, s)) in unknowns.iter().enumerate() {
            let v = ech.get(row, j);
            if v != 0 {
                entries[*s] = entries[*s].add(&ModPoly::monomial(ring, mu.clone(), v));
            }
        }
        frame_cols.push(PolyMatrix::column(ring, entries));
    }
    let deficient = Error::FlatSectionsDeficient { found: frame_cols.len(), rank: d, bound };
    if frame_cols.len() < d {
        return Err(deficient);
    }
    let frame = PolyMatrix::from_columns(ring, &frame_cols)?;
    match frame.det()?.constant_value() {
        Some(v) if v != 0 => {
            // normalize to the identity at the origin
            let at_origin = frame.map(|f| ModPoly::constant(ring, f.coeff(&Monomial::zero(m)) as i64));
            let frame = frame.mul(&at_origin.inverse()?);
            Ok(FlatSections { frame, solution_dim, bound })
        }
        _ => Err(deficient),
    }
}
