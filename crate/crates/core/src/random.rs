//! Seeded random fixtures for property suites and the self-test.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{ModPoly, Monomial, PolyMatrix, Ring};
use crate::connections::{ConnectionData, WeightMode};
use crate::diffops::{DiffOp, Derivation, ReesOpElement};
use crate::error::Result;
use crate::rees::FilteredModule;

/// Flavours of random connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    /// Gauge transform of the trivial connection by a determinant-one matrix.
    GaugeFlat,
    /// Diagonal A_i = diag(∂_i g_k): integrable, usually with nonzero p-curvature.
    ClosedLog,
    /// Independent random entries.
    Unstructured,
}

/// A deterministic fixture generator.
pub struct Fixtures {
    rng: ChaCha8Rng,
}

impl Fixtures {
    pub fn new(seed: u64) -> Self {
        Fixtures { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn scalar(&mut self, ring: &Ring) -> u64 {
        self.rng.gen_range(0..ring.p())
    }

    fn coord_monomial(&mut self, ring: &Ring, max_deg: u32) -> Monomial {
        let mut exps = vec![0u32; ring.nvars()];
        let deg = self.rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            if ring.ncoords() > 0 {
                exps[self.rng.gen_range(0..ring.ncoords())] += 1;
            }
        }
        Monomial::from_vec(exps)
    }

    /// Up to `terms` random terms in the coordinates, of degree <= `max_deg`.
    pub fn poly(&mut self, ring: &Arc<Ring>, max_deg: u32, terms: usize) -> ModPoly {
        let ts: Vec<(Monomial, u64)> =
            (0..terms).map(|_| (self.coord_monomial(ring, max_deg), self.rng.gen_range(1..ring.p()))).collect();
        ModPoly::from_terms(ring, ts)
    }

    pub fn matrix(&mut self, ring: &Arc<Ring>, rows: usize, cols: usize, max_deg: u32) -> PolyMatrix {
        PolyMatrix::from_fn(ring, rows, cols, |_, _| self.poly(ring, max_deg, 2))
    }

    /// L·U with unit-triangular random factors, so det = 1.
    pub fn unimodular(&mut self, ring: &Arc<Ring>, d: usize, max_deg: u32) -> PolyMatrix {
        let mut lower = PolyMatrix::identity(ring, d);
        let mut upper = PolyMatrix::identity(ring, d);
        for i in 0..d {
            for j in 0..i {
                lower.set(i, j, self.poly(ring, max_deg, 2));
                upper.set(j, i, self.poly(ring, max_deg, 2));
            }
        }
        lower.mul(&upper)
    }

    /// An invertible constant matrix.
    pub fn constant_invertible(&mut self, ring: &Arc<Ring>, d: usize) -> PolyMatrix {
        let mut perm: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            perm.swap(i, self.rng.gen_range(0..=i));
        }
        let lu = self.unimodular(ring, d, 0);
        PolyMatrix::from_fn(ring, d, d, |i, j| lu.get(perm[i], j).clone())
    }

    pub fn connection(&mut self, ring: &Arc<Ring>, kind: ConnectionKind, d: usize, max_deg: u32) -> Result<ConnectionData> {
        let m = ring.ncoords();
        match kind {
            ConnectionKind::GaugeFlat => {
                let s = self.unimodular(ring, d, max_deg);
                ConnectionData::trivial(ring, WeightMode::Dr, d)?.gauge_transform(&s)
            }
            ConnectionKind::ClosedLog => {
                let gs: Vec<ModPoly> = (0..d).map(|_| self.poly(ring, max_deg + 1, 2)).collect();
                let ms = (0..m)
                    .map(|i| PolyMatrix::from_fn(ring, d, d, |r, s| if r == s { gs[r].derive(i) } else { ModPoly::zero(ring) }))
                    .collect();
                ConnectionData::new(ring, WeightMode::Dr, ms)
            }
            ConnectionKind::Unstructured => {
                let ms = (0..m).map(|_| self.matrix(ring, d, d, max_deg)).collect();
                ConnectionData::new(ring, WeightMode::Dr, ms)
            }
        }
    }

    /// `count` connections of rank <= `max_rank`: half gauge-flat, the rest split
    /// between closed-log and unstructured.
    pub fn connection_corpus(
        &mut self,
        ring: &Arc<Ring>,
        count: usize,
        max_rank: usize,
        max_deg: u32,
    ) -> Result<Vec<ConnectionData>> {
        (0..count)
            .map(|n| {
                let kind = match n % 4 {
                    0 | 2 => ConnectionKind::GaugeFlat,
                    1 => ConnectionKind::ClosedLog,
                    _ => ConnectionKind::Unstructured,
                };
                let d = self.rng.gen_range(1..=max_rank);
                self.connection(ring, kind, d, max_deg)
            })
            .collect()
    }

    pub fn derivation(&mut self, ring: &Arc<Ring>, max_deg: u32) -> Derivation {
        let coeffs = (0..ring.ncoords()).map(|_| self.poly(ring, max_deg, 2)).collect();
        Derivation::new(ring, coeffs)
    }

    /// A filtration with weights in 0..=`max_weight` on a random constant basis.
    pub fn filtration(&mut self, ring: &Arc<Ring>, d: usize, max_weight: u32) -> Result<FilteredModule> {
        let basis = self.constant_invertible(ring, d);
        let weights: Vec<u32> = (0..d).map(|_| self.rng.gen_range(0..=max_weight)).collect();
        let top = weights.iter().copied().max().unwrap_or(0);
        let steps: Vec<Vec<Vec<u64>>> = (1..=top)
            .map(|n| {
                (0..d)
                    .filter(|&j| weights[j] >= n)
                    .map(|j| (0..d).map(|i| basis.get(i, j).coeff(&Monomial::zero(ring.nvars()))).collect())
                    .collect()
            })
            .collect();
        FilteredModule::from_steps(ring, d, &steps)
    }

    /// A connection on a one-variable ring that is Griffiths transverse to `v`
    /// (and preserves it when `preserve` holds).
    pub fn griffiths_connection(&mut self, v: &FilteredModule, max_deg: u32, preserve: bool) -> Result<ConnectionData> {
        let ring = v.ring();
        let d = v.rank();
        let w = v.weights();
        let slack = if preserve { 0 } else { 1 };
        let adapted = PolyMatrix::from_fn(ring, d, d, |k, j| {
            if w[k] + slack >= w[j] {
                self.poly(ring, max_deg, 2)
            } else {
                ModPoly::zero(ring)
            }
        });
        let pm = v.basis_matrix(ring);
        let a = pm.try_mul(&adapted)?.try_mul(&pm.inverse()?)?;
        let ms = (0..ring.ncoords()).map(|i| if i == 0 { a.clone() } else { PolyMatrix::zero(ring, d, d) }).collect();
        ConnectionData::new(ring, WeightMode::Dr, ms)
    }

    /// Lift terms h_i for a Frobenius lift x_i^p + p·h_i.
    pub fn lift(&mut self, ring: &Arc<Ring>, max_deg: u32) -> Vec<ModPoly> {
        (0..ring.ncoords()).map(|_| self.poly(ring, max_deg, 2)).collect()
    }

    /// Σ t^{|α|+j} f ∂^α with |α| <= `max_order`; `ring` must carry t.
    pub fn hodge_element(&mut self, ring: &Arc<Ring>, max_order: u32, max_deg: u32) -> Result<ReesOpElement> {
        let t = ModPoly::param(ring);
        let mut op = DiffOp::zero(ring, 1);
        for alpha in Monomial::all_up_to(ring.ncoords(), max_order) {
            if self.rng.gen_bool(0.5) {
                let extra = self.rng.gen_range(0..=1);
                let f = self.poly(ring, max_deg, 2).mul(&t.pow(u64::from(alpha.degree() + extra)));
                op = op.add(&DiffOp::scalar(f, alpha));
            }
        }
        ReesOpElement::hodge(op)
    }

    /// Commuting Higgs matrices with B^p = 0: polynomials without constant term
    /// in one nilpotent constant matrix N with N^p = 0.
    pub fn nilpotent_higgs(&mut self, twisted: &Arc<Ring>, d: usize, max_deg: u32) -> Vec<PolyMatrix> {
        let p = twisted.p() as usize;
        let full = d <= p;
        let n = PolyMatrix::from_fn(twisted, d, d, |i, j| {
            if (i == 0 && j > 0) || (full && j > i) {
                ModPoly::constant(twisted, self.rng.gen_range(0..twisted.p()) as i64)
            } else {
                ModPoly::zero(twisted)
            }
        });
        let n2 = n.mul(&n);
        (0..twisted.ncoords())
            .map(|_| {
                let a = self.poly(twisted, max_deg, 2);
                let b = self.poly(twisted, max_deg, 1);
                n.mul_poly(&a).add(&n2.mul_poly(&b))
            })
            .collect()
    }
}
