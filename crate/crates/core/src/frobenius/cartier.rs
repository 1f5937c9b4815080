use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{twisted_ring, TwistPoly};
use crate::arith::{FpMatrix, ModPoly, Monomial, PolyMatrix, Ring};
use crate::connections::{flat_sections, ConnectionData, WeightMode};
use crate::error::{Error, Result};

/// A 1-form Σ_i ω_i dx_i on the coordinates of a ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    ring: Arc<Ring>,
    coeffs: Vec<ModPoly>,
}

impl OneForm {
    pub fn new(ring: &Arc<Ring>, coeffs: Vec<ModPoly>) -> Result<Self> {
        if coeffs.len() != ring.ncoords() {
            return Err(Error::Dimension(format!("{} form coefficients for {} coordinates", coeffs.len(), ring.ncoords())));
        }
        Ok(OneForm { ring: ring.clone(), coeffs })
    }

    pub fn zero(ring: &Arc<Ring>) -> Self {
        OneForm { ring: ring.clone(), coeffs: vec![ModPoly::zero(ring); ring.ncoords()] }
    }

    /// dg.
    pub fn exact(g: &ModPoly) -> Self {
        let ring = g.ring().clone();
        let coeffs = (0..ring.ncoords()).map(|i| g.derive(i)).collect();
        OneForm { ring, coeffs }
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

    pub fn add(&self, other: &OneForm) -> OneForm {
        OneForm { ring: self.ring.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn mul_poly(&self, f: &ModPoly) -> OneForm {
        OneForm { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|a| a.mul(f)).collect() }
    }

    /// The first (i, j) with ∂_i ω_j ≠ ∂_j ω_i.
    pub fn closedness_witness(&self) -> Option<(usize, usize)> {
        let n = self.coeffs.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.coeffs[j].derive(i) != self.coeffs[i].derive(j))
    }

    pub fn is_closed(&self) -> bool {
        self.closedness_witness().is_none()
    }

    pub fn coord_degree(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(ModPoly::coord_degree).max()
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let name = &self.ring.coord_names()[i];
            match (c.len(), c.constant_value()) {
                (_, Some(1)) => write!(f, "d{name}")?,
                (1, _) => write!(f, "{c}*d{name}")?,
                _ => write!(f, "({c})*d{name}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// C(ω) = Σ u_i(x') dx'_i together with a primitive g of ω − Σ u_i(x^p) x_i^{p−1} dx_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierImage {
    pub form: OneForm,
    pub primitive: ModPoly,
}

/// Solves ω = dg + Σ_i u_i(x^p) x_i^{p−1} dx_i with deg g <= bound + 1 and
/// p|β| + p − 1 <= bound for every monomial x'^β of u_i. The default bound is
/// the degree of ω.
pub fn cartier_operator(omega: &OneForm, bound: Option<u32>) -> Result<CartierImage> {
    let ring = omega.ring();
    if ring.param().is_some() {
        return Err(Error::Precondition("the Cartier operator is computed over a ring without parameter".into()));
    }
    if let Some((i, j)) = omega.closedness_witness() {
        return Err(Error::NotClosed { i: i + 1, j: j + 1 });
    }
    let prime = ring.prime();
    let p = ring.p() as u32;
    let m = ring.ncoords();
    let bound = bound.unwrap_or_else(|| omega.coord_degree().unwrap_or(0));

    enum Unknown {
        G(Monomial),
        U(usize, Monomial),
    }
    let mut unknowns = Vec::new();
    let mut images: Vec<OneForm> = Vec::new();
    for mu in Monomial::all_up_to(m, bound + 1) {
        if mu.is_zero() {
            continue;
        }
        images.push(OneForm::exact(&ModPoly::monomial(ring, mu.clone(), 1)));
        unknowns.push(Unknown::G(mu));
    }
    if bound + 1 >= p {
        for beta in Monomial::all_up_to(m, (bound + 1 - p) / p) {
            for i in 0..m {
                let mono = beta.scale(p).add(&Monomial::unit(m, i).scale(p - 1));
                let mut form = OneForm::zero(ring);
                form.coeffs[i] = ModPoly::monomial(ring, mono, 1);
                images.push(form);
                unknowns.push(Unknown::U(i, beta.clone()));
            }
        }
    }

    let mut rows: HashMap<(usize, Monomial), usize> = HashMap::new();
    let mut row_of = |key: (usize, Monomial)| {
        let next = rows.len();
        *rows.entry(key).or_insert(next)
    };
    let mut cols: Vec<Vec<(usize, u64)>> = Vec::with_capacity(images.len());
    for form in &images {
        let mut col = Vec::new();
        for (j, c) in form.coeffs.iter().enumerate() {
            for (mono, v) in c.terms() {
                col.push((row_of((j, mono.clone())), v));
            }
        }
        cols.push(col);
    }
    let mut rhs_entries = Vec::new();
    for (j, c) in omega.coeffs.iter().enumerate() {
        for (mono, v) in c.terms() {
            rhs_entries.push((row_of((j, mono.clone())), v));
        }
    }
    let nrows = rows.len();
    let mut system = FpMatrix::zero(prime, nrows, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for &(i, v) in col {
            system.set(i, j, v);
        }
    }
    let mut rhs = vec![0; nrows];
    for (i, v) in rhs_entries {
        rhs[i] = v;
    }
    let solution = system.solve(&rhs).ok_or(Error::Infeasible(bound))?;

    let twisted = twisted_ring(ring);
    let mut u = vec![ModPoly::zero(&twisted); m];
    let mut g = ModPoly::zero(ring);
    for (k, unknown) in unknowns.iter().enumerate() {
        let v = solution[k];
        if v == 0 {
            continue;
        }
        match unknown {
            Unknown::G(mu) => g = g.add(&ModPoly::monomial(ring, mu.clone(), v)),
            Unknown::U(i, beta) => u[*i] = u[*i].add(&ModPoly::monomial(&twisted, beta.clone(), v)),
        }
    }
    Ok(CartierImage { form: OneForm::new(&twisted, u)?, primitive: g })
}

/// ζ(dx'_i) = c·x_i^{p−1} dx_i + dh_i for the coordinate lift F̃(x_i) = x_i^p + p·h_i,
/// where c = C(p,1)/p is the τ-linear coefficient of ((x+τ)^p − x^p)/p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierSplitting {
    base: Arc<Ring>,
    lift: Vec<ModPoly>,
    linear_coefficient: u64,
    images: Vec<OneForm>,
}

/// Exact C(n, k) for the small arguments used here.
fn exact_binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn cartier_splitting(base: &Arc<Ring>, lift: Vec<ModPoly>) -> Result<CartierSplitting> {
    let m = base.ncoords();
    if lift.len() != m {
        return Err(Error::Dimension(format!("{} lift terms for {m} coordinates", lift.len())));
    }
    let p = base.p();
    let linear_coefficient = ((exact_binomial(p, 1) / p as u128) % p as u128) as u64;
    let images = lift
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let mut form = OneForm::exact(h);
            let lead = ModPoly::var(base, i).pow(p - 1).scale(linear_coefficient);
            form.coeffs[i] = form.coeffs[i].add(&lead);
            form
        })
        .collect();
    Ok(CartierSplitting { base: base.clone(), lift, linear_coefficient, images })
}

impl CartierSplitting {
    pub fn standard(base: &Arc<Ring>) -> Self {
        cartier_splitting(base, vec![ModPoly::zero(base); base.ncoords()]).expect("one lift term per coordinate")
    }

    pub fn base(&self) -> &Arc<Ring> {
        &self.base
    }

    pub fn lift(&self) -> &[ModPoly] {
        &self.lift
    }

    pub fn linear_coefficient(&self) -> u64 {
        self.linear_coefficient
    }

    /// ζ(dx'_i).
    pub fn image(&self, i: usize) -> &OneForm {
        &self.images[i]
    }

    pub fn images(&self) -> &[OneForm] {
        &self.images
    }

    /// ζ(Σ u_i(x') dx'_i) = Σ u_i(x^p) ζ(dx'_i).
    pub fn apply(&self, form: &OneForm) -> Result<OneForm> {
        let mut out = OneForm::zero(&self.base);
        for (i, u) in form.coeffs().iter().enumerate() {
            let pulled = TwistPoly::new(u.clone()).untwist(&self.base);
            out = out.add(&self.images[i].mul_poly(&pulled));
        }
        Ok(out)
    }

    /// Matrix-valued version: given F-pulled-back matrices B_i, returns the
    /// connection matrices A_j = Σ_i B_i · ζ(dx'_i)_j.
    pub fn apply_matrices(&self, b: &[PolyMatrix]) -> Result<Vec<PolyMatrix>> {
        let m = self.base.ncoords();
        if b.len() != m {
            return Err(Error::Dimension(format!("{} matrices for {m} coordinates", b.len())));
        }
        let d = b.first().map_or(0, PolyMatrix::rows);
        Ok((0..m)
            .map(|j| {
                b.iter().enumerate().fold(PolyMatrix::zero(b[0].ring(), d, d), |acc, (i, bi)| {
                    acc.add(&bi.mul_poly(&self.images[i].coeff(j).to_ring(bi.ring()).expect("same coordinates")))
                })
            })
            .collect())
    }
}

/// Descended data: a flat frame Y (columns) with Y(0) = I. The module over X'
/// is free on these columns and the connection is gauge_transform(trivial, Y^{-1}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descent {
    pub frame: PolyMatrix,
    pub gauge: PolyMatrix,
    pub solution_dim: usize,
}

pub fn cartier_descend(c: &ConnectionData, bound: Option<u32>) -> Result<Descent> {
    let fs = flat_sections(c, bound)?;
    let gauge = fs.frame.inverse()?;
    let rebuilt = ConnectionData::trivial(c.ring(), WeightMode::Dr, c.rank())?.gauge_transform(&gauge)?;
    if rebuilt != *c {
        return Err(Error::Precondition("flat frame does not reproduce the connection".into()));
    }
    Ok(Descent { frame: fs.frame, gauge, solution_dim: fs.solution_dim })
}
