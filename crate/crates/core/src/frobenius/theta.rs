use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::arith::{ModPoly, Monomial, Ring};
use crate::pd::{PDElement, PDTensorElement};

/// Σ_k f_k(x) (dx')^[k] in F*ΓΩ', graded by |k|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DolElement {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, ModPoly>,
}

/// Σ f (dx')^[i] ⊗ (dx')^[j].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DolTensorElement {
    ring: Arc<Ring>,
    terms: BTreeMap<(Monomial, Monomial), ModPoly>,
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, ModPoly>, k: K, f: ModPoly) {
    if f.is_zero() {
        return;
    }
    let sum = match map.remove(&k) {
        Some(g) => g.add(&f),
        None => f,
    };
    if !sum.is_zero() {
        map.insert(k, sum);
    }
}

impl DolElement {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        DolElement { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(f: ModPoly, k: Monomial) -> Self {
        let mut out = DolElement::zero(f.ring());
        accumulate(&mut out.terms, k, f);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ModPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, k: &Monomial) -> ModPoly {
        self.terms.get(k).cloned().unwrap_or_else(|| ModPoly::zero(&self.ring))
    }

    pub fn counit(&self) -> ModPoly {
        self.coefficient(&Monomial::zero(self.ring.ncoords()))
    }

    /// Largest |k| among the terms.
    pub fn weight(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Δ_Dol((dx')^[k]) = Σ_{i+j=k} (dx')^[i] ⊗ (dx')^[j].
    pub fn comultiply(&self) -> DolTensorElement {
        let mut terms = BTreeMap::new();
        for (k, f) in &self.terms {
            for i in k.divisors() {
                let j = k.checked_sub(&i).unwrap();
                accumulate(&mut terms, (i, j), f.clone());
            }
        }
        DolTensorElement { ring: self.ring.clone(), terms }
    }
}

impl DolTensorElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, i: &Monomial, j: &Monomial) -> ModPoly {
        self.terms.get(&(i.clone(), j.clone())).cloned().unwrap_or_else(|| ModPoly::zero(&self.ring))
    }
}

fn write_dol_monomial(f: &mut fmt::Formatter<'_>, ring: &Ring, k: &Monomial) -> fmt::Result {
    if k.is_zero() {
        return write!(f, "1");
    }
    for (i, &e) in k.exps().iter().enumerate() {
        if e > 0 {
            write!(f, "d{}'^[{}]", ring.coord_names()[i], e)?;
        }
    }
    Ok(())
}

fn write_coefficient(f: &mut fmt::Formatter<'_>, c: &ModPoly) -> fmt::Result {
    match (c.len(), c.constant_value()) {
        (_, Some(1)) => Ok(()),
        (1, _) => write!(f, "{c}*"),
        _ => write!(f, "({c})*"),
    }
}

impl fmt::Display for DolElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if k.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            write_coefficient(f, c)?;
            write_dol_monomial(f, &self.ring, k)?;
        }
        Ok(())
    }
}

impl fmt::Display for DolTensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((i, j), c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write_coefficient(f, c)?;
            write_dol_monomial(f, &self.ring, i)?;
            write!(f, " (x) ")?;
            write_dol_monomial(f, &self.ring, j)?;
        }
        Ok(())
    }
}

/// θ on PD basis monomials: τ^[k] ↦ c·(dx')^[j], or `None` for 0.
pub type ThetaFn = dyn Fn(&Monomial) -> Option<(u64, Monomial)>;

/// τ^[pk] ↦ (dx')^[k]; every other basis monomial ↦ 0.
pub fn standard_theta(p: u64) -> impl Fn(&Monomial) -> Option<(u64, Monomial)> {
    let p = p as u32;
    move |k: &Monomial| {
        if k.exps().iter().all(|e| e % p == 0) {
            Some((1, Monomial::from_vec(k.exps().iter().map(|e| e / p).collect())))
        } else {
            None
        }
    }
}

/// The standard θ except τ_i^[p] ↦ 2 (dx'_i)^[1].
pub fn perturbed_theta(p: u64) -> impl Fn(&Monomial) -> Option<(u64, Monomial)> {
    let base = standard_theta(p);
    move |k: &Monomial| {
        let (c, j) = base(k)?;
        let single = k.degree() as u64 == p && k.exps().iter().filter(|&&e| e > 0).count() == 1;
        Some((if single { 2 * c } else { c }, j))
    }
}

pub fn theta_map_with(a: &PDElement, theta: &ThetaFn) -> DolElement {
    let mut out = DolElement::zero(a.ring());
    for (k, f) in a.terms() {
        if let Some((c, j)) = theta(k) {
            accumulate(&mut out.terms, j, f.scale(c));
        }
    }
    out
}

/// Quotient by I followed by τ^[pk] ↦ (dx')^[k].
pub fn theta_map(a: &PDElement) -> DolElement {
    theta_map_with(&a.quotient_mod_i(), &standard_theta(a.ring().p()))
}

fn theta_tensor(a: &PDTensorElement, theta: &ThetaFn) -> DolTensorElement {
    let mut terms = BTreeMap::new();
    for ((i, j), f) in a.terms() {
        if let (Some((ci, ki)), Some((cj, kj))) = (theta(i), theta(j)) {
            accumulate(&mut terms, (ki, kj), f.scale(ci).scale(cj));
        }
    }
    DolTensorElement { ring: a.ring().clone(), terms }
}

/// Outcome of the three coalgebra diagrams, with the first failing basis monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaReport {
    pub counit: bool,
    pub equalizer: bool,
    pub comultiplication: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

impl ThetaReport {
    pub fn all(&self) -> bool {
        self.counit && self.equalizer && self.comultiplication
    }
}

/// Checks every basis monomial τ^[k], |k| <= n, of P^n on the coordinates of `ring`:
/// counit compatibility, θ(τ_i w) = 0 together with θ((x_i + τ_i) w) = θ(x_i w),
/// and (θ⊗θ)Δ = Δ_Dol θ.
pub fn theta_coalgebra_check(ring: &Arc<Ring>, n: u32, theta: &ThetaFn) -> ThetaReport {
    let m = ring.ncoords();
    let mut report = ThetaReport { counit: true, equalizer: true, comultiplication: true, checked: 0, witness: None };
    let note = |report: &mut ThetaReport, what: &str, k: &Monomial| {
        if report.witness.is_none() {
            report.witness = Some(format!("{what} fails on {}", PDElement::basis(ring, k.clone(), n)));
        }
    };
    for k in PDElement::basis_monomials(ring, n) {
        report.checked += 1;
        let w = PDElement::basis(ring, k.clone(), n);
        let tw = theta_map_with(&w, theta);
        if tw.counit() != w.counit() {
            report.counit = false;
            note(&mut report, "counit", &k);
        }
        for i in 0..m {
            let x = ModPoly::var(ring, i);
            let shifted = PDElement::taylor(&x, n).pd_mul(&w).expect("same level");
            let killed = theta_map_with(&PDElement::tau(ring, i, n).pd_mul(&w).expect("same level"), theta);
            if !killed.is_zero() || theta_map_with(&shifted, theta) != theta_map_with(&w.mul_coefficient(&x), theta) {
                report.equalizer = false;
                note(&mut report, "equalizer", &k);
            }
        }
        if theta_tensor(&w.comultiply(), theta) != tw.comultiply() {
            report.comultiplication = false;
            note(&mut report, "comultiplication", &k);
        }
    }
    report
}

/// Whether θ(τ^[k]) lies in F_r = (weights < r) whenever |k| < p·r, for all |k| <= bound.
pub fn theta_rees_compat(ring: &Arc<Ring>, bound: u32) -> bool {
    let p = ring.p() as u32;
    PDElement::basis_monomials(ring, bound).iter().all(|k| {
        let image = theta_map(&PDElement::basis(ring, k.clone(), bound));
        let w = image.weight();
        (1..=bound / p + 1).all(|r| k.degree() >= p * r || w.is_none_or(|w| w < r))
    })
}
