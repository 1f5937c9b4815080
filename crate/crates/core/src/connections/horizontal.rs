use std::fmt;
use std::sync::Arc;

use super::stratification::mode_name;
use super::{ConnectionData, WeightMode};
use crate::arith::{ModPoly, Ring};
use crate::diffops::Derivation;
use crate::error::{Error, Result};

/// Lifts H_k = ∂/∂x_k − Σ_{i,j} (A_k)_{ij} e_j ∂/∂e_i of the coordinate fields
/// to the total space with coordinates (x_1..x_m, e_1..e_d).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalField {
    total: Arc<Ring>,
    base_vars: usize,
    rank: usize,
    fields: Vec<Derivation>,
}

impl HorizontalField {
    pub fn total_ring(&self) -> &Arc<Ring> {
        &self.total
    }

    pub fn fields(&self) -> &[Derivation] {
        &self.fields
    }

    pub fn base_vars(&self) -> usize {
        self.base_vars
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Whether every H_k pushes forward to ∂/∂x_k.
    pub fn projects_to_coordinates(&self) -> bool {
        self.fields.iter().enumerate().all(|(k, h)| {
            (0..self.base_vars).all(|j| {
                let v = h.coeff(j);
                if j == k {
                    v.constant_value() == Some(1)
                } else {
                    v.is_zero()
                }
            })
        })
    }

    /// V − Σ_k V(x_k) H_k; zero exactly when V lies in the span of the H_k.
    pub fn residual(&self, v: &Derivation) -> Derivation {
        self.fields.iter().enumerate().fold(v.clone(), |acc, (k, h)| acc.sub(&h.scale_poly(v.coeff(k))))
    }

    pub fn contains(&self, v: &Derivation) -> bool {
        self.residual(v).is_zero()
    }
}

impl fmt::Display for HorizontalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, h) in self.fields.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "H{} = {}", k + 1, h)?;
        }
        Ok(())
    }
}

pub fn horizontal_fields(c: &ConnectionData) -> Result<HorizontalField> {
    if c.mode() != WeightMode::Dr {
        return Err(Error::WrongMode { expected: "dr", got: mode_name(c.mode()) });
    }
    let base = c.ring();
    let m = base.ncoords();
    let d = c.rank();
    let mut names: Vec<String> = base.coord_names().to_vec();
    for j in 0..d {
        let mut candidate = format!("e{}", j + 1);
        while names.contains(&candidate) || base.param_name() == Some(candidate.as_str()) {
            candidate.push('_');
        }
        names.push(candidate);
    }
    let total = Ring::new(base.prime(), &names, base.param_name());
    let mut var_map: Vec<usize> = (0..m).collect();
    if base.param().is_some() {
        var_map.push(m + d);
    }
    let e = |j: usize| ModPoly::var(&total, m + j);
    let mut fields = Vec::with_capacity(m);
    for (k, a) in c.matrices().iter().enumerate() {
        let mut coeffs = vec![ModPoly::zero(&total); m + d];
        coeffs[k] = ModPoly::one(&total);
        for i in 0..d {
            let mut acc = ModPoly::zero(&total);
            for j in 0..d {
                let aij = a.get(i, j);
                if !aij.is_zero() {
                    acc = acc.sub(&aij.embed(&total, &var_map).mul(&e(j)));
                }
            }
            coeffs[m + i] = acc;
        }
        fields.push(Derivation::new(&total, coeffs));
    }
    Ok(HorizontalField { total, base_vars: m, rank: d, fields })
}

/// Whether every bracket [H_i, H_j] lies in the span of the H_k.
pub fn bracket_closure(h: &HorizontalField) -> bool {
    let m = h.fields.len();
    (0..m).all(|i| (i + 1..m).all(|j| h.contains(&h.fields[i].bracket(&h.fields[j]))))
}

/// Whether every iterate H_k^{∘p} lies in the span of the H_k.
pub fn p_power_closure(h: &HorizontalField) -> bool {
    let p = h.total.p();
    h.fields.iter().all(|f| h.contains(&f.iterate(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{ring, PolyMatrix};

    #[test]
    fn trivial_connection() {
        let r = ring(3, &["x", "y"], None).unwrap();
        let c = ConnectionData::trivial(&r, WeightMode::Dr, 2).unwrap();
        let h = horizontal_fields(&c).unwrap();
        assert!(h.projects_to_coordinates());
        assert_eq!(h.fields()[0], Derivation::partial(h.total_ring(), 0));
        assert!(bracket_closure(&h) && p_power_closure(&h));
    }

    #[test]
    fn rank_one_linear() {
        let r = ring(2, &["x"], None).unwrap();
        let c = ConnectionData::new(&r, WeightMode::Dr, vec![PolyMatrix::parse(&r, "[[x]]").unwrap()]).unwrap();
        let h = horizontal_fields(&c).unwrap();
        assert_eq!(h.to_string(), "H1 = D1 + x*e1 D2");
        assert!(bracket_closure(&h));
        assert!(!p_power_closure(&h));
    }

    #[test]
    fn curved_pair_fails_bracket() {
        let r = ring(5, &["x1", "x2"], None).unwrap();
        let c = ConnectionData::new(
            &r,
            WeightMode::Dr,
            vec![PolyMatrix::parse(&r, "[[0, x2], [0, 0]]").unwrap(), PolyMatrix::zero(&r, 2, 2)],
        )
        .unwrap();
        assert!(!bracket_closure(&horizontal_fields(&c).unwrap()));
    }
}
