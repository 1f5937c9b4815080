//! Exact arithmetic over F_p and F_p[t]: scalars, polynomials, matrices.

pub mod fp;
pub mod linalg;
pub mod matrix;
pub mod poly;

pub use fp::{binom_mod_p, multi_binom_mod_p, pd_coefficient, pd_shift_coefficient, Prime};
pub use linalg::FpMatrix;
pub use matrix::PolyMatrix;
pub use poly::{ModPoly, Monomial, Ring};

use std::sync::Arc;

/// Exact partial derivative; `i` must index a coordinate, not the parameter.
pub fn poly_derive(f: &ModPoly, i: usize) -> ModPoly {
    f.derive(i)
}

/// f^p.
pub fn poly_frobenius(f: &ModPoly) -> ModPoly {
    f.frobenius()
}

/// Convenience constructor used throughout tests and fixtures.
pub fn ring(p: u64, coords: &[&str], param: Option<&str>) -> crate::Result<Arc<Ring>> {
    Ok(Ring::new(Prime::new(p)?, coords, param))
}
