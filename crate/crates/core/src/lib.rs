//! Exact differential algebra in characteristic p on affine coordinate patches.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: F_p scalars, polynomials over F_p (optionally with a parameter t),
//!   polynomial matrices and dense F_p linear algebra.
//! * [`pd`]: truncated divided-power algebras of the diagonal and their comultiplication.
//! * [`diffops`]: crystalline differential operators, their pairing with PD algebras,
//!   p-curvature of derivations, and Rees deformations of Λ.
//! * [`connections`]: λ-connections, curvature, p-curvature, stratifications,
//!   horizontal fields, gauge transformations and flat sections.
//! * [`frobenius`]: Frobenius twists, the Cartier operator, splittings of Cartier,
//!   Cartier descent and the p-curvature morphism θ.
//! * [`rees`]: filtered modules, Griffiths transversality, conjugate triples and the
//!   t-deformation of Frobenius-pulled-back Higgs data.

pub mod arith;
pub mod connections;
pub mod diffops;
pub mod error;
pub mod frobenius;
pub mod pd;
pub mod random;
pub mod rees;
pub mod selftest;

pub use arith::{binom_mod_p, pd_coefficient, poly_derive, poly_frobenius, ModPoly, Monomial, PolyMatrix, Prime, Ring};
pub use connections::{ConnectionData, HorizontalField, Stratification, WeightMode};
pub use diffops::{DiffOp, Derivation, ReesOpElement};
pub use error::{Error, Result};
pub use frobenius::{CartierSplitting, DolElement, TwistPoly};
pub use pd::{PDElement, PDTensorElement};
pub use rees::{ConjTriple, FilteredModule, GriffithsClass, ReesModule};
