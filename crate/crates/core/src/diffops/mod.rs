//! The ring Λ of crystalline differential operators: normal form, action,
//! duality with P^n, p-curvature of derivations, and Rees deformations.

mod derivation;
mod op;
mod rees;

pub use derivation::{p_curvature_derivation, Derivation};
pub use op::{dual_product, pair, DiffOp};
pub use rees::{rees_specialize, GradedSymbol, ReesFiber, ReesOpElement};
