//! Exact integer linear algebra and finite abelian groups.
//!
//! All types are generic over an exact integer scalar ([`Int`]); the crate
//! root fixes it to `BigInt` for the default aliases.

mod group;
mod lattice;
mod matrix;
mod scalar;
mod snf;
mod subgroups;
mod subquotient;

use thiserror::Error;

pub use group::{
    cokernel, is_exact, is_short_exact, kernel_mod_n, n_torsion, p_primary_part, presented_group,
    AbelianGroup, GroupHom, ModKernel,
};
pub use lattice::{hermite_normal_form, Lattice, Subgroup};
pub use matrix::Matrix;
pub use scalar::{is_prime, valuation, Int};
pub use snf::{smith_normal_form, Smith};
pub use subgroups::{enumerate_subgroups, DEFAULT_BUDGET};
pub use subquotient::Subquotient;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("singular matrix: cokernel is infinite")]
    SingularMatrix,
    #[error("presented group is infinite")]
    InfiniteGroup,
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("not prime: {0}")]
    NotPrime(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("not a homomorphism: {0}")]
    NotAHom(String),
    #[error("map not well defined: {0}")]
    NotWellDefined(String),
    #[error("enumeration needs {needed} elements, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
}
