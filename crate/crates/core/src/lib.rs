//! Maximal 1-crystalline torsion submodules, Néron component groups and
//! their finite-level comparison maps for totally degenerate semistable
//! abelian varieties over a p-adic field.
//!
//! The input is split degeneration data: a prime `p`, a toric rank `t`, and a
//! symmetric positive-definite `t x t` matrix `mu` of valuations of the
//! period pairing, with unit parts carried as free symbols. From it the crate
//! computes:
//!
//! * the `p^m`-torsion as an extension of étale by multiplicative modules,
//!   with its Kummer classes ([`degeneration`]);
//! * the valuation/unit splitting and the monodromy map ([`kummer`]);
//! * the category of prolongable extensions with monodromy, its pushout and
//!   generic fiber functors, and the pullback along `ker N` ([`monodromy`]);
//! * `Crys₁` of torsion and of the Tate module, the component group, the
//!   comparison `Φ[p^m] ≅ Crys₁(T ⊗ Z/p^m) / (Crys₁(T) ⊗ Z/p^m)`, the torsion
//!   of `R¹Crys₁`, and a brute-force subgroup oracle ([`crys`]).
//!
//! Everything is exact. The building blocks in [`abelian`] and upward are
//! generic over the integer scalar; the aliases below fix it to `BigInt`.

pub mod abelian;
pub mod crys;
pub mod degeneration;
pub mod kummer;
pub mod monodromy;
pub mod suite;

pub use num_bigint::BigInt;

pub use abelian::{AbelianError, Int};
pub use crys::CrysError;
pub use degeneration::DegenerationError;
pub use kummer::KummerError;
pub use monodromy::MonodromyError;

pub type IntMatrix = abelian::Matrix<BigInt>;
pub type FinAbGroup = abelian::AbelianGroup<BigInt>;
pub type GroupHom = abelian::GroupHom<BigInt>;
pub type SnfResult = abelian::Smith<BigInt>;
pub type Subgroup = abelian::Subgroup<BigInt>;

pub type KummerClass = kummer::KummerClass<BigInt>;
pub type ExtClass = kummer::ExtClass<BigInt>;

pub type DegenerationData = degeneration::Degeneration<BigInt>;
pub type TorsionModule = degeneration::TorsionModule<BigInt>;

pub type ExtNuObject = monodromy::ExtNu<BigInt>;
pub type ExtNuMorphism = monodromy::ExtNuMorphism<BigInt>;
pub type PresentedModule = monodromy::PresentedModule<BigInt>;

pub type Crys1Report = crys::Crys1<BigInt>;
pub type PhiCheck = crys::PhiCheck<BigInt>;
pub type R1Torsion = crys::R1Torsion<BigInt>;
pub type LesReport = crys::Les<BigInt>;
