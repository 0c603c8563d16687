//! Split, totally degenerate degeneration data and the torsion it defines.
//!
//! With `Y = Y^D = Z^t` and the polarization fixed to the identity, the data
//! is a symmetric positive-definite matrix `mu` of valuations of the period
//! pairing, `mu[i][j] = v(τ(y_i, χ_j))`, together with unit symbols for the
//! unit parts of `τ`.
//!
//! The `n`-torsion for `n = p^m` is the extension
//! `0 → T[n] → A[n] → Y/nY → 0`, with `T[n] = μ_n^t` spanned by `x_1…x_t`
//! and lifts `y_1…y_t` of the étale basis. Lifting `y_j` means choosing an
//! `n`-th root of `τ(y_j, -)`, so the class has entry `(i, j)` equal to the
//! Kummer class of `τ(y_j, χ_i) = u_ij ϖ^mu_ij`.

use thiserror::Error;

use crate::abelian::{is_prime, AbelianError, AbelianGroup, GroupHom, Int, Matrix};
use crate::kummer::{ExtClass, KummerClass, KummerError, UnitSymbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegenerationError {
    #[error("{field}: matrix is not symmetric")]
    NotSymmetric { field: &'static str },
    #[error("mu: not positive definite, leading minor of size {size} is {value}")]
    NotPositiveDefinite { size: usize, value: String },
    #[error("p: {0} is not prime")]
    NotPrime(String),
    #[error("bad level: {0}")]
    BadLevel(String),
    #[error("{field}: {reason}")]
    Shape { field: &'static str, reason: String },
    #[error(transparent)]
    Kummer(#[from] KummerError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// Validated degeneration data `(p, mu, units)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degeneration<T> {
    p: T,
    mu: Matrix<T>,
    units: Vec<UnitSymbol>,
}

/// The default symbol `u{i}_{j}` for the unit part of `τ(y_i, χ_j)`, with
/// indices 1-based and sorted.
pub fn default_unit_symbol(i: usize, j: usize) -> UnitSymbol {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    UnitSymbol::new(format!("u{}_{}", a + 1, b + 1))
}

impl<T: Int> Degeneration<T> {
    /// Validates and builds. Without explicit unit symbols, symmetric fresh
    /// symbols are used.
    pub fn new(
        p: T,
        mu: Matrix<T>,
        units: Option<Vec<Vec<UnitSymbol>>>,
    ) -> Result<Self, DegenerationError> {
        let t = mu.rows();
        let units = match units {
            Some(rows) => {
                if rows.len() != t || rows.iter().any(|r| r.len() != t) {
                    return Err(DegenerationError::Shape {
                        field: "units",
                        reason: format!("expected a {t}x{t} matrix of symbols"),
                    });
                }
                if (0..t).any(|i| (0..i).any(|j| rows[i][j] != rows[j][i])) {
                    return Err(DegenerationError::NotSymmetric { field: "units" });
                }
                rows.concat()
            }
            None => (0..t)
                .flat_map(|i| (0..t).map(move |j| default_unit_symbol(i, j)))
                .collect(),
        };
        let data = Self { p, mu, units };
        data.validate()?;
        Ok(data)
    }

    /// Accepts iff `p` is prime and `mu` is a nonempty symmetric matrix with
    /// all leading principal minors positive.
    pub fn validate(&self) -> Result<(), DegenerationError> {
        if !self.mu.is_square() || self.mu.rows() == 0 {
            return Err(DegenerationError::Shape {
                field: "mu",
                reason: format!(
                    "toric rank needs a nonempty square matrix, got {}x{}",
                    self.mu.rows(),
                    self.mu.cols()
                ),
            });
        }
        if !self.mu.is_symmetric() {
            return Err(DegenerationError::NotSymmetric { field: "mu" });
        }
        for (k, minor) in self.mu.leading_minors()?.into_iter().enumerate() {
            if !minor.is_positive() {
                return Err(DegenerationError::NotPositiveDefinite {
                    size: k + 1,
                    value: minor.to_string(),
                });
            }
        }
        if !is_prime(&self.p) {
            return Err(DegenerationError::NotPrime(self.p.to_string()));
        }
        Ok(())
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn toric_rank(&self) -> usize {
        self.mu.rows()
    }

    pub fn mu(&self) -> &Matrix<T> {
        &self.mu
    }

    pub fn unit_symbol(&self, i: usize, j: usize) -> &UnitSymbol {
        &self.units[i * self.toric_rank() + j]
    }

    pub fn unit_symbols(&self) -> Vec<Vec<UnitSymbol>> {
        self.units
            .chunks(self.toric_rank())
            .map(<[UnitSymbol]>::to_vec)
            .collect()
    }

    /// `p^m` for `m ≥ 1`.
    pub fn level(&self, m: u32) -> Result<T, DegenerationError> {
        if m < 1 {
            return Err(DegenerationError::BadLevel(format!(
                "exponent m = {m} must be at least 1"
            )));
        }
        Ok(self.p.pow_u32(m))
    }

    /// `A[p^m]` as an extension class with `kappa[i][j] = u_ij ϖ^mu_ij`.
    pub fn torsion_module(&self, m: u32) -> Result<TorsionModule<T>, DegenerationError> {
        let n = self.level(m)?;
        let t = self.toric_rank();
        let mut kappa = Vec::with_capacity(t * t);
        for i in 0..t {
            for j in 0..t {
                let class = KummerClass::new(
                    n.clone(),
                    self.mu[(i, j)].clone(),
                    [(self.unit_symbol(i, j).clone(), T::one())],
                )?;
                kappa.push(class);
            }
        }
        let ext = ExtClass::free(n.clone(), t, t, kappa)?;
        Ok(TorsionModule {
            level: n,
            exponent: m,
            ext,
        })
    }

    /// Splits the torsion class into its prolongable unit part and the
    /// monodromy `ν_n = mu mod p^m : (Z/p^m)^t(1) → (Z/p^m)^t`.
    pub fn raynaud_decompose(&self, m: u32) -> Result<RaynaudDecomposition<T>, DegenerationError> {
        let torsion = self.torsion_module(m)?;
        let (eta1, val_part) = torsion.ext.raynaud_split();
        let nu = val_part.monodromy_of()?;
        Ok(RaynaudDecomposition {
            level: torsion.level,
            eta1,
            nu,
        })
    }
}

/// `A[n]`, `n = p^m`, in the basis `x_1…x_t, y_1…y_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionModule<T> {
    pub level: T,
    pub exponent: u32,
    pub ext: ExtClass<T>,
}

impl<T: Int> TorsionModule<T> {
    pub fn toric_rank(&self) -> usize {
        self.ext.mult_rank()
    }

    /// `n^{2t}`.
    pub fn order(&self) -> T {
        self.ext.middle_group().order()
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let t = self.toric_rank();
        (1..=t)
            .map(|i| format!("x{i}"))
            .chain((1..=t).map(|j| format!("y{j}")))
            .collect()
    }

    /// The multiplicative part `T[n]` as a subgroup of the ambient
    /// `(Z/n)^{2t}` coordinates.
    pub fn torus_generators(&self) -> Vec<Vec<T>> {
        let t = self.toric_rank();
        (0..t)
            .map(|i| {
                (0..2 * t)
                    .map(|k| if k == i { T::one() } else { T::zero() })
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaynaudDecomposition<T> {
    pub level: T,
    /// Unit part: every valuation is zero.
    pub eta1: ExtClass<T>,
    pub nu: GroupHom<T>,
}

impl<T: Int> RaynaudDecomposition<T> {
    /// The class with valuation part `nu` and no units.
    pub fn val_class(&self) -> Result<ExtClass<T>, DegenerationError> {
        let etale = AbelianGroup::free_mod(&self.level, self.nu.source().ngens());
        Ok(ExtClass::from_val_matrix(
            self.level.clone(),
            etale,
            self.nu.matrix(),
        )?)
    }

    pub fn recombine(&self) -> Result<ExtClass<T>, DegenerationError> {
        Ok(self.eta1.baer_sum(&self.val_class()?)?)
    }
}
