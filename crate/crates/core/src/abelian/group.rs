//! Finite abelian groups by invariant factors, homomorphisms between them,
//! and the kernel/cokernel/exactness computations built on Smith form.

use std::fmt;

use super::lattice::{Lattice, Subgroup};
use super::matrix::Matrix;
use super::scalar::{is_prime, valuation, Int};
use super::snf::smith_normal_form;
use super::AbelianError;

/// `Z/d_1 ⊕ … ⊕ Z/d_k` with `1 < d_1 | d_2 | … | d_k`. The trivial group has
/// no invariant factors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AbelianGroup<T> {
    invariants: Vec<T>,
}

impl<T: Int> AbelianGroup<T> {
    pub fn trivial() -> Self {
        Self {
            invariants: Vec::new(),
        }
    }

    /// Checks the canonical form: every factor at least 2, divisibility chain.
    pub fn from_invariants(invariants: Vec<T>) -> Result<Self, AbelianError> {
        let two = T::from_i64_lossless(2);
        if let Some(d) = invariants.iter().find(|d| **d < two) {
            return Err(AbelianError::InvalidGroup(format!(
                "invariant factor {d} is below 2"
            )));
        }
        if let Some(w) = invariants.windows(2).find(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(AbelianError::InvalidGroup(format!(
                "{} does not divide {}",
                w[0], w[1]
            )));
        }
        Ok(Self { invariants })
    }

    /// The direct sum of cyclic groups of the given positive orders, in
    /// canonical form.
    pub fn from_cyclic_orders(orders: &[T]) -> Result<Self, AbelianError> {
        if let Some(d) = orders.iter().find(|d| !d.is_positive()) {
            return Err(AbelianError::InvalidGroup(format!(
                "cyclic order {d} is not positive"
            )));
        }
        let diag = smith_normal_form(&Matrix::diagonal(orders)).diagonal();
        Ok(Self {
            invariants: diag.into_iter().filter(|d| !d.is_one()).collect(),
        })
    }

    /// `(Z/n)^rank`.
    pub fn free_mod(n: &T, rank: usize) -> Self {
        if n.is_one() {
            return Self::trivial();
        }
        Self {
            invariants: vec![n.clone(); rank],
        }
    }

    pub fn invariants(&self) -> &[T] {
        &self.invariants
    }

    /// Number of cyclic generators.
    pub fn ngens(&self) -> usize {
        self.invariants.len()
    }

    pub fn order(&self) -> T {
        self.invariants
            .iter()
            .fold(T::one(), |acc, d| acc * d.clone())
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let orders: Vec<T> = self
            .invariants
            .iter()
            .chain(&other.invariants)
            .cloned()
            .collect();
        Self::from_cyclic_orders(&orders).expect("invariants are positive")
    }

    /// Reduces a coordinate vector modulo the generator orders.
    pub fn reduce(&self, coords: &[T]) -> Vec<T> {
        coords
            .iter()
            .zip(&self.invariants)
            .map(|(c, d)| c.residue(d))
            .collect()
    }

    /// The relation lattice `diag(d_i) Z^k` of the generator coordinates.
    pub fn relations(&self) -> Lattice<T> {
        Lattice::diagonal(&self.invariants)
    }
}

impl<T: Int> fmt::Display for AbelianGroup<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariants.is_empty() {
            return write!(f, "trivial");
        }
        for (i, d) in self.invariants.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊕ ")?;
            }
            write!(f, "Z/{d}")?;
        }
        Ok(())
    }
}

/// A homomorphism between finite abelian groups, acting on generator
/// coordinates: column `j` is the image of the `j`-th source generator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupHom<T> {
    source: AbelianGroup<T>,
    target: AbelianGroup<T>,
    matrix: Matrix<T>,
}

impl<T: Int> GroupHom<T> {
    /// Validates shape and that every source generator's order kills its image.
    /// Entries are reduced modulo the target orders.
    pub fn new(
        source: AbelianGroup<T>,
        target: AbelianGroup<T>,
        matrix: Matrix<T>,
    ) -> Result<Self, AbelianError> {
        if matrix.rows() != target.ngens() || matrix.cols() != source.ngens() {
            return Err(AbelianError::ShapeMismatch(format!(
                "{}x{} matrix for a map from {} generators to {}",
                matrix.rows(),
                matrix.cols(),
                source.ngens(),
                target.ngens()
            )));
        }
        for (j, dj) in source.invariants().iter().enumerate() {
            for (i, ei) in target.invariants().iter().enumerate() {
                if !(dj.clone() * matrix[(i, j)].clone()).is_multiple_of(ei) {
                    return Err(AbelianError::NotAHom(format!(
                        "generator {j} of order {dj} maps to {} of order not dividing it in Z/{ei}",
                        matrix[(i, j)]
                    )));
                }
            }
        }
        let matrix = matrix.reduce_rows_mod(target.invariants());
        Ok(Self {
            source,
            target,
            matrix,
        })
    }

    pub fn zero(source: AbelianGroup<T>, target: AbelianGroup<T>) -> Self {
        let matrix = Matrix::zeros(target.ngens(), source.ngens());
        Self {
            source,
            target,
            matrix,
        }
    }

    pub fn identity(group: AbelianGroup<T>) -> Self {
        let matrix = Matrix::identity(group.ngens());
        Self {
            source: group.clone(),
            target: group,
            matrix,
        }
    }

    pub fn source(&self) -> &AbelianGroup<T> {
        &self.source
    }

    pub fn target(&self) -> &AbelianGroup<T> {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>, AbelianError> {
        Ok(self.target.reduce(&self.matrix.mul_vec(x)?))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self, AbelianError> {
        if inner.target != self.source {
            return Err(AbelianError::ShapeMismatch(
                "composition of non-adjacent maps".into(),
            ));
        }
        Self::new(
            inner.source.clone(),
            self.target.clone(),
            self.matrix.mul(&inner.matrix)?,
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self, AbelianError> {
        if self.source != other.source || self.target != other.target {
            return Err(AbelianError::ShapeMismatch(
                "sum of maps with different endpoints".into(),
            ));
        }
        Self::new(
            self.source.clone(),
            self.target.clone(),
            self.matrix.add(&other.matrix)?,
        )
    }

    /// The image, as a lattice in target coordinates containing the target
    /// relations.
    pub fn image_lattice(&self) -> Lattice<T> {
        let mut gens = self.matrix.columns();
        gens.extend(Matrix::diagonal(self.target.invariants()).to_rows());
        Lattice::from_generators(self.target.ngens(), &gens).expect("shapes agree")
    }

    /// The kernel, as a lattice in source coordinates containing the source
    /// relations. Integer kernel of `[matrix | diag(target)]` via Smith form,
    /// projected onto the source block.
    pub fn kernel_lattice(&self) -> Lattice<T> {
        let a = self.source.ngens();
        let stacked = self
            .matrix
            .hstack(&Matrix::diagonal(self.target.invariants()))
            .expect("row counts agree");
        let snf = smith_normal_form(&stacked);
        let rank = snf.rank();
        let mut gens: Vec<Vec<T>> = (rank..stacked.cols())
            .map(|j| snf.v.column(j)[..a].to_vec())
            .collect();
        gens.extend(Matrix::diagonal(self.source.invariants()).to_rows());
        Lattice::from_generators(a, &gens).expect("shapes agree")
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_lattice() == self.source.relations()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_lattice() == Lattice::diagonal(&vec![T::one(); self.target.ngens()])
    }
}

/// `Z^cols / (row span of relations)` in canonical form.
pub fn presented_group<T: Int>(relations: &Matrix<T>) -> Result<AbelianGroup<T>, AbelianError> {
    let snf = smith_normal_form(relations);
    let diag = snf.diagonal();
    if diag.len() < relations.cols() || diag.iter().any(T::is_zero) {
        return Err(AbelianError::InfiniteGroup);
    }
    Ok(AbelianGroup {
        invariants: diag.into_iter().filter(|d| !d.is_one()).collect(),
    })
}

/// `coker(M) = Z^t / M Z^t` for square nonsingular `M`.
pub fn cokernel<T: Int>(m: &Matrix<T>) -> Result<AbelianGroup<T>, AbelianError> {
    if !m.is_square() {
        return Err(AbelianError::ShapeMismatch(format!(
            "cokernel of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    presented_group(m).map_err(|_| AbelianError::SingularMatrix)
}

/// The kernel of multiplication by `M` on `(Z/n)^cols`, with generators
/// aligned to its invariant factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModKernel<T> {
    pub modulus: T,
    pub group: AbelianGroup<T>,
    pub generators: Vec<Vec<T>>,
    /// Rank of the ambient `(Z/n)^cols`.
    pub cols: usize,
}

impl<T: Int> ModKernel<T> {
    pub fn subgroup(&self) -> Subgroup<T> {
        Subgroup::new(self.modulus.clone(), self.ambient_rank(), &self.generators)
            .expect("modulus at least 2")
    }

    pub fn ambient_rank(&self) -> usize {
        self.cols
    }
}

/// If `U M V = D`, then `M x = 0 (mod n)` iff `D V⁻¹ x = 0 (mod n)`, so the
/// kernel is spanned by `(n / gcd(d_i, n)) V e_i`.
pub fn kernel_mod_n<T: Int>(m: &Matrix<T>, n: &T) -> Result<ModKernel<T>, AbelianError> {
    if *n < T::from_i64_lossless(2) {
        return Err(AbelianError::BadModulus(format!(
            "modulus {n} must be at least 2"
        )));
    }
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let mut orders = Vec::new();
    let mut generators = Vec::new();
    for j in 0..m.cols() {
        let d = diag.get(j).cloned().unwrap_or_else(T::zero);
        let g = d.gcd(n);
        if g.is_one() {
            continue;
        }
        let step = n.clone() / g.clone();
        generators.push(
            snf.v
                .column(j)
                .iter()
                .map(|x| (x.clone() * step.clone()).residue(n))
                .collect(),
        );
        orders.push(g);
    }
    let group = AbelianGroup::from_invariants(orders)?;
    Ok(ModKernel {
        modulus: n.clone(),
        group,
        generators,
        cols: m.cols(),
    })
}

/// `G[n]`: invariant factors `gcd(d_i, n)` with ones dropped.
pub fn n_torsion<T: Int>(g: &AbelianGroup<T>, n: &T) -> Result<AbelianGroup<T>, AbelianError> {
    if !n.is_positive() {
        return Err(AbelianError::BadModulus(format!(
            "torsion level {n} must be positive"
        )));
    }
    let inv = g
        .invariants()
        .iter()
        .map(|d| d.gcd(n))
        .filter(|d| !d.is_one())
        .collect();
    AbelianGroup::from_invariants(inv)
}

/// The `p`-Sylow subgroup.
pub fn p_primary_part<T: Int>(g: &AbelianGroup<T>, p: &T) -> Result<AbelianGroup<T>, AbelianError> {
    if !is_prime(p) {
        return Err(AbelianError::NotPrime(p.to_string()));
    }
    let inv = g
        .invariants()
        .iter()
        .map(|d| p.pow_u32(valuation(d, p).expect("invariants are nonzero")))
        .filter(|d| !d.is_one())
        .collect();
    AbelianGroup::from_invariants(inv)
}

/// `im f == ker g`, compared as canonical lattices in the middle group's
/// generator coordinates.
pub fn is_exact<T: Int>(f: &GroupHom<T>, g: &GroupHom<T>) -> Result<bool, AbelianError> {
    if f.target != g.source {
        return Err(AbelianError::ShapeMismatch(format!(
            "{} is not the source {}",
            f.target, g.source
        )));
    }
    Ok(f.image_lattice() == g.kernel_lattice())
}

/// `0 → A →f B →g C → 0` is exact at all three places.
pub fn is_short_exact<T: Int>(f: &GroupHom<T>, g: &GroupHom<T>) -> Result<bool, AbelianError> {
    Ok(is_exact(f, g)? && f.is_injective() && g.is_surjective())
}
