//! Finite subquotients `N / R` of `Z^k` with `R ⊆ N` of equal rank, together
//! with canonical coordinates on them. Presented modules, subgroups of
//! `(Z/n)^k` and their quotients are all instances.

use super::group::{AbelianGroup, GroupHom};
use super::lattice::{Lattice, Subgroup};
use super::matrix::Matrix;
use super::scalar::Int;
use super::snf::smith_normal_form;
use super::AbelianError;

#[derive(Clone, Debug)]
pub struct Subquotient<T> {
    numerator: Lattice<T>,
    relations: Lattice<T>,
    group: AbelianGroup<T>,
    /// Right Smith transform of the relations written in numerator
    /// coordinates; `x -> x V` carries numerator coordinates to the cyclic
    /// decomposition.
    v: Matrix<T>,
    v_inv: Matrix<T>,
    /// Positions of the nontrivial cyclic factors in the Smith diagonal.
    nontrivial: Vec<usize>,
    moduli: Vec<T>,
}

impl<T: Int> Subquotient<T> {
    pub fn new(numerator: Lattice<T>, relations: Lattice<T>) -> Result<Self, AbelianError> {
        if numerator.dim() != relations.dim() {
            return Err(AbelianError::ShapeMismatch(
                "numerator and relations in different ambient ranks".into(),
            ));
        }
        let coords = relations
            .basis()
            .iter()
            .map(|r| {
                numerator.coordinates(r).ok_or(AbelianError::NotWellDefined(
                    "relation outside numerator".into(),
                ))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let r = numerator.rank();
        let x = if coords.is_empty() {
            Matrix::zeros(0, r)
        } else {
            Matrix::from_rows(&coords)?
        };
        let snf = smith_normal_form(&x);
        let diag = snf.diagonal();
        if diag.len() < r || diag.iter().any(T::is_zero) {
            return Err(AbelianError::InfiniteGroup);
        }
        let nontrivial: Vec<usize> = (0..r).filter(|&i| !diag[i].is_one()).collect();
        let moduli: Vec<T> = nontrivial.iter().map(|&i| diag[i].clone()).collect();
        let group = AbelianGroup::from_invariants(moduli.clone())?;
        Ok(Self {
            numerator,
            relations,
            group,
            v: snf.v,
            v_inv: snf.v_inv,
            nontrivial,
            moduli,
        })
    }

    /// `Z^k / R` for the row span `R` of `relations`.
    pub fn presented(relations: &Matrix<T>) -> Result<Self, AbelianError> {
        let k = relations.cols();
        Self::new(
            Lattice::diagonal(&vec![T::one(); k]),
            Lattice::from_generators(k, &relations.to_rows())?,
        )
    }

    /// A subgroup of `(Z/n)^k` as an abstract group.
    pub fn of_subgroup(s: &Subgroup<T>) -> Result<Self, AbelianError> {
        Self::new(
            s.lattice().clone(),
            Lattice::diagonal(&vec![s.modulus().clone(); s.rank()]),
        )
    }

    /// `big / small` for subgroups of the same `(Z/n)^k`.
    pub fn quotient(big: &Subgroup<T>, small: &Subgroup<T>) -> Result<Self, AbelianError> {
        if !big.contains_subgroup(small) {
            return Err(AbelianError::NotWellDefined(
                "quotient by a subgroup not contained in the numerator".into(),
            ));
        }
        Self::new(big.lattice().clone(), small.lattice().clone())
    }

    pub fn group(&self) -> &AbelianGroup<T> {
        &self.group
    }

    pub fn ambient_dim(&self) -> usize {
        self.numerator.dim()
    }

    pub fn numerator(&self) -> &Lattice<T> {
        &self.numerator
    }

    pub fn relations(&self) -> &Lattice<T> {
        &self.relations
    }

    /// Canonical coordinates of an ambient vector, which must lie in the
    /// numerator.
    pub fn coordinates(&self, v: &[T]) -> Result<Vec<T>, AbelianError> {
        let c = self
            .numerator
            .coordinates(v)
            .ok_or(AbelianError::NotWellDefined(
                "vector outside the numerator lattice".into(),
            ))?;
        let w: Vec<T> = (0..self.v.cols())
            .map(|j| {
                c.iter().enumerate().fold(T::zero(), |acc, (i, ci)| {
                    acc + ci.clone() * self.v[(i, j)].clone()
                })
            })
            .collect();
        Ok(self
            .nontrivial
            .iter()
            .zip(&self.moduli)
            .map(|(&i, d)| w[i].residue(d))
            .collect())
    }

    /// Ambient representatives of the canonical cyclic generators.
    pub fn generators(&self) -> Vec<Vec<T>> {
        let b = self.numerator.basis();
        self.nontrivial
            .iter()
            .map(|&i| {
                (0..self.ambient_dim())
                    .map(|col| {
                        (0..b.len()).fold(T::zero(), |acc, k| {
                            acc + self.v_inv[(i, k)].clone() * b[k][col].clone()
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// The homomorphism induced by the ambient map `v -> m v`, after checking
    /// that it carries numerator into numerator and relations into relations.
    pub fn induced_hom(&self, target: &Self, m: &Matrix<T>) -> Result<GroupHom<T>, AbelianError> {
        if m.cols() != self.ambient_dim() || m.rows() != target.ambient_dim() {
            return Err(AbelianError::ShapeMismatch(format!(
                "{}x{} ambient map between ranks {} and {}",
                m.rows(),
                m.cols(),
                self.ambient_dim(),
                target.ambient_dim()
            )));
        }
        for r in self.relations.basis() {
            if !target.relations.contains(&m.mul_vec(r)?) {
                return Err(AbelianError::NotWellDefined(
                    "a relation maps outside the target relations".into(),
                ));
            }
        }
        let columns = self
            .generators()
            .iter()
            .map(|g| target.coordinates(&m.mul_vec(g)?))
            .collect::<Result<Vec<_>, _>>()?;
        let matrix = Matrix::from_columns(target.group.ngens(), &columns)?;
        GroupHom::new(self.group.clone(), target.group.clone(), matrix)
    }
}
