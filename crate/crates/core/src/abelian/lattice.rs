//! Integer lattices in Hermite normal form, and subgroups of `(Z/n)^k`
//! represented by the lattices between `nZ^k` and `Z^k`.

use super::matrix::Matrix;
use super::scalar::Int;
use super::AbelianError;

/// Row-style Hermite normal form of the row span of `generators`: echelon,
/// positive pivots, entries above each pivot reduced into `[0, pivot)`, zero
/// rows dropped. The result is a canonical basis of the lattice.
pub fn hermite_normal_form<T: Int>(dim: usize, generators: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut rows: Vec<Vec<T>> = generators
        .iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    debug_assert!(rows.iter().all(|r| r.len() == dim));
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..dim {
        if r == rows.len() {
            break;
        }
        loop {
            let best = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()));
            let Some(best) = best else { break };
            rows.swap(r, best);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let (head, tail) = rows.split_at_mut(i);
                axpy(&mut tail[0], &head[r], &-q);
                done &= tail[0][c].is_zero();
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    rows.truncate(r);
    for (k, &c) in pivots.iter().enumerate() {
        for i in 0..k {
            let q = rows[i][c].div_floor(&rows[k][c]);
            let (head, tail) = rows.split_at_mut(k);
            axpy(&mut head[i], &tail[0], &-q);
        }
    }
    rows
}

/// `dst += c * src`.
fn axpy<T: Int>(dst: &mut [T], src: &[T], c: &T) {
    if c.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d = d.clone() + s.clone() * c.clone();
    }
}

/// A sublattice of `Z^dim`, stored by its Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice<T> {
    dim: usize,
    basis: Vec<Vec<T>>,
}

impl<T: Int> Lattice<T> {
    pub fn from_generators(dim: usize, generators: &[Vec<T>]) -> Result<Self, AbelianError> {
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(AbelianError::ShapeMismatch(format!(
                "generator of length {} in Z^{dim}",
                g.len()
            )));
        }
        Ok(Self {
            dim,
            basis: hermite_normal_form(dim, generators),
        })
    }

    /// `diag(moduli) Z^dim`.
    pub fn diagonal(moduli: &[T]) -> Self {
        let gens: Vec<Vec<T>> = Matrix::diagonal(moduli).to_rows();
        Self {
            dim: moduli.len(),
            basis: hermite_normal_form(moduli.len(), &gens),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    /// Index `[Z^dim : self]` for full-rank lattices.
    pub fn index(&self) -> Option<T> {
        self.is_full_rank()
            .then(|| (0..self.dim).fold(T::one(), |acc, i| acc * self.basis[i][i].clone()))
    }

    /// Coordinates of `v` in the Hermite basis, or `None` if `v` is not in
    /// the lattice.
    pub fn coordinates(&self, v: &[T]) -> Option<Vec<T>> {
        if v.len() != self.dim {
            return None;
        }
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let c = row
                .iter()
                .position(|x| !x.is_zero())
                .expect("Hermite rows are nonzero");
            if rest[..c].iter().any(|x| !x.is_zero()) {
                return None;
            }
            if !rest[c].is_multiple_of(&row[c]) {
                return None;
            }
            let q = rest[c].clone() / row[c].clone();
            axpy(&mut rest, row, &-q.clone());
            coords.push(q);
        }
        rest.iter().all(|x| x.is_zero()).then_some(coords)
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Self) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn sum(&self, other: &Self) -> Result<Self, AbelianError> {
        if self.dim != other.dim {
            return Err(AbelianError::ShapeMismatch(
                "sum of lattices in different ambient ranks".into(),
            ));
        }
        let gens: Vec<Vec<T>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Self::from_generators(self.dim, &gens)
    }

    /// The image under the ambient map `v -> m v` (column convention, `m` is
    /// `target_dim x dim`).
    pub fn image(&self, m: &Matrix<T>) -> Result<Self, AbelianError> {
        let gens = self
            .basis
            .iter()
            .map(|b| m.mul_vec(b))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_generators(m.rows(), &gens)
    }
}

/// A subgroup of `(Z/n)^rank`, canonicalized as the lattice it generates
/// together with `nZ^rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup<T> {
    modulus: T,
    lattice: Lattice<T>,
}

impl<T: Int> Subgroup<T> {
    pub fn new(modulus: T, rank: usize, generators: &[Vec<T>]) -> Result<Self, AbelianError> {
        if modulus < T::one() {
            return Err(AbelianError::BadModulus(format!(
                "modulus {modulus} must be positive"
            )));
        }
        let mut gens = generators.to_vec();
        gens.extend(Matrix::scalar(rank, modulus.clone()).to_rows());
        Ok(Self {
            modulus,
            lattice: Lattice::from_generators(rank, &gens)?,
        })
    }

    pub fn whole(modulus: T, rank: usize) -> Self {
        let lattice = Lattice::diagonal(&vec![T::one(); rank]);
        Self { modulus, lattice }
    }

    pub fn trivial(modulus: T, rank: usize) -> Self {
        let lattice = Lattice::diagonal(&vec![modulus.clone(); rank]);
        Self { modulus, lattice }
    }

    /// Builds from rows already in canonical Hermite form. Callers guarantee
    /// the rows span a lattice containing `nZ^rank`.
    pub(crate) fn from_canonical_rows(modulus: T, rows: Vec<Vec<T>>) -> Self {
        let dim = rows.len();
        Self {
            modulus,
            lattice: Lattice { dim, basis: rows },
        }
    }

    pub fn modulus(&self) -> &T {
        &self.modulus
    }

    pub fn rank(&self) -> usize {
        self.lattice.dim()
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.lattice
    }

    /// Canonical generators: Hermite rows reduced mod `n`, zero rows dropped.
    pub fn generators(&self) -> Vec<Vec<T>> {
        self.lattice
            .basis()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.residue(&self.modulus))
                    .collect::<Vec<_>>()
            })
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect()
    }

    pub fn order(&self) -> T {
        let whole = self.modulus.pow_u32(self.rank() as u32);
        whole
            / self
                .lattice
                .index()
                .expect("contains nZ^k, hence full rank")
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.lattice.contains(v)
    }

    pub fn contains_subgroup(&self, other: &Self) -> bool {
        self.lattice.contains_lattice(&other.lattice)
    }

    pub fn sum(&self, other: &Self) -> Result<Self, AbelianError> {
        if self.modulus != other.modulus {
            return Err(AbelianError::ShapeMismatch(
                "sum of subgroups with different moduli".into(),
            ));
        }
        Ok(Self {
            modulus: self.modulus.clone(),
            lattice: self.lattice.sum(&other.lattice)?,
        })
    }

    /// Closure check: every sum of two canonical generators lies in the subgroup.
    pub fn is_closed(&self) -> bool {
        let gens = self.generators();
        gens.iter().all(|a| {
            gens.iter().all(|b| {
                let s: Vec<T> = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x.clone() + y.clone()).residue(&self.modulus))
                    .collect();
                self.contains(&s)
            })
        })
    }
}
