//! Symbolic Kummer classes in `K^× / (K^×)^n` and extension classes of an
//! étale module by a multiplicative one.
//!
//! A class is recorded as the exponent of the uniformizer plus exponents of
//! free unit symbols, all modulo `n`. Unit symbols never satisfy relations:
//! two units agree only when their names are identical. Only the valuation
//! part influences `Crys₁` and the component group, so nothing downstream
//! depends on hidden relations among units.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::abelian::{AbelianError, AbelianGroup, GroupHom, Int, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KummerError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("bad modulus {0}: must be at least 2")]
    BadModulus(String),
    #[error("twist weight {0} is outside the range [0, 1]")]
    WeightOutOfRange(i64),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// Name of a free unit class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitSymbol(String);

impl UnitSymbol {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UnitSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An element of `K^× / (K^×)^n`: `ϖ^val · ∏ u^e` with residues in `[0, n)`
/// and no zero unit exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KummerClass<T> {
    modulus: T,
    val: T,
    units: BTreeMap<UnitSymbol, T>,
}

impl<T: Int> KummerClass<T> {
    pub fn new(
        modulus: T,
        val: T,
        units: impl IntoIterator<Item = (UnitSymbol, T)>,
    ) -> Result<Self, KummerError> {
        if modulus < T::from_i64_lossless(2) {
            return Err(KummerError::BadModulus(modulus.to_string()));
        }
        let mut class = Self {
            val: val.residue(&modulus),
            units: BTreeMap::new(),
            modulus,
        };
        for (sym, e) in units {
            let total = class.units.get(&sym).cloned().unwrap_or_else(T::zero) + e;
            class.units.insert(sym, total);
        }
        class.normalize();
        Ok(class)
    }

    pub fn zero(modulus: T) -> Result<Self, KummerError> {
        Self::new(modulus, T::zero(), [])
    }

    /// The class of `ϖ^v`.
    pub fn uniformizer_power(modulus: T, v: T) -> Result<Self, KummerError> {
        Self::new(modulus, v, [])
    }

    /// The class of a unit with exponent one.
    pub fn unit(modulus: T, symbol: UnitSymbol) -> Result<Self, KummerError> {
        Self::new(modulus, T::zero(), [(symbol, T::one())])
    }

    fn normalize(&mut self) {
        let n = self.modulus.clone();
        self.units.values_mut().for_each(|e| *e = e.residue(&n));
        self.units.retain(|_, e| !e.is_zero());
    }

    pub fn modulus(&self) -> &T {
        &self.modulus
    }

    pub fn val(&self) -> &T {
        &self.val
    }

    pub fn units(&self) -> &BTreeMap<UnitSymbol, T> {
        &self.units
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_zero() && self.units.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self, KummerError> {
        if self.modulus != other.modulus {
            return Err(KummerError::ShapeMismatch(format!(
                "Kummer classes modulo {} and {}",
                self.modulus, other.modulus
            )));
        }
        let units = self
            .units
            .iter()
            .chain(&other.units)
            .map(|(s, e)| (s.clone(), e.clone()));
        Self::new(
            self.modulus.clone(),
            self.val.clone() + other.val.clone(),
            units,
        )
    }

    pub fn scale(&self, k: &T) -> Self {
        let units = self
            .units
            .iter()
            .map(|(s, e)| (s.clone(), e.clone() * k.clone()));
        Self::new(self.modulus.clone(), self.val.clone() * k.clone(), units)
            .expect("modulus already checked")
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    /// The same class with the valuation dropped.
    pub fn unit_part(&self) -> Self {
        Self {
            modulus: self.modulus.clone(),
            val: T::zero(),
            units: self.units.clone(),
        }
    }

    /// The same class with the units dropped.
    pub fn val_part(&self) -> Self {
        Self {
            modulus: self.modulus.clone(),
            val: self.val.clone(),
            units: BTreeMap::new(),
        }
    }

    /// Image under `K^×/(K^×)^n → K^×/(K^×)^d` for `d | n`.
    pub fn reduce(&self, d: &T) -> Result<Self, KummerError> {
        if !self.modulus.is_multiple_of(d) {
            return Err(KummerError::ShapeMismatch(format!(
                "{d} does not divide {}",
                self.modulus
            )));
        }
        Self::new(d.clone(), self.val.clone(), self.units.clone())
    }
}

impl<T: Int> fmt::Display for KummerClass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        if !self.val.is_zero() {
            parts.push(format!("ϖ^{}", self.val));
        }
        parts.extend(self.units.iter().map(|(s, e)| {
            if e.is_one() {
                s.to_string()
            } else {
                format!("{s}^{e}")
            }
        }));
        write!(f, "{}", parts.join("·"))
    }
}

/// Tate twist weight. Only `0` (étale) and `1` (multiplicative) occur here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwistWeight(u8);

impl TwistWeight {
    pub const ETALE: Self = Self(0);
    pub const MULTIPLICATIVE: Self = Self(1);

    pub fn new(weight: i64) -> Result<Self, KummerError> {
        match weight {
            0 | 1 => Ok(Self(weight as u8)),
            w => Err(KummerError::WeightOutOfRange(w)),
        }
    }

    pub fn value(self) -> i64 {
        self.0 as i64
    }

    pub fn shift(self, k: i64) -> Result<Self, KummerError> {
        Self::new(self.value() + k)
    }
}

/// An extension `0 → C → M → E → 0` with `C ≅ (Z/n)^s` multiplicative and
/// `E` étale, classified by an `s x r` matrix of Kummer classes: entry
/// `(i, j)` is the `i`-th coordinate of the cocycle on the `j`-th étale
/// generator. The split extension is the zero matrix.
///
/// The étale part is `(Z/n)^r` for torsion of degeneration data; pullbacks
/// along subgroups make it a general group of exponent dividing `n`, with
/// generators aligned to its invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtClass<T> {
    modulus: T,
    mult_rank: usize,
    etale: AbelianGroup<T>,
    kappa: Vec<KummerClass<T>>,
    mult_weight: TwistWeight,
    etale_weight: TwistWeight,
}

impl<T: Int> ExtClass<T> {
    /// Builds from row-major entries over `(Z/n)^s` and the given étale group.
    pub fn new(
        modulus: T,
        mult_rank: usize,
        etale: AbelianGroup<T>,
        kappa: Vec<KummerClass<T>>,
    ) -> Result<Self, KummerError> {
        if modulus < T::from_i64_lossless(2) {
            return Err(KummerError::BadModulus(modulus.to_string()));
        }
        if kappa.len() != mult_rank * etale.ngens() {
            return Err(KummerError::ShapeMismatch(format!(
                "{} classes for a {mult_rank}x{} matrix",
                kappa.len(),
                etale.ngens()
            )));
        }
        if let Some(k) = kappa.iter().find(|k| *k.modulus() != modulus) {
            return Err(KummerError::ShapeMismatch(format!(
                "entry modulo {} in a class modulo {modulus}",
                k.modulus()
            )));
        }
        if let Some(d) = etale
            .invariants()
            .iter()
            .find(|d| !modulus.is_multiple_of(d))
        {
            return Err(KummerError::ShapeMismatch(format!(
                "étale factor Z/{d} is not killed by {modulus}"
            )));
        }
        Ok(Self {
            modulus,
            mult_rank,
            etale,
            kappa,
            mult_weight: TwistWeight::MULTIPLICATIVE,
            etale_weight: TwistWeight::ETALE,
        })
    }

    /// Extension of `(Z/n)^r` by `(Z/n)^s`.
    pub fn free(
        modulus: T,
        mult_rank: usize,
        etale_rank: usize,
        kappa: Vec<KummerClass<T>>,
    ) -> Result<Self, KummerError> {
        let etale = AbelianGroup::free_mod(&modulus, etale_rank);
        Self::new(modulus, mult_rank, etale, kappa)
    }

    pub fn split(
        modulus: T,
        mult_rank: usize,
        etale: AbelianGroup<T>,
    ) -> Result<Self, KummerError> {
        let zero = KummerClass::zero(modulus.clone())?;
        let entries = vec![zero; mult_rank * etale.ngens()];
        Self::new(modulus, mult_rank, etale, entries)
    }

    /// The class whose valuation matrix is `vals` (`s x r`) and whose unit
    /// parts vanish.
    pub fn from_val_matrix(
        modulus: T,
        etale: AbelianGroup<T>,
        vals: &Matrix<T>,
    ) -> Result<Self, KummerError> {
        let kappa = vals
            .entries()
            .iter()
            .map(|v| KummerClass::uniformizer_power(modulus.clone(), v.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(modulus, vals.rows(), etale, kappa)
    }

    pub fn modulus(&self) -> &T {
        &self.modulus
    }

    pub fn mult_rank(&self) -> usize {
        self.mult_rank
    }

    pub fn etale_rank(&self) -> usize {
        self.etale.ngens()
    }

    pub fn etale(&self) -> &AbelianGroup<T> {
        &self.etale
    }

    pub fn mult(&self) -> AbelianGroup<T> {
        AbelianGroup::free_mod(&self.modulus, self.mult_rank)
    }

    pub fn weights(&self) -> (TwistWeight, TwistWeight) {
        (self.mult_weight, self.etale_weight)
    }

    pub fn entry(&self, i: usize, j: usize) -> &KummerClass<T> {
        &self.kappa[i * self.etale_rank() + j]
    }

    pub fn entries(&self) -> &[KummerClass<T>] {
        &self.kappa
    }

    pub fn is_split(&self) -> bool {
        self.kappa.iter().all(KummerClass::is_zero)
    }

    /// The `s x r` matrix of valuation residues.
    pub fn val_matrix(&self) -> Matrix<T> {
        let vals = self.kappa.iter().map(|k| k.val().clone()).collect();
        Matrix::new(self.mult_rank, self.etale_rank(), vals).expect("shape is an invariant")
    }

    fn check_compatible(&self, other: &Self) -> Result<(), KummerError> {
        if self.modulus != other.modulus
            || self.mult_rank != other.mult_rank
            || self.etale != other.etale
            || self.weights() != other.weights()
        {
            return Err(KummerError::ShapeMismatch(
                "extension classes with different modulus, outer terms or weights".into(),
            ));
        }
        Ok(())
    }

    fn map_entries(&self, f: impl Fn(&KummerClass<T>) -> KummerClass<T>) -> Self {
        Self {
            kappa: self.kappa.iter().map(f).collect(),
            ..self.clone()
        }
    }

    /// Baer sum: entrywise addition of Kummer classes.
    pub fn baer_sum(&self, other: &Self) -> Result<Self, KummerError> {
        self.check_compatible(other)?;
        let kappa = self
            .kappa
            .iter()
            .zip(&other.kappa)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            kappa,
            ..self.clone()
        })
    }

    pub fn neg(&self) -> Self {
        self.map_entries(KummerClass::neg)
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map_entries(|c| c.scale(k))
    }

    /// Splits each entry into its unit part and its valuation part; the two
    /// Baer-sum back to `self`.
    pub fn raynaud_split(&self) -> (Self, Self) {
        (
            self.map_entries(KummerClass::unit_part),
            self.map_entries(KummerClass::val_part),
        )
    }

    /// The unit parts extend over the integers, so the class is 1-crystalline
    /// exactly when its monodromy, the valuation part, vanishes.
    pub fn is_one_crystalline(&self) -> bool {
        self.kappa.iter().all(|k| k.val().is_zero())
    }

    /// The monodromy `E(1) → C`: the valuation matrix as a homomorphism.
    pub fn monodromy_of(&self) -> Result<GroupHom<T>, KummerError> {
        Ok(GroupHom::new(
            self.etale.clone(),
            self.mult(),
            self.val_matrix(),
        )?)
    }

    /// The same classes with the given twist weights on the two parts.
    pub fn with_weights(&self, mult: TwistWeight, etale: TwistWeight) -> Self {
        Self {
            mult_weight: mult,
            etale_weight: etale,
            ..self.clone()
        }
    }

    /// Shifts both twist weights by `k`; the classes are unchanged.
    pub fn tate_twist(&self, k: i64) -> Result<Self, KummerError> {
        Ok(Self {
            mult_weight: self.mult_weight.shift(k)?,
            etale_weight: self.etale_weight.shift(k)?,
            ..self.clone()
        })
    }

    /// Kummer-class matrix product `a · kappa · b` for integer matrices.
    fn transform(&self, left: &Matrix<T>, right: &Matrix<T>) -> Vec<KummerClass<T>> {
        let zero = KummerClass::zero(self.modulus.clone()).expect("modulus already checked");
        let r = self.etale_rank();
        let mut out = Vec::with_capacity(left.rows() * right.cols());
        for i in 0..left.rows() {
            for j in 0..right.cols() {
                let mut acc = zero.clone();
                for a in 0..self.mult_rank {
                    if left[(i, a)].is_zero() {
                        continue;
                    }
                    for b in 0..r {
                        let coeff = left[(i, a)].clone() * right[(b, j)].clone();
                        if coeff.is_zero() {
                            continue;
                        }
                        acc = acc
                            .add(&self.kappa[a * r + b].scale(&coeff))
                            .expect("shared modulus");
                    }
                }
                out.push(acc);
            }
        }
        out
    }

    /// Pushout along `f: (Z/n)^s → (Z/n)^{s'}` given by an `s' x s` matrix.
    pub fn pushforward(&self, f: &Matrix<T>) -> Result<Self, KummerError> {
        if f.cols() != self.mult_rank {
            return Err(KummerError::ShapeMismatch(format!(
                "pushout along a map with {} columns",
                f.cols()
            )));
        }
        let kappa = self.transform(f, &Matrix::identity(self.etale_rank()));
        Ok(Self {
            mult_rank: f.rows(),
            kappa,
            ..self.clone()
        })
    }

    /// Pullback along `g: E' → E`, an `r x r'` matrix whose columns are the
    /// images of the generators of `new_etale`.
    pub fn pullback(&self, g: &Matrix<T>, new_etale: AbelianGroup<T>) -> Result<Self, KummerError> {
        GroupHom::new(new_etale.clone(), self.etale.clone(), g.clone())?;
        let kappa = self.transform(&Matrix::identity(self.mult_rank), g);
        Ok(Self {
            etale: new_etale,
            kappa,
            ..self.clone()
        })
    }

    /// The middle term as an abstract group. `C` is free over `Z/n`, so
    /// every extension splits as abelian groups: `M ≅ (Z/n)^s ⊕ E`.
    pub fn middle_group(&self) -> AbelianGroup<T> {
        self.mult().direct_sum(&self.etale)
    }

    /// Reduction of a class on `(Z/n)^r` to level `d | n`.
    pub fn reduce(&self, d: &T) -> Result<Self, KummerError> {
        let kappa = self
            .kappa
            .iter()
            .map(|k| k.reduce(d))
            .collect::<Result<Vec<_>, _>>()?;
        Self::free(d.clone(), self.mult_rank, self.etale_rank(), kappa)
    }
}

impl<T: Int> fmt::Display for ExtClass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.mult_rank {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.etale_rank())
                .map(|j| self.entry(i, j).to_string())
                .collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "] mod {}", self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn u(name: &str) -> UnitSymbol {
        UnitSymbol::new(name)
    }

    fn val(n: i64, v: i64) -> KummerClass<BigInt> {
        KummerClass::uniformizer_power(b(n), b(v)).unwrap()
    }

    /// The class of `q = u ϖ^v` on a Tate curve at level `n`.
    fn tate(n: i64, v: i64) -> ExtClass<BigInt> {
        let q = KummerClass::new(b(n), b(v), [(u("u"), b(1))]).unwrap();
        ExtClass::free(b(n), 1, 1, vec![q]).unwrap()
    }

    #[test]
    fn canonical_form() {
        let k = KummerClass::new(b(5), b(7), [(u("a"), b(5)), (u("b"), b(-1))]).unwrap();
        assert_eq!(k.val(), &b(2));
        assert!(!k.units().contains_key(&u("a")));
        assert_eq!(k.units()[&u("b")], b(4));
        assert!(KummerClass::zero(b(1)).is_err());
    }

    #[test]
    fn baer_sum_identity_and_addition() {
        let a = tate(5, 2);
        let zero = ExtClass::split(b(5), 1, AbelianGroup::free_mod(&b(5), 1)).unwrap();
        assert_eq!(a.baer_sum(&zero).unwrap(), a);
        let two = ExtClass::free(b(5), 1, 1, vec![val(5, 2)]).unwrap();
        let three = ExtClass::free(b(5), 1, 1, vec![val(5, 3)]).unwrap();
        assert!(two.baer_sum(&three).unwrap().is_split());
    }

    #[test]
    fn class_of_q_is_unit_plus_valuation() {
        let q = tate(25, 5);
        let unit =
            ExtClass::free(b(25), 1, 1, vec![KummerClass::unit(b(25), u("u")).unwrap()]).unwrap();
        let pi_v = ExtClass::free(b(25), 1, 1, vec![val(25, 5)]).unwrap();
        assert_eq!(unit.baer_sum(&pi_v).unwrap(), q);
        let (unit_part, val_part) = q.raynaud_split();
        assert_eq!(unit_part, unit);
        assert_eq!(val_part, pi_v);
    }

    #[test]
    fn crystalline_criterion() {
        assert!(ExtClass::split(b(5), 2, AbelianGroup::free_mod(&b(5), 2))
            .unwrap()
            .is_one_crystalline());
        assert!(tate(5, 5).is_one_crystalline());
        assert!(!tate(25, 5).is_one_crystalline());
    }

    #[test]
    fn monodromy_maps() {
        assert!(ExtClass::split(b(4), 1, AbelianGroup::free_mod(&b(4), 1))
            .unwrap()
            .monodromy_of()
            .unwrap()
            .is_zero());
        let nu = tate(25, 5).monodromy_of().unwrap();
        assert_eq!(nu.matrix(), &Matrix::from_i64_rows(&[&[5]]));
        let vals = Matrix::from_i64_rows(&[&[2, 0], &[0, 4]]);
        let e = ExtClass::from_val_matrix(b(4), AbelianGroup::free_mod(&b(4), 2), &vals).unwrap();
        assert_eq!(e.monodromy_of().unwrap().matrix(), &vals.reduce_mod(&b(4)));
    }

    #[test]
    fn twisting() {
        // An extension of etale by etale, e.g. an untwisted monodromy target.
        let a = tate(5, 1).with_weights(TwistWeight::ETALE, TwistWeight::ETALE);
        let twisted = a.tate_twist(1).unwrap();
        assert_eq!(
            twisted.weights(),
            (TwistWeight::MULTIPLICATIVE, TwistWeight::MULTIPLICATIVE)
        );
        assert_eq!(twisted.entries(), a.entries());
        assert_eq!(twisted.tate_twist(-1).unwrap(), a);
        // The multiplicative part already sits at weight 1.
        assert!(matches!(
            tate(5, 1).tate_twist(1),
            Err(KummerError::WeightOutOfRange(2))
        ));
        assert!(matches!(
            a.tate_twist(-1),
            Err(KummerError::WeightOutOfRange(-1))
        ));
    }

    #[test]
    fn weight_shifts() {
        assert_eq!(
            TwistWeight::ETALE.shift(1).unwrap(),
            TwistWeight::MULTIPLICATIVE
        );
        assert!(TwistWeight::MULTIPLICATIVE.shift(1).is_err());
        assert!(TwistWeight::new(3).is_err());
    }

    #[test]
    fn shape_checks() {
        let a = tate(5, 1);
        let c = ExtClass::split(b(5), 2, AbelianGroup::free_mod(&b(5), 1)).unwrap();
        assert!(matches!(a.baer_sum(&c), Err(KummerError::ShapeMismatch(_))));
        assert!(ExtClass::free(b(5), 2, 2, vec![val(5, 1)]).is_err());
    }

    #[test]
    fn pullback_and_pushforward() {
        let vals = Matrix::from_i64_rows(&[&[2, 1], &[1, 2]]);
        let e = ExtClass::from_val_matrix(b(3), AbelianGroup::free_mod(&b(3), 2), &vals).unwrap();
        let g = Matrix::from_i64_rows(&[&[1], &[1]]);
        let pulled = e.pullback(&g, AbelianGroup::free_mod(&b(3), 1)).unwrap();
        assert!(pulled.is_one_crystalline());
        let f = Matrix::from_i64_rows(&[&[1, 1]]);
        let pushed = e.pushforward(&f).unwrap();
        assert_eq!(pushed.val_matrix(), Matrix::from_i64_rows(&[&[0, 0]]));
    }
}
