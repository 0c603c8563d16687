//! `Crys₁` of torsion and of the Tate module, the component group, and the
//! finite-level comparisons between them.
//!
//! All subgroups of `A[n] = (Z/n)^{2t}` are written in the fixed coordinates
//! `x_1…x_t, y_1…y_t` of [`TorsionModule`](crate::degeneration::TorsionModule).
//! The transition `A[p^{m+1}] → A[p^m]` (multiplication by `p`) is reduction
//! of coordinates mod `p^m`, and the inclusion `A[p^m] → A[p^{m+1}]` is
//! multiplication of coordinates by `p`.

use thiserror::Error;

use crate::abelian::{
    cokernel, enumerate_subgroups, is_prime, is_short_exact, kernel_mod_n, valuation, AbelianError,
    AbelianGroup, Int, Matrix, Subgroup, Subquotient,
};
use crate::degeneration::{Degeneration, DegenerationError};
use crate::kummer::{KummerError, TwistWeight};
use crate::monodromy::{generic_fiber, star_pullback, ExtNu, MonodromyError};

/// Default level cap for stabilization checks.
pub const DEFAULT_CAP: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrysError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("Φ[p^m] still grows at the cap m = {cap} (last growth at m = {last_growth})")]
    NotStabilized { cap: u32, last_growth: u32 },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Degeneration(#[from] DegenerationError),
    #[error(transparent)]
    Kummer(#[from] KummerError),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// A subgroup of `A[p^m]` claimed to be `Crys₁(A[p^m])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crys1<T> {
    level: T,
    exponent: u32,
    toric_rank: usize,
    generators: Vec<Vec<T>>,
    subgroup: Subgroup<T>,
    group: AbelianGroup<T>,
}

impl<T: Int> Crys1<T> {
    /// From generators in `(x, y)` coordinates of `(Z/p^m)^{2t}`.
    pub fn from_generators(
        p: &T,
        exponent: u32,
        toric_rank: usize,
        generators: Vec<Vec<T>>,
    ) -> Result<Self, CrysError> {
        let level = p.pow_u32(exponent);
        if generators.iter().any(|g| g.len() != 2 * toric_rank) {
            return Err(CrysError::BadInput(format!(
                "generators must have {} coordinates",
                2 * toric_rank
            )));
        }
        let subgroup = Subgroup::new(level.clone(), 2 * toric_rank, &generators)?;
        let group = Subquotient::of_subgroup(&subgroup)?.group().clone();
        Ok(Self {
            level,
            exponent,
            toric_rank,
            generators,
            subgroup,
            group,
        })
    }

    pub fn level(&self) -> &T {
        &self.level
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn toric_rank(&self) -> usize {
        self.toric_rank
    }

    /// `n^{2t}`.
    pub fn ambient_order(&self) -> T {
        self.level.pow_u32(2 * self.toric_rank as u32)
    }

    pub fn generators(&self) -> &[Vec<T>] {
        &self.generators
    }

    pub fn subgroup(&self) -> &Subgroup<T> {
        &self.subgroup
    }

    pub fn group(&self) -> &AbelianGroup<T> {
        &self.group
    }

    pub fn order(&self) -> T {
        self.subgroup.order()
    }

    pub fn is_full(&self) -> bool {
        self.order() == self.ambient_order()
    }

    /// `T[n] ⊆ self`.
    pub fn contains_torus(&self) -> bool {
        torus_generators(self.toric_rank)
            .iter()
            .all(|x| self.subgroup.contains(x))
    }

    /// Same subgroup of the same `A[n]`, regardless of the generators used.
    pub fn same_as(&self, other: &Self) -> bool {
        self.level == other.level && self.subgroup == other.subgroup && self.group == other.group
    }
}

fn torus_generators<T: Int>(t: usize) -> Vec<Vec<T>> {
    (0..t)
        .map(|i| {
            (0..2 * t)
                .map(|k| if k == i { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

fn torus<T: Int>(n: &T, t: usize) -> Result<Subgroup<T>, AbelianError> {
    Subgroup::new(n.clone(), 2 * t, &torus_generators(t))
}

/// Puts étale coordinates in the `y` slots.
fn lift<T: Int>(t: usize, w: &[T]) -> Vec<T> {
    let mut v = vec![T::zero(); t];
    v.extend(w.iter().cloned());
    v
}

/// `Crys₁(A[p^m])`, computed as the generic fiber of the pullback of
/// `(η(Q¹), ν_n)` along `ker ν_n`.
pub fn crys1_torsion<T: Int>(data: &Degeneration<T>, m: u32) -> Result<Crys1<T>, CrysError> {
    let t = data.toric_rank();
    let obj = ExtNu::from_raynaud(&data.raynaud_decompose(m)?)?;
    let star = star_pullback(&obj)?;
    if !generic_fiber(&star.object)?.is_one_crystalline() {
        return Err(CrysError::Inconsistent(
            "generic fiber of the pullback has monodromy".into(),
        ));
    }
    let mut generators = torus_generators(t);
    generators.extend(star.kernel_generators.iter().map(|w| lift(t, w)));
    Crys1::from_generators(data.p(), m, t, generators)
}

/// Brute force: the sum of `T[n] + W̃` over all subgroups `W` of the étale
/// quotient whose pulled-back extension has no monodromy.
pub fn oracle_crys1<T: Int>(
    data: &Degeneration<T>,
    m: u32,
    budget: u64,
) -> Result<Crys1<T>, CrysError> {
    let n = data.level(m)?;
    let subgroups = enumerate_subgroups(&n, data.toric_rank(), budget)?;
    oracle_crys1_with(data, m, &subgroups)
}

/// As [`oracle_crys1`], over a precomputed list of subgroups of `(Z/p^m)^t`.
pub fn oracle_crys1_with<T: Int>(
    data: &Degeneration<T>,
    m: u32,
    subgroups: &[Subgroup<T>],
) -> Result<Crys1<T>, CrysError> {
    let t = data.toric_rank();
    let torsion = data.torsion_module(m)?;
    let n = torsion.level.clone();
    // Unit parts always prolong, so only the valuation part can obstruct.
    let (_, obstruction) = torsion.ext.raynaud_split();
    let mut best = Subgroup::trivial(n.clone(), t);
    for w in subgroups {
        if *w.modulus() != n || w.rank() != t {
            return Err(CrysError::BadInput(
                "subgroup list for a different étale module".into(),
            ));
        }
        if best.contains_subgroup(w) {
            continue;
        }
        let gens = w.generators();
        let g = Matrix::from_columns(t, &gens)?;
        let restricted = obstruction.pullback(&g, AbelianGroup::free_mod(&n, gens.len()))?;
        if restricted.is_one_crystalline() {
            best = best.sum(w)?;
        }
    }
    let mut generators = torus_generators(t);
    generators.extend(best.generators().iter().map(|w| lift(t, w)));
    Crys1::from_generators(data.p(), m, t, generators)
}

/// `Crys₁(A[p^m])` for the Tate curve with `v(q) = v`, in closed form.
pub fn tate_closed_form<T: Int>(v: &T, p: &T, m: u32) -> Result<Crys1<T>, CrysError> {
    if *v < T::one() {
        return Err(CrysError::BadInput(format!("v = {v} must be at least 1")));
    }
    if !is_prime(p) {
        return Err(CrysError::BadInput(format!("p = {p} is not prime")));
    }
    if m < 1 {
        return Err(CrysError::BadInput("m must be at least 1".into()));
    }
    let w = valuation(v, p).expect("v is nonzero");
    let generators = if m <= w {
        vec![vec![T::one(), T::zero()], vec![T::zero(), T::one()]]
    } else {
        vec![vec![T::one(), T::zero()], vec![T::zero(), p.pow_u32(m - w)]]
    };
    Crys1::from_generators(p, m, 1, generators)
}

/// What the levels `1..=cap` say about `Crys₁(T_p A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateModuleReport {
    pub rank: usize,
    pub weight: TwistWeight,
    pub cap: u32,
    /// Reduction carries `Crys₁(A[p^{m+1}])` into `Crys₁(A[p^m])` for every
    /// `m < cap`.
    pub compatible: bool,
    /// The étale part of `Crys₁(A[p^cap])` reduces to zero in `A[p]`, so no
    /// compatible system has a nonzero `y`-component.
    pub y_limit_trivial: bool,
    /// Smallest `M ≤ cap` whose étale part dies in `A[p]`.
    pub y_vanishes_at: Option<u32>,
}

/// `Crys₁(T_p A) ≅ Z_p(1)^t`, checked through levels up to `cap`.
pub fn crys1_tate_module<T: Int>(
    data: &Degeneration<T>,
    cap: u32,
) -> Result<TateModuleReport, CrysError> {
    let t = data.toric_rank();
    let levels = (1..=cap.max(1))
        .map(|m| crys1_torsion(data, m))
        .collect::<Result<Vec<_>, _>>()?;
    let mut compatible = true;
    for pair in levels.windows(2) {
        compatible &= reduce_into(&pair[1], &pair[0])?;
    }
    let p = data.p();
    let mut y_vanishes_at = None;
    for c in &levels {
        let dies = c
            .generators()
            .iter()
            .all(|g| g[t..].iter().all(|y| y.residue(p).is_zero()));
        if dies {
            y_vanishes_at = Some(c.exponent());
            break;
        }
    }
    Ok(TateModuleReport {
        rank: t,
        weight: TwistWeight::MULTIPLICATIVE,
        cap,
        compatible,
        y_limit_trivial: y_vanishes_at.is_some(),
        y_vanishes_at,
    })
}

/// Whether reducing `upper` to the level of `lower` lands inside `lower`.
pub fn reduce_into<T: Int>(upper: &Crys1<T>, lower: &Crys1<T>) -> Result<bool, CrysError> {
    let n = lower.level();
    let reduced: Vec<Vec<T>> = upper
        .generators()
        .iter()
        .map(|g| g.iter().map(|c| c.residue(n)).collect())
        .collect();
    let image = Subgroup::new(n.clone(), 2 * lower.toric_rank(), &reduced)?;
    Ok(lower.subgroup().contains_subgroup(&image))
}

/// `Φ ≅ coker(mu)`.
pub fn component_group<T: Int>(data: &Degeneration<T>) -> Result<AbelianGroup<T>, CrysError> {
    Ok(cokernel(data.mu())?)
}

/// `Φ[p^m] ≅ ker(mu mod p^m)`.
pub fn phi_n<T: Int>(data: &Degeneration<T>, m: u32) -> Result<AbelianGroup<T>, CrysError> {
    Ok(kernel_mod_n(data.mu(), &data.level(m)?)?.group)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiCheck<T> {
    /// `Crys₁(A[p^m]) / T[p^m]`.
    pub quotient: AbelianGroup<T>,
    pub phi: AbelianGroup<T>,
    pub agrees: bool,
}

/// `Φ[p^m] ≅ Crys₁(A[p^m]) / (Crys₁(T_p A) ⊗ Z/p^m)`, where the denominator
/// is `T[p^m]`.
pub fn phi_formula_check<T: Int>(data: &Degeneration<T>, m: u32) -> Result<PhiCheck<T>, CrysError> {
    let crys = crys1_torsion(data, m)?;
    let quotient =
        Subquotient::quotient(crys.subgroup(), &torus(crys.level(), crys.toric_rank())?)?
            .group()
            .clone();
    let phi = phi_n(data, m)?;
    let agrees = quotient == phi;
    Ok(PhiCheck {
        quotient,
        phi,
        agrees,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R1Torsion<T> {
    pub group: AbelianGroup<T>,
    /// Smallest `m` with `Φ[p^m] = Φ[p^∞]`.
    pub stable_from: u32,
}

/// `(R¹Crys₁ T_p A)_tors` as the stable value of `Φ[p^m]`, `m = 1..=cap`.
pub fn r1crys1_tors<T: Int>(data: &Degeneration<T>, cap: u32) -> Result<R1Torsion<T>, CrysError> {
    let mut prev = AbelianGroup::trivial();
    let mut last_growth = 0;
    for m in 1..=cap {
        let cur = phi_n(data, m)?;
        if cur.order() == prev.order() {
            return Ok(R1Torsion {
                group: prev,
                stable_from: last_growth,
            });
        }
        prev = cur;
        last_growth = m;
    }
    Err(CrysError::NotStabilized { cap, last_growth })
}

/// The long exact sequence
/// `0 → Crys₁(L) → Crys₁(L[1/p]) → Crys₁(L ⊗ Q_p/Z_p) → R¹Crys₁(L)_tors → 0`
/// for `L = T_p A`, assembled from the levels `1..=cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Les<T> {
    pub cap: u32,
    /// Rank of `Crys₁(L)` and of `Crys₁(L[1/p])`, both of weight one.
    pub rank: usize,
    pub weight: TwistWeight,
    /// Number of `Z/p^cap` factors of `Crys₁(A[p^cap])`: the divisible part
    /// `(Q_p/Z_p)^rank` of the colimit term.
    pub divisible_rank: usize,
    /// The remaining factors: torsion of the colimit term.
    pub colimit_torsion: AbelianGroup<T>,
    pub r1_torsion: R1Torsion<T>,
    /// `0 → (Z/p^m)^t → Crys₁(A[p^m]) → Φ[p^m] → 0` is exact, per level.
    pub finite_exact: Vec<bool>,
    /// `A[p^m] ⊂ A[p^{m+1}]` carries `Crys₁` into `Crys₁`, and reduction
    /// goes back, per level `m < cap`.
    pub transitions: Vec<bool>,
    /// The connecting map's image (the colimit torsion) is the `R¹` torsion.
    pub connecting: bool,
}

impl<T> Les<T> {
    pub fn all_exact(&self) -> bool {
        self.finite_exact
            .iter()
            .chain(&self.transitions)
            .all(|&b| b)
            && self.connecting
    }
}

pub fn les_report<T: Int>(data: &Degeneration<T>, cap: u32) -> Result<Les<T>, CrysError> {
    let r1_torsion = r1crys1_tors(data, cap)?;
    let t = data.toric_rank();
    let p = data.p().clone();
    let levels = (1..=cap)
        .map(|m| crys1_torsion(data, m))
        .collect::<Result<Vec<_>, _>>()?;
    let finite_exact = levels
        .iter()
        .map(|c| finite_level_exact(data, c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut transitions = Vec::new();
    for pair in levels.windows(2) {
        let (lower, upper) = (&pair[0], &pair[1]);
        let included: Vec<Vec<T>> = lower
            .generators()
            .iter()
            .map(|g| g.iter().map(|c| c.clone() * p.clone()).collect())
            .collect();
        let image = Subgroup::new(upper.level().clone(), 2 * t, &included)?;
        transitions.push(upper.subgroup().contains_subgroup(&image) && reduce_into(upper, lower)?);
    }
    let top = levels
        .last()
        .ok_or(CrysError::BadInput("cap must be at least 1".into()))?;
    let full = top.level();
    let divisible_rank = top
        .group()
        .invariants()
        .iter()
        .filter(|d| *d == full)
        .count();
    let colimit_torsion = AbelianGroup::from_invariants(
        top.group()
            .invariants()
            .iter()
            .filter(|d| *d != full)
            .cloned()
            .collect(),
    )?;
    let connecting = divisible_rank == t && colimit_torsion == r1_torsion.group;
    Ok(Les {
        cap,
        rank: t,
        weight: TwistWeight::MULTIPLICATIVE,
        divisible_rank,
        colimit_torsion,
        r1_torsion,
        finite_exact,
        transitions,
        connecting,
    })
}

/// `(Z/n)^t → Crys₁(A[n]) → ker(mu mod n)` through `x ↦ (x, 0)` and
/// `(x, y) ↦ y`.
fn finite_level_exact<T: Int>(data: &Degeneration<T>, crys: &Crys1<T>) -> Result<bool, CrysError> {
    let t = crys.toric_rank();
    let n = crys.level();
    let torus = Subquotient::of_subgroup(&Subgroup::whole(n.clone(), t))?;
    let middle = Subquotient::of_subgroup(crys.subgroup())?;
    let phi = Subquotient::of_subgroup(&kernel_mod_n(data.mu(), n)?.subgroup())?;
    let mut include = Matrix::zeros(2 * t, t);
    let mut project = Matrix::zeros(t, 2 * t);
    for i in 0..t {
        include[(i, i)] = T::one();
        project[(i, t + i)] = T::one();
    }
    let f = torus.induced_hom(&middle, &include)?;
    let g = middle.induced_hom(&phi, &project)?;
    Ok(is_short_exact(&f, &g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::DEFAULT_BUDGET;
    use num_bigint::BigInt;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn data(p: i64, rows: &[&[i64]]) -> Degeneration<BigInt> {
        Degeneration::new(b(p), Matrix::from_i64_rows(rows), None).unwrap()
    }

    fn group(inv: &[i64]) -> AbelianGroup<BigInt> {
        AbelianGroup::from_invariants(inv.iter().map(|&d| b(d)).collect()).unwrap()
    }

    #[test]
    fn tate_curve_torsion() {
        let d = data(5, &[&[5]]);
        let c = crys1_torsion(&d, 1).unwrap();
        assert!(c.is_full());
        assert_eq!(c.order(), b(25));

        let c = crys1_torsion(&d, 2).unwrap();
        assert_eq!(c.group(), &group(&[5, 25]));
        assert_eq!(c.generators(), &[vec![b(1), b(0)], vec![b(0), b(5)]]);
        assert!(!c.is_full());
        assert!(c.contains_torus());
    }

    #[test]
    fn rank_two_torsion() {
        let c = crys1_torsion(&data(2, &[&[2, 0], &[0, 4]]), 2).unwrap();
        assert_eq!(c.group(), &group(&[2, 4, 4, 4]));
        assert_eq!(c.order(), b(128));
    }

    #[test]
    fn oracle_examples() {
        let c = oracle_crys1(&data(5, &[&[3]]), 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.order(), b(5));
        let c = oracle_crys1(&data(3, &[&[9]]), 2, DEFAULT_BUDGET).unwrap();
        assert!(c.is_full());
        let d = data(3, &[&[2, 1], &[1, 2]]);
        let c = oracle_crys1(&d, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.order(), b(27));
        assert!(c.subgroup().contains(&[b(0), b(0), b(1), b(1)]));
        assert!(c.same_as(&crys1_torsion(&d, 1).unwrap()));
        assert!(matches!(
            oracle_crys1(&d, 9, 100),
            Err(CrysError::Abelian(AbelianError::BudgetExceeded { .. }))
        ));
    }

    #[test]
    fn closed_form() {
        assert!(tate_closed_form(&b(5), &b(5), 1).unwrap().is_full());
        assert_eq!(
            tate_closed_form(&b(5), &b(5), 2).unwrap().group(),
            &group(&[5, 25])
        );
        assert_eq!(
            tate_closed_form(&b(3), &b(5), 4).unwrap().group(),
            &group(&[625])
        );
        assert!(matches!(
            tate_closed_form(&b(0), &b(5), 1),
            Err(CrysError::BadInput(_))
        ));
    }

    #[test]
    fn tate_module() {
        let r = crys1_tate_module(&data(5, &[&[5]]), 6).unwrap();
        assert_eq!(r.rank, 1);
        assert_eq!(r.weight.value(), 1);
        assert!(r.compatible);
        assert_eq!(r.y_vanishes_at, Some(2));
        assert_eq!(
            crys1_tate_module(&data(2, &[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]]), 3)
                .unwrap()
                .rank,
            3
        );
    }

    #[test]
    fn component_groups() {
        assert_eq!(component_group(&data(5, &[&[5]])).unwrap(), group(&[5]));
        assert!(component_group(&data(5, &[&[1, 0], &[0, 1]]))
            .unwrap()
            .is_trivial());
        assert_eq!(
            component_group(&data(5, &[&[2, 1], &[1, 2]])).unwrap(),
            group(&[3])
        );
        assert_eq!(phi_n(&data(5, &[&[5]]), 1).unwrap(), group(&[5]));
        assert_eq!(phi_n(&data(5, &[&[5]]), 3).unwrap(), group(&[5]));
    }

    #[test]
    fn formula_check() {
        let r = phi_formula_check(&data(5, &[&[5]]), 2).unwrap();
        assert_eq!(r.quotient, group(&[5]));
        assert!(r.agrees);
        let r = phi_formula_check(&data(2, &[&[2, 0], &[0, 4]]), 2).unwrap();
        assert_eq!(r.quotient, group(&[2, 4]));
        assert!(r.agrees);
        assert!(phi_formula_check(&data(3, &[&[1]]), 2)
            .unwrap()
            .quotient
            .is_trivial());
    }

    #[test]
    fn r1_torsion() {
        let r = r1crys1_tors(&data(2, &[&[12]]), 4).unwrap();
        assert_eq!(r.group, group(&[4]));
        assert_eq!(r.stable_from, 2);
        assert_eq!(
            r1crys1_tors(&data(3, &[&[12]]), 3).unwrap().group,
            group(&[3])
        );
        assert!(r1crys1_tors(&data(3, &[&[1]]), 1)
            .unwrap()
            .group
            .is_trivial());
        assert_eq!(
            r1crys1_tors(&data(2, &[&[64]]), 4),
            Err(CrysError::NotStabilized {
                cap: 4,
                last_growth: 4
            })
        );
    }

    #[test]
    fn les() {
        let r = les_report(&data(5, &[&[5]]), 4).unwrap();
        assert_eq!(r.divisible_rank, 1);
        assert_eq!(r.colimit_torsion, group(&[5]));
        assert_eq!(r.r1_torsion.group, group(&[5]));
        assert!(r.all_exact());

        let r = les_report(&data(2, &[&[2, 0], &[0, 4]]), 5).unwrap();
        assert_eq!(r.colimit_torsion, group(&[2, 4]));
        assert!(r.all_exact());

        let r = les_report(&data(3, &[&[1, 0], &[0, 1]]), 3).unwrap();
        assert!(r.colimit_torsion.is_trivial());
        assert!(r.all_exact());
    }
}
