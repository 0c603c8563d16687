//! Prolongable extensions with monodromy.
//!
//! An object is a pair `(η, ν)`: a 1-crystalline extension `η` of an étale
//! module `E` by `C = (Z/n)^s`, and a monodromy map `ν: E(1) → C`. Two
//! functors leave the category:
//!
//! * the monodromy pushout `MP(η, ν)`, obtained by tensoring the torsion of
//!   the uniformizer Tate curve with `E` and pushing out along `ν`;
//! * the generic fiber `(η, ν)_K = η + MP(η, ν)` (Baer sum).
//!
//! Each middle term is built twice: as a class, whose underlying group is
//! `C ⊕ E`, and as an explicit presentation. [`mp_pushout`] insists the two
//! agree. Morphisms act on the presentations, which is what the exactness
//! harness consumes.
//!
//! The uniformizer torsion `E_ϖ[n]` is carried by its adapted basis
//! `{x_1, x_2}` with cocycle of valuation one and no units.

use thiserror::Error;

use crate::abelian::{
    is_short_exact, kernel_mod_n, AbelianError, AbelianGroup, GroupHom, Int, Lattice, Matrix,
    Subquotient,
};
use crate::degeneration::RaynaudDecomposition;
use crate::kummer::{ExtClass, KummerError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonodromyError {
    #[error("extension class is not 1-crystalline, so it does not prolong")]
    NotProlongable,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a morphism: {0}")]
    NotAMorphism(MorphismDefect),
    #[error("presented middle term {presented} disagrees with the class route {expected}")]
    PresentationMismatch { presented: String, expected: String },
    #[error(transparent)]
    Kummer(#[from] KummerError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismDefect {
    /// A component is not a homomorphism of the outer terms.
    NotAHom(String),
    /// `f_mult ∘ ν_A ≠ ν_B ∘ f_etale`.
    MonodromySquare,
    /// `(f_mult)_* η_A ≠ (f_etale)^* η_B`: no compatible middle map.
    ClassMismatch,
}

impl std::fmt::Display for MorphismDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NotAHom(why) => write!(f, "component is not a homomorphism ({why})"),
            Self::MonodromySquare => write!(f, "monodromy square does not commute"),
            Self::ClassMismatch => write!(f, "extension classes are not compatible"),
        }
    }
}

/// An object `(η, ν)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtNu<T> {
    eta: ExtClass<T>,
    nu: GroupHom<T>,
}

impl<T: Int> ExtNu<T> {
    pub fn new(eta: ExtClass<T>, nu: GroupHom<T>) -> Result<Self, MonodromyError> {
        if !eta.is_one_crystalline() {
            return Err(MonodromyError::NotProlongable);
        }
        if *nu.source() != *eta.etale() || *nu.target() != eta.mult() {
            return Err(MonodromyError::ShapeMismatch(format!(
                "monodromy {} → {} on an extension of {} by {}",
                nu.source(),
                nu.target(),
                eta.etale(),
                eta.mult()
            )));
        }
        Ok(Self { eta, nu })
    }

    /// The object `(η(Q¹), ν_n)` attached to degeneration data.
    pub fn from_raynaud(r: &RaynaudDecomposition<T>) -> Result<Self, MonodromyError> {
        Self::new(r.eta1.clone(), r.nu.clone())
    }

    pub fn level(&self) -> &T {
        self.eta.modulus()
    }

    pub fn eta(&self) -> &ExtClass<T> {
        &self.eta
    }

    pub fn nu(&self) -> &GroupHom<T> {
        &self.nu
    }

    pub fn mult_rank(&self) -> usize {
        self.eta.mult_rank()
    }

    pub fn etale(&self) -> &AbelianGroup<T> {
        self.eta.etale()
    }

    fn etale_rank(&self) -> usize {
        self.eta.etale_rank()
    }

    /// The presentation of `MP(η, ν)⁰`: generators `y_j⊗x_1`, `y_j⊗x_2`,
    /// `c_i`; relations the orders of the generators and
    /// `y_j⊗x_1 = ν(y_j)`.
    pub fn mp_presentation(&self) -> Result<PresentedModule<T>, MonodromyError> {
        let (s, r) = (self.mult_rank(), self.etale_rank());
        let n = self.level().clone();
        let orders = self.etale().invariants();
        let dim = 2 * r + s;
        let mut labels = Vec::with_capacity(dim);
        labels.extend((1..=r).map(|j| format!("y{j}⊗x1")));
        labels.extend((1..=r).map(|j| format!("y{j}⊗x2")));
        labels.extend((1..=s).map(|i| format!("c{i}")));
        let mut relations = Vec::new();
        for (j, g) in orders.iter().enumerate() {
            relations.push(unit_vector(dim, j, g.clone()));
            relations.push(unit_vector(dim, r + j, g.clone()));
        }
        for i in 0..s {
            relations.push(unit_vector(dim, 2 * r + i, n.clone()));
        }
        for j in 0..r {
            let mut rel = unit_vector(dim, j, T::one());
            for i in 0..s {
                rel[2 * r + i] = -self.nu.matrix()[(i, j)].clone();
            }
            relations.push(rel);
        }
        PresentedModule::new(labels, Matrix::from_rows(&relations)?)
    }

    /// The generic-fiber middle term as the Baer sum of `η⁰` and `MP⁰`: the
    /// fiber product over `E` of the two middle terms, modulo the
    /// antidiagonal copy of `C`.
    ///
    /// Ambient coordinates: `c (s) | y (r) | c' (s) | y⊗x1 (r) | y⊗x2 (r)`.
    pub fn generic_fiber_presentation(&self) -> Result<Subquotient<T>, MonodromyError> {
        let (s, r) = (self.mult_rank(), self.etale_rank());
        let n = self.level().clone();
        let orders = self.etale().invariants();
        let dim = 2 * s + 3 * r;
        let (c, y, c2, yx1, yx2) = (0, s, s + r, 2 * s + r, 2 * s + 2 * r);

        let mut fiber = Vec::new();
        for i in 0..s {
            fiber.push(unit_vector(dim, c + i, T::one()));
            fiber.push(unit_vector(dim, c2 + i, T::one()));
        }
        for (j, g) in orders.iter().enumerate() {
            fiber.push(unit_vector(dim, yx1 + j, T::one()));
            let mut diag = unit_vector(dim, y + j, T::one());
            diag[yx2 + j] = T::one();
            fiber.push(diag);
            fiber.push(unit_vector(dim, y + j, g.clone()));
        }

        let mut relations = Vec::new();
        for i in 0..s {
            relations.push(unit_vector(dim, c + i, n.clone()));
            relations.push(unit_vector(dim, c2 + i, n.clone()));
            let mut anti = unit_vector(dim, c + i, T::one());
            anti[c2 + i] = -T::one();
            relations.push(anti);
        }
        for (j, g) in orders.iter().enumerate() {
            relations.push(unit_vector(dim, y + j, g.clone()));
            relations.push(unit_vector(dim, yx1 + j, g.clone()));
            relations.push(unit_vector(dim, yx2 + j, g.clone()));
            let mut rel = unit_vector(dim, yx1 + j, T::one());
            for i in 0..s {
                rel[c2 + i] = -self.nu.matrix()[(i, j)].clone();
            }
            relations.push(rel);
        }
        Ok(Subquotient::new(
            Lattice::from_generators(dim, &fiber)?,
            Lattice::from_generators(dim, &relations)?,
        )?)
    }
}

fn unit_vector<T: Int>(dim: usize, k: usize, value: T) -> Vec<T> {
    let mut v = vec![T::zero(); dim];
    v[k] = value;
    v
}

/// A finitely presented module `Z^labels / (row span of relations)`.
#[derive(Clone, Debug)]
pub struct PresentedModule<T> {
    labels: Vec<String>,
    relations: Matrix<T>,
    quotient: Subquotient<T>,
}

impl<T: Int> PresentedModule<T> {
    pub fn new(labels: Vec<String>, relations: Matrix<T>) -> Result<Self, MonodromyError> {
        if relations.cols() != labels.len() {
            return Err(MonodromyError::ShapeMismatch(format!(
                "{} relation columns for {} generators",
                relations.cols(),
                labels.len()
            )));
        }
        let quotient = Subquotient::presented(&relations)?;
        Ok(Self {
            labels,
            relations,
            quotient,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn relations(&self) -> &Matrix<T> {
        &self.relations
    }

    pub fn group(&self) -> &AbelianGroup<T> {
        self.quotient.group()
    }

    pub fn as_subquotient(&self) -> &Subquotient<T> {
        &self.quotient
    }
}

/// The monodromy pushout of an object, both as a class and as a presented
/// middle term.
#[derive(Clone, Debug)]
pub struct MpPushout<T> {
    pub class: ExtClass<T>,
    pub presentation: PresentedModule<T>,
}

/// `MP(η, ν)`: the class with valuation matrix `ν` and no unit parts,
/// together with its explicit presentation. Fails if the two routes to the
/// middle group disagree.
pub fn mp_pushout<T: Int>(obj: &ExtNu<T>) -> Result<MpPushout<T>, MonodromyError> {
    let class =
        ExtClass::from_val_matrix(obj.level().clone(), obj.etale().clone(), obj.nu.matrix())?;
    let presentation = obj.mp_presentation()?;
    let expected = class.middle_group();
    if *presentation.group() != expected {
        return Err(MonodromyError::PresentationMismatch {
            presented: presentation.group().to_string(),
            expected: expected.to_string(),
        });
    }
    Ok(MpPushout {
        class,
        presentation,
    })
}

/// `(η, ν)_K = η + MP(η, ν)`.
pub fn generic_fiber<T: Int>(obj: &ExtNu<T>) -> Result<ExtClass<T>, MonodromyError> {
    Ok(obj.eta.baer_sum(&mp_pushout(obj)?.class)?)
}

/// A morphism of objects: maps on the multiplicative and étale parts that
/// commute with monodromy and admit a middle map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtNuMorphism<T> {
    source: ExtNu<T>,
    target: ExtNu<T>,
    mult: GroupHom<T>,
    etale: GroupHom<T>,
}

impl<T: Int> ExtNuMorphism<T> {
    /// `mult` is `s_B x s_A`, `etale` is `r_B x r_A`. All conditions are
    /// checked here.
    pub fn new(
        source: ExtNu<T>,
        target: ExtNu<T>,
        mult: Matrix<T>,
        etale: Matrix<T>,
    ) -> Result<Self, MonodromyError> {
        if source.level() != target.level() {
            return Err(MonodromyError::ShapeMismatch(
                "morphism between objects of different levels".into(),
            ));
        }
        let not_hom =
            |e: AbelianError| MonodromyError::NotAMorphism(MorphismDefect::NotAHom(e.to_string()));
        let mult = GroupHom::new(source.eta.mult(), target.eta.mult(), mult).map_err(not_hom)?;
        let etale = GroupHom::new(source.etale().clone(), target.etale().clone(), etale)
            .map_err(not_hom)?;
        if mult.compose(&source.nu)? != target.nu.compose(&etale)? {
            return Err(MonodromyError::NotAMorphism(
                MorphismDefect::MonodromySquare,
            ));
        }
        let pushed = source.eta.pushforward(mult.matrix())?;
        let pulled = target
            .eta
            .pullback(etale.matrix(), source.etale().clone())?;
        if pushed != pulled {
            return Err(MonodromyError::NotAMorphism(MorphismDefect::ClassMismatch));
        }
        Ok(Self {
            source,
            target,
            mult,
            etale,
        })
    }

    pub fn identity(obj: &ExtNu<T>) -> Self {
        let mult = GroupHom::identity(obj.eta.mult());
        let etale = GroupHom::identity(obj.etale().clone());
        Self {
            source: obj.clone(),
            target: obj.clone(),
            mult,
            etale,
        }
    }

    pub fn source(&self) -> &ExtNu<T> {
        &self.source
    }

    pub fn target(&self) -> &ExtNu<T> {
        &self.target
    }

    pub fn mult(&self) -> &GroupHom<T> {
        &self.mult
    }

    pub fn etale(&self) -> &GroupHom<T> {
        &self.etale
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self, MonodromyError> {
        if inner.target != self.source {
            return Err(MonodromyError::ShapeMismatch(
                "composition of non-adjacent morphisms".into(),
            ));
        }
        Ok(Self {
            source: inner.source.clone(),
            target: self.target.clone(),
            mult: self.mult.compose(&inner.mult)?,
            etale: self.etale.compose(&inner.etale)?,
        })
    }

    /// The induced map `MP(A)⁰ → MP(B)⁰` on presented middle terms.
    pub fn mp_map(&self) -> Result<GroupHom<T>, MonodromyError> {
        let src = self.source.mp_presentation()?;
        let tgt = self.target.mp_presentation()?;
        let (fe, fm) = (self.etale.matrix(), self.mult.matrix());
        let ambient = block_diagonal(&[fe, fe, fm]);
        Ok(src
            .as_subquotient()
            .induced_hom(tgt.as_subquotient(), &ambient)?)
    }

    /// The induced map on generic-fiber middle terms.
    pub fn generic_fiber_map(&self) -> Result<GroupHom<T>, MonodromyError> {
        let src = self.source.generic_fiber_presentation()?;
        let tgt = self.target.generic_fiber_presentation()?;
        let (fe, fm) = (self.etale.matrix(), self.mult.matrix());
        let ambient = block_diagonal(&[fm, fe, fm, fe, fe]);
        Ok(src.induced_hom(&tgt, &ambient)?)
    }
}

fn block_diagonal<T: Int>(blocks: &[&Matrix<T>]) -> Matrix<T> {
    let rows = blocks.iter().map(|b| b.rows()).sum();
    let cols = blocks.iter().map(|b| b.cols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    out
}

/// Which short exact sequences a sequence of morphisms `A → B → C` induces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MpExactness {
    pub multiplicative: bool,
    pub etale: bool,
    pub mp_middle: bool,
    pub generic_middle: bool,
}

impl MpExactness {
    pub fn holds(&self) -> bool {
        self.multiplicative && self.etale && self.mp_middle && self.generic_middle
    }
}

/// Detailed exactness of `0 → A →f B →g C → 0` in each degree, after the
/// monodromy pushout and after the generic fiber.
pub fn mp_exactness<T: Int>(
    f: &ExtNuMorphism<T>,
    g: &ExtNuMorphism<T>,
) -> Result<MpExactness, MonodromyError> {
    if f.target != g.source {
        return Err(MonodromyError::ShapeMismatch(
            "the morphisms do not share a middle object".into(),
        ));
    }
    Ok(MpExactness {
        multiplicative: is_short_exact(&f.mult, &g.mult)?,
        etale: is_short_exact(&f.etale, &g.etale)?,
        mp_middle: is_short_exact(&f.mp_map()?, &g.mp_map()?)?,
        generic_middle: is_short_exact(&f.generic_fiber_map()?, &g.generic_fiber_map()?)?,
    })
}

/// True iff `A → B → C` is short exact after both functors.
pub fn check_mp_exactness<T: Int>(
    f: &ExtNuMorphism<T>,
    g: &ExtNuMorphism<T>,
) -> Result<bool, MonodromyError> {
    Ok(mp_exactness(f, g)?.holds())
}

/// `*Q`: the pullback of an object along `ker ν ⊆ E`, which has zero
/// monodromy, with the inclusion as a morphism of objects.
#[derive(Clone, Debug)]
pub struct StarPullback<T> {
    pub object: ExtNu<T>,
    /// Kernel generators in étale coordinates of the original object.
    pub kernel_generators: Vec<Vec<T>>,
    pub inclusion: ExtNuMorphism<T>,
}

pub fn star_pullback<T: Int>(obj: &ExtNu<T>) -> Result<StarPullback<T>, MonodromyError> {
    let r = obj.etale_rank();
    let (kernel, generators) = if *obj.etale() == AbelianGroup::free_mod(obj.level(), r) {
        let k = kernel_mod_n(obj.nu.matrix(), obj.level())?;
        (k.group, k.generators)
    } else {
        let sq = Subquotient::new(obj.nu.kernel_lattice(), obj.etale().relations())?;
        let gens = sq
            .generators()
            .iter()
            .map(|g| obj.etale().reduce(g))
            .collect();
        (sq.group().clone(), gens)
    };
    let inclusion_matrix = Matrix::from_columns(r, &generators)?;
    let eta = obj.eta.pullback(&inclusion_matrix, kernel.clone())?;
    let nu = GroupHom::zero(kernel, obj.eta.mult());
    let object = ExtNu::new(eta, nu)?;
    let inclusion = ExtNuMorphism::new(
        object.clone(),
        obj.clone(),
        Matrix::identity(obj.mult_rank()),
        inclusion_matrix,
    )?;
    Ok(StarPullback {
        object,
        kernel_generators: generators,
        inclusion,
    })
}
