//! The invariant suite for a single piece of degeneration data: every
//! quantity the engine computes, recomputed along a second route and
//! compared.

use crate::abelian::{n_torsion, p_primary_part, smith_normal_form, AbelianGroup, Int};
use crate::crys::{
    component_group, crys1_tate_module, crys1_torsion, les_report, oracle_crys1, phi_formula_check,
    phi_n, r1crys1_tors, reduce_into, tate_closed_form, CrysError,
};
use crate::degeneration::Degeneration;
use crate::monodromy::{generic_fiber, mp_pushout, ExtNu};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub max_m: u32,
    /// Run the subgroup oracle when `(p^m)^t` is at most this.
    pub oracle_limit: u64,
    pub oracle_budget: u64,
    pub cap: u32,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            max_m: 3,
            oracle_limit: 1 << 12,
            oracle_budget: crate::abelian::DEFAULT_BUDGET,
            cap: crate::crys::DEFAULT_CAP,
        }
    }
}

/// `p^{mt} · ∏ gcd(d_i, p^m)` over the Smith invariants `d_i` of `mu`.
pub fn order_law<T: Int>(data: &Degeneration<T>, m: u32) -> T {
    let n = data.p().pow_u32(m);
    let t = data.toric_rank();
    smith_normal_form(data.mu())
        .diagonal()
        .iter()
        .fold(n.pow_u32(t as u32), |acc, d| acc * d.gcd(&n))
}

fn group_pair<T: Int>(a: &AbelianGroup<T>, b: &AbelianGroup<T>) -> String {
    format!("{a} vs {b}")
}

pub fn run_suite<T: Int>(
    data: &Degeneration<T>,
    opts: &SuiteOptions,
) -> Result<Vec<Check>, CrysError> {
    let mut checks = Vec::new();
    let t = data.toric_rank();
    let phi = component_group(data)?;
    let mut previous = None;
    for m in 1..=opts.max_m {
        let n = data.level(m)?;
        let crys = crys1_torsion(data, m)?;

        let kernel = phi_n(data, m)?;
        let torsion = n_torsion(&phi, &n)?;
        checks.push(Check::new(
            format!("two-route-phi m={m}"),
            kernel == torsion,
            group_pair(&kernel, &torsion),
        ));

        let formula = phi_formula_check(data, m)?;
        checks.push(Check::new(
            format!("phi-formula m={m}"),
            formula.agrees,
            group_pair(&formula.quotient, &formula.phi),
        ));

        let expected = order_law(data, m);
        checks.push(Check::new(
            format!("order-law m={m}"),
            crys.order() == expected && crys.contains_torus(),
            format!("|Crys1| = {} vs {expected}", crys.order()),
        ));

        let oracle_size = n.to_u64().and_then(|n| n.checked_pow(t as u32));
        if oracle_size.is_some_and(|s| s <= opts.oracle_limit) {
            let oracle = oracle_crys1(data, m, opts.oracle_budget)?;
            checks.push(Check::new(
                format!("oracle m={m}"),
                oracle.same_as(&crys),
                group_pair(oracle.group(), crys.group()),
            ));
        }

        if t == 1 {
            let closed = tate_closed_form(&data.mu()[(0, 0)], data.p(), m)?;
            checks.push(Check::new(
                format!("tate m={m}"),
                closed.same_as(&crys),
                group_pair(closed.group(), crys.group()),
            ));
        }

        let raynaud = data.raynaud_decompose(m)?;
        let obj = ExtNu::from_raynaud(&raynaud)?;
        let mp = mp_pushout(&obj)?;
        let gf = generic_fiber(&obj)?;
        let gf_presented = obj.generic_fiber_presentation()?;
        let torsion_ext = data.torsion_module(m)?.ext;
        checks.push(Check::new(
            format!("mp-presentation m={m}"),
            *mp.presentation.group() == mp.class.middle_group()
                && *gf_presented.group() == gf.middle_group()
                && gf == torsion_ext
                && raynaud.recombine()? == torsion_ext,
            group_pair(mp.presentation.group(), &mp.class.middle_group()),
        ));

        if let Some(lower) = &previous {
            checks.push(Check::new(
                format!("compatible m={m}->{}", m - 1),
                reduce_into(&crys, lower)?,
                "",
            ));
        }
        previous = Some(crys);
    }

    let pp = p_primary_part(&phi, data.p())?;
    let r1 = r1crys1_tors(data, opts.cap)?;
    let r1_next = r1crys1_tors(data, opts.cap + 1)?;
    checks.push(Check::new(
        "r1-torsion",
        r1.group == pp && r1_next == r1,
        format!("{} vs {pp}, stable from m = {}", r1.group, r1.stable_from),
    ));

    let les = les_report(data, opts.cap)?;
    checks.push(Check::new(
        "les",
        les.all_exact(),
        format!(
            "divisible rank {}, torsion {}",
            les.divisible_rank, les.colimit_torsion
        ),
    ));

    let tate = crys1_tate_module(data, opts.cap)?;
    checks.push(Check::new(
        "tate-module",
        tate.rank == t && tate.compatible && tate.y_limit_trivial,
        match tate.y_vanishes_at {
            Some(m) => format!("rank {}, y-part dies in A[p] from m = {m}", tate.rank),
            None => format!("rank {}, y-part survives to the cap", tate.rank),
        },
    ));
    Ok(checks)
}
