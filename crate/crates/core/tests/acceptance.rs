//! Acceptance criteria 1 through 8, one line each. Exact arithmetic, zero
//! tolerance; every criterion also has a wall-clock limit.
//!
//! Run with `cargo test -p crystor --test acceptance`. `CRYSTOR_SEED`
//! overrides the seed of every randomized criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use crystor::abelian::{enumerate_subgroups, n_torsion, p_primary_part, Matrix, Subgroup};
use crystor::crys::{
    component_group, crys1_torsion, oracle_crys1_with, phi_formula_check, phi_n, r1crys1_tors,
    tate_closed_form, DEFAULT_CAP,
};
use crystor::degeneration::Degeneration;
use crystor::kummer::ExtClass;
use crystor::monodromy::{
    check_mp_exactness, generic_fiber, mp_pushout, star_pullback, ExtNu, ExtNuMorphism,
};
use crystor::BigInt;
use rand::Rng;

const CORPUS_SIZE: usize = 200;

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn corpus_data() -> Vec<Vec<Degeneration<BigInt>>> {
    let mus = mu_corpus(CORPUS_SIZE);
    mus.iter()
        .map(|mu| {
            PRIMES
                .iter()
                .map(|&p| Degeneration::new(b(p), mu.clone(), None).expect("corpus mu is valid"))
                .collect()
        })
        .collect()
}

/// `(data, m)` for every corpus matrix and every `p^m ≤ 64`.
fn corpus_cases(corpus: &[Vec<Degeneration<BigInt>>]) -> Vec<(&Degeneration<BigInt>, u32)> {
    let mut out = Vec::new();
    for per_prime in corpus {
        for (p, m) in levels(64) {
            let d = per_prime
                .iter()
                .find(|d| *d.p() == b(p))
                .expect("prime in the list");
            out.push((d, m));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut cases = 0;
    for p in [2i64, 3, 5] {
        for v in 1..=12i64 {
            let d = Degeneration::new(b(p), Matrix::from_i64_rows(&[&[v]]), None)
                .map_err(|e| e.to_string())?;
            for m in 1..=6 {
                let engine = crys1_torsion(&d, m).map_err(|e| e.to_string())?;
                let closed = tate_closed_form(&b(v), &b(p), m).map_err(|e| e.to_string())?;
                ensure(engine.same_as(&closed), || {
                    format!(
                        "p={p} v={v} m={m}: {} vs {}",
                        engine.group(),
                        closed.group()
                    )
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases"))
}

fn criterion_2(corpus: &[Vec<Degeneration<BigInt>>]) -> Outcome {
    let cases = corpus_cases(corpus);
    for &(d, m) in &cases {
        let kernel = phi_n(d, m).map_err(|e| e.to_string())?;
        let snf = n_torsion(
            &component_group(d).map_err(|e| e.to_string())?,
            &d.level(m).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        ensure(kernel == snf, || {
            format!("mu={} p={} m={m}: {kernel} vs {snf}", d.mu(), d.p())
        })?;
    }
    Ok(format!(
        "{} matrices, {} (mu, p^m) cases",
        corpus.len(),
        cases.len()
    ))
}

fn criterion_3(corpus: &[Vec<Degeneration<BigInt>>]) -> Outcome {
    let cases = corpus_cases(corpus);
    for &(d, m) in &cases {
        let r = phi_formula_check(d, m).map_err(|e| e.to_string())?;
        ensure(r.agrees, || {
            format!(
                "mu={} p={} m={m}: {} vs {}",
                d.mu(),
                d.p(),
                r.quotient,
                r.phi
            )
        })?;
    }
    Ok(format!("{} cases", cases.len()))
}

fn criterion_4(corpus: &[Vec<Degeneration<BigInt>>]) -> Outcome {
    let mut cache: std::collections::HashMap<(BigInt, usize), Vec<Subgroup<BigInt>>> =
        Default::default();
    let mut cases = 0;
    for &(d, m) in &corpus_cases(corpus) {
        let n = d.level(m).map_err(|e| e.to_string())?;
        let t = d.toric_rank();
        if n.pow(t as u32) > b(1 << 12) {
            continue;
        }
        let subgroups = match cache.entry((n.clone(), t)) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(enumerate_subgroups(&n, t, 1 << 12).map_err(|e| e.to_string())?)
            }
        };
        let oracle = oracle_crys1_with(d, m, subgroups).map_err(|e| e.to_string())?;
        let engine = crys1_torsion(d, m).map_err(|e| e.to_string())?;
        ensure(oracle.same_as(&engine), || {
            format!(
                "mu={} p={} m={m}: oracle {} vs {}",
                d.mu(),
                d.p(),
                oracle.group(),
                engine.group()
            )
        })?;
        cases += 1;
    }
    Ok(format!("{cases} cases with (p^m)^t <= 4096"))
}

fn criterion_5(corpus: &[Vec<Degeneration<BigInt>>]) -> Outcome {
    let mut cases = 0;
    for per_prime in corpus {
        for d in per_prime {
            let r = r1crys1_tors(d, DEFAULT_CAP)
                .map_err(|e| format!("mu={} p={}: {e}", d.mu(), d.p()))?;
            let pp = p_primary_part(&component_group(d).map_err(|e| e.to_string())?, d.p())
                .map_err(|e| e.to_string())?;
            ensure(r.group == pp, || {
                format!("mu={} p={}: {} vs {pp}", d.mu(), d.p(), r.group)
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (mu, p) cases, cap {DEFAULT_CAP}"))
}

/// Ways to spoil an exact triple. Each yields morphisms that either fail
/// to be morphisms or do not form a short exact sequence.
fn broken(
    tr: &Triple,
    kind: usize,
    n: i64,
) -> Result<(ExtNuMorphism<BigInt>, ExtNuMorphism<BigInt>), String> {
    let e = |e: crystor::MonodromyError| e.to_string();
    let (fm, fe) = (tr.f.mult().matrix().clone(), tr.f.etale().matrix().clone());
    let (gm, ge) = (tr.g.mult().matrix().clone(), tr.g.etale().matrix().clone());
    match kind {
        0 => {
            let zero_f = ExtNuMorphism::new(
                tr.a.clone(),
                tr.b.clone(),
                Matrix::zeros(fm.rows(), fm.cols()),
                Matrix::zeros(fe.rows(), fe.cols()),
            )
            .map_err(e)?;
            Ok((zero_f, tr.g.clone()))
        }
        1 => {
            let zero_g = ExtNuMorphism::new(
                tr.b.clone(),
                tr.c.clone(),
                Matrix::zeros(gm.rows(), gm.cols()),
                Matrix::zeros(ge.rows(), ge.cols()),
            )
            .map_err(e)?;
            Ok((tr.f.clone(), zero_g))
        }
        2 => {
            let p = b(smallest_prime_factor(n));
            let scaled = ExtNuMorphism::new(tr.a.clone(), tr.b.clone(), fm.scale(&p), fe.scale(&p))
                .map_err(e)?;
            Ok((scaled, tr.g.clone()))
        }
        3 => Ok((tr.f.clone(), ExtNuMorphism::identity(&tr.b))),
        _ => {
            // Same class, monodromy moved by one at the corner.
            let mut nu = tr.a.nu().matrix().clone();
            nu[(0, 0)] = nu[(0, 0)].clone() + b(1);
            let nu = crystor::abelian::GroupHom::new(tr.a.etale().clone(), tr.a.eta().mult(), nu)
                .map_err(|e| e.to_string())?;
            let moved = ExtNu::new(tr.a.eta().clone(), nu).map_err(e)?;
            let f = ExtNuMorphism::new(moved, tr.b.clone(), fm, fe).map_err(e)?;
            Ok((f, tr.g.clone()))
        }
    }
}

fn smallest_prime_factor(n: i64) -> i64 {
    (2..=n).find(|d| n % d == 0).expect("n >= 2")
}

fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    let levels = [2i64, 3, 4, 5, 8, 9, 25, 27];
    let mut exact = 0;
    for k in 0..120 {
        let n = levels[k % levels.len()];
        let tr = exact_triple(&mut rng, n);
        ensure(
            check_mp_exactness(&tr.f, &tr.g).map_err(|e| e.to_string())?,
            || format!("exact triple {k} at n={n}"),
        )?;
        exact += 1;
    }
    let mut rejected = 0;
    let mut attempts = 0;
    while rejected < 25 {
        let n = levels[attempts % levels.len()];
        let tr = exact_triple(&mut rng, n);
        let kind = attempts % 5;
        attempts += 1;
        if kind == 4 && tr.a.mult_rank() == 0 {
            continue;
        }
        let accepted = match broken(&tr, kind, n) {
            Ok((f, g)) => check_mp_exactness(&f, &g).map_err(|e| e.to_string())?,
            Err(_) => false,
        };
        ensure(!accepted, || {
            format!("broken triple of kind {kind} at n={n} passed")
        })?;
        rejected += 1;
    }
    Ok(format!(
        "{exact} exact triples pass, {rejected} broken triples rejected"
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let mut classes = 0;
    while classes < 600 {
        let n = rng.gen_range(2..=64);
        let (s, r) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let x = random_class(&mut rng, n, s, r);
        let y = random_class(&mut rng, n, s, r);
        let z = random_class(&mut rng, n, s, r);
        let err = |e: crystor::KummerError| e.to_string();
        let (unit, val) = x.raynaud_split();
        ensure(unit.baer_sum(&val).map_err(err)? == x, || {
            format!("split/recombine fails on {x}")
        })?;
        ensure(unit.is_one_crystalline(), || {
            format!("unit part of {x} has monodromy")
        })?;
        let zero = ExtClass::split(b(n), s, x.etale().clone()).map_err(err)?;
        let xy = x.baer_sum(&y).map_err(err)?;
        ensure(
            xy.baer_sum(&z).map_err(err)?
                == x.baer_sum(&y.baer_sum(&z).map_err(err)?).map_err(err)?,
            || "associativity".into(),
        )?;
        ensure(xy == y.baer_sum(&x).map_err(err)?, || {
            "commutativity".into()
        })?;
        ensure(x.baer_sum(&zero).map_err(err)? == x, || "identity".into())?;
        ensure(x.baer_sum(&x.neg()).map_err(err)? == zero, || {
            "inverse".into()
        })?;
        let (u_xy, v_xy) = xy.raynaud_split();
        let (u_y, v_y) = y.raynaud_split();
        ensure(
            u_xy == unit.baer_sum(&u_y).map_err(err)? && v_xy == val.baer_sum(&v_y).map_err(err)?,
            || "the splitting is not additive".into(),
        )?;
        classes += 3;
    }
    Ok(format!("{classes} classes"))
}

fn criterion_8() -> Outcome {
    let mut rng = rng(8);
    let levels = [2i64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27];
    let mut objects = 0;
    for k in 0..150 {
        let n = levels[k % levels.len()];
        let t = rng.gen_range(1..=3);
        let mut obj = random_object(&mut rng, n, t, t);
        if k % 3 == 2 {
            // Non-free étale part.
            obj = star_pullback(&obj).map_err(|e| e.to_string())?.object;
            let nu = random_matrix(&mut rng, t, obj.etale().ngens(), n);
            let orders = obj.etale().invariants().to_vec();
            let mut scaled = nu.clone();
            for j in 0..nu.cols() {
                let step = b(n) / orders[j].clone();
                for i in 0..nu.rows() {
                    scaled[(i, j)] = nu[(i, j)].clone() * step.clone();
                }
            }
            let hom =
                crystor::abelian::GroupHom::new(obj.etale().clone(), obj.eta().mult(), scaled)
                    .map_err(|e| e.to_string())?;
            obj = ExtNu::new(obj.eta().clone(), hom).map_err(|e| e.to_string())?;
        }
        let mp = mp_pushout(&obj).map_err(|e| format!("object {k} at n={n}: {e}"))?;
        ensure(*mp.presentation.group() == mp.class.middle_group(), || {
            format!("object {k} at n={n}")
        })?;
        let gf = generic_fiber(&obj).map_err(|e| e.to_string())?;
        let presented = obj
            .generic_fiber_presentation()
            .map_err(|e| e.to_string())?;
        ensure(*presented.group() == gf.middle_group(), || {
            format!("generic fiber of object {k} at n={n}")
        })?;
        objects += 1;
    }
    Ok(format!("{objects} objects"))
}

fn main() -> ExitCode {
    println!("acceptance seed {}", seed());
    let corpus = corpus_data();
    let criteria: Vec<(&str, u64, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("Tate-curve closed form", 1, Box::new(criterion_1)),
        (
            "component-group kernel identity",
            10,
            Box::new(|| criterion_2(&corpus)),
        ),
        (
            "finite-level comparison",
            10,
            Box::new(|| criterion_3(&corpus)),
        ),
        ("oracle equivalence", 60, Box::new(|| criterion_4(&corpus))),
        ("R1 torsion", 5, Box::new(|| criterion_5(&corpus))),
        ("MP functor exactness", 10, Box::new(criterion_6)),
        ("Baer/Raynaud algebra", 2, Box::new(criterion_7)),
        ("presentation vs class for MP", 10, Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(detail) if elapsed <= Duration::from_secs(*limit) => Ok(detail),
            Ok(detail) => Err(format!("{detail}, but over the {limit} s limit")),
            Err(why) => Err(why),
        };
        match verdict {
            Ok(detail) => println!(
                "PASS {}. {name}: {detail} ({:.2} s)",
                k + 1,
                elapsed.as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL {}. {name}: {why} ({:.2} s)",
                    k + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
