#![allow(dead_code)]

use crystor::abelian::{GroupHom, Matrix};
use crystor::degeneration::Degeneration;
use crystor::kummer::{ExtClass, KummerClass, UnitSymbol};
use crystor::monodromy::{ExtNu, ExtNuMorphism};
use crystor::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

/// Seed from `CRYSTOR_SEED`, else the fixed default.
pub fn seed() -> u64 {
    std::env::var("CRYSTOR_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn b(v: i64) -> BigInt {
    BigInt::from(v)
}

pub const PRIMES: [i64; 18] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
];

/// Every `(p, m)` with `p^m ≤ limit`.
pub fn levels(limit: i64) -> Vec<(i64, u32)> {
    let mut out = Vec::new();
    for &p in &PRIMES {
        let mut q = p;
        let mut m = 1;
        while q <= limit {
            out.push((p, m));
            q *= p;
            m += 1;
        }
    }
    out
}

/// A symmetric positive-definite `t x t` matrix with entries in
/// `[-bound, bound]`, by rejection.
pub fn random_mu(rng: &mut ChaCha8Rng, t: usize, bound: i64) -> Matrix<BigInt> {
    loop {
        let mut m = Matrix::zeros(t, t);
        for i in 0..t {
            m[(i, i)] = b(rng.gen_range(1..=bound));
            for j in 0..i {
                let off = b(rng.gen_range(-bound / 2..=bound / 2));
                m[(i, j)] = off.clone();
                m[(j, i)] = off;
            }
        }
        if m.leading_minors().unwrap().iter().all(|d| *d > b(0)) {
            return m;
        }
    }
}

/// Valid data `(p, mu)` with `t ≤ max_t`.
pub fn random_degeneration(
    rng: &mut ChaCha8Rng,
    p: i64,
    max_t: usize,
    bound: i64,
) -> Degeneration<BigInt> {
    let t = rng.gen_range(1..=max_t);
    Degeneration::new(b(p), random_mu(rng, t, bound), None).unwrap()
}

/// The matrices of the shared corpus of criteria 2 through 5.
pub fn mu_corpus(count: usize) -> Vec<Matrix<BigInt>> {
    let mut rng = rng(1);
    let mut out = vec![
        Matrix::from_i64_rows(&[&[5]]),
        Matrix::from_i64_rows(&[&[12]]),
        Matrix::identity(2),
        Matrix::from_i64_rows(&[&[2, 1], &[1, 2]]),
        Matrix::from_i64_rows(&[&[2, 0], &[0, 4]]),
        Matrix::from_i64_rows(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]]),
    ];
    while out.len() < count {
        let t = 1 + out.len() % 4;
        out.push(random_mu(&mut rng, t, 20));
    }
    out
}

pub const SYMBOLS: [&str; 4] = ["a", "b", "c", "d"];

pub fn random_unit_class(rng: &mut ChaCha8Rng, n: i64) -> KummerClass<BigInt> {
    let count = rng.gen_range(0..=2);
    let units: Vec<(UnitSymbol, BigInt)> = SYMBOLS
        .choose_multiple(rng, count)
        .collect::<Vec<_>>()
        .into_iter()
        .map(|s| (UnitSymbol::new(*s), b(rng.gen_range(0..n))))
        .collect();
    KummerClass::new(b(n), b(0), units).unwrap()
}

pub fn random_kummer(rng: &mut ChaCha8Rng, n: i64) -> KummerClass<BigInt> {
    let unit = random_unit_class(rng, n);
    let val = KummerClass::uniformizer_power(b(n), b(rng.gen_range(-2 * n..2 * n))).unwrap();
    unit.add(&val).unwrap()
}

pub fn random_class(rng: &mut ChaCha8Rng, n: i64, s: usize, r: usize) -> ExtClass<BigInt> {
    let kappa = (0..s * r).map(|_| random_kummer(rng, n)).collect();
    ExtClass::free(b(n), s, r, kappa).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, n: i64) -> Matrix<BigInt> {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = b(rng.gen_range(0..n));
        }
    }
    m
}

/// A random crystalline class with random monodromy on free outer terms.
pub fn random_object(rng: &mut ChaCha8Rng, n: i64, s: usize, r: usize) -> ExtNu<BigInt> {
    let kappa = (0..s * r).map(|_| random_unit_class(rng, n)).collect();
    let eta = ExtClass::free(b(n), s, r, kappa).unwrap();
    let nu = GroupHom::new(eta.etale().clone(), eta.mult(), random_matrix(rng, s, r, n)).unwrap();
    ExtNu::new(eta, nu).unwrap()
}

/// A random unimodular `k x k` matrix and its inverse.
pub fn random_unimodular(rng: &mut ChaCha8Rng, k: usize) -> (Matrix<BigInt>, Matrix<BigInt>) {
    let mut m = Matrix::identity(k);
    let mut inv = Matrix::identity(k);
    if k < 2 {
        if rng.gen_bool(0.5) {
            return (Matrix::scalar(k, b(-1)), Matrix::scalar(k, b(-1)));
        }
        return (m, inv);
    }
    for _ in 0..3 * k {
        let i = rng.gen_range(0..k);
        let j = (i + rng.gen_range(1..k)) % k;
        let c = b(rng.gen_range(-2..=2));
        let mut e = Matrix::identity(k);
        e[(i, j)] = c.clone();
        let mut e_inv = Matrix::identity(k);
        e_inv[(i, j)] = -c;
        m = m.mul(&e).unwrap();
        inv = e_inv.mul(&inv).unwrap();
    }
    (m, inv)
}

fn block(ul: &Matrix<BigInt>, ur: &Matrix<BigInt>, lr: &Matrix<BigInt>) -> Matrix<BigInt> {
    let (r1, c1) = (ul.rows(), ul.cols());
    let mut out = Matrix::zeros(r1 + lr.rows(), c1 + lr.cols());
    for i in 0..out.rows() {
        for j in 0..out.cols() {
            out[(i, j)] = match (i < r1, j < c1) {
                (true, true) => ul[(i, j)].clone(),
                (true, false) => ur[(i, j - c1)].clone(),
                (false, false) => lr[(i - r1, j - c1)].clone(),
                (false, true) => b(0),
            };
        }
    }
    out
}

fn class_block(
    n: i64,
    ul: &ExtClass<BigInt>,
    ur: &[KummerClass<BigInt>],
    lr: &ExtClass<BigInt>,
) -> ExtClass<BigInt> {
    let (s1, r1, s2, r2) = (
        ul.mult_rank(),
        ul.etale_rank(),
        lr.mult_rank(),
        lr.etale_rank(),
    );
    let zero = KummerClass::zero(b(n)).unwrap();
    let mut kappa = Vec::new();
    for i in 0..s1 + s2 {
        for j in 0..r1 + r2 {
            kappa.push(match (i < s1, j < r1) {
                (true, true) => ul.entry(i, j).clone(),
                (true, false) => ur[i * r2 + (j - r1)].clone(),
                (false, false) => lr.entry(i - s1, j - r1).clone(),
                (false, true) => zero.clone(),
            });
        }
    }
    ExtClass::free(b(n), s1 + s2, r1 + r2, kappa).unwrap()
}

fn inclusion(big: usize, small: usize) -> Matrix<BigInt> {
    let mut m = Matrix::zeros(big, small);
    for i in 0..small {
        m[(i, i)] = b(1);
    }
    m
}

fn projection(big: usize, small: usize) -> Matrix<BigInt> {
    let mut m = Matrix::zeros(small, big);
    for i in 0..small {
        m[(i, big - small + i)] = b(1);
    }
    m
}

pub struct Triple {
    pub a: ExtNu<BigInt>,
    pub b: ExtNu<BigInt>,
    pub c: ExtNu<BigInt>,
    pub f: ExtNuMorphism<BigInt>,
    pub g: ExtNuMorphism<BigInt>,
}

/// `0 → A → B → C → 0` with `B` block upper triangular in a random basis.
pub fn exact_triple(rng: &mut ChaCha8Rng, n: i64) -> Triple {
    let (s1, r1) = (rng.gen_range(0..=2), rng.gen_range(1..=2));
    let (s2, r2) = (rng.gen_range(1..=2), rng.gen_range(0..=2));
    let a = random_object(rng, n, s1, r1);
    let c = random_object(rng, n, s2, r2);
    let ur: Vec<_> = (0..s1 * r2).map(|_| random_unit_class(rng, n)).collect();
    let eta_b = class_block(n, a.eta(), &ur, c.eta());
    let nu_b = block(
        a.nu().matrix(),
        &random_matrix(rng, s1, r2, n),
        c.nu().matrix(),
    );

    let (pm, pm_inv) = random_unimodular(rng, s1 + s2);
    let (qe, qe_inv) = random_unimodular(rng, r1 + r2);
    // New bases: mult coordinates x' = P x, étale coordinates y' = Q y.
    let eta = eta_b.pushforward(&pm).unwrap();
    let eta = eta.pullback(&qe_inv, eta.etale().clone()).unwrap();
    let nu = pm.mul(&nu_b).unwrap().mul(&qe_inv).unwrap();
    let nu = GroupHom::new(eta.etale().clone(), eta.mult(), nu).unwrap();
    let bb = ExtNu::new(eta, nu).unwrap();

    let f = ExtNuMorphism::new(
        a.clone(),
        bb.clone(),
        pm.mul(&inclusion(s1 + s2, s1)).unwrap(),
        qe.mul(&inclusion(r1 + r2, r1)).unwrap(),
    )
    .unwrap();
    let g = ExtNuMorphism::new(
        bb.clone(),
        c.clone(),
        projection(s1 + s2, s2).mul(&pm_inv).unwrap(),
        projection(r1 + r2, r2).mul(&qe_inv).unwrap(),
    )
    .unwrap();
    Triple { a, b: bb, c, f, g }
}
