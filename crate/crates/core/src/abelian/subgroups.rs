//! Exhaustive enumeration of the subgroups of `(Z/n)^t`.
//!
//! Subgroups correspond to lattices `nZ^t ⊆ L ⊆ Z^t`, each with a unique
//! upper-triangular Hermite basis. Rows are chosen bottom-up: row `i` has
//! pivot `d_i | n` and entries `a_ij ∈ [0, d_j)`, and `n e_i ∈ L` holds iff
//! `(n / d_i) · (a_i,i+1, …)` lies in the lattice of the rows below it.

use super::lattice::Subgroup;
use super::scalar::Int;
use super::AbelianError;

/// Default cap on the ambient group order `n^t`.
pub const DEFAULT_BUDGET: u64 = 1 << 16;

/// Every subgroup of `(Z/n)^t` exactly once, in deterministic order.
/// Fails with `BudgetExceeded` when `n^t > budget`.
pub fn enumerate_subgroups<T: Int>(
    n: &T,
    t: usize,
    budget: u64,
) -> Result<Vec<Subgroup<T>>, AbelianError> {
    if *n < T::from_i64_lossless(2) {
        return Err(AbelianError::BadModulus(format!(
            "modulus {n} must be at least 2"
        )));
    }
    let needed = n.to_u64().and_then(|n| n.checked_pow(t as u32));
    match needed {
        Some(size) if size <= budget => {}
        _ => {
            return Err(AbelianError::BudgetExceeded {
                needed: needed.map_or_else(|| format!("{n}^{t}"), |s| s.to_string()),
                budget,
            })
        }
    }
    let divisors: Vec<T> = num_iter(n).filter(|d| n.is_multiple_of(d)).collect();
    let mut out = Vec::new();
    let mut rows: Vec<Vec<T>> = vec![Vec::new(); t];
    extend(n, t, t, &divisors, &mut rows, &mut out);
    Ok(out)
}

fn num_iter<T: Int>(n: &T) -> impl Iterator<Item = T> + '_ {
    let mut d = T::zero();
    std::iter::from_fn(move || {
        d = d.clone() + T::one();
        (d <= *n).then(|| d.clone())
    })
}

/// Fills rows `0..level` given that rows `level..t` are fixed.
fn extend<T: Int>(
    n: &T,
    t: usize,
    level: usize,
    divisors: &[T],
    rows: &mut Vec<Vec<T>>,
    out: &mut Vec<Subgroup<T>>,
) {
    if level == 0 {
        out.push(Subgroup::from_canonical_rows(n.clone(), rows.clone()));
        return;
    }
    let i = level - 1;
    let tail_ranges: Vec<T> = (i + 1..t).map(|j| rows[j][j].clone()).collect();
    for d in divisors {
        let scale = n.clone() / d.clone();
        let mut tail: Vec<T> = vec![T::zero(); t - i - 1];
        loop {
            let scaled: Vec<T> = tail.iter().map(|a| a.clone() * scale.clone()).collect();
            if in_span(&rows[i + 1..], i + 1, &scaled) {
                let mut row = vec![T::zero(); t];
                row[i] = d.clone();
                row[i + 1..].clone_from_slice(&tail);
                rows[i] = row;
                extend(n, t, i, divisors, rows, out);
            }
            if !advance(&mut tail, &tail_ranges) {
                break;
            }
        }
    }
}

/// Odometer step over the box `∏ [0, bound_j)`. Returns `false` on wraparound.
fn advance<T: Int>(digits: &mut [T], bounds: &[T]) -> bool {
    for (x, b) in digits.iter_mut().zip(bounds) {
        *x = x.clone() + T::one();
        if *x < *b {
            return true;
        }
        *x = T::zero();
    }
    false
}

/// Membership of `v` (coordinates `offset..t`) in the span of the fixed
/// upper-triangular rows `offset..t`.
fn in_span<T: Int>(rows: &[Vec<T>], offset: usize, v: &[T]) -> bool {
    let mut rest = v.to_vec();
    for (k, row) in rows.iter().enumerate() {
        let pivot = &row[offset + k];
        if !rest[k].is_multiple_of(pivot) {
            return false;
        }
        let q = rest[k].clone() / pivot.clone();
        for (j, r) in rest.iter_mut().enumerate().skip(k) {
            *r = r.clone() - q.clone() * row[offset + j].clone();
        }
    }
    rest.iter().all(T::is_zero)
}
