use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `⌊n^{1/k}⌋`.
pub fn floor_root(n: u128, k: u32) -> u128 {
    assert!(k >= 1);
    if k == 1 || n < 2 {
        return n;
    }
    let (mut lo, mut hi) = (1u128, 1u128 << (128 / k + 1).min(127));
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match checked_pow(mid, k) {
            Some(p) if p <= n => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}

/// `⌈n^{1/k}⌉`.
pub fn ceil_root(n: u128, k: u32) -> u128 {
    let r = floor_root(n, k);
    if checked_pow(r, k) == Some(n) {
        r
    } else {
        r + 1
    }
}

pub fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}

fn sat_pow(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp).unwrap_or(u128::MAX)
}

/// `Σ_{i=2}^{L} 2^{5i+7} |R|^i (2^{2i} + L ⌈⌈D/|R|⌉^{1/i}⌉)`, saturating at
/// `u128::MAX`.
pub fn diam_bound_rhs(r: u64, step: usize, diam_ab: u64) -> u128 {
    assert!(r >= 1, "orientation must be non-empty");
    let r = r as u128;
    let l = step as u128;
    let ratio = (diam_ab as u128).div_ceil(r);
    let mut total = 0u128;
    for i in 2..=step as u32 {
        let inner = (1u128 << (2 * i)).saturating_add(l.saturating_mul(ceil_root(ratio, i)));
        let term = sat_pow(2, 5 * i + 7)
            .saturating_mul(sat_pow(r, i))
            .saturating_mul(inner);
        total = total.saturating_add(term);
    }
    total
}

/// Greedy decomposition `m = Σ_j Σ_{D ∈ W(j)} D^j` with `1 <= j <= i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerDecomposition {
    pub m: u64,
    pub i: u32,
    pub step: u32,
    /// `parts[j - 1]` holds `W(j)`.
    pub parts: Vec<Vec<u64>>,
    pub iterations: u64,
    /// `2^{i+2} Σ_{j>=2} Σ W(j) + Σ W(1)`.
    pub cost: u128,
    pub cost_bound: u128,
    pub iteration_bound: f64,
    pub perfect_power: bool,
}

impl PowerDecomposition {
    pub fn reconstruct(&self) -> u128 {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(j, w)| w.iter().map(move |&d| sat_pow(d as u128, j as u32 + 1)))
            .sum()
    }

    pub fn within_bounds(&self) -> bool {
        self.cost <= self.cost_bound && (self.iterations as f64) <= self.iteration_bound
    }
}

/// Decomposes `m` greedily: at level `j` (from `i` down to 2) subtract the
/// largest `j`-th power while the remainder is at least `4^{j^2}`; the
/// remainder forms `W(1)`. Exact `j`-th powers with `j <= i` are returned as a
/// single part.
pub fn greedy_power_decomposition(m: u64, i: u32, step: u32) -> Result<PowerDecomposition> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if i < 2 || i > step {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= i <= L, got i = {i}, L = {step}"
        )));
    }
    let mut parts = vec![Vec::new(); i as usize];
    let mut iterations = 0u64;
    let mut perfect_power = false;
    let big = m as u128;

    let exact = (2..=i).rev().find_map(|j| {
        let n = floor_root(big, j);
        (n >= 2 && sat_pow(n, j) == big).then_some((j, n as u64))
    });
    if let Some((j, n)) = exact {
        parts[j as usize - 1].push(n);
        iterations = 1;
        perfect_power = true;
    } else {
        let mut e = big;
        for j in (2..=i).rev() {
            let threshold = sat_pow(4, j * j);
            while e >= threshold {
                let d = floor_root(e, j);
                parts[j as usize - 1].push(d as u64);
                e -= sat_pow(d, j);
                iterations += 1;
            }
        }
        if e > 0 {
            parts[0].push(e as u64);
        }
    }

    let scale = 1u128 << (i + 2);
    let cost = parts
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let s: u128 = w.iter().map(|&d| d as u128).sum();
            if j == 0 {
                s
            } else {
                scale * s
            }
        })
        .sum();
    let cost_bound = sat_pow(2, 5 * i + 6)
        .saturating_mul((1u128 << (2 * i)).saturating_add(step as u128 * floor_root(big, i)));
    let loglog = (m as f64).ln().ln();
    let loglog = if loglog.is_finite() { loglog.max(0.0) } else { 0.0 };
    let lower_levels: f64 = (2..i).map(|j| 4f64.powi(2 * j as i32 + 1)).sum();
    let iteration_bound = 2.0 * (step as f64 - 1.0) * loglog + lower_levels + i as f64;

    Ok(PowerDecomposition {
        m,
        i,
        step,
        parts,
        iterations,
        cost,
        cost_bound,
        iteration_bound,
        perfect_power,
    })
}
