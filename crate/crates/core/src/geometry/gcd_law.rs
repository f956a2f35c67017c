use std::collections::HashMap;
use std::hash::Hash;

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;

pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// Law of `v·U = Σ v_i U_i` for `U` uniform on `H^k`, `H` abelian.
#[derive(Debug, Clone, Serialize)]
pub struct GcdLawReport {
    /// `γ = gcd(v_1, ..., v_k, |H|)`.
    pub gamma: u64,
    /// `|γH|`.
    pub target_size: usize,
    pub support_size: usize,
    pub support_within_target: bool,
    pub exact: bool,
    /// Exact mode: all atoms of the law equal `1/|γH|`. Sampled mode: the
    /// chi-square test did not reject uniformity at level 0.001.
    pub uniform: bool,
    pub p_value: Option<f64>,
    pub samples: usize,
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Checks that `v·U` is uniform on `γH`. Enumerates `H^k` when
/// `|H|^k <= 10^6`; otherwise draws `samples` tuples.
pub fn gcd_subgroup_law<G, R>(h: &G, v: &[i64], samples: usize, rng: &mut R) -> Result<GcdLawReport>
where
    G: FiniteGroup,
    G::Elem: Copy + Eq + Hash,
    R: Rng + ?Sized,
{
    if v.is_empty() {
        return Err(Error::InvalidArgument("empty coefficient vector".into()));
    }
    let elems = h.elements();
    let n = elems.len();
    let gamma = v
        .iter()
        .fold(n as u64, |acc, &x| gcd(acc, x.unsigned_abs()));
    let mut target: Vec<G::Elem> = elems.iter().map(|&x| h.pow(x, gamma as i64)).collect();
    dedup(&mut target);
    let target_pos: HashMap<G::Elem, usize> =
        target.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    // powers[i][j] = elems[j]^{v_i}
    let powers: Vec<Vec<G::Elem>> = v
        .iter()
        .map(|&c| elems.iter().map(|&x| h.pow(x, c)).collect())
        .collect();
    let combine = |idx: &[usize]| {
        idx.iter()
            .enumerate()
            .fold(h.identity(), |acc, (i, &j)| h.mul(acc, powers[i][j]))
    };

    let total = (n as u128).checked_pow(v.len() as u32);
    let mut counts = vec![0u64; target.len()];
    let mut outside = HashMap::new();
    let mut tally = |x: G::Elem| match target_pos.get(&x) {
        Some(&i) => counts[i] += 1,
        None => *outside.entry(x).or_insert(0u64) += 1,
    };

    let exact = matches!(total, Some(t) if t <= ENUMERATION_LIMIT);
    let drawn;
    if exact {
        let mut idx = vec![0usize; v.len()];
        loop {
            tally(combine(&idx));
            let mut pos = 0;
            while pos < idx.len() {
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
        drawn = total.unwrap() as usize;
    } else {
        if samples == 0 {
            return Err(Error::InvalidArgument("sampling mode needs samples > 0".into()));
        }
        let mut idx = vec![0usize; v.len()];
        for _ in 0..samples {
            for slot in idx.iter_mut() {
                *slot = rng.random_range(0..n);
            }
            tally(combine(&idx));
        }
        drawn = samples;
    }

    let support_size = counts.iter().filter(|&&c| c > 0).count() + outside.len();
    let support_within_target = outside.is_empty();
    let (uniform, p_value) = if exact {
        let first = counts[0];
        (support_within_target && counts.iter().all(|&c| c == first), None)
    } else if target.len() == 1 {
        (support_within_target, Some(1.0))
    } else {
        let expected = drawn as f64 / target.len() as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let p = 1.0
            - ChiSquared::new((target.len() - 1) as f64)
                .expect("positive degrees of freedom")
                .cdf(stat);
        (support_within_target && p > 0.001, Some(p))
    };

    Ok(GcdLawReport {
        gamma,
        target_size: target.len(),
        support_size,
        support_within_target,
        exact,
        uniform,
        p_value,
        samples: drawn,
    })
}

fn dedup<T: Eq + Hash + Copy>(v: &mut Vec<T>) {
    let mut seen = std::collections::HashSet::new();
    v.retain(|x| seen.insert(*x));
}
