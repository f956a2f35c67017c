use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::geometry::ENUMERATION_LIMIT;
use crate::group::{Element, GroupTable};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanReport {
    pub l: usize,
    /// `|⟨G_{ℓ+2}[h_i, g] : i, g ∈ R_ℓ⟩ / G_{ℓ+2}|`.
    pub target_size: usize,
    pub support_size: usize,
    pub support_within_target: bool,
    pub exact: bool,
    pub uniform: bool,
    pub p_value: Option<f64>,
    pub samples: usize,
}

/// Law of `G_{ℓ+2} Π_i [h_i, U_i]` with `U_i` uniform on the transversal
/// `R_ℓ`. Enumerates when `|R_ℓ|^n <= 10^6`, else samples.
pub fn unif_span_check<R: Rng + ?Sized>(
    g: &GroupTable,
    hs: &[Element],
    l: usize,
    samples: usize,
    rng: &mut R,
) -> Result<SpanReport> {
    if l == 0 || l + 2 > g.step() + 1 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= l <= {} for step {}",
            g.step().saturating_sub(1),
            g.step()
        )));
    }
    if hs.is_empty() {
        return Err(Error::InvalidArgument("empty h list".into()));
    }
    let part = g.quotient(l + 1);
    let reps = &g.layer(l).reps;
    let below = g.series_term(l + 2);
    let mut gens: Vec<Element> = hs
        .iter()
        .flat_map(|&h| reps.iter().map(move |&u| (h, u)))
        .map(|(h, u)| g.commutator(h, u))
        .collect();
    gens.extend_from_slice(below.generators());
    let target_sub = g.closure(&gens);
    let mut target: Vec<u32> = target_sub.members().iter().map(|&x| part.project(x)).collect();
    target.sort_unstable();
    target.dedup();

    let comms: Vec<Vec<Element>> = hs
        .iter()
        .map(|&h| reps.iter().map(|&u| g.commutator(h, u)).collect())
        .collect();
    let r = reps.len();
    let tuples = (r as u128).checked_pow(hs.len() as u32);
    let mut counts: HashMap<u32, u64> = HashMap::new();
    let exact = matches!(tuples, Some(n) if n <= ENUMERATION_LIMIT);
    let total;
    if exact {
        let n = tuples.unwrap() as usize;
        let mut idx = vec![0usize; hs.len()];
        for _ in 0..n {
            let x = idx
                .iter()
                .enumerate()
                .fold(Element::IDENTITY, |acc, (i, &j)| g.mul(acc, comms[i][j]));
            *counts.entry(part.project(x)).or_default() += 1;
            for d in idx.iter_mut() {
                *d += 1;
                if *d < r {
                    break;
                }
                *d = 0;
            }
        }
        total = n;
    } else {
        for _ in 0..samples {
            let x = comms.iter().fold(Element::IDENTITY, |acc, c| {
                g.mul(acc, c[rng.random_range(0..r)])
            });
            *counts.entry(part.project(x)).or_default() += 1;
        }
        total = samples;
    }
    let support_within_target = counts.keys().all(|c| target.binary_search(c).is_ok());
    let (uniform, p_value) = if exact {
        let first = counts.values().next().copied();
        (
            counts.len() == target.len() && counts.values().all(|&c| Some(c) == first),
            None,
        )
    } else if target.len() == 1 {
        (support_within_target, None)
    } else {
        let e = total as f64 / target.len() as f64;
        let stat: f64 = target
            .iter()
            .map(|c| {
                let o = counts.get(c).copied().unwrap_or(0) as f64;
                (o - e).powi(2) / e
            })
            .sum();
        let p = 1.0 - ChiSquared::new((target.len() - 1) as f64).expect("positive dof").cdf(stat);
        (support_within_target && p > 0.001, Some(p))
    };
    Ok(SpanReport {
        l,
        target_size: target.len(),
        support_size: counts.len(),
        support_within_target,
        exact,
        uniform,
        p_value,
        samples: total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuotientSize {
    pub l: usize,
    /// `|Q_{ℓ+1}| / |⟨G_{ℓ+2}[h, g] : h ∈ H, g ∈ R_ℓ⟩ / G_{ℓ+2}|`.
    pub index: u128,
    /// `(|G_ab| / |⟨G_2 h : h ∈ H⟩ / G_2|)^{r_{ℓ+1}}`.
    pub bound: u128,
}

impl QuotientSize {
    pub fn holds(&self) -> bool {
        self.index <= self.bound
    }
}

pub fn quotient_size_check(g: &GroupTable, hs: &[Element], l: usize) -> Result<QuotientSize> {
    if l == 0 || l + 1 > g.step() {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= l <= {}",
            g.step().saturating_sub(1)
        )));
    }
    let reps = &g.layer(l).reps;
    let below = g.series_term(l + 2);
    let mut gens: Vec<Element> = hs
        .iter()
        .flat_map(|&h| reps.iter().map(move |&u| g.commutator(h, u)))
        .collect();
    gens.extend_from_slice(below.generators());
    let spanned = (g.closure(&gens).len() / below.len()) as u128;
    let q_next = g.layer(l + 1).q_order() as u128;
    let mut gens2: Vec<Element> = hs.to_vec();
    gens2.extend_from_slice(g.series_term(2).generators());
    let h_ab = (g.closure(&gens2).len() / g.series_term(2).len()) as u128;
    let base = g.ab_order() as u128 / h_ab;
    let r = g.layer(l + 1).rank() as u32;
    Ok(QuotientSize {
        l,
        index: q_next / spanned,
        bound: base.saturating_pow(r),
    })
}
