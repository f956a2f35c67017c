//! Commutator collection of walk words: pair counts `m_{ba}`, the
//! antisymmetric matrix `m̂`, its goodness over `F_p`, and the auxiliary
//! probability estimates used with it.

mod goodness;
mod moments;
mod pairs;
mod rank;
mod span;
mod word;

pub use goodness::{
    chi_psi, goodness_check, goodness_with_set, has_full_rank_minor, k_size, primes_dividing,
    psi_support, split_k_set, Goodness, PsiSupport, RankWitness,
};
pub use moments::{
    binomial_max, binomial_mod_p_maxprob, subgroup_generation_moment, GenerationMoment, ModpMax,
};
pub use pairs::{
    collect_mod_g3, collect_step2, hat_matrix, pair_counts, pair_matrix, pair_matrix_bruteforce,
    CollectionData, IntMatrix,
};
pub use rank::{echelon_mod_p, is_prime, rank_mod_p, submatrix, Echelon};
pub use span::{quotient_size_check, unif_span_check, QuotientSize, SpanReport};
pub use word::{sample_word, sample_word_of_length, Step, WalkWord};

use rand::Rng;
use serde::Serialize;

use crate::error::Result;

/// One word-pair draw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectTrial {
    pub seed: u64,
    /// `N + N'`.
    pub n: usize,
    pub v_zero: bool,
    pub good: bool,
    pub k_size: usize,
    pub k_set_size: usize,
}

impl CollectTrial {
    pub const HEADER: [&'static str; 6] = ["seed", "N", "V_zero", "good", "K", "Kset"];

    pub fn record(&self) -> [String; 6] {
        [
            self.seed.to_string(),
            self.n.to_string(),
            (self.v_zero as u8).to_string(),
            (self.good as u8).to_string(),
            self.k_size.to_string(),
            self.k_set_size.to_string(),
        ]
    }
}

/// Draws two independent words at time `t` and checks the goodness of
/// their `m̂` for the given `K` and `|G_ab|`.
pub fn goodness_trial<R: Rng + ?Sized>(
    seed: u64,
    t: f64,
    k: usize,
    k_size: usize,
    ab_order: u64,
    rng: &mut R,
) -> Result<CollectTrial> {
    let x = sample_word(t, k, rng);
    let y = sample_word(t, k, rng);
    let data = pair_counts(&x, &y);
    let primes = primes_dividing(ab_order);
    let good = goodness_check(&data.mhat, k_size, &primes, ab_order)?;
    Ok(CollectTrial {
        seed,
        n: x.len() + y.len(),
        v_zero: data.v.iter().all(|&v| v == 0),
        good: good.good,
        k_size,
        k_set_size: good.k_set.len(),
    })
}
