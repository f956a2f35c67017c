use serde::Serialize;

use super::pairs::IntMatrix;
use super::rank::{echelon_mod_p, rank_mod_p, submatrix};
use crate::error::Result;
use crate::geometry::gcd;
use crate::group::{prime_factors, Element, GroupTable};

/// `K = Σ_{ℓ>=2} r_ℓ + 2`.
pub fn k_size(g: &GroupTable) -> usize {
    g.layer_ranks().iter().skip(1).sum::<usize>() + 2
}

/// `Γ`: the primes dividing `n`.
pub fn primes_dividing(n: u64) -> Vec<u64> {
    prime_factors(n).into_iter().map(|(p, _)| p).collect()
}

/// `𝒦 = {b > k/2 : gcd({m_{ba} : a <= k/2}) coprime to |G_ab|}`, 0-based.
pub fn split_k_set(mhat: &IntMatrix, ab_order: u64) -> Vec<usize> {
    let k = mhat.len();
    let half = k / 2;
    (half..k)
        .filter(|&b| {
            let g = mhat[b][..half]
                .iter()
                .fold(0u64, |acc, &x| gcd(acc, x.unsigned_abs()));
            gcd(g, ab_order) == 1
        })
        .collect()
}

/// Coordinates of `Z_{·,1}` entering `ψ_b` for `b ∈ 𝒦`, split into the
/// first-half part and the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiSupport {
    pub b: usize,
    /// `{a <= k/2 : a < b}`.
    pub first_half: Vec<usize>,
    /// `{a > k/2 : a < b} ∪ {a ∈ 𝒦^c : a > b}`.
    pub rest: Vec<usize>,
}

pub fn psi_support(b: usize, k_set: &[usize], k: usize) -> PsiSupport {
    let half = k / 2;
    PsiSupport {
        b,
        first_half: (0..half.min(b)).collect(),
        rest: (half..k)
            .filter(|&a| a < b || (a > b && !k_set.contains(&a)))
            .collect(),
    }
}

/// A `K×K` submatrix of the `𝒦` rows with rank `K` mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankWitness {
    pub p: u64,
    /// Rank of the full `𝒦 × [k]` block mod `p`.
    pub rank: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Goodness {
    pub good: bool,
    pub k_size: usize,
    pub k_set: Vec<usize>,
    /// One entry per prime; `rows`/`cols` are empty when the rank falls short.
    pub witnesses: Vec<RankWitness>,
}

/// Decides whether `m̂` is good for the split set `𝒦`. For each prime, a
/// `K×K` submatrix of the `𝒦` rows with rank `K` exists iff the `𝒦` block has
/// rank at least `K`; the witness takes `K` independent rows and then `K`
/// pivot columns of those rows.
pub fn goodness_check(mhat: &IntMatrix, k_size: usize, primes: &[u64], ab_order: u64) -> Result<Goodness> {
    let k_set = split_k_set(mhat, ab_order);
    goodness_with_set(mhat, k_size, primes, k_set)
}

/// As [`goodness_check`] with a caller-chosen `𝒦`, e.g. the exactly-once set.
pub fn goodness_with_set(
    mhat: &IntMatrix,
    k_size: usize,
    primes: &[u64],
    k_set: Vec<usize>,
) -> Result<Goodness> {
    let k = mhat.len();
    let all_cols: Vec<usize> = (0..k).collect();
    let block = submatrix(mhat, &k_set, &all_cols);
    let mut good = k_size > 0 && k_set.len() >= k_size;
    let mut witnesses = Vec::with_capacity(primes.len());
    for &p in primes {
        let e = echelon_mod_p(&block, p)?;
        let mut w = RankWitness {
            p,
            rank: e.rank,
            rows: Vec::new(),
            cols: Vec::new(),
        };
        if e.rank >= k_size && k_size > 0 {
            let local: Vec<usize> = e.basis_rows[..k_size].to_vec();
            let rows: Vec<usize> = local.iter().map(|&i| k_set[i]).collect();
            let sub = submatrix(mhat, &rows, &all_cols);
            w.cols = echelon_mod_p(&sub, p)?.pivot_cols;
            w.rows = rows;
        } else {
            good = false;
        }
        witnesses.push(w);
    }
    Ok(Goodness {
        good,
        k_size,
        k_set,
        witnesses,
    })
}

fn for_each_subset(n: usize, r: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == r {
            return f(cur);
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            if rec(i + 1, n, r, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, n, r, &mut Vec::with_capacity(r), f)
}

/// Exhaustive search over row and column `K`-subsets; only for small `k`.
pub fn has_full_rank_minor(mhat: &IntMatrix, rows: &[usize], k_size: usize, p: u64) -> Result<bool> {
    let k = mhat.len();
    assert!(k <= 12, "exhaustive minor search is limited to k <= 12");
    if k_size == 0 || rows.len() < k_size {
        return Ok(false);
    }
    let mut err = None;
    let found = for_each_subset(rows.len(), k_size, &mut |ri| {
        let rsel: Vec<usize> = ri.iter().map(|&i| rows[i]).collect();
        for_each_subset(k, k_size, &mut |cols| match rank_mod_p(&submatrix(mhat, &rsel, cols), p) {
            Ok(r) => r == k_size,
            Err(e) => {
                err = Some(e);
                true
            }
        })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

/// `G_2 χ_b = G_2 Σ_a m̂_{ba} Z_a` and `G_2 ψ_b` (only `a < b` and
/// `a ∈ 𝒦^c, a > b`) as abelianization labels.
pub fn chi_psi(g: &GroupTable, mhat: &IntMatrix, k_set: &[usize], gens: &[Element]) -> (Vec<u32>, Vec<u32>) {
    let ab = g.abelianization();
    let k = mhat.len();
    assert_eq!(gens.len(), k);
    let combine = |b: usize, keep: &dyn Fn(usize) -> bool| {
        let x = (0..k).filter(|&a| keep(a)).fold(Element::IDENTITY, |acc, a| {
            g.mul(acc, g.pow(gens[a], mhat[b][a]))
        });
        ab.project(x)
    };
    let chi = (0..k).map(|b| combine(b, &|_| true)).collect();
    let psi = (0..k)
        .map(|b| combine(b, &|a| a < b || (a > b && !k_set.contains(&a))))
        .collect();
    (chi, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collect::pairs::{hat_matrix, pair_counts};
    use crate::collect::word::sample_word;
    use crate::group::{GroupSpec, DEFAULT_CAP};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn embedded_identity(kk: usize) -> IntMatrix {
        // Rows kk..2kk carry an identity block in columns 0..kk.
        let k = 2 * kk;
        let mut m = vec![vec![0i64; k]; k];
        for i in 0..kk {
            m[kk + i][i] = 1;
        }
        m
    }

    #[test]
    fn zero_matrix_is_not_good() {
        let z = vec![vec![0i64; 6]; 6];
        let r = goodness_check(&z, 2, &[2, 3], 6).unwrap();
        assert!(!r.good);
        assert!(r.k_set.is_empty());
    }

    #[test]
    fn embedded_identity_is_good() {
        for kk in 1..5 {
            let m = embedded_identity(kk);
            let r = goodness_check(&m, kk, &[2, 3, 5, 7], 210).unwrap();
            assert!(r.good, "{r:?}");
            assert_eq!(r.k_set, (kk..2 * kk).collect::<Vec<_>>());
            for w in &r.witnesses {
                let sub = submatrix(&m, &w.rows, &w.cols);
                assert_eq!(rank_mod_p(&sub, w.p).unwrap(), kk);
            }
        }
    }

    #[test]
    fn rank_test_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let mut hits = [0usize; 2];
        for _ in 0..300 {
            let k = rng.random_range(2..=8);
            let kk = rng.random_range(1..=3);
            let t = rng.random_range(1.0..30.0);
            let x = sample_word(t, k, &mut rng);
            let y = sample_word(t, k, &mut rng);
            let mhat = pair_counts(&x, &y).mhat;
            for &(p, n) in &[(2u64, 4u64), (3, 9), (5, 5)] {
                let ks = split_k_set(&mhat, n);
                let fast = goodness_with_set(&mhat, kk, &[p], ks.clone()).unwrap().good;
                let slow = has_full_rank_minor(&mhat, &ks, kk, p).unwrap();
                assert_eq!(fast, slow, "{mhat:?} K={kk} p={p}");
                hits[fast as usize] += 1;
            }
        }
        // Both outcomes occur.
        assert!(hits[0] > 0 && hits[1] > 0, "{hits:?}");
    }

    #[test]
    fn split_support_avoids_k_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..50 {
            let k = rng.random_range(2..=16);
            let x = sample_word(40.0, k, &mut rng);
            let mhat = pair_counts(&x, &WalkWord::empty(k)).mhat;
            let ks = split_k_set(&mhat, 7);
            for &b in &ks {
                assert!(b >= k / 2);
                let s = psi_support(b, &ks, k);
                assert!(s.first_half.iter().all(|a| !ks.contains(a) && *a < k / 2));
                assert!(s.rest.iter().all(|&a| a >= k / 2));
                assert!(s.first_half.iter().all(|a| !s.rest.contains(a)));
                // ψ_b never uses a later member of 𝒦.
                assert!(s.rest.iter().all(|&a| a < b || !ks.contains(&a)));
            }
        }
    }

    use crate::collect::word::WalkWord;

    #[test]
    fn chi_is_linear_in_the_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let g = GroupTable::build(&GroupSpec::heisenberg(5, 1), DEFAULT_CAP).unwrap();
        let gens = crate::group::uniform_elements(&g, 6, &mut rng);
        let mut m = vec![vec![0i64; 6]; 6];
        m[4][1] = 2;
        m[5][0] = -1;
        let mhat = hat_matrix(&m);
        let ks = split_k_set(&mhat, 25);
        assert_eq!(ks, vec![4, 5]);
        let (chi, psi) = chi_psi(&g, &mhat, &ks, &gens);
        let ab = g.abelianization();
        assert_eq!(chi[4], ab.project(g.pow(gens[1], 2)));
        assert_eq!(chi[5], ab.project(g.inv(gens[0])));
        assert_eq!(psi[5], chi[5]);
        assert_eq!(chi[2], 0);
        assert_eq!(k_size(&g), 3);
    }
}
