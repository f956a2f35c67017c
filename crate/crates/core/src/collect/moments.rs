use rand::Rng;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use super::rank::is_prime;
use crate::error::{Error, Result};
use crate::geometry::gcd;

/// `P(Bin(n, 1/2) = x)` for `x = 0..=n`.
fn binomial_half(n: u64) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    (0..=n)
        .map(|x| (ln_binomial(n, x) - n as f64 * ln2).exp())
        .collect()
}

/// `q(n) = max_x P(Bin(n, 1/2) = x)`.
pub fn binomial_max(n: u64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    (ln_binomial(n, n / 2) - n as f64 * ln2).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModpMax {
    pub n: u64,
    pub p: u64,
    /// `max_x P(Bin(n, 1/2) ≡ x mod p)`.
    pub exact: f64,
    pub q: f64,
    /// `min(2/p, 1/2) + q(n)`.
    pub bound: f64,
}

impl ModpMax {
    pub fn holds(&self) -> bool {
        self.exact <= self.bound + 1e-12
    }
}

pub fn binomial_mod_p_maxprob(n: u64, p: u64) -> Result<ModpMax> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut residues = vec![0.0; p as usize];
    for (x, w) in binomial_half(n).into_iter().enumerate() {
        residues[x % p as usize] += w;
    }
    let exact = residues.into_iter().fold(0.0, f64::max);
    let q = binomial_max(n);
    Ok(ModpMax {
        n,
        p,
        exact,
        q,
        bound: (2.0 / p as f64).min(0.5) + q,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationMoment {
    pub p: u64,
    pub alpha: u32,
    pub n: u32,
    pub trials: usize,
    pub estimate: f64,
    pub std_err: f64,
    /// `Σ_i p^{ni} P(|Z/⟨U⟩| = p^i)`.
    pub exact: f64,
    /// `exp(1/(p^2 - 1))`.
    pub bound: f64,
}

impl GenerationMoment {
    pub fn holds(&self) -> bool {
        self.estimate <= self.bound + 3.0 * self.std_err
    }
}

/// `E[(p^α / |⟨U_1, ..., U_{n+2}⟩|)^n]` for `U_i` uniform on `Z_{p^α}`.
///
/// The index of `⟨U⟩` is `gcd(U_1, ..., U_{n+2}, p^α)`, and it is at least
/// `p^i` exactly when every `U_j` is divisible by `p^i`, which has
/// probability `p^{-(n+2)i}`.
pub fn subgroup_generation_moment<R: Rng + ?Sized>(
    p: u64,
    alpha: u32,
    n: u32,
    trials: usize,
    rng: &mut R,
) -> Result<GenerationMoment> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if alpha == 0 || trials == 0 {
        return Err(Error::InvalidArgument("need alpha >= 1 and trials >= 1".into()));
    }
    let modulus = p
        .checked_pow(alpha)
        .ok_or_else(|| Error::InvalidArgument("p^alpha overflows".into()))?;
    let (pf, nf) = (p as f64, n as f64);
    let tail = |i: u32| {
        if i > alpha {
            0.0
        } else {
            pf.powf(-(nf + 2.0) * i as f64)
        }
    };
    let exact = (0..=alpha)
        .map(|i| pf.powf(nf * i as f64) * (tail(i) - tail(i + 1)))
        .sum();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..trials {
        let index = (0..n + 2).fold(modulus, |acc, _| gcd(acc, rng.random_range(0..modulus)));
        let v = (index as f64).powi(n as i32);
        sum += v;
        sum_sq += v * v;
    }
    let tf = trials as f64;
    let estimate = sum / tf;
    let var = (sum_sq / tf - estimate * estimate).max(0.0);
    Ok(GenerationMoment {
        p,
        alpha,
        n,
        trials,
        estimate,
        std_err: (var / tf).sqrt(),
        exact,
        bound: (1.0 / (pf * pf - 1.0)).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lazy_walk_mod_p() {
        let r = binomial_mod_p_maxprob(0, 2).unwrap();
        assert_eq!(r.exact, 1.0);
        assert_eq!(r.bound, 1.5);
        assert!(r.holds());
        let r = binomial_mod_p_maxprob(10, 3).unwrap();
        // Residue classes of 0..=10 mod 3, summed by hand from C(10, x).
        let c = [1.0, 10.0, 45.0, 120.0, 210.0, 252.0, 210.0, 120.0, 45.0, 10.0, 1.0];
        let mut by_res = [0.0f64; 3];
        for (x, v) in c.iter().enumerate() {
            by_res[x % 3] += v / 1024.0;
        }
        let want = by_res.iter().cloned().fold(0.0, f64::max);
        assert!((r.exact - want).abs() < 1e-14);
        assert!((r.q - 252.0 / 1024.0).abs() < 1e-14);
        assert!(r.holds());
        assert!(binomial_max(20) <= binomial_max(10));
        assert!(matches!(binomial_mod_p_maxprob(5, 9), Err(Error::NotPrime(9))));
        for n in 0..200 {
            for p in [2, 3, 5, 7, 11, 101] {
                assert!(binomial_mod_p_maxprob(n, p).unwrap().holds());
            }
        }
    }

    #[test]
    fn generation_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let r = subgroup_generation_moment(3, 2, 2, 100_000, &mut rng).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!((r.estimate - r.exact).abs() <= 4.0 * r.std_err, "{r:?}");
        assert!(r.exact <= r.bound);
        let r = subgroup_generation_moment(5, 1, 3, 10, &mut rng).unwrap();
        let want = 1.0 - 5f64.powi(-5) + 5f64.powi(3) * 5f64.powi(-5);
        assert!((r.exact - want).abs() < 1e-15);
        let r = subgroup_generation_moment(7, 3, 0, 50, &mut rng).unwrap();
        assert_eq!((r.estimate, r.std_err), (1.0, 0.0));
        assert!((r.exact - 1.0).abs() < 1e-15);
        for p in [2, 3, 5, 7] {
            for alpha in 1..5 {
                for n in 0..6 {
                    let r = subgroup_generation_moment(p, alpha, n, 1, &mut rng).unwrap();
                    assert!(r.exact <= r.bound + 1e-12, "p={p} a={alpha} n={n}");
                }
            }
        }
    }
}
