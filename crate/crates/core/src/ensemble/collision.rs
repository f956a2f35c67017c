use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::collect::sample_word;
use crate::entropic::{cutoff_time, Typicality, TypicalSpec, DEFAULT_ONCE_EPS};
use crate::error::Result;
use crate::group::{uniform_elements, Element, GroupTable};

/// Which walks enter the collision estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    /// Condition on both auxiliary walks being typical.
    #[default]
    Typical,
    /// `𝒲 = Z^k`.
    None,
}

/// How the second copy is produced. Only `Walk` estimates the walk; the
/// others exist to check the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSource {
    #[default]
    Walk,
    /// `X' = X`.
    Mirror,
    /// `X` and `X'` independent uniform on `G`.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionEstimate {
    pub t: f64,
    pub pairs: usize,
    pub typical_pairs: usize,
    pub collisions: usize,
    /// `|G| P(X = X' | W, W' ∈ 𝒲) - 1`.
    pub estimate: f64,
    pub std_err: f64,
    /// Fraction of single walks with `W ∉ 𝒲`.
    pub atypical: f64,
    /// `min(1, sqrt(max(estimate, 0))/2 + atypical)`.
    pub tv_upper: f64,
    /// The same with `estimate + 3 std_err` in place of the estimate.
    pub tv_upper_3se: f64,
}

/// Paired-walk estimate of the upper bound
/// `d(t) <= sqrt(|G| P(X = X' | W, W' ∈ 𝒲) - 1)/2 + P(W ∉ 𝒲)`.
pub fn collision_tv_upper<R: Rng + ?Sized>(
    g: &GroupTable,
    members: &[Element],
    t: f64,
    pairs: usize,
    filter: Filter,
    source: PairSource,
    rng: &mut R,
) -> Result<CollisionEstimate> {
    let k = members.len();
    let typicality = match filter {
        Filter::Typical => {
            let params = cutoff_time(k, g, None)?;
            Some(Typicality::new(
                &params,
                TypicalSpec::new(&params, t, DEFAULT_ONCE_EPS),
            ))
        }
        Filter::None => None,
    };
    let draw = |rng: &mut R| {
        let w = sample_word(t, k, rng);
        let typ = typicality
            .as_ref()
            .is_none_or(|ty| ty.flags(&w.plus(), &w.minus()).typ);
        (w.evaluate(g, members), typ)
    };
    let (mut typical_pairs, mut collisions, mut atypical) = (0usize, 0usize, 0usize);
    for _ in 0..pairs {
        let ((x, tx), (y, ty)) = match source {
            PairSource::Walk => (draw(rng), draw(rng)),
            PairSource::Mirror => {
                let a = draw(rng);
                (a, a)
            }
            PairSource::Uniform => {
                let (_, tx) = draw(rng);
                let (_, ty) = draw(rng);
                let u = uniform_elements(g, 2, rng);
                ((u[0], tx), (u[1], ty))
            }
        };
        atypical += (!tx) as usize + (!ty) as usize;
        if tx && ty {
            typical_pairs += 1;
            collisions += (x == y) as usize;
        }
    }
    let n = g.order() as f64;
    let atypical = if pairs == 0 {
        1.0
    } else {
        atypical as f64 / (2 * pairs) as f64
    };
    let (estimate, std_err) = if typical_pairs == 0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        let m = typical_pairs as f64;
        let p = collisions as f64 / m;
        (n * p - 1.0, n * (p * (1.0 - p) / m).sqrt())
    };
    let bound = |e: f64| (e.max(0.0).sqrt() / 2.0 + atypical).min(1.0);
    let tv_upper = bound(estimate);
    let tv_upper_3se = bound(estimate + 3.0 * std_err);
    Ok(CollisionEstimate {
        t,
        pairs,
        typical_pairs,
        collisions,
        estimate,
        std_err,
        atypical,
        tv_upper,
        tv_upper_3se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropic::cutoff_time;
    use crate::geometry::GeneratorSet;
    use crate::group::{GroupSpec, DEFAULT_CAP};
    use crate::mixing::{point_mass, tv_at, WalkSpace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h3() -> GroupTable {
        GroupTable::build(&GroupSpec::heisenberg(3, 1), DEFAULT_CAP).unwrap()
    }

    #[test]
    fn mirrored_pairs_collide() {
        let g = h3();
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let z = uniform_elements(&g, 3, &mut rng);
        let c = collision_tv_upper(&g, &z, 2.0, 500, Filter::None, PairSource::Mirror, &mut rng).unwrap();
        assert_eq!(c.estimate, 26.0);
        assert_eq!(c.tv_upper, 1.0);
        assert_eq!(c.atypical, 0.0);
    }

    #[test]
    fn uniform_pairs_estimate_zero() {
        let g = h3();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let z = uniform_elements(&g, 3, &mut rng);
        let c = collision_tv_upper(&g, &z, 2.0, 200_000, Filter::None, PairSource::Uniform, &mut rng)
            .unwrap();
        assert!(c.estimate.abs() <= 3.0 * c.std_err, "{c:?}");
    }

    #[test]
    fn bound_dominates_exact_distance() {
        let g = h3();
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        for _ in 0..5 {
            let s = GeneratorSet::random_generating(&g, 3, &mut rng, 1000).unwrap();
            let space = WalkSpace::group(&g, &s).unwrap();
            let t_star = cutoff_time(3, &g, None).unwrap().t_star;
            for t in [t_star, 2.0 * t_star] {
                let d = tv_at(&space, &point_mass(g.order(), 0), t);
                for filter in [Filter::None, Filter::Typical] {
                    let c = collision_tv_upper(&g, s.members(), t, 100_000, filter, PairSource::Walk, &mut rng)
                        .unwrap();
                    assert!(c.tv_upper_3se >= d, "t={t} d={d} {c:?}");
                }
            }
        }
    }
}
