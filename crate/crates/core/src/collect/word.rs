use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::group::{Element, GroupTable};

/// One step `Z_σ^η` of a walk word; `sigma` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub sigma: u32,
    pub eta: i8,
}

/// `X = Π_i Z_{σ_i}^{η_i}` over `k` generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkWord {
    pub k: usize,
    pub steps: Vec<Step>,
}

impl WalkWord {
    pub fn new(k: usize, steps: Vec<Step>) -> WalkWord {
        assert!(steps.iter().all(|s| (s.sigma as usize) < k && s.eta.abs() == 1));
        WalkWord { k, steps }
    }

    pub fn empty(k: usize) -> WalkWord {
        WalkWord { k, steps: Vec::new() }
    }

    /// Builds a word from 1-based `(σ, η)` pairs.
    pub fn from_pairs(k: usize, pairs: &[(u32, i8)]) -> WalkWord {
        WalkWord::new(
            k,
            pairs
                .iter()
                .map(|&(s, e)| Step {
                    sigma: s - 1,
                    eta: e,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `W^+`: positive steps per generator.
    pub fn plus(&self) -> Vec<u64> {
        self.count(1)
    }

    /// `W^-`: negative steps per generator.
    pub fn minus(&self) -> Vec<u64> {
        self.count(-1)
    }

    fn count(&self, eta: i8) -> Vec<u64> {
        let mut c = vec![0; self.k];
        for s in self.steps.iter().filter(|s| s.eta == eta) {
            c[s.sigma as usize] += 1;
        }
        c
    }

    /// `W = W^+ - W^-`.
    pub fn net(&self) -> Vec<i64> {
        let mut w = vec![0i64; self.k];
        for s in &self.steps {
            w[s.sigma as usize] += s.eta as i64;
        }
        w
    }

    /// The word of `X^{-1}`: reversed with signs flipped.
    pub fn inverse(&self) -> WalkWord {
        WalkWord {
            k: self.k,
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| Step {
                    sigma: s.sigma,
                    eta: -s.eta,
                })
                .collect(),
        }
    }

    /// The word of `X (X')^{-1}`.
    pub fn concat_inverse(&self, other: &WalkWord) -> WalkWord {
        assert_eq!(self.k, other.k);
        let mut steps = self.steps.clone();
        steps.extend(other.inverse().steps);
        WalkWord { k: self.k, steps }
    }

    /// Left-to-right product of the word in `G`.
    pub fn evaluate(&self, g: &GroupTable, gens: &[Element]) -> Element {
        assert_eq!(gens.len(), self.k);
        let inv: Vec<Element> = gens.iter().map(|&z| g.inv(z)).collect();
        self.steps.iter().fold(Element::IDENTITY, |acc, s| {
            let z = if s.eta > 0 {
                gens[s.sigma as usize]
            } else {
                inv[s.sigma as usize]
            };
            g.mul(acc, z)
        })
    }

    /// `𝒥`: generators used exactly once.
    pub fn exactly_once_set(&self) -> Vec<usize> {
        let plus = self.plus();
        let minus = self.minus();
        (0..self.k).filter(|&a| plus[a] + minus[a] == 1).collect()
    }
}

/// The word of the rate-1 walk at time `t`: `N ~ Poisson(t)` steps, each with
/// `σ` uniform on `[k]` and `η` uniform on `{±1}`.
pub fn sample_word<R: Rng + ?Sized>(t: f64, k: usize, rng: &mut R) -> WalkWord {
    assert!(t >= 0.0 && k >= 1);
    let n = if t == 0.0 {
        0
    } else {
        Poisson::new(t).expect("positive rate").sample(rng) as usize
    };
    sample_word_of_length(n, k, rng)
}

pub fn sample_word_of_length<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> WalkWord {
    let steps = (0..n)
        .map(|_| Step {
            sigma: rng.random_range(0..k as u32),
            eta: if rng.random::<bool>() { 1 } else { -1 },
        })
        .collect();
    WalkWord { k, steps }
}
