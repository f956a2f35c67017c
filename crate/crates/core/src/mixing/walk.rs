use std::collections::VecDeque;

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::geometry::{is_symmetric, GeneratorSet};
use crate::group::{CosetPartition, Element, GroupSpec, GroupTable};

/// Neglected Poisson mass per evolution.
pub const POISSON_TOL: f64 = 1e-12;

const PAR_MIN_STATES: usize = 8192;
const PAR_CHUNK: usize = 2048;

/// Data for the character formula on `Z_{n_1} ⊕ ... ⊕ Z_{n_r}`.
#[derive(Debug, Clone)]
pub(crate) struct Characters {
    pub moduli: Vec<u32>,
    pub steps: Vec<(Vec<u32>, f64)>,
}

/// The rate-1 continuous-time walk on `G` or on a quotient `G/N`, stepping
/// by a uniform element of the multiset `S`.
#[derive(Debug, Clone)]
pub struct WalkSpace {
    n: usize,
    /// For each distinct `s`: the table `x -> x s` and `mult(s)/|S|`.
    steps: Vec<(Vec<u32>, f64)>,
    pub(crate) characters: Option<Characters>,
}

impl WalkSpace {
    pub fn group(g: &GroupTable, s: &GeneratorSet) -> Result<WalkSpace> {
        if !is_symmetric(g, s.multiset()) {
            return Err(Error::NotSymmetric);
        }
        let total = s.size() as f64;
        let weighted = s.weighted();
        let steps = weighted
            .iter()
            .map(|&(x, c)| (g.right_mul_table(x), c as f64 / total))
            .collect();
        let characters = match g.spec() {
            GroupSpec::Abelian { moduli } => Some(Characters {
                moduli: moduli.clone(),
                steps: weighted
                    .iter()
                    .map(|&(x, c)| (g.coords(x).to_vec(), c as f64 / total))
                    .collect(),
            }),
            _ => None,
        };
        Ok(WalkSpace {
            n: g.order(),
            steps,
            characters,
        })
    }

    /// The projected walk on coset labels of `part`.
    pub fn quotient(g: &GroupTable, part: &CosetPartition, s: &GeneratorSet) -> Result<WalkSpace> {
        if !is_symmetric(g, s.multiset()) {
            return Err(Error::NotSymmetric);
        }
        let total = s.size() as f64;
        let steps = s
            .weighted()
            .into_iter()
            .map(|(x, c)| {
                let table = (0..part.len() as u32)
                    .map(|l| part.project(g.mul(part.rep(l), x)))
                    .collect();
                (table, c as f64 / total)
            })
            .collect();
        Ok(WalkSpace {
            n: part.len(),
            steps,
            characters: None,
        })
    }

    pub fn abelianization(g: &GroupTable, s: &GeneratorSet) -> Result<WalkSpace> {
        WalkSpace::quotient(g, g.abelianization(), s)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub(crate) fn steps(&self) -> &[(Vec<u32>, f64)] {
        &self.steps
    }

    /// True if every state is reachable from state 0.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for (table, _) in &self.steps {
                let w = table[v as usize];
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// `out = p P`. Uses symmetry of `S`: `(pP)(y) = Σ_s w(s) p(y s)`.
    pub fn step(&self, p: &[f64], out: &mut [f64]) {
        let fill = |offset: usize, chunk: &mut [f64]| {
            for (i, o) in chunk.iter_mut().enumerate() {
                let y = offset + i;
                *o = self
                    .steps
                    .iter()
                    .map(|(t, w)| w * p[t[y] as usize])
                    .sum();
            }
        };
        if self.n >= PAR_MIN_STATES {
            out.par_chunks_mut(PAR_CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| fill(c * PAR_CHUNK, chunk));
        } else {
            fill(0, out);
        }
    }
}

pub fn point_mass(n: usize, at: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[at] = 1.0;
    v
}

pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

pub fn uniform_on(n: usize, members: &[Element]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    let w = 1.0 / members.len() as f64;
    for m in members {
        v[m.index()] = w;
    }
    v
}

/// `½ Σ |p(x) - 1/n|`.
pub fn tv_to_uniform(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    0.5 * p.iter().map(|&x| (x - u).abs()).sum::<f64>()
}

pub fn tv_between(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Poisson(t) weights on `lo..lo + weights.len()`, covering all but `tol`
/// of the mass, renormalised to sum to one.
#[derive(Debug, Clone)]
pub(crate) struct PoissonWindow {
    pub lo: usize,
    pub weights: Vec<f64>,
}

impl PoissonWindow {
    pub fn new(t: f64, tol: f64) -> PoissonWindow {
        if t <= 0.0 {
            return PoissonWindow {
                lo: 0,
                weights: vec![1.0],
            };
        }
        let mode = t.floor() as usize;
        let w_mode = (-t + mode as f64 * t.ln() - ln_gamma(mode as f64 + 1.0)).exp();
        let half = tol / 2.0;

        let mut up = Vec::new();
        let (mut n, mut w) = (mode, w_mode);
        loop {
            let next = w * t / (n as f64 + 1.0);
            let ratio = t / (n as f64 + 2.0);
            if ratio < 1.0 && next / (1.0 - ratio) < half {
                break;
            }
            up.push(next);
            n += 1;
            w = next;
        }

        let mut down = Vec::new();
        let (mut n, mut w) = (mode, w_mode);
        while n > 0 {
            let prev = w * n as f64 / t;
            let ratio = (n as f64 - 1.0) / t;
            if ratio < 1.0 && prev / (1.0 - ratio) < half {
                break;
            }
            down.push(prev);
            n -= 1;
            w = prev;
        }

        let lo = mode - down.len();
        let mut weights: Vec<f64> = down.into_iter().rev().collect();
        weights.push(w_mode);
        weights.extend(up);
        let total: f64 = weights.iter().sum();
        for x in &mut weights {
            *x /= total;
        }
        PoissonWindow { lo, weights }
    }

    pub fn hi(&self) -> usize {
        self.lo + self.weights.len() - 1
    }

    pub fn weight(&self, n: usize) -> f64 {
        if n < self.lo {
            0.0
        } else {
            self.weights.get(n - self.lo).copied().unwrap_or(0.0)
        }
    }
}

/// `start P_t` with `P_t = Σ_n e^{-t} t^n/n! P^n`.
pub fn evolve(space: &WalkSpace, start: &[f64], t: f64) -> Vec<f64> {
    evolve_many(space, start, &[t]).pop().unwrap()
}

/// `start P_t` for every `t` in `times`, sharing the powers `start P^n`.
pub fn evolve_many(space: &WalkSpace, start: &[f64], times: &[f64]) -> Vec<Vec<f64>> {
    assert_eq!(start.len(), space.len());
    assert!(times.iter().all(|&t| t >= 0.0 && t.is_finite()));
    let windows: Vec<PoissonWindow> = times
        .iter()
        .map(|&t| PoissonWindow::new(t, POISSON_TOL))
        .collect();
    let n_max = windows.iter().map(|w| w.hi()).max().unwrap_or(0);
    let mut out = vec![vec![0.0; space.len()]; times.len()];
    let mut cur = start.to_vec();
    let mut next = vec![0.0; space.len()];
    for n in 0..=n_max {
        for (acc, w) in out.iter_mut().zip(&windows) {
            let c = w.weight(n);
            if c > 0.0 {
                for (a, &x) in acc.iter_mut().zip(&cur) {
                    *a += c * x;
                }
            }
        }
        if n < n_max {
            space.step(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
    }
    out
}

/// `d(t) = ‖start P_t - π‖_TV`.
pub fn tv_at(space: &WalkSpace, start: &[f64], t: f64) -> f64 {
    tv_to_uniform(&evolve(space, start, t))
}

/// Smallest `t` with `d(t) <= eps`, by doubling then bisection to relative
/// width `1e-6`.
pub fn mixing_time(space: &WalkSpace, start: &[f64], eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0,1), got {eps}")));
    }
    if !space.is_connected() {
        return Err(Error::NotGenerating);
    }
    if tv_to_uniform(start) <= eps {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while tv_at(space, start, hi) > eps {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::InvalidArgument("mixing time exceeds 1e9".into()));
        }
    }
    let mut lo = if hi == 1.0 { 0.0 } else { hi / 2.0 };
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if tv_at(space, start, mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
