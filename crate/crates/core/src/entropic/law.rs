use serde::Serialize;

use crate::error::{Error, Result};

/// Default two-sided truncation mass for [`coord_law`].
pub const COORD_TAIL: f64 = 1e-15;

const RESCALE_ABOVE: f64 = 1e250;

/// `ν_s`: the law of a rate-1 walk on `Z` at time `s`, `ν_s(n) = e^{-s} I_n(s)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordLaw {
    pub s: f64,
    /// `pmf[n]` for `n = 0..=support`; `ν_s(-n) = ν_s(n)`.
    pmf: Vec<f64>,
}

impl CoordLaw {
    pub fn pmf(&self, n: i64) -> f64 {
        self.pmf
            .get(n.unsigned_abs() as usize)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn ln_pmf(&self, n: i64) -> f64 {
        self.pmf(n).ln()
    }

    /// Largest `|n|` kept.
    pub fn support(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn total_mass(&self) -> f64 {
        self.pmf[0] + 2.0 * self.pmf[1..].iter().sum::<f64>()
    }

    /// Shannon entropy in nats over the kept support.
    pub fn entropy(&self) -> f64 {
        let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
        term(self.pmf[0]) + 2.0 * self.pmf[1..].iter().map(|&p| term(p)).sum::<f64>()
    }
}

/// `ν_s` by Miller's backward recurrence `I_{n-1} = (2n/s) I_n + I_{n+1}`,
/// normalised with `Σ_n e^{-s} I_n(s) = 1`, then truncated so that the
/// dropped two-sided mass is below `tail`.
pub fn coord_law_with_tail(s: f64, tail: f64) -> CoordLaw {
    assert!(s >= 0.0 && s.is_finite(), "s must be finite and nonnegative");
    if s == 0.0 {
        return CoordLaw { s, pmf: vec![1.0] };
    }
    let start = (60.0 + 16.0 * s.sqrt() + 2.0 * s.min(60.0)).ceil() as usize;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for n in (1..=start).rev() {
        vals[n - 1] = (2.0 * n as f64 / s) * vals[n] + vals[n + 1];
        if vals[n - 1] > RESCALE_ABOVE {
            for v in &mut vals[n - 1..] {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals[1..].iter().sum::<f64>();
    let mut pmf: Vec<f64> = vals[..=start].iter().map(|v| v / norm).collect();
    let mut dropped = 0.0;
    while pmf.len() > 1 {
        let last = *pmf.last().unwrap();
        if dropped + 2.0 * last >= tail {
            break;
        }
        dropped += 2.0 * last;
        pmf.pop();
    }
    CoordLaw { s, pmf }
}

pub fn coord_law(s: f64) -> CoordLaw {
    coord_law_with_tail(s, COORD_TAIL)
}

/// Entropy of the rate-1 walk on `Z^k` at time `t`: `k H(ν_{t/k})`.
pub fn walk_entropy(t: f64, k: usize) -> f64 {
    walk_entropy_with_tail(t, k, COORD_TAIL)
}

pub fn walk_entropy_with_tail(t: f64, k: usize, tail: f64) -> f64 {
    assert!(k >= 1);
    k as f64 * coord_law_with_tail(t / k as f64, tail).entropy()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropicSolution {
    pub t0: f64,
    pub residual: f64,
    pub iterations: usize,
}

const BRACKET_GRID: usize = 16;

/// `t_0(k, N)`: the time at which the walk on `Z^k` has entropy `log N`.
pub fn entropic_time(k: usize, n: f64) -> Result<EntropicSolution> {
    entropic_time_with_tail(k, n, COORD_TAIL)
}

pub fn entropic_time_with_tail(k: usize, n: f64, tail: f64) -> Result<EntropicSolution> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::InvalidArgument(format!("N must be at least 1, got {n}")));
    }
    let target = n.ln();
    if target == 0.0 {
        return Ok(EntropicSolution {
            t0: 0.0,
            residual: 0.0,
            iterations: 0,
        });
    }
    let h = |t: f64| walk_entropy_with_tail(t, k, tail);
    let (mut lo, mut hi) = (0.0, 1.0);
    while h(hi) < target {
        lo = hi;
        hi *= 2.0;
    }
    let mut prev = h(lo);
    for i in 1..=BRACKET_GRID {
        let v = h(lo + (hi - lo) * i as f64 / BRACKET_GRID as f64);
        if v <= prev {
            return Err(Error::NonMonotoneBracket { lo, hi });
        }
        prev = v;
    }
    let mut iterations = 0;
    let (mut h_lo, mut h_hi) = (h(lo), h(hi));
    while hi - lo > 1e-13 * hi && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        let v = h(mid);
        if v < target {
            lo = mid;
            h_lo = v;
        } else {
            hi = mid;
            h_hi = v;
        }
        iterations += 1;
    }
    let (t0, hv) = if (target - h_lo).abs() < (h_hi - target).abs() {
        (lo, h_lo)
    } else {
        (hi, h_hi)
    };
    Ok(EntropicSolution {
        t0,
        residual: (hv - target).abs(),
        iterations,
    })
}

/// `k N^{2/k} / (2πe)`, the small-`k` asymptotic of `t_0`.
pub fn gaussian_approximation(k: usize, n: f64) -> f64 {
    k as f64 * n.powf(2.0 / k as f64) / (2.0 * std::f64::consts::PI * std::f64::consts::E)
}
