use serde::{Deserialize, Serialize};

use super::law::{coord_law, entropic_time, CoordLaw};
use crate::error::{Error, Result};
use crate::group::GroupTable;

/// Default width `ε` of the exactly-once band.
pub const DEFAULT_ONCE_EPS: f64 = 0.1;

/// `κ` at or below which the low-`k` event is used.
pub const LOW_KAPPA: f64 = 0.5;
/// `κ` at or above which the high-`k` event is used.
pub const HIGH_KAPPA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `k ≪ log|G_ab|`: glo and loc.
    Low,
    /// `k ≍ log|G_ab|`: glo, loc and once.
    Middle,
    /// `k ≫ log|G_ab|`: glo and once.
    High,
}

impl Regime {
    pub fn classify(kappa: f64) -> Regime {
        if kappa <= LOW_KAPPA {
            Regime::Low
        } else if kappa >= HIGH_KAPPA {
            Regime::High
        } else {
            Regime::Middle
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropicParams {
    pub k: usize,
    /// `log|G_ab|`.
    pub log_n: f64,
    /// `log|G|`.
    pub log_g: f64,
    pub t0: f64,
    /// `log_k |G|`.
    pub t1: f64,
    pub t_star: f64,
    pub rho: f64,
    pub kappa: f64,
    pub h0: f64,
    pub omega: f64,
    pub h: f64,
    pub regime: Regime,
}

impl EntropicParams {
    /// Parameters for `k` generators with `log|G_ab| = log_n` and
    /// `log|G| = log_g`. `ω` defaults to `min(k, log|G_ab|)^{1/2}`.
    pub fn new(k: usize, log_n: f64, log_g: f64, omega: Option<f64>) -> Result<EntropicParams> {
        if k < 2 {
            return Err(Error::InvalidArgument("cutoff time needs k >= 2".into()));
        }
        if !(log_n > 0.0 && log_g >= log_n) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < log|G_ab| <= log|G|, got {log_n} and {log_g}"
            )));
        }
        let kf = k as f64;
        let t0 = entropic_time(k, log_n.exp())?.t0;
        let t1 = log_g / kf.ln();
        let loglog = log_n.ln();
        // For |G_ab| <= e the double logarithm is not positive; 1/ρ is then
        // taken as 0.
        let rho = if loglog > 0.0 { kf.ln() / loglog } else { f64::INFINITY };
        let h0 = if t0 > t1 {
            log_n
        } else {
            (1.0 - 1.0 / rho) * log_g
        };
        let omega = omega.unwrap_or_else(|| kf.min(log_n).sqrt());
        let kappa = kf / log_n;
        Ok(EntropicParams {
            k,
            log_n,
            log_g,
            t0,
            t1,
            t_star: t0.max(t1),
            rho,
            kappa,
            h0,
            omega,
            h: h0 + omega,
            regime: Regime::classify(kappa),
        })
    }
}

/// `t_*(k, G)` and the quantities derived from it.
pub fn cutoff_time(k: usize, g: &GroupTable, omega: Option<f64>) -> Result<EntropicParams> {
    EntropicParams::new(
        k,
        (g.ab_order() as f64).ln(),
        (g.order() as f64).ln(),
        omega,
    )
}

/// Thresholds of the typical events at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalSpec {
    pub t: f64,
    /// `½ |G_ab|^{1/k} (log k)^2`.
    pub r_star: f64,
    pub eps: f64,
    /// `t e^{-t/k}`.
    pub once_center: f64,
    pub h: f64,
    pub regime: Regime,
}

impl TypicalSpec {
    pub fn new(params: &EntropicParams, t: f64, eps: f64) -> TypicalSpec {
        let kf = params.k as f64;
        TypicalSpec {
            t,
            r_star: 0.5 * (params.log_n / kf).exp() * kf.ln().powi(2),
            eps,
            once_center: t * (-t / kf).exp(),
            h: params.h,
            regime: params.regime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TypicalFlags {
    pub glo: bool,
    pub loc: bool,
    pub once: bool,
    pub typ: bool,
}

/// Evaluates the typical events for one walk with step counts `w^±`.
pub struct Typicality {
    spec: TypicalSpec,
    law: CoordLaw,
    k: usize,
}

impl Typicality {
    pub fn new(params: &EntropicParams, spec: TypicalSpec) -> Typicality {
        Typicality {
            law: coord_law(spec.t / params.k as f64),
            k: params.k,
            spec,
        }
    }

    pub fn spec(&self) -> &TypicalSpec {
        &self.spec
    }

    /// `log μ_t(w) = Σ_a log ν_{t/k}(w_a)`.
    pub fn log_prob(&self, w_plus: &[u64], w_minus: &[u64]) -> f64 {
        w_plus
            .iter()
            .zip(w_minus)
            .map(|(&p, &m)| self.law.ln_pmf(p as i64 - m as i64))
            .sum()
    }

    pub fn flags(&self, w_plus: &[u64], w_minus: &[u64]) -> TypicalFlags {
        assert_eq!(w_plus.len(), self.k);
        assert_eq!(w_minus.len(), self.k);
        let s = &self.spec;
        let glo = self.log_prob(w_plus, w_minus) <= -s.h;
        let mean = s.t / (2.0 * self.k as f64);
        let loc = w_plus
            .iter()
            .chain(w_minus)
            .all(|&x| (x as f64 - mean).abs() <= s.r_star);
        let j = w_plus
            .iter()
            .zip(w_minus)
            .filter(|&(&p, &m)| p + m == 1)
            .count() as f64;
        let once = (j - s.once_center).abs() <= 0.5 * s.eps * s.once_center;
        let typ = match s.regime {
            Regime::Low => glo && loc,
            Regime::Middle => glo && loc && once,
            Regime::High => glo && once,
        };
        TypicalFlags {
            glo,
            loc,
            once,
            typ,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupSpec, DEFAULT_CAP};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Poisson};

    #[test]
    fn case_split() {
        // Small k against a large abelianization: t0 dominates.
        let p = EntropicParams::new(3, 20.0, 20.0, None).unwrap();
        assert!(p.t0 > p.t1);
        assert_eq!(p.t_star, p.t0);
        assert_eq!(p.h0, 20.0);
        // Large k: log_k|G| dominates.
        let p = EntropicParams::new(400, 10.0, 30.0, None).unwrap();
        assert!(p.t0 <= p.t1);
        assert_eq!(p.t_star, p.t1);
        assert!((p.h0 - (1.0 - 1.0 / p.rho) * 30.0).abs() < 1e-12);
        assert!((p.h - p.h0 - 10f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.regime, Regime::High);
    }

    #[test]
    fn z101_squared() {
        let g = GroupTable::build(&GroupSpec::abelian([101, 101]), DEFAULT_CAP).unwrap();
        let p = cutoff_time(6, &g, None).unwrap();
        assert!((p.t1 - 10201f64.ln() / 6f64.ln()).abs() < 1e-12);
        assert!(p.t_star >= p.t0 && p.t_star >= p.t1);
        assert_eq!(p.regime, Regime::Middle);
    }

    #[test]
    fn zero_word_is_not_globally_typical() {
        let p = EntropicParams::new(4, 12.0, 12.0, None).unwrap();
        let t = 2.0 * p.t_star;
        let typ = Typicality::new(&p, TypicalSpec::new(&p, t, DEFAULT_ONCE_EPS));
        let f = typ.flags(&[0; 4], &[0; 4]);
        assert!(!f.glo);
    }

    #[test]
    fn once_band_counts_single_steps() {
        let p = EntropicParams::new(20, 5.0, 5.0, None).unwrap();
        // Centre 10 e^{-1/2} ≈ 6.07 with half-width ≈ 0.30.
        let typ = Typicality::new(&p, TypicalSpec::new(&p, 10.0, 0.1));
        assert!((typ.spec().once_center - 10.0 * (-0.5f64).exp()).abs() < 1e-15);
        let mut plus = vec![0u64; 20];
        let mut minus = vec![0u64; 20];
        for a in 0..3 {
            plus[a] = 1;
            minus[a + 10] = 1;
        }
        assert!(typ.flags(&plus, &minus).once);
        plus[5] = 1;
        assert!(!typ.flags(&plus, &minus).once);
        minus[5] = 1;
        assert!(typ.flags(&plus, &minus).once);
    }

    fn empirical_typical(p: &EntropicParams, t: f64, draws: usize, seed: u64) -> (f64, f64, f64) {
        let typ = Typicality::new(p, TypicalSpec::new(p, t, DEFAULT_ONCE_EPS));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pois = Poisson::new(t / (2.0 * p.k as f64)).unwrap();
        let (mut g, mut o, mut all) = (0, 0, 0);
        for _ in 0..draws {
            let plus: Vec<u64> = (0..p.k).map(|_| pois.sample(&mut rng) as u64).collect();
            let minus: Vec<u64> = (0..p.k).map(|_| pois.sample(&mut rng) as u64).collect();
            let f = typ.flags(&plus, &minus);
            g += f.glo as usize;
            o += f.once as usize;
            all += f.typ as usize;
        }
        let d = draws as f64;
        (g as f64 / d, o as f64 / d, all as f64 / d)
    }

    #[test]
    fn smoke_k64_once_band_has_no_integer() {
        // At |G_ab| = 10^4 and t = 1.2 t_*, the once band
        // t e^{-t/k} (1 ± ε/2) is narrower than one unit and contains no
        // integer, so the high-k event never occurs at this scale.
        let p = EntropicParams::new(64, 1e4f64.ln(), 1e4f64.ln(), None).unwrap();
        assert_eq!(p.regime, Regime::High);
        let t = 1.2 * p.t_star;
        let spec = TypicalSpec::new(&p, t, DEFAULT_ONCE_EPS);
        let lo = spec.once_center * (1.0 - spec.eps / 2.0);
        let hi = spec.once_center * (1.0 + spec.eps / 2.0);
        assert!(lo.ceil() > hi.floor());
        let (glo, once, all) = empirical_typical(&p, t, 1000, 5);
        assert_eq!(once, 0.0);
        assert_eq!(all, 0.0);
        assert!(glo > 0.5, "glo frequency {glo}");
    }
}
