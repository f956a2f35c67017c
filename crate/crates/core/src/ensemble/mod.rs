//! Random-generator ensembles: distance to uniformity around `t_*` for
//! i.i.d. uniform generators, collision-based upper estimates, and surveys
//! of minimal generating sets.

mod collision;
mod plot;
mod survey;

pub use collision::{collision_tv_upper, CollisionEstimate, Filter, PairSource};
pub use plot::cutoff_svg;
pub use survey::{minimal_set_survey, Survey, SurveyRow, SURVEY_ATTEMPTS};

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{DiscreteCDF, Poisson};
use statrs::statistics::{Data, OrderStatistics};

use crate::entropic::{cutoff_time, EntropicParams};
use crate::error::{Error, Result};
use crate::geometry::{bfs_distances, GeneratorSet};
use crate::group::{uniform_elements, GroupSpec, GroupTable, DEFAULT_CAP};
use crate::mixing::{evolve_many, mixing_time, point_mass, tv_to_uniform, WalkSpace};
use crate::report::{fmt_float, fmt_opt, write_csv};

pub const DEFAULT_MULTIPLIERS: [f64; 8] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 4.0];
pub const DEFAULT_EPS: f64 = 0.25;
/// Largest `|G|` evolved exactly.
pub const EXACT_CAP: usize = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Exact,
    Collision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupSpec,
    pub k: usize,
    pub trials: usize,
    #[serde(default = "default_multipliers")]
    pub multipliers: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    /// `ε` for `t_mix`.
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_true")]
    pub t_mix: bool,
    /// Word pairs per multiplier in collision mode.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default)]
    pub filter: Filter,
    #[serde(default)]
    pub omega: Option<f64>,
}

fn default_multipliers() -> Vec<f64> {
    DEFAULT_MULTIPLIERS.to_vec()
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

fn default_true() -> bool {
    true
}

fn default_pairs() -> usize {
    10_000
}

impl ExperimentConfig {
    pub fn new(group: GroupSpec, k: usize, trials: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            group,
            k,
            trials,
            multipliers: default_multipliers(),
            seed,
            mode: Mode::Exact,
            eps: DEFAULT_EPS,
            t_mix: true,
            pairs: default_pairs(),
            filter: Filter::Typical,
            omega: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.group.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.k < 2 {
            return Err(Error::InvalidArgument("k must be at least 2".into()));
        }
        if self.multipliers.is_empty() || self.multipliers.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidArgument("multipliers must be positive".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidArgument("eps must lie in (0,1)".into()));
        }
        Ok(())
    }
}

/// Independent stream for one trial: the master seed selects the key and
/// the trial index the ChaCha stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Element indices of `Z_1, ..., Z_k`.
    pub generators: Vec<u32>,
    pub generates: bool,
    /// `d(c t_*)` per multiplier; empty in collision mode.
    pub d: Vec<f64>,
    pub t_mix: Option<f64>,
    /// Per multiplier; empty in exact mode.
    pub collision: Vec<CollisionEstimate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantileRow {
    pub c: f64,
    pub t: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    pub config: ExperimentConfig,
    pub order: usize,
    pub params: EntropicParams,
    pub records: Vec<TrialRecord>,
    /// Quantiles of `d` (exact) or of the collision bound (collision).
    pub summary: Vec<QuantileRow>,
    pub generated_fraction: f64,
    pub note: &'static str,
}

const NOTE: &str = "desk-scale thresholds are engineering choices; cutoff is asymptotic";

pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<Ensemble> {
    cfg.validate()?;
    let g = GroupTable::build(&cfg.group, DEFAULT_CAP)?;
    run_ensemble_on(&g, cfg)
}

pub fn run_ensemble_on(g: &GroupTable, cfg: &ExperimentConfig) -> Result<Ensemble> {
    cfg.validate()?;
    if cfg.mode == Mode::Exact && g.order() > EXACT_CAP {
        return Err(Error::CapExceeded {
            size: g.order(),
            cap: EXACT_CAP,
        });
    }
    let params = cutoff_time(cfg.k, g, cfg.omega)?;
    let times: Vec<f64> = cfg.multipliers.iter().map(|c| c * params.t_star).collect();
    let records = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(g, cfg, &times, trial))
        .collect::<Result<Vec<_>>>()?;
    let summary = cfg
        .multipliers
        .iter()
        .zip(&times)
        .enumerate()
        .map(|(j, (&c, &t))| {
            let vals: Vec<f64> = records
                .iter()
                .map(|r| match cfg.mode {
                    Mode::Exact => r.d[j],
                    Mode::Collision => r.collision[j].tv_upper,
                })
                .collect();
            let mut data = Data::new(vals);
            QuantileRow {
                c,
                t,
                q1: data.lower_quartile(),
                median: data.median(),
                q3: data.upper_quartile(),
            }
        })
        .collect();
    let generated_fraction =
        records.iter().filter(|r| r.generates).count() as f64 / records.len() as f64;
    Ok(Ensemble {
        config: cfg.clone(),
        order: g.order(),
        params,
        records,
        summary,
        generated_fraction,
        note: NOTE,
    })
}

fn run_trial(g: &GroupTable, cfg: &ExperimentConfig, times: &[f64], trial: usize) -> Result<TrialRecord> {
    let mut rng = trial_rng(cfg.seed, trial);
    let members = uniform_elements(g, cfg.k, &mut rng);
    let s = GeneratorSet::from_members(g, &members);
    let generators = members.iter().map(|e| e.index() as u32).collect();
    match cfg.mode {
        Mode::Exact => {
            let space = WalkSpace::group(g, &s)?;
            let generates = space.is_connected();
            let start = point_mass(g.order(), 0);
            let d = evolve_many(&space, &start, times)
                .iter()
                .map(|p| tv_to_uniform(p))
                .collect();
            let t_mix = if generates && cfg.t_mix {
                Some(mixing_time(&space, &start, cfg.eps)?)
            } else {
                None
            };
            Ok(TrialRecord {
                trial,
                generators,
                generates,
                d,
                t_mix,
                collision: Vec::new(),
            })
        }
        Mode::Collision => {
            let collision = times
                .iter()
                .map(|&t| collision_tv_upper(g, &members, t, cfg.pairs, cfg.filter, PairSource::Walk, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            Ok(TrialRecord {
                trial,
                generators,
                generates: g.generates(&members),
                d: Vec::new(),
                t_mix: None,
                collision,
            })
        }
    }
}

pub(crate) fn join_indices(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

impl Ensemble {
    pub const HEADER: [&'static str; 11] = [
        "seed",
        "trial",
        "generators",
        "generates",
        "c",
        "t",
        "d",
        "t_mix",
        "collision_estimate",
        "collision_se",
        "collision_tv_upper",
    ];

    /// One row per trial per multiplier.
    pub fn rows(&self) -> Vec<[String; 11]> {
        let mut out = Vec::new();
        for r in &self.records {
            for (j, q) in self.summary.iter().enumerate() {
                let col = r.collision.get(j);
                out.push([
                    self.config.seed.to_string(),
                    r.trial.to_string(),
                    join_indices(&r.generators),
                    (r.generates as u8).to_string(),
                    fmt_float(q.c),
                    fmt_float(q.t),
                    fmt_opt(r.d.get(j).copied()),
                    fmt_opt(r.t_mix),
                    fmt_opt(col.map(|c| c.estimate)),
                    fmt_opt(col.map(|c| c.std_err)),
                    fmt_opt(col.map(|c| c.tv_upper)),
                ]);
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_csv(w, &Self::HEADER, self.rows())
    }

    pub const SUMMARY_HEADER: [&'static str; 5] = ["c", "t", "q1", "median", "q3"];

    pub fn write_summary_csv<W: Write>(&self, w: W) -> Result<()> {
        write_csv(
            w,
            &Self::SUMMARY_HEADER,
            self.summary
                .iter()
                .map(|q| [q.c, q.t, q.q1, q.median, q.q3].map(fmt_float)),
        )
    }

    pub fn median_at(&self, c: f64) -> Option<f64> {
        self.summary.iter().find(|q| q.c == c).map(|q| q.median)
    }
}

/// `d(t) >= P(N <= m) - |B_S(m)|/|G|`, where `N ~ Poisson(t)` is the step
/// count and `B_S(m)` the ball of radius `m`, which contains the support of
/// the walk after at most `m` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportBound {
    pub t: f64,
    pub m: u64,
    pub mass_within: f64,
    pub ball: usize,
    pub bound: f64,
    /// `1 - k^m/|G|`, the cruder count by words in the `k` generators.
    pub word_count_bound: f64,
}

/// Uses `m` = the `quantile` point of `Poisson(t)`.
pub fn support_lower_bound(g: &GroupTable, s: &GeneratorSet, t: f64, quantile: f64) -> SupportBound {
    let (m, mass) = if t == 0.0 {
        (0, 1.0)
    } else {
        let pois = Poisson::new(t).expect("positive rate");
        let m = pois.inverse_cdf(quantile);
        (m, pois.cdf(m))
    };
    let field = bfs_distances(g, s);
    let ball = field
        .raw()
        .iter()
        .filter(|&&d| (d as u64) <= m)
        .count();
    let n = g.order() as f64;
    SupportBound {
        t,
        m,
        mass_within: mass,
        ball,
        bound: mass - ball as f64 / n,
        word_count_bound: 1.0 - (s.members().len() as f64).powf(m as f64) / n,
    }
}
