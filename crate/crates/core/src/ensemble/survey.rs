use rand::Rng;
use serde::Serialize;

use super::join_indices;
use crate::error::Result;
use crate::geometry::GeneratorSet;
use crate::group::GroupTable;
use crate::mixing::{mixing_time, point_mass, RelaxMode, RelaxationSandwich, WalkSpace};
use crate::report::fmt_float;

/// Rejections allowed while looking for a generating `r`-set.
pub const SURVEY_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyRow {
    pub index: usize,
    /// Element indices of `Z_1, ..., Z_r`.
    pub generators: Vec<u32>,
    pub t_mix: f64,
    pub t_rel: f64,
    pub t_rel_ab: f64,
    /// `|S| Diam_S(G_2)^2`.
    pub commutator_scale: f64,
    /// `max(t_rel^{G_ab}, |S| Diam_S(G_2)^2) = t_rel^{G_ab}`.
    pub ab_dominates: bool,
    /// `|t_rel^G - t_rel^{G_ab}| <= 1e-9 t_rel^G`.
    pub equal: bool,
}

impl SurveyRow {
    pub const HEADER: [&'static str; 8] = [
        "index",
        "generators",
        "t_mix",
        "t_rel",
        "t_rel_ab",
        "commutator_scale",
        "ab_dominates",
        "equal",
    ];

    pub fn record(&self) -> [String; 8] {
        [
            self.index.to_string(),
            join_indices(&self.generators),
            fmt_float(self.t_mix),
            fmt_float(self.t_rel),
            fmt_float(self.t_rel_ab),
            fmt_float(self.commutator_scale),
            (self.ab_dominates as u8).to_string(),
            (self.equal as u8).to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Survey {
    pub rank: usize,
    pub eps: f64,
    pub rows: Vec<SurveyRow>,
    pub t_mix_min: f64,
    pub t_mix_max: f64,
    pub t_rel_min: f64,
    pub t_rel_max: f64,
}

impl Survey {
    pub fn t_rel_ratio(&self) -> f64 {
        self.t_rel_max / self.t_rel_min
    }

    pub fn t_mix_ratio(&self) -> f64 {
        self.t_mix_max / self.t_mix_min
    }
}

/// Samples `count` minimal symmetric generating sets `{Z_i^{±1}}` with
/// `r = rank(G_ab)` members and computes `t_mix(eps)` and `t_rel` for each.
pub fn minimal_set_survey<R: Rng + ?Sized>(
    g: &GroupTable,
    count: usize,
    eps: f64,
    rng: &mut R,
) -> Result<Survey> {
    let r = g.rank().max(1);
    let mut rows = Vec::with_capacity(count);
    for index in 0..count {
        let s = GeneratorSet::random_generating(g, r, rng, SURVEY_ATTEMPTS)?;
        let space = WalkSpace::group(g, &s)?;
        let t_mix = mixing_time(&space, &point_mass(g.order(), 0), eps)?;
        let sw = RelaxationSandwich::compute(g, &s, RelaxMode::Auto)?;
        let ab_dominates = sw.t_rel_gab >= sw.commutator_scale;
        rows.push(SurveyRow {
            index,
            generators: s.members().iter().map(|e| e.index() as u32).collect(),
            t_mix,
            t_rel: sw.t_rel_g,
            t_rel_ab: sw.t_rel_gab,
            commutator_scale: sw.commutator_scale,
            ab_dominates,
            equal: (sw.t_rel_g - sw.t_rel_gab).abs() <= 1e-9 * sw.t_rel_g.max(1.0),
        });
    }
    let fold = |f: fn(&SurveyRow) -> f64, pick: fn(f64, f64) -> f64, init: f64| {
        rows.iter().map(f).fold(init, pick)
    };
    Ok(Survey {
        rank: r,
        eps,
        t_mix_min: fold(|r| r.t_mix, f64::min, f64::INFINITY),
        t_mix_max: fold(|r| r.t_mix, f64::max, 0.0),
        t_rel_min: fold(|r| r.t_rel, f64::min, f64::INFINITY),
        t_rel_max: fold(|r| r.t_rel, f64::max, 0.0),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupSpec, DEFAULT_CAP};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn torus_minimal_sets_share_t_rel() {
        let g = GroupTable::build(&GroupSpec::abelian([7, 7]), DEFAULT_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(110);
        let s = minimal_set_survey(&g, 8, 0.25, &mut rng).unwrap();
        assert_eq!(s.rank, 2);
        assert!(s.t_rel_ratio() - 1.0 < 1e-9, "{s:?}");
        assert!(s.rows.iter().all(|r| r.equal));
        assert!(s.t_mix_ratio() - 1.0 < 1e-5);
    }

    #[test]
    fn heisenberg_survey() {
        let g = GroupTable::build(&GroupSpec::heisenberg(3, 1), DEFAULT_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(111);
        let s = minimal_set_survey(&g, 20, 0.25, &mut rng).unwrap();
        assert_eq!(s.rows.len(), 20);
        assert!(s.t_rel_ratio() >= 1.0);
        for r in &s.rows {
            assert_eq!(r.generators.len(), 2);
            if r.ab_dominates {
                assert!(r.equal, "{r:?}");
            }
            assert!(r.t_rel + 1e-9 >= r.t_rel_ab);
        }
        let one = minimal_set_survey(&g, 1, 0.25, &mut rng).unwrap();
        assert_eq!(one.rows.len(), 1);
        assert_eq!(one.t_rel_ratio(), 1.0);
    }
}
