use serde::Serialize;

use super::spectral::{relaxation_time, RelaxMode};
use super::walk::{
    evolve_many, mixing_time, point_mass, tv_between, tv_to_uniform, uniform_on, WalkSpace,
};
use crate::error::Result;
use crate::geometry::{bfs_distances, diam_subgroup, GeneratorSet};
use crate::group::GroupTable;

/// `|S| · Diam_S(G_2)^2`.
pub fn commutator_scale(g: &GroupTable, s: &GeneratorSet) -> Result<f64> {
    let field = bfs_distances(g, s);
    let d = diam_subgroup(&field, g.series_term(2))? as f64;
    Ok(s.size() as f64 * d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionGap {
    pub t: f64,
    /// `‖P_id(X_t) - P_{π_{G_2}}(X_t)‖_TV`.
    pub lhs: f64,
    /// `(|G|/2) exp(-t / (|S| Diam_S(G_2)^2))`.
    pub bound: f64,
}

impl ReductionGap {
    pub fn holds(&self) -> bool {
        self.lhs <= self.bound
    }
}

fn gap_bound(order: usize, scale: f64, t: f64) -> f64 {
    if scale == 0.0 {
        // G_2 trivial: both walks coincide.
        0.0
    } else {
        order as f64 / 2.0 * (-t / scale).exp()
    }
}

pub fn reduction_gap(g: &GroupTable, s: &GeneratorSet, times: &[f64]) -> Result<Vec<ReductionGap>> {
    let space = WalkSpace::group(g, s)?;
    let scale = commutator_scale(g, s)?;
    let from_id = evolve_many(&space, &point_mass(g.order(), 0), times);
    let from_g2 = evolve_many(
        &space,
        &uniform_on(g.order(), &g.series_term(2).members()),
        times,
    );
    Ok(times
        .iter()
        .zip(from_id.iter().zip(&from_g2))
        .map(|(&t, (a, b))| ReductionGap {
            t,
            lhs: tv_between(a, b),
            bound: gap_bound(g.order(), scale, t),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionCheck {
    pub t: f64,
    /// Walk on `G` started uniform on `G_2`, against `π_G`.
    pub lifted: f64,
    /// Projected walk on `G_ab` started at the identity coset, against `π_{G_ab}`.
    pub projected: f64,
}

impl ProjectionCheck {
    pub fn diff(&self) -> f64 {
        (self.lifted - self.projected).abs()
    }
}

pub fn projected_start_identity_check(
    g: &GroupTable,
    s: &GeneratorSet,
    times: &[f64],
) -> Result<Vec<ProjectionCheck>> {
    let space = WalkSpace::group(g, s)?;
    let ab = WalkSpace::abelianization(g, s)?;
    let lifted = evolve_many(
        &space,
        &uniform_on(g.order(), &g.series_term(2).members()),
        times,
    );
    let projected = evolve_many(&ab, &point_mass(ab.len(), 0), times);
    Ok(times
        .iter()
        .zip(lifted.iter().zip(&projected))
        .map(|(&t, (a, b))| ProjectionCheck {
            t,
            lifted: tv_to_uniform(a),
            projected: tv_to_uniform(b),
        })
        .collect())
}

/// `t_rel^{G_ab} <= t_rel^G <= max(t_rel^{G_ab}, |S| Diam_S(G_2)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxationSandwich {
    pub t_rel_g: f64,
    pub t_rel_gab: f64,
    pub commutator_scale: f64,
}

impl RelaxationSandwich {
    pub fn compute(g: &GroupTable, s: &GeneratorSet, mode: RelaxMode) -> Result<Self> {
        let t_rel_g = relaxation_time(&WalkSpace::group(g, s)?, mode)?.t_rel;
        let t_rel_gab = if g.step() == 1 {
            t_rel_g
        } else {
            relaxation_time(&WalkSpace::abelianization(g, s)?, mode)?.t_rel
        };
        Ok(RelaxationSandwich {
            t_rel_g,
            t_rel_gab,
            commutator_scale: commutator_scale(g, s)?,
        })
    }

    pub fn upper(&self) -> f64 {
        self.t_rel_gab.max(self.commutator_scale)
    }

    /// Both inequalities, and equality when the maximum is `t_rel^{G_ab}`,
    /// up to `tol` relative to the larger side.
    pub fn holds(&self, tol: f64) -> bool {
        let slack = |x: f64| tol * x.abs().max(1.0);
        let lower = self.t_rel_gab <= self.t_rel_g + slack(self.t_rel_g);
        let upper = self.t_rel_g <= self.upper() + slack(self.upper());
        let eq = self.commutator_scale > self.t_rel_gab
            || (self.t_rel_g - self.t_rel_gab).abs() <= slack(self.t_rel_g);
        lower && upper && eq
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub t: f64,
    pub d_g: f64,
    pub d_gab: f64,
    pub gap: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingCurve {
    pub rows: Vec<CurveRow>,
    pub t_mix: Vec<(f64, f64)>,
    pub t_mix_ab: Vec<(f64, f64)>,
    pub t_rel: f64,
    pub t_rel_ab: f64,
}

impl MixingCurve {
    pub const HEADER: [&'static str; 5] = ["t", "d_G", "d_Gab", "gap", "bound"];

    /// `d_G(t)` is non-increasing along the grid (up to rounding).
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].d_g <= w[0].d_g + 1e-12)
    }
}

/// Distances on `G` and `G_ab` over `times`, the reduction gap and its bound,
/// mixing times for each `eps` and both relaxation times.
pub fn mixing_curve(
    g: &GroupTable,
    s: &GeneratorSet,
    times: &[f64],
    eps: &[f64],
) -> Result<MixingCurve> {
    let space = WalkSpace::group(g, s)?;
    let ab = WalkSpace::abelianization(g, s)?;
    let id = point_mass(g.order(), 0);
    let id_ab = point_mass(ab.len(), 0);
    let d_g = evolve_many(&space, &id, times);
    let d_gab = evolve_many(&ab, &id_ab, times);
    let gaps = reduction_gap(g, s, times)?;
    let rows = times
        .iter()
        .enumerate()
        .map(|(i, &t)| CurveRow {
            t,
            d_g: tv_to_uniform(&d_g[i]),
            d_gab: tv_to_uniform(&d_gab[i]),
            gap: gaps[i].lhs,
            bound: gaps[i].bound,
        })
        .collect();
    let t_mix = eps
        .iter()
        .map(|&e| Ok((e, mixing_time(&space, &id, e)?)))
        .collect::<Result<Vec<_>>>()?;
    let t_mix_ab = eps
        .iter()
        .map(|&e| Ok((e, mixing_time(&ab, &id_ab, e)?)))
        .collect::<Result<Vec<_>>>()?;
    let t_rel = relaxation_time(&space, RelaxMode::Auto)?.t_rel;
    let t_rel_ab = if ab.len() < 2 {
        0.0
    } else {
        relaxation_time(&ab, RelaxMode::Auto)?.t_rel
    };
    Ok(MixingCurve {
        rows,
        t_mix,
        t_mix_ab,
        t_rel,
        t_rel_ab,
    })
}
