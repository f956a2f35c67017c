//! Exact evolution of the continuous-time walk, total-variation curves,
//! mixing and relaxation times, and comparisons with the projected walk on
//! the abelianization.

mod reduction;
mod spectral;
mod walk;

pub use reduction::{
    commutator_scale, mixing_curve, projected_start_identity_check, reduction_gap, CurveRow,
    MixingCurve, ProjectionCheck, ReductionGap, RelaxationSandwich,
};
pub use spectral::{
    relaxation_time, relaxation_time_with, RelaxMode, Relaxation, DENSE_CAP, RESIDUAL_TOL,
};
pub use walk::{
    evolve, evolve_many, mixing_time, point_mass, tv_at, tv_between, tv_to_uniform, uniform,
    uniform_on, WalkSpace, POISSON_TOL,
};
