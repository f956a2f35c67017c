//! Entropy of the rate-1 walk on `Z^k`, the entropic and cutoff times, and
//! the typical events used in the upper bound.

mod law;
mod params;

pub use law::{
    coord_law, coord_law_with_tail, entropic_time, entropic_time_with_tail,
    gaussian_approximation, walk_entropy, walk_entropy_with_tail, CoordLaw, EntropicSolution,
    COORD_TAIL,
};
pub use params::{
    cutoff_time, EntropicParams, Regime, TypicalFlags, TypicalSpec, Typicality,
    DEFAULT_ONCE_EPS, HIGH_KAPPA, LOW_KAPPA,
};
