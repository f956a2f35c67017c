//! Enumerated finite nilpotent groups: exact arithmetic, the lower central
//! series, quotients by its terms, and uniform sampling through the layer
//! transversals.

mod io;
mod sample;
mod series;
mod spec;
mod table;

pub use io::{read_table, write_table, GroupSummary, FORMAT_VERSION, MAGIC};
pub use sample::{uniform_elements, uniform_layered_sample, LayeredSample};
pub use series::{abelian_invariants, CosetPartition, Layer, QuotientView, Subgroup};
pub use spec::GroupSpec;
pub use table::{Element, FiniteGroup, GroupTable, DEFAULT_CAP};

pub(crate) use series::prime_factors;
