//! Random walks on Cayley graphs of finite nilpotent groups.
//!
//! The crate enumerates small nilpotent groups (unitriangular, Heisenberg,
//! abelian and products thereof), computes their lower central series, and
//! provides exact and Monte Carlo tools for studying random walks on their
//! Cayley graphs: diameters of the series layers, exact continuous-time
//! distributions and mixing/relaxation times, entropic times of the
//! auxiliary walk on `Z^k`, the commutator-collection form of walk words,
//! and random-generator ensembles.

pub mod cli;
pub mod collect;
pub mod entropic;
pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod group;
pub mod mixing;
pub mod report;

pub use error::{Error, Result};
