//! Exact attribution and interaction analysis over the lattice of coalitions
//! of binary components: Shapley values and Harsanyi dividends, submodularity
//! audits, factorial regressions, a paired-statistics battery with bootstrap
//! intervals, and subset selection.

pub mod error;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod registry;
pub mod regress;
pub mod report;
pub mod select;
pub mod stats;
pub mod submod;

pub use error::{Error, ErrorClass, Result};
pub use lattice::{ComponentSet, CoalitionTable, Universe};
pub use matrix::TaskMatrix;
pub use registry::{Named, Registry};
