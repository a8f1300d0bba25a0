//! Point sets ("nets") presented as region oracles.
//!
//! A [`PointSource`] answers two questions about a bounded convex region:
//! which of its points lie inside, and how many. Lattices and jittered grids
//! are procedural and unbounded; only the cells near a query are generated.

mod enumerate;
pub mod io;
pub mod jitter;
mod oracle;
mod region;
mod source;

pub use enumerate::DEFAULT_CELL_BUDGET;
pub use oracle::{NetKind, NetOracle, NetSpec};
pub use region::{AlignedBox, Region};
pub use source::{PointSource, Scaled};
