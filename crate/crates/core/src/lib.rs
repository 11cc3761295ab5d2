//! Ramsey multiplicity toolkit: homomorphism densities on step graphons,
//! uncommonness witnesses, and certified lower bounds for graphs built from
//! triangles and edges.

pub mod bound;
pub mod commonality;
pub mod correlation;
pub mod density;
pub mod error;
pub mod graphon;
pub mod graph;
pub mod interval;
pub mod k3tree;
pub mod poly;
pub mod rat;
pub mod real;
pub mod reduction;
pub mod repro;

pub use error::{Error, Result};
pub use density::{density, mono_density, Density, Mode};
pub use graph::Graph;
pub use graphon::StepGraphon;
