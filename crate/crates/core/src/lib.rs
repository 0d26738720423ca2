//! Random block-model hosts for `D`-degenerate `r`-uniform hypergraphs, the
//! greedy degeneracy-ordered embedding into them, and exact oracles for
//! checking both at small sizes.

pub mod embed;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod hypergraph;
pub mod link_index;
pub mod model;
pub mod oracle;
pub mod seeds;

pub use error::{Error, Result};
pub use hypergraph::{Hypergraph, LinkSet, Vertex};
