//! The random block model `Γ(r, n, D)`: parameters, strata, sampling and
//! sampled hosts.

mod block_graph;
mod params;
mod sample;
mod strata;

pub use block_graph::BlockGraph;
pub use params::{compute_params, level_count, log2, split_block, ModelParams, Scaling};
pub use sample::{sample_edges, sample_model, sample_stratum, SampleCaps};
pub use strata::{
    binomial, closed_form_edge_bound, edge_probability, expected_edges, lower_bound_value, pattern_of, strata,
    stratum_cardinality, ExpectedEdges, Pattern,
};
