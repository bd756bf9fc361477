//! Lower bounds from induced chains, upper bounds from canonical-path flows.

pub mod circulant;
pub mod constructors;
pub mod flow;
pub mod merge;

pub use circulant::circulant_eigenvalues;
pub use constructors::{bidirectional_flow, direct_flow, hub_flow, l_shaped_flow, torus_plus_m_flow};
pub use flow::{certify, verify_flow, BoundMethod, BoundReport, Flow, FlowBound};
pub use merge::{induce_chain, lower_bound_via_merge, mobility_merge_map, MergeMap, Partition};
