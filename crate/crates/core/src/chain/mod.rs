//! Expected averaging matrix, its spectrum, and Rayleigh-quotient bounds.

pub mod central_node;
pub mod contact;
pub mod dirichlet;
pub mod matrix;
pub mod spectral;

pub use central_node::{central_node_test_function, torus_plus_central_chain, CentralNodeBound};
pub use contact::{contact_probabilities, ContactMatrix, ContactMode};
pub use dirichlet::{dirichlet_form, rayleigh_lower_bound};
pub use matrix::{expected_matrix, TransitionMatrix};
pub use spectral::{relaxation_time, second_eigenvalue, spectrum, Spectrum};
