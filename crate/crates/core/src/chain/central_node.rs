//! Test function for the torus with a central node.
//!
//! The static torus plus `m` fully mobile agents, with the mobile agents
//! merged into one state `M`. The function is zero on `M` and constant on
//! each torus column, following a tent across the columns.

use crate::bounds::merge::{induce_chain, MergeMap};
use crate::chain::contact::{contact_probabilities, ContactMode};
use crate::chain::dirichlet::{center, dirichlet_form};
use crate::chain::matrix::{expected_matrix, TransitionMatrix};
use crate::error::{Error, Result};
use crate::mobility::MobilitySpec;
use crate::topology::build_torus;

#[derive(Clone, Debug)]
pub struct CentralNodeBound {
    /// Torus plus central node; state `side^2` is `M`.
    pub chain: TransitionMatrix,
    /// Centred test function on the states of `chain`.
    pub g: Vec<f64>,
    /// Constant subtracted to centre the tent profile.
    pub shift: f64,
    pub variance: f64,
    pub dirichlet: f64,
    /// `variance / dirichlet`, a lower bound on the relaxation time.
    pub bound: f64,
    /// `bound / (n^2 / m)`.
    pub normalised: f64,
}

/// Column values `min(c, side - c) - alpha` with `alpha = floor(side / 4)`:
/// `-alpha, ..., 0, ..., alpha, ..., -alpha + 1`.
pub fn tent_profile(side: usize) -> Vec<f64> {
    let alpha = (side / 4) as f64;
    (0..side).map(|c| c.min(side - c) as f64 - alpha).collect()
}

/// Torus plus `m` mobile agents merged into the central node.
pub fn torus_plus_central_chain(side: usize, m: usize) -> Result<TransitionMatrix> {
    let t = build_torus(side)?;
    let a = MobilitySpec::PlusMobile(m).build(t, &t.all_sites(), 0)?;
    let w = expected_matrix(&contact_probabilities(&a, ContactMode::Exact, 0)?)?;
    let n = side * side;
    let group: Vec<usize> = (n..n + m).collect();
    induce_chain(&w, &MergeMap::merge_group(n + m, &group)?)
}

pub fn central_node_test_function(side: usize, m: usize) -> Result<CentralNodeBound> {
    if side < 8 {
        return Err(Error::InvalidParameter(format!("side {side} < 8 leaves the tent degenerate")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("the central node needs m >= 1".into()));
    }
    let chain = torus_plus_central_chain(side, m)?;
    let n = side * side;
    let tent = tent_profile(side);
    let mut g: Vec<f64> = (0..n).map(|s| tent[s % side]).collect();
    g.push(0.0);
    let shift = center(chain.pi(), &mut g);
    let variance: f64 = chain.pi().iter().zip(&g).map(|(p, x)| p * x * x).sum();
    let dirichlet = dirichlet_form(&chain, &g);
    let bound = variance / dirichlet;
    Ok(CentralNodeBound {
        chain,
        g,
        shift,
        variance,
        dirichlet,
        bound,
        normalised: bound * m as f64 / (n * n) as f64,
    })
}
