//! Built-in canonical-path flows and their Poincare certificates.

use std::io;

use mobgossip::bounds::{
    bidirectional_flow, certify, direct_flow, hub_flow, l_shaped_flow, torus_plus_m_flow, Flow,
};
use mobgossip::chain::{contact_probabilities, expected_matrix, ContactMode};
use mobgossip::mobility::{MobilityAssignment, MobilitySpec};
use mobgossip::topology::{build_cycle, build_torus, Topology};

fn show(name: &str, a: &MobilityAssignment, f: &Flow) -> mobgossip::Result<()> {
    let w = expected_matrix(&contact_probabilities(a, ContactMode::Exact, 0)?)?;
    let c = certify(f, &w)?;
    println!(
        "{name:<28} rho={:<12.4} l={} bound={:<12.1} T_relax={:<10.1} holds={}",
        c.flow.rho,
        c.flow.length,
        c.flow.bound,
        c.t_relax,
        c.holds()
    );
    Ok(())
}

fn build(t: Topology, spec: MobilitySpec) -> mobgossip::Result<MobilityAssignment> {
    spec.build(t, &t.all_sites(), 3)
}

fn main() -> mobgossip::Result<()> {
    let torus = build_torus(8)?;
    let a = build(torus, MobilitySpec::Full)?;
    show("full mobility, direct", &a, &direct_flow(&a)?)?;

    let cycle = build_cycle(16)?;
    let a = build(cycle, MobilitySpec::PlusMobile(1))?;
    show("cycle 16 + hub", &a, &hub_flow(&a)?)?;

    let a = build(torus, MobilitySpec::PlusMobile(4))?;
    show("torus 8 + 4 mobile", &a, &torus_plus_m_flow(&a)?)?;

    let a = build(torus, MobilitySpec::Local(2))?;
    show("local m=2, L-shaped", &a, &l_shaped_flow(&a)?)?;

    let a = build(torus, MobilitySpec::Bidirectional)?;
    let f = bidirectional_flow(&a)?;
    show("bidirectional relay", &a, &f)?;

    // per-edge congestion of the last flow, first rows only
    let w = expected_matrix(&contact_probabilities(&a, ContactMode::Exact, 0)?)?;
    let mut c = certify(&f, &w)?;
    c.flow.edges.truncate(5);
    c.flow.write_edge_csv(io::stdout())?;
    Ok(())
}
