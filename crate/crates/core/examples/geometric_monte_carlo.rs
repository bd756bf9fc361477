//! Random geometric graph on the unit torus: sub-square occupancy, and the
//! expected matrix under bidirectional mobility estimated by Monte Carlo.

use mobgossip::chain::{contact_probabilities, expected_matrix, spectrum, ContactMode};
use mobgossip::mobility::MobilitySpec;
use mobgossip::topology::{build_rgg, rgg_square_side, subsquare_partition};

fn main() -> mobgossip::Result<()> {
    let (n, c1) = (100, 2.0);
    let (topology, homes) = build_rgg(n, c1, 11)?;
    let parts = subsquare_partition(&topology, rgg_square_side(n, c1), &homes)?;
    println!(
        "{} sub-squares, {}..={} agents each",
        parts.square_count(),
        parts.min_count(),
        parts.max_count()
    );

    let a = MobilitySpec::Bidirectional.build(topology, &homes, 11)?;
    let p = contact_probabilities(&a, ContactMode::MonteCarlo { samples: 10_000 }, 5)?;
    let w = expected_matrix(&p)?;
    let s = spectrum(&w)?;
    println!("T_relax ~ {:.1}, largest entry stderr {:.2e}", s.relaxation_time(), p.max_stderr());
    Ok(())
}
