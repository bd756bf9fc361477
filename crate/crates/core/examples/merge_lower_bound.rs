//! Lower bounds by merging states: rows for horizontal mobility, and a
//! comparison with the full relaxation time.

use mobgossip::bounds::{lower_bound_via_merge, Partition};
use mobgossip::chain::{contact_probabilities, expected_matrix, relaxation_time, ContactMode};
use mobgossip::mobility::MobilitySpec;
use mobgossip::topology::build_torus;

fn main() -> mobgossip::Result<()> {
    for side in [6, 8, 10, 12] {
        let torus = build_torus(side)?;
        let a = MobilitySpec::Horizontal.build(torus, &torus.all_sites(), 0)?;
        let merged = lower_bound_via_merge(&a, &Partition::Rows, ContactMode::Exact, 0)?;
        let full = relaxation_time(&expected_matrix(&contact_probabilities(&a, ContactMode::Exact, 0)?)?)?;
        println!(
            "side {side:>2}: {} classes, induced T_relax {:>9.1} <= T_relax {:>9.1}  (n^2 = {})",
            merged.classes,
            merged.t_relax,
            full,
            side.pow(4)
        );
    }
    Ok(())
}
