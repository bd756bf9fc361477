//! Relaxation time of the expected averaging matrix under each mobility model.

use mobgossip::chain::{contact_probabilities, expected_matrix, spectrum, ContactMode};
use mobgossip::mobility::MobilitySpec;
use mobgossip::topology::build_torus;

fn main() -> mobgossip::Result<()> {
    let torus = build_torus(10)?;
    let models = [
        MobilitySpec::Static,
        MobilitySpec::Horizontal,
        MobilitySpec::Bidirectional,
        MobilitySpec::Local(2),
        MobilitySpec::PlusMobile(4),
        MobilitySpec::Full,
    ];
    println!("{:<16} {:>12} {:>12}", "mobility", "lambda2", "T_relax");
    for spec in models {
        let a = spec.build(torus, &torus.all_sites(), 7)?;
        let w = expected_matrix(&contact_probabilities(&a, ContactMode::Exact, 0)?)?;
        let s = spectrum(&w)?;
        println!("{:<16} {:>12.8} {:>12.1}", spec.to_string(), s.lambda2, s.relaxation_time());
    }
    Ok(())
}
