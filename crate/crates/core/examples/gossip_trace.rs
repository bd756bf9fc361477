//! Error decay of gossip on an 8x8 torus, static agents against fully mobile ones.

use mobgossip::gossip::{estimate_ave_time, run_trials, GossipConfig, TraceSummary};
use mobgossip::mobility::MobilitySpec;
use mobgossip::topology::build_torus;

fn main() -> mobgossip::Result<()> {
    let torus = build_torus(8)?;
    for spec in [MobilitySpec::Static, MobilitySpec::Full] {
        let assignment = spec.build(torus, &torus.all_sites(), 1)?;
        let mut config = GossipConfig::new(assignment, 6000);
        config.trials = 50;
        let summary = TraceSummary::from_traces(&run_trials(&config)?);
        let est = estimate_ave_time(&config)?;
        println!("{spec}: T_ave(0.01) ~ {} ticks, 95% CI {:?}", est.ticks, est.ci);
        for t in (0..=6000).step_by(1000) {
            println!("  t={t:>5}  median error {:.3e}", summary.q50[t]);
        }
    }
    Ok(())
}
