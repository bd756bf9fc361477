//! Log-log slope of the relaxation time against the number of agents.

use mobgossip::harness::{fit_scaling, Quantity, ScalingInstance};
use mobgossip::mobility::MobilitySpec;
use mobgossip::topology::build_torus;

fn main() -> mobgossip::Result<()> {
    for spec in [MobilitySpec::Static, MobilitySpec::Full, MobilitySpec::Local(1)] {
        let instances = [4, 6, 8, 10, 12]
            .into_iter()
            .map(|s| {
                let t = build_torus(s)?;
                let a = spec.build(t, &t.all_sites(), 0)?;
                Ok(ScalingInstance { size: a.len() as f64, assignment: a })
            })
            .collect::<mobgossip::Result<Vec<_>>>()?;
        let fit = fit_scaling(&instances, Quantity::TRelax)?;
        println!("{spec:<10} slope {:.3}  95% CI [{:.3}, {:.3}]", fit.slope, fit.ci.0, fit.ci.1);
    }
    Ok(())
}
