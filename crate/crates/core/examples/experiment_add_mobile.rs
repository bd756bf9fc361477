//! Runs a reduced add-mobile experiment and writes its CSV files to a temp dir.

use mobgossip::harness::{run_experiment, ExperimentName, ExperimentSpec};

fn main() -> mobgossip::Result<()> {
    let out = std::env::temp_dir().join("mobgossip-add-mobile");
    let mut spec = ExperimentSpec::new(ExperimentName::AddMobile, &out);
    spec.sizes = vec![8];
    spec.params = vec![0, 1, 2, 4];
    spec.trials = 20;
    spec.ticks = Some(4000);
    let result = run_experiment(&spec)?;
    for (k, v) in &result.metrics {
        println!("{k} = {v:.4}");
    }
    println!("files under {}", out.display());
    Ok(())
}
