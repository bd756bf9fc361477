//! Rayleigh-quotient lower bound for a static torus with m mobile agents
//! merged into one central node, using a column tent test function.

use mobgossip::chain::{central_node_test_function, relaxation_time};

fn main() -> mobgossip::Result<()> {
    let side = 12;
    println!("{:>3} {:>12} {:>12} {:>10}", "m", "bound", "T_relax", "bound*m/n^2");
    for m in [1, 2, 4, 8] {
        let b = central_node_test_function(side, m)?;
        let t = relaxation_time(&b.chain)?;
        println!("{m:>3} {:>12.1} {:>12.1} {:>10.4}", b.bound, t, b.normalised);
    }
    Ok(())
}
