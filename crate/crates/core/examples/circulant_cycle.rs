//! Closed-form spectra of circulant chains compared with a dense eigensolve.

use mobgossip::bounds::circulant::{circulant_lambda2, circulant_matrix, cycle_generator};
use mobgossip::chain::{second_eigenvalue, TransitionMatrix};

fn main() -> mobgossip::Result<()> {
    let alpha = 0.25;
    for k in [8, 16, 32, 64] {
        let g = cycle_generator(k, alpha);
        let dft = circulant_lambda2(&g)?;
        let dense = second_eigenvalue(&TransitionMatrix::uniform(circulant_matrix(&g))?)?;
        let closed = 1.0 - 2.0 * alpha + 2.0 * alpha * (2.0 * std::f64::consts::PI / k as f64).cos();
        println!("k={k:>3}  dft {dft:.12}  dense {dense:.12}  closed form {closed:.12}");
    }
    Ok(())
}
