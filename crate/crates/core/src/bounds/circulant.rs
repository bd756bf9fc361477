//! Spectra of real symmetric circulant matrices.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `lambda_j = sum_m c_m cos(2 pi j m / k)` for `j = 0..k`.
///
/// Exact when the generator is symmetric (`c_m = c_{k-m}`); otherwise this is
/// the real part of the DFT.
pub fn circulant_eigenvalues(generator: &[f64]) -> Result<Vec<f64>> {
    let k = generator.len();
    if k < 2 {
        return Err(Error::InvalidParameter("circulant generator needs length >= 2".into()));
    }
    Ok((0..k)
        .map(|j| {
            generator
                .iter()
                .enumerate()
                .map(|(m, c)| c * (2.0 * PI * ((j * m) % k) as f64 / k as f64).cos())
                .sum()
        })
        .collect())
}

/// Row `r` is the generator rotated right by `r`.
pub fn circulant_matrix(generator: &[f64]) -> DMatrix<f64> {
    let k = generator.len();
    DMatrix::from_fn(k, k, |r, c| generator[(c + k - r) % k])
}

/// Lazy cycle walk: stay `1 - 2 alpha`, move to each neighbour w.p. `alpha`.
pub fn cycle_generator(k: usize, alpha: f64) -> Vec<f64> {
    let mut c = vec![0.0; k];
    c[0] = 1.0 - 2.0 * alpha;
    c[1] += alpha;
    c[k - 1] += alpha;
    c
}

/// `beta` on the `reach` nearest neighbours on each side, the rest on the diagonal.
pub fn banded_generator(k: usize, reach: usize, beta: f64) -> Vec<f64> {
    let mut c = vec![0.0; k];
    c[0] = 1.0 - 2.0 * reach as f64 * beta;
    for d in 1..=reach {
        c[d] += beta;
        c[k - d] += beta;
    }
    c
}

/// Second largest eigenvalue of a symmetric circulant.
pub fn circulant_lambda2(generator: &[f64]) -> Result<f64> {
    let mut ev = circulant_eigenvalues(generator)?;
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn four_cycle_quarter() {
        let ev = circulant_eigenvalues(&cycle_generator(4, 0.25)).unwrap();
        for (got, want) in ev.iter().zip([1.0, 0.5, 0.0, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_rate_is_identity() {
        let ev = circulant_eigenvalues(&cycle_generator(7, 0.0)).unwrap();
        assert!(ev.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn cycle_closed_form() {
        let (k, a) = (10, 0.2);
        let l2 = circulant_lambda2(&cycle_generator(k, a)).unwrap();
        let want = 1.0 - 2.0 * a + 2.0 * a * (2.0 * PI / k as f64).cos();
        assert_abs_diff_eq!(l2, want, epsilon = 1e-15);
    }

    #[test]
    fn banded_matches_dense() {
        let g = banded_generator(32, 2, 1e-3);
        let m = circulant_matrix(&g);
        let mut dense: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        dense.sort_by(|a, b| b.total_cmp(a));
        assert_abs_diff_eq!(circulant_lambda2(&g).unwrap(), dense[1], epsilon = 1e-12);
    }

    #[test]
    fn matrix_layout() {
        let m = circulant_matrix(&[1.0, 2.0, 3.0]);
        assert_eq!(m.row(1).iter().copied().collect::<Vec<_>>(), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn short_generator_rejected() {
        assert!(circulant_eigenvalues(&[1.0]).is_err());
    }
}
