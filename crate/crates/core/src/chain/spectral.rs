//! Second eigenvalue and relaxation time of reversible chains.
//!
//! The dense path diagonalises the symmetrised generator
//! `Pi^(1/2) (I - W) Pi^(-1/2)` rather than `W` itself, so the spectral gap is
//! obtained directly and keeps its relative accuracy when `lambda_2` is close
//! to 1.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::matrix::TransitionMatrix;
use crate::error::{Error, Result};

/// Largest size handled by the dense eigensolver.
pub const DENSE_LIMIT: usize = 2000;
pub const POWER_MAX_ITERATIONS: usize = 100_000;
pub const POWER_TOLERANCE: f64 = 1e-12;
const DISCONNECTED_GAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralMethod {
    Dense,
    PowerIteration { iterations: usize, converged: bool },
}

impl fmt::Display for SpectralMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralMethod::Dense => write!(f, "dense"),
            SpectralMethod::PowerIteration { .. } => write!(f, "power-iteration"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub lambda2: f64,
    /// Spectral gap `1 - lambda2`.
    pub gap: f64,
    /// Smallest eigenvalue; dense path only.
    pub lambda_min: Option<f64>,
    /// Eigenfunction of `lambda2` on states, `pi`-orthogonal to constants.
    pub eigenfunction: Vec<f64>,
    pub method: SpectralMethod,
    pub tolerance: f64,
}

impl Spectrum {
    pub fn relaxation_time(&self) -> f64 {
        1.0 / self.gap
    }

    /// `key=value` lines.
    pub fn report(&self) -> String {
        let mut s = format!(
            "lambda2={:.15e}\nt_relax={:.15e}\ngap={:.15e}\nmethod={}\ntolerance={:e}\n",
            self.lambda2,
            self.relaxation_time(),
            self.gap,
            self.method,
            self.tolerance
        );
        if let Some(l) = self.lambda_min {
            s.push_str(&format!("lambda_min={l:.15e}\n"));
        }
        if let SpectralMethod::PowerIteration { iterations, converged } = self.method {
            s.push_str(&format!("iterations={iterations}\nconverged={converged}\n"));
        }
        s
    }
}

/// Dense below [`DENSE_LIMIT`] states, power iteration above.
pub fn spectrum(w: &TransitionMatrix) -> Result<Spectrum> {
    if w.size() <= DENSE_LIMIT {
        dense_spectrum(w)
    } else {
        power_spectrum(w, POWER_MAX_ITERATIONS, POWER_TOLERANCE)
    }
}

pub fn second_eigenvalue(w: &TransitionMatrix) -> Result<f64> {
    spectrum(w).map(|s| s.lambda2)
}

/// `1 / (1 - lambda2)`.
pub fn relaxation_time(w: &TransitionMatrix) -> Result<f64> {
    spectrum(w).map(|s| s.relaxation_time())
}

fn check_size(w: &TransitionMatrix) -> Result<()> {
    if w.size() < 2 {
        return Err(Error::InvalidInput("a one-state chain has no second eigenvalue".into()));
    }
    Ok(())
}

pub fn dense_spectrum(w: &TransitionMatrix) -> Result<Spectrum> {
    check_size(w)?;
    let n = w.size();
    let sq: Vec<f64> = w.pi().iter().map(|p| p.sqrt()).collect();
    let mut gen = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut off = 0.0;
        for l in 0..n {
            if l != k {
                let x = w.get(k, l);
                off += x;
                gen[(k, l)] = -0.5 * (sq[k] / sq[l] * x + sq[l] / sq[k] * w.get(l, k));
            }
        }
        gen[(k, k)] = off;
    }
    let eig = SymmetricEigen::new(gen);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let gap = eig.eigenvalues[order[1]];
    let lambda2 = 1.0 - gap;
    if gap <= DISCONNECTED_GAP {
        return Err(Error::DisconnectedChain { lambda2 });
    }
    let v = eig.eigenvectors.column(order[1]);
    let eigenfunction = (0..n).map(|k| v[k] / sq[k]).collect();
    Ok(Spectrum {
        lambda2,
        gap,
        lambda_min: Some(1.0 - eig.eigenvalues[order[n - 1]]),
        eigenfunction,
        method: SpectralMethod::Dense,
        tolerance: f64::EPSILON * n as f64,
    })
}

/// Power iteration on `(I + S) / 2` restricted to the complement of
/// `sqrt(pi)`, where `S = Pi^(1/2) W Pi^(-1/2)`. The lazy shift maps the
/// spectrum into `[0, 1]` so the top eigenvalue of the deflated operator is
/// `(1 + lambda2) / 2` even for chains with negative eigenvalues.
pub fn power_spectrum(w: &TransitionMatrix, max_iter: usize, tol: f64) -> Result<Spectrum> {
    check_size(w)?;
    let n = w.size();
    let sq = DVector::from_iterator(n, w.pi().iter().map(|p| p.sqrt()));
    // sparse rows of S
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|k| {
            (0..n)
                .filter(|&l| w.get(k, l) != 0.0)
                .map(|l| (l, sq[k] / sq[l] * w.get(k, l)))
                .collect()
        })
        .collect();
    let apply = |y: &DVector<f64>| -> DVector<f64> {
        let mut z = DVector::from_iterator(
            n,
            rows.iter().map(|r| 0.5 * r.iter().map(|&(l, s)| s * y[l]).sum::<f64>()),
        );
        z.axpy(0.5, y, 1.0);
        let c = sq.dot(&z);
        z.axpy(-c, &sq, 1.0);
        z
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut y = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
    let c = sq.dot(&y);
    y.axpy(-c, &sq, 1.0);
    y.normalize_mut();
    let mut mu = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let z = apply(&y);
        let next = y.dot(&z);
        let norm = z.norm();
        if norm == 0.0 {
            mu = 0.0;
            converged = true;
            break;
        }
        y = z / norm;
        if (next - mu).abs() < tol * next.abs() {
            mu = next;
            converged = true;
            break;
        }
        mu = next;
    }
    if !converged {
        log::warn!("power iteration stopped after {iterations} iterations without converging");
    }
    let lambda2 = 2.0 * mu - 1.0;
    let gap = 1.0 - lambda2;
    if gap <= DISCONNECTED_GAP {
        return Err(Error::DisconnectedChain { lambda2 });
    }
    Ok(Spectrum {
        lambda2,
        gap,
        lambda_min: None,
        eigenfunction: (0..n).map(|k| y[k] / sq[k]).collect(),
        method: SpectralMethod::PowerIteration { iterations, converged },
        tolerance: tol,
    })
}
