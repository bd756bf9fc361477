use std::io::Write;

use nalgebra::DMatrix;

use crate::chain::contact::ContactMatrix;
use crate::error::{Error, Result};

const ROW_TOL: f64 = 1e-10;

/// Reversible stochastic matrix with its stationary distribution.
///
/// Gossip-derived matrices are symmetric with uniform `pi`; induced chains
/// are reversible with respect to a non-uniform `pi`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    w: DMatrix<f64>,
    pi: Vec<f64>,
    stderr: Option<DMatrix<f64>>,
}

impl TransitionMatrix {
    /// Checks non-negativity, unit row sums, a valid `pi` and detailed balance.
    pub fn new(w: DMatrix<f64>, pi: Vec<f64>) -> Result<Self> {
        let n = w.nrows();
        if n == 0 || w.ncols() != n || pi.len() != n {
            return Err(Error::InvalidInput("matrix must be square and match pi".into()));
        }
        if let Some(x) = w.iter().find(|x| !(**x >= 0.0)) {
            return Err(Error::InvalidInput(format!("negative or NaN entry {x}")));
        }
        if pi.iter().any(|p| !(*p > 0.0)) || (pi.iter().sum::<f64>() - 1.0).abs() > ROW_TOL {
            return Err(Error::InvalidInput("pi must be a positive distribution".into()));
        }
        for k in 0..n {
            let s: f64 = w.row(k).iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidInput(format!("row {k} sums to {s}")));
            }
            for l in 0..k {
                let (a, b) = (pi[k] * w[(k, l)], pi[l] * w[(l, k)]);
                if (a - b).abs() > 1e-9 * (a + b) + 1e-15 {
                    return Err(Error::InvalidInput(format!(
                        "detailed balance fails between {k} and {l}"
                    )));
                }
            }
        }
        Ok(Self { w, pi, stderr: None })
    }

    /// Symmetric doubly stochastic matrix with uniform `pi`.
    pub fn uniform(w: DMatrix<f64>) -> Result<Self> {
        let n = w.nrows();
        Self::new(w, vec![1.0 / n as f64; n])
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let w = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::uniform(w)
    }

    pub fn size(&self) -> usize {
        self.pi.len()
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.w[(k, l)]
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Per-entry standard error for Monte Carlo estimates.
    pub fn stderr(&self) -> Option<&DMatrix<f64>> {
        self.stderr.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.stderr.is_none()
    }

    pub fn symmetry_error(&self) -> f64 {
        (&self.w - self.w.transpose()).amax()
    }

    pub fn row_sum_error(&self) -> f64 {
        self.w
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max |(pi^T W - pi^T)_l|`.
    pub fn stationarity_error(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|l| ((0..n).map(|k| self.pi[k] * self.w[(k, l)]).sum::<f64>() - self.pi[l]).abs())
            .fold(0.0, f64::max)
    }

    /// Dense CSV, one row per line, no header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for row in self.w.row_iter() {
            wr.write_record(row.iter().map(|x| format!("{x:e}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Coordinate list `row col value` of the nonzero entries.
    pub fn write_coo<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# rows={} cols={}", self.size(), self.size())?;
        for k in 0..self.size() {
            for l in 0..self.size() {
                let x = self.w[(k, l)];
                if x != 0.0 {
                    writeln!(out, "{k} {l} {x:e}")?;
                }
            }
        }
        Ok(())
    }
}

/// `W̄_ij = (P_ij + P_ji) / 2` off the diagonal, `W̄_ii = 1 - sum_{j != i} W̄_ij`.
pub fn expected_matrix(p: &ContactMatrix) -> Result<TransitionMatrix> {
    let n = p.n();
    let mut w = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 0.5 * (p.get(i, j) + p.get(j, i)) });
    for i in 0..n {
        let off: f64 = w.row(i).iter().sum();
        let d = 1.0 - off;
        if d < -1e-12 {
            return Err(Error::InvalidInput(format!("diagonal entry {i} would be {d}")));
        }
        w[(i, i)] = d.max(0.0);
    }
    let mut out = TransitionMatrix::uniform(w)?;
    if !p.is_exact() {
        // the average of two errors never exceeds their mean
        out.stderr = Some(DMatrix::from_fn(n, n, |i, j| 0.5 * (p.stderr(i, j) + p.stderr(j, i))));
    }
    Ok(out)
}
