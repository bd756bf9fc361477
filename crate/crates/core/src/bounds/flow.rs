//! Canonical-path flows and the Poincare bound `T_relax <= rho(F) l(F)`.

use std::fmt;
use std::io::Write;

use crate::chain::matrix::TransitionMatrix;
use crate::chain::spectral::relaxation_time;
use crate::error::{Error, Result};

/// Demand tolerance per ordered pair.
pub const DEMAND_TOL: f64 = 1e-12;

/// Paths stored back to back, each with the amount of flow it carries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Flow {
    offsets: Vec<usize>,
    nodes: Vec<usize>,
    values: Vec<f64>,
}

impl Flow {
    pub fn new() -> Self {
        Self { offsets: vec![0], nodes: Vec::new(), values: Vec::new() }
    }

    pub fn push(&mut self, path: &[usize], value: f64) {
        self.nodes.extend_from_slice(path);
        self.offsets.push(self.nodes.len());
        self.values.push(value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn path(&self, k: usize) -> &[usize] {
        &self.nodes[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn paths(&self) -> impl Iterator<Item = (&[usize], f64)> {
        (0..self.len()).map(|k| (self.path(k), self.values[k]))
    }

    /// One-edge path for every ordered pair, carrying `pi_i pi_j`.
    pub fn direct(pi: &[f64]) -> Self {
        let mut f = Self::new();
        for i in 0..pi.len() {
            for j in 0..pi.len() {
                if i != j {
                    f.push(&[i, j], pi[i] * pi[j]);
                }
            }
        }
        f
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeLoad {
    pub from: usize,
    pub to: usize,
    pub load: f64,
    pub capacity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowBound {
    /// `max_e f(e) / C(e)`.
    pub rho: f64,
    /// Longest flow-carrying path, in edges.
    pub length: usize,
    pub bound: f64,
    /// Edge attaining `rho`.
    pub bottleneck: (usize, usize),
    /// Bound with capacities lowered by four standard errors; infinite when
    /// some band reaches zero.
    pub pessimistic_bound: Option<f64>,
    /// Edges whose capacity band crosses zero.
    pub uncertain_edges: Vec<(usize, usize)>,
    pub edges: Vec<EdgeLoad>,
}

impl FlowBound {
    pub fn write_edge_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(out);
        wr.write_record(["from", "to", "load", "capacity", "load_over_capacity"])?;
        for e in &self.edges {
            wr.write_record([
                e.from.to_string(),
                e.to.to_string(),
                format!("{:e}", e.load),
                format!("{:e}", e.capacity),
                format!("{:e}", e.load / e.capacity),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Checks the flow against `w` and returns `rho`, `l` and `rho * l`.
pub fn verify_flow(flow: &Flow, w: &TransitionMatrix) -> Result<FlowBound> {
    let n = w.size();
    let pi = w.pi();
    let mut routed = vec![0.0; n * n];
    let mut load = vec![0.0; n * n];
    let mut length = 0;
    let mut seen = vec![usize::MAX; n];
    for (k, (path, value)) in flow.paths().enumerate() {
        if path.len() < 2 || path.iter().any(|&v| v >= n) {
            return Err(Error::InvalidFlow { reason: format!("path {k} is malformed"), pair: None });
        }
        if !(value >= 0.0) {
            return Err(Error::InvalidFlow { reason: format!("path {k} carries {value}"), pair: None });
        }
        for &v in path {
            if seen[v] == k {
                return Err(Error::InvalidFlow {
                    reason: format!("path {k} is not simple"),
                    pair: Some((path[0], *path.last().unwrap())),
                });
            }
            seen[v] = k;
        }
        let (s, t) = (path[0], path[path.len() - 1]);
        routed[s * n + t] += value;
        if value > 0.0 {
            length = length.max(path.len() - 1);
            for e in path.windows(2) {
                load[e[0] * n + e[1]] += value;
            }
        }
    }

    let mut worst: Option<((usize, usize), f64)> = None;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let miss = (routed[i * n + j] - pi[i] * pi[j]).abs();
            if miss > DEMAND_TOL && worst.is_none_or(|(_, m)| miss > m) {
                worst = Some(((i, j), miss));
            }
        }
    }
    if let Some((pair, miss)) = worst {
        return Err(Error::InvalidFlow {
            reason: format!("demand of {pair:?} missed by {miss:e}"),
            pair: Some(pair),
        });
    }

    let stderr = w.stderr();
    let mut rho = 0.0;
    let mut bottleneck = (0, 0);
    let mut pessimistic = stderr.map(|_| 0.0f64);
    let mut uncertain = Vec::new();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let f = load[i * n + j];
            if f == 0.0 {
                continue;
            }
            let c = pi[i] * w.get(i, j);
            if !(c > 0.0) || i == j {
                return Err(Error::InvalidFlow {
                    reason: format!("edge ({i}, {j}) has no capacity"),
                    pair: Some((i, j)),
                });
            }
            let r = f / c;
            if r > rho {
                rho = r;
                bottleneck = (i, j);
            }
            if let (Some(se), Some(p)) = (stderr, pessimistic.as_mut()) {
                let lo = c - 4.0 * pi[i] * se[(i, j)];
                if lo <= 0.0 {
                    uncertain.push((i, j));
                    *p = f64::INFINITY;
                } else {
                    *p = p.max(f / lo);
                }
            }
            edges.push(EdgeLoad { from: i, to: j, load: f, capacity: c });
        }
    }
    Ok(FlowBound {
        rho,
        length,
        bound: rho * length as f64,
        bottleneck,
        pessimistic_bound: pessimistic.map(|p| p * length as f64),
        uncertain_edges: uncertain,
        edges,
    })
}

/// Flow bound together with the relaxation time it should dominate.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub flow: FlowBound,
    pub t_relax: f64,
}

impl Certificate {
    /// Poincare inequality holds, up to a relative `1e-9`.
    pub fn holds(&self) -> bool {
        self.flow.bound >= self.t_relax * (1.0 - 1e-9)
    }
}

pub fn certify(flow: &Flow, w: &TransitionMatrix) -> Result<Certificate> {
    Ok(Certificate { flow: verify_flow(flow, w)?, t_relax: relaxation_time(w)? })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMethod {
    MergeLower,
    RayleighLower,
    FlowUpper,
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundMethod::MergeLower => "merge-lower",
            BoundMethod::RayleighLower => "rayleigh-lower",
            BoundMethod::FlowUpper => "flow-upper",
        })
    }
}

/// One certified bound in `key=value` form.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub instance: String,
    pub method: BoundMethod,
    pub value: f64,
    pub error_band: f64,
    pub extra: Vec<(String, String)>,
}

impl BoundReport {
    pub fn new(instance: impl Into<String>, method: BoundMethod, value: f64, error_band: f64) -> Self {
        Self { instance: instance.into(), method, value, error_band, extra: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.extra.push((key.to_string(), value.to_string()));
        self
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance={}", self.instance)?;
        writeln!(f, "method={}", self.method)?;
        writeln!(f, "value={:.15e}", self.value)?;
        writeln!(f, "error_band={:e}", self.error_band)?;
        for (k, v) in &self.extra {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
