//! Contact probabilities `P_ij`: agent `i` is selected and picks `j`.
//!
//! Exact mode works for any lattice assignment with independent per-tick
//! positions. Given `i` at site `l`, the other agents fall in the closed
//! neighbourhood of `l` independently with probabilities `q_k(l)`, so with
//! `S` the number of agents other than `i` and `j` in contact,
//!
//! `P_ij = (1/N) sum_l mu_i(l) q_j(l) E[1 / (1 + S)]`
//!
//! and `E[1/(1+S)] = int_0^1 prod_k (1 - q_k + q_k x) dx`, a polynomial
//! integral that Gauss-Legendre quadrature evaluates exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mobility::MobilityAssignment;
use crate::topology::{Lattice, Location, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContactMode {
    Exact,
    MonteCarlo { samples: usize },
}

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: usize = 100_000;

const CHUNK: usize = 1024;
const BATCH: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct ContactMatrix {
    n: usize,
    p: Vec<f64>,
    stderr: Option<Vec<f64>>,
    mode: ContactMode,
}

impl ContactMatrix {
    /// Wraps a dense row-major matrix of exact probabilities.
    pub fn from_dense(n: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != n * n {
            return Err(Error::InvalidInput(format!("expected {} entries, got {}", n * n, p.len())));
        }
        if let Some(x) = p.iter().find(|x| !(**x >= 0.0)) {
            return Err(Error::InvalidInput(format!("negative or NaN contact probability {x}")));
        }
        let total: f64 = p.iter().sum();
        if total > 1.0 + 1e-10 {
            return Err(Error::InvalidInput(format!("contact probabilities sum to {total} > 1")));
        }
        Ok(Self { n, p, stderr: None, mode: ContactMode::Exact })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n + j]
    }

    /// Standard error of an entry, zero when exact.
    pub fn stderr(&self, i: usize, j: usize) -> f64 {
        self.stderr.as_ref().map_or(0.0, |s| s[i * self.n + j])
    }

    pub fn max_stderr(&self) -> f64 {
        self.stderr.as_ref().map_or(0.0, |s| s.iter().copied().fold(0.0, f64::max))
    }

    pub fn mode(&self) -> ContactMode {
        self.mode
    }

    pub fn is_exact(&self) -> bool {
        self.mode == ContactMode::Exact
    }

    /// Probability that a tick averages some pair.
    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }
}

/// Computes `P` for the assignment; `seed` drives Monte Carlo mode only.
pub fn contact_probabilities(
    assignment: &MobilityAssignment,
    mode: ContactMode,
    seed: u64,
) -> Result<ContactMatrix> {
    if !assignment.is_iid() {
        return Err(Error::UnsupportedMode(
            "the expected matrix needs positions drawn independently each tick".into(),
        ));
    }
    match mode {
        ContactMode::Exact => exact(assignment),
        ContactMode::MonteCarlo { samples } => monte_carlo(assignment, samples, seed),
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    let n = order as f64;
    for k in 1..=order {
        let mut x = (std::f64::consts::PI * (k as f64 - 0.25) / (n + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=order {
                let m = m as f64;
                let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(0.5 * (1.0 - x));
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

fn exact(assignment: &MobilityAssignment) -> Result<ContactMatrix> {
    let lattice = assignment.topology().as_lattice().ok_or_else(|| {
        Error::UnsupportedMode("exact contact probabilities need a lattice; use monte-carlo".into())
    })?;
    let n = assignment.len();
    let sites = lattice.site_count();
    let nbhd: Vec<Vec<usize>> = (0..sites).map(|s| lattice.closed_neighborhood(s)).collect();
    let dists: Vec<Vec<(usize, f64)>> = assignment
        .patterns()
        .iter()
        .map(|p| p.site_distribution(lattice))
        .collect();

    // present[l]: agents that can be in contact with site l, with q_k(l)
    let mut present: Vec<Vec<(usize, f64)>> = vec![Vec::new(); sites];
    let mut q = vec![0.0; sites];
    for (k, dist) in dists.iter().enumerate() {
        let mut touched = Vec::new();
        for &(s, mass) in dist {
            for &l in &nbhd[s] {
                if q[l] == 0.0 {
                    touched.push(l);
                }
                q[l] += mass;
            }
        }
        for l in touched {
            present[l].push((k, q[l].min(1.0)));
            q[l] = 0.0;
        }
    }

    let degree = present.iter().map(Vec::len).max().unwrap_or(0);
    let (x, w) = gauss_legendre(degree / 2 + 1);
    let factor = |qk: f64, g: usize| 1.0 - qk + qk * x[g];
    let products: Vec<Vec<f64>> = present
        .par_iter()
        .map(|agents| {
            (0..x.len())
                .map(|g| agents.iter().map(|&(_, qk)| factor(qk, g)).product())
                .collect()
        })
        .collect();

    let inv_n = 1.0 / n as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            let mut inv_fi = vec![0.0; x.len()];
            for &(l, mass) in &dists[i] {
                let qi = present[l]
                    .iter()
                    .find(|&&(k, _)| k == i)
                    .map(|&(_, qk)| qk)
                    .expect("an agent is in contact range of its own site");
                for (g, v) in inv_fi.iter_mut().enumerate() {
                    *v = w[g] * products[l][g] / factor(qi, g);
                }
                for &(j, qj) in &present[l] {
                    if j == i {
                        continue;
                    }
                    let e: f64 = (0..x.len()).map(|g| inv_fi[g] / factor(qj, g)).sum();
                    row[j] += inv_n * mass * qj * e;
                }
            }
            row
        })
        .collect();
    let p = rows.into_iter().flatten().collect();
    let mut out = ContactMatrix::from_dense(n, p)?;
    out.mode = ContactMode::Exact;
    Ok(out)
}

/// Bucket index answering "who is in contact with agent i" for one draw.
pub(crate) struct NeighborIndex {
    kind: IndexKind,
    offsets: Vec<usize>,
    members: Vec<usize>,
    cell_of: Vec<usize>,
}

enum IndexKind {
    Sites { lattice: Lattice, nbhd: Vec<Vec<usize>> },
    Grid { per_side: usize, cells: Vec<Vec<usize>> },
    /// Grid too coarse to help; scan everyone.
    All,
}

impl NeighborIndex {
    pub(crate) fn new(topology: &Topology) -> Self {
        let kind = match topology {
            Topology::Lattice(l) => IndexKind::Sites {
                lattice: *l,
                nbhd: (0..l.site_count()).map(|s| l.closed_neighborhood(s)).collect(),
            },
            Topology::Geometric(g) => {
                let per_side = (1.0 / g.radius()).floor() as usize;
                if per_side < 3 {
                    IndexKind::All
                } else {
                    let k = per_side as i64;
                    let cells = (0..per_side * per_side)
                        .map(|c| {
                            let (r, q) = ((c / per_side) as i64, (c % per_side) as i64);
                            let mut around = Vec::with_capacity(9);
                            for dr in -1..=1 {
                                for dq in -1..=1 {
                                    let rr = (r + dr).rem_euclid(k) as usize;
                                    let qq = (q + dq).rem_euclid(k) as usize;
                                    around.push(rr * per_side + qq);
                                }
                            }
                            around
                        })
                        .collect();
                    IndexKind::Grid { per_side, cells }
                }
            }
        };
        let cells = match &kind {
            IndexKind::Sites { lattice, .. } => lattice.site_count(),
            IndexKind::Grid { per_side, .. } => per_side * per_side,
            IndexKind::All => 1,
        };
        Self { kind, offsets: vec![0; cells + 1], members: Vec::new(), cell_of: Vec::new() }
    }

    fn cell(&self, loc: Location) -> usize {
        match (&self.kind, loc) {
            (IndexKind::Sites { lattice, .. }, _) => lattice.index(loc),
            (IndexKind::Grid { per_side, .. }, Location::Point { u, v }) => {
                let k = *per_side as f64;
                let r = ((v * k) as usize).min(per_side - 1);
                let c = ((u * k) as usize).min(per_side - 1);
                r * per_side + c
            }
            _ => 0,
        }
    }

    /// Counting sort of agents by cell.
    pub(crate) fn rebuild(&mut self, positions: &[Location]) {
        self.cell_of.clear();
        for &p in positions {
            let c = self.cell(p);
            self.cell_of.push(c);
        }
        self.offsets.iter_mut().for_each(|o| *o = 0);
        for &c in &self.cell_of {
            self.offsets[c + 1] += 1;
        }
        for c in 1..self.offsets.len() {
            self.offsets[c] += self.offsets[c - 1];
        }
        self.members.resize(positions.len(), 0);
        let mut fill = self.offsets.clone();
        for (k, &c) in self.cell_of.iter().enumerate() {
            self.members[fill[c]] = k;
            fill[c] += 1;
        }
    }

    /// Agents in contact with `i`, in increasing cell order.
    pub(crate) fn neighbors_into(
        &self,
        topology: &Topology,
        positions: &[Location],
        i: usize,
        out: &mut Vec<usize>,
    ) {
        out.clear();
        let li = positions[i];
        let cells: &[usize] = match &self.kind {
            IndexKind::Sites { nbhd, .. } => &nbhd[self.cell_of[i]],
            IndexKind::Grid { cells, .. } => &cells[self.cell_of[i]],
            IndexKind::All => &[0],
        };
        let exact_sites = matches!(self.kind, IndexKind::Sites { .. });
        for &c in cells {
            for &k in &self.members[self.offsets[c]..self.offsets[c + 1]] {
                if k != i && (exact_sites || topology.in_contact(li, positions[k])) {
                    out.push(k);
                }
            }
        }
    }
}

fn monte_carlo(assignment: &MobilityAssignment, samples: usize, seed: u64) -> Result<ContactMatrix> {
    if samples < 2 {
        return Err(Error::InvalidParameter("monte-carlo needs at least 2 samples".into()));
    }
    let n = assignment.len();
    let topology = assignment.topology();
    let chunks = samples.div_ceil(CHUNK);
    let run_chunk = |c: usize| -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let mut sum = vec![0.0; n * n];
        let mut sq = vec![0.0; n * n];
        let mut index = NeighborIndex::new(topology);
        let mut positions = Vec::with_capacity(n);
        let mut nb = Vec::new();
        let count = CHUNK.min(samples - c * CHUNK);
        for _ in 0..count {
            positions.clear();
            positions.extend(
                assignment
                    .patterns()
                    .iter()
                    .map(|p| p.sample_stationary(topology, &mut rng)),
            );
            index.rebuild(&positions);
            for i in 0..n {
                index.neighbors_into(topology, &positions, i, &mut nb);
                if nb.is_empty() {
                    continue;
                }
                let v = 1.0 / (n * nb.len()) as f64;
                for &j in &nb {
                    sum[i * n + j] += v;
                    sq[i * n + j] += v * v;
                }
            }
        }
        (sum, sq)
    };

    let mut sum = vec![0.0; n * n];
    let mut sq = vec![0.0; n * n];
    for start in (0..chunks).step_by(BATCH) {
        let parts: Vec<_> = (start..chunks.min(start + BATCH))
            .into_par_iter()
            .map(run_chunk)
            .collect();
        for (s, q) in parts {
            sum.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
            sq.iter_mut().zip(&q).for_each(|(a, b)| *a += b);
        }
    }
    let m = samples as f64;
    let mut stderr = vec![0.0; n * n];
    for k in 0..n * n {
        let mean = sum[k] / m;
        let var = ((sq[k] - m * mean * mean) / (m - 1.0)).max(0.0);
        sum[k] = mean;
        stderr[k] = (var / m).sqrt();
    }
    Ok(ContactMatrix {
        n,
        p: sum,
        stderr: Some(stderr),
        mode: ContactMode::MonteCarlo { samples },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::{MobilityPattern, MobilitySpec};
    use crate::topology::{build_cycle, build_rgg, build_torus};
    use approx::assert_abs_diff_eq;

    /// Sums over every joint placement of a tiny lattice instance.
    fn brute_force(assignment: &MobilityAssignment) -> Vec<f64> {
        let lattice = assignment.topology().as_lattice().unwrap();
        let n = assignment.len();
        let dists: Vec<_> = assignment
            .patterns()
            .iter()
            .map(|p| p.site_distribution(lattice))
            .collect();
        let mut p = vec![0.0; n * n];
        let mut choice = vec![0usize; n];
        loop {
            let prob: f64 = (0..n).map(|k| dists[k][choice[k]].1).product();
            let pos: Vec<Location> = (0..n).map(|k| lattice.site_at(dists[k][choice[k]].0)).collect();
            for i in 0..n {
                let nb: Vec<usize> =
                    (0..n).filter(|&k| k != i && lattice.in_contact(pos[i], pos[k])).collect();
                for &j in &nb {
                    p[i * n + j] += prob / (n * nb.len()) as f64;
                }
            }
            let mut k = 0;
            loop {
                if k == n {
                    return p;
                }
                choice[k] += 1;
                if choice[k] < dists[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn quadrature_integrates_polynomials_exactly() {
        for order in 1..40 {
            let (x, w) = gauss_legendre(order);
            for deg in 0..(2 * order) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert_abs_diff_eq!(got, 1.0 / (deg as f64 + 1.0), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn always_adjacent_pair() {
        let t = build_torus(3).unwrap();
        let a = MobilitySpec::Static
            .build(t, &[Location::site(0, 0), Location::site(1, 0)], 0)
            .unwrap();
        let p = contact_probabilities(&a, ContactMode::Exact, 0).unwrap();
        assert_abs_diff_eq!(p.get(0, 1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(1, 0), 0.5, epsilon = 1e-15);
        assert_eq!(p.get(0, 0), 0.0);
    }

    #[test]
    fn static_cycle_neighbours() {
        for n in [3, 5, 12] {
            let t = build_cycle(n).unwrap();
            let a = MobilitySpec::Static.build(t, &t.all_sites(), 0).unwrap();
            let p = contact_probabilities(&a, ContactMode::Exact, 0).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let d = (i as i64 - j as i64).rem_euclid(n as i64);
                    let want = if d == 1 || d == n as i64 - 1 { 0.5 / n as f64 } else { 0.0 };
                    assert_abs_diff_eq!(p.get(i, j), want, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn mobile_agent_on_cycle_is_picked_with_probability_one_over_n_times_n_plus_one() {
        // static i is selected w.p. 1/(n+1), meets the mobile agent w.p. 3/n
        // and then has 3 neighbours
        let n = 16;
        let t = build_cycle(n).unwrap();
        let a = MobilitySpec::PlusMobile(1).build(t, &t.all_sites(), 0).unwrap();
        let p = contact_probabilities(&a, ContactMode::Exact, 0).unwrap();
        let nf = n as f64;
        assert_abs_diff_eq!(p.get(0, n), 1.0 / (nf * (nf + 1.0)), epsilon = 1e-15);
    }

    #[test]
    fn exact_matches_enumeration() {
        let t = build_cycle(5).unwrap();
        let a = MobilityAssignment::new(
            t,
            vec![
                MobilityPattern::Static { home: Location::site(0, 0) },
                MobilityPattern::Static { home: Location::site(0, 1) },
                MobilityPattern::FullUniform,
                MobilityPattern::FullUniform,
                MobilityPattern::Static { home: Location::site(0, 3) },
            ],
        )
        .unwrap();
        let want = brute_force(&a);
        let got = contact_probabilities(&a, ContactMode::Exact, 0).unwrap();
        for (g, w) in got.as_slice().iter().zip(&want) {
            assert_abs_diff_eq!(g, w, epsilon = 1e-14);
        }

        let t = build_torus(3).unwrap();
        let a = MobilityAssignment::new(
            t,
            vec![
                MobilityPattern::Horizontal { home: Location::site(0, 0) },
                MobilityPattern::Vertical { home: Location::site(1, 2) },
                MobilityPattern::Local { home: Location::site(2, 2), half_width: 1 },
                MobilityPattern::Static { home: Location::site(1, 1) },
            ],
        )
        .unwrap();
        let want = brute_force(&a);
        let got = contact_probabilities(&a, ContactMode::Exact, 0).unwrap();
        for (g, w) in got.as_slice().iter().zip(&want) {
            assert_abs_diff_eq!(g, w, epsilon = 1e-14);
        }
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let t = build_torus(4).unwrap();
        let a = MobilitySpec::Horizontal
            .build(t, &t.all_sites(), 0)
            .unwrap()
            .with_full_mobile(2);
        let ex = contact_probabilities(&a, ContactMode::Exact, 0).unwrap();
        let mc = contact_probabilities(&a, ContactMode::MonteCarlo { samples: 20_000 }, 5).unwrap();
        let n = a.len();
        let mut outside = 0;
        for i in 0..n {
            for j in 0..n {
                let se = mc.stderr(i, j);
                if (mc.get(i, j) - ex.get(i, j)).abs() > 4.0 * se.max(1e-12) {
                    outside += 1;
                }
            }
        }
        // 4 sigma: expect essentially none among 324 entries
        assert!(outside <= 1, "{outside} entries outside 4 stderr");
    }

    #[test]
    fn monte_carlo_error_shrinks_like_root_samples() {
        let t = build_torus(4).unwrap();
        let a = MobilitySpec::Full.build(t, &t.all_sites(), 0).unwrap();
        let mut prev = None;
        for samples in [4_000, 8_000, 16_000, 32_000] {
            let mc = contact_probabilities(&a, ContactMode::MonteCarlo { samples }, 2).unwrap();
            let se = mc.max_stderr();
            if let Some(p) = prev {
                let r: f64 = se / p;
                assert!((r - 0.5f64.sqrt()).abs() < 0.1, "ratio {r}");
            }
            prev = Some(se);
        }
    }

    #[test]
    fn monte_carlo_is_independent_of_worker_count() {
        let (t, homes) = build_rgg(60, 1.0, 3).unwrap();
        let a = MobilitySpec::Bidirectional.build(t, &homes, 3).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| contact_probabilities(&a, ContactMode::MonteCarlo { samples: 5000 }, 9))
                .unwrap()
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn bucket_index_matches_scan() {
        let (t, homes) = build_rgg(300, 1.0, 11).unwrap();
        let mut idx = NeighborIndex::new(&t);
        idx.rebuild(&homes);
        let mut got = Vec::new();
        for i in 0..homes.len() {
            idx.neighbors_into(&t, &homes, i, &mut got);
            got.sort_unstable();
            assert_eq!(got, crate::topology::neighbors(&t, &homes, i));
        }
    }

    #[test]
    fn exact_rejects_continuous_space() {
        let (t, homes) = build_rgg(20, 1.0, 1).unwrap();
        let a = MobilitySpec::Static.build(t, &homes, 0).unwrap();
        assert!(matches!(
            contact_probabilities(&a, ContactMode::Exact, 0),
            Err(Error::UnsupportedMode(_))
        ));
    }

    #[test]
    fn total_never_exceeds_one() {
        let t = build_torus(6).unwrap();
        let homes = [Location::site(0, 0), Location::site(3, 3), Location::site(0, 1)];
        let a = MobilitySpec::Static.build(t, &homes, 0).unwrap();
        let p = contact_probabilities(&a, ContactMode::Exact, 0).unwrap();
        assert_abs_diff_eq!(p.total(), 2.0 / 3.0, epsilon = 1e-15);
    }
}
