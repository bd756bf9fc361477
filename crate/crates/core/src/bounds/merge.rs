//! Induced chains obtained by merging states.

use nalgebra::DMatrix;

use crate::chain::contact::{contact_probabilities, ContactMode};
use crate::chain::matrix::{expected_matrix, TransitionMatrix};
use crate::chain::spectral::relaxation_time;
use crate::error::{Error, Result};
use crate::mobility::MobilityAssignment;
use crate::topology::Topology;

/// Total map from states to merged labels `0..classes`, every label used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeMap {
    labels: Vec<usize>,
    classes: usize,
    /// Class formed by merging, as opposed to a state left alone.
    merged: Vec<bool>,
}

impl MergeMap {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; classes];
        labels.iter().for_each(|&l| used[l] = true);
        if let Some(empty) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMap(format!("class {empty} is empty")));
        }
        let mut size = vec![0usize; classes];
        labels.iter().for_each(|&l| size[l] += 1);
        let merged = size.into_iter().map(|s| s > 1).collect();
        Ok(Self { labels, classes, merged })
    }

    pub fn identity(n: usize) -> Self {
        Self { labels: (0..n).collect(), classes: n, merged: vec![false; n] }
    }

    pub fn merge_all(n: usize) -> Self {
        Self { labels: vec![0; n], classes: 1.min(n), merged: vec![true; 1.min(n)] }
    }

    /// Keeps every state except `group`, which becomes the last label.
    pub fn merge_group(n: usize, group: &[usize]) -> Result<Self> {
        if group.is_empty() {
            return Err(Error::InvalidMap("cannot merge an empty group".into()));
        }
        let mut labels = vec![usize::MAX; n];
        group.iter().for_each(|&g| labels[g] = 0);
        let mut next = 0;
        for l in labels.iter_mut() {
            if *l == usize::MAX {
                *l = next;
                next += 1;
            } else {
                *l = usize::MAX - 1;
            }
        }
        labels.iter_mut().filter(|l| **l == usize::MAX - 1).for_each(|l| *l = next);
        let mut merged = vec![false; next + 1];
        merged[next] = true;
        Ok(Self { labels, classes: next + 1, merged })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn label(&self, state: usize) -> usize {
        self.labels[state]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.classes];
        for (s, &l) in self.labels.iter().enumerate() {
            out[l].push(s);
        }
        out
    }

    /// Classes formed by merging, as opposed to states left alone.
    pub fn merged_classes(&self) -> Vec<Vec<usize>> {
        let mut c = self.classes();
        c.retain(|states| self.merged[self.labels[states[0]]]);
        c
    }

    /// States mapped to themselves.
    pub fn leftover(&self) -> Vec<usize> {
        self.classes()
            .into_iter()
            .filter(|c| !self.merged[self.labels[c[0]]])
            .map(|c| c[0])
            .collect()
    }

    /// Lifts a function on classes to states.
    pub fn lift(&self, g: &[f64]) -> Vec<f64> {
        self.labels.iter().map(|&l| g[l]).collect()
    }
}

/// `Ŵ_kl = (1/π̂_k) sum_{F(i)=k} sum_{F(j)=l} π_i W_ij`, `π̂_k = sum_{F(i)=k} π_i`.
pub fn induce_chain(w: &TransitionMatrix, map: &MergeMap) -> Result<TransitionMatrix> {
    if map.len() != w.size() {
        return Err(Error::InvalidMap(format!(
            "map covers {} states, chain has {}",
            map.len(),
            w.size()
        )));
    }
    let k = map.class_count();
    let pi = w.pi();
    let mut pi_hat = vec![0.0; k];
    let mut flow = DMatrix::zeros(k, k);
    for i in 0..w.size() {
        let a = map.label(i);
        pi_hat[a] += pi[i];
        for j in 0..w.size() {
            let x = w.get(i, j);
            if x != 0.0 {
                flow[(a, map.label(j))] += pi[i] * x;
            }
        }
    }
    // symmetrise the stationary flow before normalising so detailed balance
    // survives rounding
    let flow = (&flow + flow.transpose()) * 0.5;
    let w_hat = DMatrix::from_fn(k, k, |a, b| flow[(a, b)] / pi_hat[a]);
    TransitionMatrix::new(w_hat, pi_hat)
}

/// Partition of the lattice into regions `U_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Partition {
    Rows,
    Columns,
    /// One region per site.
    Sites,
    /// Horizontal bands of `height` rows.
    RowBands { height: usize },
    Whole,
    /// Region label per site index.
    Labels(Vec<usize>),
}

impl Partition {
    /// Region label of every site.
    pub fn site_labels(&self, topology: &Topology) -> Result<Vec<usize>> {
        let l = topology.as_lattice().ok_or_else(|| {
            Error::UnsupportedInstance("merge partitions are defined on lattices".into())
        })?;
        let sites = l.site_count();
        let labels = match self {
            Partition::Rows => (0..sites).map(|s| s / l.cols()).collect(),
            Partition::Columns => (0..sites).map(|s| s % l.cols()).collect(),
            Partition::Sites => (0..sites).collect(),
            Partition::RowBands { height } if *height >= 1 => {
                (0..sites).map(|s| s / l.cols() / height).collect()
            }
            Partition::RowBands { .. } => {
                return Err(Error::InvalidParameter("band height must be positive".into()))
            }
            Partition::Whole => vec![0; sites],
            Partition::Labels(v) if v.len() == sites => v.clone(),
            Partition::Labels(v) => {
                return Err(Error::InvalidParameter(format!(
                    "{} labels for {sites} sites",
                    v.len()
                )))
            }
        };
        Ok(labels)
    }
}

/// Agents whose support lies inside one region are merged into that region's
/// class; everyone else keeps a class of their own.
pub fn mobility_merge_map(assignment: &MobilityAssignment, partition: &Partition) -> Result<MergeMap> {
    let topology = assignment.topology();
    let lattice = topology.as_lattice().ok_or_else(|| {
        Error::UnsupportedInstance("merge partitions are defined on lattices".into())
    })?;
    let site_labels = partition.site_labels(topology)?;
    let region: Vec<Option<usize>> = assignment
        .patterns()
        .iter()
        .map(|p| {
            let sites = p.support().sites(topology);
            let first = site_labels[lattice.index(sites[0])];
            sites
                .iter()
                .all(|&s| site_labels[lattice.index(s)] == first)
                .then_some(first)
        })
        .collect();
    let mut used: Vec<usize> = region.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let mut labels = Vec::with_capacity(region.len());
    let mut next = used.len();
    for r in &region {
        match r {
            Some(r) => labels.push(used.binary_search(r).expect("region listed")),
            None => {
                labels.push(next);
                next += 1;
            }
        }
    }
    let merged = (0..next).map(|l| l < used.len()).collect();
    Ok(MergeMap { labels, classes: next, merged })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergeBound {
    /// Relaxation time of the induced chain.
    pub t_relax: f64,
    pub classes: usize,
    /// Largest standard error of the estimated matrix, zero when exact.
    pub error_band: f64,
}

/// Contact probabilities, expected matrix, induced chain, relaxation time.
pub fn lower_bound_via_merge(
    assignment: &MobilityAssignment,
    partition: &Partition,
    mode: ContactMode,
    seed: u64,
) -> Result<MergeBound> {
    let map = mobility_merge_map(assignment, partition)?;
    let p = contact_probabilities(assignment, mode, seed)?;
    let w = expected_matrix(&p)?;
    let hat = induce_chain(&w, &map)?;
    Ok(MergeBound {
        t_relax: relaxation_time(&hat)?,
        classes: map.class_count(),
        error_band: p.max_stderr(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::{MobilityPattern, MobilitySpec};
    use crate::topology::{build_torus, Location};
    use approx::assert_abs_diff_eq;

    fn three_state() -> TransitionMatrix {
        TransitionMatrix::from_rows(&[
            &[0.5, 0.25, 0.25],
            &[0.25, 0.5, 0.25],
            &[0.25, 0.25, 0.5],
        ])
        .unwrap()
    }

    #[test]
    fn identity_and_merge_all() {
        let w = three_state();
        assert_eq!(induce_chain(&w, &MergeMap::identity(3)).unwrap(), w);
        let all = induce_chain(&w, &MergeMap::merge_all(3)).unwrap();
        assert_eq!(all.size(), 1);
        assert_abs_diff_eq!(all.get(0, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(all.pi()[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn three_state_hand_evaluation() {
        let map = MergeMap::new(vec![0, 1, 1]).unwrap();
        let hat = induce_chain(&three_state(), &map).unwrap();
        let want = [[0.5, 0.5], [0.25, 0.75]];
        for a in 0..2 {
            for b in 0..2 {
                assert_abs_diff_eq!(hat.get(a, b), want[a][b], epsilon = 1e-15);
            }
        }
        assert_abs_diff_eq!(hat.pi()[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hat.pi()[1], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn empty_class_is_rejected() {
        assert!(matches!(MergeMap::new(vec![0, 2]), Err(Error::InvalidMap(_))));
        assert!(induce_chain(&three_state(), &MergeMap::identity(2)).is_err());
    }

    #[test]
    fn merge_group_puts_the_group_last() {
        let m = MergeMap::merge_group(5, &[1, 3]).unwrap();
        assert_eq!(m.labels(), &[0, 3, 1, 3, 2]);
        assert_eq!(m.merged_classes(), vec![vec![1, 3]]);
    }

    #[test]
    fn horizontal_agents_merge_by_row() {
        let t = build_torus(5).unwrap();
        let a = MobilitySpec::Horizontal.build(t, &t.all_sites(), 0).unwrap();
        let m = mobility_merge_map(&a, &Partition::Rows).unwrap();
        assert_eq!(m.class_count(), 5);
        assert!(m.classes().iter().all(|c| c.len() == 5));
        assert!(m.leftover().is_empty());
    }

    #[test]
    fn full_movers_are_not_merged_by_rows() {
        let t = build_torus(4).unwrap();
        let a = MobilitySpec::Horizontal
            .build(t, &t.all_sites(), 0)
            .unwrap()
            .with_full_mobile(2);
        let m = mobility_merge_map(&a, &Partition::Rows).unwrap();
        assert_eq!(m.class_count(), 6);
        assert_eq!(m.leftover(), vec![16, 17]);
        let a = MobilitySpec::Full.build(t, &t.all_sites(), 0).unwrap();
        let m = mobility_merge_map(&a, &Partition::Rows).unwrap();
        assert_eq!(m.labels(), MergeMap::identity(16).labels());
    }

    #[test]
    fn static_agents_on_sites_give_identity() {
        let t = build_torus(4).unwrap();
        let a = MobilitySpec::Static.build(t, &t.all_sites(), 0).unwrap();
        let m = mobility_merge_map(&a, &Partition::Sites).unwrap();
        assert_eq!(m.labels(), MergeMap::identity(16).labels());
    }

    #[test]
    fn merging_nothing_preserves_relaxation_time() {
        let t = build_torus(4).unwrap();
        let a = MobilitySpec::Full.build(t, &t.all_sites(), 0).unwrap();
        let b = lower_bound_via_merge(&a, &Partition::Rows, ContactMode::Exact, 0).unwrap();
        let w = expected_matrix(&contact_probabilities(&a, ContactMode::Exact, 0).unwrap()).unwrap();
        assert_abs_diff_eq!(b.t_relax, relaxation_time(&w).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn vertical_mover_stays_unmerged() {
        let t = build_torus(4).unwrap();
        let a = MobilitySpec::Horizontal
            .build(t, &t.all_sites(), 0)
            .unwrap()
            .append(MobilityPattern::Vertical { home: Location::site(0, 0) })
            .unwrap();
        let m = mobility_merge_map(&a, &Partition::Rows).unwrap();
        assert_eq!(m.class_count(), 5);
        assert_eq!(m.leftover(), vec![16]);
    }
}
