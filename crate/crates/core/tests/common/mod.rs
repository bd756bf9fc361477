#![allow(dead_code)]

use mobgossip::chain::{contact_probabilities, expected_matrix, ContactMode, TransitionMatrix};
use mobgossip::mobility::{MobilityAssignment, MobilitySpec};
use mobgossip::topology::{build_cycle, build_torus, Topology};
use mobgossip::Result;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random walk on a random connected weighted graph with self-loops:
/// `W_ij = c_ij / d_i`, `pi_i = d_i / sum d`. Reversible by construction.
pub fn random_reversible_chain(rng: &mut impl Rng, n: usize) -> TransitionMatrix {
    let mut c = DMatrix::<f64>::zeros(n, n);
    // spanning path keeps it connected
    for i in 1..n {
        let x = rng.random_range(0.05..1.0);
        c[(i - 1, i)] = x;
        c[(i, i - 1)] = x;
    }
    for i in 0..n {
        for j in i..n {
            if rng.random_bool(0.3) {
                let x = rng.random_range(0.0..1.0);
                c[(i, j)] += x;
                if i != j {
                    c[(j, i)] += x;
                }
            }
        }
    }
    let d: Vec<f64> = (0..n).map(|i| c.row(i).sum()).collect();
    let total: f64 = d.iter().sum();
    let w = DMatrix::from_fn(n, n, |i, j| c[(i, j)] / d[i]);
    TransitionMatrix::new(w, d.iter().map(|x| x / total).collect()).unwrap()
}

/// Surjective labelling of `n` states onto `k >= 2` classes.
pub fn random_labels(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let k = rng.random_range(2..=n);
    let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    labels
}

pub fn exact_matrix(a: &MobilityAssignment) -> Result<TransitionMatrix> {
    expected_matrix(&contact_probabilities(a, ContactMode::Exact, 0)?)
}

pub fn build(t: Topology, spec: MobilitySpec, seed: u64) -> Result<MobilityAssignment> {
    spec.build(t, &t.all_sites(), seed)
}

/// The exact instances: cycles up to 64, tori up to side 10 under every iid
/// mobility model, and tori with up to 8 added mobile agents.
pub fn exact_instances() -> Vec<(String, MobilityAssignment)> {
    let mut out = Vec::new();
    let mut push = |t: Topology, spec: MobilitySpec, seed: u64| {
        let a = build(t, spec, seed).unwrap();
        out.push((format!("{t} {spec}"), a));
    };
    for n in [4, 8, 16, 32, 64] {
        let c = build_cycle(n).unwrap();
        push(c, MobilitySpec::Static, 0);
        push(c, MobilitySpec::Full, 0);
        push(c, MobilitySpec::PlusMobile(1), 0);
    }
    for side in 4..=10 {
        let t = build_torus(side).unwrap();
        for spec in [
            MobilitySpec::Static,
            MobilitySpec::Full,
            MobilitySpec::Horizontal,
            MobilitySpec::Vertical,
            MobilitySpec::Bidirectional,
        ] {
            push(t, spec, side as u64);
        }
        for m in (1..side / 2 + 1).filter(|m| side % m == 0) {
            push(t, MobilitySpec::Local(m), 0);
        }
        for m in [1, 2, 4, 8] {
            push(t, MobilitySpec::PlusMobile(m), 0);
        }
    }
    out
}
