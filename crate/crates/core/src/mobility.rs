//! Agent-based mobility patterns.
//!
//! Every pattern except the row random walk redraws the agent position
//! independently at each tick from a fixed distribution. The random walk
//! advances a lazy walk along the agent's row from the previous position.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::topology::{Lattice, Location, SubsquarePartition, Topology};

/// Direction fixed once per agent under bidirectional mobility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MobilityPattern {
    Static { home: Location },
    /// Uniform over the whole space.
    FullUniform,
    /// Uniform over the row (lattice) or horizontal line (unit torus) of `home`.
    Horizontal { home: Location },
    /// Uniform over the column or vertical line of `home`.
    Vertical { home: Location },
    /// Uniform over the `(2m+1)²` window centred on `home`, modulo the torus.
    Local { home: Location, half_width: usize },
    /// `steps` lazy random-walk moves along the row per tick.
    RowWalk { home: Location, steps: usize },
}

impl MobilityPattern {
    /// Positions are redrawn independently each tick.
    pub fn is_iid(&self) -> bool {
        !matches!(self, MobilityPattern::RowWalk { .. })
    }

    pub fn home(&self) -> Option<Location> {
        match *self {
            MobilityPattern::Static { home }
            | MobilityPattern::Horizontal { home }
            | MobilityPattern::Vertical { home }
            | MobilityPattern::Local { home, .. }
            | MobilityPattern::RowWalk { home, .. } => Some(home),
            MobilityPattern::FullUniform => None,
        }
    }

    pub fn direction(&self) -> Option<Direction> {
        match self {
            MobilityPattern::Horizontal { .. } => Some(Direction::Horizontal),
            MobilityPattern::Vertical { .. } => Some(Direction::Vertical),
            _ => None,
        }
    }

    fn check(&self, topology: &Topology) -> Result<()> {
        if let Some(home) = self.home() {
            if !topology.contains(home) {
                return Err(Error::InvalidParameter(format!(
                    "home {home:?} is not a location of {topology}"
                )));
            }
        }
        match (self, topology) {
            (MobilityPattern::Local { .. }, Topology::Geometric(_))
            | (MobilityPattern::RowWalk { .. }, Topology::Geometric(_)) => {
                Err(Error::InvalidParameter(
                    "local and random-walk mobility are defined on lattices only".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    /// Draws the next position. Only the random walk reads `previous`.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        topology: &Topology,
        previous: Location,
        rng: &mut R,
    ) -> Location {
        match (*self, topology) {
            (MobilityPattern::Static { home }, _) => home,
            (MobilityPattern::FullUniform, Topology::Lattice(l)) => {
                l.site_at(rng.random_range(0..l.site_count()))
            }
            (MobilityPattern::FullUniform, Topology::Geometric(_)) => {
                Location::point(rng.random(), rng.random())
            }
            (MobilityPattern::Horizontal { home }, _) => match home {
                Location::Site { row, .. } => {
                    let cols = topology.as_lattice().map_or(1, Lattice::cols);
                    Location::site(row as usize, rng.random_range(0..cols))
                }
                Location::Point { v, .. } => Location::point(rng.random(), v),
            },
            (MobilityPattern::Vertical { home }, _) => match home {
                Location::Site { col, .. } => {
                    let rows = topology.as_lattice().map_or(1, Lattice::rows);
                    Location::site(rng.random_range(0..rows), col as usize)
                }
                Location::Point { u, .. } => Location::point(u, rng.random()),
            },
            (MobilityPattern::Local { home, half_width }, Topology::Lattice(l)) => {
                let (r, c) = site_coords(home);
                let m = half_width as i64;
                let dr = rng.random_range(-m..=m);
                let dc = rng.random_range(-m..=m);
                l.wrap(r + dr, c + dc)
            }
            (MobilityPattern::RowWalk { steps, .. }, Topology::Lattice(l)) => {
                let (r, c) = site_coords(previous);
                // `steps` lazy moves (stay 1/2, left 1/4, right 1/4) sum to
                // Binomial(2 steps, 1/2) - steps.
                let shift = Binomial::new(2 * steps as u64, 0.5)
                    .expect("valid binomial")
                    .sample(rng) as i64
                    - steps as i64;
                l.wrap(r, c + shift)
            }
            (p, t) => panic!("pattern {p:?} is not defined on {t}"),
        }
    }

    /// Draws from the per-tick stationary marginal (the walk's uniform row law).
    pub fn sample_stationary<R: Rng + ?Sized>(&self, topology: &Topology, rng: &mut R) -> Location {
        match *self {
            MobilityPattern::RowWalk { home, .. } => {
                MobilityPattern::Horizontal { home }.sample(topology, home, rng)
            }
            p => p.sample(topology, p.home().unwrap_or(Location::site(0, 0)), rng),
        }
    }

    pub fn support(&self) -> Support {
        match *self {
            MobilityPattern::Static { home } => Support::Point(home),
            MobilityPattern::FullUniform => Support::Everywhere,
            MobilityPattern::Horizontal { home } | MobilityPattern::RowWalk { home, .. } => {
                Support::Row(home)
            }
            MobilityPattern::Vertical { home } => Support::Column(home),
            MobilityPattern::Local { home, half_width } => Support::Window { center: home, half_width },
        }
    }

    /// Per-tick marginal over lattice sites as `(site index, probability)`.
    pub fn site_distribution(&self, lattice: &Lattice) -> Vec<(usize, f64)> {
        let mut mass = vec![0.0; lattice.site_count()];
        match *self {
            MobilityPattern::Static { home } => mass[lattice.index(home)] = 1.0,
            MobilityPattern::FullUniform => {
                mass.iter_mut().for_each(|m| *m = 1.0 / lattice.site_count() as f64)
            }
            MobilityPattern::Horizontal { home } | MobilityPattern::RowWalk { home, .. } => {
                let (r, _) = site_coords(home);
                for c in 0..lattice.cols() {
                    mass[lattice.index(Location::site(r as usize, c))] += 1.0 / lattice.cols() as f64;
                }
            }
            MobilityPattern::Vertical { home } => {
                let (_, c) = site_coords(home);
                for r in 0..lattice.rows() {
                    mass[lattice.index(Location::site(r, c as usize))] += 1.0 / lattice.rows() as f64;
                }
            }
            MobilityPattern::Local { home, half_width } => {
                let (r, c) = site_coords(home);
                let m = half_width as i64;
                let w = 1.0 / ((2 * m + 1) * (2 * m + 1)) as f64;
                for dr in -m..=m {
                    for dc in -m..=m {
                        mass[lattice.index(lattice.wrap(r + dr, c + dc))] += w;
                    }
                }
            }
        }
        mass.into_iter()
            .enumerate()
            .filter(|&(_, p)| p > 0.0)
            .collect()
    }
}

fn site_coords(loc: Location) -> (i64, i64) {
    match loc {
        Location::Site { row, col } => (row as i64, col as i64),
        Location::Point { .. } => panic!("lattice pattern with a continuous home"),
    }
}

/// Set of locations a pattern can reach.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    Point(Location),
    /// The row (or horizontal line) through the location.
    Row(Location),
    /// The column (or vertical line) through the location.
    Column(Location),
    Window { center: Location, half_width: usize },
    Everywhere,
}

impl Support {
    pub fn contains(&self, topology: &Topology, loc: Location) -> bool {
        match (*self, loc) {
            (Support::Everywhere, _) => topology.contains(loc),
            (Support::Point(p), _) => p == loc,
            (Support::Row(Location::Site { row, .. }), Location::Site { row: r, .. }) => row == r,
            (Support::Row(Location::Point { v, .. }), Location::Point { v: w, .. }) => v == w,
            (Support::Column(Location::Site { col, .. }), Location::Site { col: c, .. }) => col == c,
            (Support::Column(Location::Point { u, .. }), Location::Point { u: w, .. }) => u == w,
            (Support::Window { center, half_width }, Location::Site { row, col }) => {
                let Some(l) = topology.as_lattice() else {
                    return false;
                };
                let (cr, cc) = site_coords(center);
                let fits = |d: i64, len: usize| {
                    let d = d.rem_euclid(len as i64) as usize;
                    let d = d.min(len - d);
                    2 * half_width + 1 >= len || d <= half_width
                };
                fits(row as i64 - cr, l.rows()) && fits(col as i64 - cc, l.cols())
            }
            _ => false,
        }
    }

    /// All lattice sites in the support (empty on the unit torus).
    pub fn sites(&self, topology: &Topology) -> Vec<Location> {
        topology
            .all_sites()
            .into_iter()
            .filter(|&s| self.contains(topology, s))
            .collect()
    }
}

/// One pattern per agent; the first `base_agents` own a home location and the
/// remaining ones were appended on top of that population.
#[derive(Clone, Debug, PartialEq)]
pub struct MobilityAssignment {
    topology: Topology,
    patterns: Vec<MobilityPattern>,
    base_agents: usize,
}

impl MobilityAssignment {
    /// Validates the patterns against the topology.
    pub fn new(topology: Topology, patterns: Vec<MobilityPattern>) -> Result<Self> {
        for p in &patterns {
            p.check(&topology)?;
        }
        let base_agents = patterns.len();
        Ok(Self {
            topology,
            patterns,
            base_agents,
        })
    }

    /// Every home gets the pattern produced by `make`.
    pub fn from_homes(
        topology: Topology,
        homes: &[Location],
        make: impl Fn(Location) -> MobilityPattern,
    ) -> Result<Self> {
        Self::new(topology, homes.iter().map(|&h| make(h)).collect())
    }

    /// Appends agents without a home site.
    pub fn append(mut self, pattern: MobilityPattern) -> Result<Self> {
        pattern.check(&self.topology)?;
        self.patterns.push(pattern);
        Ok(self)
    }

    /// Appends `m` fully mobile agents.
    pub fn with_full_mobile(mut self, m: usize) -> Self {
        self.patterns
            .extend(std::iter::repeat_n(MobilityPattern::FullUniform, m));
        self
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn patterns(&self) -> &[MobilityPattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn base_agents(&self) -> usize {
        self.base_agents
    }

    pub fn appended(&self) -> usize {
        self.patterns.len() - self.base_agents
    }

    pub fn is_iid(&self) -> bool {
        self.patterns.iter().all(MobilityPattern::is_iid)
    }

    pub fn is_static(&self) -> bool {
        self.patterns
            .iter()
            .all(|p| matches!(p, MobilityPattern::Static { .. }))
    }

    /// Positions at `t = 0`: the home where there is one, a draw otherwise.
    pub fn initial_positions<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Location> {
        self.patterns
            .iter()
            .map(|p| match p.home() {
                Some(h) => h,
                None => p.sample_stationary(&self.topology, rng),
            })
            .collect()
    }

    /// Direction per agent when every agent moves along one axis.
    pub fn directions(&self) -> Option<Vec<Direction>> {
        self.patterns.iter().map(MobilityPattern::direction).collect()
    }

    /// Splits bidirectional agents into `H_r` (per row of squares) and `V_c`
    /// (per column of squares) according to their home.
    pub fn classes(&self, partition: &SubsquarePartition) -> Result<BidirectionalClasses> {
        let dirs = self.directions().ok_or_else(|| {
            Error::UnsupportedInstance("not every agent is a horizontal or vertical mover".into())
        })?;
        let k = partition.per_side();
        let mut classes = BidirectionalClasses {
            horizontal: vec![Vec::new(); k],
            vertical: vec![Vec::new(); k],
        };
        for (a, (p, d)) in self.patterns.iter().zip(dirs).enumerate() {
            let (r, c) = partition.square_coords(p.home().expect("directional pattern has a home"));
            match d {
                Direction::Horizontal => classes.horizontal[r].push(a),
                Direction::Vertical => classes.vertical[c].push(a),
            }
        }
        Ok(classes)
    }
}

/// `H_r` and `V_c` sets of the bidirectional model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BidirectionalClasses {
    pub horizontal: Vec<Vec<usize>>,
    pub vertical: Vec<Vec<usize>>,
}

impl BidirectionalClasses {
    pub fn horizontal_agents(&self) -> Vec<usize> {
        let mut v: Vec<_> = self.horizontal.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn vertical_agents(&self) -> Vec<usize> {
        let mut v: Vec<_> = self.vertical.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }
}

/// New positions for every agent.
pub fn sample_positions<R: Rng + ?Sized>(
    assignment: &MobilityAssignment,
    previous: &[Location],
    rng: &mut R,
) -> Vec<Location> {
    let mut next = previous.to_vec();
    resample_in_place(assignment, &mut next, rng);
    next
}

/// In-place variant of [`sample_positions`].
pub fn resample_in_place<R: Rng + ?Sized>(
    assignment: &MobilityAssignment,
    positions: &mut [Location],
    rng: &mut R,
) {
    for (pos, pattern) in positions.iter_mut().zip(&assignment.patterns) {
        if !matches!(pattern, MobilityPattern::Static { .. }) {
            *pos = pattern.sample(&assignment.topology, *pos, rng);
        }
    }
}

pub fn support(pattern: &MobilityPattern) -> Support {
    pattern.support()
}

/// Each agent independently moves horizontally or vertically for all time,
/// decided by a fair coin drawn from `seed`.
pub fn assign_bidirectional(
    topology: Topology,
    homes: &[Location],
    seed: u64,
) -> Result<MobilityAssignment> {
    if homes.len() < 2 {
        return Err(Error::InvalidParameter("bidirectional mobility needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let patterns = homes
        .iter()
        .map(|&home| {
            if rng.random_bool(0.5) {
                MobilityPattern::Horizontal { home }
            } else {
                MobilityPattern::Vertical { home }
            }
        })
        .collect();
    MobilityAssignment::new(topology, patterns)
}

/// Named mobility configurations used by the command line and experiment specs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MobilitySpec {
    Static,
    Full,
    Horizontal,
    Vertical,
    Bidirectional,
    Local(usize),
    RandomWalk(usize),
    /// Static population plus `m` fully mobile agents.
    PlusMobile(usize),
}

impl MobilitySpec {
    /// Builds the assignment with one base agent per home location.
    pub fn build(&self, topology: Topology, homes: &[Location], seed: u64) -> Result<MobilityAssignment> {
        use MobilityPattern as P;
        match *self {
            MobilitySpec::Static => MobilityAssignment::from_homes(topology, homes, |home| P::Static { home }),
            MobilitySpec::Full => MobilityAssignment::from_homes(topology, homes, |_| P::FullUniform),
            MobilitySpec::Horizontal => {
                MobilityAssignment::from_homes(topology, homes, |home| P::Horizontal { home })
            }
            MobilitySpec::Vertical => {
                MobilityAssignment::from_homes(topology, homes, |home| P::Vertical { home })
            }
            MobilitySpec::Bidirectional => assign_bidirectional(topology, homes, seed),
            MobilitySpec::Local(m) => {
                MobilityAssignment::from_homes(topology, homes, |home| P::Local { home, half_width: m })
            }
            MobilitySpec::RandomWalk(steps) => {
                MobilityAssignment::from_homes(topology, homes, |home| P::RowWalk { home, steps })
            }
            MobilitySpec::PlusMobile(m) => {
                Ok(MobilityAssignment::from_homes(topology, homes, |home| P::Static { home })?
                    .with_full_mobile(m))
            }
        }
    }
}

impl fmt::Display for MobilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MobilitySpec::Static => f.write_str("static"),
            MobilitySpec::Full => f.write_str("full"),
            MobilitySpec::Horizontal => f.write_str("horizontal"),
            MobilitySpec::Vertical => f.write_str("vertical"),
            MobilitySpec::Bidirectional => f.write_str("bidirectional"),
            MobilitySpec::Local(m) => write!(f, "local:{m}"),
            MobilitySpec::RandomWalk(s) => write!(f, "rw:{s}"),
            MobilitySpec::PlusMobile(m) => write!(f, "plus-mobile:{m}"),
        }
    }
}

impl FromStr for MobilitySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("unknown mobility `{s}`"));
        let arg = |p: &str| p.parse::<usize>().map_err(|_| bad());
        match s.trim().split_once(':') {
            None => match s.trim() {
                "static" => Ok(MobilitySpec::Static),
                "full" => Ok(MobilitySpec::Full),
                "horizontal" => Ok(MobilitySpec::Horizontal),
                "vertical" => Ok(MobilitySpec::Vertical),
                "bidirectional" => Ok(MobilitySpec::Bidirectional),
                _ => Err(bad()),
            },
            Some(("local", m)) => Ok(MobilitySpec::Local(arg(m)?)),
            Some(("rw", n)) => Ok(MobilitySpec::RandomWalk(arg(n)?)),
            Some(("plus-mobile", m)) => Ok(MobilitySpec::PlusMobile(arg(m)?)),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_rgg, build_torus, subsquare_partition};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn static_positions_are_fixed() {
        let t = build_torus(4).unwrap();
        let homes = t.all_sites();
        let a = MobilitySpec::Static.build(t, &homes, 0).unwrap();
        let mut r = rng(1);
        assert_eq!(sample_positions(&a, &homes, &mut r), homes);
    }

    #[test]
    fn horizontal_columns_are_uniform() {
        let side = 6;
        let t = build_torus(side).unwrap();
        let p = MobilityPattern::Horizontal { home: Location::site(2, 3) };
        let mut r = rng(2);
        let draws = 100_000;
        let mut hist = vec![0usize; side];
        for _ in 0..draws {
            match p.sample(&t, Location::site(2, 3), &mut r) {
                Location::Site { row, col } => {
                    assert_eq!(row, 2);
                    hist[col as usize] += 1;
                }
                _ => unreachable!(),
            }
        }
        // chi-square with side-1 degrees of freedom
        let expect = draws as f64 / side as f64;
        let chi2: f64 = hist.iter().map(|&h| (h as f64 - expect).powi(2) / expect).sum();
        assert!(chi2 < 20.5, "chi2 = {chi2}"); // 99.9% quantile for 5 dof
        let sigma = (expect * (1.0 - 1.0 / side as f64)).sqrt();
        assert!(hist.iter().all(|&h| (h as f64 - expect).abs() < 4.0 * sigma));
    }

    #[test]
    fn local_window_is_uniform_and_wraps() {
        let t = build_torus(10).unwrap();
        let p = MobilityPattern::Local { home: Location::site(0, 0), half_width: 1 };
        let mut r = rng(3);
        let mut hist = std::collections::HashMap::new();
        let draws = 90_000;
        for _ in 0..draws {
            let loc = p.sample(&t, Location::site(0, 0), &mut r);
            *hist.entry(format!("{loc:?}")).or_insert(0usize) += 1;
        }
        let mut expected = Vec::new();
        for row in [9, 0, 1] {
            for col in [9, 0, 1] {
                expected.push(Location::site(row, col));
            }
        }
        assert_eq!(hist.len(), 9);
        for loc in expected {
            let h = hist[&format!("{loc:?}")] as f64;
            assert!((h - 10_000.0).abs() < 400.0, "{loc:?} {h}");
        }
    }

    #[test]
    fn supports() {
        let t = build_torus(5).unwrap();
        let s = MobilityPattern::Static { home: Location::site(3, 4) }.support();
        assert_eq!(s.sites(&t), vec![Location::site(3, 4)]);
        let h = MobilityPattern::Horizontal { home: Location::site(2, 0) }.support();
        assert_eq!(h.sites(&t), (0..5).map(|k| Location::site(2, k)).collect::<Vec<_>>());
        assert_eq!(MobilityPattern::FullUniform.support().sites(&t).len(), 25);
        let w = MobilityPattern::Local { home: Location::site(0, 0), half_width: 1 }.support();
        assert_eq!(w.sites(&t).len(), 9);
        assert!(w.contains(&t, Location::site(4, 4)));
        assert!(!w.contains(&t, Location::site(2, 0)));
    }

    #[test]
    fn site_distributions_sum_to_one() {
        let t = build_torus(4).unwrap();
        let l = *t.as_lattice().unwrap();
        for p in [
            MobilityPattern::Static { home: Location::site(1, 1) },
            MobilityPattern::FullUniform,
            MobilityPattern::Horizontal { home: Location::site(1, 1) },
            MobilityPattern::Vertical { home: Location::site(1, 1) },
            // window wider than the torus: some sites carry double weight
            MobilityPattern::Local { home: Location::site(1, 1), half_width: 2 },
        ] {
            let d = p.site_distribution(&l);
            let total: f64 = d.iter().map(|&(_, q)| q).sum();
            assert!((total - 1.0).abs() < 1e-12, "{p:?}");
            for (s, _) in d {
                assert!(p.support().contains(&t, l.site_at(s)));
            }
        }
    }

    #[test]
    fn bidirectional_is_reproducible_and_balanced() {
        let t = build_torus(100).unwrap();
        let homes = t.all_sites();
        let a = assign_bidirectional(t, &homes, 11).unwrap();
        let b = assign_bidirectional(t, &homes, 11).unwrap();
        assert_eq!(a, b);
        let h = a
            .directions()
            .unwrap()
            .iter()
            .filter(|&&d| d == Direction::Horizontal)
            .count() as f64;
        // Binomial(10^4, 1/2): sd = 50
        assert!((h - 5000.0).abs() <= 150.0, "{h}");
    }

    #[test]
    fn rgg_row_classes_concentrate() {
        let n = 2000;
        let c1 = 10.0;
        let (t, pts) = build_rgg(n, c1, 4).unwrap();
        let a = assign_bidirectional(t, &pts, 5).unwrap();
        let part = subsquare_partition(&t, crate::topology::rgg_square_side(n, c1), &pts).unwrap();
        let classes = a.classes(&part).unwrap();
        let ln = (n as f64).ln();
        let expected = 0.5 * c1 * ln * (n as f64 / (c1 * ln)).sqrt();
        let mean: f64 = classes.horizontal.iter().map(|h| h.len() as f64).sum::<f64>()
            / classes.horizontal.len() as f64;
        assert!((mean / expected - 1.0).abs() < 0.1, "{mean} vs {expected}");
        for h in classes.horizontal.iter().chain(&classes.vertical) {
            assert!((h.len() as f64 / expected - 1.0).abs() < 0.3, "{}", h.len());
        }
    }

    #[test]
    fn random_walk_stays_in_row() {
        let t = build_torus(8).unwrap();
        let p = MobilityPattern::RowWalk { home: Location::site(3, 3), steps: 5 };
        let mut r = rng(6);
        let mut pos = Location::site(3, 3);
        for _ in 0..1000 {
            pos = p.sample(&t, pos, &mut r);
            assert!(p.support().contains(&t, pos));
        }
    }

    #[test]
    fn spec_names_round_trip() {
        for s in ["static", "full", "horizontal", "vertical", "bidirectional", "local:2", "rw:16", "plus-mobile:4"] {
            let spec: MobilitySpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("teleport".parse::<MobilitySpec>().is_err());
        assert!("local:x".parse::<MobilitySpec>().is_err());
    }

    #[test]
    fn local_rejected_on_unit_torus() {
        let (t, pts) = build_rgg(10, 10.0, 1).unwrap();
        assert!(MobilitySpec::Local(1).build(t, &pts, 0).is_err());
    }
}
