//! Spaces the agents move on.
//!
//! Two families are supported:
//!
//! * a discrete lattice with wraparound, either the `side × side` torus or a
//!   cycle of `n` sites (a `1 × n` lattice);
//! * the geometric unit torus `[0,1)²`, where two agents communicate when
//!   their wraparound distance is strictly below a radius `r(n)`.
//!
//! In both cases agents at the same location can always communicate.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Agent position: a lattice site or a point on the unit torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Location {
    Site { row: u32, col: u32 },
    Point { u: f64, v: f64 },
}

impl Location {
    pub fn site(row: usize, col: usize) -> Self {
        Location::Site {
            row: row as u32,
            col: col as u32,
        }
    }

    /// A point on the unit torus, reduced modulo 1.
    pub fn point(u: f64, v: f64) -> Self {
        Location::Point {
            u: wrap_unit(u),
            v: wrap_unit(v),
        }
    }
}

fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    // rem_euclid can return exactly 1.0 for tiny negative inputs
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Wraparound distance along one axis of the unit torus.
fn wrap_delta(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// Wraparound distance along one axis of a discrete cycle of length `len`.
fn wrap_steps(a: u32, b: u32, len: usize) -> usize {
    let d = (a as i64 - b as i64).unsigned_abs() as usize;
    d.min(len - d)
}

/// Discrete lattice with wraparound in both directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    rows: usize,
    cols: usize,
}

impl Lattice {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn site_count(&self) -> usize {
        self.rows * self.cols
    }

    /// `true` for the square torus (as opposed to a cycle).
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn index(&self, loc: Location) -> usize {
        match loc {
            Location::Site { row, col } => row as usize * self.cols + col as usize,
            Location::Point { .. } => panic!("continuous location on a lattice"),
        }
    }

    pub fn site_at(&self, index: usize) -> Location {
        Location::site(index / self.cols, index % self.cols)
    }

    pub fn wrap(&self, row: i64, col: i64) -> Location {
        Location::site(
            row.rem_euclid(self.rows as i64) as usize,
            col.rem_euclid(self.cols as i64) as usize,
        )
    }

    /// Lattice neighbours of a site, wraparound duplicates removed.
    pub fn site_neighbors(&self, index: usize) -> Vec<usize> {
        let (r, c) = ((index / self.cols) as i64, (index % self.cols) as i64);
        let mut out = Vec::with_capacity(4);
        for (dr, dc) in [(0, 1), (0, -1), (1, 0), (-1, 0)] {
            let j = self.index(self.wrap(r + dr, c + dc));
            if j != index && !out.contains(&j) {
                out.push(j);
            }
        }
        out
    }

    /// The site itself followed by its lattice neighbours.
    pub fn closed_neighborhood(&self, index: usize) -> Vec<usize> {
        let mut out = vec![index];
        out.extend(self.site_neighbors(index));
        out
    }

    /// Wraparound graph (Manhattan) distance.
    pub fn distance(&self, a: Location, b: Location) -> usize {
        match (a, b) {
            (Location::Site { row: r1, col: c1 }, Location::Site { row: r2, col: c2 }) => {
                wrap_steps(r1, r2, self.rows) + wrap_steps(c1, c2, self.cols)
            }
            _ => panic!("continuous location on a lattice"),
        }
    }

    #[inline]
    pub fn in_contact(&self, a: Location, b: Location) -> bool {
        self.distance(a, b) <= 1
    }
}

/// Unit torus with connectivity radius `r(n) = sqrt(5 c1 log n / n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricTorus {
    n: usize,
    c1: f64,
    radius: f64,
    seed: u64,
}

impl GeometricTorus {
    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The `n` uniform points generated from the stored seed.
    pub fn points(&self) -> Vec<Location> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.n)
            .map(|_| Location::point(rng.random::<f64>(), rng.random::<f64>()))
            .collect()
    }

    pub fn distance(&self, a: Location, b: Location) -> f64 {
        match (a, b) {
            (Location::Point { u: u1, v: v1 }, Location::Point { u: u2, v: v2 }) => {
                wrap_delta(u1, u2).hypot(wrap_delta(v1, v2))
            }
            _ => panic!("lattice location on the unit torus"),
        }
    }

    #[inline]
    pub fn in_contact(&self, a: Location, b: Location) -> bool {
        self.distance(a, b) < self.radius
    }
}

/// Default connectivity radius for `n` agents.
pub fn rgg_radius(n: usize, c1: f64) -> f64 {
    (5.0 * c1 * (n as f64).ln() / n as f64).sqrt()
}

/// Side of the tiling sub-square closest to `sqrt(c1 log n / n)`.
///
/// The target side rarely divides the unit torus, so the number of squares
/// per side is rounded to the nearest integer (at least 1).
pub fn rgg_square_side(n: usize, c1: f64) -> f64 {
    let target = (c1 * (n as f64).ln() / n as f64).sqrt();
    let per_side = (1.0 / target).round().max(1.0);
    1.0 / per_side
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Topology {
    Lattice(Lattice),
    Geometric(GeometricTorus),
}

impl Topology {
    pub fn as_lattice(&self) -> Option<&Lattice> {
        match self {
            Topology::Lattice(l) => Some(l),
            Topology::Geometric(_) => None,
        }
    }

    pub fn as_geometric(&self) -> Option<&GeometricTorus> {
        match self {
            Topology::Geometric(g) => Some(g),
            Topology::Lattice(_) => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Topology::Lattice(_))
    }

    /// Communication rule: same location, lattice edge, or distance `< r`.
    #[inline]
    pub fn in_contact(&self, a: Location, b: Location) -> bool {
        match self {
            Topology::Lattice(l) => l.in_contact(a, b),
            Topology::Geometric(g) => g.in_contact(a, b),
        }
    }

    /// Wraparound distance (graph distance on lattices).
    pub fn distance(&self, a: Location, b: Location) -> f64 {
        match self {
            Topology::Lattice(l) => l.distance(a, b) as f64,
            Topology::Geometric(g) => g.distance(a, b),
        }
    }

    /// Checks that a location belongs to this space.
    pub fn contains(&self, loc: Location) -> bool {
        match (self, loc) {
            (Topology::Lattice(l), Location::Site { row, col }) => {
                (row as usize) < l.rows && (col as usize) < l.cols
            }
            (Topology::Geometric(_), Location::Point { u, v }) => {
                (0.0..1.0).contains(&u) && (0.0..1.0).contains(&v)
            }
            _ => false,
        }
    }

    /// Home sites `0..rows*cols` in row-major order (lattices only).
    pub fn all_sites(&self) -> Vec<Location> {
        match self {
            Topology::Lattice(l) => (0..l.site_count()).map(|i| l.site_at(i)).collect(),
            Topology::Geometric(_) => Vec::new(),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Lattice(l) if l.rows == 1 => write!(f, "cycle:{}", l.cols),
            Topology::Lattice(l) => write!(f, "torus:{}", l.rows),
            Topology::Geometric(g) => write!(f, "rgg:{}:{}:{}", g.n, g.c1, g.seed),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    /// Parses `torus:<side>`, `cycle:<n>` or `rgg:<n>:<c1>[:<seed>]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::Usage(format!("bad topology descriptor `{s}`"));
        let int = |p: &str| p.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            ["torus", side] => build_torus(int(side)?),
            ["cycle", n] => build_cycle(int(n)?),
            ["rgg", n, c1] | ["rgg", n, c1, _] => {
                let c1: f64 = c1.parse().map_err(|_| bad())?;
                let seed = match parts.get(3) {
                    Some(p) => p.parse::<u64>().map_err(|_| bad())?,
                    None => 1,
                };
                build_rgg(int(n)?, c1, seed).map(|(t, _)| t)
            }
            _ => Err(bad()),
        }
    }
}

/// The `side × side` discrete torus.
pub fn build_torus(side: usize) -> Result<Topology> {
    if side < 2 {
        return Err(Error::InvalidParameter(format!(
            "torus side must be at least 2, got {side}"
        )));
    }
    Ok(Topology::Lattice(Lattice {
        rows: side,
        cols: side,
    }))
}

/// A cycle of `n` sites.
pub fn build_cycle(n: usize) -> Result<Topology> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle needs at least 3 sites, got {n}"
        )));
    }
    Ok(Topology::Lattice(Lattice { rows: 1, cols: n }))
}

/// Random geometric graph on the unit torus: `n` uniform points and radius
/// `sqrt(5 c1 log n / n)`. Deterministic in `seed`.
pub fn build_rgg(n: usize, c1: f64, seed: u64) -> Result<(Topology, Vec<Location>)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "RGG needs at least 2 agents, got {n}"
        )));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::InvalidParameter(format!("c1 must be positive, got {c1}")));
    }
    let radius = rgg_radius(n, c1);
    if radius >= 0.5 {
        log::warn!("rgg radius {radius:.3} >= 1/2: the communication graph is trivially complete");
    }
    let geo = GeometricTorus {
        n,
        c1,
        radius,
        seed,
    };
    let points = geo.points();
    Ok((Topology::Geometric(geo), points))
}

/// Neighbour set `N_i`: every other agent co-located with or adjacent to `i`.
pub fn neighbors(topology: &Topology, positions: &[Location], i: usize) -> Vec<usize> {
    let li = positions[i];
    positions
        .iter()
        .enumerate()
        .filter(|&(k, &lk)| k != i && topology.in_contact(li, lk))
        .map(|(k, _)| k)
        .collect()
}

/// Square tiling of the space with per-square agent counts `B_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsquarePartition {
    square_side: f64,
    per_side: usize,
    cell: Cell,
    /// Square index of each agent.
    pub assignment: Vec<usize>,
    /// Number of agents per square.
    pub counts: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Cell {
    Sites(usize),
    Unit,
}

impl SubsquarePartition {
    pub fn square_side(&self) -> f64 {
        self.square_side
    }

    /// Squares along each axis.
    pub fn per_side(&self) -> usize {
        self.per_side
    }

    pub fn square_count(&self) -> usize {
        self.per_side * self.per_side
    }

    /// `(row, col)` of the square containing `loc`.
    pub fn square_coords(&self, loc: Location) -> (usize, usize) {
        match (self.cell, loc) {
            (Cell::Sites(s), Location::Site { row, col }) => (row as usize / s, col as usize / s),
            (Cell::Unit, Location::Point { u, v }) => {
                let k = self.per_side as f64;
                let r = ((v * k) as usize).min(self.per_side - 1);
                let c = ((u * k) as usize).min(self.per_side - 1);
                (r, c)
            }
            _ => panic!("location kind does not match the partition"),
        }
    }

    pub fn square_of(&self, loc: Location) -> usize {
        let (r, c) = self.square_coords(loc);
        r * self.per_side + c
    }

    pub fn min_count(&self) -> usize {
        self.counts.iter().copied().min().unwrap_or(0)
    }

    pub fn max_count(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

/// Tiles the space with squares of the given side and counts agents per square.
///
/// On a lattice the side must be an integer dividing the torus side; on the
/// unit torus `1 / square_side` must be an integer up to `1e-9`.
pub fn subsquare_partition(
    topology: &Topology,
    square_side: f64,
    positions: &[Location],
) -> Result<SubsquarePartition> {
    let non_tiling =
        || Error::InvalidParameter(format!("square side {square_side} does not tile the space"));
    let (per_side, cell) = match topology {
        Topology::Lattice(l) => {
            if !l.is_square() {
                return Err(Error::InvalidParameter(
                    "sub-square partition needs a square torus".into(),
                ));
            }
            let s = square_side.round();
            if (square_side - s).abs() > 1e-9 || s < 1.0 || l.rows % (s as usize) != 0 {
                return Err(non_tiling());
            }
            (l.rows / s as usize, Cell::Sites(s as usize))
        }
        Topology::Geometric(_) => {
            if !(square_side > 0.0 && square_side <= 1.0) {
                return Err(non_tiling());
            }
            let k = (1.0 / square_side).round();
            if (k * square_side - 1.0).abs() > 1e-9 {
                return Err(non_tiling());
            }
            (k as usize, Cell::Unit)
        }
    };
    let mut part = SubsquarePartition {
        square_side,
        per_side,
        cell,
        assignment: Vec::with_capacity(positions.len()),
        counts: vec![0; per_side * per_side],
    };
    for &p in positions {
        if !topology.contains(p) {
            return Err(Error::InvalidInput(format!("{p:?} is not a location of {topology}")));
        }
        let sq = part.square_of(p);
        part.assignment.push(sq);
        part.counts[sq] += 1;
    }
    Ok(part)
}
