//! Flows for the specific mobility models. Every agent has stationary mass
//! `1/N`, so each ordered pair must route `1/N^2`.

use crate::bounds::flow::Flow;
use crate::error::{Error, Result};
use crate::mobility::{Direction, MobilityAssignment, MobilityPattern};
use crate::topology::{Lattice, Location};

fn unsupported(msg: &str) -> Error {
    Error::UnsupportedInstance(msg.into())
}

fn demand(assignment: &MobilityAssignment) -> f64 {
    let n = assignment.len() as f64;
    1.0 / (n * n)
}

/// Base agents static with one agent per site; returns the lattice.
fn static_population(assignment: &MobilityAssignment) -> Result<Lattice> {
    let lattice = *assignment
        .topology()
        .as_lattice()
        .ok_or_else(|| unsupported("needs a lattice"))?;
    let base = &assignment.patterns()[..assignment.base_agents()];
    if base.len() != lattice.site_count() {
        return Err(unsupported("needs one static agent per site"));
    }
    let mut seen = vec![false; base.len()];
    for p in base {
        match p {
            MobilityPattern::Static { home } => seen[lattice.index(*home)] = true,
            _ => return Err(unsupported("base agents must be static")),
        }
    }
    if seen.contains(&false) {
        return Err(unsupported("needs one static agent per site"));
    }
    Ok(lattice)
}

fn appended_full_movers(assignment: &MobilityAssignment) -> Result<usize> {
    let extra = &assignment.patterns()[assignment.base_agents()..];
    if extra.is_empty() || extra.iter().any(|p| *p != MobilityPattern::FullUniform) {
        return Err(unsupported("needs at least one appended fully mobile agent"));
    }
    Ok(extra.len())
}

/// Every pair routed on its own edge; for fully mobile populations.
pub fn direct_flow(assignment: &MobilityAssignment) -> Result<Flow> {
    if assignment.patterns().iter().any(|p| *p != MobilityPattern::FullUniform) {
        return Err(unsupported("direct flow expects every agent fully mobile"));
    }
    let n = assignment.len();
    Ok(Flow::direct(&vec![1.0 / n as f64; n]))
}

/// Static cycle plus one mobile agent `v`: static pairs go through `v`, pairs
/// involving `v` go direct.
pub fn hub_flow(assignment: &MobilityAssignment) -> Result<Flow> {
    let lattice = static_population(assignment)?;
    if lattice.rows() != 1 {
        return Err(unsupported("hub flow is built on a cycle"));
    }
    if appended_full_movers(assignment)? != 1 {
        return Err(unsupported("hub flow expects exactly one mobile agent"));
    }
    let n = assignment.base_agents();
    let hub = n;
    let d = demand(assignment);
    let mut f = Flow::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                f.push(&[i, hub, j], d);
            }
        }
        f.push(&[i, hub], d);
        f.push(&[hub, i], d);
    }
    Ok(f)
}

/// Static torus plus `m` mobile agents: static pairs split their demand over
/// the `m` two-hop paths through mobile agents, all other pairs go direct.
pub fn torus_plus_m_flow(assignment: &MobilityAssignment) -> Result<Flow> {
    let lattice = static_population(assignment)?;
    if !lattice.is_square() {
        return Err(unsupported("torus plus m flow is built on a square torus"));
    }
    let m = appended_full_movers(assignment)?;
    let n = assignment.base_agents();
    let total = n + m;
    let d = demand(assignment);
    let mut f = Flow::new();
    for i in 0..total {
        for j in 0..total {
            if i == j {
                continue;
            }
            if i < n && j < n {
                for k in n..total {
                    f.push(&[i, k, j], d / m as f64);
                }
            } else {
                f.push(&[i, j], d);
            }
        }
    }
    Ok(f)
}

/// Local mobility with window half-width `m` on a torus whose side is a
/// multiple of `m`. The torus is cut into `m x m` squares; a pair in squares
/// `A` and `B` travels along the squares of the L-shaped route from `A`
/// (horizontal first, then vertical). Pairs with no square strictly between
/// go direct; otherwise the demand is split over `m^2` lanes and every
/// intermediate square spreads the lanes over all of its agents.
pub fn l_shaped_flow(assignment: &MobilityAssignment) -> Result<Flow> {
    let lattice = *assignment
        .topology()
        .as_lattice()
        .ok_or_else(|| unsupported("l-shaped flow needs a lattice"))?;
    if !lattice.is_square() {
        return Err(unsupported("l-shaped flow needs a square torus"));
    }
    let side = lattice.rows();
    let mut m = None;
    let mut homes = vec![usize::MAX; lattice.site_count()];
    for (a, p) in assignment.patterns().iter().enumerate() {
        match *p {
            MobilityPattern::Local { home, half_width } if m.is_none_or(|w| w == half_width) => {
                m = Some(half_width);
                homes[lattice.index(home)] = a;
            }
            _ => return Err(unsupported("l-shaped flow expects local mobility with one window")),
        }
    }
    if assignment.len() != lattice.site_count() || homes.contains(&usize::MAX) {
        return Err(unsupported("l-shaped flow needs one agent per site"));
    }
    let m = m.unwrap_or(0);
    if m == 0 || side % m != 0 {
        return Err(unsupported("window half-width must divide the torus side"));
    }
    let k = side / m;
    let lanes = m * m;
    // members[sq][local] = agent with home at that position of square sq
    let mut members = vec![vec![0usize; lanes]; k * k];
    let mut square = vec![0usize; assignment.len()];
    let mut local = vec![0usize; assignment.len()];
    for r in 0..side {
        for c in 0..side {
            let a = homes[lattice.index(Location::site(r, c))];
            let sq = (r / m) * k + c / m;
            let lo = (r % m) * m + c % m;
            members[sq][lo] = a;
            square[a] = sq;
            local[a] = lo;
        }
    }
    let step = |from: usize, to: usize| -> i64 {
        let fwd = (to + k - from) % k;
        if fwd <= k - fwd {
            1
        } else {
            -1
        }
    };
    let route = |a: usize, b: usize| -> Vec<usize> {
        let (mut r, mut c) = (a / k, a % k);
        let (rb, cb) = (b / k, b % k);
        let mut out = Vec::new();
        let dc = step(c, cb);
        while c != cb {
            c = (c as i64 + dc).rem_euclid(k as i64) as usize;
            out.push(r * k + c);
        }
        let dr = step(r, rb);
        while r != rb {
            r = (r as i64 + dr).rem_euclid(k as i64) as usize;
            out.push(r * k + c);
        }
        out.pop();
        out
    };
    let d = demand(assignment);
    let n = assignment.len();
    let mut f = Flow::new();
    let mut path = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let between = if square[i] == square[j] { Vec::new() } else { route(square[i], square[j]) };
            if between.is_empty() {
                f.push(&[i, j], d);
                continue;
            }
            for lane in 0..lanes {
                path.clear();
                path.push(i);
                for (t, &sq) in between.iter().enumerate() {
                    path.push(members[sq][(lane + (t + 1) * local[i]) % lanes]);
                }
                path.push(j);
                f.push(&path, d / lanes as f64);
            }
        }
    }
    Ok(f)
}

/// Horizontal/vertical movers: pairs of opposite direction meet directly;
/// same-direction pairs relay through every agent of the other direction,
/// each relay carrying an equal share.
pub fn bidirectional_flow(assignment: &MobilityAssignment) -> Result<Flow> {
    let dirs = assignment
        .directions()
        .ok_or_else(|| unsupported("bidirectional flow expects horizontal and vertical movers only"))?;
    let horizontal: Vec<usize> = (0..dirs.len()).filter(|&a| dirs[a] == Direction::Horizontal).collect();
    let vertical: Vec<usize> = (0..dirs.len()).filter(|&a| dirs[a] == Direction::Vertical).collect();
    if horizontal.is_empty() || vertical.is_empty() {
        return Err(unsupported("bidirectional flow needs both directions present"));
    }
    let d = demand(assignment);
    let mut f = Flow::new();
    for i in 0..dirs.len() {
        for j in 0..dirs.len() {
            if i == j {
                continue;
            }
            if dirs[i] != dirs[j] {
                f.push(&[i, j], d);
                continue;
            }
            let relays = if dirs[i] == Direction::Horizontal { &vertical } else { &horizontal };
            for &v in relays {
                f.push(&[i, v, j], d / relays.len() as f64);
            }
        }
    }
    Ok(f)
}
