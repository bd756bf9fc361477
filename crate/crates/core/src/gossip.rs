//! Randomized pairwise gossip with mobile agents.
//!
//! One timeslot: every agent redraws its position, one agent is selected
//! uniformly, it picks a neighbour uniformly and both replace their values by
//! the pair mean. A timeslot in which the selected agent has no neighbour is
//! consumed without averaging.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mobility::{resample_in_place, MobilityAssignment};
use crate::topology::{Location, Topology};

/// Initial value vector `x(0)`.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialProfile {
    /// Value grows linearly along both axes of the space.
    LinearField,
    /// Agent 0 holds 1, everyone else 0.
    Spike,
    Custom(Vec<f64>),
}

impl InitialProfile {
    pub fn name(&self) -> &'static str {
        match self {
            InitialProfile::LinearField => "linear-field",
            InitialProfile::Spike => "spike",
            InitialProfile::Custom(_) => "custom",
        }
    }

    pub fn values(&self, topology: &Topology, positions: &[Location]) -> Result<Vec<f64>> {
        match self {
            InitialProfile::LinearField => {
                Ok(positions.iter().map(|&p| linear_field(topology, p)).collect())
            }
            InitialProfile::Spike => {
                let mut x = vec![0.0; positions.len()];
                if let Some(first) = x.first_mut() {
                    *first = 1.0;
                }
                Ok(x)
            }
            InitialProfile::Custom(x) if x.len() == positions.len() => Ok(x.clone()),
            InitialProfile::Custom(x) => Err(Error::InvalidInput(format!(
                "custom profile has {} values for {} agents",
                x.len(),
                positions.len()
            ))),
        }
    }
}

/// Linear field in `[0, 1]` increasing along rows and columns.
pub fn linear_field(topology: &Topology, loc: Location) -> f64 {
    match (topology, loc) {
        (Topology::Lattice(l), Location::Site { row, col }) => {
            let span = (l.rows() - 1 + l.cols() - 1).max(1) as f64;
            (row + col) as f64 / span
        }
        (_, Location::Point { u, v }) => 0.5 * (u + v),
        _ => 0.0,
    }
}

#[derive(Clone, Debug)]
pub struct GossipConfig {
    pub assignment: MobilityAssignment,
    pub profile: InitialProfile,
    pub epsilon: f64,
    pub max_ticks: usize,
    pub trials: usize,
    pub seed: u64,
}

impl GossipConfig {
    /// Defaults: linear field, `epsilon = 0.01`, 100 trials, seed 1.
    pub fn new(assignment: MobilityAssignment, max_ticks: usize) -> Self {
        Self {
            assignment,
            profile: InitialProfile::LinearField,
            epsilon: 0.01,
            max_ticks,
            trials: 100,
            seed: 1,
        }
    }

    pub fn topology(&self) -> &Topology {
        self.assignment.topology()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.max_ticks < 1 {
            return Err(Error::InvalidParameter("max ticks must be at least 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidParameter("need at least one trial".into()));
        }
        if self.assignment.len() < 2 {
            return Err(Error::InvalidParameter("need at least two agents".into()));
        }
        Ok(())
    }

    /// Independent stream for one trial, identical whatever the worker count.
    pub fn trial_rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

/// Positions and values at tick `t`.
#[derive(Clone, Debug)]
pub struct GossipState {
    pub tick: u64,
    pub positions: Vec<Location>,
    values: Vec<f64>,
    /// True average of `x(0)`.
    mean: f64,
    /// `||x - mean 1||^2`, updated per averaging and refreshed periodically.
    sq_dev: f64,
    /// Below this the running sum is recomputed every tick to keep its
    /// relative accuracy.
    refresh_below: f64,
    scratch: Vec<usize>,
}

const REFRESH_TICKS: u64 = 4096;

impl GossipState {
    pub fn new(positions: Vec<Location>, values: Vec<f64>) -> Self {
        assert_eq!(positions.len(), values.len());
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let mut s = Self {
            tick: 0,
            positions,
            values,
            mean,
            sq_dev: 0.0,
            refresh_below: 0.0,
            scratch: Vec::new(),
        };
        s.sq_dev = s.exact_sq_dev();
        s.refresh_below = 1e-4 * s.sq_dev;
        s
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    fn exact_sq_dev(&self) -> f64 {
        self.values
            .iter()
            .map(|x| (x - self.mean) * (x - self.mean))
            .sum()
    }

    /// Draws `t = 0` positions and values for one trial.
    pub fn initial<R: Rng + ?Sized>(
        assignment: &MobilityAssignment,
        profile: &InitialProfile,
        rng: &mut R,
    ) -> Result<Self> {
        let positions = assignment.initial_positions(rng);
        let values = profile.values(assignment.topology(), &positions)?;
        Ok(Self::new(positions, values))
    }

    /// `||x(t) - mean 1||_2`.
    pub fn deviation(&self) -> f64 {
        self.sq_dev.max(0.0).sqrt()
    }

    /// Advances one timeslot; returns the averaged pair, if any.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        assignment: &MobilityAssignment,
        rng: &mut R,
    ) -> Option<(usize, usize)> {
        self.tick += 1;
        resample_in_place(assignment, &mut self.positions, rng);
        let topology = assignment.topology();
        let n = self.values.len();
        let i = rng.random_range(0..n);
        let li = self.positions[i];
        self.scratch.clear();
        for (k, &lk) in self.positions.iter().enumerate() {
            if k != i && topology.in_contact(li, lk) {
                self.scratch.push(k);
            }
        }
        if self.scratch.is_empty() {
            return None;
        }
        let j = self.scratch[rng.random_range(0..self.scratch.len())];
        let (a, b) = (self.values[i], self.values[j]);
        // replacing a, b by their mean removes (a - b)^2 / 2 of squared deviation
        self.sq_dev -= 0.5 * (a - b) * (a - b);
        let avg = 0.5 * (a + b);
        self.values[i] = avg;
        self.values[j] = avg;
        if self.tick % REFRESH_TICKS == 0 || self.sq_dev < self.refresh_below {
            self.sq_dev = self.exact_sq_dev();
        }
        Some((i, j))
    }
}

/// One gossip timeslot.
pub fn step<R: Rng + ?Sized>(
    mut state: GossipState,
    assignment: &MobilityAssignment,
    rng: &mut R,
) -> GossipState {
    state.step(assignment, rng);
    state
}

/// Normalised error `e(t) = ||x(t) - mean 1|| / ||x(0)||` for `t = 0..=max_ticks`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub errors: Vec<f64>,
}

impl Trace {
    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("trace has tick 0")
    }

    /// First tick with error strictly below `epsilon`.
    pub fn first_below(&self, epsilon: f64) -> Option<usize> {
        self.errors.iter().position(|&e| e < epsilon)
    }
}

fn initial_state(config: &GossipConfig, rng: &mut ChaCha8Rng) -> Result<(GossipState, f64)> {
    config.validate()?;
    let state = GossipState::initial(&config.assignment, &config.profile, rng)?;
    let norm0 = state.values.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm0 == 0.0 {
        return Err(Error::InvalidInput(
            "x(0) = 0: the normalised error is undefined".into(),
        ));
    }
    Ok((state, norm0))
}

/// Error trace of one trial.
pub fn run_trial(config: &GossipConfig, trial: usize) -> Result<Trace> {
    run_trial_sampled(config, trial, 1).map(|s| s.trace)
}

/// Ticks recorded by a sampled trace: multiples of `stride` and the last tick.
pub fn sample_ticks(max_ticks: usize, stride: usize) -> Vec<usize> {
    let mut t: Vec<usize> = (0..=max_ticks).step_by(stride.max(1)).collect();
    if t.last() != Some(&max_ticks) {
        t.push(max_ticks);
    }
    t
}

/// A trace thinned to [`sample_ticks`], plus the exact first passage below epsilon.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledTrial {
    pub trace: Trace,
    pub first_below: Option<usize>,
}

pub fn run_trial_sampled(config: &GossipConfig, trial: usize, stride: usize) -> Result<SampledTrial> {
    let stride = stride.max(1);
    let mut rng = config.trial_rng(trial);
    let (mut state, norm0) = initial_state(config, &mut rng)?;
    let mut errors = Vec::with_capacity(config.max_ticks / stride + 2);
    let mut e = state.deviation() / norm0;
    errors.push(e);
    let mut first_below = (e < config.epsilon).then_some(0);
    for t in 1..=config.max_ticks {
        if state.step(&config.assignment, &mut rng).is_some() {
            e = state.deviation() / norm0;
            if first_below.is_none() && e < config.epsilon {
                first_below = Some(t);
            }
        }
        if t % stride == 0 || t == config.max_ticks {
            errors.push(e);
        }
    }
    Ok(SampledTrial { trace: Trace { errors }, first_below })
}

/// Error trace of trial 0.
pub fn run_trace(config: &GossipConfig) -> Result<Trace> {
    run_trial(config, 0)
}

/// All trials, in trial order.
pub fn run_trials(config: &GossipConfig) -> Result<Vec<Trace>> {
    (0..config.trials)
        .into_par_iter()
        .map(|k| run_trial(config, k))
        .collect()
}

/// First tick below `epsilon` for one trial, stopping early; `None` when the
/// trial is still above `epsilon` after `max_ticks`.
pub fn first_passage(config: &GossipConfig, trial: usize) -> Result<Option<usize>> {
    let mut rng = config.trial_rng(trial);
    let (mut state, norm0) = initial_state(config, &mut rng)?;
    if state.deviation() / norm0 < config.epsilon {
        return Ok(Some(0));
    }
    for t in 1..=config.max_ticks {
        if state.step(&config.assignment, &mut rng).is_some()
            && state.deviation() / norm0 < config.epsilon
        {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Per-tick quantiles over trials.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSummary {
    pub q10: Vec<f64>,
    pub q50: Vec<f64>,
    pub q90: Vec<f64>,
    pub mean: Vec<f64>,
}

impl TraceSummary {
    pub fn from_traces(traces: &[Trace]) -> Self {
        assert!(!traces.is_empty());
        let len = traces[0].errors.len();
        let mut out = TraceSummary {
            q10: Vec::with_capacity(len),
            q50: Vec::with_capacity(len),
            q90: Vec::with_capacity(len),
            mean: Vec::with_capacity(len),
        };
        let mut column = Vec::with_capacity(traces.len());
        for t in 0..len {
            column.clear();
            column.extend(traces.iter().map(|tr| tr.errors[t]));
            column.sort_by(f64::total_cmp);
            out.q10.push(quantile_sorted(&column, 0.1));
            out.q50.push(quantile_sorted(&column, 0.5));
            out.q90.push(quantile_sorted(&column, 0.9));
            out.mean.push(column.iter().sum::<f64>() / column.len() as f64);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Empirical epsilon-averaging time.
#[derive(Clone, Debug, PartialEq)]
pub struct AveTimeEstimate {
    pub ticks: usize,
    /// The estimate needs a trial that never got below epsilon.
    pub saturated: bool,
    /// 95% bootstrap percentile interval.
    pub ci: (usize, usize),
    pub trials: usize,
    /// Initial profile used; the estimate is for this x(0) only.
    pub profile: &'static str,
}

const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Smallest tick at which at most a fraction `epsilon` of the trials still
/// have error `>= epsilon`, for the configured initial profile.
pub fn estimate_ave_time(config: &GossipConfig) -> Result<AveTimeEstimate> {
    config.validate()?;
    let passages: Vec<Option<usize>> = (0..config.trials)
        .into_par_iter()
        .map(|k| first_passage(config, k))
        .collect::<Result<_>>()?;
    Ok(ave_time_from_passages(config, &passages))
}

/// Averaging-time estimate from per-trial first passages below epsilon.
pub fn ave_time_from_passages(config: &GossipConfig, passages: &[Option<usize>]) -> AveTimeEstimate {
    let estimate = |sample: &[Option<usize>]| -> Option<usize> {
        let mut sorted: Vec<usize> = sample.iter().map(|p| p.unwrap_or(usize::MAX)).collect();
        sorted.sort_unstable();
        let allowed = (config.epsilon * sorted.len() as f64 + 1e-9).floor() as usize;
        let t = sorted[sorted.len() - 1 - allowed.min(sorted.len() - 1)];
        (t != usize::MAX).then_some(t)
    };
    let point = estimate(passages);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::MAX);
    let mut boot: Vec<usize> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let sample: Vec<_> = (0..passages.len())
                .map(|_| passages[rng.random_range(0..passages.len())])
                .collect();
            estimate(&sample).unwrap_or(config.max_ticks)
        })
        .collect();
    boot.sort_unstable();
    let lo = boot[(0.025 * (BOOTSTRAP_RESAMPLES - 1) as f64).round() as usize];
    let hi = boot[(0.975 * (BOOTSTRAP_RESAMPLES - 1) as f64).round() as usize];
    AveTimeEstimate {
        ticks: point.unwrap_or(config.max_ticks),
        saturated: point.is_none(),
        ci: (lo, hi),
        trials: passages.len(),
        profile: config.profile.name(),
    }
}
