//! Drivers for the simulation figures and the scaling sweep.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::chain::contact::{contact_probabilities, ContactMode};
use crate::chain::matrix::expected_matrix;
use crate::chain::spectral::relaxation_time;
use crate::error::Result;
use crate::gossip::{
    ave_time_from_passages, run_trial_sampled, sample_ticks, AveTimeEstimate, GossipConfig, Trace,
    TraceSummary,
};
use crate::harness::fit::{fit_log_log, ScalingFit};
use crate::harness::spec::{ExperimentName, ExperimentSpec};
use crate::mobility::{MobilityAssignment, MobilitySpec};
use crate::topology::build_torus;

/// Rows kept per curve file.
const CURVE_POINTS: usize = 2000;

/// Quantile band of the error over trials for one configuration.
#[derive(Clone, Debug)]
pub struct Curve {
    pub label: String,
    pub side: usize,
    pub agents: usize,
    pub param: Option<usize>,
    pub ticks: Vec<usize>,
    pub summary: TraceSummary,
    pub ave_time: AveTimeEstimate,
    /// Error of every trial at the last tick.
    pub final_errors: Vec<f64>,
    pub t_relax: Option<f64>,
}

impl Curve {
    pub fn final_median(&self) -> f64 {
        *self.summary.q50.last().expect("non-empty curve")
    }

    /// Natural log of the median final error.
    pub fn final_log_error(&self) -> f64 {
        self.final_median().ln()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut wr = csv::Writer::from_path(path)?;
        wr.write_record([
            "tick",
            "q10_relative_l2_error",
            "median_relative_l2_error",
            "q90_relative_l2_error",
            "mean_relative_l2_error",
        ])?;
        for (k, t) in self.ticks.iter().enumerate() {
            wr.write_record([
                t.to_string(),
                format!("{:e}", self.summary.q10[k]),
                format!("{:e}", self.summary.q50[k]),
                format!("{:e}", self.summary.q90[k]),
                format!("{:e}", self.summary.mean[k]),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Runs every trial of `config`, keeping about [`CURVE_POINTS`] ticks.
pub fn run_curve(label: impl Into<String>, side: usize, param: Option<usize>, config: &GossipConfig) -> Result<Curve> {
    config.validate()?;
    let stride = config.max_ticks.div_ceil(CURVE_POINTS).max(1);
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|k| run_trial_sampled(config, k, stride))
        .collect::<Result<Vec<_>>>()?;
    let passages: Vec<Option<usize>> = trials.iter().map(|t| t.first_below).collect();
    let traces: Vec<Trace> = trials.into_iter().map(|t| t.trace).collect();
    Ok(Curve {
        label: label.into(),
        side,
        agents: config.assignment.len(),
        param,
        ticks: sample_ticks(config.max_ticks, stride),
        summary: TraceSummary::from_traces(&traces),
        ave_time: ave_time_from_passages(config, &passages),
        final_errors: traces.iter().map(Trace::final_error).collect(),
        t_relax: None,
    })
}

/// Exact relaxation time of an iid lattice assignment.
pub fn exact_t_relax(assignment: &MobilityAssignment) -> Result<f64> {
    relaxation_time(&expected_matrix(&contact_probabilities(assignment, ContactMode::Exact, 0)?)?)
}

/// `ceil(factor * T_relax * ln(1/epsilon))`.
pub fn tick_budget(t_relax: f64, epsilon: f64, factor: f64) -> usize {
    (factor * t_relax * (1.0 / epsilon).ln()).ceil() as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub mobility: MobilitySpec,
    pub side: usize,
    pub agents: usize,
    pub t_relax: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub curves: Vec<Curve>,
    pub scaling: Vec<ScalingRow>,
    pub fits: Vec<(MobilitySpec, ScalingFit)>,
    /// Derived figures of merit, in the order computed.
    pub metrics: Vec<(String, f64)>,
    pub files: Vec<PathBuf>,
}

impl ExperimentOutput {
    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn curve(&self, label: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.label == label)
    }
}

struct Runner<'a> {
    spec: &'a ExperimentSpec,
    out: ExperimentOutput,
}

impl Runner<'_> {
    fn config(&self, assignment: MobilityAssignment, ticks: usize) -> GossipConfig {
        let mut c = GossipConfig::new(assignment, ticks);
        c.epsilon = self.spec.epsilon;
        c.trials = self.spec.trials;
        c.seed = self.spec.seed;
        c
    }

    fn curve(
        &mut self,
        label: String,
        side: usize,
        param: Option<usize>,
        assignment: MobilityAssignment,
        ticks: usize,
        t_relax: Option<f64>,
    ) -> Result<usize> {
        log::info!("{}: running {label} for {ticks} ticks", self.spec.name);
        let mut c = run_curve(label, side, param, &self.config(assignment, ticks))?;
        c.t_relax = t_relax;
        self.out.curves.push(c);
        Ok(self.out.curves.len() - 1)
    }

    fn metric(&mut self, key: String, value: f64) {
        self.out.metrics.push((key, value));
    }

    fn ave(&self, idx: usize) -> f64 {
        self.out.curves[idx].ave_time.ticks as f64
    }

    fn no_vs_horizontal(&mut self) -> Result<()> {
        for &side in &self.spec.sizes {
            let t = build_torus(side)?;
            let st = MobilitySpec::Static.build(t, &t.all_sites(), self.spec.seed)?;
            let ho = MobilitySpec::Horizontal.build(t, &t.all_sites(), self.spec.seed)?;
            let (ts, th) = (exact_t_relax(&st)?, exact_t_relax(&ho)?);
            let ticks = self.spec.ticks.unwrap_or_else(|| tick_budget(ts.max(th), self.spec.epsilon, 3.0));
            let a = self.curve(format!("static-{side}"), side, None, st, ticks, Some(ts))?;
            let b = self.curve(format!("horizontal-{side}"), side, None, ho, ticks, Some(th))?;
            let (x, y) = (self.ave(a), self.ave(b));
            self.metric(format!("gap_ratio_side{side}"), x.max(y) / x.min(y));
        }
        Ok(())
    }

    fn full_vs_bidirectional(&mut self) -> Result<()> {
        for &side in &self.spec.sizes {
            let t = build_torus(side)?;
            let full = MobilitySpec::Full.build(t, &t.all_sites(), self.spec.seed)?;
            let bi = MobilitySpec::Bidirectional.build(t, &t.all_sites(), self.spec.seed)?;
            let (tf, tb) = (exact_t_relax(&full)?, exact_t_relax(&bi)?);
            let ticks = self.spec.ticks.unwrap_or_else(|| tick_budget(tf.max(tb), self.spec.epsilon, 3.0));
            let a = self.curve(format!("full-{side}"), side, None, full, ticks, Some(tf))?;
            let b = self.curve(format!("bidirectional-{side}"), side, None, bi, ticks, Some(tb))?;
            let r = self.ave(b) / self.ave(a);
            self.metric(format!("bidirectional_over_full_side{side}"), r);
        }
        Ok(())
    }

    fn add_mobile(&mut self) -> Result<()> {
        let side = self.spec.sizes[0];
        let t = build_torus(side)?;
        let ticks = self.spec.ticks.unwrap_or(20_000);
        for &m in &self.spec.params {
            let a = MobilitySpec::PlusMobile(m).build(t, &t.all_sites(), self.spec.seed)?;
            let idx = self.curve(format!("plus-{m}"), side, Some(m), a, ticks, None)?;
            let v = self.out.curves[idx].final_log_error();
            self.metric(format!("final_log_error_m{m}"), v);
        }
        Ok(())
    }

    fn random_walk_mixing(&mut self) -> Result<()> {
        let side = self.spec.sizes[0];
        let t = build_torus(side)?;
        let ho = MobilitySpec::Horizontal.build(t, &t.all_sites(), self.spec.seed)?;
        let th = exact_t_relax(&ho)?;
        let ticks = self.spec.ticks.unwrap_or_else(|| tick_budget(th, self.spec.epsilon, 1.0));
        let idx = self.curve("horizontal".into(), side, None, ho, ticks, Some(th))?;
        let v = self.out.curves[idx].final_median();
        self.metric("final_median_error_horizontal".into(), v);
        for &steps in &self.spec.params {
            let a = MobilitySpec::RandomWalk(steps).build(t, &t.all_sites(), self.spec.seed)?;
            let idx = self.curve(format!("rw-{steps}"), side, Some(steps), a, ticks, None)?;
            let v = self.out.curves[idx].final_median();
            self.metric(format!("final_median_error_rw{steps}"), v);
        }
        Ok(())
    }

    fn scaling_fit(&mut self) -> Result<()> {
        for &mobility in &self.spec.mobility {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for &side in &self.spec.sizes {
                let t = build_torus(side)?;
                let a = mobility.build(t, &t.all_sites(), self.spec.seed)?;
                let tr = exact_t_relax(&a)?;
                xs.push(a.len() as f64);
                ys.push(tr);
                self.out.scaling.push(ScalingRow { mobility, side, agents: a.len(), t_relax: tr });
            }
            let fit = fit_log_log(&xs, &ys)?;
            self.metric(format!("slope_{mobility}"), fit.slope);
            self.metric(format!("slope_ci_low_{mobility}"), fit.ci.0);
            self.metric(format!("slope_ci_high_{mobility}"), fit.ci.1);
            self.out.fits.push((mobility, fit));
        }
        Ok(())
    }

    fn write(&mut self) -> Result<()> {
        let dir = &self.spec.out;
        fs::create_dir_all(dir)?;
        for c in &self.out.curves {
            let p = dir.join(format!("{}.csv", c.label));
            c.write_csv(&p)?;
            self.out.files.push(p);
        }
        if !self.out.curves.is_empty() {
            let p = dir.join("summary.csv");
            let mut wr = csv::Writer::from_path(&p)?;
            wr.write_record([
                "curve",
                "side",
                "agents",
                "param",
                "tick_budget",
                "ticks_to_epsilon",
                "ticks_ci_low",
                "ticks_ci_high",
                "saturated",
                "final_median_relative_l2_error",
                "t_relax_ticks",
            ])?;
            for c in &self.out.curves {
                wr.write_record([
                    c.label.clone(),
                    c.side.to_string(),
                    c.agents.to_string(),
                    c.param.map_or(String::new(), |p| p.to_string()),
                    c.ticks.last().unwrap().to_string(),
                    c.ave_time.ticks.to_string(),
                    c.ave_time.ci.0.to_string(),
                    c.ave_time.ci.1.to_string(),
                    c.ave_time.saturated.to_string(),
                    format!("{:e}", c.final_median()),
                    c.t_relax.map_or(String::new(), |t| format!("{t:e}")),
                ])?;
            }
            wr.flush()?;
            self.out.files.push(p);
        }
        if !self.out.scaling.is_empty() {
            let p = dir.join("scaling.csv");
            let mut wr = csv::Writer::from_path(&p)?;
            wr.write_record(["mobility", "side", "agents", "t_relax_ticks"])?;
            for r in &self.out.scaling {
                wr.write_record([
                    r.mobility.to_string(),
                    r.side.to_string(),
                    r.agents.to_string(),
                    format!("{:e}", r.t_relax),
                ])?;
            }
            wr.flush()?;
            self.out.files.push(p);
        }
        let p = dir.join("metrics.txt");
        let mut f = fs::File::create(&p)?;
        writeln!(f, "experiment={}", self.spec.name)?;
        writeln!(f, "epsilon={}", self.spec.epsilon)?;
        writeln!(f, "trials={}", self.spec.trials)?;
        writeln!(f, "seed={}", self.spec.seed)?;
        for (k, v) in &self.out.metrics {
            writeln!(f, "{k}={v:.9e}")?;
        }
        self.out.files.push(p);
        Ok(())
    }
}

/// Runs the experiment and writes its CSV files and `metrics.txt` under `spec.out`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let mut r = Runner {
        spec,
        out: ExperimentOutput {
            curves: Vec::new(),
            scaling: Vec::new(),
            fits: Vec::new(),
            metrics: Vec::new(),
            files: Vec::new(),
        },
    };
    match spec.name {
        ExperimentName::NoVsHorizontal => r.no_vs_horizontal()?,
        ExperimentName::FullVsBidirectional => r.full_vs_bidirectional()?,
        ExperimentName::AddMobile => r.add_mobile()?,
        ExperimentName::RandomWalkMixing => r.random_walk_mixing()?,
        ExperimentName::ScalingFit => r.scaling_fit()?,
    }
    r.write()?;
    Ok(r.out)
}
