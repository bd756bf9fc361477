use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mobgossip::bounds::{
    bidirectional_flow, certify, direct_flow, hub_flow, l_shaped_flow, lower_bound_via_merge,
    torus_plus_m_flow, BoundMethod, BoundReport, Partition,
};
use mobgossip::chain::{
    central_node_test_function, contact_probabilities, expected_matrix, spectrum, ContactMode,
    TransitionMatrix,
};
use mobgossip::gossip::{
    estimate_ave_time, run_trace, run_trials, GossipConfig, InitialProfile, TraceSummary,
};
use mobgossip::harness::{
    fit_scaling, run_experiment, ExperimentName, ExperimentSpec, Quantity, ScalingInstance,
};
use mobgossip::mobility::{MobilityAssignment, MobilitySpec};
use mobgossip::topology::{build_rgg, Topology};
use mobgossip::{Error, Result};

#[derive(Parser)]
#[command(name = "mobgossip", version, about = "Gossip averaging with mobile agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Instance {
    /// torus:<side>, cycle:<n> or rgg:<n>:<c1>[:<seed>]
    #[arg(long, default_value = "torus:8")]
    topology: Topology,
    /// static, full, horizontal, vertical, bidirectional, local:<m>, rw:<steps>, plus-mobile:<m>
    #[arg(long, default_value = "static")]
    mobility: MobilitySpec,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo samples for contact probabilities; exact when omitted and possible.
    #[arg(long)]
    samples: Option<usize>,
}

impl Instance {
    fn assignment(&self) -> Result<MobilityAssignment> {
        let homes = match self.topology {
            Topology::Geometric(g) => build_rgg(g.agents(), g.c1(), g.seed())?.1,
            t => t.all_sites(),
        };
        self.mobility.build(self.topology, &homes, self.seed)
    }

    fn mode(&self) -> ContactMode {
        match (self.samples, self.topology.is_discrete()) {
            (Some(samples), _) => ContactMode::MonteCarlo { samples },
            (None, true) => ContactMode::Exact,
            (None, false) => ContactMode::MonteCarlo { samples: mobgossip::chain::contact::DEFAULT_SAMPLES },
        }
    }

    fn matrix(&self, a: &MobilityAssignment) -> Result<TransitionMatrix> {
        expected_matrix(&contact_probabilities(a, self.mode(), self.seed)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    LinearField,
    Spike,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlowKind {
    Direct,
    Hub,
    TorusPlusM,
    LShaped,
    Bidirectional,
}

#[derive(Clone, Copy, ValueEnum)]
enum LowerMethod {
    /// Induced chain of a merge partition.
    Merge,
    /// Column tent test function on the torus with a central node.
    Rayleigh,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitQuantity {
    TRelax,
    TAve,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate gossip and estimate the averaging time.
    Simulate {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 10_000)]
        ticks: usize,
        #[arg(long, value_enum, default_value = "linear-field")]
        profile: Profile,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Second eigenvalue and relaxation time of the expected matrix.
    Spectrum {
        #[command(flatten)]
        instance: Instance,
        /// Also write the matrix as dense CSV and coordinate list.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bound on the relaxation time.
    LowerBound {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, value_enum, default_value = "merge")]
        method: LowerMethod,
        /// rows, columns, sites, whole or bands:<height>
        #[arg(long, default_value = "rows")]
        partition: String,
    },
    /// Poincare upper bound from a named flow.
    FlowBound {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, value_enum)]
        flow: FlowKind,
        /// Write per-edge loads here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment.
    Experiment {
        name: String,
        /// TOML spec; flags given here override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<usize>>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        ticks: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Fit the scaling exponent of a quantity over torus sides.
    Fit {
        #[arg(long, value_delimiter = ',', default_value = "4,6,8,10,12")]
        sides: Vec<usize>,
        #[arg(long, default_value = "static")]
        mobility: MobilitySpec,
        #[arg(long, value_enum, default_value = "t-relax")]
        quantity: FitQuantity,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 100_000)]
        ticks: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

enum Outcome {
    Done,
    Uncertified,
}

fn parse_partition(s: &str) -> Result<Partition> {
    match s.split_once(':') {
        None => match s {
            "rows" => Ok(Partition::Rows),
            "columns" => Ok(Partition::Columns),
            "sites" => Ok(Partition::Sites),
            "whole" => Ok(Partition::Whole),
            _ => Err(Error::Usage(format!("unknown partition `{s}`"))),
        },
        Some(("bands", h)) => h
            .parse()
            .map(|height| Partition::RowBands { height })
            .map_err(|_| Error::Usage(format!("bad band height `{h}`"))),
        _ => Err(Error::Usage(format!("unknown partition `{s}`"))),
    }
}

fn simulate(
    instance: &Instance,
    epsilon: f64,
    trials: usize,
    ticks: usize,
    profile: Profile,
    out: &Path,
) -> Result<Outcome> {
    let mut c = GossipConfig::new(instance.assignment()?, ticks);
    c.epsilon = epsilon;
    c.trials = trials;
    c.seed = instance.seed;
    c.profile = match profile {
        Profile::LinearField => InitialProfile::LinearField,
        Profile::Spike => InitialProfile::Spike,
    };
    fs::create_dir_all(out)?;
    let trace = run_trace(&c)?;
    let mut wr = csv::Writer::from_path(out.join("trace.csv"))?;
    wr.write_record(["tick", "relative_l2_error"])?;
    for (t, e) in trace.errors.iter().enumerate() {
        wr.write_record([t.to_string(), format!("{e:e}")])?;
    }
    wr.flush()?;
    let summary = TraceSummary::from_traces(&run_trials(&c)?);
    let mut wr = csv::Writer::from_path(out.join("aggregate.csv"))?;
    wr.write_record([
        "tick",
        "q10_relative_l2_error",
        "median_relative_l2_error",
        "q90_relative_l2_error",
        "mean_relative_l2_error",
    ])?;
    for t in 0..summary.len() {
        wr.write_record([
            t.to_string(),
            format!("{:e}", summary.q10[t]),
            format!("{:e}", summary.q50[t]),
            format!("{:e}", summary.q90[t]),
            format!("{:e}", summary.mean[t]),
        ])?;
    }
    wr.flush()?;
    let est = estimate_ave_time(&c)?;
    println!("instance={} {}", instance.topology, instance.mobility);
    println!("profile={}", est.profile);
    println!("epsilon={epsilon}");
    println!("trials={}", est.trials);
    println!("t_ave_ticks={}", est.ticks);
    println!("t_ave_ci_low={}", est.ci.0);
    println!("t_ave_ci_high={}", est.ci.1);
    println!("saturated={}", est.saturated);
    Ok(Outcome::Done)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Simulate { instance, epsilon, trials, ticks, profile, out } => {
            simulate(&instance, epsilon, trials, ticks, profile, &out)
        }
        Command::Spectrum { instance, out } => {
            let w = instance.matrix(&instance.assignment()?)?;
            let s = spectrum(&w)?;
            print!("{}", s.report());
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                w.write_csv(fs::File::create(dir.join("w.csv"))?)?;
                w.write_coo(fs::File::create(dir.join("w.coo"))?)?;
                fs::write(dir.join("spectrum.txt"), s.report())?;
            }
            Ok(Outcome::Done)
        }
        Command::LowerBound { instance, method, partition } => {
            let descriptor = format!("{} {}", instance.topology, instance.mobility);
            let report = match method {
                LowerMethod::Merge => {
                    let b = lower_bound_via_merge(
                        &instance.assignment()?,
                        &parse_partition(&partition)?,
                        instance.mode(),
                        instance.seed,
                    )?;
                    BoundReport::new(descriptor, BoundMethod::MergeLower, b.t_relax, b.error_band)
                        .with("partition", &partition)
                        .with("classes", b.classes)
                }
                LowerMethod::Rayleigh => {
                    let side = instance
                        .topology
                        .as_lattice()
                        .filter(|l| l.is_square())
                        .map(|l| l.rows())
                        .ok_or_else(|| Error::Usage("rayleigh needs --topology torus:<side>".into()))?;
                    let MobilitySpec::PlusMobile(m) = instance.mobility else {
                        return Err(Error::Usage("rayleigh needs --mobility plus-mobile:<m>".into()));
                    };
                    let b = central_node_test_function(side, m)?;
                    BoundReport::new(descriptor, BoundMethod::RayleighLower, b.bound, 0.0)
                        .with("variance", b.variance)
                        .with("dirichlet", b.dirichlet)
                        .with("bound_over_n2_per_m", b.normalised)
                }
            };
            print!("{report}");
            Ok(Outcome::Done)
        }
        Command::FlowBound { instance, flow, out } => {
            let a = instance.assignment()?;
            let f = match flow {
                FlowKind::Direct => direct_flow(&a)?,
                FlowKind::Hub => hub_flow(&a)?,
                FlowKind::TorusPlusM => torus_plus_m_flow(&a)?,
                FlowKind::LShaped => l_shaped_flow(&a)?,
                FlowKind::Bidirectional => bidirectional_flow(&a)?,
            };
            let w = instance.matrix(&a)?;
            let c = certify(&f, &w)?;
            let band = c.flow.pessimistic_bound.map_or(0.0, |p| p - c.flow.bound);
            let report = BoundReport::new(
                format!("{} {}", instance.topology, instance.mobility),
                BoundMethod::FlowUpper,
                c.flow.bound,
                band,
            )
            .with("rho", c.flow.rho)
            .with("path_length", c.flow.length)
            .with("t_relax", c.t_relax)
            .with("certified", c.holds());
            print!("{report}");
            if let Some(p) = out {
                if let Some(dir) = p.parent() {
                    fs::create_dir_all(dir)?;
                }
                c.flow.write_edge_csv(fs::File::create(p)?)?;
            }
            Ok(if c.holds() { Outcome::Done } else { Outcome::Uncertified })
        }
        Command::Experiment { name, config, sizes, params, epsilon, trials, seed, ticks, out } => {
            let name: ExperimentName = name.parse()?;
            let mut spec = match config {
                Some(path) => {
                    let s = ExperimentSpec::from_toml(&fs::read_to_string(&path)?, &out)?;
                    if s.name != name {
                        return Err(Error::Usage(format!("config describes {}, not {name}", s.name)));
                    }
                    s
                }
                None => ExperimentSpec::new(name, &out),
            };
            if let Some(v) = sizes {
                spec.sizes = v;
            }
            if let Some(v) = params {
                spec.params = v;
            }
            if let Some(v) = epsilon {
                spec.epsilon = v;
            }
            if let Some(v) = trials {
                spec.trials = v;
            }
            if let Some(v) = seed {
                spec.seed = v;
            }
            if ticks.is_some() {
                spec.ticks = ticks;
            }
            let result = run_experiment(&spec)?;
            for (k, v) in &result.metrics {
                println!("{k}={v:.6e}");
            }
            for f in &result.files {
                println!("wrote {}", f.display());
            }
            Ok(Outcome::Done)
        }
        Command::Fit { sides, mobility, quantity, epsilon, trials, ticks, seed } => {
            let instances = sides
                .iter()
                .map(|&s| {
                    let t = mobgossip::topology::build_torus(s)?;
                    let a = mobility.build(t, &t.all_sites(), seed)?;
                    Ok(ScalingInstance { size: a.len() as f64, assignment: a })
                })
                .collect::<Result<Vec<_>>>()?;
            let q = match quantity {
                FitQuantity::TRelax => Quantity::TRelax,
                FitQuantity::TAve => Quantity::TAveEstimate { epsilon, trials, max_ticks: ticks, seed },
            };
            print!("{}", fit_scaling(&instances, q)?.report());
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Uncertified) => {
            eprintln!("error: Poincare bound below the relaxation time");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::InvalidSpec(_) | Error::InvalidParameter(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
