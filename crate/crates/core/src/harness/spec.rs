use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mobility::MobilitySpec;

pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentName {
    NoVsHorizontal,
    FullVsBidirectional,
    AddMobile,
    RandomWalkMixing,
    ScalingFit,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 5] = [
        ExperimentName::NoVsHorizontal,
        ExperimentName::FullVsBidirectional,
        ExperimentName::AddMobile,
        ExperimentName::RandomWalkMixing,
        ExperimentName::ScalingFit,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::NoVsHorizontal => "no-vs-horizontal",
            ExperimentName::FullVsBidirectional => "full-vs-bidirectional",
            ExperimentName::AddMobile => "add-mobile",
            ExperimentName::RandomWalkMixing => "random-walk-mixing",
            ExperimentName::ScalingFit => "scaling-fit",
        }
    }

    fn default_sizes(&self) -> Vec<usize> {
        match self {
            ExperimentName::NoVsHorizontal => vec![8, 12, 16],
            ExperimentName::FullVsBidirectional => vec![12],
            ExperimentName::AddMobile => vec![14],
            ExperimentName::RandomWalkMixing => vec![10],
            ExperimentName::ScalingFit => vec![4, 6, 8, 10, 12],
        }
    }

    fn default_params(&self) -> Vec<usize> {
        match self {
            ExperimentName::AddMobile => vec![0, 1, 2, 4, 8],
            ExperimentName::RandomWalkMixing => vec![1, 4, 16, 64],
            _ => Vec::new(),
        }
    }

    fn default_ticks(&self) -> Option<usize> {
        match self {
            ExperimentName::AddMobile => Some(20_000),
            _ => None,
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s.trim())
            .ok_or_else(|| Error::Usage(format!("unknown experiment `{s}`")))
    }
}

/// One experiment run. `sizes` are torus sides; `params` are the swept
/// mobility parameter (mobile agent counts, random-walk steps).
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub sizes: Vec<usize>,
    pub params: Vec<usize>,
    /// Mobility models compared by `scaling-fit`.
    pub mobility: Vec<MobilitySpec>,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    /// Tick budget per curve; chosen from the relaxation time when absent.
    pub ticks: Option<usize>,
    pub out: PathBuf,
}

impl ExperimentSpec {
    pub fn new(name: ExperimentName, out: impl Into<PathBuf>) -> Self {
        Self {
            name,
            sizes: name.default_sizes(),
            params: name.default_params(),
            mobility: vec![MobilitySpec::Static, MobilitySpec::Full],
            epsilon: DEFAULT_EPSILON,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            ticks: name.default_ticks(),
            out: out.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.sizes.is_empty() {
            return bad("size sweep is empty".into());
        }
        if let Some(s) = self.sizes.iter().find(|&&s| s < 2) {
            return bad(format!("torus side {s} is too small"));
        }
        match self.name {
            ExperimentName::AddMobile | ExperimentName::RandomWalkMixing if self.params.is_empty() => {
                return bad("parameter sweep is empty".into())
            }
            ExperimentName::RandomWalkMixing if self.params.contains(&0) => {
                return bad("random-walk steps must be positive".into())
            }
            ExperimentName::ScalingFit if self.sizes.len() < 3 => {
                return bad("a scaling fit needs at least 3 sizes".into())
            }
            ExperimentName::ScalingFit if self.mobility.is_empty() => {
                return bad("no mobility model to fit".into())
            }
            _ => {}
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon {} outside (0, 1)", self.epsilon));
        }
        if self.trials == 0 {
            return bad("need at least one trial".into());
        }
        if self.ticks == Some(0) {
            return bad("tick budget must be positive".into());
        }
        Ok(())
    }

    /// Reads a TOML spec; missing keys take the experiment defaults.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let raw: RawSpec =
            toml::from_str(text).map_err(|e| Error::InvalidSpec(e.message().to_string()))?;
        let name: ExperimentName = raw.experiment.parse()?;
        let out = raw.out.map_or_else(|| base.join(name.as_str()), |o| base.join(o));
        let mut spec = ExperimentSpec::new(name, out);
        if let Some(v) = raw.sizes {
            spec.sizes = v;
        }
        if let Some(v) = raw.params {
            spec.params = v;
        }
        if let Some(v) = raw.mobility {
            spec.mobility = v.iter().map(|m| m.parse()).collect::<Result<_>>()?;
        }
        if let Some(v) = raw.epsilon {
            spec.epsilon = v;
        }
        if let Some(v) = raw.trials {
            spec.trials = v;
        }
        if let Some(v) = raw.seed {
            spec.seed = v;
        }
        if raw.ticks.is_some() {
            spec.ticks = raw.ticks;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    experiment: String,
    sizes: Option<Vec<usize>>,
    params: Option<Vec<usize>>,
    mobility: Option<Vec<String>>,
    epsilon: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
    ticks: Option<usize>,
    out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_overrides_defaults() {
        let spec = ExperimentSpec::from_toml(
            "experiment = \"add-mobile\"\nparams = [0, 3]\ntrials = 7\nout = \"x\"\n",
            Path::new("/tmp"),
        )
        .unwrap();
        assert_eq!(spec.name, ExperimentName::AddMobile);
        assert_eq!(spec.params, vec![0, 3]);
        assert_eq!(spec.sizes, vec![14]);
        assert_eq!(spec.trials, 7);
        assert_eq!(spec.epsilon, DEFAULT_EPSILON);
        assert_eq!(spec.ticks, Some(20_000));
        assert_eq!(spec.out, PathBuf::from("/tmp/x"));
    }

    #[test]
    fn bad_specs() {
        assert!(matches!(
            ExperimentSpec::from_toml("experiment = \"nope\"", Path::new(".")),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            ExperimentSpec::from_toml("experiment = \"scaling-fit\"\nsizes = [4, 6]", Path::new(".")),
            Err(Error::InvalidSpec(_))
        ));
        assert!(ExperimentSpec::from_toml("experiment = \"add-mobile\"\ncolour = 1", Path::new(".")).is_err());
        let mut s = ExperimentSpec::new(ExperimentName::NoVsHorizontal, ".");
        s.sizes.clear();
        assert!(s.validate().is_err());
    }

    #[test]
    fn names_round_trip() {
        for n in ExperimentName::ALL {
            assert_eq!(n.as_str().parse::<ExperimentName>().unwrap(), n);
        }
    }
}
