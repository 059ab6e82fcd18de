//! Experiment configuration, stored as TOML.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{HopMask, TopologySpec};
use crate::kernel::KernelFamily;
use crate::sim::RNG_ALGORITHM;

pub const SCHEMA_VERSION: u32 = 1;

/// Default 10-node topology: a ladder-like mesh with one chord, 15 edges,
/// self-inclusive neighborhood sizes 3 to 5.
pub const DEFAULT_EDGES: [[usize; 2]; 15] = [
    [0, 1],
    [0, 2],
    [1, 2],
    [1, 3],
    [2, 4],
    [2, 5],
    [3, 4],
    [3, 5],
    [4, 6],
    [5, 6],
    [5, 7],
    [6, 8],
    [7, 8],
    [7, 9],
    [8, 9],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Dklms,
    NoncoopKlms,
    LinearDlms,
    CentralizedKlms,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Dklms,
        Algorithm::NoncoopKlms,
        Algorithm::LinearDlms,
        Algorithm::CentralizedKlms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dklms => "dklms",
            Algorithm::NoncoopKlms => "noncoop_klms",
            Algorithm::LinearDlms => "linear_dlms",
            Algorithm::CentralizedKlms => "centralized_klms",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| {
                Error::config(
                    "algorithms",
                    format!("unknown algorithm `{s}` (expected one of dklms, noncoop_klms, linear_dlms, centralized_klms)"),
                )
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: KernelFamily,
    pub bandwidth: f64,
}

/// Data-generating system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// `y(n) = y(n-1)/(1+y(n-1)²) + x(n)³` with windowed scalar-input regressors.
    Nonlinear { regressor_window: usize },
    /// `d = w_*ᵀ x + v`; the regressor is `x`.
    Linear { w_star: Vec<f64> },
}

/// Fixed comparator for regret: kernel ridge regression fit on a noiseless
/// replica of the system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparatorConfig {
    pub fit_samples: usize,
    pub regularization: f64,
}

impl Default for ComparatorConfig {
    fn default() -> Self {
        ComparatorConfig {
            fit_samples: 500,
            regularization: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    pub seed: u64,
    pub rng: String,
    pub steps: usize,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub step_size: f64,
    pub buffer_capacity: usize,
    pub hop_masking: HopMask,
    pub noise_variance: f64,
    pub initial_output: f64,
    /// Resample `χ_k` for every trial instead of once per experiment.
    pub resample_node_params: bool,
    pub steady_state_window: usize,
    pub regret: bool,
    pub output_dir: PathBuf,
    pub kernel: KernelConfig,
    pub system: SystemConfig,
    pub topology: TopologySpec,
    pub comparator: ComparatorConfig,
}

impl ExperimentConfig {
    /// K = 10, μ = 0.6, β = 1.1, L = 100, one-hop masking, σ²_v = 1e-3,
    /// N = 3000, T = 100.
    pub fn experiment1() -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            name: "experiment1".into(),
            seed: 1,
            rng: RNG_ALGORITHM.into(),
            steps: 3000,
            trials: 100,
            algorithms: vec![Algorithm::Dklms, Algorithm::NoncoopKlms, Algorithm::LinearDlms],
            step_size: 0.6,
            buffer_capacity: 100,
            hop_masking: HopMask::OneHopRecursive,
            noise_variance: 1e-3,
            initial_output: 0.0,
            resample_node_params: false,
            steady_state_window: 500,
            regret: false,
            output_dir: PathBuf::from("results"),
            kernel: KernelConfig {
                family: KernelFamily::Gaussian,
                bandwidth: 1.1,
            },
            system: SystemConfig::Nonlinear { regressor_window: 1 },
            topology: TopologySpec::Explicit {
                nodes: 10,
                edges: DEFAULT_EDGES.to_vec(),
            },
            comparator: ComparatorConfig::default(),
        }
    }

    /// Experiment 1 with noise variance raised to 1e-1.
    pub fn experiment2() -> Self {
        ExperimentConfig {
            name: "experiment2".into(),
            noise_variance: 1e-1,
            ..Self::experiment1()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::config(span_field(&e), e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn num_nodes(&self) -> usize {
        self.topology.num_nodes()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::config("name", "must be a nonempty file-name-safe string"));
        }
        if self.rng != RNG_ALGORITHM {
            return Err(Error::config("rng", format!("only `{RNG_ALGORITHM}` is supported")));
        }
        if self.steps == 0 {
            return Err(Error::config("steps", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("algorithms", "select at least one algorithm"));
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return Err(Error::config("algorithms", "duplicate entries"));
        }
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::config("step_size", "must be positive and finite"));
        }
        if self.buffer_capacity == 0 {
            return Err(Error::config("buffer_capacity", "must be at least 1"));
        }
        if !(self.noise_variance >= 0.0) || !self.noise_variance.is_finite() {
            return Err(Error::config("noise_variance", "must be finite and nonnegative"));
        }
        if !self.initial_output.is_finite() {
            return Err(Error::config("initial_output", "must be finite"));
        }
        if self.steady_state_window == 0 {
            return Err(Error::config("steady_state_window", "must be at least 1"));
        }
        if !(self.kernel.bandwidth > 0.0) || !self.kernel.bandwidth.is_finite() {
            return Err(Error::config("kernel.bandwidth", "must be positive and finite"));
        }
        match &self.system {
            SystemConfig::Nonlinear { regressor_window } if *regressor_window == 0 => {
                return Err(Error::config("system.regressor_window", "must be at least 1"));
            }
            SystemConfig::Linear { w_star } if w_star.is_empty() || w_star.iter().any(|w| !w.is_finite()) => {
                return Err(Error::config("system.w_star", "must be a nonempty finite vector"));
            }
            _ => {}
        }
        match &self.topology {
            TopologySpec::Explicit { nodes: 0, .. } | TopologySpec::Random { nodes: 0, .. } => {
                return Err(Error::config("topology.nodes", "must be at least 1"));
            }
            TopologySpec::Random { edge_probability, .. } if !(0.0..=1.0).contains(edge_probability) => {
                return Err(Error::config("topology.edge_probability", "must lie in [0, 1]"));
            }
            _ => {}
        }
        if self.comparator.fit_samples == 0 {
            return Err(Error::config("comparator.fit_samples", "must be at least 1"));
        }
        if !(self.comparator.regularization > 0.0) || !self.comparator.regularization.is_finite() {
            return Err(Error::config("comparator.regularization", "must be positive and finite"));
        }
        Ok(())
    }

    /// Dimension of the regressors fed to every learner.
    pub fn regressor_dim(&self) -> usize {
        match &self.system {
            SystemConfig::Nonlinear { regressor_window } => *regressor_window,
            SystemConfig::Linear { w_star } => w_star.len(),
        }
    }
}

/// Best-effort name of the offending key in a TOML deserialization error.
fn span_field(e: &toml::de::Error) -> String {
    let msg = e.message();
    for marker in ["unknown field `", "missing field `"] {
        if let Some(start) = msg.find(marker) {
            let rest = &msg[start + marker.len()..];
            if let Some(end) = rest.find('`') {
                return rest[..end].to_string();
            }
        }
    }
    "<document>".into()
}

/// Command-line overrides, applied on top of a loaded config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub algorithms: Option<Vec<Algorithm>>,
    pub trials: Option<usize>,
    pub steps: Option<usize>,
    pub noise_variance: Option<f64>,
    pub hop_masking: Option<HopMask>,
    pub regret: Option<bool>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.output_dir {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = &self.algorithms {
            cfg.algorithms = v.clone();
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if let Some(v) = self.noise_variance {
            cfg.noise_variance = v;
        }
        if let Some(v) = self.hop_masking {
            cfg.hop_masking = v;
        }
        if let Some(v) = self.regret {
            cfg.regret = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses a comma-separated algorithm list.
pub fn parse_algorithms(list: &str) -> Result<Vec<Algorithm>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_valid_and_round_trip() {
        for cfg in [ExperimentConfig::experiment1(), ExperimentConfig::experiment2()] {
            cfg.validate().unwrap();
            let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn experiments_differ_only_in_noise() {
        let mut a = ExperimentConfig::experiment1();
        let b = ExperimentConfig::experiment2();
        assert_eq!(a.noise_variance, 1e-3);
        assert_eq!(b.noise_variance, 1e-1);
        a.noise_variance = b.noise_variance;
        a.name = b.name.clone();
        assert_eq!(a, b);
    }

    #[test]
    fn field_level_diagnostics() {
        let mut cfg = ExperimentConfig::experiment1();
        cfg.step_size = 0.0;
        match cfg.validate().unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "step_size"),
            e => panic!("{e}"),
        }
        let text = ExperimentConfig::experiment1().to_toml_string().replace("trials = 100", "trials = 0");
        match ExperimentConfig::from_toml_str(&text).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "trials"),
            e => panic!("{e}"),
        }
        let text = format!("bogus = 1\n{}", ExperimentConfig::experiment1().to_toml_string());
        match ExperimentConfig::from_toml_str(&text).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "bogus"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn rejects_other_invalid_fields() {
        let base = ExperimentConfig::experiment1();
        let cases: Vec<(&str, Box<dyn Fn(&mut ExperimentConfig)>)> = vec![
            ("steps", Box::new(|c| c.steps = 0)),
            ("buffer_capacity", Box::new(|c| c.buffer_capacity = 0)),
            ("algorithms", Box::new(|c| c.algorithms.clear())),
            ("algorithms", Box::new(|c| c.algorithms = vec![Algorithm::Dklms, Algorithm::Dklms])),
            ("schema_version", Box::new(|c| c.schema_version = 9)),
            ("rng", Box::new(|c| c.rng = "mt19937".into())),
            ("kernel.bandwidth", Box::new(|c| c.kernel.bandwidth = -1.0)),
            ("system.regressor_window", Box::new(|c| c.system = SystemConfig::Nonlinear { regressor_window: 0 })),
            ("noise_variance", Box::new(|c| c.noise_variance = f64::NAN)),
        ];
        for (field, mutate) in cases {
            let mut cfg = base.clone();
            mutate(&mut cfg);
            match cfg.validate() {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field),
                other => panic!("{field}: {other:?}"),
            }
        }
    }

    #[test]
    fn overrides_and_algorithm_lists() {
        let o = Overrides {
            seed: Some(9),
            algorithms: Some(parse_algorithms("dklms,linear_dlms").unwrap()),
            trials: Some(2),
            steps: Some(10),
            ..Default::default()
        };
        let cfg = o.apply(ExperimentConfig::experiment1()).unwrap();
        assert_eq!((cfg.seed, cfg.trials, cfg.steps), (9, 2, 10));
        assert_eq!(cfg.algorithms, vec![Algorithm::Dklms, Algorithm::LinearDlms]);
        assert!(parse_algorithms("dklms,foo").is_err());
        let bad = Overrides {
            trials: Some(0),
            ..Default::default()
        };
        assert!(bad.apply(ExperimentConfig::experiment1()).is_err());
    }
}
