//! Monte-Carlo experiment runner.

use std::sync::Arc;

use rayon::prelude::*;

use super::config::{Algorithm, ExperimentConfig, SystemConfig};
use super::regret::{empirical_regret, KernelRidge, RegretCurve};
use crate::adaptive::{instantaneous_loss, CentralizedKlms, Dklms, Klms, LinearDlms, NetworkFilter, NoncoopKlms};
use crate::error::{Error, Result};
use crate::graph::{CombinationMatrix, PropagationWeights, Topology};
use crate::kernel::KernelParams;
use crate::sim::{self, derive_seed, NodeDataParams, ObservationStream, SeedDomain};

/// Trial-averaged metrics of one algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTrace {
    pub algorithm: Algorithm,
    /// Network MSE of the a-priori error, per step.
    pub mse: Vec<f64>,
    /// Running sum over steps of `Σ_k ½ e_k(n)²`.
    pub cumulative_loss: Vec<f64>,
    /// Mean of the last `steady_state_window` entries of `mse`.
    pub steady_state_mse: f64,
    /// First step (1-based) at which some trial produced a non-finite error.
    /// The trace stops right before it.
    pub diverged_at: Option<usize>,
    /// Present when the config asks for regret.
    pub regret: Option<RegretCurve>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub traces: Vec<MetricTrace>,
}

impl ExperimentOutcome {
    pub fn diverged(&self) -> bool {
        self.traces.iter().any(|t| t.diverged_at.is_some())
    }

    pub fn trace(&self, algorithm: Algorithm) -> Option<&MetricTrace> {
        self.traces.iter().find(|t| t.algorithm == algorithm)
    }
}

/// Everything shared read-only by the trials of one experiment.
#[derive(Clone, Debug)]
pub struct Setup {
    pub config: ExperimentConfig,
    pub topology: Topology,
    pub combination: Arc<CombinationMatrix<f64>>,
    pub weights: Arc<PropagationWeights<f64>>,
    pub kernel: KernelParams<f64>,
    node_params: Vec<NodeDataParams>,
}

impl Setup {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let topology = Topology::build(&config.topology).map_err(|e| Error::config("topology", e.to_string()))?;
        let combination = Arc::new(CombinationMatrix::metropolis(&topology));
        let weights = Arc::new(PropagationWeights::new(
            &combination,
            &topology,
            config.buffer_capacity,
            config.hop_masking,
        )?);
        let kernel = KernelParams::new(config.kernel.family, config.kernel.bandwidth)?;
        let node_params = Self::sample_params(config, 0)?;
        Ok(Setup {
            config: config.clone(),
            topology,
            combination,
            weights,
            kernel,
            node_params,
        })
    }

    fn sample_params(config: &ExperimentConfig, index: u64) -> Result<Vec<NodeDataParams>> {
        sim::sample_node_params(
            config.num_nodes(),
            config.noise_variance,
            config.initial_output,
            derive_seed(config.seed, SeedDomain::NodeParams, index),
        )
    }

    /// Node parameters in effect for `trial`.
    pub fn node_params(&self, trial: usize) -> Result<Vec<NodeDataParams>> {
        if self.config.resample_node_params {
            Self::sample_params(&self.config, trial as u64 + 1)
        } else {
            Ok(self.node_params.clone())
        }
    }

    fn generate(&self, params: &[NodeDataParams], steps: usize, seed: u64) -> Result<ObservationStream> {
        match &self.config.system {
            SystemConfig::Nonlinear { regressor_window } => {
                sim::generate_nonlinear_stream(params, steps, *regressor_window, seed)
            }
            SystemConfig::Linear { w_star } => sim::generate_linear_stream(w_star, params, steps, seed),
        }
    }

    /// The observation stream every algorithm consumes in `trial`.
    pub fn stream(&self, trial: usize) -> Result<ObservationStream> {
        let seed = derive_seed(self.config.seed, SeedDomain::Trial, trial as u64);
        self.generate(&self.node_params(trial)?, self.config.steps, seed)
    }

    /// Kernel ridge comparator fit on the first `fit_samples` noiseless samples
    /// (step by step, nodes in index order) of an independent replica stream.
    pub fn comparator(&self, trial: usize) -> Result<KernelRidge> {
        let cfg = &self.config.comparator;
        let k_nodes = self.config.num_nodes();
        let params: Vec<_> = self.node_params(trial)?.into_iter().map(NodeDataParams::noiseless).collect();
        let steps = cfg.fit_samples.div_ceil(k_nodes);
        let seed = derive_seed(self.config.seed, SeedDomain::ComparatorReplica, trial as u64);
        let replica = self.generate(&params, steps, seed)?;
        let mut centers = Vec::with_capacity(cfg.fit_samples);
        let mut targets = Vec::with_capacity(cfg.fit_samples);
        'fill: for i in 0..replica.steps() {
            for k in 0..k_nodes {
                if centers.len() == cfg.fit_samples {
                    break 'fill;
                }
                centers.push(replica.regressors(i)[k].clone());
                targets.push(replica.clean(i)[k]);
            }
        }
        KernelRidge::fit(self.kernel, centers, &targets, cfg.regularization)
    }

    pub fn build_filter(&self, algorithm: Algorithm) -> Result<Box<dyn NetworkFilter<f64>>> {
        let cfg = &self.config;
        let k_nodes = cfg.num_nodes();
        Ok(match algorithm {
            Algorithm::Dklms => Box::new(Dklms::uniform(
                self.weights.clone(),
                cfg.step_size,
                self.kernel,
                cfg.buffer_capacity,
            )?),
            Algorithm::NoncoopKlms => Box::new(NoncoopKlms::uniform(
                k_nodes,
                cfg.step_size,
                self.kernel,
                Some(cfg.buffer_capacity),
            )?),
            Algorithm::LinearDlms => Box::new(LinearDlms::uniform(
                self.combination.clone(),
                cfg.step_size,
                cfg.regressor_dim(),
            )?),
            // Same total memory as the network: K·L centers.
            Algorithm::CentralizedKlms => Box::new(CentralizedKlms::new(
                k_nodes,
                Klms::new(cfg.step_size, self.kernel, Some(k_nodes * cfg.buffer_capacity))?,
            )?),
        })
    }
}

/// Per-trial output of one algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmRun {
    /// `errors[i][k] = e_k(i + 1)`; shorter than the stream after divergence.
    pub errors: Vec<Vec<f64>>,
    pub diverged: bool,
}

/// Runs `filter` over the whole stream, stopping at the first non-finite error.
pub fn run_filter(filter: &mut dyn NetworkFilter<f64>, stream: &ObservationStream) -> Result<AlgorithmRun> {
    let mut errors = Vec::with_capacity(stream.steps());
    for i in 0..stream.steps() {
        let e = filter.step(stream.regressors(i), stream.desired(i))?;
        if e.iter().any(|v| !v.is_finite()) {
            return Ok(AlgorithmRun { errors, diverged: true });
        }
        errors.push(e);
    }
    Ok(AlgorithmRun { errors, diverged: false })
}

struct TrialRecord {
    runs: Vec<AlgorithmRun>,
    comparator_losses: Option<Vec<f64>>,
}

fn run_trial(setup: &Setup, trial: usize) -> Result<TrialRecord> {
    let stream = setup.stream(trial)?;
    let runs = setup
        .config
        .algorithms
        .iter()
        .map(|&alg| run_filter(setup.build_filter(alg)?.as_mut(), &stream))
        .collect::<Result<Vec<_>>>()?;
    let comparator_losses = if setup.config.regret {
        let g = setup.comparator(trial)?;
        let losses = (0..stream.steps())
            .map(|i| {
                stream
                    .regressors(i)
                    .iter()
                    .zip(stream.desired(i))
                    .map(|(x, &d)| g.predict(x).map(|p| instantaneous_loss(d, p)))
                    .sum::<Result<f64>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Some(losses)
    } else {
        None
    };
    Ok(TrialRecord {
        runs,
        comparator_losses,
    })
}

/// Node-averaged squared error per step for one trial, `errors[step][node]`.
pub fn network_squared_error(errors: &[Vec<f64>]) -> Vec<f64> {
    errors
        .iter()
        .map(|e| e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64)
        .collect()
}

/// Network loss `Σ_k ½ e_k²` per step.
pub fn network_loss(errors: &[Vec<f64>]) -> Vec<f64> {
    errors
        .iter()
        .map(|e| e.iter().map(|&v| instantaneous_loss(v, 0.0)).sum())
        .collect()
}

/// Pointwise mean over trials, summed in trial order.
pub fn mean_over_trials(curves: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidArgument("no trials to average".into()))?;
    if curves.iter().any(|c| c.len() != first.len()) {
        return Err(Error::Ragged("trial curves differ in length".into()));
    }
    let t = curves.len() as f64;
    Ok((0..first.len())
        .map(|i| curves.iter().map(|c| c[i]).sum::<f64>() / t)
        .collect())
}

/// Trial-averaged network MSE from per-trial errors `[trial][step][node]`.
pub fn average_mse(per_trial_errors: &[Vec<Vec<f64>>]) -> Result<Vec<f64>> {
    if let Some(first) = per_trial_errors.first().and_then(|t| t.first()) {
        let k = first.len();
        if per_trial_errors.iter().flatten().any(|step| step.len() != k || k == 0) {
            return Err(Error::Ragged("every step needs the same nonzero node count".into()));
        }
    }
    let curves: Vec<_> = per_trial_errors.iter().map(|t| network_squared_error(t)).collect();
    mean_over_trials(&curves)
}

/// Mean of the last `window` entries (all of them if shorter).
pub fn steady_state(mse: &[f64], window: usize) -> f64 {
    let tail = &mse[mse.len().saturating_sub(window)..];
    if tail.is_empty() {
        return f64::NAN;
    }
    tail.iter().sum::<f64>() / tail.len() as f64
}

fn cumulative(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Runs every trial of `config` and reduces the results.
///
/// Trials run in parallel; each derives its own seed from the master seed and
/// the reduction sums trials in index order, so output does not depend on
/// scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let setup = Setup::new(config)?;
    let records = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(&setup, t))
        .collect::<Result<Vec<_>>>()?;

    let mut traces = Vec::with_capacity(config.algorithms.len());
    for (a, &algorithm) in config.algorithms.iter().enumerate() {
        let len = records.iter().map(|r| r.runs[a].errors.len()).min().unwrap_or(0);
        let diverged = records.iter().any(|r| r.runs[a].diverged);
        let truncated = |r: &TrialRecord| r.runs[a].errors[..len].to_vec();
        let sq: Vec<_> = records.iter().map(|r| network_squared_error(&truncated(r))).collect();
        let loss: Vec<_> = records.iter().map(|r| network_loss(&truncated(r))).collect();
        let mse = mean_over_trials(&sq)?;
        let mean_loss = mean_over_trials(&loss)?;
        let regret = if config.regret {
            let comp: Vec<_> = records
                .iter()
                .map(|r| r.comparator_losses.as_ref().expect("comparator requested")[..len].to_vec())
                .collect();
            Some(empirical_regret(&mean_loss, &mean_over_trials(&comp)?)?)
        } else {
            None
        };
        traces.push(MetricTrace {
            algorithm,
            steady_state_mse: steady_state(&mse, config.steady_state_window),
            cumulative_loss: cumulative(&mean_loss),
            mse,
            diverged_at: diverged.then_some(len + 1),
            regret,
        });
    }
    Ok(ExperimentOutcome {
        config: config.clone(),
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn average_mse_examples() {
        assert_eq!(average_mse(&[vec![vec![1.0], vec![2.0]]]).unwrap(), vec![1.0, 4.0]);
        let one = vec![vec![vec![0.5, -1.0], vec![2.0, 0.0]]];
        let two = vec![one[0].clone(), one[0].clone()];
        assert_eq!(average_mse(&one).unwrap(), average_mse(&two).unwrap());
        assert_eq!(average_mse(&[vec![vec![0.0]], vec![vec![2.0]]]).unwrap(), vec![2.0]);
    }

    #[test]
    fn average_mse_rejects_ragged() {
        assert!(average_mse(&[vec![vec![1.0]], vec![vec![1.0], vec![2.0]]]).is_err());
        assert!(average_mse(&[vec![vec![1.0], vec![1.0, 2.0]]]).is_err());
        assert!(average_mse(&[]).is_err());
    }

    #[test]
    fn steady_state_window() {
        assert_eq!(steady_state(&[9.0, 1.0, 3.0], 2), 2.0);
        assert_eq!(steady_state(&[1.0, 3.0], 10), 2.0);
    }

    #[test]
    fn small_experiment_shapes() {
        let mut cfg = ExperimentConfig::experiment1();
        cfg.steps = 40;
        cfg.trials = 3;
        cfg.buffer_capacity = 10;
        cfg.steady_state_window = 5;
        cfg.algorithms = Algorithm::ALL.to_vec();
        let out = run_experiment(&cfg).unwrap();
        assert!(!out.diverged());
        for t in &out.traces {
            assert_eq!(t.mse.len(), 40);
            assert!(t.mse.iter().all(|&v| v >= 0.0));
            assert!(t.cumulative_loss.windows(2).all(|w| w[1] >= w[0]));
            assert!(t.regret.is_none());
        }
    }

    #[test]
    fn divergence_is_flagged() {
        let mut cfg = ExperimentConfig::experiment1();
        cfg.steps = 400;
        cfg.trials = 1;
        cfg.step_size = 500.0;
        cfg.algorithms = vec![Algorithm::LinearDlms];
        cfg.system = SystemConfig::Linear { w_star: vec![1.0, -1.0] };
        let out = run_experiment(&cfg).unwrap();
        let t = &out.traces[0];
        assert!(out.diverged());
        let at = t.diverged_at.unwrap();
        assert_eq!(t.mse.len(), at - 1);
    }
}
