//! Seeded data generators.
//!
//! Two systems are provided. The nonlinear benchmark
//!
//! ```text
//! y_k(n) = y_k(n-1) / (1 + y_k(n-1)²) + x_k(n)³,   d_k(n) = y_k(n) + v_k(n)
//! ```
//!
//! with `x_k(n) ~ N(0, 0.1 χ_k)` and `v_k(n) ~ N(0, σ²_v)`, and the linear
//! model `d_k(n) = w_*ᵀ x_k(n) + v_k(n)`.
//!
//! All randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded via
//! [`derive_seed`]. Within a step, all inputs are drawn (node order) before
//! all noise samples.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::kernel::Regressor;

/// Input variance at a node is this times `χ_k`.
pub const INPUT_VARIANCE_BASE: f64 = 0.1;

/// Name of the PRNG every generator uses; recorded in run manifests.
pub const RNG_ALGORITHM: &str = "chacha20";

/// Independent seed streams derived from one master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum SeedDomain {
    NodeParams = 1,
    Trial = 2,
    ComparatorReplica = 3,
}

/// Mixes `(master, domain, index)` into a seed with two rounds of splitmix64.
pub fn derive_seed(master: u64, domain: SeedDomain, index: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(splitmix(master ^ (domain as u64).rotate_left(56)) ^ index)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeDataParams {
    input_variance_scale: f64,
    noise_variance: f64,
    initial_output: f64,
}

impl NodeDataParams {
    /// `noise_variance = 0` produces noiseless streams.
    pub fn new(input_variance_scale: f64, noise_variance: f64, initial_output: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&input_variance_scale) {
            return Err(Error::InvalidArgument(format!(
                "input variance scale {input_variance_scale} outside [0.5, 1]"
            )));
        }
        if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise variance {noise_variance} must be finite and nonnegative"
            )));
        }
        if !initial_output.is_finite() {
            return Err(Error::NonFinite("initial output"));
        }
        Ok(NodeDataParams {
            input_variance_scale,
            noise_variance,
            initial_output,
        })
    }

    pub fn input_variance_scale(&self) -> f64 {
        self.input_variance_scale
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn initial_output(&self) -> f64 {
        self.initial_output
    }

    pub fn input_variance(&self) -> f64 {
        INPUT_VARIANCE_BASE * self.input_variance_scale
    }

    pub fn noiseless(mut self) -> Self {
        self.noise_variance = 0.0;
        self
    }
}

/// Draws `χ_k ~ U[0.5, 1]` i.i.d. for `num_nodes` nodes.
pub fn sample_node_params(
    num_nodes: usize,
    noise_variance: f64,
    initial_output: f64,
    seed: u64,
) -> Result<Vec<NodeDataParams>> {
    if num_nodes == 0 {
        return Err(Error::InvalidArgument("at least one node required".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let chi = Uniform::new_inclusive(0.5, 1.0).expect("valid range");
    (0..num_nodes)
        .map(|_| NodeDataParams::new(chi.sample(&mut rng), noise_variance, initial_output))
        .collect()
}

/// Per-step, per-node observations. Step `n` (1-based) lives at index `n - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationStream {
    num_nodes: usize,
    raw_inputs: Vec<Vec<f64>>,
    regressors: Vec<Vec<Regressor<f64>>>,
    clean: Vec<Vec<f64>>,
    desired: Vec<Vec<f64>>,
}

impl ObservationStream {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn steps(&self) -> usize {
        self.desired.len()
    }

    pub fn regressor_dim(&self) -> usize {
        self.regressors[0][0].dim()
    }

    /// Scalar input `x_k(n)` for every node (first coordinate for the linear model).
    pub fn raw_inputs(&self, index: usize) -> &[f64] {
        &self.raw_inputs[index]
    }

    pub fn regressors(&self, index: usize) -> &[Regressor<f64>] {
        &self.regressors[index]
    }

    pub fn clean(&self, index: usize) -> &[f64] {
        &self.clean[index]
    }

    pub fn desired(&self, index: usize) -> &[f64] {
        &self.desired[index]
    }

    /// CSV rows `trial,node,n,x,r0..,y,d`, node-major within a trial.
    pub fn write_csv<W: Write>(&self, out: &mut W, trial: usize, header: bool) -> std::io::Result<()> {
        if header {
            write!(out, "trial,node,n,x")?;
            for j in 0..self.regressor_dim() {
                write!(out, ",r{j}")?;
            }
            writeln!(out, ",y,d")?;
        }
        for k in 0..self.num_nodes {
            for i in 0..self.steps() {
                write!(out, "{trial},{k},{},{:.16e}", i + 1, self.raw_inputs[i][k])?;
                for v in self.regressors[i][k].as_slice() {
                    write!(out, ",{v:.16e}")?;
                }
                writeln!(out, ",{:.16e},{:.16e}", self.clean[i][k], self.desired[i][k])?;
            }
        }
        Ok(())
    }
}

fn normal(variance: f64) -> Normal<f64> {
    Normal::new(0.0, variance.sqrt()).expect("nonnegative variance")
}

fn check_common(params: &[NodeDataParams], steps: usize) -> Result<()> {
    if params.is_empty() {
        return Err(Error::InvalidArgument("at least one node required".into()));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step required".into()));
    }
    Ok(())
}

/// Nonlinear benchmark stream with inputs drawn from `N(0, 0.1 χ_k)`.
///
/// The regressor at step `n` is `[x(n), x(n-1), …, x(n-window+1)]`, zero-padded
/// before the first step.
pub fn generate_nonlinear_stream(
    params: &[NodeDataParams],
    steps: usize,
    window: usize,
    seed: u64,
) -> Result<ObservationStream> {
    check_common(params, steps)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let input_dists: Vec<_> = params.iter().map(|p| normal(p.input_variance())).collect();
    let noise_dists: Vec<_> = params.iter().map(|p| normal(p.noise_variance)).collect();
    let mut inputs = Vec::with_capacity(steps);
    let mut noise = Vec::with_capacity(steps);
    for _ in 0..steps {
        inputs.push(input_dists.iter().map(|d| d.sample(&mut rng)).collect::<Vec<_>>());
        noise.push(noise_dists.iter().map(|d| d.sample(&mut rng)).collect::<Vec<_>>());
    }
    nonlinear_response(params, inputs, noise, window)
}

/// Runs the nonlinear system on given inputs and noise, both indexed `[step][node]`.
pub fn nonlinear_response(
    params: &[NodeDataParams],
    inputs: Vec<Vec<f64>>,
    noise: Vec<Vec<f64>>,
    window: usize,
) -> Result<ObservationStream> {
    check_common(params, inputs.len())?;
    if window == 0 {
        return Err(Error::InvalidArgument("regressor window must be at least 1".into()));
    }
    let k_nodes = params.len();
    if noise.len() != inputs.len() {
        return Err(Error::Ragged("noise and input step counts differ".into()));
    }
    if inputs.iter().chain(&noise).any(|row| row.len() != k_nodes) {
        return Err(Error::Ragged("every step needs one sample per node".into()));
    }
    let mut y: Vec<f64> = params.iter().map(|p| p.initial_output).collect();
    let mut clean = Vec::with_capacity(inputs.len());
    let mut desired = Vec::with_capacity(inputs.len());
    for (x, v) in inputs.iter().zip(&noise) {
        for k in 0..k_nodes {
            y[k] = y[k] / (1.0 + y[k] * y[k]) + x[k] * x[k] * x[k];
        }
        clean.push(y.clone());
        desired.push(y.iter().zip(v).map(|(a, b)| a + b).collect());
    }
    let regressors = windowed_regressors(&inputs, window)?;
    Ok(ObservationStream {
        num_nodes: k_nodes,
        raw_inputs: inputs,
        regressors,
        clean,
        desired,
    })
}

fn windowed_regressors(inputs: &[Vec<f64>], window: usize) -> Result<Vec<Vec<Regressor<f64>>>> {
    (0..inputs.len())
        .map(|i| {
            (0..inputs[i].len())
                .map(|k| {
                    let r = (0..window)
                        .map(|lag| if lag <= i { inputs[i - lag][k] } else { 0.0 })
                        .collect();
                    Regressor::new(r)
                })
                .collect()
        })
        .collect()
}

/// Linear-model stream with `x_k(n) ~ N(0, 0.1 χ_k I_m)`, `m = w_star.len()`.
pub fn generate_linear_stream(
    w_star: &[f64],
    params: &[NodeDataParams],
    steps: usize,
    seed: u64,
) -> Result<ObservationStream> {
    check_common(params, steps)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let input_dists: Vec<_> = params.iter().map(|p| normal(p.input_variance())).collect();
    let noise_dists: Vec<_> = params.iter().map(|p| normal(p.noise_variance)).collect();
    let mut inputs = Vec::with_capacity(steps);
    let mut noise = Vec::with_capacity(steps);
    for _ in 0..steps {
        let row: Vec<Vec<f64>> = input_dists
            .iter()
            .map(|d| (0..w_star.len()).map(|_| d.sample(&mut rng)).collect())
            .collect();
        inputs.push(row);
        noise.push(noise_dists.iter().map(|d| d.sample(&mut rng)).collect::<Vec<_>>());
    }
    linear_response(w_star, inputs, noise)
}

/// `d = w_*ᵀ x + v` on given inputs `[step][node][coordinate]` and noise `[step][node]`.
pub fn linear_response(w_star: &[f64], inputs: Vec<Vec<Vec<f64>>>, noise: Vec<Vec<f64>>) -> Result<ObservationStream> {
    if w_star.is_empty() {
        return Err(Error::InvalidArgument("w_star must have dimension >= 1".into()));
    }
    let steps = inputs.len();
    if steps == 0 || noise.len() != steps {
        return Err(Error::Ragged("noise and input step counts differ or are zero".into()));
    }
    let k_nodes = inputs[0].len();
    let mut raw_inputs = Vec::with_capacity(steps);
    let mut regressors = Vec::with_capacity(steps);
    let mut clean = Vec::with_capacity(steps);
    let mut desired = Vec::with_capacity(steps);
    for (row, v) in inputs.into_iter().zip(noise) {
        if row.len() != k_nodes || v.len() != k_nodes {
            return Err(Error::Ragged("every step needs one sample per node".into()));
        }
        let y: Vec<f64> = row
            .iter()
            .map(|x| {
                if x.len() != w_star.len() {
                    return Err(Error::DimensionMismatch {
                        expected: w_star.len(),
                        found: x.len(),
                    });
                }
                Ok(x.iter().zip(w_star).map(|(a, b)| a * b).sum())
            })
            .collect::<Result<_>>()?;
        raw_inputs.push(row.iter().map(|x| x[0]).collect());
        desired.push(y.iter().zip(&v).map(|(a, b)| a + b).collect());
        clean.push(y);
        regressors.push(row.into_iter().map(Regressor::new).collect::<Result<_>>()?);
    }
    Ok(ObservationStream {
        num_nodes: k_nodes,
        raw_inputs,
        regressors,
        clean,
        desired,
    })
}
