use std::sync::Arc;

use super::{check_network_input, check_step_sizes, DictionarySlot, KernelBuffer, NetworkFilter};
use crate::error::{Error, Result};
use crate::graph::PropagationWeights;
use crate::kernel::{KernelParams, Regressor};
use crate::scalar::Scalar;

/// Diffusion kernel LMS, adapt-then-combine.
///
/// The network function after step `n` is never materialized. Its response at
/// node `k` is expanded over the buffered slots:
///
/// ```text
/// f_{k,n-1}(x) = Σ_{i ∈ buffer} Σ_l W(n-i)[k][l] · μ_l e_l(i) · κ(x_l(i), x)
/// ```
///
/// With exact weights `W(p) = A^p` and a buffer covering every step this is
/// the unrolled form of `f_n = A (f_{n-1} + g(n) κ(x(n), ·))`.
#[derive(Clone, Debug)]
pub struct Dklms<T: Scalar> {
    buffer: KernelBuffer<T>,
    weights: Arc<PropagationWeights<T>>,
    step_sizes: Vec<T>,
    kernel: KernelParams<T>,
    step_count: usize,
    dim: Option<usize>,
}

impl<T: Scalar> Dklms<T> {
    pub fn new(
        weights: Arc<PropagationWeights<T>>,
        step_sizes: Vec<T>,
        kernel: KernelParams<T>,
        buffer_capacity: usize,
    ) -> Result<Self> {
        check_step_sizes(&step_sizes)?;
        if step_sizes.len() != weights.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: weights.num_nodes(),
                found: step_sizes.len(),
            });
        }
        if weights.max_power() < buffer_capacity {
            return Err(Error::InvalidArgument(format!(
                "propagation weights cover {} powers but the buffer holds {buffer_capacity} slots",
                weights.max_power()
            )));
        }
        Ok(Dklms {
            buffer: KernelBuffer::new(buffer_capacity)?,
            weights,
            step_sizes,
            kernel,
            step_count: 0,
            dim: None,
        })
    }

    /// Same step size at every node.
    pub fn uniform(
        weights: Arc<PropagationWeights<T>>,
        step_size: T,
        kernel: KernelParams<T>,
        buffer_capacity: usize,
    ) -> Result<Self> {
        let k = weights.num_nodes();
        Self::new(weights, vec![step_size; k], kernel, buffer_capacity)
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn buffer(&self) -> &KernelBuffer<T> {
        &self.buffer
    }

    pub fn weights(&self) -> &PropagationWeights<T> {
        &self.weights
    }

    /// Responses `f_{k,n-1}(x_k(n))` for the upcoming step `n = step_count + 1`.
    pub fn predict(&self, inputs: &[Regressor<T>]) -> Result<Vec<T>> {
        let k_nodes = self.weights.num_nodes();
        if inputs.len() != k_nodes {
            return Err(Error::DimensionMismatch {
                expected: k_nodes,
                found: inputs.len(),
            });
        }
        if let Some(dim) = self.dim {
            crate::kernel::ensure_uniform(inputs, dim)?;
        }
        let n = self.step_count + 1;
        let mut out = vec![T::zero(); k_nodes];
        for slot in self.buffer.iter() {
            let w = self.weights.power(n - slot.time_index());
            let centers = slot.regressors();
            let g = slot.scaled_errors();
            for (k, acc) in out.iter_mut().enumerate() {
                let x = inputs[k].as_slice();
                for l in 0..k_nodes {
                    let a = w[(k, l)];
                    if a == T::zero() || g[l] == T::zero() {
                        continue;
                    }
                    *acc += a * g[l] * self.kernel.eval_slices(centers[l].as_slice(), x);
                }
            }
        }
        Ok(out)
    }
}

impl<T: Scalar> NetworkFilter<T> for Dklms<T> {
    fn num_nodes(&self) -> usize {
        self.weights.num_nodes()
    }

    fn step(&mut self, inputs: &[Regressor<T>], desired: &[T]) -> Result<Vec<T>> {
        let dim = check_network_input(self.num_nodes(), self.dim, inputs, desired)?;
        let predictions = self.predict(inputs)?;
        let errors: Vec<T> = desired.iter().zip(&predictions).map(|(&d, &p)| d - p).collect();
        let scaled = errors.iter().zip(&self.step_sizes).map(|(&e, &mu)| mu * e).collect();
        self.step_count += 1;
        self.buffer
            .push(DictionarySlot::new(self.step_count, inputs.to_vec(), scaled)?)?;
        self.dim = Some(dim);
        Ok(errors)
    }
}
