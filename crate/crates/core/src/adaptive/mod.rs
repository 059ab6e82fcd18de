//! Online learners: diffusion KLMS and its baselines.
//!
//! All learners share the [`NetworkFilter`] interface: at each time step they
//! receive every node's regressor and desired response, predict with the
//! estimate from the previous step, and return the a-priori errors.

mod buffer;
mod dklms;
mod klms;
mod linear;

pub use buffer::{DictionarySlot, KernelBuffer};
pub use dklms::Dklms;
pub use klms::{CentralizedKlms, Klms, KlmsOutput, NoncoopKlms};
pub use linear::LinearDlms;

use crate::error::{Error, Result};
use crate::kernel::Regressor;
use crate::scalar::Scalar;

/// A learner driven one network-wide time step at a time.
pub trait NetworkFilter<T: Scalar>: Send {
    fn num_nodes(&self) -> usize;

    /// Consumes step `n` and returns `e_k(n) = d_k(n) - f_{k,n-1}(x_k(n))` for every node.
    fn step(&mut self, inputs: &[Regressor<T>], desired: &[T]) -> Result<Vec<T>>;
}

/// `½ (desired - prediction)²`
pub fn instantaneous_loss<T: Scalar>(desired: T, prediction: T) -> T {
    let e = desired - prediction;
    T::lit(0.5) * e * e
}

pub(crate) fn check_step_sizes<T: Scalar>(step_sizes: &[T]) -> Result<()> {
    if step_sizes.is_empty() {
        return Err(Error::InvalidArgument("at least one node required".into()));
    }
    if step_sizes.iter().any(|mu| !(*mu > T::zero()) || !mu.is_finite()) {
        return Err(Error::InvalidArgument("step sizes must be positive and finite".into()));
    }
    Ok(())
}

pub(crate) fn check_network_input<T: Scalar>(
    num_nodes: usize,
    dim: Option<usize>,
    inputs: &[Regressor<T>],
    desired: &[T],
) -> Result<usize> {
    if inputs.len() != num_nodes {
        return Err(Error::DimensionMismatch {
            expected: num_nodes,
            found: inputs.len(),
        });
    }
    if desired.len() != num_nodes {
        return Err(Error::DimensionMismatch {
            expected: num_nodes,
            found: desired.len(),
        });
    }
    if desired.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFinite("desired response"));
    }
    let dim = dim.unwrap_or(inputs[0].dim());
    crate::kernel::ensure_uniform(inputs, dim)?;
    Ok(dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_values() {
        assert_eq!(instantaneous_loss(1.0, 1.0), 0.0);
        assert_eq!(instantaneous_loss(2.0, 0.0), 2.0);
        assert!((instantaneous_loss(1.7f64, 1.4) - 0.045).abs() < 1e-15);
        assert!((instantaneous_loss(1.7f32, 1.4f32) - 0.045).abs() < 1e-6);
    }
}
