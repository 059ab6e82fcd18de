use std::sync::Arc;

use super::{check_network_input, check_step_sizes, NetworkFilter};
use crate::error::{Error, Result};
use crate::graph::CombinationMatrix;
use crate::kernel::Regressor;
use crate::scalar::Scalar;

/// Linear ATC diffusion LMS.
///
/// Adapt: `ψ_k = w_k(n-1) + μ_k e_k(n) x_k(n)`. Combine: `w_k(n) = Σ_l a_kl ψ_l`.
#[derive(Clone, Debug)]
pub struct LinearDlms<T: Scalar> {
    estimates: Vec<Vec<T>>,
    combination: Arc<CombinationMatrix<T>>,
    step_sizes: Vec<T>,
}

impl<T: Scalar> LinearDlms<T> {
    /// Zero-initialized estimates of dimension `dim`.
    pub fn new(combination: Arc<CombinationMatrix<T>>, step_sizes: Vec<T>, dim: usize) -> Result<Self> {
        check_step_sizes(&step_sizes)?;
        if step_sizes.len() != combination.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: combination.num_nodes(),
                found: step_sizes.len(),
            });
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("estimate dimension must be at least 1".into()));
        }
        Ok(LinearDlms {
            estimates: vec![vec![T::zero(); dim]; step_sizes.len()],
            combination,
            step_sizes,
        })
    }

    pub fn uniform(combination: Arc<CombinationMatrix<T>>, step_size: T, dim: usize) -> Result<Self> {
        let k = combination.num_nodes();
        Self::new(combination, vec![step_size; k], dim)
    }

    pub fn estimates(&self) -> &[Vec<T>] {
        &self.estimates
    }

    pub fn dim(&self) -> usize {
        self.estimates[0].len()
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

impl<T: Scalar> NetworkFilter<T> for LinearDlms<T> {
    fn num_nodes(&self) -> usize {
        self.estimates.len()
    }

    fn step(&mut self, inputs: &[Regressor<T>], desired: &[T]) -> Result<Vec<T>> {
        check_network_input(self.num_nodes(), Some(self.dim()), inputs, desired)?;
        let mut errors = Vec::with_capacity(inputs.len());
        let adapted: Vec<Vec<T>> = self
            .estimates
            .iter()
            .zip(inputs)
            .zip(desired.iter().zip(&self.step_sizes))
            .map(|((w, x), (&d, &mu))| {
                let x = x.as_slice();
                let e = d - dot(w, x);
                errors.push(e);
                w.iter().zip(x).map(|(&wi, &xi)| wi + mu * e * xi).collect()
            })
            .collect();
        let a = self.combination.matrix();
        for (k, w) in self.estimates.iter_mut().enumerate() {
            w.iter_mut().for_each(|v| *v = T::zero());
            for (l, psi) in adapted.iter().enumerate() {
                let weight = a[(k, l)];
                if weight == T::zero() {
                    continue;
                }
                for (wi, &pi) in w.iter_mut().zip(psi) {
                    *wi += weight * pi;
                }
            }
        }
        Ok(errors)
    }
}
