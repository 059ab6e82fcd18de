use std::collections::VecDeque;

use super::{check_network_input, NetworkFilter};
use crate::error::{Error, Result};
use crate::kernel::{KernelParams, Regressor};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlmsOutput<T> {
    pub error: T,
    pub prediction: T,
}

/// Single-learner kernel LMS in its kernel-expansion form:
/// `f_{n-1}(x) = μ Σ_i e(i) κ(x(i), x)`.
///
/// `capacity` bounds the number of stored centers (oldest evicted first);
/// `None` keeps the whole history.
#[derive(Clone, Debug)]
pub struct Klms<T: Scalar> {
    centers: VecDeque<Regressor<T>>,
    errors: VecDeque<T>,
    step_size: T,
    kernel: KernelParams<T>,
    capacity: Option<usize>,
}

impl<T: Scalar> Klms<T> {
    pub fn new(step_size: T, kernel: KernelParams<T>, capacity: Option<usize>) -> Result<Self> {
        super::check_step_sizes(&[step_size])?;
        if capacity == Some(0) {
            return Err(Error::InvalidArgument("capacity must be at least 1".into()));
        }
        Ok(Klms {
            centers: VecDeque::new(),
            errors: VecDeque::new(),
            step_size,
            kernel,
            capacity,
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn predict(&self, input: &Regressor<T>) -> Result<T> {
        if let Some(c) = self.centers.front() {
            if c.dim() != input.dim() {
                return Err(Error::DimensionMismatch {
                    expected: c.dim(),
                    found: input.dim(),
                });
            }
        }
        let x = input.as_slice();
        let sum = self
            .centers
            .iter()
            .zip(&self.errors)
            .fold(T::zero(), |acc, (c, &e)| acc + e * self.kernel.eval_slices(c.as_slice(), x));
        Ok(self.step_size * sum)
    }

    pub fn step(&mut self, input: &Regressor<T>, desired: T) -> Result<KlmsOutput<T>> {
        if !desired.is_finite() {
            return Err(Error::NonFinite("desired response"));
        }
        let prediction = self.predict(input)?;
        let error = desired - prediction;
        if Some(self.centers.len()) == self.capacity {
            self.centers.pop_front();
            self.errors.pop_front();
        }
        self.centers.push_back(input.clone());
        self.errors.push_back(error);
        Ok(KlmsOutput { error, prediction })
    }
}

/// Independent KLMS per node, no cooperation.
#[derive(Clone, Debug)]
pub struct NoncoopKlms<T: Scalar> {
    nodes: Vec<Klms<T>>,
}

impl<T: Scalar> NoncoopKlms<T> {
    pub fn new(nodes: Vec<Klms<T>>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("at least one node required".into()));
        }
        Ok(NoncoopKlms { nodes })
    }

    pub fn uniform(num_nodes: usize, step_size: T, kernel: KernelParams<T>, capacity: Option<usize>) -> Result<Self> {
        let node = Klms::new(step_size, kernel, capacity)?;
        Self::new(vec![node; num_nodes])
    }

    pub fn node(&self, k: usize) -> &Klms<T> {
        &self.nodes[k]
    }
}

impl<T: Scalar> NetworkFilter<T> for NoncoopKlms<T> {
    fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn step(&mut self, inputs: &[Regressor<T>], desired: &[T]) -> Result<Vec<T>> {
        check_network_input(self.nodes.len(), None, inputs, desired)?;
        self.nodes
            .iter_mut()
            .zip(inputs.iter().zip(desired))
            .map(|(node, (x, &d))| node.step(x, d).map(|o| o.error))
            .collect()
    }
}

/// One fusion center that receives every node's sample, visiting nodes in
/// index order within each time step. Each error is a-priori with respect to
/// everything the center has seen so far.
#[derive(Clone, Debug)]
pub struct CentralizedKlms<T: Scalar> {
    inner: Klms<T>,
    num_nodes: usize,
}

impl<T: Scalar> CentralizedKlms<T> {
    pub fn new(num_nodes: usize, inner: Klms<T>) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::InvalidArgument("at least one node required".into()));
        }
        Ok(CentralizedKlms { inner, num_nodes })
    }
}

impl<T: Scalar> NetworkFilter<T> for CentralizedKlms<T> {
    fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    fn step(&mut self, inputs: &[Regressor<T>], desired: &[T]) -> Result<Vec<T>> {
        check_network_input(self.num_nodes, None, inputs, desired)?;
        inputs
            .iter()
            .zip(desired)
            .map(|(x, &d)| self.inner.step(x, d).map(|o| o.error))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg(x: f64) -> Regressor<f64> {
        Regressor::scalar(x).unwrap()
    }

    #[test]
    fn first_and_second_step() {
        let k = KernelParams::gaussian(1.1).unwrap();
        let mut f = Klms::new(0.6, k, None).unwrap();
        let o1 = f.step(&reg(0.3), 0.8).unwrap();
        assert_eq!(o1.prediction, 0.0);
        assert_eq!(o1.error, 0.8);
        let o2 = f.step(&reg(-0.2), 0.1).unwrap();
        let expected = 0.6 * 0.8 * (-1.1f64 * 0.25).exp();
        assert!((o2.prediction - expected).abs() < 1e-15);
        assert!((o2.error - (0.1 - expected)).abs() < 1e-15);
    }

    #[test]
    fn capacity_evicts_oldest() {
        let k = KernelParams::gaussian(1.0).unwrap();
        let mut bounded = Klms::new(0.5, k, Some(2)).unwrap();
        for n in 0..5 {
            bounded.step(&reg(n as f64), 1.0).unwrap();
        }
        assert_eq!(bounded.len(), 2);
        assert!(Klms::new(0.5, k, Some(0)).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let k = KernelParams::gaussian(1.0).unwrap();
        let mut f = Klms::new(0.5, k, None).unwrap();
        assert!(f.step(&reg(0.0), f64::INFINITY).is_err());
        f.step(&reg(0.0), 1.0).unwrap();
        assert!(f.step(&Regressor::new(vec![0.0, 1.0]).unwrap(), 1.0).is_err());
        assert!(Klms::new(-0.1, k, None).is_err());
    }

    #[test]
    fn noncoop_single_node_is_klms() {
        let k = KernelParams::gaussian(1.1).unwrap();
        let mut a = Klms::new(0.6, k, None).unwrap();
        let mut b = NoncoopKlms::uniform(1, 0.6, k, None).unwrap();
        for n in 0..30 {
            let x = (n as f64 * 0.37).sin();
            let d = x * x * x + 0.1;
            let ea = a.step(&reg(x), d).unwrap().error;
            let eb = b.step(&[reg(x)], &[d]).unwrap()[0];
            assert_eq!(ea, eb);
        }
    }

    #[test]
    fn noncoop_nodes_do_not_interact() {
        let k = KernelParams::gaussian(1.1).unwrap();
        let mut a = NoncoopKlms::uniform(2, 0.6, k, None).unwrap();
        let mut b = NoncoopKlms::uniform(2, 0.6, k, None).unwrap();
        for n in 0..20 {
            let x = (n as f64 * 0.5).cos();
            let ea = a.step(&[reg(x), reg(0.1 * n as f64)], &[x, 1.0]).unwrap();
            let eb = b.step(&[reg(x), reg(-0.3)], &[x, -5.0]).unwrap();
            assert_eq!(ea[0], eb[0]);
        }
    }

    #[test]
    fn centralized_sees_samples_in_node_order() {
        let k = KernelParams::gaussian(1.1).unwrap();
        let mut c = CentralizedKlms::new(2, Klms::new(0.6, k, None).unwrap()).unwrap();
        let e = c.step(&[reg(0.0), reg(1.0)], &[1.0, 1.0]).unwrap();
        assert_eq!(e[0], 1.0);
        assert!((e[1] - (1.0 - 0.6 * (-1.1f64).exp())).abs() < 1e-15);
    }
}
