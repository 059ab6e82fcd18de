use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::kernel::Regressor;

/// Every node's input and scaled error `μ_l e_l(n)` from one time step.
#[derive(Clone, Debug, PartialEq)]
pub struct DictionarySlot<T> {
    time_index: usize,
    regressors: Vec<Regressor<T>>,
    scaled_errors: Vec<T>,
}

impl<T> DictionarySlot<T> {
    pub fn new(time_index: usize, regressors: Vec<Regressor<T>>, scaled_errors: Vec<T>) -> Result<Self> {
        if regressors.len() != scaled_errors.len() {
            return Err(Error::DimensionMismatch {
                expected: regressors.len(),
                found: scaled_errors.len(),
            });
        }
        if time_index == 0 {
            return Err(Error::InvalidArgument("time indices start at 1".into()));
        }
        Ok(DictionarySlot {
            time_index,
            regressors,
            scaled_errors,
        })
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn regressors(&self) -> &[Regressor<T>] {
        &self.regressors
    }

    pub fn scaled_errors(&self) -> &[T] {
        &self.scaled_errors
    }
}

/// FIFO of whole network slots holding at most `capacity` of the most recent steps.
#[derive(Clone, Debug)]
pub struct KernelBuffer<T> {
    capacity: usize,
    slots: VecDeque<DictionarySlot<T>>,
}

impl<T> KernelBuffer<T> {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidArgument("buffer capacity must be at least 1".into()));
        }
        Ok(KernelBuffer {
            capacity,
            slots: VecDeque::with_capacity(capacity.min(4096)),
        })
    }

    /// Appends `slot`, evicting the oldest one when full.
    pub fn push(&mut self, slot: DictionarySlot<T>) -> Result<()> {
        if let Some(last) = self.slots.back() {
            if slot.time_index <= last.time_index {
                return Err(Error::InvalidArgument(format!(
                    "slot time index {} does not follow {}",
                    slot.time_index, last.time_index
                )));
            }
        }
        if self.slots.len() == self.capacity {
            self.slots.pop_front();
        }
        self.slots.push_back(slot);
        Ok(())
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &DictionarySlot<T>> {
        self.slots.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slot(n: usize) -> DictionarySlot<f64> {
        DictionarySlot::new(n, vec![Regressor::scalar(n as f64).unwrap()], vec![1.0]).unwrap()
    }

    #[test]
    fn keeps_most_recent() {
        let mut b = KernelBuffer::new(3).unwrap();
        for n in 1..=7 {
            b.push(slot(n)).unwrap();
            let idx: Vec<_> = b.iter().map(|s| s.time_index()).collect();
            let expected: Vec<_> = (n.saturating_sub(2).max(1)..=n).collect();
            assert_eq!(idx, expected);
        }
    }

    #[test]
    fn unit_capacity() {
        let mut b = KernelBuffer::new(1).unwrap();
        b.push(slot(1)).unwrap();
        b.push(slot(2)).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.iter().next().unwrap().time_index(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(KernelBuffer::<f64>::new(0).is_err());
        let mut b = KernelBuffer::new(2).unwrap();
        b.push(slot(2)).unwrap();
        assert!(b.push(slot(2)).is_err());
        assert!(DictionarySlot::new(1, vec![Regressor::scalar(0.0).unwrap()], vec![1.0, 2.0]).is_err());
        assert!(DictionarySlot::<f64>::new(0, vec![], vec![]).is_err());
    }
}
