//! Reproducing kernels.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `exp(-β ‖u - v‖²)`
    #[default]
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams<T> {
    family: KernelFamily,
    bandwidth: T,
}

impl<T: Scalar> KernelParams<T> {
    pub fn new(family: KernelFamily, bandwidth: T) -> Result<Self> {
        if !(bandwidth > T::zero()) || !bandwidth.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "kernel bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        Ok(KernelParams { family, bandwidth })
    }

    pub fn gaussian(bandwidth: T) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, bandwidth)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn bandwidth(&self) -> T {
        self.bandwidth
    }

    /// Kernel value without the dimension check. Callers guarantee equal lengths.
    #[inline]
    pub(crate) fn eval_slices(&self, u: &[T], v: &[T]) -> T {
        match self.family {
            KernelFamily::Gaussian => {
                let sq = u
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
                (-self.bandwidth * sq).exp()
            }
        }
    }

    pub fn eval(&self, u: &Regressor<T>, v: &Regressor<T>) -> Result<T> {
        if u.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: v.dim(),
            });
        }
        Ok(self.eval_slices(u.as_slice(), v.as_slice()))
    }

    /// Gram matrix `G[i][j] = κ(points[i], points[j])`.
    pub fn gram(&self, points: &[Regressor<T>]) -> Result<DMatrix<T>> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidArgument("gram matrix of an empty point set".into()))?;
        ensure_uniform(points, first.dim())?;
        let n = points.len();
        let mut g = DMatrix::from_element(n, n, T::one());
        for i in 0..n {
            for j in 0..i {
                let v = self.eval_slices(points[i].as_slice(), points[j].as_slice());
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }
}

pub(crate) fn ensure_uniform<T>(points: &[Regressor<T>], dim: usize) -> Result<()> {
    match points.iter().find(|p| p.dim() != dim) {
        Some(p) => Err(Error::DimensionMismatch {
            expected: dim,
            found: p.dim(),
        }),
        None => Ok(()),
    }
}

/// Finite, nonempty input vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Regressor<T>(Vec<T>);

impl<T: Scalar> Regressor<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("regressor must have dimension >= 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("regressor"));
        }
        Ok(Regressor(values))
    }

    pub fn scalar(value: T) -> Result<Self> {
        Self::new(vec![value])
    }
}

impl<T> Regressor<T> {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn reg(v: &[f64]) -> Regressor<f64> {
        Regressor::new(v.to_vec()).unwrap()
    }

    #[test]
    fn unit_at_zero_distance() {
        let k = KernelParams::gaussian(1.1).unwrap();
        assert_eq!(k.eval(&reg(&[0.3, -2.0]), &reg(&[0.3, -2.0])).unwrap(), 1.0);
    }

    #[test]
    fn half_at_sqrt_ln2() {
        let k = KernelParams::gaussian(1.0).unwrap();
        let v = k.eval(&reg(&[0.0]), &reg(&[std::f64::consts::LN_2.sqrt()])).unwrap();
        assert_close(v, 0.5, 1e-15);
    }

    #[test]
    fn bandwidth_one_point_one() {
        let k = KernelParams::gaussian(1.1).unwrap();
        let v = k.eval(&reg(&[0.0]), &reg(&[1.0])).unwrap();
        assert_close(v, 0.33287108369807955, 1e-15);
    }

    #[test]
    fn single_precision() {
        let k = KernelParams::<f32>::gaussian(1.1).unwrap();
        let u = Regressor::new(vec![0.0f32]).unwrap();
        let v = Regressor::new(vec![1.0f32]).unwrap();
        assert!((k.eval(&u, &v).unwrap() - 0.332_871_1).abs() < 1e-6);
    }

    #[test]
    fn rejects_mismatch_and_bad_params() {
        let k = KernelParams::gaussian(1.0).unwrap();
        assert!(k.eval(&reg(&[0.0]), &reg(&[0.0, 1.0])).is_err());
        assert!(KernelParams::gaussian(0.0).is_err());
        assert!(KernelParams::gaussian(-1.0).is_err());
        assert!(KernelParams::gaussian(f64::NAN).is_err());
        assert!(Regressor::new(vec![f64::INFINITY]).is_err());
        assert!(Regressor::<f64>::new(vec![]).is_err());
        assert!(k.gram(&[reg(&[0.0]), reg(&[0.0, 1.0])]).is_err());
        assert!(k.gram(&[]).is_err());
    }

    #[test]
    fn small_gram_matrices() {
        let k = KernelParams::gaussian(1.1).unwrap();
        assert_eq!(k.gram(&[reg(&[0.4])]).unwrap(), DMatrix::from_element(1, 1, 1.0));
        assert_eq!(
            k.gram(&[reg(&[0.4]), reg(&[0.4])]).unwrap(),
            DMatrix::from_element(2, 2, 1.0)
        );
    }
}
