//! Empirical regret against a fixed comparator function.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::{ensure_uniform, KernelParams, Regressor};

/// Batch kernel ridge regressor `g(x) = Σ_j α_j κ(c_j, x)` with
/// `(G + λ I) α = y`.
#[derive(Clone, Debug)]
pub struct KernelRidge {
    centers: Vec<Regressor<f64>>,
    coefficients: Vec<f64>,
    kernel: KernelParams<f64>,
}

impl KernelRidge {
    pub fn fit(
        kernel: KernelParams<f64>,
        centers: Vec<Regressor<f64>>,
        targets: &[f64],
        regularization: f64,
    ) -> Result<Self> {
        if centers.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: centers.len(),
                found: targets.len(),
            });
        }
        if !(regularization > 0.0) {
            return Err(Error::InvalidArgument("ridge regularization must be positive".into()));
        }
        let n = centers.len();
        let gram = kernel.gram(&centers)? + DMatrix::identity(n, n) * regularization;
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::InvalidArgument("regularized Gram matrix is not positive definite".into()))?;
        let alpha = chol.solve(&DVector::from_column_slice(targets));
        Ok(KernelRidge {
            centers,
            coefficients: alpha.iter().copied().collect(),
            kernel,
        })
    }

    pub fn predict(&self, x: &Regressor<f64>) -> Result<f64> {
        ensure_uniform(std::slice::from_ref(x), self.centers[0].dim())?;
        Ok(self
            .centers
            .iter()
            .zip(&self.coefficients)
            .map(|(c, a)| a * self.kernel.eval_slices(c.as_slice(), x.as_slice()))
            .sum())
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegretCurve {
    /// `R(N)` for `N = 1 ..= len`.
    pub regret: Vec<f64>,
    /// Least-squares slope of `ln max(R(N), 1)` against `ln N` over the second half.
    pub slope: f64,
}

/// `R(N) = Σ_{i ≤ N} (algorithm_losses[i] - comparator_losses[i])`, where each
/// entry is already summed over nodes.
pub fn empirical_regret(algorithm_losses: &[f64], comparator_losses: &[f64]) -> Result<RegretCurve> {
    if algorithm_losses.len() != comparator_losses.len() {
        return Err(Error::Ragged(format!(
            "{} algorithm losses vs {} comparator losses",
            algorithm_losses.len(),
            comparator_losses.len()
        )));
    }
    let regret: Vec<f64> = algorithm_losses
        .iter()
        .zip(comparator_losses)
        .scan(0.0, |acc, (a, c)| {
            *acc += a - c;
            Some(*acc)
        })
        .collect();
    let slope = loglog_slope(&regret);
    Ok(RegretCurve { regret, slope })
}

/// Slope over `N ∈ [len/2, len]`; NaN with fewer than two points.
pub fn loglog_slope(regret: &[f64]) -> f64 {
    let total = regret.len();
    let first = total.div_ceil(2).max(1);
    let points: Vec<(f64, f64)> = (first..=total)
        .map(|n| ((n as f64).ln(), regret[n - 1].max(1.0).ln()))
        .collect();
    if points.len() < 2 {
        return f64::NAN;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
