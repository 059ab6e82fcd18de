//! Diffusion kernel LMS over ad-hoc networks.
//!
//! Nodes of a connected network observe a common nonlinear system one sample
//! per step. Each node runs a kernel LMS update on its own sample and then
//! convexly combines its neighbors' intermediate functions (adapt-then-combine).
//! Functions are kept in closed form as kernel expansions weighted by powers of
//! the combination matrix, truncated to a FIFO buffer of recent steps.
//!
//! Modules:
//!
//! - [`graph`]: topologies, Metropolis weights, propagation-weight ladders and hop masking
//! - [`kernel`]: Gaussian kernel and Gram matrices
//! - [`adaptive`]: DKLMS, KLMS (single, per-node, centralized) and linear diffusion LMS
//! - [`sim`]: seeded generators for the nonlinear benchmark and the linear model
//! - [`harness`]: experiment configs, Monte-Carlo runner, metrics, regret and CSV output
//!
//! The numerical core is generic over [`Scalar`] (`f32`/`f64`); combination
//! weights only need [`Weight`] and also run on exact rationals. The aliases
//! below fix the scalar for the common cases.

pub mod adaptive;
pub mod error;
pub mod graph;
pub mod harness;
pub mod kernel;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::{Scalar, Weight};

pub type Dklms64 = adaptive::Dklms<f64>;
pub type Dklms32 = adaptive::Dklms<f32>;
pub type Klms64 = adaptive::Klms<f64>;
pub type Klms32 = adaptive::Klms<f32>;
pub type LinearDlms64 = adaptive::LinearDlms<f64>;
pub type LinearDlms32 = adaptive::LinearDlms<f32>;
pub type CombinationMatrix64 = graph::CombinationMatrix<f64>;
pub type PropagationWeights64 = graph::PropagationWeights<f64>;
pub type KernelParams64 = kernel::KernelParams<f64>;
pub type Regressor64 = kernel::Regressor<f64>;
