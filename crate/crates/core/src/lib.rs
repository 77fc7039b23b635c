//! Bergman-kernel geometry on bounded domains: kernels and their jets,
//! Bergman and Ricci tensors, exterior-algebra tools, completeness probes and
//! pluricomplex Green functions.

pub mod criterion;
pub mod domain;
pub mod error;
pub mod geodesy;
pub mod green;
pub mod linalg;
pub mod metrics;
pub mod quadrature;
pub mod report;
pub mod rkhs;
pub mod wedge;

pub use domain::{Domain, Point};
pub use error::{Error, Result};
pub use linalg::HermitianMatrix;
pub use metrics::MetricKind;
pub use rkhs::{BasisSpec, KernelJet, KernelSource};
