//! Metrised Jordan algebras, Hessian potentials, and canonical barriers on
//! symmetric cones.
//!
//! The crate moves in both directions between the two sides of the
//! correspondence:
//!
//! - [`algebra`] represents commutative algebras by structure constants,
//!   validates Jordan and metrised properties, and provides the Euclidean
//!   families (componentwise, spin, sym, direct sums) with their spectral
//!   calculus.
//! - [`potential`] builds scalar fields from metrised algebras: truncated
//!   power series, closed-form log-det potentials, and canonical barriers,
//!   with exact derivative evaluators where closed forms exist.
//! - [`geometry`] is the verification engine: difference tensors, PDE
//!   residuals for parallel first/third derivatives, unit/center/ν recovery,
//!   algebra reconstruction, and parallel transport along polylines.
//! - [`numdiff`] is an independent finite-difference oracle for derivative
//!   tensors up to order four.
//! - [`io`] defines the JSON documents consumed by the CLI.

pub mod algebra;
pub mod geometry;
pub mod io;
pub mod numdiff;
pub mod potential;
pub mod sampling;
pub mod tensor;

pub use algebra::{
    determinant, invariance_residual, inverse, logdet, spectral, AlgebraError, BilinearForm,
    Family, JordanAlgebra, MetrisedAlgebra, SpectralDecomposition,
};
pub use geometry::{
    difference_tensor, isomorphism_residual, parallel_transport, reconstruct_algebra,
    recover_center, recover_nu, recover_unit, residual_first_parallel, residual_third_parallel,
    sample_tensors, DifferenceTensor, GeometryError, Residual, TensorSample, VerificationConfig,
};
pub use numdiff::{fd_consistency, fd_derivative, DerivTensor, NumdiffError, StencilConfig};
pub use potential::{
    canonical_barrier, homogeneity_parameter, logdet_field, series_gradient, series_hessian,
    series_potential, series_third, BarrierPotential, BarrierSpec, DerivSource,
    FormalSeriesPotential, Potential, PotentialError, Provenance, QuadraticPotential,
    SeriesPotential,
};
pub use tensor::{Tensor3, Tensor4};
