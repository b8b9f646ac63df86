//! Scalar potential fields with derivative access up to order 4.
//!
//! Fields advertise which derivative orders they can evaluate and how
//! (closed form or internal finite differences); consumers that need the
//! full tensor set fall back to [`crate::numdiff`] for anything missing.

mod barrier;
mod series;

pub use barrier::{
    canonical_barrier, homogeneity_parameter, logdet_field, logdet_gradient, logdet_hessian,
    logdet_potential, BarrierPotential, BarrierSpec,
};
pub use series::{
    series_gradient, series_hessian, series_potential, series_third, FormalSeriesPotential,
    SeriesPotential,
};

use crate::algebra::AlgebraError;
use crate::numdiff::DerivTensor;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("point lies outside the field's domain")]
    OutsideDomain,
    #[error("series diverges: spectral radius of L_x is {spectral_radius:.6} >= 1")]
    SeriesDiverged { spectral_radius: f64 },
    #[error("series did not converge within {terms} terms")]
    TermCapReached { terms: usize },
    #[error("operator I + L_x is singular at this point")]
    SingularOperator,
    #[error("algebra is not Jordan (residual {residual:.3e}); use a formal series field instead")]
    NotJordan { residual: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// How a derivative order is produced by the field itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivSource {
    Exact,
    FiniteDifference,
}

impl DerivSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            DerivSource::Exact => "exact",
            DerivSource::FiniteDifference => "finite-difference",
        }
    }
}

/// Construction provenance of a potential field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Series,
    LogDetClosed,
    CanonicalBarrier,
    UserExpression,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Series => "series",
            Provenance::LogDetClosed => "logdet_closed",
            Provenance::CanonicalBarrier => "canonical_barrier",
            Provenance::UserExpression => "user_expression",
        }
    }
}

/// An evaluable scalar field with optional derivative evaluators.
pub trait Potential {
    fn dim(&self) -> usize;

    fn provenance(&self) -> Provenance;

    /// Domain predicate.
    fn contains(&self, x: &DVector<f64>) -> bool;

    fn value(&self, x: &DVector<f64>) -> Result<f64, PotentialError>;

    /// Field-provided derivative for orders 1..=4; `None` when the field has
    /// no evaluator for that order.
    fn derivative(
        &self,
        x: &DVector<f64>,
        order: usize,
    ) -> Option<Result<DerivTensor, PotentialError>>;

    /// Source tag for the orders the field provides.
    fn source(&self, order: usize) -> Option<DerivSource>;
}

/// F(x) = ½ xᵀQx + c. Exact derivatives of every order; third and fourth
/// vanish identically.
#[derive(Debug, Clone)]
pub struct QuadraticPotential {
    q: DMatrix<f64>,
    offset: f64,
}

impl QuadraticPotential {
    pub fn new(q: DMatrix<f64>) -> Self {
        assert_eq!(q.nrows(), q.ncols(), "quadratic form must be square");
        let sym = (&q + q.transpose()) * 0.5;
        Self {
            q: sym,
            offset: 0.0,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }
}

impl Potential for QuadraticPotential {
    fn dim(&self) -> usize {
        self.q.nrows()
    }

    fn provenance(&self) -> Provenance {
        Provenance::UserExpression
    }

    fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim()
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64, PotentialError> {
        check_dim(self.dim(), x)?;
        Ok(0.5 * (x.transpose() * &self.q * x)[(0, 0)] + self.offset)
    }

    fn derivative(
        &self,
        x: &DVector<f64>,
        order: usize,
    ) -> Option<Result<DerivTensor, PotentialError>> {
        if let Err(e) = check_dim(self.dim(), x) {
            return Some(Err(e));
        }
        let n = self.dim();
        match order {
            1 => Some(Ok(DerivTensor::Order1(&self.q * x))),
            2 => Some(Ok(DerivTensor::Order2(self.q.clone()))),
            3 => Some(Ok(DerivTensor::Order3(crate::tensor::Tensor3::zeros(n)))),
            4 => Some(Ok(DerivTensor::Order4(crate::tensor::Tensor4::zeros(n)))),
            _ => None,
        }
    }

    fn source(&self, order: usize) -> Option<DerivSource> {
        (1..=4).contains(&order).then_some(DerivSource::Exact)
    }
}

pub(crate) fn check_dim(expected: usize, x: &DVector<f64>) -> Result<(), PotentialError> {
    if x.len() != expected {
        Err(PotentialError::DimensionMismatch {
            expected,
            got: x.len(),
        })
    } else {
        Ok(())
    }
}
