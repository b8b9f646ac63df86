//! Differential-geometric verification engine over potential fields.
//!
//! Everything here consumes a [`Potential`] through derivative tensors at a
//! point: the difference tensor between the flat and Levi-Civita connections,
//! residuals of the parallel-first and parallel-third derivative equations,
//! recovery of unit/center/homogeneity data, and reconstruction of the
//! metrised algebra living on the tangent space.

mod transport;

pub use transport::{isomorphism_residual, metric_preservation_residual, parallel_transport};

use crate::algebra::{AlgebraError, BilinearForm, JordanAlgebra, MetrisedAlgebra};
use crate::numdiff::{fd_derivative, DerivTensor, NumdiffError, StencilConfig};
use crate::potential::{DerivSource, Potential, PotentialError};
use crate::tensor::{Tensor3, Tensor4};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point lies outside the field's domain")]
    OutsideDomain,
    #[error("degenerate Hessian: |det g| = {det:.3e} below threshold")]
    DegenerateHessian { det: f64 },
    #[error("third-parallel residual {residual:.3e} exceeds the reconstruction gate {gate:.3e}")]
    ResidualTooLarge { residual: f64, gate: f64 },
    #[error("transport path leaves the domain in segment {segment}")]
    PathOutsideDomain { segment: usize },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Numdiff(#[from] NumdiffError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Centralized tolerances for the verification operations.
#[derive(Debug, Clone)]
pub struct VerificationConfig {
    /// Pass threshold for the normalized third-parallel residual.
    pub tol_third: f64,
    /// Pass threshold for the normalized first-parallel residual.
    pub tol_first: f64,
    /// Reconstruction refuses when the third-parallel residual exceeds this.
    pub reconstruct_gate: f64,
    /// Invariance tolerance applied to reconstructed metrised algebras.
    pub invariance_tol: f64,
    /// |det g| below this times ‖g‖^dim counts as degenerate.
    pub degeneracy_factor: f64,
    /// Stencil used whenever a field lacks an exact evaluator.
    pub stencil: StencilConfig,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        Self {
            tol_third: 1e-6,
            tol_first: 1e-6,
            reconstruct_gate: 1e-4,
            invariance_tol: 1e-8,
            degeneracy_factor: 1e-12,
            stencil: StencilConfig::default(),
        }
    }
}

/// Raw and scale-normalized versions of a residual.
#[derive(Debug, Clone, Copy)]
pub struct Residual {
    pub raw: f64,
    pub normalized: f64,
}

/// Derivative tensors of a field at one point.
#[derive(Debug, Clone)]
pub struct TensorSample {
    pub point: DVector<f64>,
    pub gradient: DVector<f64>,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub third: Tensor3,
    pub fourth: Tensor4,
    /// Source per derivative order 1..=4.
    pub sources: [DerivSource; 4],
}

fn field_closure<'a>(p: &'a dyn Potential) -> impl Fn(&DVector<f64>) -> Option<f64> + 'a {
    move |x: &DVector<f64>| {
        if p.contains(x) {
            p.value(x).ok()
        } else {
            None
        }
    }
}

fn order_tensor(
    p: &dyn Potential,
    x: &DVector<f64>,
    order: usize,
    cfg: &VerificationConfig,
) -> Result<(DerivTensor, DerivSource), GeometryError> {
    match p.derivative(x, order) {
        Some(res) => {
            let tensor = res?;
            let source = p.source(order).unwrap_or(DerivSource::Exact);
            Ok((tensor, source))
        }
        None => {
            let tensor = fd_derivative(field_closure(p), x, order, &cfg.stencil)?;
            Ok((tensor, DerivSource::FiniteDifference))
        }
    }
}

/// Pulls all derivative tensors at `x`, exact where the field provides them
/// and finite-difference otherwise; checks Hessian non-degeneracy.
pub fn sample_tensors(
    p: &dyn Potential,
    x: &DVector<f64>,
    cfg: &VerificationConfig,
) -> Result<TensorSample, GeometryError> {
    if !p.contains(x) {
        return Err(GeometryError::OutsideDomain);
    }
    let (g1, s1) = order_tensor(p, x, 1, cfg)?;
    let (g2, s2) = order_tensor(p, x, 2, cfg)?;
    let (g3, s3) = order_tensor(p, x, 3, cfg)?;
    let (g4, s4) = order_tensor(p, x, 4, cfg)?;
    let gradient = match g1 {
        DerivTensor::Order1(v) => v,
        _ => unreachable!(),
    };
    let g_raw = match g2 {
        DerivTensor::Order2(m) => m,
        _ => unreachable!(),
    };
    let third = match g3 {
        DerivTensor::Order3(t) => t.symmetrized(),
        _ => unreachable!(),
    };
    let fourth = match g4 {
        DerivTensor::Order4(t) => t.symmetrized(),
        _ => unreachable!(),
    };
    let g = (&g_raw + g_raw.transpose()) * 0.5;
    let (g_inv, det) = invert_metric(&g, cfg)?;
    let _ = det;
    Ok(TensorSample {
        point: x.clone(),
        gradient,
        g,
        g_inv,
        third,
        fourth,
        sources: [s1, s2, s3, s4],
    })
}

fn invert_metric(
    g: &DMatrix<f64>,
    cfg: &VerificationConfig,
) -> Result<(DMatrix<f64>, f64), GeometryError> {
    let n = g.nrows();
    let scale = g.amax();
    let lu = g.clone().lu();
    let det = lu.determinant();
    if scale == 0.0 || det.abs() <= cfg.degeneracy_factor * scale.powi(n as i32) {
        return Err(GeometryError::DegenerateHessian { det });
    }
    let g_inv = lu
        .try_inverse()
        .ok_or(GeometryError::DegenerateHessian { det })?;
    Ok((g_inv, det))
}

/// Difference tensor K^γ_{αβ} = −½ F_{,αβδ} F^{,γδ} at a sampled point,
/// indexed (γ, α, β).
#[derive(Debug, Clone)]
pub struct DifferenceTensor {
    tensor: Tensor3,
}

impl DifferenceTensor {
    pub fn tensor(&self) -> &Tensor3 {
        &self.tensor
    }

    pub fn into_tensor(self) -> Tensor3 {
        self.tensor
    }

    /// Bilinear map K(u, v).
    pub fn apply(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let n = self.tensor.dim();
        DVector::from_fn(n, |g, _| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += self.tensor[(g, a, b)] * u[a] * v[b];
                }
            }
            s
        })
    }
}

pub fn difference_tensor(sample: &TensorSample) -> DifferenceTensor {
    let n = sample.g.nrows();
    let tensor = Tensor3::from_fn(n, |g, a, b| {
        let mut s = 0.0;
        for d in 0..n {
            s += sample.third[(a, b, d)] * sample.g_inv[(g, d)];
        }
        -0.5 * s
    });
    DifferenceTensor { tensor }
}

/// Residual of F_{,αβγδ} = ½F^{,ρσ}(F_{,αβρ}F_{,γδσ} + F_{,αγρ}F_{,βδσ} +
/// F_{,αδρ}F_{,βγσ}); zero exactly when the third derivative is parallel.
pub fn residual_third_from_sample(sample: &TensorSample) -> Residual {
    let n = sample.g.nrows();
    // M[(a,b),(c,d)] = F_{,abρ} F^{,ρσ} F_{,cdσ}
    let mut flat = DMatrix::zeros(n * n, n);
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                flat[(a * n + b, d)] = sample.third[(a, b, d)];
            }
        }
    }
    let m = &flat * &sample.g_inv * flat.transpose();
    let mut raw = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let rhs = 0.5
                        * (m[(a * n + b, c * n + d)]
                            + m[(a * n + c, b * n + d)]
                            + m[(a * n + d, b * n + c)]);
                    raw = raw.max((sample.fourth[(a, b, c, d)] - rhs).abs());
                }
            }
        }
    }
    Residual {
        raw,
        normalized: raw / (1.0 + sample.fourth.max_abs()),
    }
}

/// Residual of F_{,δ}F^{,γδ}F_{,αβγ} = 2F_{,αβ}; zero exactly when the first
/// derivative is parallel.
pub fn residual_first_from_sample(sample: &TensorSample) -> Residual {
    let n = sample.g.nrows();
    let w = &sample.g_inv * &sample.gradient;
    let mut raw = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let mut lhs = 0.0;
            for g in 0..n {
                lhs += sample.third[(a, b, g)] * w[g];
            }
            raw = raw.max((lhs - 2.0 * sample.g[(a, b)]).abs());
        }
    }
    Residual {
        raw,
        normalized: raw / sample.g.amax(),
    }
}

pub fn residual_third_parallel(
    p: &dyn Potential,
    x: &DVector<f64>,
    cfg: &VerificationConfig,
) -> Result<Residual, GeometryError> {
    Ok(residual_third_from_sample(&sample_tensors(p, x, cfg)?))
}

pub fn residual_first_parallel(
    p: &dyn Potential,
    x: &DVector<f64>,
    cfg: &VerificationConfig,
) -> Result<Residual, GeometryError> {
    Ok(residual_first_from_sample(&sample_tensors(p, x, cfg)?))
}

/// Candidate unit element e^γ = −F_{,δ}F^{,γδ}.
pub fn recover_unit(sample: &TensorSample) -> DVector<f64> {
    -(&sample.g_inv * &sample.gradient)
}

/// Center c = x − e; meaningful when the first-parallel residual is small.
pub fn recover_center(
    p: &dyn Potential,
    x: &DVector<f64>,
    cfg: &VerificationConfig,
) -> Result<DVector<f64>, GeometryError> {
    let sample = sample_tensors(p, x, cfg)?;
    Ok(x - recover_unit(&sample))
}

/// Homogeneity parameter ν = ⟨∇F, e⟩ in centered coordinates.
pub fn recover_nu(
    p: &dyn Potential,
    x: &DVector<f64>,
    cfg: &VerificationConfig,
) -> Result<f64, GeometryError> {
    let sample = sample_tensors(p, x, cfg)?;
    Ok(sample.gradient.dot(&recover_unit(&sample)))
}

/// Rebuilds the metrised algebra on the tangent space at `x`: structure
/// constants from the difference tensor, form from the Hessian. Refuses when
/// the third-parallel residual exceeds the configured gate.
pub fn reconstruct_algebra(
    p: &dyn Potential,
    x: &DVector<f64>,
    cfg: &VerificationConfig,
) -> Result<MetrisedAlgebra, GeometryError> {
    let sample = sample_tensors(p, x, cfg)?;
    reconstruct_from_sample(&sample, cfg)
}

pub fn reconstruct_from_sample(
    sample: &TensorSample,
    cfg: &VerificationConfig,
) -> Result<MetrisedAlgebra, GeometryError> {
    let residual = residual_third_from_sample(sample);
    if residual.normalized > cfg.reconstruct_gate {
        return Err(GeometryError::ResidualTooLarge {
            residual: residual.normalized,
            gate: cfg.reconstruct_gate,
        });
    }
    let k = difference_tensor(sample);
    let algebra = JordanAlgebra::from_structure(k.into_tensor())?;
    let form = BilinearForm::new(sample.g.clone())?;
    Ok(MetrisedAlgebra::with_tolerance(
        algebra,
        form,
        cfg.invariance_tol,
    )?)
}

/// Matrix of the map u ↦ K(ẋ, u) at `x`; the generator of the transport ODE.
pub(crate) fn difference_tensor_matrix(
    p: &dyn Potential,
    x: &DVector<f64>,
    xdot: &DVector<f64>,
    cfg: &VerificationConfig,
) -> Result<DMatrix<f64>, GeometryError> {
    let (g_inv, third) = sample_g_third(p, x, cfg)?;
    let n = x.len();
    // contracted[(b, d)] = F_{,abd} ẋ^a, then K(ẋ,·)^g_b = −½ F^{,gd} contracted
    let mut contracted = DMatrix::zeros(n, n);
    for b in 0..n {
        for d in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                s += third[(a, b, d)] * xdot[a];
            }
            contracted[(b, d)] = s;
        }
    }
    Ok(&g_inv * contracted.transpose() * -0.5)
}

/// Metric inverse and third tensor only; used by the transport integrator.
pub(crate) fn sample_g_third(
    p: &dyn Potential,
    x: &DVector<f64>,
    cfg: &VerificationConfig,
) -> Result<(DMatrix<f64>, Tensor3), GeometryError> {
    if !p.contains(x) {
        return Err(GeometryError::OutsideDomain);
    }
    let (g2, _) = order_tensor(p, x, 2, cfg)?;
    let (g3, _) = order_tensor(p, x, 3, cfg)?;
    let g_raw = match g2 {
        DerivTensor::Order2(m) => m,
        _ => unreachable!(),
    };
    let third = match g3 {
        DerivTensor::Order3(t) => t,
        _ => unreachable!(),
    };
    let g = (&g_raw + g_raw.transpose()) * 0.5;
    let (g_inv, _) = invert_metric(&g, cfg)?;
    Ok((g_inv, third))
}
