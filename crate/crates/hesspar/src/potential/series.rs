//! Power-series potential of a metrised Jordan algebra.
//!
//! F(x) = Σ_{k≥2} (−1)ᵏ/k · σ(x, x^{k−1}), convergent while the spectral
//! radius of L_x stays below one. Derivatives up to order three come from the
//! closed forms built on (I + L_x)⁻¹; order four differentiates the exact
//! third tensor by central differences.

use super::{check_dim, DerivSource, Potential, PotentialError, Provenance};
use crate::algebra::MetrisedAlgebra;
use crate::numdiff::DerivTensor;
use crate::tensor::{Tensor3, Tensor4};
use nalgebra::{DMatrix, DVector, LU};

const TERM_CAP: usize = 500;
const JORDAN_CHECK_TOL: f64 = 1e-10;

/// Truncated-series value with the stopping rule: three consecutive terms
/// below rel_tol·(1 + |partial sum|), hard cap on the term count.
pub(crate) fn series_sum(
    m: &MetrisedAlgebra,
    x: &DVector<f64>,
    rel_tol: f64,
    cap: usize,
) -> Result<f64, PotentialError> {
    let mut power = x.clone(); // x^{k-1}
    let mut sum = 0.0;
    let mut small_streak = 0;
    let mut sign = 1.0;
    for k in 2..=cap {
        let term = sign * m.form().apply(x, &power) / k as f64;
        sum += term;
        if term.abs() <= rel_tol * (1.0 + sum.abs()) {
            small_streak += 1;
            if small_streak >= 3 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
        power = m.algebra().multiply(x, &power);
        sign = -sign;
    }
    Err(PotentialError::TermCapReached { terms: cap })
}

pub(crate) fn spectral_radius(l: &DMatrix<f64>) -> f64 {
    l.clone()
        .complex_eigenvalues()
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()))
}

fn lu_of_shifted_left_mult(
    m: &MetrisedAlgebra,
    x: &DVector<f64>,
) -> LU<f64, nalgebra::Dyn, nalgebra::Dyn> {
    let n = m.dim();
    (DMatrix::identity(n, n) + m.algebra().left_mult(x)).lu()
}

fn solve(
    lu: &LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    rhs: &DVector<f64>,
) -> Result<DVector<f64>, PotentialError> {
    lu.solve(rhs).ok_or(PotentialError::SingularOperator)
}

/// Value of the series potential at `x`.
pub fn series_potential(
    m: &MetrisedAlgebra,
    x: &DVector<f64>,
    rel_tol: f64,
) -> Result<f64, PotentialError> {
    check_dim(m.dim(), x)?;
    let rho = spectral_radius(&m.algebra().left_mult(x));
    if rho >= 1.0 {
        return Err(PotentialError::SeriesDiverged {
            spectral_radius: rho,
        });
    }
    series_sum(m, x, rel_tol, TERM_CAP)
}

/// Exact gradient: u ↦ σ((I + L_x)⁻¹ x, u); one linear solve, no truncation.
pub fn series_gradient(
    m: &MetrisedAlgebra,
    x: &DVector<f64>,
) -> Result<DVector<f64>, PotentialError> {
    check_dim(m.dim(), x)?;
    let lu = lu_of_shifted_left_mult(m, x);
    let y = solve(&lu, x)?;
    Ok(m.form().matrix() * y)
}

/// Exact Hessian, column v: σ((I+L_x)⁻¹(v − v∘y), ·) with y = (I+L_x)⁻¹x.
pub fn series_hessian(
    m: &MetrisedAlgebra,
    x: &DVector<f64>,
) -> Result<DMatrix<f64>, PotentialError> {
    check_dim(m.dim(), x)?;
    let n = m.dim();
    let lu = lu_of_shifted_left_mult(m, x);
    let y = solve(&lu, x)?;
    let sigma = m.form().matrix();
    let mut h = DMatrix::zeros(n, n);
    for k in 0..n {
        let ek = crate::algebra::basis_vector(n, k);
        let rhs = &ek - m.algebra().multiply(&ek, &y);
        let z = solve(&lu, &rhs)?;
        h.set_column(k, &(sigma * z));
    }
    Ok((&h + h.transpose()) * 0.5)
}

/// Exact fully symmetric third-derivative tensor, assembled by polarizing
/// the directional form ∇_v²∇_u F over pairs of basis directions.
pub fn series_third(m: &MetrisedAlgebra, x: &DVector<f64>) -> Result<Tensor3, PotentialError> {
    check_dim(m.dim(), x)?;
    let n = m.dim();
    let lu = lu_of_shifted_left_mult(m, x);
    let y = solve(&lu, x)?;
    let sigma = m.form().matrix();
    let alg = m.algebra();

    // ∇_v²∇_u F = σ(w(v), u) with
    // w(v) = 2 (I+L_x)⁻¹ ( v∘(I+L_x)⁻¹(v∘y) − v∘(I+L_x)⁻¹ v )
    let row = |v: &DVector<f64>| -> Result<DVector<f64>, PotentialError> {
        let a = solve(&lu, &alg.multiply(v, &y))?;
        let b = solve(&lu, v)?;
        let w = solve(&lu, &(alg.multiply(v, &a) - alg.multiply(v, &b)))? * 2.0;
        Ok(sigma * w)
    };

    let mut single = Vec::with_capacity(n);
    for a in 0..n {
        single.push(row(&crate::algebra::basis_vector(n, a))?);
    }
    let mut t = Tensor3::zeros(n);
    for a in 0..n {
        for c in 0..n {
            t[(a, a, c)] = single[a][c];
        }
        for b in (a + 1)..n {
            let mut v = DVector::zeros(n);
            v[a] = 1.0;
            v[b] = 1.0;
            let pair = row(&v)?;
            for c in 0..n {
                let val = 0.5 * (pair[c] - single[a][c] - single[b][c]);
                t[(a, b, c)] = val;
                t[(b, a, c)] = val;
            }
        }
    }
    Ok(t.symmetrized())
}

/// Fourth derivative by central differences of the exact third tensor
/// (Richardson-extrapolated once).
pub fn series_fourth_fd(m: &MetrisedAlgebra, x: &DVector<f64>) -> Result<Tensor4, PotentialError> {
    check_dim(m.dim(), x)?;
    let n = m.dim();
    let h0 = 1e-3 * (1.0 + x.norm());
    let mut t = Tensor4::zeros(n);
    for d in 0..n {
        let diff_at = |h: f64| -> Result<Tensor3, PotentialError> {
            let mut xp = x.clone();
            xp[d] += h;
            let mut xm = x.clone();
            xm[d] -= h;
            Ok((&series_third(m, &xp)? - &series_third(m, &xm)?).scale(0.5 / h))
        };
        let coarse = diff_at(h0)?;
        let fine = diff_at(0.5 * h0)?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    t[(a, b, c, d)] = (4.0 * fine[(a, b, c)] - coarse[(a, b, c)]) / 3.0;
                }
            }
        }
    }
    Ok(t.symmetrized())
}

/// Series potential of a metrised Jordan algebra with exact derivative
/// evaluators for orders 1–3.
#[derive(Debug, Clone)]
pub struct SeriesPotential {
    metrised: MetrisedAlgebra,
    rel_tol: f64,
}

impl SeriesPotential {
    pub fn new(metrised: MetrisedAlgebra) -> Result<Self, PotentialError> {
        let algebra = metrised.algebra();
        let residual = if algebra.dim() <= 8 {
            algebra.jordan_residual_exhaustive()
        } else {
            algebra.jordan_residual(128, 0)
        };
        if residual > JORDAN_CHECK_TOL {
            return Err(PotentialError::NotJordan { residual });
        }
        Ok(Self {
            metrised,
            rel_tol: 1e-12,
        })
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn metrised(&self) -> &MetrisedAlgebra {
        &self.metrised
    }

    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>, PotentialError> {
        series_gradient(&self.metrised, x)
    }

    pub fn hessian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>, PotentialError> {
        series_hessian(&self.metrised, x)
    }

    pub fn third(&self, x: &DVector<f64>) -> Result<Tensor3, PotentialError> {
        series_third(&self.metrised, x)
    }
}

impl Potential for SeriesPotential {
    fn dim(&self) -> usize {
        self.metrised.dim()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Series
    }

    fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim() && spectral_radius(&self.metrised.algebra().left_mult(x)) < 1.0
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64, PotentialError> {
        series_potential(&self.metrised, x, self.rel_tol)
    }

    fn derivative(
        &self,
        x: &DVector<f64>,
        order: usize,
    ) -> Option<Result<DerivTensor, PotentialError>> {
        match order {
            1 => Some(series_gradient(&self.metrised, x).map(DerivTensor::Order1)),
            2 => Some(series_hessian(&self.metrised, x).map(DerivTensor::Order2)),
            3 => Some(series_third(&self.metrised, x).map(DerivTensor::Order3)),
            4 => Some(series_fourth_fd(&self.metrised, x).map(DerivTensor::Order4)),
            _ => None,
        }
    }

    fn source(&self, order: usize) -> Option<DerivSource> {
        match order {
            1..=3 => Some(DerivSource::Exact),
            4 => Some(DerivSource::FiniteDifference),
            _ => None,
        }
    }
}

/// Value-only truncated series over an arbitrary commutative metrised pair;
/// no Jordan validation and no derivative evaluators. Used to probe fields
/// whose underlying algebra may fail the Jordan identity.
#[derive(Debug, Clone)]
pub struct FormalSeriesPotential {
    metrised: MetrisedAlgebra,
    rel_tol: f64,
    cap: usize,
}

impl FormalSeriesPotential {
    pub fn new(metrised: MetrisedAlgebra) -> Self {
        Self {
            metrised,
            rel_tol: 1e-15,
            cap: 400,
        }
    }
}

impl Potential for FormalSeriesPotential {
    fn dim(&self) -> usize {
        self.metrised.dim()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Series
    }

    fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim() && spectral_radius(&self.metrised.algebra().left_mult(x)) < 1.0
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64, PotentialError> {
        check_dim(self.dim(), x)?;
        let rho = spectral_radius(&self.metrised.algebra().left_mult(x));
        if rho >= 1.0 {
            return Err(PotentialError::SeriesDiverged {
                spectral_radius: rho,
            });
        }
        series_sum(&self.metrised, x, self.rel_tol, self.cap)
    }

    fn derivative(
        &self,
        _x: &DVector<f64>,
        _order: usize,
    ) -> Option<Result<DerivTensor, PotentialError>> {
        None
    }

    fn source(&self, _order: usize) -> Option<DerivSource> {
        None
    }
}
