//! Canonical barriers on symmetric cones and the closed-form log-det
//! potential of a single Euclidean factor.
//!
//! F(x) = −Σⱼ αⱼ log det δⱼ + offset with δ = x − c split over the factors.
//! All derivatives block-diagonalize over the factors and reduce to repeated
//! solves against L_δ in each factor algebra:
//!
//!   ∇(−log det δ)        = −τ(δ⁻¹, ·)
//!   ∇_v∇(−log det δ)     = τ(L_δ⁻¹(v ∘ δ⁻¹), ·)
//!   ∇_v²∇(−log det δ)    = −2 τ(L_δ⁻¹(v ∘ L_δ⁻¹(v ∘ δ⁻¹)), ·)
//!   ∇_v³∇(−log det δ)    = 6 τ(L_δ⁻¹(v ∘ L_δ⁻¹(v ∘ L_δ⁻¹(v ∘ δ⁻¹))), ·)

use super::{check_dim, DerivSource, Potential, PotentialError, Provenance};
use crate::algebra::{logdet, spectral, MetrisedAlgebra};
use crate::numdiff::DerivTensor;
use crate::tensor::{Tensor3, Tensor4};
use nalgebra::{DMatrix, DVector, LU};

/// Domain margin: factor eigenvalues of δ must exceed 1e-12·‖δ‖.
const DOMAIN_MARGIN: f64 = 1e-12;

/// Weighted product of Euclidean factors, a center, and an additive offset.
#[derive(Debug, Clone)]
pub struct BarrierSpec {
    factors: Vec<(MetrisedAlgebra, f64)>,
    center: DVector<f64>,
    offset: f64,
}

impl BarrierSpec {
    pub fn new(
        factors: Vec<(MetrisedAlgebra, f64)>,
        center: DVector<f64>,
        offset: f64,
    ) -> Result<Self, PotentialError> {
        if factors.is_empty() {
            return Err(PotentialError::Algebra(
                crate::algebra::AlgebraError::EmptyDirectSum,
            ));
        }
        let mut dim = 0;
        for (m, w) in &factors {
            if *w <= 0.0 {
                return Err(PotentialError::Algebra(
                    crate::algebra::AlgebraError::NonpositiveWeight { weight: *w },
                ));
            }
            if m.algebra().family().is_none() {
                return Err(PotentialError::Algebra(
                    crate::algebra::AlgebraError::UnsupportedFamily,
                ));
            }
            dim += m.dim();
        }
        if center.len() != dim {
            return Err(PotentialError::DimensionMismatch {
                expected: dim,
                got: center.len(),
            });
        }
        Ok(Self {
            factors,
            center,
            offset,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn factors(&self) -> &[(MetrisedAlgebra, f64)] {
        &self.factors
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// ν = −Σⱼ αⱼ·dim Aⱼ; the log-slope of the barrier under central scaling.
    pub fn homogeneity_parameter(&self) -> f64 {
        -self
            .factors
            .iter()
            .map(|(m, w)| w * m.dim() as f64)
            .sum::<f64>()
    }
}

/// ν = −Σⱼ αⱼ·dim Aⱼ for the given barrier specification.
pub fn homogeneity_parameter(spec: &BarrierSpec) -> f64 {
    spec.homogeneity_parameter()
}

/// Canonical barrier field F(x) = −Σⱼ αⱼ log det (x−c)ⱼ + offset with exact
/// derivative evaluators for orders 1–4.
#[derive(Debug, Clone)]
pub struct BarrierPotential {
    spec: BarrierSpec,
    offsets: Vec<usize>,
    units: Vec<DVector<f64>>,
    trace_forms: Vec<DMatrix<f64>>,
    provenance: Provenance,
}

/// Builds the barrier field of a spec.
pub fn canonical_barrier(spec: BarrierSpec) -> BarrierPotential {
    BarrierPotential::with_provenance(spec, Provenance::CanonicalBarrier)
}

/// F(x) = −log det(e + x) on a single metrised factor: the barrier shifted
/// so that the cone vertex sits at −e.
pub fn logdet_field(m: MetrisedAlgebra) -> Result<BarrierPotential, PotentialError> {
    let e = m
        .algebra()
        .find_unit()
        .ok_or(crate::algebra::AlgebraError::NoUnit)?;
    let spec = BarrierSpec::new(vec![(m, 1.0)], -e, 0.0)?;
    Ok(BarrierPotential::with_provenance(
        spec,
        Provenance::LogDetClosed,
    ))
}

impl BarrierPotential {
    fn with_provenance(spec: BarrierSpec, provenance: Provenance) -> Self {
        let mut offsets = Vec::with_capacity(spec.factors.len());
        let mut units = Vec::with_capacity(spec.factors.len());
        let mut trace_forms = Vec::with_capacity(spec.factors.len());
        let mut off = 0;
        for (m, _) in &spec.factors {
            offsets.push(off);
            units.push(
                m.algebra()
                    .find_unit()
                    .expect("Euclidean family factors are unital"),
            );
            trace_forms.push(m.algebra().trace_form().matrix().clone());
            off += m.dim();
        }
        Self {
            spec,
            offsets,
            units,
            trace_forms,
            provenance,
        }
    }

    pub fn spec(&self) -> &BarrierSpec {
        &self.spec
    }

    fn delta(&self, x: &DVector<f64>) -> DVector<f64> {
        x - &self.spec.center
    }

    fn factor_slice(&self, v: &DVector<f64>, j: usize) -> DVector<f64> {
        let d = self.spec.factors[j].0.dim();
        DVector::from_column_slice(v.rows(self.offsets[j], d).as_slice())
    }

    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>, PotentialError> {
        match self.derivative(x, 1) {
            Some(Ok(DerivTensor::Order1(g))) => Ok(g),
            Some(Err(e)) => Err(e),
            _ => unreachable!("order 1 is always provided"),
        }
    }

    pub fn hessian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>, PotentialError> {
        match self.derivative(x, 2) {
            Some(Ok(DerivTensor::Order2(h))) => Ok(h),
            Some(Err(e)) => Err(e),
            _ => unreachable!("order 2 is always provided"),
        }
    }
}

struct FactorSolver<'a> {
    m: &'a MetrisedAlgebra,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    delta_inv: DVector<f64>,
    tau: &'a DMatrix<f64>,
    weight: f64,
}

impl<'a> FactorSolver<'a> {
    fn new(
        m: &'a MetrisedAlgebra,
        tau: &'a DMatrix<f64>,
        unit: &DVector<f64>,
        delta_j: &DVector<f64>,
        weight: f64,
    ) -> Result<Self, PotentialError> {
        let lu = m.algebra().left_mult(delta_j).lu();
        let delta_inv = lu.solve(unit).ok_or(PotentialError::SingularOperator)?;
        Ok(Self {
            m,
            lu,
            delta_inv,
            tau,
            weight,
        })
    }

    fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>, PotentialError> {
        self.lu.solve(rhs).ok_or(PotentialError::SingularOperator)
    }

    fn grad(&self) -> DVector<f64> {
        -(self.tau * &self.delta_inv) * self.weight
    }

    fn hess_column(&self, v: &DVector<f64>) -> Result<DVector<f64>, PotentialError> {
        let z = self.solve(&self.m.algebra().multiply(v, &self.delta_inv))?;
        Ok((self.tau * z) * self.weight)
    }

    /// Covector of ∇_v²∇_u(−α log det δ).
    fn third_row(&self, v: &DVector<f64>) -> Result<DVector<f64>, PotentialError> {
        let alg = self.m.algebra();
        let inner = self.solve(&alg.multiply(v, &self.delta_inv))?;
        let w = self.solve(&alg.multiply(v, &inner))?;
        Ok((self.tau * w) * (-2.0 * self.weight))
    }

    /// Covector of ∇_v³∇_u(−α log det δ).
    fn fourth_row(&self, v: &DVector<f64>) -> Result<DVector<f64>, PotentialError> {
        let alg = self.m.algebra();
        let a = self.solve(&alg.multiply(v, &self.delta_inv))?;
        let b = self.solve(&alg.multiply(v, &a))?;
        let w = self.solve(&alg.multiply(v, &b))?;
        Ok((self.tau * w) * (6.0 * self.weight))
    }
}

impl Potential for BarrierPotential {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Interior test: every factor eigenvalue of δ = x − c exceeds the margin.
    fn contains(&self, x: &DVector<f64>) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let delta = self.delta(x);
        let margin = DOMAIN_MARGIN * delta.norm();
        for (j, (m, _)) in self.spec.factors.iter().enumerate() {
            let dj = self.factor_slice(&delta, j);
            match spectral(m.algebra(), &dj) {
                Ok(dec) => {
                    if dec.min_eigenvalue() <= margin {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
        true
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64, PotentialError> {
        check_dim(self.dim(), x)?;
        if !self.contains(x) {
            return Err(PotentialError::OutsideDomain);
        }
        let delta = self.delta(x);
        let mut total = self.spec.offset;
        for (j, (m, w)) in self.spec.factors.iter().enumerate() {
            let dj = self.factor_slice(&delta, j);
            total -= w * logdet(m.algebra(), &dj)?;
        }
        Ok(total)
    }

    fn derivative(
        &self,
        x: &DVector<f64>,
        order: usize,
    ) -> Option<Result<DerivTensor, PotentialError>> {
        if !(1..=4).contains(&order) {
            return None;
        }
        Some(self.derivative_impl(x, order))
    }

    fn source(&self, order: usize) -> Option<DerivSource> {
        (1..=4).contains(&order).then_some(DerivSource::Exact)
    }
}

impl BarrierPotential {
    fn derivative_impl(
        &self,
        x: &DVector<f64>,
        order: usize,
    ) -> Result<DerivTensor, PotentialError> {
        check_dim(self.dim(), x)?;
        if !self.contains(x) {
            return Err(PotentialError::OutsideDomain);
        }
        let n = self.dim();
        let delta = self.delta(x);
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        let mut third = Tensor3::zeros(n);
        let mut fourth = Tensor4::zeros(n);
        for (j, (m, w)) in self.spec.factors.iter().enumerate() {
            let d = m.dim();
            let off = self.offsets[j];
            let dj = self.factor_slice(&delta, j);
            let solver = FactorSolver::new(m, &self.trace_forms[j], &self.units[j], &dj, *w)?;
            match order {
                1 => {
                    grad.rows_mut(off, d).copy_from(&solver.grad());
                }
                2 => {
                    for k in 0..d {
                        let col = solver.hess_column(&crate::algebra::basis_vector(d, k))?;
                        hess.view_mut((off, off + k), (d, 1)).copy_from(&col);
                    }
                }
                3 => {
                    block_third(&solver, d, off, &mut third)?;
                }
                4 => {
                    block_fourth(&solver, d, off, &mut fourth)?;
                }
                _ => unreachable!(),
            }
        }
        Ok(match order {
            1 => DerivTensor::Order1(grad),
            2 => DerivTensor::Order2((&hess + hess.transpose()) * 0.5),
            3 => DerivTensor::Order3(third.symmetrized()),
            4 => DerivTensor::Order4(fourth.symmetrized()),
            _ => unreachable!(),
        })
    }
}

/// Polarize the quadratic-in-v directional third derivative over basis pairs.
fn block_third(
    solver: &FactorSolver<'_>,
    d: usize,
    off: usize,
    out: &mut Tensor3,
) -> Result<(), PotentialError> {
    let mut single = Vec::with_capacity(d);
    for a in 0..d {
        single.push(solver.third_row(&crate::algebra::basis_vector(d, a))?);
    }
    for a in 0..d {
        for c in 0..d {
            out[(off + a, off + a, off + c)] = single[a][c];
        }
        for b in (a + 1)..d {
            let mut v = DVector::zeros(d);
            v[a] = 1.0;
            v[b] = 1.0;
            let pair = solver.third_row(&v)?;
            for c in 0..d {
                let val = 0.5 * (pair[c] - single[a][c] - single[b][c]);
                out[(off + a, off + b, off + c)] = val;
                out[(off + b, off + a, off + c)] = val;
            }
        }
    }
    Ok(())
}

/// Polarize the cubic-in-v directional fourth derivative over basis triples:
/// 6·B(a,b,c) = T(a+b+c) − T(a+b) − T(a+c) − T(b+c) + T(a) + T(b) + T(c).
fn block_fourth(
    solver: &FactorSolver<'_>,
    d: usize,
    off: usize,
    out: &mut Tensor4,
) -> Result<(), PotentialError> {
    let mut row_cache: std::collections::HashMap<Vec<usize>, DVector<f64>> =
        std::collections::HashMap::new();
    // key = sorted list of basis indices being summed (with repetition)
    let mut row_of =
        |ixs: &mut Vec<usize>, solver: &FactorSolver<'_>| -> Result<DVector<f64>, PotentialError> {
            ixs.sort_unstable();
            if let Some(r) = row_cache.get(ixs.as_slice()) {
                return Ok(r.clone());
            }
            let mut v = DVector::zeros(d);
            for &i in ixs.iter() {
                v[i] += 1.0;
            }
            let r = solver.fourth_row(&v)?;
            row_cache.insert(ixs.clone(), r.clone());
            Ok(r)
        };
    for a in 0..d {
        for b in a..d {
            for c in b..d {
                let full = row_of(&mut vec![a, b, c], solver)?;
                let ab = row_of(&mut vec![a, b], solver)?;
                let ac = row_of(&mut vec![a, c], solver)?;
                let bc = row_of(&mut vec![b, c], solver)?;
                let ra = row_of(&mut vec![a], solver)?;
                let rb = row_of(&mut vec![b], solver)?;
                let rc = row_of(&mut vec![c], solver)?;
                for u in 0..d {
                    let val = (full[u] - ab[u] - ac[u] - bc[u] + ra[u] + rb[u] + rc[u]) / 6.0;
                    // mirror over the six orderings of (a, b, c)
                    for perm in [
                        [a, b, c],
                        [a, c, b],
                        [b, a, c],
                        [b, c, a],
                        [c, a, b],
                        [c, b, a],
                    ] {
                        out[(off + perm[0], off + perm[1], off + perm[2], off + u)] = val;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Value −Σ dⱼ log(1 + λⱼ(x)) of the closed-form log-det potential.
pub fn logdet_potential(m: &MetrisedAlgebra, x: &DVector<f64>) -> Result<f64, PotentialError> {
    check_dim(m.dim(), x)?;
    let dec = spectral(m.algebra(), x)?;
    let mut total = 0.0;
    for (l, d) in dec.eigenvalues.iter().zip(&dec.multiplicities) {
        let shifted = 1.0 + l;
        if shifted <= 0.0 {
            return Err(PotentialError::Algebra(
                crate::algebra::AlgebraError::NonpositiveEigenvalue { value: shifted },
            ));
        }
        total -= d * shifted.ln();
    }
    Ok(total)
}

/// Gradient covector u ↦ −tr L_{(e+x)⁻¹ ∘ u} = −τ((e+x)⁻¹, u).
pub fn logdet_gradient(
    m: &MetrisedAlgebra,
    x: &DVector<f64>,
) -> Result<DVector<f64>, PotentialError> {
    check_dim(m.dim(), x)?;
    let alg = m.algebra();
    let e = alg
        .find_unit()
        .ok_or(crate::algebra::AlgebraError::NoUnit)?;
    let inv = crate::algebra::inverse(alg, &(&e + x))?;
    Ok(-(alg.trace_form().matrix() * inv))
}

/// Hessian (u,v) ↦ τ(L_δ⁻¹(v ∘ δ⁻¹), u) with δ = e + x.
pub fn logdet_hessian(
    m: &MetrisedAlgebra,
    x: &DVector<f64>,
) -> Result<DMatrix<f64>, PotentialError> {
    check_dim(m.dim(), x)?;
    let n = m.dim();
    let alg = m.algebra();
    let e = alg
        .find_unit()
        .ok_or(crate::algebra::AlgebraError::NoUnit)?;
    let delta = &e + x;
    let lu = alg.left_mult(&delta).lu();
    let delta_inv = lu.solve(&e).ok_or(PotentialError::SingularOperator)?;
    let tau = alg.trace_form().matrix().clone();
    let mut h = DMatrix::zeros(n, n);
    for k in 0..n {
        let rhs = alg.multiply(&crate::algebra::basis_vector(n, k), &delta_inv);
        let z = lu.solve(&rhs).ok_or(PotentialError::SingularOperator)?;
        h.set_column(k, &(&tau * z));
    }
    Ok((&h + h.transpose()) * 0.5)
}
