//! Parallel transport along polylines and the induced algebra isomorphism
//! check.

use super::{difference_tensor_matrix, GeometryError, VerificationConfig};
use crate::algebra::MetrisedAlgebra;
use crate::potential::Potential;
use crate::sampling::{seeded_rng, unit_sphere_sample};
use nalgebra::{DMatrix, DVector};

/// Integrates the transport equation u̇^γ = −Γ^γ_{αβ} ẋ^α u^β = K(ẋ, u)
/// along the polyline with the classical fourth-order one-step method,
/// `steps` substeps per segment. Returns the transport matrix J mapping the
/// tangent space at the first point to the one at the last.
pub fn parallel_transport(
    p: &dyn Potential,
    path: &[DVector<f64>],
    steps: usize,
    cfg: &VerificationConfig,
) -> Result<DMatrix<f64>, GeometryError> {
    assert!(steps >= 1, "at least one substep per segment");
    let n = p.dim();
    let mut j = DMatrix::identity(n, n);
    if path.len() < 2 {
        return Ok(j);
    }
    for (seg, pair) in path.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let xdot = b - a;
        if xdot.norm() == 0.0 {
            continue;
        }
        let h = 1.0 / steps as f64;
        let generator = |t: f64| -> Result<DMatrix<f64>, GeometryError> {
            let x = a + &xdot * t;
            if !p.contains(&x) {
                return Err(GeometryError::PathOutsideDomain { segment: seg });
            }
            difference_tensor_matrix(p, &x, &xdot, cfg)
        };
        let mut g_start = generator(0.0)?;
        for i in 0..steps {
            let t0 = i as f64 * h;
            let g_mid = generator(t0 + 0.5 * h)?;
            let g_end = generator(t0 + h)?;
            let k1 = &g_start * &j;
            let k2 = &g_mid * &(&j + &k1 * (0.5 * h));
            let k3 = &g_mid * &(&j + &k2 * (0.5 * h));
            let k4 = &g_end * &(&j + &k3 * h);
            j += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            g_start = g_end;
        }
    }
    Ok(j)
}

/// ‖Jᵀ g_end J − g_start‖ in the max norm; zero for exact transport by
/// metricity of the Levi-Civita connection.
pub fn metric_preservation_residual(
    j: &DMatrix<f64>,
    g_start: &DMatrix<f64>,
    g_end: &DMatrix<f64>,
) -> f64 {
    (j.transpose() * g_end * j - g_start).amax()
}

/// Max over unit-norm sampled pairs of
/// ‖J(u∘₁v) − (Ju)∘₂(Jv)‖ + |σ₂(Ju, Jv) − σ₁(u, v)|.
pub fn isomorphism_residual(
    j: &DMatrix<f64>,
    m1: &MetrisedAlgebra,
    m2: &MetrisedAlgebra,
    samples: usize,
    seed: u64,
) -> f64 {
    assert_eq!(m1.dim(), m2.dim(), "algebra dimensions must match");
    assert_eq!(j.nrows(), m1.dim(), "transport matrix dimension mismatch");
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let u = unit_sphere_sample(&mut rng, m1.dim());
        let v = unit_sphere_sample(&mut rng, m1.dim());
        let ju = j * &u;
        let jv = j * &v;
        let product_gap =
            (j * m1.algebra().multiply(&u, &v) - m2.algebra().multiply(&ju, &jv)).norm();
        let form_gap = (m2.form().apply(&ju, &jv) - m1.form().apply(&u, &v)).abs();
        worst = worst.max(product_gap + form_gap);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::JordanAlgebra;
    use crate::geometry::{reconstruct_algebra, sample_tensors};
    use crate::potential::{canonical_barrier, BarrierSpec};
    use approx::assert_relative_eq;

    fn log_barrier_1d() -> crate::potential::BarrierPotential {
        let m = MetrisedAlgebra::with_trace_form(JordanAlgebra::componentwise(1)).unwrap();
        canonical_barrier(BarrierSpec::new(vec![(m, 1.0)], DVector::zeros(1), 0.0).unwrap())
    }

    #[test]
    fn zero_length_path_is_identity() {
        let f = log_barrier_1d();
        let cfg = VerificationConfig::default();
        let p = DVector::from_vec(vec![1.0]);
        let j = parallel_transport(&f, std::slice::from_ref(&p), 10, &cfg).unwrap();
        assert_eq!(j, DMatrix::identity(1, 1));
        let j = parallel_transport(&f, &[p.clone(), p], 10, &cfg).unwrap();
        assert_eq!(j, DMatrix::identity(1, 1));
    }

    #[test]
    fn scalar_log_transport_closed_form() {
        // u̇ = (1/x) ẋ u along 1 → 2 gives J = 2; the transported metric
        // closes: g(2)·J² = (1/4)·4 = 1 = g(1).
        let f = log_barrier_1d();
        let cfg = VerificationConfig::default();
        let path = [DVector::from_vec(vec![1.0]), DVector::from_vec(vec![2.0])];
        let j = parallel_transport(&f, &path, 200, &cfg).unwrap();
        assert_relative_eq!(j[(0, 0)], 2.0, epsilon = 1e-9);
        let g0 = sample_tensors(&f, &path[0], &cfg).unwrap().g;
        let g1 = sample_tensors(&f, &path[1], &cfg).unwrap().g;
        assert!(metric_preservation_residual(&j, &g0, &g1) < 1e-9);
    }

    #[test]
    fn transport_exits_domain() {
        let f = log_barrier_1d();
        let cfg = VerificationConfig::default();
        let path = [DVector::from_vec(vec![1.0]), DVector::from_vec(vec![-1.0])];
        assert!(matches!(
            parallel_transport(&f, &path, 50, &cfg),
            Err(GeometryError::PathOutsideDomain { .. })
        ));
    }

    #[test]
    fn isomorphism_residual_basics() {
        let m = MetrisedAlgebra::with_trace_form(JordanAlgebra::spin(3)).unwrap();
        let id = DMatrix::identity(3, 3);
        assert!(isomorphism_residual(&id, &m, &m, 30, 1) < 1e-14);

        // J = 2·I on componentwise(1): J(uv) = 2uv but (2u)(2v) = 4uv
        let c1 = MetrisedAlgebra::with_trace_form(JordanAlgebra::componentwise(1)).unwrap();
        let two = DMatrix::from_vec(1, 1, vec![2.0]);
        assert!(isomorphism_residual(&two, &c1, &c1, 10, 1) > 0.5);
    }

    #[test]
    fn transported_algebras_are_isomorphic() {
        let f = log_barrier_1d();
        let cfg = VerificationConfig::default();
        let path = [DVector::from_vec(vec![1.0]), DVector::from_vec(vec![2.0])];
        let j = parallel_transport(&f, &path, 200, &cfg).unwrap();
        let m1 = reconstruct_algebra(&f, &path[0], &cfg).unwrap();
        let m2 = reconstruct_algebra(&f, &path[1], &cfg).unwrap();
        let res = isomorphism_residual(&j, &m1, &m2, 40, 7);
        assert!(res < 1e-7, "isomorphism residual {res}");
    }
}
