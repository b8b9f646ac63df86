//! Spectral decomposition, determinant, log-determinant, and inverse for the
//! Euclidean families.
//!
//! Every element of a tagged algebra splits as x = Σ λⱼ eʲ over a complete
//! orthogonal system of idempotents. Multiplicities dⱼ = tr L_{eʲ} are taken
//! literally from the structure constants, so they are fractional on sym(n)
//! ((n+1)/2 per primitive idempotent) and the determinant Π λⱼ^{dⱼ} is the
//! matrix determinant raised to (n+1)/2 there.

use super::{basis_vector, sym_basis, AlgebraError, Family, JordanAlgebra};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative eigenvalue-grouping tolerance; grouping keeps the idempotents
/// exact projectors and makes Σ dⱼ = dim.
const GROUP_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Distinct eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Idempotents eʲ with eʲ∘eʲ = eʲ, eⁱ∘eʲ = 0, Σ eʲ = unit.
    pub idempotents: Vec<DVector<f64>>,
    /// dⱼ = tr L_{eʲ}.
    pub multiplicities: Vec<f64>,
}

impl SpectralDecomposition {
    /// Σ λⱼ eʲ.
    pub fn reconstruct(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.idempotents[0].len());
        for (l, e) in self.eigenvalues.iter().zip(&self.idempotents) {
            x += e * *l;
        }
        x
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Spectral decomposition of `x`; requires a Euclidean family tag.
pub fn spectral(
    algebra: &JordanAlgebra,
    x: &DVector<f64>,
) -> Result<SpectralDecomposition, AlgebraError> {
    if x.len() != algebra.dim() {
        return Err(AlgebraError::DimensionMismatch {
            expected: algebra.dim(),
            got: x.len(),
        });
    }
    let family = algebra.family().ok_or(AlgebraError::UnsupportedFamily)?;
    let raw = match family {
        Family::Componentwise { n } => componentwise_spectral(*n, x),
        Family::Spin { n } => spin_spectral(*n, x),
        Family::Sym { n } => sym_spectral(*n, x),
        Family::DirectSum { factors, offsets } => {
            let dim = algebra.dim();
            let mut members = Vec::new();
            for (f, &off) in factors.iter().zip(offsets) {
                let sub = DVector::from_column_slice(x.rows(off, f.dim()).as_slice());
                let part = spectral(f, &sub)?;
                for (l, e) in part.eigenvalues.iter().zip(&part.idempotents) {
                    let mut emb = DVector::zeros(dim);
                    emb.rows_mut(off, f.dim()).copy_from(e);
                    members.push((*l, emb));
                }
            }
            members
        }
    };
    let grouped = group_members(raw);
    let multiplicities = grouped
        .iter()
        .map(|(_, e)| algebra.trace_of_left_mult(e))
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues: grouped.iter().map(|(l, _)| *l).collect(),
        idempotents: grouped.into_iter().map(|(_, e)| e).collect(),
        multiplicities,
    })
}

/// Merge (eigenvalue, idempotent) members whose eigenvalues fall within the
/// relative grouping tolerance; members must already be mutually orthogonal.
fn group_members(mut members: Vec<(f64, DVector<f64>)>) -> Vec<(f64, DVector<f64>)> {
    members.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = members.iter().fold(0.0f64, |m, (l, _)| m.max(l.abs()));
    let tol = GROUP_REL_TOL * scale;
    let mut out: Vec<(f64, DVector<f64>, usize)> = Vec::new();
    for (l, e) in members {
        match out.last_mut() {
            Some((l0, e0, count)) if (l - *l0).abs() <= tol => {
                // running mean keeps the representative inside the group
                *l0 += (l - *l0) / (*count as f64 + 1.0);
                *e0 += e;
                *count += 1;
            }
            _ => out.push((l, e, 1)),
        }
    }
    out.into_iter().map(|(l, e, _)| (l, e)).collect()
}

fn componentwise_spectral(n: usize, x: &DVector<f64>) -> Vec<(f64, DVector<f64>)> {
    (0..n).map(|i| (x[i], basis_vector(n, i))).collect()
}

fn spin_spectral(n: usize, x: &DVector<f64>) -> Vec<(f64, DVector<f64>)> {
    let x0 = x[0];
    let bar = x.rows(1, n - 1);
    let r = bar.norm();
    let scale = x0.abs().max(r);
    if 2.0 * r <= GROUP_REL_TOL * scale || r == 0.0 {
        // degenerate x̄ = 0: single eigenvalue, idempotent = unit
        let mut e = DVector::zeros(n);
        e[0] = 1.0;
        return vec![(x0, e)];
    }
    let mut plus = DVector::zeros(n);
    let mut minus = DVector::zeros(n);
    plus[0] = 0.5;
    minus[0] = 0.5;
    for i in 1..n {
        plus[i] = 0.5 * x[i] / r;
        minus[i] = -0.5 * x[i] / r;
    }
    vec![(x0 - r, minus), (x0 + r, plus)]
}

fn sym_spectral(n: usize, x: &DVector<f64>) -> Vec<(f64, DVector<f64>)> {
    let mat = coords_to_sym_matrix(x).expect("coords length fixed by family");
    let eig = SymmetricEigen::new(mat);
    let mut pairs: Vec<(f64, DVector<f64>)> = (0..n)
        .map(|i| {
            let q = eig.eigenvectors.column(i).into_owned();
            let proj = &q * q.transpose();
            (
                eig.eigenvalues[i],
                sym_matrix_to_coords(&proj).expect("projector is symmetric"),
            )
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// det x = Π λⱼ^{dⱼ}. Negative eigenvalues are allowed only with integral
/// multiplicities.
pub fn determinant(algebra: &JordanAlgebra, x: &DVector<f64>) -> Result<f64, AlgebraError> {
    let dec = spectral(algebra, x)?;
    let scale = dec.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let mut log_abs = 0.0f64;
    let mut sign = 1.0f64;
    for (l, d) in dec.eigenvalues.iter().zip(&dec.multiplicities) {
        if l.abs() <= 1e-14 * scale || *l == 0.0 {
            return Ok(0.0);
        }
        if *l < 0.0 {
            let rounded = d.round();
            if (d - rounded).abs() > 1e-9 {
                return Err(AlgebraError::FractionalPowerOfNegative {
                    value: *l,
                    multiplicity: *d,
                });
            }
            if (rounded as i64) % 2 != 0 {
                sign = -sign;
            }
        }
        log_abs += d * l.abs().ln();
    }
    Ok(sign * log_abs.exp())
}

/// log det x = Σ dⱼ log λⱼ; all eigenvalues must be positive.
pub fn logdet(algebra: &JordanAlgebra, x: &DVector<f64>) -> Result<f64, AlgebraError> {
    let dec = spectral(algebra, x)?;
    let mut s = 0.0;
    for (l, d) in dec.eigenvalues.iter().zip(&dec.multiplicities) {
        if *l <= 0.0 {
            return Err(AlgebraError::NonpositiveEigenvalue { value: *l });
        }
        s += d * l.ln();
    }
    Ok(s)
}

/// x⁻¹ = Σ λⱼ⁻¹ eʲ; requires all eigenvalues nonzero.
pub fn inverse(algebra: &JordanAlgebra, x: &DVector<f64>) -> Result<DVector<f64>, AlgebraError> {
    let dec = spectral(algebra, x)?;
    let scale = dec.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let mut out = DVector::zeros(x.len());
    for (l, e) in dec.eigenvalues.iter().zip(&dec.idempotents) {
        if l.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(AlgebraError::ZeroEigenvalue);
        }
        out += e / *l;
    }
    Ok(out)
}

/// Coordinates of a symmetric matrix in the sym(n) basis.
pub fn sym_matrix_to_coords(mat: &DMatrix<f64>) -> Result<DVector<f64>, AlgebraError> {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols(), "matrix must be square");
    let scale = 1.0 + mat.amax();
    let mut gap = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            gap = gap.max((mat[(i, j)] - mat[(j, i)]).abs());
        }
    }
    if gap > 1e-12 * scale {
        return Err(AlgebraError::NonSymmetricMatrix { gap });
    }
    let mut coords = DVector::zeros(n * (n + 1) / 2);
    for i in 0..n {
        coords[i] = mat[(i, i)];
    }
    let mut k = n;
    let sqrt2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            coords[k] = sqrt2 * 0.5 * (mat[(i, j)] + mat[(j, i)]);
            k += 1;
        }
    }
    Ok(coords)
}

/// Symmetric matrix from sym(n) coordinates.
pub fn coords_to_sym_matrix(coords: &DVector<f64>) -> Result<DMatrix<f64>, AlgebraError> {
    let len = coords.len();
    let n = ((-1.0 + (1.0 + 8.0 * len as f64).sqrt()) / 2.0).round() as usize;
    if n * (n + 1) / 2 != len {
        return Err(AlgebraError::DimensionMismatch {
            expected: n * (n + 1) / 2,
            got: len,
        });
    }
    let basis = sym_basis(n);
    let mut mat = DMatrix::zeros(n, n);
    for (c, b) in coords.iter().zip(&basis) {
        mat += b * *c;
    }
    Ok(mat)
}
