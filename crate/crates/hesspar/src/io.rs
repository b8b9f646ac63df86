//! JSON documents for algebras, barriers, and potentials.
//!
//! Algebra spec document, one of:
//!
//! ```json
//! {"family": {"kind": "sym", "n": 2}}
//! {"family": {"kind": "spin", "n": 4}, "form": [[...], ...]}
//! {"structure": [[[...]]], "form": [[...]]}
//! {"factors": [<algebra spec>, ...], "weights": [1.0, 2.0]}
//! ```
//!
//! When `form` is omitted it defaults to the trace form. Barrier spec:
//!
//! ```json
//! {"factors": [{"algebra": <algebra spec>, "weight": 1.0}],
//!  "center": [0.0, ...], "offset": 0.0}
//! ```
//!
//! Potential spec: a barrier spec, `{"kind": "series", "algebra": <spec>}`,
//! or `{"kind": "quadratic", "matrix": [[...]]}`. A bare algebra spec is also
//! accepted and denotes the series potential of that algebra.

use crate::algebra::{AlgebraError, BilinearForm, JordanAlgebra, MetrisedAlgebra};
use crate::potential::{
    canonical_barrier, BarrierPotential, BarrierSpec, Potential, PotentialError,
    QuadraticPotential, SeriesPotential,
};
use crate::tensor::Tensor3;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: String,
    pub n: usize,
}

/// Algebra spec document; see the module docs for the accepted shapes.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AlgebraSpecDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<AlgebraSpecDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl AlgebraSpecDoc {
    pub fn family(kind: &str, n: usize) -> Self {
        Self {
            family: Some(FamilySpec {
                kind: kind.to_string(),
                n,
            }),
            ..Default::default()
        }
    }

    /// Serializes a metrised algebra as raw structure constants plus form.
    pub fn from_metrised(m: &MetrisedAlgebra) -> Self {
        let n = m.dim();
        let c = m.algebra().structure();
        let structure = (0..n)
            .map(|g| {
                (0..n)
                    .map(|a| (0..n).map(|b| c[(g, a, b)]).collect())
                    .collect()
            })
            .collect();
        Self {
            structure: Some(structure),
            form: Some(matrix_to_rows(m.form().matrix())),
            ..Default::default()
        }
    }

    /// Builds the raw (algebra, form) pair without metrised validation, so
    /// callers can report invariance failures instead of refusing.
    pub fn build(&self) -> Result<(JordanAlgebra, BilinearForm), IoError> {
        let algebra = self.build_algebra()?;
        let form = match &self.form {
            Some(rows) => BilinearForm::new(rows_to_matrix(rows, algebra.dim())?)?,
            None => self.default_form(&algebra)?,
        };
        if form.dim() != algebra.dim() {
            return Err(IoError::Schema(format!(
                "form is {}x{} but the algebra has dimension {}",
                form.dim(),
                form.dim(),
                algebra.dim()
            )));
        }
        Ok((algebra, form))
    }

    /// Builds and validates the metrised pair.
    pub fn to_metrised(&self) -> Result<MetrisedAlgebra, IoError> {
        let (algebra, form) = self.build()?;
        Ok(MetrisedAlgebra::new(algebra, form)?)
    }

    fn build_algebra(&self) -> Result<JordanAlgebra, IoError> {
        if let Some(factors) = &self.factors {
            if factors.is_empty() {
                return Err(IoError::Schema("factors must be non-empty".into()));
            }
            let parts = factors
                .iter()
                .map(|f| f.build_algebra())
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(JordanAlgebra::direct_sum(parts)?);
        }
        if let Some(fam) = &self.family {
            return match fam.kind.as_str() {
                "componentwise" => {
                    if fam.n == 0 {
                        return Err(IoError::Schema("componentwise needs n >= 1".into()));
                    }
                    Ok(JordanAlgebra::componentwise(fam.n))
                }
                "spin" => {
                    if fam.n < 2 {
                        return Err(IoError::Schema("spin needs n >= 2".into()));
                    }
                    Ok(JordanAlgebra::spin(fam.n))
                }
                "sym" => {
                    if fam.n == 0 {
                        return Err(IoError::Schema("sym needs n >= 1".into()));
                    }
                    Ok(JordanAlgebra::sym(fam.n))
                }
                other => Err(IoError::Schema(format!("unknown family kind '{other}'"))),
            };
        }
        if let Some(structure) = &self.structure {
            let n = structure.len();
            if n == 0 {
                return Err(IoError::Schema("structure must be non-empty".into()));
            }
            let mut t = Tensor3::zeros(n);
            for (g, plane) in structure.iter().enumerate() {
                if plane.len() != n {
                    return Err(IoError::Schema("structure must be n x n x n".into()));
                }
                for (a, row) in plane.iter().enumerate() {
                    if row.len() != n {
                        return Err(IoError::Schema("structure must be n x n x n".into()));
                    }
                    for (b, v) in row.iter().enumerate() {
                        t[(g, a, b)] = *v;
                    }
                }
            }
            return Ok(JordanAlgebra::from_structure(t)?);
        }
        Err(IoError::Schema(
            "algebra spec needs one of: family, structure, factors".into(),
        ))
    }

    fn default_form(&self, algebra: &JordanAlgebra) -> Result<BilinearForm, IoError> {
        if let (Some(factors), weights) = (&self.factors, &self.weights) {
            let parts = factors
                .iter()
                .map(|f| f.build())
                .collect::<Result<Vec<_>, _>>()?;
            let w = match weights {
                Some(w) => {
                    if w.len() != parts.len() {
                        return Err(IoError::Schema("one weight per factor".into()));
                    }
                    w.clone()
                }
                None => vec![1.0; parts.len()],
            };
            let dim = algebra.dim();
            let mut m = DMatrix::zeros(dim, dim);
            let mut off = 0;
            for ((_, form), wj) in parts.iter().zip(&w) {
                if *wj <= 0.0 {
                    return Err(IoError::Schema("weights must be positive".into()));
                }
                let d = form.dim();
                m.view_mut((off, off), (d, d))
                    .copy_from(&(form.matrix() * *wj));
                off += d;
            }
            return Ok(BilinearForm::new(m)?);
        }
        Ok(algebra.trace_form())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarrierFactorDoc {
    pub algebra: AlgebraSpecDoc,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarrierSpecDoc {
    pub factors: Vec<BarrierFactorDoc>,
    pub center: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

impl BarrierSpecDoc {
    pub fn to_spec(&self) -> Result<BarrierSpec, IoError> {
        let factors = self
            .factors
            .iter()
            .map(|f| Ok((f.algebra.to_metrised()?, f.weight)))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(BarrierSpec::new(
            factors,
            DVector::from_column_slice(&self.center),
            self.offset,
        )?)
    }

    pub fn to_potential(&self) -> Result<BarrierPotential, IoError> {
        Ok(canonical_barrier(self.to_spec()?))
    }
}

/// Parsed potential specification.
#[derive(Debug, Clone)]
pub enum PotentialSpecDoc {
    Barrier(BarrierSpecDoc),
    Series(AlgebraSpecDoc),
    Quadratic(Vec<Vec<f64>>),
}

impl PotentialSpecDoc {
    pub fn parse(value: &serde_json::Value) -> Result<Self, IoError> {
        let obj = value
            .as_object()
            .ok_or_else(|| IoError::Schema("potential spec must be a JSON object".into()))?;
        if let Some(kind) = obj.get("kind").and_then(|k| k.as_str()) {
            return match kind {
                "barrier" => Ok(Self::Barrier(serde_json::from_value(value.clone())?)),
                "series" => {
                    let algebra = obj.get("algebra").ok_or_else(|| {
                        IoError::Schema("series spec needs an 'algebra' field".into())
                    })?;
                    Ok(Self::Series(serde_json::from_value(algebra.clone())?))
                }
                "quadratic" => {
                    let matrix = obj.get("matrix").ok_or_else(|| {
                        IoError::Schema("quadratic spec needs a 'matrix' field".into())
                    })?;
                    Ok(Self::Quadratic(serde_json::from_value(matrix.clone())?))
                }
                other => Err(IoError::Schema(format!("unknown potential kind '{other}'"))),
            };
        }
        if obj.contains_key("center") {
            return Ok(Self::Barrier(serde_json::from_value(value.clone())?));
        }
        // bare algebra spec: series potential
        Ok(Self::Series(serde_json::from_value(value.clone())?))
    }

    pub fn build(&self) -> Result<Box<dyn Potential>, IoError> {
        match self {
            Self::Barrier(doc) => Ok(Box::new(doc.to_potential()?)),
            Self::Series(doc) => Ok(Box::new(SeriesPotential::new(doc.to_metrised()?)?)),
            Self::Quadratic(rows) => {
                let n = rows.len();
                let q = rows_to_matrix(rows, n)?;
                Ok(Box::new(QuadraticPotential::new(q)))
            }
        }
    }
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<f64>], expected: usize) -> Result<DMatrix<f64>, IoError> {
    if rows.len() != expected || rows.iter().any(|r| r.len() != expected) {
        return Err(IoError::Schema(format!(
            "matrix must be {expected}x{expected}"
        )));
    }
    Ok(DMatrix::from_fn(expected, expected, |i, j| rows[i][j]))
}

pub fn vector_to_vec(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}
