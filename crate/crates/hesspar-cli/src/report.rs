//! Serializable report types. Field order is fixed by the struct layout and
//! no maps are used, so identical runs serialize byte-identically.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub third: f64,
    pub first: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub fd_step: f64,
    pub fd_levels: usize,
    pub output: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualOut {
    pub raw: f64,
    pub normalized: f64,
}

impl From<hesspar::Residual> for ResidualOut {
    fn from(r: hesspar::Residual) -> Self {
        Self {
            raw: r.raw,
            normalized: r.normalized,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AlgebraCheckReport {
    pub manifest: Manifest,
    pub dim: usize,
    pub commutativity_residual: f64,
    pub jordan_residual: f64,
    pub integrability_residual: f64,
    pub invariance_residual: f64,
    pub unit: Option<Vec<f64>>,
    pub unit_residual: Option<f64>,
    pub form_positive_definite: bool,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct PointRecord {
    pub point: Vec<f64>,
    pub residual_third: ResidualOut,
    pub residual_first: ResidualOut,
    pub unit: Vec<f64>,
    pub center: Option<Vec<f64>>,
    pub nu: Option<f64>,
    pub source_tags: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct VerifySummary {
    pub evaluated: usize,
    pub skipped: usize,
    pub max_third: f64,
    pub mean_third: f64,
    pub max_first: f64,
    pub mean_first: f64,
    pub tol_third: f64,
    pub tol_first: f64,
    pub pass_third: bool,
    pub pass_first: bool,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub manifest: Manifest,
    pub provenance: String,
    pub points: Vec<PointRecord>,
    pub summary: VerifySummary,
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub manifest: Manifest,
    pub provenance: String,
    pub point: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<Vec<f64>>,
    pub source_tags: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ReconstructReport {
    pub manifest: Manifest,
    pub point: Vec<f64>,
    pub residual_third: ResidualOut,
    pub algebra: hesspar::io::AlgebraSpecDoc,
    pub unit: Option<Vec<f64>>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct TransportReport {
    pub manifest: Manifest,
    pub steps_per_segment: usize,
    pub transport_matrix: Vec<Vec<f64>>,
    pub metric_preservation_residual: f64,
    pub isomorphism_residual: f64,
    pub tol_isomorphism: f64,
    pub tol_metric: f64,
    pub pass: bool,
}
