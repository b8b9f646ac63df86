//! High-order central finite differences with Richardson extrapolation.
//!
//! This is the independent oracle for derivative tensors up to order 4. It
//! never touches the exact evaluators it is used to check: everything is
//! built from point evaluations of the scalar field.

use crate::tensor::{Tensor3, Tensor4};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumdiffError {
    #[error("field evaluation left the domain or returned a non-finite value")]
    BadEvaluation,
    #[error("order {order} outside supported range 1..=4")]
    UnsupportedOrder { order: usize },
    #[error("order-4 tensor in dimension {dim} exceeds the configured cap {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("stencil config invalid: {0}")]
    BadConfig(&'static str),
}

/// Central-difference stencil configuration.
#[derive(Debug, Clone)]
pub struct StencilConfig {
    /// Base step, scaled internally by (1 + ‖x‖).
    pub base_step: f64,
    /// Number of step-halving levels entering the extrapolation (1 = none).
    pub richardson_levels: usize,
    /// Order-4 tensors cost O(dim⁴) evaluations; refuse above this dimension.
    pub max_dim_order4: usize,
}

impl Default for StencilConfig {
    fn default() -> Self {
        Self {
            base_step: 1e-2,
            richardson_levels: 2,
            max_dim_order4: 12,
        }
    }
}

impl StencilConfig {
    pub fn with_step(base_step: f64) -> Self {
        Self {
            base_step,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), NumdiffError> {
        if self.base_step <= 0.0 || !self.base_step.is_finite() {
            return Err(NumdiffError::BadConfig("base_step must be positive"));
        }
        if self.richardson_levels < 1 {
            return Err(NumdiffError::BadConfig("richardson_levels must be >= 1"));
        }
        Ok(())
    }
}

/// Fully symmetric derivative tensor of order 1..=4.
#[derive(Debug, Clone)]
pub enum DerivTensor {
    Order1(DVector<f64>),
    Order2(DMatrix<f64>),
    Order3(Tensor3),
    Order4(Tensor4),
}

impl DerivTensor {
    pub fn order(&self) -> usize {
        match self {
            DerivTensor::Order1(_) => 1,
            DerivTensor::Order2(_) => 2,
            DerivTensor::Order3(_) => 3,
            DerivTensor::Order4(_) => 4,
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            DerivTensor::Order1(v) => v.amax(),
            DerivTensor::Order2(m) => m.amax(),
            DerivTensor::Order3(t) => t.max_abs(),
            DerivTensor::Order4(t) => t.max_abs(),
        }
    }

    fn entry(&self, ix: &[usize]) -> f64 {
        match self {
            DerivTensor::Order1(v) => v[ix[0]],
            DerivTensor::Order2(m) => m[(ix[0], ix[1])],
            DerivTensor::Order3(t) => t[(ix[0], ix[1], ix[2])],
            DerivTensor::Order4(t) => t[(ix[0], ix[1], ix[2], ix[3])],
        }
    }
}

/// Mixed central difference of the scalar field `f` at `x`, all partial
/// derivatives of the given order. Only non-decreasing index tuples are
/// evaluated; the result is mirrored over permutations, so it is exactly
/// symmetric.
pub fn fd_derivative<F>(
    f: F,
    x: &DVector<f64>,
    order: usize,
    cfg: &StencilConfig,
) -> Result<DerivTensor, NumdiffError>
where
    F: Fn(&DVector<f64>) -> Option<f64>,
{
    cfg.validate()?;
    let n = x.len();
    if order == 4 && n > cfg.max_dim_order4 {
        return Err(NumdiffError::DimensionTooLarge {
            dim: n,
            max: cfg.max_dim_order4,
        });
    }
    let h0 = cfg.base_step * (1.0 + x.norm());
    let mut out = match order {
        1 => DerivTensor::Order1(DVector::zeros(n)),
        2 => DerivTensor::Order2(DMatrix::zeros(n, n)),
        3 => DerivTensor::Order3(Tensor3::zeros(n)),
        4 => DerivTensor::Order4(Tensor4::zeros(n)),
        _ => return Err(NumdiffError::UnsupportedOrder { order }),
    };
    for tuple in sorted_tuples(n, order) {
        let value = richardson(&f, x, &tuple, h0, cfg.richardson_levels)?;
        store_symmetric(&mut out, &tuple, value);
    }
    Ok(out)
}

/// Relative max-norm gap between the finite-difference tensor and a supplied
/// exact tensor; the oracle gate used in the acceptance tests.
pub fn fd_consistency<F>(
    f: F,
    exact: &DerivTensor,
    x: &DVector<f64>,
    order: usize,
    cfg: &StencilConfig,
) -> Result<f64, NumdiffError>
where
    F: Fn(&DVector<f64>) -> Option<f64>,
{
    assert_eq!(exact.order(), order, "exact tensor order mismatch");
    let fd = fd_derivative(f, x, order, cfg)?;
    let n = x.len();
    let scale = 1.0 + exact.max_abs();
    let mut worst = 0.0f64;
    for tuple in sorted_tuples(n, order) {
        let gap = (fd.entry(&tuple) - exact.entry(&tuple)).abs();
        worst = worst.max(gap);
    }
    Ok(worst / scale)
}

/// Richardson triangle over step halvings; the base stencils have even error
/// series in h, so each level gains two orders.
fn richardson<F>(
    f: &F,
    x: &DVector<f64>,
    tuple: &[usize],
    h0: f64,
    levels: usize,
) -> Result<f64, NumdiffError>
where
    F: Fn(&DVector<f64>) -> Option<f64>,
{
    let mut table = vec![0.0f64; levels];
    for (j, slot) in table.iter_mut().enumerate() {
        *slot = stencil_eval(f, x, tuple, h0 / 2f64.powi(j as i32))?;
    }
    let mut current = table;
    for m in 1..levels {
        let factor = 4f64.powi(m as i32);
        let mut next = vec![0.0f64; current.len() - 1];
        for j in 0..next.len() {
            next[j] = (factor * current[j + 1] - current[j]) / (factor - 1.0);
        }
        current = next;
    }
    Ok(current[0])
}

/// One mixed central difference at step h for the sorted index tuple.
fn stencil_eval<F>(f: &F, x: &DVector<f64>, tuple: &[usize], h: f64) -> Result<f64, NumdiffError>
where
    F: Fn(&DVector<f64>) -> Option<f64>,
{
    // group the tuple into (variable, multiplicity)
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &v in tuple {
        match groups.last_mut() {
            Some((var, m)) if *var == v => *m += 1,
            _ => groups.push((v, 1)),
        }
    }
    let stencils: Vec<&[(i32, f64)]> = groups.iter().map(|&(_, m)| stencil_1d(m)).collect();
    let mut acc = 0.0;
    let mut counters = vec![0usize; groups.len()];
    loop {
        let mut weight = 1.0;
        let mut point = x.clone();
        for (gi, &(var, _)) in groups.iter().enumerate() {
            let (offset, w) = stencils[gi][counters[gi]];
            weight *= w;
            point[var] += offset as f64 * h;
        }
        if weight != 0.0 {
            let value = f(&point).ok_or(NumdiffError::BadEvaluation)?;
            if !value.is_finite() {
                return Err(NumdiffError::BadEvaluation);
            }
            acc += weight * value;
        }
        // advance the cartesian product, last group fastest
        let mut gi = groups.len();
        loop {
            if gi == 0 {
                return Ok(acc / h.powi(tuple.len() as i32));
            }
            gi -= 1;
            counters[gi] += 1;
            if counters[gi] < stencils[gi].len() {
                break;
            }
            counters[gi] = 0;
        }
    }
}

/// Second-order central stencil for the m-th derivative in one variable.
fn stencil_1d(m: usize) -> &'static [(i32, f64)] {
    match m {
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("orders are capped at 4"),
    }
}

fn sorted_tuples(n: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut tuple = vec![0usize; order];
    fn rec(n: usize, pos: usize, start: usize, tuple: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == tuple.len() {
            out.push(tuple.clone());
            return;
        }
        for v in start..n {
            tuple[pos] = v;
            rec(n, pos + 1, v, tuple, out);
        }
    }
    rec(n, 0, 0, &mut tuple, &mut out);
    out
}

fn store_symmetric(out: &mut DerivTensor, tuple: &[usize], value: f64) {
    match out {
        DerivTensor::Order1(v) => v[tuple[0]] = value,
        DerivTensor::Order2(m) => {
            m[(tuple[0], tuple[1])] = value;
            m[(tuple[1], tuple[0])] = value;
        }
        DerivTensor::Order3(t) => {
            let mut ix = [tuple[0], tuple[1], tuple[2]];
            permute3(&mut ix, |p| t[(p[0], p[1], p[2])] = value);
        }
        DerivTensor::Order4(t) => {
            let mut ix = [tuple[0], tuple[1], tuple[2], tuple[3]];
            permute4(&mut ix, |p| t[(p[0], p[1], p[2], p[3])] = value);
        }
    }
}

fn permute3<F: FnMut(&[usize; 3])>(ix: &mut [usize; 3], mut f: F) {
    let base = *ix;
    for a in 0..3 {
        for b in 0..3 {
            if b == a {
                continue;
            }
            let c = 3 - a - b;
            f(&[base[a], base[b], base[c]]);
        }
    }
}

fn permute4<F: FnMut(&[usize; 4])>(ix: &mut [usize; 4], mut f: F) {
    let base = *ix;
    for a in 0..4 {
        for b in 0..4 {
            if b == a {
                continue;
            }
            for c in 0..4 {
                if c == a || c == b {
                    continue;
                }
                let d = 6 - a - b - c;
                f(&[base[a], base[b], base[c], base[d]]);
            }
        }
    }
}
