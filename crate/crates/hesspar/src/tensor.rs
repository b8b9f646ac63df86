//! Dense rank-3 and rank-4 tensors over `f64`.
//!
//! Dimensions in this crate stay small (tens at most), so storage is a flat
//! `Vec<f64>` with row-major indexing and no sparsity.

use std::ops::{Index, IndexMut};

/// Dense rank-3 tensor with all three axes of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t[(i, j, k)] = f(i, j, k);
                }
            }
        }
        t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.n && j < self.n && k < self.n);
        (i * self.n + j) * self.n + k
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Average over all 6 index permutations, computed once per sorted tuple
    /// and mirrored, so the output is exactly symmetric and symmetrization is
    /// a bitwise fixed point.
    pub fn symmetrized(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let base = self[(i, j, k)];
                    let dev = (self[(i, k, j)] - base)
                        + (self[(j, i, k)] - base)
                        + (self[(j, k, i)] - base)
                        + (self[(k, i, j)] - base)
                        + (self[(k, j, i)] - base);
                    let value = base + dev / 6.0;
                    let ix = [i, j, k];
                    for a in 0..3 {
                        for b in 0..3 {
                            if b == a {
                                continue;
                            }
                            let c = 3 - a - b;
                            out[(ix[a], ix[b], ix[c])] = value;
                        }
                    }
                }
            }
        }
        out
    }

    /// Max deviation from full symmetry.
    pub fn asymmetry(&self) -> f64 {
        let sym = self.symmetrized();
        let mut m = 0.0f64;
        for (a, b) in self.data.iter().zip(sym.data.iter()) {
            m = m.max((a - b).abs());
        }
        m
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.data[self.idx(i, j, k)]
    }
}

impl std::ops::Add<&Tensor3> for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.n, rhs.n);
        Tensor3 {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub<&Tensor3> for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.n, rhs.n);
        Tensor3 {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    #[inline]
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        let ix = self.idx(i, j, k);
        &mut self.data[ix]
    }
}

/// Dense rank-4 tensor with all four axes of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize, usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t[(i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        debug_assert!(i < self.n && j < self.n && k < self.n && l < self.n);
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Average over all 24 index permutations, computed once per sorted tuple
    /// and mirrored; bitwise fixed point on already-symmetric input.
    pub fn symmetrized(&self) -> Self {
        let n = self.n;
        let perms: [[usize; 4]; 24] = permutations4();
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    for l in k..n {
                        let ix = [i, j, k, l];
                        let base = self[(i, j, k, l)];
                        let mut dev = 0.0;
                        for p in &perms {
                            dev += self[(ix[p[0]], ix[p[1]], ix[p[2]], ix[p[3]])] - base;
                        }
                        let value = base + dev / 24.0;
                        for p in &perms {
                            out[(ix[p[0]], ix[p[1]], ix[p[2]], ix[p[3]])] = value;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn asymmetry(&self) -> f64 {
        let sym = self.symmetrized();
        let mut m = 0.0f64;
        for (a, b) in self.data.iter().zip(sym.data.iter()) {
            m = m.max((a - b).abs());
        }
        m
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

impl Index<(usize, usize, usize, usize)> for Tensor4 {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j, k, l): (usize, usize, usize, usize)) -> &f64 {
        &self.data[self.idx(i, j, k, l)]
    }
}

impl IndexMut<(usize, usize, usize, usize)> for Tensor4 {
    #[inline]
    fn index_mut(&mut self, (i, j, k, l): (usize, usize, usize, usize)) -> &mut f64 {
        let ix = self.idx(i, j, k, l);
        &mut self.data[ix]
    }
}

fn permutations4() -> [[usize; 4]; 24] {
    let mut out = [[0usize; 4]; 24];
    let mut m = 0;
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
                out[m] = [a, b, c, d];
                m += 1;
            }
        }
    }
    out
}
