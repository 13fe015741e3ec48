//! Small dense complex-vector kernels. Everything the receivers need is O(M).

use crate::C64;

/// Hermitian inner product `aᴴ b`.
#[inline]
pub fn dotc(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

/// Unconjugated inner product `aᵀ b`.
#[inline]
pub fn dotu(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x * y)
}

#[inline]
pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn scaled(a: &[C64], s: f64) -> Vec<C64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Column-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Builds a matrix from column-major storage.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<C64>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[c * self.rows + r]
    }

    pub fn col(&self, c: usize) -> &[C64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn col_mut(&mut self, c: usize) -> &mut [C64] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// `self * conj(s)`, i.e. correlation of every row with the sequence `s`.
    pub fn mul_conj(&self, s: &[C64]) -> Vec<C64> {
        debug_assert_eq!(s.len(), self.cols);
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for (c, sc) in s.iter().enumerate() {
            axpy(sc.conj(), self.col(c), &mut out);
        }
        out
    }

    /// Adds the rank-one term `scale * u vᵀ`.
    pub fn add_outer(&mut self, scale: f64, u: &[C64], v: &[C64]) {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        for (c, vc) in v.iter().enumerate() {
            axpy(vc * scale, u, self.col_mut(c));
        }
    }
}
