//! Real-space representation: finitely supported fields on the integer
//! lattice, Manhattan rings, application of the k-path operators and the
//! compression of the truncated Mellin operator to a finite window.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use libm::pow;

/// A real-valued function on the square lattice that vanishes outside a
/// dense rectangular window. Values are stored row-major over x.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeField {
    x0: i64,
    y0: i64,
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl LatticeField {
    pub fn zeros(x0: i64, y0: i64, width: usize, height: usize) -> Self {
        LatticeField { x0, y0, width, height, values: vec![0.0; width * height] }
    }

    /// The point mass `e_{x,y}`.
    pub fn delta(x: i64, y: i64) -> Self {
        let mut f = Self::zeros(x, y, 1, 1);
        f.values[0] = 1.0;
        f
    }

    /// Centered square window of radius `r` filled by `f(x, y)`.
    pub fn from_fn(r: i64, mut f: impl FnMut(i64, i64) -> f64) -> Self {
        let n = (2 * r + 1) as usize;
        let mut out = Self::zeros(-r, -r, n, n);
        for i in 0..n {
            for j in 0..n {
                out.values[i * n + j] = f(-r + i as i64, -r + j as i64);
            }
        }
        out
    }

    pub fn from_values(x0: i64, y0: i64, width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::Domain("value buffer does not match extent"));
        }
        Ok(LatticeField { x0, y0, width, height, values })
    }

    pub fn origin_offset(&self) -> (i64, i64) {
        (self.x0, self.y0)
    }

    pub fn extent(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, x: i64, y: i64) -> f64 {
        let i = x - self.x0;
        let j = y - self.y0;
        if i < 0 || j < 0 || i >= self.width as i64 || j >= self.height as i64 {
            0.0
        } else {
            self.values[i as usize * self.height + j as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, x: i64, y: i64, v: f64) {
        let i = x - self.x0;
        let j = y - self.y0;
        assert!(i >= 0 && j >= 0 && (i as usize) < self.width && (j as usize) < self.height);
        self.values[i as usize * self.height + j as usize] = v;
    }

    /// Iterate `(x, y, value)` over the window, row-major.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        let h = self.height;
        self.values.iter().enumerate().map(move |(idx, &v)| {
            let i = (idx / h) as i64;
            let j = (idx % h) as i64;
            (self.x0 + i, self.y0 + j, v)
        })
    }

    /// Total mass over the window.
    pub fn mass(&self) -> f64 {
        let mut acc = 0.0;
        let mut comp = 0.0;
        for &v in &self.values {
            let t = acc + v;
            comp += if acc.abs() >= v.abs() { (acc - t) + v } else { (v - t) + acc };
            acc = t;
        }
        acc + comp
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The `4k` lattice offsets at Manhattan distance exactly `k`.
#[derive(Debug, Clone)]
pub struct RingOffsets {
    pub k: u32,
    pub offsets: Vec<(i64, i64)>,
}

/// Enumerate the ring in the four j-indexed families
/// `(k-j, j), (-k+j, -j), (-j, k-j), (j, -k+j)`, `j = 0..k-1`.
pub fn manhattan_ring(k: u32) -> Result<RingOffsets> {
    if k == 0 {
        return Err(Error::Domain("manhattan_ring requires k >= 1"));
    }
    let kk = k as i64;
    let mut offsets = Vec::with_capacity(4 * k as usize);
    for j in 0..kk {
        offsets.push((kk - j, j));
        offsets.push((-kk + j, -j));
        offsets.push((-j, kk - j));
        offsets.push((j, -kk + j));
    }
    Ok(RingOffsets { k, offsets })
}

/// Offset for ring index `idx` in `[0, 4k)`: family `idx % 4`, shift `idx / 4`.
#[inline]
pub fn ring_offset(k: i64, idx: u64) -> (i64, i64) {
    let j = (idx / 4) as i64;
    match idx % 4 {
        0 => (k - j, j),
        1 => (-k + j, -j),
        2 => (-j, k - j),
        _ => (j, -k + j),
    }
}

/// `(L_k f)(v) = 4k f(v) - sum over the distance-k ring of f`.
/// The output window grows by `k` in each direction.
pub fn apply_path_laplacian(f: &LatticeField, k: u32) -> Result<LatticeField> {
    let ring = manhattan_ring(k)?;
    let kk = k as i64;
    let (x0, y0) = f.origin_offset();
    let (w, h) = f.extent();
    let mut out = LatticeField::zeros(x0 - kk, y0 - kk, w + 2 * k as usize, h + 2 * k as usize);
    for x in out.x0..out.x0 + out.width as i64 {
        for y in out.y0..out.y0 + out.height as i64 {
            let mut acc = 4.0 * k as f64 * f.get(x, y);
            for &(dx, dy) in &ring.offsets {
                acc -= f.get(x + dx, y + dy);
            }
            out.set(x, y, acc);
        }
    }
    Ok(out)
}

/// Truncated Mellin operator applied in real space:
/// `sum_{k=1}^{N} k^{-s} L_k f`. The window grows by `N`.
pub fn apply_mellin_truncated(f: &LatticeField, s: f64, n: u32) -> Result<LatticeField> {
    if !(s > 2.0) {
        return Err(Error::Domain("apply_mellin_truncated requires s > 2"));
    }
    if n == 0 {
        return Err(Error::Domain("apply_mellin_truncated requires N >= 1"));
    }
    let nn = n as i64;
    let (x0, y0) = f.origin_offset();
    let (w, h) = f.extent();
    let mut out = LatticeField::zeros(x0 - nn, y0 - nn, w + 2 * n as usize, h + 2 * n as usize);
    for k in 1..=n {
        let coef = pow(k as f64, -s);
        let ring = manhattan_ring(k)?;
        for x in out.x0..out.x0 + out.width as i64 {
            for y in out.y0..out.y0 + out.height as i64 {
                let mut acc = 4.0 * k as f64 * f.get(x, y);
                for &(dx, dy) in &ring.offsets {
                    acc -= f.get(x + dx, y + dy);
                }
                let v = out.get(x, y);
                out.set(x, y, v + coef * acc);
            }
        }
    }
    Ok(out)
}

/// Sparse symmetric compression of the truncated Mellin operator to a
/// `width x height` window, in compressed-row form. Row/column indices
/// follow the row-major layout of a `LatticeField` with the same extent.
///
/// The diagonal keeps the full infinite-lattice value
/// `sum_{k<=N} 4k k^{-s}`; connections leaving the window are dropped, so
/// the window absorbs.
#[derive(Debug, Clone)]
pub struct WindowOperator {
    pub width: usize,
    pub height: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<f64>,
}

pub fn compress_operator(width: usize, height: usize, s: f64, n: u32) -> Result<WindowOperator> {
    if !(s > 2.0) {
        return Err(Error::Domain("compress_operator requires s > 2"));
    }
    if n == 0 {
        return Err(Error::Domain("compress_operator requires N >= 1"));
    }
    if width < 2 * n as usize + 1 || height < 2 * n as usize + 1 {
        return Err(Error::WindowTooSmall("window must contain ring N around its center"));
    }
    let mut diag = 0.0;
    for k in 1..=n {
        diag += 4.0 * k as f64 * pow(k as f64, -s);
    }
    let rings: Vec<(f64, RingOffsets)> = (1..=n)
        .map(|k| Ok((pow(k as f64, -s), manhattan_ring(k)?)))
        .collect::<Result<_>>()?;

    let rows = width * height;
    let mut row_ptr = Vec::with_capacity(rows + 1);
    let mut col_idx = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for i in 0..width as i64 {
        for j in 0..height as i64 {
            col_idx.push((i as usize * height + j as usize) as u32);
            vals.push(diag);
            for (coef, ring) in &rings {
                for &(dx, dy) in &ring.offsets {
                    let (ti, tj) = (i + dx, j + dy);
                    if ti >= 0 && tj >= 0 && (ti as usize) < width && (tj as usize) < height {
                        col_idx.push((ti as usize * height + tj as usize) as u32);
                        vals.push(-coef);
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
    }
    Ok(WindowOperator { width, height, row_ptr, col_idx, vals })
}

impl WindowOperator {
    pub fn rows(&self) -> usize {
        self.width * self.height
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.rows());
        assert_eq!(y.len(), self.rows());
        for r in 0..self.rows() {
            let mut acc = 0.0;
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[idx] * x[self.col_idx[idx] as usize];
            }
            y[r] = acc;
        }
    }

    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1])
            .map(move |idx| (self.col_idx[idx] as usize, self.vals[idx]))
    }

    pub fn row_sum(&self, r: usize) -> f64 {
        self.row_entries(r).map(|(_, v)| v).sum()
    }

    /// Largest-magnitude eigenvalue estimate by power iteration.
    pub fn norm_estimate(&self, iters: usize) -> f64 {
        let nrows = self.rows();
        let mut x = vec![0.0f64; nrows];
        // deterministic pseudo-random start
        let mut state = 0x9e3779b97f4a7c15u64;
        for v in x.iter_mut() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *v = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
        }
        let mut y = vec![0.0f64; nrows];
        let mut lam = 0.0;
        for _ in 0..iters {
            self.apply(&x, &mut y);
            let norm = libm::sqrt(y.iter().map(|v| v * v).sum::<f64>());
            if norm == 0.0 {
                return 0.0;
            }
            lam = norm / libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
            let inv = 1.0 / norm;
            for (xv, yv) in x.iter_mut().zip(y.iter()) {
                *xv = yv * inv;
            }
        }
        lam
    }
}
