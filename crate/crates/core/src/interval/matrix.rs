//! Interval vectors, interval matrices and point matrices (row-major).

use super::round::{add_down, add_up, div_up, mul_down, mul_up, sub_down};
use super::{Interval, IntervalError};

pub type IVector = Vec<Interval>;

#[derive(Clone, Debug, PartialEq)]
pub struct IMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IMatrix {
        IMatrix { rows, cols, data: vec![Interval::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> IMatrix {
        let mut a = IMatrix::zeros(n, n);
        for i in 0..n {
            a.set(i, i, Interval::ONE);
        }
        a
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Interval) -> IMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IMatrix { rows, cols, data }
    }

    pub fn from_point(m: &Matrix) -> IMatrix {
        IMatrix { rows: m.rows, cols: m.cols, data: m.data.iter().map(|&x| Interval::point(x)).collect() }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Interval] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Interval] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Entrywise midpoints.
    pub fn mid(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.mid()).collect() }
    }

    pub fn sub_point(&self, m: &Matrix) -> Result<IMatrix, IntervalError> {
        if (self.rows, self.cols) != (m.rows, m.cols) {
            return Err(dim_err("sub_point", self.rows, self.cols, m.rows, m.cols));
        }
        let data = self.data.iter().zip(&m.data).map(|(&a, &b)| a - Interval::point(b)).collect();
        Ok(IMatrix { rows: self.rows, cols: self.cols, data })
    }
}

fn dim_err(what: &str, r1: usize, c1: usize, r2: usize, c2: usize) -> IntervalError {
    IntervalError::DimensionMismatch(format!("{what}: {r1}x{c1} vs {r2}x{c2}"))
}

/// Interval dot product accumulated left to right from zero.
#[inline]
fn idot_acc(acc: &mut Interval, a: Interval, b: Interval) {
    *acc = *acc + a * b;
}

/// Dense interval product; each entry sums over k in increasing order.
pub fn matmul(a: &IMatrix, b: &IMatrix) -> Result<IMatrix, IntervalError> {
    if a.cols != b.rows {
        return Err(dim_err("matmul", a.rows, a.cols, b.rows, b.cols));
    }
    let mut out = IMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            let brow = &b.data[k * b.cols..(k + 1) * b.cols];
            for (o, &bkj) in orow.iter_mut().zip(brow) {
                idot_acc(o, aik, bkj);
            }
        }
    }
    Ok(out)
}

pub fn matvec(a: &IMatrix, x: &[Interval]) -> Result<IVector, IntervalError> {
    if a.cols != x.len() {
        return Err(dim_err("matvec", a.rows, a.cols, x.len(), 1));
    }
    Ok((0..a.rows)
        .map(|i| {
            let mut acc = Interval::ZERO;
            for (&aij, &xj) in a.row(i).iter().zip(x) {
                idot_acc(&mut acc, aij, xj);
            }
            acc
        })
        .collect())
}

/// Midpoint vector and the interval offsets with `X ⊆ mid + rad`.
pub fn split(x: &[Interval]) -> (Vec<f64>, IVector) {
    let mid: Vec<f64> = x.iter().map(|v| v.mid()).collect();
    let rad = x.iter().zip(&mid).map(|(&v, &m)| v - Interval::point(m)).collect();
    (mid, rad)
}

/// Rigorous enclosure of `sum a_i b_i` computed in plain floating point
/// with the a priori bound `|s - ŝ| ≤ γ_n Σ|a_i b_i|`.
pub fn dot_enclosure(a: &[f64], b: &[f64]) -> Interval {
    let n = a.len().min(b.len());
    let mut s = 0.0;
    let mut t = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        s += p;
        t += p.abs();
    }
    enclose_sum(s, t, n)
}

/// Turns a recursively summed `s` and `t = Σ|terms|` into an enclosure.
#[inline]
fn enclose_sum(s: f64, t: f64, n: usize) -> Interval {
    if !s.is_finite() || !t.is_finite() {
        return Interval::ENTIRE;
    }
    if t == 0.0 {
        return Interval::ZERO;
    }
    let nu = n as f64 * f64::EPSILON * 0.5;
    // γ_n / (1 - γ_n) = nu / (1 - 2 nu)
    let g = div_up(nu, sub_down(1.0, 2.0 * nu));
    let underflow = (n as f64) * f64::from_bits(1) * 2.0;
    let err = add_up(mul_up(g, t), underflow);
    Interval::new(sub_down(s, err), add_up(s, err))
}

/// Point matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            a.data[i * n + i] = 1.0;
        }
        a
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Enclosure of `self * x`.
    pub fn mul_ivec(&self, x: &[Interval]) -> Result<IVector, IntervalError> {
        if self.cols != x.len() {
            return Err(dim_err("mul_ivec", self.rows, self.cols, x.len(), 1));
        }
        Ok((0..self.rows).map(|i| point_row_dot(self.row(i), x)).collect())
    }

    /// Enclosure of the product of two point matrices.
    pub fn mul_enclose(&self, b: &Matrix) -> Result<IMatrix, IntervalError> {
        if self.cols != b.rows {
            return Err(dim_err("mul_enclose", self.rows, self.cols, b.rows, b.cols));
        }
        let bt = b.transpose();
        Ok(IMatrix::from_fn(self.rows, b.cols, |i, j| dot_enclosure(self.row(i), bt.row(j))))
    }

    /// Entrywise `|a_ij|` column sums, rounded up.
    pub fn abs_col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (acc, &v) in s.iter_mut().zip(self.row(i)) {
                *acc = add_up(*acc, v.abs());
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Enclosure of `Σ c_j x_j` for a point row `c`; exact zeros are skipped.
#[inline]
pub(crate) fn point_row_dot(c: &[f64], x: &[Interval]) -> Interval {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (&cj, &xj) in c.iter().zip(x) {
        if cj == 0.0 {
            continue;
        }
        let (pl, ph) = if cj > 0.0 {
            (mul_down(cj, xj.lo()), mul_up(cj, xj.hi()))
        } else {
            (mul_down(cj, xj.hi()), mul_up(cj, xj.lo()))
        };
        lo = add_down(lo, pl);
        hi = add_up(hi, ph);
    }
    Interval::new(lo, hi)
}
