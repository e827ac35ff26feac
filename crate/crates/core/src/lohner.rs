//! Doubleton sets `x + C·r0 + r̃` and their propagation through a map with
//! enclosed derivative, plus the block-sparse form of that derivative.

use crate::error::{Error, Result};
use crate::interval::{split, IMatrix, IVector, Interval, IntervalError, Matrix};
use crate::pnrep::{PnParams, PnVector};
use crate::taylor::{advance_slices, Dual, RhsSpec};

/// How one row of a linear operator acts.
pub enum RowKind<'a> {
    Zero,
    /// The row is the unit vector of the given column.
    Copy(usize),
    /// `(column, coefficient)` pairs in increasing column order.
    Sparse(&'a [(usize, Interval)]),
}

/// An interval matrix described row by row, so structured operators never
/// materialise their zero and identity blocks.
pub trait LinearPart {
    fn dim(&self) -> usize;
    fn row(&self, i: usize) -> RowKind<'_>;

    /// Dense form, for tests and diagnostics.
    fn to_dense(&self) -> IMatrix {
        let m = self.dim();
        let mut a = IMatrix::zeros(m, m);
        for i in 0..m {
            match self.row(i) {
                RowKind::Zero => {}
                RowKind::Copy(j) => a.set(i, j, Interval::ONE),
                RowKind::Sparse(entries) => {
                    for &(j, v) in entries {
                        a.set(i, j, v);
                    }
                }
            }
        }
        a
    }
}

/// Product with an interval matrix; entrywise identical to the dense product.
pub fn block_mul<A: LinearPart + ?Sized>(a: &A, m: &IMatrix) -> Result<IMatrix> {
    if m.rows() != a.dim() {
        return Err(IntervalError::DimensionMismatch(format!("block_mul: {} vs {} rows", a.dim(), m.rows())).into());
    }
    let mut out = IMatrix::zeros(a.dim(), m.cols());
    for i in 0..a.dim() {
        match a.row(i) {
            RowKind::Zero => {}
            RowKind::Copy(j) => {
                for (o, &v) in out.row_mut(i).iter_mut().zip(m.row(j)) {
                    *o = v.plus_zero();
                }
            }
            RowKind::Sparse(entries) => {
                let orow = out.row_mut(i);
                for &(j, aij) in entries {
                    for (o, &v) in orow.iter_mut().zip(m.row(j)) {
                        *o += aij * v;
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn block_mul_vec<A: LinearPart + ?Sized>(a: &A, v: &[Interval]) -> Result<IVector> {
    if v.len() != a.dim() {
        return Err(IntervalError::DimensionMismatch(format!("block_mul_vec: {} vs {}", a.dim(), v.len())).into());
    }
    Ok((0..a.dim()).map(|i| apply_row(a.row(i), v)).collect())
}

#[inline]
fn apply_row(row: RowKind<'_>, v: &[Interval]) -> Interval {
    match row {
        RowKind::Zero => Interval::ZERO,
        RowKind::Copy(j) => v[j].plus_zero(),
        RowKind::Sparse(entries) => entries.iter().fold(Interval::ZERO, |acc, &(j, a)| acc + a * v[j]),
    }
}

/// `l^T A` for an interval row vector `l`.
pub fn left_apply<A: LinearPart + ?Sized>(a: &A, l: &[Interval]) -> IVector {
    let mut out = vec![Interval::ZERO; a.dim()];
    for (i, &li) in l.iter().enumerate() {
        if li == Interval::ZERO {
            continue;
        }
        match a.row(i) {
            RowKind::Zero => {}
            RowKind::Copy(j) => out[j] += li,
            RowKind::Sparse(entries) => {
                for &(j, aij) in entries {
                    out[j] += li * aij;
                }
            }
        }
    }
    out
}

/// Dense interval matrix as a [`LinearPart`].
pub struct DenseLinear {
    rows: Vec<Vec<(usize, Interval)>>,
}

impl DenseLinear {
    pub fn new(a: &IMatrix) -> DenseLinear {
        let rows = (0..a.rows()).map(|i| a.row(i).iter().copied().enumerate().collect()).collect();
        DenseLinear { rows }
    }
}

impl LinearPart for DenseLinear {
    fn dim(&self) -> usize {
        self.rows.len()
    }
    fn row(&self, i: usize) -> RowKind<'_> {
        RowKind::Sparse(&self.rows[i])
    }
}

/// Enclosure of the derivative of one integration step. Rows `x(0)` and
/// node 1 form the head block `[A11 | A13]` over columns `x(0)` and node
/// `p`; node rows `i ≥ 2` copy node `i-1`; remainder rows vanish.
#[derive(Clone, Debug)]
pub struct BlockMatrix {
    params: PnParams,
    /// (n+2)×(n+2): columns are `x(0)` then `x{p,0..=n}`.
    head: IMatrix,
    head_rows: Vec<Vec<(usize, Interval)>>,
}

impl BlockMatrix {
    /// `head` rows: `x(0)`, `x{1,0..=n}`; columns: `x(0)`, `x{p,0..=n}`.
    pub fn new(params: &PnParams, head: IMatrix) -> Result<BlockMatrix> {
        let k = params.n() + 2;
        if head.rows() != k || head.cols() != k {
            return Err(IntervalError::DimensionMismatch(format!("head block {}x{} for n+2 = {k}", head.rows(), head.cols())).into());
        }
        let cols: Vec<usize> = std::iter::once(0).chain((0..=params.n()).map(|c| params.pos(params.p(), c))).collect();
        let head_rows = (0..k).map(|r| cols.iter().enumerate().map(|(c, &j)| (j, head.get(r, c))).collect()).collect();
        Ok(BlockMatrix { params: params.clone(), head, head_rows })
    }

    /// Column `x(0)` of the head block.
    pub fn a11(&self) -> IVector {
        (0..self.head.rows()).map(|r| self.head.get(r, 0)).collect()
    }

    /// Columns `x{p,0..=n}` of the head block.
    pub fn a13(&self) -> IMatrix {
        IMatrix::from_fn(self.head.rows(), self.head.cols() - 1, |r, c| self.head.get(r, c + 1))
    }

    pub fn head(&self) -> &IMatrix {
        &self.head
    }

    pub fn params(&self) -> &PnParams {
        &self.params
    }
}

impl LinearPart for BlockMatrix {
    fn dim(&self) -> usize {
        self.params.m()
    }

    fn row(&self, i: usize) -> RowKind<'_> {
        let n = self.params.n();
        if i < n + 2 {
            RowKind::Sparse(&self.head_rows[i])
        } else if i < self.params.first_rem_pos() {
            RowKind::Copy(i - (n + 1))
        } else {
            RowKind::Zero
        }
    }
}

/// Enclosure of `DΦ` over the hull `x` together with the node-1
/// coefficients `φ{1,0..=n}` enclosed over the same hull.
///
/// Head row 0 differentiates `Σ_k φ{1,k} h^k`; head row `1+k`
/// differentiates `φ{1,k}`.
pub fn d_phi(x: &PnVector, f: &RhsSpec) -> Result<(BlockMatrix, IVector)> {
    let pr = x.params();
    let n = pr.n();
    let dim = n + 2;
    let u: Vec<Dual> = x.node(pr.p()).iter().enumerate().map(|(k, &v)| Dual::variable(v, k + 1, dim)).collect();
    let v0 = Dual::variable(x.value0(), 0, dim);
    let phi = advance_slices(f, &u, v0, n)?;
    let h = pr.h();
    let mut head = IMatrix::zeros(dim, dim);
    let mut hk = Interval::ONE;
    for (k, d) in phi.iter().enumerate() {
        for c in 0..dim {
            let g = d.grad_at(c);
            head.set(1 + k, c, g);
            head.set(0, c, head.get(0, c) + g * hk);
        }
        hk = hk * h;
    }
    let values = phi.iter().map(|d| d.value).collect();
    Ok((BlockMatrix::new(pr, head)?, values))
}

/// The set `x + C·r0 + r̃` with `x` a point, `C` a point matrix and
/// `r0`, `r̃` boxes containing zero.
#[derive(Clone, Debug)]
pub struct DoubletonSet {
    params: PnParams,
    x: Vec<f64>,
    c: Matrix,
    r0: IVector,
    r_tilde: IVector,
}

impl DoubletonSet {
    pub fn new(params: &PnParams, x: Vec<f64>, c: Matrix, r0: IVector, r_tilde: IVector) -> Result<DoubletonSet> {
        let m = params.m();
        if x.len() != m || c.rows() != m || c.cols() != r0.len() || r_tilde.len() != m {
            return Err(IntervalError::DimensionMismatch(format!(
                "doubleton: x {}, C {}x{}, r0 {}, r~ {} for m = {m}",
                x.len(),
                c.rows(),
                c.cols(),
                r0.len(),
                r_tilde.len()
            ))
            .into());
        }
        Ok(DoubletonSet { params: params.clone(), x, c, r0, r_tilde })
    }

    /// Method 3 start: `C = I`, `r0 = box - mid`, `r̃ = 0`.
    pub fn from_box(b: &PnVector) -> DoubletonSet {
        let (x, r0) = split(b.data());
        let m = x.len();
        DoubletonSet { params: b.params().clone(), x, c: Matrix::identity(m), r0, r_tilde: vec![Interval::ZERO; m] }
    }

    /// Method 0 start: the whole box lives in `r̃`, `r0` is empty.
    pub fn from_box_method0(b: &PnVector) -> DoubletonSet {
        let (x, rt) = split(b.data());
        let m = x.len();
        DoubletonSet { params: b.params().clone(), x, c: Matrix::zeros(m, 0), r0: Vec::new(), r_tilde: rt }
    }

    pub fn params(&self) -> &PnParams {
        &self.params
    }
    pub fn x(&self) -> &[f64] {
        &self.x
    }
    pub fn c(&self) -> &Matrix {
        &self.c
    }
    pub fn r0(&self) -> &[Interval] {
        &self.r0
    }
    pub fn r_tilde(&self) -> &[Interval] {
        &self.r_tilde
    }

    /// Enclosure of coordinate `i` over the set.
    pub fn hull_entry(&self, i: usize) -> Interval {
        let cr = crate::interval::matrix::point_row_dot(self.c.row(i), &self.r0);
        Interval::point(self.x[i]) + cr + self.r_tilde[i]
    }

    /// Entrywise hull `x + C·r0 + r̃`.
    pub fn hull(&self) -> PnVector {
        let data = (0..self.x.len()).map(|i| self.hull_entry(i)).collect();
        PnVector::from_data(&self.params, data).expect("dimensions checked at construction")
    }

    /// Hull restricted to `rows`; every other entry is the entire line, so
    /// accidental use cannot yield a false enclosure.
    pub fn hull_rows(&self, rows: impl IntoIterator<Item = usize>) -> PnVector {
        let mut data = vec![Interval::ENTIRE; self.x.len()];
        for i in rows {
            data[i] = self.hull_entry(i);
        }
        PnVector::from_data(&self.params, data).expect("dimensions checked at construction")
    }

    /// `l·x + (l^T C)·r0 + l·r̃` for an interval row vector `l`.
    pub fn linear_form(&self, l: &[Interval]) -> Interval {
        let mut lx = Interval::ZERO;
        let mut lr = Interval::ZERO;
        let mut lc = vec![Interval::ZERO; self.r0.len()];
        for (i, &li) in l.iter().enumerate() {
            if li == Interval::ZERO {
                continue;
            }
            lx += li * Interval::point(self.x[i]);
            lr += li * self.r_tilde[i];
            for (acc, &cij) in lc.iter_mut().zip(self.c.row(i)) {
                if cij != 0.0 {
                    *acc += li * Interval::point(cij);
                }
            }
        }
        let lcr: Interval = lc.iter().zip(&self.r0).map(|(&a, &b)| a * b).sum();
        lx + lcr + lr
    }

    /// Necessary condition for `y ∈ x + C·r0 + r̃`, checked on the hull.
    pub fn hull_contains(&self, y: &[f64]) -> bool {
        (0..self.x.len()).all(|i| self.hull_entry(i).contains(y[i]))
    }
}

/// One Lohner step. `phi_mid` encloses `Φ(x)` at the centre `x`, `r_part`
/// encloses the remainder part `R` over the whole set, and `a` encloses
/// `DΦ` over the hull. Returns the doubleton
/// `x' + C'·r0 + (A·r̃ + z + (A·C - C')·r0)` with `C' = mid(A·C)`.
pub fn propagate<A: LinearPart + ?Sized>(
    s: &DoubletonSet,
    a: &A,
    phi_mid: &[Interval],
    r_part: &[Interval],
) -> Result<DoubletonSet> {
    let m = s.params.m();
    if a.dim() != m || phi_mid.len() != m || r_part.len() != m {
        return Err(Error::Interval(IntervalError::DimensionMismatch(format!(
            "propagate: A {} phi {} R {} for m = {m}",
            a.dim(),
            phi_mid.len(),
            r_part.len()
        ))));
    }
    let image: IVector = phi_mid.iter().zip(r_part).map(|(&p, &r)| p + r).collect();
    let (x_new, z) = split(&image);
    let cols = s.c.cols();
    let mut c_new = Matrix::zeros(m, cols);
    let mut r_new = Vec::with_capacity(m);
    let mut ac_row = vec![Interval::ZERO; cols];
    for i in 0..m {
        let row = a.row(i);
        let ar = apply_row(
            match &row {
                RowKind::Zero => RowKind::Zero,
                RowKind::Copy(j) => RowKind::Copy(*j),
                RowKind::Sparse(e) => RowKind::Sparse(e),
            },
            &s.r_tilde,
        );
        let mut acc = ar + z[i];
        match row {
            RowKind::Zero => {}
            RowKind::Copy(j) => c_new.row_mut(i).copy_from_slice(s.c.row(j)),
            RowKind::Sparse(entries) => {
                ac_row.iter_mut().for_each(|v| *v = Interval::ZERO);
                for &(j, aij) in entries {
                    if aij == Interval::ZERO {
                        continue;
                    }
                    for (o, &cjk) in ac_row.iter_mut().zip(s.c.row(j)) {
                        if cjk != 0.0 {
                            *o += aij * Interval::point(cjk);
                        }
                    }
                }
                let crow = c_new.row_mut(i);
                for ((cn, &v), &r) in crow.iter_mut().zip(&ac_row).zip(&s.r0) {
                    *cn = v.mid();
                    let d = v - Interval::point(*cn);
                    if d != Interval::ZERO {
                        acc += d * r;
                    }
                }
            }
        }
        r_new.push(acc);
    }
    Ok(DoubletonSet { params: s.params.clone(), x: x_new, c: c_new, r0: s.r0.clone(), r_tilde: r_new })
}

/// Block matrix with a reproducible pseudo-random head of narrow intervals.
pub fn pseudo_random_block(params: &PnParams, seed: u64) -> BlockMatrix {
    let n = params.n();
    let mut s = seed;
    let mut next = move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let head = IMatrix::from_fn(n + 2, n + 2, |_, _| {
        let a = next();
        Interval::new(a, a + 0.01 * next().abs())
    });
    BlockMatrix::new(params, head).expect("head has the right shape")
}

#[derive(Clone, Debug)]
pub struct MulBench {
    pub m: usize,
    pub block_seconds: f64,
    pub dense_seconds: f64,
    pub bit_identical: bool,
}

impl MulBench {
    pub fn speedup(&self) -> f64 {
        self.dense_seconds / self.block_seconds
    }
}

/// Times `A·M` for a block `A` against the same product with `A` dense;
/// each timing is the best of `reps` runs.
pub fn bench_block_vs_dense(params: &PnParams, reps: usize) -> Result<MulBench> {
    let a = pseudo_random_block(params, 7);
    let dense = a.to_dense();
    let b = pseudo_random_block(params, 11).to_dense();
    let m = a.dim();
    let mm = IMatrix::from_fn(m, m, |i, j| b.get(i, j) + Interval::new(-1e-3, ((i + j) % 7) as f64 * 1e-3));
    let mut best = (f64::INFINITY, f64::INFINITY);
    let mut identical = true;
    for _ in 0..reps.max(1) {
        let t = std::time::Instant::now();
        let got = block_mul(&a, &mm)?;
        best.0 = best.0.min(t.elapsed().as_secs_f64());
        let t = std::time::Instant::now();
        let want = crate::interval::matmul(&dense, &mm)?;
        best.1 = best.1.min(t.elapsed().as_secs_f64());
        identical &= (0..m).all(|i| {
            got.row(i).iter().zip(want.row(i)).all(|(g, w)| g.lo().to_bits() == w.lo().to_bits() && g.hi().to_bits() == w.hi().to_bits())
        });
    }
    Ok(MulBench { m, block_seconds: best.0, dense_seconds: best.1, bit_identical: identical })
}
