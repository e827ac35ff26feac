//! (p,n)-representations of functions on `[-τ, 0]`.
//!
//! The grid has nodes `-i·h`, `h = τ/p`. A representation stores `x(0)`, the
//! normalised Taylor coefficients `x^[k](-i·h⁺)` for `k ≤ n`, and for each
//! cell `(-i·h, -i·h + h)` an enclosure of `x^[n+1]`. Storage follows the
//! index function: value first, then the node jets, then the remainders.

use crate::error::{Error, Result};
use crate::interval::{format_hex, parse_hex, Interval, IVector};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Debug, PartialEq)]
pub struct PnParams {
    p: usize,
    n: usize,
    tau: Interval,
    h: Interval,
}

/// A position `(i, k)` in a representation; `(0, 0)` is the value `x(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridIndex {
    pub i: usize,
    pub k: usize,
}

impl PnParams {
    pub fn new(p: usize, n: usize, tau: Interval) -> Result<PnParams> {
        if p == 0 {
            return Err(Error::IndexOutOfRange("p must be positive".into()));
        }
        if !tau.is_strictly_positive() {
            return Err(Error::IndexOutOfRange(format!("delay {tau} must be positive")));
        }
        let h = tau.try_div(Interval::from_int(p as i64))?;
        Ok(PnParams { p, n, tau, h })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn tau(&self) -> Interval {
        self.tau
    }

    #[inline]
    pub fn h(&self) -> Interval {
        self.h
    }

    /// Representation size `p(n+2) + 1`.
    #[inline]
    pub fn m(&self) -> usize {
        self.p * (self.n + 2) + 1
    }

    /// One-based index function.
    pub fn index(&self, g: GridIndex) -> Result<usize> {
        self.check(g)?;
        Ok(self.pos(g.i, g.k) + 1)
    }

    /// Inverse of [`PnParams::index`].
    pub fn grid_index(&self, index: usize) -> Result<GridIndex> {
        if index == 0 || index > self.m() {
            return Err(Error::IndexOutOfRange(format!("index {index} not in 1..={}", self.m())));
        }
        let z = index - 1;
        let coeffs = self.p * (self.n + 1);
        Ok(if z == 0 {
            GridIndex { i: 0, k: 0 }
        } else if z <= coeffs {
            GridIndex { i: (z - 1) / (self.n + 1) + 1, k: (z - 1) % (self.n + 1) }
        } else {
            GridIndex { i: z - coeffs, k: self.n + 1 }
        })
    }

    fn check(&self, g: GridIndex) -> Result<()> {
        let ok = (g.i == 0 && g.k == 0) || (1..=self.p).contains(&g.i) && g.k <= self.n + 1;
        if ok {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(format!("({}, {}) for p={}, n={}", g.i, g.k, self.p, self.n)))
        }
    }

    /// Zero-based storage position of `(i, k)`; unchecked.
    #[inline]
    pub fn pos(&self, i: usize, k: usize) -> usize {
        if i == 0 {
            0
        } else if k <= self.n {
            1 + (i - 1) * (self.n + 1) + k
        } else {
            self.p * (self.n + 1) + i
        }
    }

    /// Zero-based position of the remainder of cell `i`.
    #[inline]
    pub fn rem_pos(&self, i: usize) -> usize {
        self.p * (self.n + 1) + i
    }

    /// First zero-based remainder position; coefficients come before it.
    #[inline]
    pub fn first_rem_pos(&self) -> usize {
        self.p * (self.n + 1) + 1
    }

    #[inline]
    pub fn is_remainder_pos(&self, pos: usize) -> bool {
        pos >= self.first_rem_pos()
    }

    /// Steps in one full delay of `n+1` derivatives, `(n+1)p`.
    #[inline]
    pub fn regularity_steps(&self) -> usize {
        (self.n + 1) * self.p
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PnVector {
    params: PnParams,
    data: IVector,
}

impl PnVector {
    pub fn zeros(params: &PnParams) -> PnVector {
        PnVector { params: params.clone(), data: vec![Interval::ZERO; params.m()] }
    }

    pub fn from_data(params: &PnParams, data: IVector) -> Result<PnVector> {
        if data.len() != params.m() {
            return Err(Error::IndexOutOfRange(format!("{} entries for m = {}", data.len(), params.m())));
        }
        Ok(PnVector { params: params.clone(), data })
    }

    pub fn from_points(params: &PnParams, data: &[f64]) -> Result<PnVector> {
        PnVector::from_data(params, data.iter().map(|&x| Interval::point(x)).collect())
    }

    #[inline]
    pub fn params(&self) -> &PnParams {
        &self.params
    }

    #[inline]
    pub fn data(&self) -> &[Interval] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Interval] {
        &mut self.data
    }

    pub fn into_data(self) -> IVector {
        self.data
    }

    #[inline]
    pub fn value0(&self) -> Interval {
        self.data[0]
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> Interval {
        self.data[self.params.pos(i, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, v: Interval) {
        let p = self.params.pos(i, k);
        self.data[p] = v;
    }

    /// Coefficients `x{i,0..=n}`.
    #[inline]
    pub fn node(&self, i: usize) -> &[Interval] {
        let s = self.params.pos(i, 0);
        &self.data[s..s + self.params.n + 1]
    }

    #[inline]
    pub fn remainder(&self, i: usize) -> Interval {
        self.data[self.params.rem_pos(i)]
    }

    /// Coefficients of cell `i` with the remainder appended: `x{i,0..=n+1}`.
    pub fn cell(&self, i: usize) -> Vec<Interval> {
        let mut c = self.node(i).to_vec();
        c.push(self.remainder(i));
        c
    }

    pub fn mid(&self) -> Vec<f64> {
        self.data.iter().map(|x| x.mid()).collect()
    }

    pub fn hull(&self, o: &PnVector) -> PnVector {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.hull(*b)).collect();
        PnVector { params: self.params.clone(), data }
    }

    pub fn subset(&self, o: &PnVector) -> bool {
        self.data.iter().zip(&o.data).all(|(a, b)| a.subset(*b))
    }

    /// Enclosure of `x^[k](-i·h + ε)` for every `ε ∈ eps` (intended `eps ⊆ [0, h]`):
    /// `Σ_{l=k}^{n+1} C(l,k) ε^{l-k} x{i,l}`.
    pub fn eval_ck(&self, i: usize, k: usize, eps: Interval) -> Interval {
        eval_cell(&self.cell(i), k, eps)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<PnVector> {
        let text = std::fs::read_to_string(path)?;
        PnVector::from_text(&text).map_err(|e| match e {
            Error::ParseError(msg) => Error::ParseError(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Header `p n tau_lo tau_hi`, then one `index lo hi` line per entry,
    /// all floats in exact hexadecimal.
    pub fn to_text(&self) -> String {
        let pr = &self.params;
        let mut s = format!("{} {} {} {}\n", pr.p, pr.n, format_hex(pr.tau.lo()), format_hex(pr.tau.hi()));
        for (j, x) in self.data.iter().enumerate() {
            writeln!(s, "{} {} {}", j + 1, format_hex(x.lo()), format_hex(x.hi())).expect("string write");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<PnVector> {
        let bad = |what: &str| Error::ParseError(format!("representation file: {what}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
        if header.len() != 4 {
            return Err(bad("header must be `p n tau_lo tau_hi`"));
        }
        let p: usize = header[0].parse().map_err(|_| bad("p"))?;
        let n: usize = header[1].parse().map_err(|_| bad("n"))?;
        let tau = Interval::try_new(parse_hex(header[2])?, parse_hex(header[3])?)?;
        let params = PnParams::new(p, n, tau)?;
        let mut data = vec![None; params.m()];
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad(&format!("malformed line {line:?}")));
            }
            let idx: usize = f[0].parse().map_err(|_| bad("index"))?;
            if idx == 0 || idx > params.m() {
                return Err(Error::IndexOutOfRange(format!("index {idx} in representation file")));
            }
            if data[idx - 1].is_some() {
                return Err(bad(&format!("duplicate index {idx}")));
            }
            data[idx - 1] = Some(Interval::try_new(parse_hex(f[1])?, parse_hex(f[2])?)?);
        }
        let data: Option<Vec<Interval>> = data.into_iter().collect();
        PnVector::from_data(&params, data.ok_or_else(|| bad("missing entries"))?)
    }
}

/// `Σ_{l=k}^{len-1} C(l,k) ε^{l-k} c_l` by Horner's rule in ε.
pub fn eval_cell(c: &[Interval], k: usize, eps: Interval) -> Interval {
    let top = c.len() - 1;
    let mut acc = Interval::ZERO;
    for l in (k..=top).rev() {
        acc = acc * eps + c[l] * Interval::point(binomial(l, k));
    }
    acc
}

/// `C(l, k)` as a double; exact for the small orders used here.
pub fn binomial(l: usize, k: usize) -> f64 {
    if k > l {
        return 0.0;
    }
    let mut b: u128 = 1;
    for j in 0..k {
        b = b * (l - j) as u128 / (j + 1) as u128;
    }
    b as f64
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// The (p, n-1)-representation of `ẋ` with coefficients `(k+1)·x{i,k+1}`,
/// remainders `(n+1)·x{i,n+1}` and value `c^{1,[1]}(h)`, the derivative at
/// 0 continued from the first cell.
pub fn derivative_bound(x: &PnVector) -> Result<PnVector> {
    let pr = x.params();
    if pr.n == 0 {
        return Err(Error::OrderTooLow("derivative needs n >= 1".into()));
    }
    let dp = PnParams { p: pr.p, n: pr.n - 1, tau: pr.tau, h: pr.h };
    let mut d = PnVector::zeros(&dp);
    for i in 1..=pr.p {
        for k in 0..pr.n {
            d.set(i, k, x.get(i, k + 1) * Interval::from_int(k as i64 + 1));
        }
        d.set(i, pr.n, x.remainder(i) * Interval::from_int(pr.n as i64 + 1));
    }
    d.data[0] = x.eval_ck(1, 1, pr.h);
    Ok(d)
}

/// Assembles a representation from arbitrary sources; only interval validity is implied.
pub fn from_taylor_callback(
    params: &PnParams,
    mut coeff_source: impl FnMut(usize, usize) -> Interval,
    mut remainder_source: impl FnMut(usize) -> Interval,
    value0: Interval,
) -> PnVector {
    let mut x = PnVector::zeros(params);
    x.data[0] = value0;
    for i in 1..=params.p {
        for k in 0..=params.n {
            x.set(i, k, coeff_source(i, k));
        }
        let r = params.rem_pos(i);
        x.data[r] = remainder_source(i);
    }
    x
}

/// A function with rigorous enclosures of its derivatives.
pub trait Approximant {
    /// Enclosure of the `j`-th derivative over all times in `t`.
    fn derivative(&self, t: Interval, j: usize) -> Interval;
}

/// Per-order sup bounds `sup |a^(j) - x^(j)|` over selected cells.
#[derive(Clone, Debug)]
pub struct CkBounds {
    pub sup: Vec<f64>,
}

impl CkBounds {
    pub fn new(r: usize) -> CkBounds {
        CkBounds { sup: vec![0.0; r + 1] }
    }

    pub fn merge(&mut self, o: &CkBounds) {
        for (a, b) in self.sup.iter_mut().zip(&o.sup) {
            *a = a.max(*b);
        }
    }

    /// Upper bound on the C^k distance `Σ_{j≤k} sup_j`.
    pub fn norm(&self, k: usize) -> f64 {
        self.sup[..=k].iter().fold(0.0, |acc, &s| crate::interval::round::add_up(acc, s))
    }
}

/// Bounds `sup |a^(j)(t) - x^(j)(t)|`, `j ≤ r`, over cells `cells` of `x`,
/// where cell `i` covers times `t0 - i·h + [0, h]`. Each cell is split into
/// `subdiv` pieces; on each the naive difference is intersected with the
/// mean-value form around the piece centre, which uses order `j+1`
/// (the remainder when `j = n`).
pub fn ck_sup_bounds<A: Approximant + ?Sized>(
    x: &PnVector,
    approx: &A,
    r: usize,
    cells: impl IntoIterator<Item = usize>,
    t0: Interval,
    subdiv: usize,
) -> Result<CkBounds> {
    let pr = x.params();
    if r > pr.n {
        return Err(Error::OrderTooLow(format!("C^{r} distance needs n >= {r}")));
    }
    let h = pr.h;
    let mut out = CkBounds::new(r);
    for i in cells {
        let c = x.cell(i);
        let base = t0 - h * Interval::from_int(i as i64);
        for s in 0..subdiv {
            let e_lo = (h * Interval::from_int(s as i64)).div_f64(subdiv as f64)?;
            let e_hi = (h * Interval::from_int(s as i64 + 1)).div_f64(subdiv as f64)?;
            let e = Interval::new(e_lo.lo().max(0.0), e_hi.hi().min(h.hi()));
            let ec = Interval::point(e.mid());
            let t = base + e;
            let tc = base + ec;
            for j in 0..=r {
                let xj = eval_cell(&c, j, e) * Interval::point(factorial(j));
                let naive = approx.derivative(t, j) - xj;
                let xc = eval_cell(&c, j, ec) * Interval::point(factorial(j));
                let dc = approx.derivative(tc, j) - xc;
                let xd = eval_cell(&c, j + 1, e) * Interval::point(factorial(j + 1));
                let dd = approx.derivative(t, j + 1) - xd;
                let mvf = dc + dd * (e - ec);
                let d = naive.intersect(mvf).unwrap_or(naive);
                out.sup[j] = out.sup[j].max(d.mag());
            }
        }
    }
    Ok(out)
}

/// Upper bound on `‖a - x‖_{C^r}` over `[-τ, 0]` with 4 pieces per cell.
pub fn ck_norm_distance<A: Approximant + ?Sized>(x: &PnVector, approx: &A, r: usize) -> Result<f64> {
    let b = ck_sup_bounds(x, approx, r, 1..=x.params().p, Interval::ZERO, 4)?;
    Ok(b.norm(r))
}
