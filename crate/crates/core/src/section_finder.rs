//! Non-rigorous search for proof inputs: an approximate periodic orbit, the
//! section normal from the monodromy left eigenvector, an orthonormal frame
//! on the section, and the candidate set iteration.
//!
//! Nothing here needs to be correct for a proof to be valid; the rigorous
//! verifier checks whatever this module produces.

use crate::error::{Error, Result};
use crate::interval::round::{add_up, div_up, mul_up, sub_down};
use crate::interval::{dot_enclosure, Interval, IVector, Matrix};
use crate::lohner::DoubletonSet;
use crate::pnrep::{binomial, PnParams};
use crate::poincare::Section;
use crate::taylor::{advance_slices, RhsSpec};
use nalgebra::{DMatrix, DVector};

/// Point integration with all remainders dropped.
pub struct PointFlow<'a> {
    f: &'a RhsSpec,
    params: PnParams,
    h: f64,
}

impl<'a> PointFlow<'a> {
    pub fn new(f: &'a RhsSpec, params: &PnParams) -> PointFlow<'a> {
        PointFlow { f, params: params.clone(), h: params.h().mid() }
    }

    pub fn params(&self) -> &PnParams {
        &self.params
    }

    pub fn rhs(&self) -> &'a RhsSpec {
        self.f
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Constant function `c` with vanishing derivatives.
    pub fn constant(&self, c: f64) -> Vec<f64> {
        let pr = &self.params;
        let mut x = vec![0.0; pr.m()];
        x[0] = c;
        for i in 1..=pr.p() {
            x[pr.pos(i, 0)] = c;
        }
        x
    }

    /// New node-1 coefficients from `x`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let pr = &self.params;
        let u = &x[pr.pos(pr.p(), 0)..=pr.pos(pr.p(), pr.n())];
        let c = advance_slices(self.f, u, x[0], pr.n())?;
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow("non-finite Taylor coefficient".into()));
        }
        Ok(c)
    }

    pub fn step(&self, x: &[f64]) -> Result<Vec<f64>> {
        let pr = &self.params;
        let n = pr.n();
        let c = self.forward(x)?;
        let mut y = vec![0.0; pr.m()];
        y[0] = horner(&c, self.h);
        y[pr.pos(1, 0)..=pr.pos(1, n)].copy_from_slice(&c);
        y[pr.pos(1, n) + 1..pr.first_rem_pos()].copy_from_slice(&x[1..pr.pos(pr.p(), 0)]);
        Ok(y)
    }

    /// Partial step by `eps ∈ [0, h]`.
    pub fn eps_step(&self, x: &[f64], eps: f64) -> Result<Vec<f64>> {
        let pr = &self.params;
        let n = pr.n();
        let c = self.forward(x)?;
        let mut y = vec![0.0; pr.m()];
        y[0] = horner(&c, eps);
        for i in 1..=pr.p() {
            for k in 0..=n {
                let mut acc = 0.0;
                for l in (k..=n).rev() {
                    acc = acc * eps + binomial(l, k) * x[pr.pos(i, l)];
                }
                y[pr.pos(i, k)] = acc;
            }
        }
        Ok(y)
    }

    /// `φ̂(t, x)`.
    pub fn simulate(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        if t < 0.0 {
            return Err(Error::Config(format!("negative simulation time {t}")));
        }
        let q = (t / self.h).floor() as usize;
        let eps = t - q as f64 * self.h;
        let mut y = x.to_vec();
        for _ in 0..q {
            y = self.step(&y)?;
        }
        if eps > 0.0 {
            y = self.eps_step(&y, eps)?;
        }
        Ok(y)
    }

    /// First upward crossing of `x(0) = level` at a time `t ≥ t_min`; returns
    /// the time and the state there.
    pub fn crossing_after(&self, x: &[f64], level: f64, t_min: f64, t_max: f64) -> Result<(f64, Vec<f64>)> {
        let mut y = x.to_vec();
        let mut k = 0usize;
        while (k as f64) * self.h <= t_max {
            let c = self.forward(&y)?;
            let t0 = k as f64 * self.h;
            let v0 = y[0] - level;
            let v1 = horner(&c, self.h) - level;
            if v0 < 0.0 && v1 >= 0.0 && t0 + self.h >= t_min {
                let g = |e: f64| horner(&c, e) - level;
                let (mut lo, mut hi) = (0.0, self.h);
                if t0 < t_min {
                    lo = t_min - t0;
                    if g(lo) >= 0.0 {
                        return Err(Error::NoCrossing(format!("level {level} already exceeded at t_min {t_min}")));
                    }
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if g(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let eps = if g(hi).abs() <= g(lo).abs() { hi } else { lo };
                let state = self.eps_step(&y, eps)?;
                return Ok((t0 + eps, state));
            }
            y = self.step(&y)?;
            k += 1;
        }
        Err(Error::NoCrossing(format!("no upward crossing of {level} in [{t_min}, {t_max}]")))
    }

    /// Positions that carry data in the point model.
    pub fn free_positions(&self) -> std::ops::Range<usize> {
        0..self.params.first_rem_pos()
    }
}

fn horner(c: &[f64], e: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * e + v)
}

/// Return map to `x(0) = level` with return time at least `(n+1)τ`.
pub struct ValueReturnMap<'a> {
    pub flow: PointFlow<'a>,
    pub level: f64,
    pub omega: f64,
    pub t_max: f64,
}

impl<'a> ValueReturnMap<'a> {
    pub fn new(flow: PointFlow<'a>, level: f64) -> ValueReturnMap<'a> {
        let pr = flow.params().clone();
        let omega = pr.regularity_steps() as f64 * flow.h();
        ValueReturnMap { flow, level, omega, t_max: 4.0 * omega + 50.0 }
    }

    pub fn apply(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.flow.crossing_after(x, self.level, self.omega, self.t_max)
    }
}

#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub x: Vec<f64>,
    pub period: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Forward-difference Jacobian of `g` at `x` over coordinates `free`.
fn fd_jacobian(x: &[f64], gx: &[f64], free: usize, delta: f64, g: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<DMatrix<f64>> {
    let mut jac = DMatrix::zeros(free, free);
    let mut xp = x.to_vec();
    for j in 0..free {
        let d = delta * x[j].abs().max(1.0);
        xp[j] = x[j] + d;
        let gp = g(&xp)?;
        xp[j] = x[j];
        for i in 0..free {
            jac[(i, j)] = (gp[i] - gx[i]) / d;
        }
    }
    Ok(jac)
}

/// Newton's method for `P̂(x) = x` on the value return map.
pub fn newton_refine(map: &ValueReturnMap<'_>, x: &[f64], tol: f64, max_iter: usize) -> Result<NewtonResult> {
    let free = map.flow.free_positions().end;
    let mut x = x.to_vec();
    for it in 0..max_iter {
        let (t, px) = map.apply(&x)?;
        let res: Vec<f64> = (0..free).map(|i| px[i] - x[i]).collect();
        let rnorm = res.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        log::debug!("newton iteration {it}: residual {rnorm:e}, return time {t}");
        if !rnorm.is_finite() {
            return Err(Error::NoConvergence(format!("residual not finite at iteration {it}")));
        }
        if rnorm <= tol {
            return Ok(NewtonResult { x, period: t, residual: rnorm, iterations: it });
        }
        let jp = fd_jacobian(&x, &px, free, 1e-7, |y| map.apply(y).map(|r| r.1))?;
        let jac = jp - DMatrix::identity(free, free);
        let rhs = DVector::from_vec(res.iter().map(|v| -v).collect());
        let dx = jac.lu().solve(&rhs).ok_or_else(|| Error::SingularJacobian(format!("iteration {it}")))?;
        if dx.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularJacobian(format!("non-finite update at iteration {it}")));
        }
        for i in 0..free {
            x[i] += dx[i];
        }
    }
    Err(Error::NoConvergence(format!("{max_iter} iterations")))
}

#[derive(Clone, Debug)]
pub struct Monodromy {
    /// Left eigenvector for the eigenvalue near 1, scaled so `l̂·ẋ = 1`.
    pub lhat: Vec<f64>,
    /// The eigenvalue near 1.
    pub unit: f64,
    /// Remaining eigenvalue magnitudes, decreasing.
    pub return_moduli: Vec<f64>,
    /// `max |l̂·M - λ l̂| / max |l̂|`.
    pub residual: f64,
}

/// Left eigenvector of a square matrix for the real eigenvalue closest to 1.
pub fn left_unit_eigvec(m: &DMatrix<f64>) -> Result<(Vec<f64>, f64, Vec<f64>, f64)> {
    let n = m.nrows();
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-14, 10_000).ok_or_else(|| Error::EigSolverFailure("Schur iteration did not converge".into()))?;
    let eig = schur.complex_eigenvalues();
    let (idx, best) = eig
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - nalgebra::Complex::new(1.0, 0.0)).norm().total_cmp(&(b.1 - nalgebra::Complex::new(1.0, 0.0)).norm()))
        .ok_or_else(|| Error::EigSolverFailure("empty spectrum".into()))?;
    let dist = (best - nalgebra::Complex::new(1.0, 0.0)).norm();
    if dist > 0.2 || best.im.abs() > 1e-8 {
        return Err(Error::Eigenvalue1Missing(best.re));
    }
    let lambda = best.re;
    let mut moduli: Vec<f64> = eig.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, z)| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    // inverse iteration on Mᵀ with a slightly perturbed shift
    let shift = lambda + 1e-10 * lambda.abs().max(1.0);
    let a = m.transpose() - DMatrix::identity(n, n) * shift;
    let lu = a.lu();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    for _ in 0..4 {
        let w = lu.solve(&v).ok_or_else(|| Error::EigSolverFailure("singular shifted matrix".into()))?;
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::EigSolverFailure("inverse iteration broke down".into()));
        }
        v = w / norm;
    }
    let lv = m.transpose() * &v;
    let residual = (lv - &v * lambda).amax() / v.amax();
    Ok((v.iter().copied().collect(), lambda, moduli, residual))
}

/// Monodromy of `φ̂(T, ·)` at `x` by forward differences, its left
/// eigenvector for the eigenvalue near 1, and the other eigenvalue moduli.
pub fn monodromy_left_eigvec(flow: &PointFlow<'_>, x: &[f64], period: f64) -> Result<Monodromy> {
    let free = flow.free_positions().end;
    let fx = flow.simulate(x, period)?;
    let m = fd_jacobian(x, &fx, free, 1e-7, |y| flow.simulate(y, period))?;
    let (v, unit, return_moduli, residual) = left_unit_eigvec(&m)?;
    // ẋ along the orbit by a central difference in time
    let dt = 1e-6;
    let xp = flow.simulate(x, dt)?;
    let back = flow.simulate(x, period - dt)?;
    let dot: f64 = (0..free).map(|i| v[i] * (xp[i] - back[i]) / (2.0 * dt)).sum();
    if dot == 0.0 || !dot.is_finite() {
        return Err(Error::DegenerateNormal);
    }
    let mut lhat = vec![0.0; flow.params().m()];
    for i in 0..free {
        lhat[i] = v[i] / dot;
    }
    Ok(Monodromy { lhat, unit, return_moduli, residual })
}

/// Orthonormal frame on the section: column 0 spans `l̂`, the rest come
/// from `e_2, …, e_m` by Gram-Schmidt; remainders are left untouched.
#[derive(Clone, Debug)]
pub struct Frame {
    params: PnParams,
    c: Matrix,
}

impl Frame {
    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn params(&self) -> &PnParams {
        &self.params
    }
}

pub fn build_frame(params: &PnParams, lhat: &[f64]) -> Result<Frame> {
    let m = params.m();
    let free = params.first_rem_pos();
    if lhat.len() != m || lhat[free..].iter().any(|&v| v != 0.0) {
        return Err(Error::Config("section normal must have length m and vanish on remainders".into()));
    }
    let norm = lhat[..free].iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 1e-300) || !norm.is_finite() {
        return Err(Error::DegenerateNormal);
    }
    // columns of the free block, stored as rows for locality
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(free);
    for j in 0..free {
        let mut v = if j == 0 {
            lhat[..free].to_vec()
        } else {
            let mut e = vec![0.0; free];
            e[j] = 1.0;
            e
        };
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in &q {
                let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= d * ui;
                }
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(nv > 1e-8) {
            return Err(Error::DegenerateNormal);
        }
        v.iter_mut().for_each(|x| *x /= nv);
        q.push(v);
    }
    let mut c = Matrix::identity(m);
    for (j, col) in q.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            c.set(i, j, v);
        }
    }
    Ok(Frame { params: params.clone(), c })
}

/// Enclosure `Cᵀ ± η` of `C⁻¹` on the free block; identity on remainders.
#[derive(Clone, Debug)]
pub struct FrameInverse {
    params: PnParams,
    /// Transpose of the free block of `C`.
    ct: Matrix,
    eta: f64,
}

impl FrameInverse {
    /// `η = δ/(1-δ)·‖Cᵀ‖_∞` with `δ ≥ ‖I - CᵀC‖_∞`, both rigorous upper bounds.
    pub fn new(frame: &Frame) -> Result<FrameInverse> {
        let pr = &frame.params;
        let free = pr.first_rem_pos();
        let m = pr.m();
        let c = &frame.c;
        for i in 0..m {
            for j in 0..m {
                let off_block = (i < free) != (j < free);
                let rem_diag = i >= free && j >= free;
                let v = c.get(i, j);
                if (off_block && v != 0.0) || (rem_diag && v != if i == j { 1.0 } else { 0.0 }) {
                    return Err(Error::Config("frame must act as the identity on remainders".into()));
                }
            }
        }
        let block = Matrix::from_fn(free, free, |i, j| c.get(i, j));
        let ct = block.transpose();
        let ctc = ct.mul_enclose(&block)?;
        let mut delta: f64 = 0.0;
        for i in 0..free {
            let mut s = 0.0;
            for j in 0..free {
                let e = if i == j { Interval::ONE - ctc.get(i, j) } else { -ctc.get(i, j) };
                s = add_up(s, e.mag());
            }
            delta = delta.max(s);
        }
        if delta >= 0.5 {
            return Err(Error::Config(format!("frame too far from orthonormal: δ = {delta:e}")));
        }
        let ct_norm = block.abs_col_sums().into_iter().fold(0.0, f64::max);
        let eta = div_up(mul_up(delta, ct_norm), sub_down(1.0, delta));
        Ok(FrameInverse { params: pr.clone(), ct, eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Row 0 of the inverse: the section normal in frame coordinates.
    pub fn normal(&self) -> IVector {
        let free = self.params.first_rem_pos();
        let mut l = vec![Interval::ZERO; self.params.m()];
        for (j, lj) in l.iter_mut().enumerate().take(free) {
            *lj = Interval::point(self.ct.get(0, j)).inflate(self.eta);
        }
        l
    }

    /// The section `{x : (C⁻¹(x - anchor))_0 = 0}`.
    pub fn section(&self, anchor: &[f64]) -> Result<Section> {
        let l = self.normal();
        let offset = l.iter().zip(anchor).fold(Interval::ZERO, |acc, (&w, &a)| acc + w * Interval::point(a));
        Section::from_dense(&self.params, &l, offset)
    }

    /// Enclosure of `C⁻¹ v`.
    pub fn apply(&self, v: &[Interval]) -> IVector {
        let free = self.params.first_rem_pos();
        let tail = v[..free].iter().fold(0.0, |acc, x| add_up(acc, x.mag()));
        let slack = Interval::symmetric(mul_up(self.eta, tail));
        let mut out: IVector = (0..free).map(|i| crate::interval::matrix::point_row_dot(self.ct.row(i), &v[..free]) + slack).collect();
        out.extend_from_slice(&v[free..]);
        out
    }

    /// Enclosure of `{C⁻¹(y - anchor) : y ∈ s}` in frame coordinates.
    pub fn to_frame(&self, s: &DoubletonSet, anchor: &[f64]) -> IVector {
        let free = self.params.first_rem_pos();
        let m = self.params.m();
        let diff: IVector = s.x().iter().zip(anchor).map(|(&a, &b)| Interval::point(a) - Interval::point(b)).collect();
        let mut y = self.apply(&diff);
        let rt = self.apply(s.r_tilde());
        for (yi, r) in y.iter_mut().zip(&rt) {
            *yi += *r;
        }
        let cols = s.c().cols();
        if cols == 0 {
            return y;
        }
        // C⁻¹·C_s on the free rows: Cᵀ·C_s ± η·(column sums of |C_s|)
        let cs = s.c();
        let cs_t = Matrix::from_fn(cols, free, |j, i| cs.get(i, j));
        let col_mag: Vec<f64> = (0..cols).map(|j| cs_t.row(j).iter().fold(0.0, |acc, v| add_up(acc, v.abs()))).collect();
        for i in 0..free {
            let row = self.ct.row(i);
            let mut acc = Interval::ZERO;
            for j in 0..cols {
                let r0 = s.r0()[j];
                if r0 == Interval::ZERO {
                    continue;
                }
                let e = dot_enclosure(row, cs_t.row(j)) + Interval::symmetric(mul_up(self.eta, col_mag[j]));
                acc += e * r0;
            }
            y[i] += acc;
        }
        for (i, yi) in y.iter_mut().enumerate().take(m).skip(free) {
            *yi += crate::interval::matrix::point_row_dot(cs.row(i), s.r0());
        }
        y
    }
}

/// Half-widths in frame coordinates: `base·ratio^k` for coefficient order `k`,
/// `remainder` for remainders and zero for the section normal.
pub fn radii_law(params: &PnParams, base: f64, ratio: f64, remainder: f64) -> Vec<f64> {
    let mut r = vec![0.0; params.m()];
    for i in 1..=params.p() {
        for k in 0..=params.n() {
            r[params.pos(i, k)] = base * ratio.powi(k as i32);
        }
        r[params.rem_pos(i)] = remainder;
    }
    // coordinate 0 spans the normal; a set on the section has no extent there
    r[0] = 0.0;
    r
}

/// `x̄₀ + C·[-r, r]` with `r̃ = 0`.
pub fn build_candidate(frame: &Frame, anchor: &[f64], radii: &[f64]) -> Result<DoubletonSet> {
    let r0: IVector = radii.iter().map(|&r| Interval::symmetric(r)).collect();
    build_candidate_box(frame, anchor, r0)
}

pub fn build_candidate_box(frame: &Frame, anchor: &[f64], r0: IVector) -> Result<DoubletonSet> {
    let m = frame.params.m();
    if r0[0] != Interval::ZERO {
        return Err(Error::Config("the normal coordinate of a candidate set must be exactly zero".into()));
    }
    DoubletonSet::new(&frame.params, anchor.to_vec(), frame.c.clone(), r0, vec![Interval::ZERO; m])
}

/// Outcome of comparing an image with its candidate set in frame coordinates.
#[derive(Clone, Debug)]
pub struct Inclusion {
    /// Image in frame coordinates.
    pub image: IVector,
    /// Per coordinate `min(lo - r.lo, r.hi - hi)`; positive means strictly inside.
    pub margins: Vec<f64>,
    pub holds: bool,
    pub worst: usize,
}

/// Strict inclusion test of frame coordinates `1..m` (coordinate 0 is the
/// normal, fixed by the section).
pub fn compare_in_frame(image: IVector, r0: &[Interval]) -> Inclusion {
    let mut margins = vec![f64::INFINITY; image.len()];
    let mut worst = 1.min(image.len().saturating_sub(1));
    let mut holds = true;
    for j in 1..image.len() {
        let (y, r) = (image[j], r0[j]);
        let inside = y.subset_interior(r);
        margins[j] = sub_down(y.lo(), r.lo()).min(sub_down(r.hi(), y.hi()));
        if !inside {
            holds = false;
            if margins[j] <= 0.0 && !(margins[worst] < margins[j]) || margins[j] < margins[worst] {
                worst = j;
            }
        } else if holds && margins[j] < margins[worst] {
            worst = j;
        }
    }
    Inclusion { image, margins, holds, worst }
}

#[derive(Clone, Debug)]
pub struct ShrinkOutcome {
    pub r0: IVector,
    pub iterations: usize,
    pub last: Inclusion,
}

/// `V_{i+1} = P(V_i) ∩ V_i` in frame coordinates until `P(V_i) ⊂ int V_i`.
/// `map` returns the image of a candidate in frame coordinates.
pub fn shrink_to_invariant(
    r0: IVector,
    max_iters: usize,
    mut map: impl FnMut(&IVector) -> Result<IVector>,
) -> Result<ShrinkOutcome> {
    let mut r = r0;
    for it in 0..=max_iters {
        let img = map(&r)?;
        let inc = compare_in_frame(img, &r);
        log::info!("shrink iteration {it}: inclusion {}, worst coordinate {} margin {:e}", inc.holds, inc.worst, inc.margins[inc.worst]);
        if inc.holds {
            return Ok(ShrinkOutcome { r0: r, iterations: it, last: inc });
        }
        if it == max_iters {
            break;
        }
        let mut next = r.clone();
        for j in 1..r.len() {
            next[j] = match inc.image[j].intersect(r[j]) {
                Ok(v) => v,
                Err(_) => return Err(Error::NoInvariance(it + 1)),
            };
        }
        r = next;
    }
    Err(Error::NoInvariance(max_iters))
}

/// Grows a symmetric candidate until it covers its own image:
/// `r_{i+1} = max(r_i, factor·|P(r_i)|)` per coordinate. The anchor is not
/// an exact fixed point of the rigorous map (the point model drops the
/// remainders), so the offset of the image must be absorbed by the radii.
pub fn fit_radii(
    r0: IVector,
    factor: f64,
    max_iters: usize,
    mut map: impl FnMut(&IVector) -> Result<IVector>,
) -> Result<ShrinkOutcome> {
    let mut r = r0;
    for it in 0..=max_iters {
        let img = map(&r)?;
        let inc = compare_in_frame(img, &r);
        log::info!("fit iteration {it}: inclusion {}, worst coordinate {} margin {:e}", inc.holds, inc.worst, inc.margins[inc.worst]);
        if inc.holds {
            return Ok(ShrinkOutcome { r0: r, iterations: it, last: inc });
        }
        for j in 1..r.len() {
            let want = mul_up(factor, inc.image[j].mag());
            if want > r[j].mag() || !inc.image[j].subset_interior(r[j]) {
                r[j] = Interval::symmetric(want.max(r[j].mag()));
            }
        }
    }
    Err(Error::NoInvariance(max_iters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taylor::mg_rhs;

    fn pt(x: f64) -> Interval {
        Interval::point(x)
    }

    #[test]
    fn simulate_linear_delay() {
        let pr = PnParams::new(4, 3, pt(1.0)).unwrap();
        let f = RhsSpec::parse("z1", &[]).unwrap();
        let flow = PointFlow::new(&f, &pr);
        let x = flow.constant(1.0);
        assert_eq!(flow.simulate(&x, 0.0).unwrap(), x);
        let y = flow.simulate(&x, 1.0).unwrap();
        for i in 1..=pr.p() {
            let t = 1.0 - i as f64 * 0.25;
            assert!((y[pr.pos(i, 0)] - (1.0 + t)).abs() < 1e-15);
        }
        assert!((y[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mackey_glass_attractor_range() {
        let pr = PnParams::new(16, 3, pt(2.0)).unwrap();
        let f = mg_rhs(pt(2.0), pt(1.0), 6);
        let flow = PointFlow::new(&f, &pr);
        let mut x = flow.simulate(&flow.constant(1.1), 100.0).unwrap();
        let (mut lo, mut hi) = (f64::MAX, f64::MIN);
        for _ in 0..400 {
            x = flow.step(&x).unwrap();
            lo = lo.min(x[0]);
            hi = hi.max(x[0]);
        }
        assert!(lo > 0.65 && lo < 0.8 && hi > 1.15 && hi < 1.3, "range [{lo}, {hi}]");
    }

    #[test]
    fn frame_examples() {
        let pr = PnParams::new(2, 1, pt(1.0)).unwrap();
        let m = pr.m();
        let mut e1 = vec![0.0; m];
        e1[0] = 1.0;
        let fr = build_frame(&pr, &e1).unwrap();
        assert_eq!(fr.c(), &Matrix::identity(m));
        let mut l = vec![0.0; m];
        l[0] = 1.0;
        l[1] = 1.0;
        let fr = build_frame(&pr, &l).unwrap();
        let s = 0.5f64.sqrt();
        assert!((fr.c().get(0, 0) - s).abs() < 1e-15 && (fr.c().get(1, 0) - s).abs() < 1e-15);
        let ctc = fr.c().transpose().mul_enclose(fr.c()).unwrap();
        for i in 0..m {
            for j in 0..m {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ctc.get(i, j).mid() - want).abs() < 1e-12);
            }
        }
        assert!(matches!(build_frame(&pr, &vec![0.0; m]), Err(Error::DegenerateNormal)));
        let inv = FrameInverse::new(&fr).unwrap();
        assert!(inv.eta() < 1e-14);
    }

    #[test]
    fn frame_inverse_encloses_true_inverse() {
        let pr = PnParams::new(3, 2, pt(1.0)).unwrap();
        let m = pr.m();
        let mut l = vec![0.0; m];
        for (j, v) in l.iter_mut().enumerate().take(pr.first_rem_pos()) {
            *v = ((j * 7 % 5) as f64 - 1.7) / 3.0;
        }
        let fr = build_frame(&pr, &l).unwrap();
        let inv = FrameInverse::new(&fr).unwrap();
        // C·(C⁻¹ v) must reproduce v: check on unit vectors through the enclosure
        for j in 0..m {
            let mut e = vec![Interval::ZERO; m];
            e[j] = Interval::ONE;
            let y = inv.apply(&e);
            let back = fr.c().mul_ivec(&y).unwrap();
            for (i, b) in back.iter().enumerate() {
                assert!(b.contains(if i == j { 1.0 } else { 0.0 }), "({i},{j}) {b:?}");
            }
        }
    }

    #[test]
    fn left_eigvec_diagonal() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]);
        let (v, lambda, moduli, res) = left_unit_eigvec(&m).unwrap();
        assert!((lambda - 1.0).abs() < 1e-12 && res < 1e-8);
        assert!(v[1].abs() < 1e-8 && v[0].abs() > 0.99);
        assert!((moduli[0] - 0.5).abs() < 1e-12);
        let far = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.5]);
        assert!(matches!(left_unit_eigvec(&far), Err(Error::Eigenvalue1Missing(_))));
    }

    #[test]
    fn radii_and_candidate() {
        let pr = PnParams::new(2, 2, pt(2.0)).unwrap();
        let r = radii_law(&pr, 1e-4, 0.1, 1e-2);
        assert_eq!(r[0], 0.0);
        assert_eq!(r[pr.pos(2, 2)], 1e-4 * 0.1 * 0.1);
        assert_eq!(r[pr.rem_pos(1)], 1e-2);
        let mut l = vec![0.0; pr.m()];
        l[0] = 1.0;
        l[3] = 0.5;
        let fr = build_frame(&pr, &l).unwrap();
        let anchor: Vec<f64> = (0..pr.m()).map(|i| if i < pr.first_rem_pos() { 1.0 + i as f64 * 0.1 } else { 0.0 }).collect();
        let v = build_candidate(&fr, &anchor, &vec![0.0; pr.m()]).unwrap();
        assert_eq!(v.hull().mid(), anchor);
        let v = build_candidate(&fr, &anchor, &r).unwrap();
        let sec = FrameInverse::new(&fr).unwrap().section(&anchor).unwrap();
        assert!(sec.eval_set(&v).contains(0.0));
        assert!(sec.eval_set(&v).diam() < 1e-12);
    }

    #[test]
    fn shrink_examples() {
        let r0 = vec![Interval::ZERO, Interval::symmetric(1.0), Interval::symmetric(1.0)];
        let out = shrink_to_invariant(r0.clone(), 20, |r| Ok(r.iter().map(|v| v.div_f64(2.0).unwrap()).collect())).unwrap();
        assert_eq!(out.iterations, 0);
        let moved = shrink_to_invariant(r0, 20, |_| Ok(vec![Interval::ZERO, Interval::point(5.0), Interval::ZERO]));
        assert!(matches!(moved, Err(Error::NoInvariance(_))));
    }
}
