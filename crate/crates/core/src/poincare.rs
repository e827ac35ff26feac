//! (p,n)-sections and the Poincaré map with return time at least `(n+1)τ`.

use crate::error::{Error, Result};
use crate::integrator::{epsilon_step, step, StepDecomposition};
use crate::interval::{format_hex, parse_hex, Interval, IVector};
use crate::lohner::DoubletonSet;
use crate::pnrep::{derivative_bound, PnParams, PnVector};
use crate::taylor::RhsSpec;
use std::fmt::Write as _;
use std::path::Path;

/// The affine functional `s(x) = Σ l_{i,k} x^[k](-i·h) - a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    params: PnParams,
    /// `(position, weight)` pairs, increasing positions, no remainder positions.
    weights: Vec<(usize, Interval)>,
    offset: Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Neg,
    Pos,
    Unknown,
}

impl Sign {
    pub fn of(s: Interval) -> Sign {
        if s.hi() < 0.0 {
            Sign::Neg
        } else if s.lo() > 0.0 {
            Sign::Pos
        } else {
            Sign::Unknown
        }
    }
}

impl Section {
    pub fn new(params: &PnParams, weights: Vec<(usize, Interval)>, offset: Interval) -> Result<Section> {
        let mut weights: Vec<(usize, Interval)> = weights.into_iter().filter(|w| w.1 != Interval::ZERO).collect();
        weights.sort_by_key(|w| w.0);
        if weights.is_empty() {
            return Err(Error::DegenerateNormal);
        }
        for w in weights.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Config(format!("section weight at position {} given twice", w[0].0)));
            }
        }
        for &(pos, _) in &weights {
            if pos >= params.m() || params.is_remainder_pos(pos) {
                return Err(Error::IndexOutOfRange(format!("section weight at position {pos} (remainders excluded)")));
            }
        }
        Ok(Section { params: params.clone(), weights, offset })
    }

    /// `x(0) - c`.
    pub fn value(params: &PnParams, c: Interval) -> Section {
        Section { params: params.clone(), weights: vec![(0, Interval::ONE)], offset: c }
    }

    /// Section from a dense weight vector; remainder entries must vanish.
    pub fn from_dense(params: &PnParams, l: &[Interval], offset: Interval) -> Result<Section> {
        Section::new(params, l.iter().copied().enumerate().collect(), offset)
    }

    pub fn params(&self) -> &PnParams {
        &self.params
    }

    pub fn weights(&self) -> &[(usize, Interval)] {
        &self.weights
    }

    pub fn offset(&self) -> Interval {
        self.offset
    }

    pub fn dense_weights(&self) -> IVector {
        let mut l = vec![Interval::ZERO; self.params.m()];
        for &(j, w) in &self.weights {
            l[j] = w;
        }
        l
    }

    /// Enclosure of `s` over a box.
    pub fn eval_box(&self, x: &PnVector) -> Interval {
        let d = x.data();
        self.weights.iter().fold(Interval::ZERO, |acc, &(j, w)| acc + w * d[j]) - self.offset
    }

    /// Enclosure of `s` over a doubleton set, without passing through its hull.
    pub fn eval_set(&self, s: &DoubletonSet) -> Interval {
        s.linear_form(&self.dense_weights()) - self.offset
    }

    /// Enclosure of `l(ẋ)` over all smooth members of the box `x`.
    pub fn derivative_along(&self, x: &PnVector) -> Result<Interval> {
        let d = derivative_bound(x)?;
        let pr = &self.params;
        let mut acc = Interval::ZERO;
        for &(j, w) in &self.weights {
            let g = pr.grid_index(j + 1)?;
            let v = if g.i == 0 { d.value0() } else { d.get(g.i, g.k) };
            acc += w * v;
        }
        Ok(acc)
    }

    /// Header `p n tau_lo tau_hi`, lines `i k lo hi` and one `offset lo hi`.
    pub fn to_text(&self) -> String {
        let pr = &self.params;
        let mut s = format!("{} {} {} {}\n", pr.p(), pr.n(), format_hex(pr.tau().lo()), format_hex(pr.tau().hi()));
        for &(j, w) in &self.weights {
            let g = pr.grid_index(j + 1).expect("weights are in range");
            writeln!(s, "{} {} {} {}", g.i, g.k, format_hex(w.lo()), format_hex(w.hi())).expect("string write");
        }
        writeln!(s, "offset {} {}", format_hex(self.offset.lo()), format_hex(self.offset.hi())).expect("string write");
        s
    }

    pub fn from_text(text: &str) -> Result<Section> {
        let bad = |what: &str| Error::ParseError(format!("section file: {what}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
        if header.len() != 4 {
            return Err(bad("header must be `p n tau_lo tau_hi`"));
        }
        let p: usize = header[0].parse().map_err(|_| bad("p"))?;
        let n: usize = header[1].parse().map_err(|_| bad("n"))?;
        let tau = Interval::try_new(parse_hex(header[2])?, parse_hex(header[3])?)?;
        let params = PnParams::new(p, n, tau)?;
        let mut weights = Vec::new();
        let mut offset = None;
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() == 3 && f[0] == "offset" {
                offset = Some(Interval::try_new(parse_hex(f[1])?, parse_hex(f[2])?)?);
                continue;
            }
            if f.len() != 4 {
                return Err(bad(&format!("malformed line {line:?}")));
            }
            let i: usize = f[0].parse().map_err(|_| bad("i"))?;
            let k: usize = f[1].parse().map_err(|_| bad("k"))?;
            let pos = params.index(crate::pnrep::GridIndex { i, k })? - 1;
            weights.push((pos, Interval::try_new(parse_hex(f[2])?, parse_hex(f[3])?)?));
        }
        Section::new(&params, weights, offset.ok_or_else(|| bad("missing offset line"))?)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Section> {
        Section::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Lower bound of `l(ẋ)` over the boxes; fails unless it is positive.
pub fn check_transversality(sec: &Section, sets: &[PnVector]) -> Result<Interval> {
    let mut hull: Option<Interval> = None;
    for x in sets {
        let v = sec.derivative_along(x)?;
        hull = Some(hull.map_or(v, |h| h.hull(v)));
    }
    let v = hull.ok_or_else(|| Error::NoCrossing("no sets to check transversality on".into()))?;
    if v.lo() > 0.0 {
        Ok(v)
    } else {
        Err(Error::TransversalityFailure(v.lo()))
    }
}

#[derive(Clone, Debug)]
pub struct PoincareResult {
    /// Full steps before the crossing.
    pub q: usize,
    /// `[ε1, ε2]`: `s < 0` at `q·h + ε1` and `s > 0` at `q·h + ε2`.
    pub eps: Interval,
    /// Return time `q·h + eps`.
    pub t_s: Interval,
    /// `I_eps(X_q)`, containing the image of every member.
    pub image: DoubletonSet,
    /// Enclosure of `l(ẋ)` over the image; its lower end is positive.
    pub transversality: Interval,
    /// Bisection history of `eps`, outermost first.
    pub bracket_history: Vec<Interval>,
}

#[derive(Clone, Debug)]
pub struct PoincareOptions {
    /// Which upward crossing is used.
    pub min_return: usize,
    /// Count only crossings that start at or after `(n+1)τ` instead of
    /// counting from time 0.
    pub count_after_omega: bool,
    pub max_steps: usize,
    pub max_bisections: usize,
    /// Stop when the unresolved gap falls below this fraction of the bracket.
    pub rel_gap: f64,
}

impl PoincareOptions {
    pub fn new(min_return: usize, params: &PnParams) -> PoincareOptions {
        PoincareOptions { min_return, count_after_omega: false, max_steps: 8 * params.regularity_steps() + 16 * params.p(), max_bisections: 60, rel_gap: 1e-4 }
    }
}

/// The Poincaré map; calls `observe(k, X_k)` for every full step taken,
/// including `k = 0`.
pub fn poincare_map_observed(
    x0: &DoubletonSet,
    sec: &Section,
    f: &RhsSpec,
    opts: &PoincareOptions,
    mut observe: impl FnMut(usize, &DoubletonSet),
) -> Result<PoincareResult> {
    let pr = x0.params().clone();
    let h = pr.h();
    let mut crossings = 0usize;
    let mut last_neg: Option<usize> = None;
    let mut cur = x0.clone();
    let mut prev: Option<(DoubletonSet, StepDecomposition)> = None;
    observe(0, &cur);
    for k in 0..=opts.max_steps {
        match Sign::of(sec.eval_set(&cur)) {
            Sign::Neg => last_neg = Some(k),
            Sign::Pos => {
                let counted = last_neg.take().filter(|&kn| !opts.count_after_omega || kn >= pr.regularity_steps());
                if let Some(kn) = counted {
                    crossings += 1;
                    if crossings == opts.min_return {
                        if k - kn != 1 {
                            return Err(Error::NoCrossing(format!("crossing not resolved to one step: sign unknown on steps {}..{}", kn + 1, k)));
                        }
                        let q = kn;
                        if q < pr.regularity_steps() {
                            return Err(Error::RegularityGateViolated { q, min_steps: pr.regularity_steps() });
                        }
                        let (xq, data) = prev.take().expect("a step was taken");
                        return finish(&xq, &data, sec, q, h, opts);
                    }
                }
            }
            Sign::Unknown => {}
        }
        if k == opts.max_steps {
            break;
        }
        let (next, data) = step(&cur, f).map_err(|e| e.at("integration"))?;
        prev = Some((cur, data));
        cur = next;
        observe(k + 1, &cur);
    }
    Err(Error::NoCrossing(format!("{crossings} of {} crossings within {} steps", opts.min_return, opts.max_steps)))
}

pub fn poincare_map(x0: &DoubletonSet, sec: &Section, f: &RhsSpec, opts: &PoincareOptions) -> Result<PoincareResult> {
    poincare_map_observed(x0, sec, f, opts, |_, _| {})
}

fn sign_at(xq: &DoubletonSet, data: &StepDecomposition, sec: &Section, eps: f64) -> Result<Sign> {
    Ok(Sign::of(sec.eval_set(&epsilon_step(xq, data, Interval::point(eps))?)))
}

/// Shrinks `[0, h]` to `[ε1, ε2]` and builds the image and transversality bound.
fn finish(xq: &DoubletonSet, data: &StepDecomposition, sec: &Section, q: usize, h: Interval, opts: &PoincareOptions) -> Result<PoincareResult> {
    let (mut e1, mut e2) = (0.0, h.lo());
    let mut history = vec![Interval::new(e1, e2)];
    // largest ε1 with s < 0: invariant sign(lo) = Neg, sign(hi) ≠ Neg
    let (mut lo, mut hi) = (e1, e2);
    for _ in 0..opts.max_bisections {
        if hi - lo <= opts.rel_gap * (e2 - lo) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if sign_at(xq, data, sec, mid)? == Sign::Neg {
            lo = mid;
            e1 = mid;
            history.push(Interval::new(e1, e2));
        } else {
            hi = mid;
        }
    }
    // smallest ε2 with s > 0: invariant sign(lo) ≠ Pos, sign(hi) = Pos
    let (mut lo, mut hi) = (hi, e2);
    for _ in 0..opts.max_bisections {
        if hi - lo <= opts.rel_gap * (hi - e1) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if sign_at(xq, data, sec, mid)? == Sign::Pos {
            hi = mid;
            e2 = mid;
            history.push(Interval::new(e1, e2));
        } else {
            lo = mid;
        }
    }
    let eps = Interval::new(e1, e2);
    let image = epsilon_step(xq, data, eps).map_err(|e| e.at("partial step"))?;
    let transversality = check_transversality(sec, &[image.hull()])?;
    let t_s = h * Interval::from_int(q as i64) + eps;
    Ok(PoincareResult { q, eps, t_s, image, transversality, bracket_history: history })
}

/// Recomputes the sign conditions at both ends of a result from `x0`.
pub fn verify_bracket(x0: &DoubletonSet, sec: &Section, f: &RhsSpec, res: &PoincareResult) -> Result<bool> {
    let mut cur = x0.clone();
    for _ in 0..res.q {
        cur = step(&cur, f)?.0;
    }
    let (_, data) = step(&cur, f)?;
    let lo = if res.eps.lo() == 0.0 {
        Sign::of(sec.eval_set(&cur))
    } else {
        sign_at(&cur, &data, sec, res.eps.lo())?
    };
    let hi = sign_at(&cur, &data, sec, res.eps.hi())?;
    Ok(lo == Sign::Neg && hi == Sign::Pos)
}
