//! One integration step `I_h` on (p,n)-representations and the partial
//! step `I_ε`, on boxes and on doubleton sets.

use crate::error::{Error, Result};
use crate::interval::{IMatrix, IVector, Interval};
use crate::lohner::{d_phi, propagate, BlockMatrix, DoubletonSet, LinearPart, RowKind};
use crate::pnrep::{binomial, PnParams, PnVector};
use crate::taylor::{advance_slices, rhs_jet_slices, RhsSpec};

pub const MAX_ROUGH_ATTEMPTS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoughEnclosureResult {
    /// Encloses `x([0, h])`.
    pub z: Interval,
    /// The candidate that validated `z`; `z ⊂ int(y)`.
    pub y: Interval,
    pub attempts: usize,
}

/// `[0, h]` for an interval step.
fn zero_to(h: Interval) -> Interval {
    Interval::new(0.0, h.hi())
}

/// Finds `Y` with `x(0) + [0,h]·f(slab, Y) ⊂ int(Y)`, where the slab is
/// the delayed value over cell `p`.
pub fn rough_enclosure(x: &PnVector, f: &RhsSpec, h: Interval) -> Result<RoughEnclosureResult> {
    let x0 = x.value0();
    let t = zero_to(h);
    let slab = x.eval_ck(x.params().p(), 0, t);
    let z0 = x0 + t * f.eval(&slab, &x0)?;
    rough_enclosure_from(x0, slab, f, t, z0.widen(1.5, 1e-15), MAX_ROUGH_ATTEMPTS)
}

/// Guess-and-check loop from an explicit first candidate.
pub fn rough_enclosure_from(
    x0: Interval,
    slab: Interval,
    f: &RhsSpec,
    t: Interval,
    mut y: Interval,
    max_attempts: usize,
) -> Result<RoughEnclosureResult> {
    for attempt in 1..=max_attempts {
        // a division by an interval containing zero is just a failed candidate
        let z = f.eval(&slab, &y).ok().map(|fy| x0 + t * fy);
        match z {
            Some(z) if z.subset_interior(y) => return Ok(RoughEnclosureResult { z, y, attempts: attempt }),
            Some(z) if z.lo().is_finite() && z.hi().is_finite() => y = y.hull(z).widen(2.0, 1e-15),
            _ => y = y.widen(2.0, 1e-15),
        }
        if !(y.lo().is_finite() && y.hi().is_finite()) {
            return Err(Error::EnclosureFailure { attempts: attempt, y_lo: y.lo(), y_hi: y.hi() });
        }
    }
    Err(Error::EnclosureFailure { attempts: max_attempts, y_lo: y.lo(), y_hi: y.hi() })
}

/// Node-1 coefficients `x_h{1,0..=n}` of the stepped representation.
pub fn forward_coeffs(x: &PnVector, f: &RhsSpec) -> Result<IVector> {
    let pr = x.params();
    advance_slices(f, x.node(pr.p()), x.value0(), pr.n())
}

/// Enclosure of `x^[n+1]` over the new cell: `a* + b*·[0,h]`.
pub fn forward_remainder(x: &PnVector, coeffs: &[Interval], z: Interval, f: &RhsSpec) -> Result<Interval> {
    let pr = x.params();
    let n = pr.n();
    let a_star = rhs_jet_slices(f, x.node(pr.p()), coeffs, n)?[n].try_div(Interval::from_int(n as i64 + 1))?;
    let t = zero_to(pr.h());
    let c: IVector = (0..=n + 1).map(|k| x.eval_ck(pr.p(), k, t)).collect();
    let d = advance_slices(f, &c, z, n + 1)?;
    let b_star = rhs_jet_slices(f, &c, &d, n + 1)?[n + 1];
    Ok(a_star + b_star * t)
}

/// `Σ_{k≤n} c_k h^k + rem·h^{n+1}`.
pub fn forward_value(coeffs: &[Interval], rem: Interval, h: Interval) -> Interval {
    let mut acc = rem;
    for &c in coeffs.iter().rev() {
        acc = acc * h + c;
    }
    acc
}

/// `I_h` evaluated directly on a box, without any wrapping control.
pub fn step_box(x: &PnVector, f: &RhsSpec) -> Result<PnVector> {
    let pr = x.params();
    let (p, n) = (pr.p(), pr.n());
    let rough = rough_enclosure(x, f, pr.h())?;
    let coeffs = forward_coeffs(x, f)?;
    let rem = forward_remainder(x, &coeffs, rough.z, f)?;
    let mut out = PnVector::zeros(pr);
    let d = out.data_mut();
    d[0] = forward_value(&coeffs, rem, pr.h());
    d[pr.pos(1, 0)..=pr.pos(1, n)].copy_from_slice(&coeffs);
    d[pr.rem_pos(1)] = rem;
    d[pr.pos(1, n) + 1..pr.first_rem_pos()].copy_from_slice(&x.data()[pr.pos(1, 0)..pr.pos(p, 0)]);
    for i in 2..=p {
        d[pr.rem_pos(i)] = x.remainder(i - 1);
    }
    Ok(out)
}

/// Data of one doubleton step that the partial step at the same set reuses.
#[derive(Clone, Debug)]
pub struct StepDecomposition {
    /// Head block of `DΦ` on the hull.
    pub jac: BlockMatrix,
    /// `φ{1,0..=n}` at the centre of the set.
    pub phi_mid: IVector,
    /// `φ{1,0..=n}` over the hull.
    pub phi_hull: IVector,
    /// New remainder `x_h{1,n+1}`.
    pub rem: Interval,
    pub rough: RoughEnclosureResult,
}

/// Positions whose hull a step needs: the value, node `p`, all remainders.
fn step_rows(pr: &PnParams) -> impl Iterator<Item = usize> + '_ {
    std::iter::once(0).chain(pr.pos(pr.p(), 0)..=pr.pos(pr.p(), pr.n())).chain(pr.first_rem_pos()..pr.m())
}

/// `I_h` on a doubleton set, split as `Φ + R` and propagated by Lohner's method.
pub fn step(s: &DoubletonSet, f: &RhsSpec) -> Result<(DoubletonSet, StepDecomposition)> {
    let pr = s.params().clone();
    let (p, n) = (pr.p(), pr.n());
    let h = pr.h();
    let hull = s.hull_rows(step_rows(&pr));
    let rough = rough_enclosure(&hull, f, h)?;
    let (jac, phi_hull) = d_phi(&hull, f)?;
    let rem = forward_remainder(&hull, &phi_hull, rough.z, f)?;

    let centre: IVector = s.x().iter().map(|&v| Interval::point(v)).collect();
    let centre_pn = PnVector::from_data(&pr, centre.clone())?;
    let phi_mid = forward_coeffs(&centre_pn, f)?;

    let m = pr.m();
    let mut phi = vec![Interval::ZERO; m];
    phi[0] = forward_value(&phi_mid, Interval::ZERO, h);
    phi[pr.pos(1, 0)..=pr.pos(1, n)].copy_from_slice(&phi_mid);
    phi[pr.pos(1, n) + 1..pr.first_rem_pos()].copy_from_slice(&centre[1..pr.pos(p, 0)]);

    let mut r = vec![Interval::ZERO; m];
    r[0] = rem * h.powi(n as u32 + 1);
    r[pr.rem_pos(1)] = rem;
    for i in 2..=p {
        r[pr.rem_pos(i)] = hull.remainder(i - 1);
    }
    let next = propagate(s, &jac, &phi, &r)?;
    Ok((next, StepDecomposition { jac, phi_mid, phi_hull, rem, rough }))
}

/// Rejects `eps ⊄ [0, h]`.
fn check_eps(eps: Interval, h: Interval) -> Result<()> {
    if eps.lo() < 0.0 || eps.hi() > h.lo() {
        return Err(Error::EpsilonOutOfRange(eps.lo(), eps.hi()));
    }
    Ok(())
}

/// Linear part of `I_ε`: row 0 is `Σ_k ε^k ∂φ{1,k}`, node rows are the
/// Taylor shift `Σ_{l≥k} C(l,k) ε^{l-k} x{i,l}`, remainder rows vanish.
struct EpsOperator {
    params: PnParams,
    head: Vec<(usize, Interval)>,
    /// Per node row `(i,k)` in storage order.
    rows: Vec<Vec<(usize, Interval)>>,
}

impl EpsOperator {
    fn new(pr: &PnParams, jac: &BlockMatrix, eps: Interval) -> EpsOperator {
        let n = pr.n();
        let jh: &IMatrix = jac.head();
        let pows: Vec<Interval> = (0..=n + 1).map(|k| eps.powi(k as u32)).collect();
        let mut head = Vec::with_capacity(n + 2);
        for c in 0..n + 2 {
            let col = if c == 0 { 0 } else { pr.pos(pr.p(), c - 1) };
            let v = (0..=n).fold(Interval::ZERO, |acc, k| acc + pows[k] * jh.get(1 + k, c));
            head.push((col, v));
        }
        head.sort_by_key(|e| e.0);
        let mut rows = Vec::with_capacity(pr.p() * (n + 1));
        for i in 1..=pr.p() {
            for k in 0..=n {
                rows.push((k..=n).map(|l| (pr.pos(i, l), pows[l - k] * Interval::point(binomial(l, k)))).collect());
            }
        }
        EpsOperator { params: pr.clone(), head, rows }
    }
}

impl LinearPart for EpsOperator {
    fn dim(&self) -> usize {
        self.params.m()
    }

    fn row(&self, i: usize) -> RowKind<'_> {
        if i == 0 {
            RowKind::Sparse(&self.head)
        } else if i < self.params.first_rem_pos() {
            RowKind::Sparse(&self.rows[i - 1])
        } else {
            RowKind::Zero
        }
    }
}

/// `I_ε` on the set `s` from which `data`'s step was taken, for all `ε ∈ eps`.
/// The caller guarantees enough prior steps for the solutions to be smooth.
pub fn epsilon_step(s: &DoubletonSet, data: &StepDecomposition, eps: Interval) -> Result<DoubletonSet> {
    let pr = s.params().clone();
    let (p, n) = (pr.p(), pr.n());
    check_eps(eps, pr.h())?;
    let hull = s.hull_rows(pr.first_rem_pos()..pr.m());
    let op = EpsOperator::new(&pr, &data.jac, eps);
    let m = pr.m();
    let centre: IVector = s.x().iter().map(|&v| Interval::point(v)).collect();
    let mut phi = vec![Interval::ZERO; m];
    let mut r = vec![Interval::ZERO; m];
    phi[0] = forward_value(&data.phi_mid, Interval::ZERO, eps);
    r[0] = data.rem * eps.powi(n as u32 + 1);
    for i in 1..=p {
        let rem_i = hull.remainder(i);
        for k in 0..=n {
            let pos = pr.pos(i, k);
            phi[pos] = op.rows[pos - 1].iter().fold(Interval::ZERO, |acc, &(j, a)| acc + a * centre[j]);
            r[pos] = eps.powi((n + 1 - k) as u32) * Interval::point(binomial(n + 1, k)) * rem_i;
        }
        let newer = if i == 1 { data.rem } else { hull.remainder(i - 1) };
        r[pr.rem_pos(i)] = rem_i.hull(newer);
    }
    propagate(s, &op, &phi, &r)
}

/// `I_ε` on a box, evaluated directly.
pub fn epsilon_step_box(x: &PnVector, f: &RhsSpec, eps: Interval) -> Result<PnVector> {
    let pr = x.params();
    let (p, n) = (pr.p(), pr.n());
    check_eps(eps, pr.h())?;
    let rough = rough_enclosure(x, f, pr.h())?;
    let coeffs = forward_coeffs(x, f)?;
    let rem = forward_remainder(x, &coeffs, rough.z, f)?;
    let mut out = PnVector::zeros(pr);
    let d = out.data_mut();
    d[0] = forward_value(&coeffs, rem, eps);
    for i in 1..=p {
        for k in 0..=n {
            d[pr.pos(i, k)] = x.eval_ck(i, k, eps);
        }
        let newer = if i == 1 { rem } else { x.remainder(i - 1) };
        d[pr.rem_pos(i)] = x.remainder(i).hull(newer);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taylor::mg_rhs;

    fn pt(x: f64) -> Interval {
        Interval::point(x)
    }

    fn constant(pr: &PnParams, c: f64) -> PnVector {
        let mut x = PnVector::zeros(pr);
        x.data_mut()[0] = pt(c);
        for i in 1..=pr.p() {
            x.set(i, 0, pt(c));
        }
        x
    }

    fn mg() -> RhsSpec {
        mg_rhs(pt(2.0), pt(1.0), 6)
    }

    #[test]
    fn rough_enclosure_linear_delay() {
        let pr = PnParams::new(1, 2, pt(1.0)).unwrap();
        let x = constant(&pr, 1.0);
        let f = RhsSpec::parse("z1", &[]).unwrap();
        let r = rough_enclosure_from(pt(1.0), pt(1.0), &f, Interval::new(0.0, 0.5), Interval::new(0.9, 2.1), 30).unwrap();
        assert_eq!(r.z, Interval::new(1.0, 1.5));
        assert_eq!(r.attempts, 1);
        let r = rough_enclosure(&x, &f, pt(0.5)).unwrap();
        assert!(r.z.contains(1.0) && r.z.contains(1.5) && r.z.subset_interior(r.y));
    }

    #[test]
    fn rough_enclosure_equilibrium_and_blowup() {
        let pr = PnParams::new(4, 2, pt(2.0)).unwrap();
        let r = rough_enclosure(&constant(&pr, 1.0), &mg(), pr.h()).unwrap();
        assert!(r.z.contains(1.0) && r.attempts == 1 && r.y.diam() < 1e-10);
        let pr = PnParams::new(1, 1, pt(1.0)).unwrap();
        let f = RhsSpec::parse("z2^2", &[]).unwrap();
        let e = rough_enclosure(&constant(&pr, 1e6), &f, pt(1.0));
        assert!(matches!(e, Err(Error::EnclosureFailure { .. })), "{e:?}");
    }

    #[test]
    fn forward_coefficient_examples() {
        let pr = PnParams::new(2, 4, pt(1.0)).unwrap();
        let lin = RhsSpec::parse("z1", &[]).unwrap();
        let c = forward_coeffs(&constant(&pr, 1.0), &lin).unwrap();
        assert_eq!(c, vec![pt(1.0), pt(1.0), pt(0.0), pt(0.0), pt(0.0)]);
        let c = forward_coeffs(&constant(&pr, 1.0), &mg()).unwrap();
        assert!(c[0] == pt(1.0) && c[1..].iter().all(|v| v.contains(0.0) && v.diam() < 1e-15));
        let exp = RhsSpec::parse("z2", &[]).unwrap();
        let c = forward_coeffs(&constant(&pr, 1.0), &exp).unwrap();
        for (k, v) in c.iter().enumerate() {
            assert!((v.mid() * crate::pnrep::factorial(k) - 1.0).abs() < 1e-15 && v.diam() < 1e-15, "{k}: {v:?}");
        }
    }

    #[test]
    fn forward_remainder_examples() {
        let pr = PnParams::new(1, 2, pt(1.0)).unwrap();
        let lin = RhsSpec::parse("z1", &[]).unwrap();
        let x = constant(&pr, 1.0);
        let c = forward_coeffs(&x, &lin).unwrap();
        let z = rough_enclosure(&x, &lin, pr.h()).unwrap().z;
        assert_eq!(forward_remainder(&x, &c, z, &lin).unwrap(), Interval::ZERO);

        let pr = PnParams::new(2, 1, pt(1.0)).unwrap();
        let exp = RhsSpec::parse("z2", &[]).unwrap();
        let x = constant(&pr, 1.0);
        let c = forward_coeffs(&x, &exp).unwrap();
        let z = rough_enclosure(&x, &exp, pr.h()).unwrap().z;
        let r = forward_remainder(&x, &c, z, &exp).unwrap();
        // x^[2](ε) = e^ε / 2 on [0, 0.5]
        assert!(r.contains(0.5) && r.hi() >= 0.5f64.exp() / 2.0);
        assert!(r.lo() <= 0.5);

        let pr = PnParams::new(4, 3, pt(2.0)).unwrap();
        let x = constant(&pr, 1.0);
        let c = forward_coeffs(&x, &mg()).unwrap();
        let z = rough_enclosure(&x, &mg(), pr.h()).unwrap().z;
        assert!(forward_remainder(&x, &c, z, &mg()).unwrap().contains(0.0));
    }

    #[test]
    fn forward_value_examples() {
        assert!(forward_value(&[pt(1.0), pt(1.0)], Interval::ZERO, pt(0.5)).contains(1.5));
        assert!(forward_value(&[pt(0.0); 3], Interval::new(-1.0, 1.0), pt(0.5)).contains(0.0));
        // the remainder enters only through h^{n+1}
        let full = forward_value(&[pt(1.0), pt(0.3), pt(0.2)], Interval::new(-1.0, 1.0), pt(0.25));
        let mid = forward_value(&[pt(1.0), pt(0.3), pt(0.2)], Interval::ZERO, pt(0.25));
        assert!(full.diam() - mid.diam() <= 2.0 * 0.25f64.powi(3) + 1e-15);
    }

    #[test]
    fn step_box_method_of_steps() {
        let pr = PnParams::new(2, 2, pt(1.0)).unwrap();
        let lin = RhsSpec::parse("z1", &[]).unwrap();
        let x = constant(&pr, 1.0);
        let y = step_box(&x, &lin).unwrap();
        assert_eq!(y.node(1), &[pt(1.0), pt(1.0), pt(0.0)]);
        assert!(y.value0().contains(1.5));
        assert_eq!(y.node(2), x.node(1));
    }

    #[test]
    fn doubleton_step_method_of_steps_and_shift() {
        let pr = PnParams::new(2, 2, pt(1.0)).unwrap();
        let lin = RhsSpec::parse("z1", &[]).unwrap();
        let mut b = constant(&pr, 1.0);
        b.data_mut()[3] = Interval::new(0.25, 0.5);
        let s = DoubletonSet::from_box(&b);
        let (t, _) = step(&s, &lin).unwrap();
        let (hs, ht) = (s.hull(), t.hull());
        for k in 0..=2 {
            let (a, c) = (ht.get(2, k), hs.get(1, k));
            assert_eq!((a.lo().to_bits(), a.hi().to_bits()), (c.lo().to_bits(), c.hi().to_bits()));
        }
        assert!(ht.get(1, 0).contains(1.0) && ht.get(1, 1).contains(1.0));
        assert!(ht.value0().contains(1.5));
    }

    #[test]
    fn equilibrium_persists() {
        let pr = PnParams::new(8, 3, pt(2.0)).unwrap();
        let mut s = DoubletonSet::from_box(&constant(&pr, 1.0));
        for _ in 0..pr.p() {
            s = step(&s, &mg()).unwrap().0;
        }
        for v in s.hull().data() {
            assert!(v.subset(Interval::new(-1e-10, 1.0 + 1e-10)));
        }
        assert!(s.hull().value0().subset(Interval::new(1.0 - 1e-10, 1.0 + 1e-10)));
    }

    #[test]
    fn epsilon_step_examples() {
        let pr = PnParams::new(2, 2, pt(1.0)).unwrap();
        let lin = RhsSpec::parse("z1", &[]).unwrap();
        let mut x = constant(&pr, 1.0);
        for _ in 0..pr.p() * pr.n() {
            x = step_box(&x, &lin).unwrap();
        }
        let e0 = epsilon_step_box(&x, &lin, Interval::ZERO).unwrap();
        for i in 1..=pr.p() {
            assert_eq!(e0.node(i), x.node(i));
        }
        assert!(matches!(epsilon_step_box(&x, &lin, Interval::new(-0.1, 0.0)), Err(Error::EpsilonOutOfRange(..))));
        let s = DoubletonSet::from_box(&x);
        let (_, data) = step(&s, &lin).unwrap();
        assert!(matches!(epsilon_step(&s, &data, Interval::new(0.0, 0.75)), Err(Error::EpsilonOutOfRange(..))));
        let e = epsilon_step(&s, &data, pt(0.125)).unwrap();
        assert!(e.hull().value0().subset(epsilon_step_box(&x, &lin, pt(0.125)).unwrap().value0().widen(1.0, 1e-12)));
    }
}
