//! Proof driver: configuration, the Fourier approximant, the Schauder
//! inclusion check, norm bounds, reports, and the search pipeline that
//! produces the input files.

use crate::error::{Error, Result};
use crate::interval::{parse_decimal, to_decimal_down, to_decimal_up, Interval, IVector, PI};
use crate::lohner::DoubletonSet;
use crate::pnrep::{ck_sup_bounds, eval_cell, Approximant, CkBounds, PnParams, PnVector};
use crate::poincare::{poincare_map, poincare_map_observed, PoincareOptions, PoincareResult, Section};
use crate::section_finder::{
    build_candidate_box, build_frame, compare_in_frame, fit_radii, monodromy_left_eigvec, newton_refine, radii_law, shrink_to_invariant, FrameInverse,
    Inclusion, PointFlow, ValueReturnMap,
};
use crate::taylor::{mg_rhs, RhsSpec};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// `c + Σ a_j cos(jω(t+φ)) + b_j sin(jω(t+φ))` with `ω = 2π/T`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierApprox {
    pub constant: Interval,
    /// `(j, a_j, b_j)`.
    pub harmonics: Vec<(u32, Interval, Interval)>,
    pub period: Interval,
    pub phase: Interval,
}

impl FourierApprox {
    /// Enclosure of the `d`-th derivative over all `t` in the interval
    /// (and all periods in `period`).
    pub fn eval(&self, t: Interval, d: usize) -> Interval {
        let two_pi = PI * Interval::from_int(2);
        let omega = match two_pi.try_div(self.period) {
            Ok(w) => w,
            Err(_) => return Interval::ENTIRE,
        };
        let s = t + self.phase;
        let mut acc = if d == 0 { self.constant } else { Interval::ZERO };
        for &(j, a, b) in &self.harmonics {
            let w = omega * Interval::from_int(j as i64);
            let th = w * s;
            let (c, sn) = (th.cos(), th.sin());
            let base = match d % 4 {
                0 => a * c + b * sn,
                1 => b * c - a * sn,
                2 => -(a * c + b * sn),
                _ => a * sn - b * c,
            };
            acc += base * w.powi(d as u32);
        }
        acc
    }
}

impl Approximant for FourierApprox {
    fn derivative(&self, t: Interval, j: usize) -> Interval {
        self.eval(t, j)
    }
}

pub fn fourier_eval(fx: &FourierApprox, t: Interval, deriv_order: usize) -> Interval {
    fx.eval(t, deriv_order)
}

/// Declared targets; each yields one PASS/FAIL line.
#[derive(Clone, Debug, Default)]
pub struct Targets {
    pub period: Option<Interval>,
    pub transversality: Option<f64>,
    /// Upper bounds on the C^k distance, indexed by `k`.
    pub ck: Vec<Option<f64>>,
    pub max_seconds: Option<f64>,
}

/// Settings of the search pipeline.
#[derive(Clone, Debug)]
pub struct FindConfig {
    pub seed_value: f64,
    pub t_iter: f64,
    pub radii_base: f64,
    pub radii_ratio: f64,
    pub remainder_radius: f64,
    /// Level of the value section for Newton; defaults to `x̂(0)`.
    pub level: Option<f64>,
    pub shrink_iters: usize,
    /// Upward crossings inspected for the phase match.
    pub phase_candidates: usize,
    /// Growth factor of the radius fit before shrinking; 0 disables it.
    pub fit_factor: f64,
    pub fit_iters: usize,
}

impl Default for FindConfig {
    fn default() -> FindConfig {
        FindConfig {
            seed_value: 1.1,
            t_iter: 200.0,
            radii_base: 1e-4,
            radii_ratio: 0.1,
            remainder_radius: 1e-2,
            level: None,
            shrink_iters: 20,
            phase_candidates: 6,
            fit_factor: 0.0,
            fit_iters: 20,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProofConfig {
    /// Right-hand side over `z1`, `z2`, `beta`, `gamma`; Mackey-Glass when absent.
    pub system: Option<String>,
    pub beta: Interval,
    pub gamma: Interval,
    pub n_exp: u32,
    pub tau: Interval,
    pub p: usize,
    pub n: usize,
    pub min_return: usize,
    /// Count crossings only from `(n+1)τ` on.
    pub count_after_omega: bool,
    pub anchor: PathBuf,
    pub normal: PathBuf,
    pub radii: PathBuf,
    pub section: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub value_csv: Option<PathBuf>,
    pub parametric_csv: Option<PathBuf>,
    pub samples_per_cell: usize,
    pub fourier_constant: Interval,
    pub fourier_harmonics: Vec<(u32, Interval, Interval)>,
    pub fourier_phase: Interval,
    pub targets: Targets,
    pub find: FindConfig,
    pub verbosity: u8,
}

const KNOWN_KEYS: &[&str] = &[
    "system",
    "beta",
    "gamma",
    "n_exp",
    "tau",
    "p",
    "n",
    "min_return",
    "count_after_omega",
    "anchor",
    "normal",
    "radii",
    "section",
    "report",
    "value_csv",
    "parametric_csv",
    "samples_per_cell",
    "fourier_constant",
    "fourier_phase",
    "target_period",
    "target_transversality",
    "target_seconds",
    "seed_value",
    "t_iter",
    "radii_base",
    "radii_ratio",
    "remainder_radius",
    "level",
    "shrink_iters",
    "phase_candidates",
    "fit_factor",
    "fit_iters",
    "verbosity",
];

impl ProofConfig {
    /// Flat `key = value` lines; `#` starts a comment. Paths are relative to `base`.
    /// Harmonics are `fourier_<j> = <cos> <sin>`, targets `target_c<k> = <bound>`.
    pub fn parse(text: &str, base: &Path) -> Result<ProofConfig> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", ln + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            let harmonic = k.strip_prefix("fourier_").is_some_and(|j| j.parse::<u32>().is_ok());
            let ck = k.strip_prefix("target_c").is_some_and(|j| j.parse::<usize>().is_ok());
            if !KNOWN_KEYS.contains(&k.as_str()) && !harmonic && !ck {
                return Err(Error::Config(format!("line {}: unknown key {k:?}", ln + 1)));
            }
            if kv.insert(k.clone(), v).is_some() {
                return Err(Error::Config(format!("duplicate key {k:?}")));
            }
        }
        let get = |k: &str| kv.get(k).map(String::as_str);
        let need = |k: &str| get(k).ok_or_else(|| Error::Config(format!("missing key {k:?}")));
        let dec = |k: &str, default: Option<&str>| -> Result<Interval> {
            let s = get(k).or(default).ok_or_else(|| Error::Config(format!("missing key {k:?}")))?;
            Ok(parse_decimal(s)?)
        };
        fn num<T: std::str::FromStr>(k: &str, v: Option<&str>, default: T) -> Result<T> {
            match v {
                None => Ok(default),
                Some(s) => s.parse().map_err(|_| Error::Config(format!("bad value for {k:?}: {s:?}"))),
            }
        }
        let path = |k: &str| get(k).map(|v| base.join(v));
        let mut harmonics = Vec::new();
        let mut ck = Vec::new();
        for (k, v) in &kv {
            if let Some(j) = k.strip_prefix("fourier_").and_then(|j| j.parse::<u32>().ok()) {
                let f: Vec<&str> = v.split_whitespace().collect();
                if f.len() != 2 {
                    return Err(Error::Config(format!("{k} needs `<cos> <sin>`")));
                }
                harmonics.push((j, parse_decimal(f[0])?, parse_decimal(f[1])?));
            }
            if let Some(j) = k.strip_prefix("target_c").and_then(|j| j.parse::<usize>().ok()) {
                if ck.len() <= j {
                    ck.resize(j + 1, None);
                }
                ck[j] = Some(num(k, Some(v), 0.0)?);
            }
        }
        harmonics.sort_by_key(|h| h.0);
        let period = match get("target_period") {
            None => None,
            Some(s) => {
                let f: Vec<&str> = s.split_whitespace().collect();
                if f.len() != 2 {
                    return Err(Error::Config("target_period needs `<lo> <hi>`".into()));
                }
                Some(Interval::try_new(parse_decimal(f[0])?.lo(), parse_decimal(f[1])?.hi())?)
            }
        };
        let d = FindConfig::default();
        let find = FindConfig {
            seed_value: num("seed_value", get("seed_value"), d.seed_value)?,
            t_iter: num("t_iter", get("t_iter"), d.t_iter)?,
            radii_base: num("radii_base", get("radii_base"), d.radii_base)?,
            radii_ratio: num("radii_ratio", get("radii_ratio"), d.radii_ratio)?,
            remainder_radius: num("remainder_radius", get("remainder_radius"), d.remainder_radius)?,
            level: get("level").map(|s| num("level", Some(s), 0.0)).transpose()?,
            shrink_iters: num("shrink_iters", get("shrink_iters"), d.shrink_iters)?,
            phase_candidates: num("phase_candidates", get("phase_candidates"), d.phase_candidates)?,
            fit_factor: num("fit_factor", get("fit_factor"), d.fit_factor)?,
            fit_iters: num("fit_iters", get("fit_iters"), d.fit_iters)?,
        };
        let cfg = ProofConfig {
            system: get("system").map(str::to_string),
            beta: dec("beta", Some("2"))?,
            gamma: dec("gamma", Some("1"))?,
            n_exp: num("n_exp", get("n_exp"), 6)?,
            tau: dec("tau", Some("2"))?,
            p: num("p", Some(need("p")?), 0)?,
            n: num("n", Some(need("n")?), 0)?,
            min_return: num("min_return", get("min_return"), 1)?,
            count_after_omega: num("count_after_omega", get("count_after_omega"), false)?,
            anchor: base.join(need("anchor")?),
            normal: base.join(need("normal")?),
            radii: base.join(need("radii")?),
            section: path("section"),
            report: path("report"),
            value_csv: path("value_csv"),
            parametric_csv: path("parametric_csv"),
            samples_per_cell: num("samples_per_cell", get("samples_per_cell"), 4)?,
            fourier_constant: dec("fourier_constant", Some("0"))?,
            fourier_harmonics: harmonics,
            fourier_phase: dec("fourier_phase", Some("0"))?,
            targets: Targets {
                period,
                transversality: get("target_transversality").map(|s| num("target_transversality", Some(s), 0.0)).transpose()?,
                ck,
                max_seconds: get("target_seconds").map(|s| num("target_seconds", Some(s), 0.0)).transpose()?,
            },
            find,
            verbosity: num("verbosity", get("verbosity"), 1)?,
        };
        if cfg.min_return == 0 || cfg.samples_per_cell == 0 {
            return Err(Error::Config("min_return and samples_per_cell must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ProofConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        ProofConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn poincare_options(&self, params: &PnParams) -> PoincareOptions {
        PoincareOptions { count_after_omega: self.count_after_omega, ..PoincareOptions::new(self.min_return, params) }
    }

    pub fn params(&self) -> Result<PnParams> {
        PnParams::new(self.p, self.n, self.tau)
    }

    pub fn rhs(&self) -> Result<RhsSpec> {
        match &self.system {
            Some(s) => RhsSpec::parse(s, &[("beta", self.beta), ("gamma", self.gamma)]),
            None => Ok(mg_rhs(self.beta, self.gamma, self.n_exp)),
        }
    }

    pub fn fourier(&self, period: Interval) -> FourierApprox {
        FourierApprox { constant: self.fourier_constant, harmonics: self.fourier_harmonics.clone(), period, phase: self.fourier_phase }
    }
}

/// Strict inclusion of the image in `V = anchor + C·r0`, checked in frame
/// coordinates. Coordinate 0 is the section normal: members of the image lie
/// on the section, where it vanishes, so it is not compared.
pub fn verify_schauder(r0: &[Interval], image: &DoubletonSet, inv: &FrameInverse, anchor: &[f64], q: usize) -> Result<Inclusion> {
    let pr = image.params();
    if q < pr.regularity_steps() {
        return Err(Error::RegularityGateViolated { q, min_steps: pr.regularity_steps() });
    }
    let inc = compare_in_frame(inv.to_frame(image, anchor), r0);
    if !inc.holds {
        return Err(Error::InclusionFailed { index: inc.worst, margin: inc.margins[inc.worst] });
    }
    Ok(inc)
}

#[derive(Clone, Debug)]
pub struct ProofReport {
    /// Right-hand side as proved, with `beta` and `gamma` substituted.
    pub rhs: String,
    pub beta: Interval,
    pub gamma: Interval,
    pub tau: Interval,
    pub p: usize,
    pub n: usize,
    pub min_return: usize,
    pub count_after_omega: bool,
    pub period: Interval,
    pub q: usize,
    pub eps: Interval,
    pub transversality: Interval,
    pub inclusion: bool,
    pub min_margin: f64,
    pub worst_index: usize,
    /// Upper bounds on `‖x̂ - x‖_{C^k}`, `k = 0..`.
    pub norm_bounds: Vec<f64>,
    /// Per-order sup bounds behind `norm_bounds`.
    pub sup_bounds: Vec<f64>,
    pub wall_seconds: f64,
}

/// Hulls of the unit time windows `[(w-1)h, wh]` visited by the proof.
pub type Windows = BTreeMap<i64, Vec<Interval>>;

#[derive(Clone, Debug)]
pub struct ProofRun {
    pub report: ProofReport,
    pub poincare: PoincareResult,
    pub windows: Windows,
    pub fourier: FourierApprox,
}

/// Everything `prove` reads from disk, with consistency checks.
pub struct ProofInputs {
    pub params: PnParams,
    pub rhs: RhsSpec,
    pub anchor: Vec<f64>,
    pub inverse: FrameInverse,
    pub set: DoubletonSet,
    pub r0: IVector,
    pub section: Section,
}

fn same_params(a: &PnParams, b: &PnParams, what: &Path) -> Result<()> {
    if a.p() != b.p() || a.n() != b.n() || a.tau() != b.tau() {
        return Err(Error::Config(format!("{}: parameters differ from the configuration", what.display())));
    }
    Ok(())
}

fn read_points(path: &Path, params: &PnParams) -> Result<Vec<f64>> {
    let v = PnVector::read_from(path)?;
    same_params(v.params(), params, path)?;
    if v.data().iter().any(|x| !x.is_point()) {
        return Err(Error::Config(format!("{}: expected point entries", path.display())));
    }
    Ok(v.mid())
}

impl ProofInputs {
    pub fn load(cfg: &ProofConfig) -> Result<ProofInputs> {
        let params = cfg.params()?;
        let rhs = cfg.rhs()?;
        let anchor = read_points(&cfg.anchor, &params)?;
        let lhat = read_points(&cfg.normal, &params)?;
        let frame = build_frame(&params, &lhat)?;
        let inverse = FrameInverse::new(&frame)?;
        let radii = PnVector::read_from(&cfg.radii)?;
        same_params(radii.params(), &params, &cfg.radii)?;
        let r0 = radii.into_data();
        let set = build_candidate_box(&frame, &anchor, r0.clone())?;
        let derived = inverse.section(&anchor)?;
        let section = match &cfg.section {
            None => derived,
            Some(path) => {
                let s = Section::read_from(path)?;
                same_params(s.params(), &params, path)?;
                let (w, dw) = (s.dense_weights(), derived.dense_weights());
                // the stored section may only be coarser than the frame's own
                let encloses = w.iter().zip(&dw).all(|(a, b)| b.subset(*a)) && derived.offset().subset(s.offset());
                if !encloses {
                    return Err(Error::Config(format!("{}: section does not enclose the frame normal", path.display())));
                }
                s
            }
        };
        Ok(ProofInputs { params, rhs, anchor, inverse, set, r0, section })
    }
}

fn cell_positions(pr: &PnParams, i: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..=pr.n()).map(|k| pr.pos(i, k)).collect();
    v.push(pr.rem_pos(i));
    v
}

/// Sup bounds of `x̂ - x` over all recorded windows.
pub fn window_bounds(pr: &PnParams, windows: &Windows, fx: &FourierApprox, r: usize, subdiv: usize) -> Result<CkBounds> {
    let h = pr.h();
    let mut out = CkBounds::new(r);
    let mut x = PnVector::zeros(pr);
    for (&w, cell) in windows {
        for k in 0..=pr.n() {
            x.set(1, k, cell[k]);
        }
        x.data_mut()[pr.rem_pos(1)] = cell[pr.n() + 1];
        let b = ck_sup_bounds(&x, fx, r, [1], h * Interval::from_int(w), subdiv)?;
        out.merge(&b);
    }
    Ok(out)
}

pub fn run_proof(cfg: &ProofConfig) -> Result<ProofRun> {
    let start = Instant::now();
    let inputs = ProofInputs::load(cfg).map_err(|e| e.at("loading inputs"))?;
    let pr = inputs.params.clone();
    let opts = cfg.poincare_options(&pr);
    let mut windows = Windows::new();
    let p = pr.p();
    let res = poincare_map_observed(&inputs.set, &inputs.section, &inputs.rhs, &opts, |k, s| {
        if k == 0 {
            let hull = s.hull();
            for i in 1..=p {
                windows.insert(1 - i as i64, hull.cell(i));
            }
        } else {
            let rows = cell_positions(s.params(), 1);
            let hull = s.hull_rows(rows);
            windows.insert(k as i64, hull.cell(1));
        }
        if k % 50 == 0 {
            log::debug!("step {k}");
        }
    })
    .map_err(|e| e.at("poincare map"))?;
    log::info!("return after q = {} steps, eps = {}, period {}", res.q, res.eps, res.t_s);
    let inc = verify_schauder(&inputs.r0, &res.image, &inputs.inverse, &inputs.anchor, res.q).map_err(|e| e.at("schauder inclusion"))?;
    let worst = (1..inc.margins.len()).min_by(|&a, &b| inc.margins[a].total_cmp(&inc.margins[b])).unwrap_or(0);
    let fourier = cfg.fourier(res.t_s);
    let r = pr.n().min(4);
    let sups = window_bounds(&pr, &windows, &fourier, r, 4).map_err(|e| e.at("norm bounds"))?;
    let report = ProofReport {
        rhs: inputs.rhs.to_string(),
        beta: cfg.beta,
        gamma: cfg.gamma,
        tau: cfg.tau,
        p: pr.p(),
        n: pr.n(),
        min_return: cfg.min_return,
        count_after_omega: cfg.count_after_omega,
        period: res.t_s,
        q: res.q,
        eps: res.eps,
        transversality: res.transversality,
        inclusion: inc.holds,
        min_margin: inc.margins[worst],
        worst_index: worst,
        norm_bounds: (0..=r).map(|k| sups.norm(k)).collect(),
        sup_bounds: sups.sup.clone(),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(ProofRun { report, poincare: res, windows, fourier })
}

const DIGITS: usize = 12;

fn fmt_iv(x: Interval) -> String {
    format!("[{}, {}]", to_decimal_down(x.lo(), DIGITS), to_decimal_up(x.hi(), DIGITS))
}

fn fmt_up(x: f64) -> String {
    format!("[0, {}]", to_decimal_up(x, DIGITS))
}

impl ProofReport {
    /// `(description, pass)` for every declared target; inclusion always counts.
    pub fn checks(&self, t: &Targets) -> Vec<(String, bool)> {
        let mut out = vec![("schauder inclusion".to_string(), self.inclusion)];
        if let Some(pt) = t.period {
            out.push((format!("period within {}", fmt_iv(pt)), self.period.subset(pt)));
        }
        if let Some(lb) = t.transversality {
            out.push((format!("transversality lower bound >= {lb}"), self.transversality.lo() >= lb));
        }
        for (k, b) in t.ck.iter().enumerate() {
            if let Some(b) = b {
                let got = self.norm_bounds.get(k).copied().unwrap_or(f64::INFINITY);
                out.push((format!("C^{k} distance <= {b}"), got <= *b));
            }
        }
        if let Some(s) = t.max_seconds {
            out.push((format!("runtime <= {s} s"), self.wall_seconds <= s));
        }
        out
    }

    pub fn passed(&self, t: &Targets) -> bool {
        self.checks(t).iter().all(|c| c.1)
    }

    pub fn to_text(&self, t: &Targets) -> String {
        let mut s = String::new();
        // beta scales the delayed feedback and gamma the decay, whatever other sources call them
        writeln!(s, "# x'(t) = {} with z1 = x(t - tau), z2 = x(t)", self.rhs).expect("string write");
        let mut line = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("string write");
        line("BETA", fmt_iv(self.beta));
        line("GAMMA", fmt_iv(self.gamma));
        line("TAU", fmt_iv(self.tau));
        line("P", self.p.to_string());
        line("N", self.n.to_string());
        line("MIN_RETURN", self.min_return.to_string());
        line("COUNT_AFTER_OMEGA", self.count_after_omega.to_string());
        line("STEPS", self.q.to_string());
        line("EPS", fmt_iv(self.eps));
        line("PERIOD", fmt_iv(self.period));
        line("TRANSVERSALITY", fmt_iv(self.transversality));
        line("INCLUSION", self.inclusion.to_string());
        line("MIN_MARGIN", to_decimal_down(self.min_margin, DIGITS));
        line("WORST_COORDINATE", self.worst_index.to_string());
        for (k, b) in self.norm_bounds.iter().enumerate() {
            line(&format!("C{k}_DISTANCE"), fmt_up(*b));
        }
        for (k, b) in self.sup_bounds.iter().enumerate() {
            line(&format!("SUP{k}_DISTANCE"), fmt_up(*b));
        }
        line("WALL_SECONDS", format!("{:.3}", self.wall_seconds));
        let checks = self.checks(t);
        for (d, ok) in &checks {
            writeln!(s, "{} {d}", if *ok { "PASS" } else { "FAIL" }).expect("string write");
        }
        writeln!(s, "RESULT = {}", if checks.iter().all(|c| c.1) { "PASS" } else { "FAIL" }).expect("string write");
        s
    }
}

/// Rows `t, x_lo, x_hi, xhat` over `[-τ, 0]`, `samples` per cell plus `t = 0`.
pub fn value_csv(set: &PnVector, fx: &FourierApprox, samples: usize) -> Result<String> {
    let pr = set.params();
    let h = pr.h();
    let mut s = String::from("t,x_lo,x_hi,xhat\n");
    for i in (1..=pr.p()).rev() {
        let c = set.cell(i);
        for j in 0..samples {
            let e = (h * Interval::from_int(j as i64)).div_f64(samples as f64)?;
            let t = e - h * Interval::from_int(i as i64);
            let x = eval_cell(&c, 0, e);
            writeln!(s, "{},{},{},{}", t.mid(), x.lo(), x.hi(), fx.eval(t, 0).mid()).expect("string write");
        }
    }
    let x0 = set.value0();
    writeln!(s, "0,{},{},{}", x0.lo(), x0.hi(), fx.eval(Interval::ZERO, 0).mid()).expect("string write");
    Ok(s)
}

/// Rows `t, x_lo, x_hi, xd_lo, xd_hi, xhat, xhat_d` for `(x(t), x(t-τ))`
/// over the windows reached after the start.
pub fn parametric_csv(pr: &PnParams, windows: &Windows, fx: &FourierApprox, samples: usize) -> Result<String> {
    let h = pr.h();
    let mut s = String::from("t,x_lo,x_hi,xd_lo,xd_hi,xhat,xhat_d\n");
    let p = pr.p() as i64;
    for (&w, cell) in windows.range(1..) {
        let Some(delayed) = windows.get(&(w - p)) else { continue };
        for j in 0..samples {
            let e = (h * Interval::from_int(j as i64)).div_f64(samples as f64)?;
            let t = h * Interval::from_int(w - 1) + e;
            let x = eval_cell(cell, 0, e);
            let xd = eval_cell(delayed, 0, e);
            let xh = fx.eval(t, 0).mid();
            let xhd = fx.eval(t - pr.tau(), 0).mid();
            writeln!(s, "{},{},{},{},{},{},{}", t.mid(), x.lo(), x.hi(), xd.lo(), xd.hi(), xh, xhd).expect("string write");
        }
    }
    Ok(s)
}

/// Writes the report and the CSV files named in the configuration.
pub fn emit_outputs(run: &ProofRun, cfg: &ProofConfig) -> Result<()> {
    if let Some(p) = &cfg.report {
        std::fs::write(p, run.report.to_text(&cfg.targets))?;
    }
    if let Some(p) = &cfg.value_csv {
        std::fs::write(p, value_csv(&run.poincare.image.hull(), &run.fourier, cfg.samples_per_cell)?)?;
    }
    if let Some(p) = &cfg.parametric_csv {
        std::fs::write(p, parametric_csv(run.poincare.image.params(), &run.windows, &run.fourier, cfg.samples_per_cell)?)?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct FindOutput {
    pub anchor: Vec<f64>,
    pub lhat: Vec<f64>,
    pub period: f64,
    pub newton_residual: f64,
    pub return_moduli: Vec<f64>,
    pub unit_eigenvalue: f64,
    pub eig_residual: f64,
    pub r0: IVector,
    pub shrink_iterations: usize,
    pub section: Section,
}

/// Approximate periodic orbit on the value section `x(0) = level`, phase
/// matched to `x̂`, refined by Newton.
pub fn find_orbit(cfg: &ProofConfig, flow: &PointFlow<'_>) -> Result<(Vec<f64>, f64, f64)> {
    let pr = flow.params().clone();
    let h = flow.h();
    let guess = cfg.targets.period.map(|t| t.mid());
    let fx = guess.map(|t| cfg.fourier(Interval::point(t)));
    let level = match (cfg.find.level, &fx) {
        (Some(l), _) => l,
        (None, Some(fx)) => fx.eval(Interval::ZERO, 0).mid(),
        (None, None) => return Err(Error::Config("find needs `level` or `target_period`".into())),
    };
    let mut x = flow.simulate(&flow.constant(cfg.find.seed_value), cfg.find.t_iter)?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..cfg.find.phase_candidates.max(1) {
        let (_, st) = flow.crossing_after(&x, level, h, 200.0 * pr.tau().mid())?;
        let score = match &fx {
            Some(fx) => (1..=pr.p())
                .map(|i| (st[pr.pos(i, 0)] - fx.eval(Interval::point(-(i as f64) * h), 0).mid()).abs())
                .fold(0.0, f64::max),
            None => 0.0,
        };
        log::debug!("phase candidate score {score:e}");
        if best.as_ref().is_none_or(|b| score < b.0) {
            best = Some((score, st.clone()));
        }
        x = st;
    }
    let seed = best.expect("at least one candidate").1;
    let map = ValueReturnMap::new(PointFlow::new(flow.rhs(), &pr), level);
    let nr = newton_refine(&map, &seed, 1e-10, 50)?;
    log::info!("newton: period {} residual {:e} after {} iterations", nr.period, nr.residual, nr.iterations);
    Ok((nr.x, nr.period, nr.residual))
}

/// The search pipeline: orbit, section normal, frame, and a candidate set
/// shrunk until the rigorous map sends it into itself.
pub fn find(cfg: &ProofConfig) -> Result<FindOutput> {
    let pr = cfg.params()?;
    let rhs = cfg.rhs()?;
    let flow = PointFlow::new(&rhs, &pr);
    let (anchor, period, newton_residual) = find_orbit(cfg, &flow).map_err(|e| e.at("newton"))?;
    let mono = monodromy_left_eigvec(&flow, &anchor, period).map_err(|e| e.at("monodromy"))?;
    log::info!("unit eigenvalue {} (residual {:e}); leading return moduli {:?}", mono.unit, mono.residual, &mono.return_moduli[..mono.return_moduli.len().min(6)]);
    let frame = build_frame(&pr, &mono.lhat)?;
    let inv = FrameInverse::new(&frame)?;
    let section = inv.section(&anchor)?;
    let radii = radii_law(&pr, cfg.find.radii_base, cfg.find.radii_ratio, cfg.find.remainder_radius);
    let r0: IVector = radii.iter().map(|&r| Interval::symmetric(r)).collect();
    let opts = cfg.poincare_options(&pr);
    let map = |r: &IVector| -> Result<IVector> {
        let v = build_candidate_box(&frame, &anchor, r.clone())?;
        let res = poincare_map(&v, &section, &rhs, &opts)?;
        Ok(inv.to_frame(&res.image, &anchor))
    };
    let r0 = if cfg.find.fit_factor > 0.0 { fit_radii(r0, cfg.find.fit_factor, cfg.find.fit_iters, map).map_err(|e| e.at("fit"))?.r0 } else { r0 };
    let out = shrink_to_invariant(r0, cfg.find.shrink_iters, map).map_err(|e| e.at("shrink"))?;
    Ok(FindOutput {
        anchor,
        lhat: mono.lhat,
        period,
        newton_residual,
        return_moduli: mono.return_moduli,
        unit_eigenvalue: mono.unit,
        eig_residual: mono.residual,
        r0: out.r0,
        shrink_iterations: out.iterations,
        section,
    })
}

/// Writes the files `prove` reads: anchor, normal, radii and section.
pub fn write_find_output(out: &FindOutput, cfg: &ProofConfig) -> Result<()> {
    let pr = cfg.params()?;
    PnVector::from_points(&pr, &out.anchor)?.write_to(&cfg.anchor)?;
    PnVector::from_points(&pr, &out.lhat)?.write_to(&cfg.normal)?;
    PnVector::from_data(&pr, out.r0.clone())?.write_to(&cfg.radii)?;
    if let Some(p) = &cfg.section {
        out.section.write_to(p)?;
    }
    Ok(())
}
