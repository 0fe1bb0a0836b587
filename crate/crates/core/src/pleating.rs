//! Pleating rays: real-trace systems, Newton continuation in the height `t`,
//! and comparison with the asymptotic line.
//!
//! Unknowns are laid out `(x_1, y_1, ..., x_ξ, y_ξ)` with `τ_j = x_j + i y_j`.
//! Residuals are imaginary parts of traces, evaluated exactly at the binary
//! value of the iterate so that large traces far up the ray keep full
//! precision in their imaginary parts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::exactpoly::Polynomial;
use crate::holonomy::{trace_poly, validate_word, HolonomyError, PathWord};
use crate::surface::{
    complete_link_system, is_admissible, AsymptoticLine, DTCoordinates, LaminationCoords, Marking,
    PantsDecomposition, RationalLamination, SurfaceError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PleatingError {
    #[error("imaginary part of τ_{0} is not positive")]
    NotUpperHalfSpace(usize),
    #[error("system has {residuals} residuals and {pins} pins for {unknowns} unknowns")]
    Shape { residuals: usize, pins: usize, unknowns: usize },
    #[error("seed has {got} entries, expected {expected}")]
    SeedLength { got: usize, expected: usize },
    #[error("no convergence after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("singular Jacobian at iteration {iter}")]
    SingularJacobian { iter: usize },
    #[error("Jacobian condition number {cond:e} exceeds the limit at iteration {iter}")]
    IllConditioned { iter: usize, cond: f64 },
    #[error("iterate left the upper half-space at iteration {iter}")]
    LeftUpperHalfSpace { iter: usize },
    #[error("trace within {proximity:e} of ±2 at t = {t}: cusp reached")]
    Cusp { t: f64, proximity: f64 },
    #[error("schedule must be nonempty, positive and strictly decreasing")]
    Schedule,
    #[error("exact-ray mode needs a single-curve lamination")]
    Mode,
    #[error("trace vanishes at the sample point")]
    ZeroTrace,
    #[error("first solve at t = {t} failed: {source}")]
    FirstSolve { t: f64, source: Box<PleatingError> },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
}

impl PleatingError {
    /// Failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        match self {
            PleatingError::FirstSolve { source, .. } => source.is_numerical(),
            PleatingError::NoConvergence { .. }
            | PleatingError::SingularJacobian { .. }
            | PleatingError::IllConditioned { .. }
            | PleatingError::LeftUpperHalfSpace { .. }
            | PleatingError::Cusp { .. }
            | PleatingError::ZeroTrace => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One support curve: `y_1 = t` and `2ξ − 1` reality conditions.
    ExactRay,
    /// `y_i = t q_1 / q_i` and `ξ` reality conditions.
    PinnedImaginary,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::ExactRay => "exact-ray",
            Mode::PinnedImaginary => "pinned-imaginary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    pub max_cond: f64,
    pub min_cusp: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 50, max_halvings: 20, max_cond: 1e12, min_cusp: 1e-6 }
    }
}

/// Reality conditions `Im tr(w) = 0` with pins `y_i = c_i t`.
#[derive(Debug, Clone)]
pub struct RealTraceSystem {
    pub decomposition: PantsDecomposition,
    pub words: Vec<PathWord>,
    pub traces: Vec<Polynomial>,
    /// `(i, c)` pins `Im τ_{i+1} = c t`.
    pub pins: Vec<(usize, f64)>,
    pub mode: Mode,
}

impl RealTraceSystem {
    pub fn new(
        decomposition: PantsDecomposition,
        words: Vec<PathWord>,
        pins: Vec<(usize, f64)>,
        mode: Mode,
    ) -> Result<Self, PleatingError> {
        let unknowns = 2 * decomposition.xi();
        if words.len() + pins.len() != unknowns || pins.iter().any(|&(i, _)| i >= decomposition.xi()) {
            return Err(PleatingError::Shape { residuals: words.len(), pins: pins.len(), unknowns });
        }
        let traces = words.iter().map(|w| trace_poly(w, &decomposition)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { decomposition, words, traces, pins, mode })
    }

    pub fn xi(&self) -> usize {
        self.decomposition.xi()
    }

    /// Indices into the `2ξ` layout that Newton moves.
    fn free(&self) -> Vec<usize> {
        (0..2 * self.xi()).filter(|k| k % 2 == 0 || !self.pins.iter().any(|&(i, _)| 2 * i + 1 == *k)).collect()
    }

    fn apply_pins(&self, z: &mut [f64], t: f64) {
        for &(i, c) in &self.pins {
            z[2 * i + 1] = c * t;
        }
    }

    fn taus(z: &[f64]) -> Vec<Complex64> {
        z.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
    }

    pub fn trace_values(&self, z: &[f64]) -> Vec<Complex64> {
        let tau = Self::taus(z);
        self.traces.iter().map(|p| p.eval_exact(&tau).expect("finite point of the right length")).collect()
    }

    pub fn residuals(&self, z: &[f64]) -> Vec<f64> {
        self.trace_values(z).iter().map(|v| v.im).collect()
    }

    pub fn cusp_proximity(&self, z: &[f64]) -> f64 {
        self.trace_values(z).iter().map(|v| (v - 2.0).norm().min((v + 2.0).norm())).fold(f64::INFINITY, f64::min)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn in_upper(z: &[f64]) -> bool {
    z.chunks(2).all(|c| c[1] > 0.0)
}

/// Builds the reality conditions for `η`. Exact-ray mode completes the single
/// support curve to a link system and adds the duals.
pub fn build_system(l: &RationalLamination, m: &Marking, mode: Mode) -> Result<RealTraceSystem, PleatingError> {
    is_admissible(l)?;
    let coords = l.coords()?;
    let line = AsymptoticLine::new(coords.clone())?;
    let xi = m.decomposition.xi();
    let given: Vec<PathWord> = l.components.iter().map(|(_, w)| w.clone()).collect();
    for w in &given {
        validate_word(w, &m.decomposition)?;
    }
    let link = complete_link_system(&given, m)?;
    let mut words = given.clone();
    words.extend(link.gammas);
    let pins = match mode {
        Mode::ExactRay => {
            if given.len() != 1 {
                return Err(PleatingError::Mode);
            }
            words.extend(link.duals);
            vec![(0, 1.0)]
        }
        Mode::PinnedImaginary => (0..xi).map(|i| (i, line.coords.q[0] / line.coords.q[i])).collect(),
    };
    RealTraceSystem::new(m.decomposition.clone(), words, pins, mode)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RaySample {
    pub t: f64,
    pub tau: Vec<Complex64>,
    pub residual: f64,
    pub newton_iters: usize,
    pub cusp_proximity: f64,
}

/// Damped Newton with a central-difference Jacobian. When damping stalls at
/// the floating-point floor, neighbouring doubles are tried coordinate-wise.
pub fn newton_solve(
    sys: &RealTraceSystem,
    t: f64,
    seed: &[f64],
    opts: &SolverOptions,
) -> Result<RaySample, PleatingError> {
    let n = 2 * sys.xi();
    if seed.len() != n {
        return Err(PleatingError::SeedLength { got: seed.len(), expected: n });
    }
    if let Some(j) = seed.chunks(2).position(|c| !(c[1] > 0.0)) {
        return Err(PleatingError::NotUpperHalfSpace(j + 1));
    }
    let mut z = seed.to_vec();
    sys.apply_pins(&mut z, t);
    let free = sys.free();
    let mut f = sys.residuals(&z);
    let mut r = max_abs(&f);
    for iter in 0..=opts.max_iter {
        if r < opts.tol {
            let cusp = sys.cusp_proximity(&z);
            if cusp < opts.min_cusp {
                return Err(PleatingError::Cusp { t, proximity: cusp });
            }
            return Ok(RaySample { t, tau: RealTraceSystem::taus(&z), residual: r, newton_iters: iter, cusp_proximity: cusp });
        }
        if iter == opts.max_iter {
            break;
        }
        let jac = jacobian(sys, &z, &free);
        let jmax = jac.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lu = jac.clone().lu();
        let u = lu.u();
        let min_pivot = (0..free.len()).map(|k| u[(k, k)].abs()).fold(f64::INFINITY, f64::min);
        if !(min_pivot > 1e-12 * jmax.max(1.0)) {
            return Err(PleatingError::SingularJacobian { iter });
        }
        let inv = lu.try_inverse().ok_or(PleatingError::SingularJacobian { iter })?;
        let cond = norm1(&jac) * norm1(&inv);
        if !(cond <= opts.max_cond) {
            return Err(PleatingError::IllConditioned { iter, cond });
        }
        let step = &inv * DVector::from_iterator(f.len(), f.iter().map(|v| -v));
        let mut lambda = 1.0;
        let mut accepted = false;
        let mut left_upper = false;
        for _ in 0..=opts.max_halvings {
            let mut trial = z.clone();
            for (k, &idx) in free.iter().enumerate() {
                trial[idx] += lambda * step[k];
            }
            if !in_upper(&trial) {
                left_upper = true;
            } else {
                let ft = sys.residuals(&trial);
                let rt = max_abs(&ft);
                if rt < r {
                    z = trial;
                    f = ft;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            if let Some((zp, fp, rp)) = polish(sys, &z, &free, r) {
                z = zp;
                f = fp;
                r = rp;
                continue;
            }
            if left_upper {
                return Err(PleatingError::LeftUpperHalfSpace { iter });
            }
            return Err(PleatingError::NoConvergence { iters: iter + 1, residual: r });
        }
    }
    Err(PleatingError::NoConvergence { iters: opts.max_iter, residual: r })
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols()).map(|c| m.column(c).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn jacobian(sys: &RealTraceSystem, z: &[f64], free: &[usize]) -> DMatrix<f64> {
    let m = sys.words.len();
    let mut jac = DMatrix::zeros(m, free.len());
    for (k, &idx) in free.iter().enumerate() {
        let h = 1e-6 * z[idx].abs().max(1.0);
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[idx] += h;
        zm[idx] -= h;
        let fp = sys.residuals(&zp);
        let fm = sys.residuals(&zm);
        for r in 0..m {
            jac[(r, k)] = (fp[r] - fm[r]) / (zp[idx] - zm[idx]);
        }
    }
    jac
}

/// One sweep over single-ulp moves of each free coordinate.
fn polish(sys: &RealTraceSystem, z: &[f64], free: &[usize], r: f64) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let mut best: Option<(Vec<f64>, Vec<f64>, f64)> = None;
    let mut best_r = r;
    for &idx in free {
        for cand in [z[idx].next_up(), z[idx].next_down()] {
            let mut trial = z.to_vec();
            trial[idx] = cand;
            if !in_upper(&trial) {
                continue;
            }
            let ft = sys.residuals(&trial);
            let rt = max_abs(&ft);
            if rt < best_r {
                best_r = rt;
                best = Some((trial, ft, rt));
            }
        }
    }
    best
}

/// Per-sample `|Re τ_i + p_i/q_i|` and `|q_i Im τ_i / (q_1 t) − 1|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RayTrace {
    pub lamination: LaminationCoords,
    pub words: Vec<String>,
    pub mode: Mode,
    pub schedule: Vec<f64>,
    pub options: SolverOptions,
    pub samples: Vec<RaySample>,
    pub line: AsymptoticLine,
    pub deviations: Vec<Deviation>,
    pub truncated: Option<String>,
}

pub fn deviation(line: &AsymptoticLine, s: &RaySample) -> Deviation {
    let c = &line.coords;
    Deviation {
        re: s.tau.iter().enumerate().map(|(i, z)| (z.re + c.p[i] / c.q[i]).abs()).collect(),
        im: s.tau.iter().enumerate().map(|(i, z)| (c.q[i] * z.im / (c.q[0] * s.t) - 1.0).abs()).collect(),
    }
}

/// Follows the ray down a decreasing schedule, seeding at the line.
pub fn trace_ray(
    l: &RationalLamination,
    m: &Marking,
    schedule: &[f64],
    mode: Mode,
    opts: &SolverOptions,
) -> Result<RayTrace, PleatingError> {
    if schedule.is_empty() || schedule.iter().any(|&t| !(t > 0.0)) || schedule.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(PleatingError::Schedule);
    }
    let sys = build_system(l, m, mode)?;
    let line = AsymptoticLine::of(l)?;
    let mut seed: Vec<f64> = line.point(schedule[0]).iter().flat_map(|z| [z.re, z.im]).collect();
    let mut samples = Vec::new();
    let mut truncated = None;
    for (k, &t) in schedule.iter().enumerate() {
        log::debug!("solving at t = {t}");
        match newton_solve(&sys, t, &seed, opts) {
            Ok(s) => {
                seed = s.tau.iter().flat_map(|z| [z.re, z.im]).collect();
                samples.push(s);
            }
            Err(e) if k == 0 => return Err(PleatingError::FirstSolve { t, source: Box::new(e) }),
            Err(e @ PleatingError::Cusp { .. }) => {
                log::info!("ray truncated: {e}");
                truncated = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let deviations = samples.iter().map(|s| deviation(&line, s)).collect();
    Ok(RayTrace {
        lamination: line.coords.clone(),
        words: sys.words.iter().map(|w| w.name.clone()).collect(),
        mode,
        schedule: schedule.to_vec(),
        options: *opts,
        samples,
        line,
        deviations,
        truncated,
    })
}

impl RayTrace {
    pub fn to_csv(&self) -> String {
        let xi = self.lamination.q.len();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["t".to_string()];
        for i in 1..=xi {
            header.push(format!("re_tau_{i}"));
            header.push(format!("im_tau_{i}"));
        }
        header.push("residual".into());
        header.push("cusp_proximity".into());
        w.write_record(&header).expect("in-memory write");
        for s in &self.samples {
            let mut row = vec![s.t.to_string()];
            for z in &s.tau {
                row.push(z.re.to_string());
                row.push(z.im.to_string());
            }
            row.push(s.residual.to_string());
            row.push(s.cusp_proximity.to_string());
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn to_json_value(&self) -> Value {
        let samples: Vec<Value> = self
            .samples
            .iter()
            .zip(&self.deviations)
            .map(|(s, d)| {
                json!({
                    "t": s.t,
                    "tau": s.tau.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                    "residual": s.residual,
                    "newton_iters": s.newton_iters,
                    "cusp_proximity": s.cusp_proximity,
                    "re_deviation": d.re,
                    "im_deviation": d.im,
                })
            })
            .collect();
        json!({
            "lamination": {"q": self.lamination.q, "p": self.lamination.p},
            "constraint_words": self.words,
            "mode": self.mode.name(),
            "schedule": self.schedule,
            "tolerances": {
                "residual": self.options.tol,
                "max_iterations": self.options.max_iter,
                "max_condition": self.options.max_cond,
                "cusp_proximity": self.options.min_cusp,
                "fd_relative_step": 1e-6,
            },
            "truncated": self.truncated,
            "samples": samples,
        })
    }
}

fn eta(tau: &[Complex64]) -> Result<Vec<f64>, PleatingError> {
    if let Some(j) = tau.iter().position(|z| !(z.im > 0.0)) {
        return Err(PleatingError::NotUpperHalfSpace(j + 1));
    }
    let rho = tau.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
    Ok(tau.iter().map(|z| z.im / rho).collect())
}

/// `E = η_1 ⋯ η_ξ Σ (q_i x_i + p_i) / η_i` with `η = y / |y|`.
pub fn e_function(c: &LaminationCoords, tau: &[Complex64]) -> Result<f64, PleatingError> {
    let e = eta(tau)?;
    let prod: f64 = e.iter().product();
    Ok(prod * (0..tau.len()).map(|i| (c.q[i] * tau[i].re + c.p[i]) / e[i]).sum::<f64>())
}

/// `u` with `E_γ(τ) = i(γ) · u` for every `γ`.
pub fn u_vector(tau: &[Complex64]) -> Result<Vec<f64>, PleatingError> {
    let e = eta(tau)?;
    let prod: f64 = e.iter().product();
    Ok(tau.iter().zip(&e).flat_map(|(z, ei)| [prod * z.re / ei, prod / ei]).collect())
}

/// `|Im tr| / |tr|` of the curve at the line point of height `t`.
pub fn check_line_reality(
    w: &PathWord,
    m: &PantsDecomposition,
    coords: &DTCoordinates,
    t: f64,
) -> Result<f64, PleatingError> {
    let line = AsymptoticLine::new(LaminationCoords::scaled(coords, 1.0))?;
    let tr = trace_poly(w, m)?;
    if tr.as_constant().is_some() {
        return Err(PleatingError::ZeroTrace);
    }
    let v = tr.eval_exact(&line.point(t)).map_err(HolonomyError::from)?;
    if v.norm() == 0.0 {
        return Err(PleatingError::ZeroTrace);
    }
    Ok(v.im.abs() / v.norm())
}
