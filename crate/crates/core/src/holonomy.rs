//! Plumbing holonomy: labelled pants groups glued by Kra's construction.
//!
//! Each pants carries the level-2 group generated by
//! `A = [[1,2],[0,1]]` and `B = [[1,0],[2,1]]`, with parabolic fixed points
//! `∞`, `0` and `1` for `A`, `B` and `AB⁻¹`. Crossing pants curve `i` from the
//! slot labelled `ε` to the slot labelled `ε'` multiplies by
//! `Ω_ε⁻¹ J⁻¹ T_σ⁻¹ Ω_ε'` where `σ = τ_i + 1` is the plumbing parameter
//! before the shift to the normalization used everywhere else.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exactpoly::{GaussianRational, PolyError, Polynomial};
use crate::surface::{DTCoordinates, Label, Marking, PantsDecomposition, SurfaceError, SurfaceSig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HolonomyError {
    #[error("word {word}: token {index}: {reason}")]
    InvalidWord { word: String, index: usize, reason: String },
    #[error("expected {expected} plumbing parameters, got {got}")]
    ParamCount { got: usize, expected: usize },
    #[error("trace {0} is parabolic")]
    Parabolic(Complex64),
    #[error("trace {0} is elliptic")]
    Elliptic(Complex64),
    #[error("Kra parameter must be nonzero")]
    ZeroKraParameter,
    #[error("unknown catalog word {0:?}")]
    UnknownWord(String),
    #[error("malformed word JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gen {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Token {
    Gen { gen: Gen, pants: usize, exp: i32 },
    Cross { cross: usize, dir: i32 },
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Token::Gen { gen, exp, .. } => {
                let c = match (gen, exp > 0) {
                    (Gen::A, true) => "A",
                    (Gen::A, false) => "a",
                    (Gen::B, true) => "B",
                    (Gen::B, false) => "b",
                };
                f.write_str(c)
            }
            Token::Cross { cross, dir } => write!(f, "x{cross}{}", if dir > 0 { "+" } else { "-" }),
        }
    }
}

/// A closed path in the dual graph of the decomposition, read as a group element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathWord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed: Option<DTCoordinates>,
    pub tokens: Vec<Token>,
}

impl PathWord {
    /// Parses `"@j A b x1+ ..."`: generators act in whichever pants the path is in;
    /// `@j` fixes the starting pants when the word opens with a generator.
    pub fn parse_compact(
        m: &PantsDecomposition,
        name: &str,
        src: &str,
        claimed: Option<DTCoordinates>,
    ) -> Result<Self, HolonomyError> {
        let mut tokens = Vec::new();
        let mut here: Option<usize> = None;
        let bad = |index: usize, reason: String| HolonomyError::InvalidWord { word: name.into(), index, reason };
        for (k, s) in src.split_whitespace().enumerate() {
            if let Some(j) = s.strip_prefix('@') {
                here = Some(j.parse().map_err(|_| bad(k, format!("bad pants {j:?}")))?);
                continue;
            }
            let tok = match s {
                "A" | "a" | "B" | "b" => {
                    let pants = here.ok_or_else(|| bad(k, "generator before any pants is known".into()))?;
                    let gen = if s.eq_ignore_ascii_case("a") { Gen::A } else { Gen::B };
                    Token::Gen { gen, pants, exp: if s.chars().all(char::is_uppercase) { 1 } else { -1 } }
                }
                _ => {
                    let body = s.strip_prefix('x').ok_or_else(|| bad(k, format!("bad token {s:?}")))?;
                    let (num, dir) = match body.strip_suffix('+') {
                        Some(n) => (n, 1),
                        None => (body.strip_suffix('-').ok_or_else(|| bad(k, format!("bad token {s:?}")))?, -1),
                    };
                    let cross: usize = num.parse().map_err(|_| bad(k, format!("bad curve {num:?}")))?;
                    let (_, to) = cross_ends(m, cross, dir).map_err(|r| bad(k, r))?;
                    here = Some(to.0);
                    Token::Cross { cross, dir }
                }
            };
            tokens.push(tok);
        }
        let w = PathWord { name: name.into(), claimed, tokens };
        validate_word(&w, m)?;
        Ok(w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("word serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, HolonomyError> {
        serde_json::from_str(s).map_err(|e| HolonomyError::Json(e.to_string()))
    }

    pub fn compact(&self) -> String {
        self.tokens.iter().map(Token::to_string).collect::<Vec<_>>().join(" ")
    }

    pub fn cross_count(&self, curve: usize) -> u32 {
        self.tokens.iter().filter(|t| matches!(t, Token::Cross { cross, .. } if *cross == curve)).count() as u32
    }

    /// Indices of the crossing tokens, in order.
    pub fn crossings(&self) -> Vec<usize> {
        (0..self.tokens.len()).filter(|&k| matches!(self.tokens[k], Token::Cross { .. })).collect()
    }
}

/// `(from, to)` slots of a crossing of `curve` in direction `dir`.
pub fn cross_ends(
    m: &PantsDecomposition,
    curve: usize,
    dir: i32,
) -> Result<(crate::surface::Slot, crate::surface::Slot), String> {
    let g = m.gluing(curve).ok_or_else(|| format!("no pants curve {curve}"))?;
    match dir {
        1 => Ok((g.ends[0], g.ends[1])),
        -1 => Ok((g.ends[1], g.ends[0])),
        d => Err(format!("direction {d} is not ±1")),
    }
}

/// Checks that the word is a closed path: each generator acts in the current
/// pants and each crossing leaves from it.
pub fn validate_word(w: &PathWord, m: &PantsDecomposition) -> Result<(), HolonomyError> {
    let bad = |index: usize, reason: String| HolonomyError::InvalidWord { word: w.name.clone(), index, reason };
    let mut start: Option<usize> = None;
    let mut here: Option<usize> = None;
    for (k, t) in w.tokens.iter().enumerate() {
        match *t {
            Token::Gen { pants, exp, .. } => {
                if exp != 1 && exp != -1 {
                    return Err(bad(k, format!("exponent {exp} is not ±1")));
                }
                if pants >= m.pants_count() {
                    return Err(bad(k, format!("no pants {pants}")));
                }
                if here.is_some_and(|h| h != pants) {
                    return Err(bad(k, format!("generator in pants {pants} but path is in {}", here.unwrap())));
                }
                start.get_or_insert(pants);
                here = Some(pants);
            }
            Token::Cross { cross, dir } => {
                let (from, to) = cross_ends(m, cross, dir).map_err(|r| bad(k, r))?;
                if here.is_some_and(|h| h != from.0) {
                    return Err(bad(k, format!("crossing leaves pants {} but path is in {}", from.0, here.unwrap())));
                }
                start.get_or_insert(from.0);
                here = Some(to.0);
            }
        }
    }
    if start != here {
        return Err(bad(w.tokens.len(), "path does not close up".into()));
    }
    if let Some(c) = &w.claimed {
        if c.len() != m.xi() || c.p.len() != m.xi() {
            return Err(bad(0, format!("claimed coordinates have {} pairs, surface has {}", c.len(), m.xi())));
        }
    }
    Ok(())
}

/// Matrix entries: a commutative ring with Gaussian-integer constants.
pub trait Entry: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl Entry for Complex64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Entry for Polynomial {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

/// `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Entry> Mat2<S> {
    pub fn mul(&self, o: &Self) -> Self {
        Mat2 {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        }
    }

    pub fn trace(&self) -> S {
        self.a.add(&self.d)
    }

    pub fn det(&self) -> S {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Mat2<T> {
        Mat2 { a: f(&self.a), b: f(&self.b), c: f(&self.c), d: f(&self.d) }
    }
}

type IMat = [[(i64, i64); 2]; 2];

const fn re(v: i64) -> (i64, i64) {
    (v, 0)
}

const GEN_A: IMat = [[re(1), re(2)], [re(0), re(1)]];
const GEN_A_INV: IMat = [[re(1), re(-2)], [re(0), re(1)]];
const GEN_B: IMat = [[re(1), re(0)], [re(2), re(1)]];
const GEN_B_INV: IMat = [[re(1), re(0)], [re(-2), re(1)]];
const J_INV: IMat = [[(0, 1), re(0)], [re(0), (0, -1)]];

fn omega(l: Label) -> IMat {
    match l {
        Label::Zero => [[re(1), re(-1)], [re(1), re(0)]],
        Label::One => [[re(0), re(-1)], [re(1), re(-1)]],
        Label::Inf => [[re(1), re(0)], [re(0), re(1)]],
    }
}

fn omega_inv(l: Label) -> IMat {
    match l {
        Label::Zero => [[re(0), re(1)], [re(-1), re(1)]],
        Label::One => [[re(-1), re(1)], [re(-1), re(0)]],
        Label::Inf => [[re(1), re(0)], [re(0), re(1)]],
    }
}

/// The generators of the level-2 pants group, as integer matrices.
pub fn gamma_generators() -> [[[i64; 2]; 2]; 2] {
    let strip = |m: IMat| m.map(|r| r.map(|(x, _)| x));
    [strip(GEN_A), strip(GEN_B)]
}

fn lift<S: Entry>(m: &IMat, k: &impl Fn(i64, i64) -> S) -> Mat2<S> {
    Mat2 { a: k(m[0][0].0, m[0][0].1), b: k(m[0][1].0, m[0][1].1), c: k(m[1][0].0, m[1][0].1), d: k(m[1][1].0, m[1][1].1) }
}

/// Gluing matrix for crossing `curve` in direction `dir`, given the unshifted
/// parameter `sigma`.
pub fn glue_matrix<S: Entry>(
    m: &PantsDecomposition,
    curve: usize,
    dir: i32,
    sigma: &S,
    k: &impl Fn(i64, i64) -> S,
) -> Result<Mat2<S>, HolonomyError> {
    let (from, to) =
        cross_ends(m, curve, dir).map_err(|reason| HolonomyError::InvalidWord { word: String::new(), index: 0, reason })?;
    let zero = k(0, 0);
    let t_inv = Mat2 { a: k(1, 0), b: zero.sub(sigma), c: zero.clone(), d: k(1, 0) };
    Ok(lift(&omega_inv(from.1), k).mul(&lift(&J_INV, k)).mul(&t_inv).mul(&lift(&omega(to.1), k)))
}

fn product<S: Entry>(
    w: &PathWord,
    m: &PantsDecomposition,
    sigma: &[S],
    k: &impl Fn(i64, i64) -> S,
) -> Result<Mat2<S>, HolonomyError> {
    validate_word(w, m)?;
    let mut acc = lift(&[[re(1), re(0)], [re(0), re(1)]], k);
    for t in &w.tokens {
        let f = match *t {
            Token::Gen { gen: Gen::A, exp, .. } => lift(if exp > 0 { &GEN_A } else { &GEN_A_INV }, k),
            Token::Gen { gen: Gen::B, exp, .. } => lift(if exp > 0 { &GEN_B } else { &GEN_B_INV }, k),
            Token::Cross { cross, dir } => glue_matrix(m, cross, dir, &sigma[cross - 1], k)?,
        };
        acc = acc.mul(&f);
    }
    Ok(acc)
}

/// Holonomy with entries in `ℚ(i)[τ_1, ..., τ_ξ]`, in the shifted parameter.
pub fn holonomy_symbolic(w: &PathWord, m: &PantsDecomposition) -> Result<Mat2<Polynomial>, HolonomyError> {
    let n = m.xi();
    let k = |a: i64, b: i64| Polynomial::constant(n, GaussianRational::from_ints(a, b));
    let vars = (0..n).map(|i| Polynomial::var(n, i)).collect::<Result<Vec<_>, _>>()?;
    let raw = product(w, m, &vars, &k)?;
    let one = GaussianRational::one();
    let shift = |p: &Polynomial| -> Polynomial {
        (0..n).fold(p.clone(), |acc, i| acc.substitute_shift(i, &one).expect("index in range"))
    };
    Ok(raw.map(shift))
}

/// Holonomy at the point `τ` of the shifted parameter.
pub fn holonomy_numeric(w: &PathWord, m: &PantsDecomposition, tau: &[Complex64]) -> Result<Mat2<Complex64>, HolonomyError> {
    if tau.len() != m.xi() {
        return Err(HolonomyError::ParamCount { got: tau.len(), expected: m.xi() });
    }
    let sigma: Vec<Complex64> = tau.iter().map(|t| t + 1.0).collect();
    product(w, m, &sigma, &|a, b| Complex64::new(a as f64, b as f64))
}

pub fn trace_poly(w: &PathWord, m: &PantsDecomposition) -> Result<Polynomial, HolonomyError> {
    Ok(holonomy_symbolic(w, m)?.trace())
}

/// `λ` with `2 cosh(λ/2) = ±t`, `Re λ > 0` and `Im λ ∈ (−π, π]`.
///
/// The sign of the trace is not determined by a PSL element, so `λ` is
/// taken modulo `2πi`.
pub fn complex_length(t: Complex64) -> Result<Complex64, HolonomyError> {
    let two = Complex64::new(2.0, 0.0);
    if t == two || t == -two {
        return Err(HolonomyError::Parabolic(t));
    }
    let mut l = (t / 2.0).acosh() * 2.0;
    if l.re < 0.0 {
        l = -l;
    }
    if l.re <= 0.0 {
        return Err(HolonomyError::Elliptic(t));
    }
    let tau = 2.0 * std::f64::consts::PI;
    let mut im = l.im.rem_euclid(tau);
    if im > std::f64::consts::PI {
        im -= tau;
    }
    Ok(Complex64::new(l.re, im))
}

/// `τ = −(i/π) log t` from Kra's multiplicative parameter.
pub fn kra_to_tau(t: Complex64) -> Result<Complex64, HolonomyError> {
    if t == Complex64::new(0.0, 0.0) {
        return Err(HolonomyError::ZeroKraParameter);
    }
    Ok(-Complex64::i() / std::f64::consts::PI * t.ln())
}

/// Inverse of [`kra_to_tau`].
pub fn tau_to_kra(tau: Complex64) -> Complex64 {
    (Complex64::i() * std::f64::consts::PI * tau).exp()
}

struct CatalogEntry {
    name: &'static str,
    word: &'static str,
    coords: &'static [i64],
}

const fn e(name: &'static str, word: &'static str, coords: &'static [i64]) -> CatalogEntry {
    CatalogEntry { name, word, coords }
}

const CATALOG_S11: &[CatalogEntry] = &[
    e("sigma1", "@0 A", &[0, 1]),
    e("c1", "x1+", &[1, 0]),
    e("c1_tw", "x1+ B", &[1, 2]),
    e("c1_twinv", "x1+ b", &[1, -2]),
    e("c1_tw2", "x1+ B B", &[1, 4]),
    e("c2", "x1+ x1+ B", &[2, 2]),
    e("c3", "x1+ x1+ x1+ B", &[3, 2]),
    e("c4", "x1+ x1+ x1+ x1+ B", &[4, 2]),
];

const CATALOG_S04: &[CatalogEntry] = &[
    e("sigma1", "@0 A", &[0, 1]),
    e("d0", "x1+ A B x1- B", &[2, 0]),
    e("d_tw", "x1+ B x1- B", &[2, 2]),
    e("d_tw2", "x1+ a B x1- B", &[2, 4]),
    e("d_twinv", "x1+ A b x1- A b", &[2, -2]),
];

const CATALOG_S12: &[CatalogEntry] = &[
    e("sigma1", "@0 A", &[0, 1, 0, 0]),
    e("sigma2", "@0 B", &[0, 0, 0, 1]),
    e("g1", "x1+ x2-", &[1, 0, 1, 0]),
    e("g1_tw1", "x1+ A x2-", &[1, -2, 1, 0]),
    e("g1_tw2", "x1+ x2- B", &[1, 0, 1, 2]),
    e("thread", "x1+ x2- b A", &[1, 2, 1, -2]),
    e("thread_inv", "x1+ A x2- B", &[1, -2, 1, 2]),
    e("d1", "x1+ B x1- A b", &[2, 0, 0, 0]),
    e("d2", "x2+ A x2- a", &[0, 0, 2, 0]),
    e("d2_tw", "x2+ B x2- b A", &[0, 0, 2, -4]),
];

fn raw_catalog(sig: SurfaceSig) -> Result<&'static [CatalogEntry], HolonomyError> {
    match sig {
        SurfaceSig::S11 => Ok(CATALOG_S11),
        SurfaceSig::S04 => Ok(CATALOG_S04),
        SurfaceSig::S12 => Ok(CATALOG_S12),
        other => Err(SurfaceError::UnknownSurface(format!("({},{})", other.genus, other.punctures)).into()),
    }
}

/// Simple closed curves on a built-in decomposition, with certified coordinates.
pub fn catalog(sig: SurfaceSig) -> Result<Vec<PathWord>, HolonomyError> {
    let m = PantsDecomposition::builtin(sig)?;
    raw_catalog(sig)?
        .iter()
        .map(|en| {
            let c = DTCoordinates::from_interleaved(en.coords)?;
            PathWord::parse_compact(&m, en.name, en.word, Some(c))
        })
        .collect()
}

pub fn catalog_word(sig: SurfaceSig, name: &str) -> Result<PathWord, HolonomyError> {
    catalog(sig)?.into_iter().find(|w| w.name == name).ok_or_else(|| HolonomyError::UnknownWord(name.into()))
}

/// Dual curves for the built-in decompositions, one per pants curve.
pub fn builtin_marking(sig: SurfaceSig) -> Result<Marking, HolonomyError> {
    let decomposition = PantsDecomposition::builtin(sig)?;
    let names: &[&str] = match sig {
        SurfaceSig::S11 => &["c1"],
        SurfaceSig::S04 => &["d0"],
        _ => &["d1", "d2"],
    };
    let duals = names.iter().map(|n| catalog_word(sig, n)).collect::<Result<_, _>>()?;
    Ok(Marking { decomposition, duals, candidates: catalog(sig)? })
}
