//! Top terms of trace polynomials and exact verification against
//! Dehn–Thurston coordinates.
//!
//! In the shifted parameter a simple curve with coordinates `(q_i, p_i)` has
//! `tr = u · i^q 2^h (τ^q + Σ p_i τ^{q - e_i}) + R` with `u` a unit, `h` the
//! number of arcs returning to the boundary slot they entered by, and `R` of
//! total degree at most `q - 2`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::exactpoly::{fmt_rational, GaussianRational, Polynomial};
use crate::holonomy::{cross_ends, trace_poly, HolonomyError, PathWord, Token};
use crate::surface::{DTCoordinates, PantsDecomposition};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceformError {
    #[error("trace is the constant {0}: parabolic or degenerate word")]
    Parabolic(GaussianRational),
    #[error("top coefficient vanishes: not a simple curve in standard position")]
    ZeroTop,
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
}

/// Leading data of a trace polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct TopForm {
    pub q: Vec<u32>,
    pub top_coeff: GaussianRational,
    /// Coefficient of `τ^{q - e_i}`; zero when `q_i = 0`.
    pub sub_coeffs: Vec<GaussianRational>,
    pub h: Option<u32>,
    /// `top_coeff / (i^q 2^h)` when `h` is known.
    pub sign_unit: Option<GaussianRational>,
}

impl TopForm {
    pub fn total(&self) -> u32 {
        self.q.iter().sum()
    }

    pub fn with_h(mut self, h: u32) -> Self {
        let scale = &GaussianRational::i().pow(self.total()) * &GaussianRational::from_ints(1 << h.min(62), 0);
        self.sign_unit = self.top_coeff.checked_div(&scale);
        self.h = Some(h);
        self
    }
}

pub fn extract_top(p: &Polynomial) -> Result<TopForm, TraceformError> {
    if let Some(c) = p.as_constant() {
        return Err(TraceformError::Parabolic(c));
    }
    let n = p.nvars();
    let q: Vec<u32> = (0..n).map(|i| p.degree_in(i).expect("index in range")).collect();
    let top_coeff = p.coeff(&q);
    let sub_coeffs = (0..n)
        .map(|i| {
            if q[i] == 0 {
                return GaussianRational::zero();
            }
            let mut e = q.clone();
            e[i] -= 1;
            p.coeff(&e)
        })
        .collect();
    Ok(TopForm { q, top_coeff, sub_coeffs, h: None, sign_unit: None })
}

/// Coordinates read off a trace, with exactness flags.
#[derive(Debug, Clone, PartialEq)]
pub struct DtCertificate {
    pub q: Vec<u32>,
    /// `sub_coeff_i / top_coeff`; not necessarily real or integral.
    pub p: Vec<GaussianRational>,
    pub integral: Vec<bool>,
    /// `Some(k)` if `top_coeff` is a unit times `2^k`.
    pub power_of_two: Option<u32>,
}

impl DtCertificate {
    pub fn coords(&self) -> Option<DTCoordinates> {
        if !self.integral.iter().all(|&b| b) {
            return None;
        }
        let p = self.p.iter().map(|c| c.re.to_integer().to_i64()).collect::<Option<Vec<_>>>()?;
        Some(DTCoordinates::new(self.q.iter().map(|&x| x as i64).collect(), p))
    }
}

fn is_integer(c: &GaussianRational) -> bool {
    c.im.is_zero() && c.re.is_integer()
}

/// `k` with `|c| = 2^k` and `c / 2^k ∈ {±1, ±i}`.
fn power_of_two_unit(c: &GaussianRational) -> Option<u32> {
    let a = if c.im.is_zero() {
        c.re.abs()
    } else if c.re.is_zero() {
        c.im.abs()
    } else {
        return None;
    };
    if !a.is_integer() {
        return None;
    }
    let n = a.to_integer();
    let k = n.trailing_zeros()?;
    (n == num_bigint::BigInt::one() << k as usize).then_some(k as u32)
}

pub fn recover_dt(p: &Polynomial) -> Result<DtCertificate, TraceformError> {
    let top = extract_top(p)?;
    recover_from_top(&top)
}

fn recover_from_top(top: &TopForm) -> Result<DtCertificate, TraceformError> {
    if top.top_coeff.is_zero() {
        return Err(TraceformError::ZeroTop);
    }
    let p: Vec<GaussianRational> =
        top.sub_coeffs.iter().map(|s| s.checked_div(&top.top_coeff).expect("nonzero")).collect();
    Ok(DtCertificate {
        q: top.q.clone(),
        integral: p.iter().map(is_integer).collect(),
        p,
        power_of_two: power_of_two_unit(&top.top_coeff),
    })
}

/// Within-pants segments that leave through the slot they entered by.
pub fn scc_count(w: &PathWord, m: &PantsDecomposition) -> u32 {
    let cross: Vec<(usize, i32)> = w
        .tokens
        .iter()
        .filter_map(|t| match *t {
            Token::Cross { cross, dir } => Some((cross, dir)),
            _ => None,
        })
        .collect();
    let r = cross.len();
    (0..r)
        .filter(|&k| {
            let (c0, d0) = cross[k];
            let (c1, d1) = cross[(k + 1) % r];
            match (cross_ends(m, c0, d0), cross_ends(m, c1, d1)) {
                (Ok((_, entered)), Ok((exited, _))) => entered == exited,
                _ => false,
            }
        })
        .count() as u32
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clause {
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub word: String,
    pub q: Vec<u32>,
    pub p: Vec<GaussianRational>,
    pub h: u32,
    pub pass: bool,
    pub clauses: BTreeMap<&'static str, Clause>,
}

impl VerificationReport {
    pub fn to_json_value(&self) -> Value {
        let p: Vec<Value> = self
            .p
            .iter()
            .map(|c| match (is_integer(c), c.re.to_integer().to_i64()) {
                (true, Some(v)) => json!(v),
                _ if c.im.is_zero() => json!(fmt_rational(&c.re)),
                _ => json!(format!("{}+{}i", fmt_rational(&c.re), fmt_rational(&c.im))),
            })
            .collect();
        json!({
            "word": self.word,
            "q": self.q,
            "p": p,
            "h": self.h,
            "pass": self.pass,
            "clauses": self.clauses,
        })
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.clauses.iter().filter(|(_, c)| !c.pass).map(|(k, _)| *k).collect()
    }
}

fn clause(pass: bool, detail: impl Into<String>) -> Clause {
    Clause { pass, detail: detail.into() }
}

/// Checks the shape of `tr ρ(w)` exactly: degrees against crossing counts, the
/// unit times `2^h` top coefficient, integral twists, the claimed coordinates
/// and the remainder bounds.
pub fn verify_top_terms(w: &PathWord, m: &PantsDecomposition) -> Result<VerificationReport, TraceformError> {
    verify_polynomial(w, m, &trace_poly(w, m)?)
}

/// As [`verify_top_terms`] with a precomputed trace.
pub fn verify_polynomial(
    w: &PathWord,
    m: &PantsDecomposition,
    tr: &Polynomial,
) -> Result<VerificationReport, TraceformError> {
    let xi = m.xi();
    let crossings: Vec<u32> = (1..=xi).map(|i| w.cross_count(i)).collect();
    let h = scc_count(w, m);
    let mut clauses = BTreeMap::new();

    if let Some(c) = tr.as_constant() {
        let two = GaussianRational::from_ints(2, 0);
        let parabolic = c == two || c == -&two;
        clauses.insert("parabolic", clause(parabolic, format!("trace {c}, expected ±2")));
        let no_cross = crossings.iter().all(|&k| k == 0);
        clauses.insert("degrees", clause(no_cross, format!("constant trace, crossings {crossings:?}")));
        if let Some(cl) = &w.claimed {
            let ok = cl.q.iter().all(|&x| x == 0);
            clauses.insert("claims", clause(ok, format!("claimed q {:?}, recovered all zero", cl.q)));
        }
        let pass = clauses.values().all(|c| c.pass);
        return Ok(VerificationReport {
            word: w.name.clone(),
            q: vec![0; xi],
            p: vec![GaussianRational::zero(); xi],
            h,
            pass,
            clauses,
        });
    }

    let top = extract_top(tr)?.with_h(h);
    let q = top.q.clone();
    let qsum = top.total();
    clauses.insert("degrees", clause(q == crossings, format!("degrees {q:?}, crossings {crossings:?}")));

    let unit_ok = top.sign_unit.as_ref().is_some_and(|u| power_of_two_unit(u) == Some(0));
    clauses.insert(
        "top_coefficient",
        clause(unit_ok, format!("top {} vs unit·i^{qsum}·2^{h}", top.top_coeff)),
    );

    let cert = if top.top_coeff.is_zero() { None } else { Some(recover_from_top(&top)?) };
    let p = cert.as_ref().map_or_else(|| vec![GaussianRational::zero(); xi], |c| c.p.clone());
    let integral = cert.as_ref().is_some_and(|c| c.integral.iter().all(|&b| b));
    let shown: Vec<String> = p.iter().map(ToString::to_string).collect();
    clauses.insert("integer_twists", clause(integral, format!("p = [{}]", shown.join(", "))));

    if let Some(cl) = &w.claimed {
        let recovered = cert.as_ref().and_then(DtCertificate::coords);
        let ok = recovered.as_ref() == Some(cl);
        let got = recovered.map_or_else(|| "unrecoverable".to_string(), |c| c.to_string());
        clauses.insert("claims", clause(ok, format!("claimed {cl}, recovered {got}")));
    }

    let mut bad = Vec::new();
    for (mono, c) in tr.terms() {
        let e = &mono.0;
        if *e == q {
            continue;
        }
        let is_sub = (0..xi).any(|i| q[i] > 0 && e[i] + 1 == q[i] && (0..xi).all(|j| j == i || e[j] == q[j]));
        if is_sub {
            continue;
        }
        let within = mono.total_degree() + 2 <= qsum && e.iter().zip(&q).all(|(a, b)| a <= b);
        if !within {
            bad.push(format!("{c}·τ^{e:?}"));
        }
    }
    let detail = if bad.is_empty() {
        format!("all remainder terms within total degree {} and per-variable {q:?}", qsum as i64 - 2)
    } else {
        format!("terms beyond the bound: {}", bad.join(", "))
    };
    clauses.insert("remainder", clause(bad.is_empty(), detail));

    let pass = clauses.values().all(|c| c.pass);
    Ok(VerificationReport { word: w.name.clone(), q, p, h, pass, clauses })
}

/// Old-parameter twist coefficient `(p_i − q_i)` read from a trace after undoing the shift.
pub fn old_parameter_ratio(tr: &Polynomial, i: usize) -> Result<GaussianRational, TraceformError> {
    let old = tr.substitute_shift(i, &GaussianRational::from_ints(-1, 0)).map_err(HolonomyError::from)?;
    let top = extract_top(&old)?;
    if top.top_coeff.is_zero() {
        return Err(TraceformError::ZeroTop);
    }
    Ok(top.sub_coeffs[i].checked_div(&top.top_coeff).expect("nonzero"))
}
