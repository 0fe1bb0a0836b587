//! Exact multivariate polynomials over the Gaussian rationals.
//!
//! Coefficients are `a + b i` with `a, b` arbitrary-precision rationals.
//! Terms are kept in a `BTreeMap` keyed by exponent vectors, so iteration and
//! serialization follow lexicographic exponent order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("a polynomial needs at least one variable")]
    NoVariables,
    #[error("evaluation point has {got} coordinates, expected {expected}")]
    PointLength { got: usize, expected: usize },
    #[error("cannot convert non-finite float {0} to a rational")]
    NonFinite(f64),
    #[error("malformed polynomial JSON: {0}")]
    Json(String),
}

/// Gaussian rational `re + im i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact quotient; `None` when dividing by zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let n = other.norm_sqr();
        let num = self * &other.conj();
        Some(Self::new(num.re / &n, num.im / n))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The exact value of an `f64` complex number.
    pub fn from_complex64(z: Complex64) -> Result<Self, PolyError> {
        Ok(Self::new(rational_from_f64(z.re)?, rational_from_f64(z.im)?))
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})+({})i", self.re, self.im)
    }
}

macro_rules! gauss_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a GaussianRational> for &'a GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: &'a GaussianRational) -> GaussianRational {
                let f: fn(&GaussianRational, &GaussianRational) -> GaussianRational = $body;
                f(self, o)
            }
        }
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: GaussianRational) -> GaussianRational {
                (&self).$m(&o)
            }
        }
    };
}

gauss_binop!(Add, add, |a, b| GaussianRational::new(&a.re + &b.re, &a.im + &b.im));
gauss_binop!(Sub, sub, |a, b| GaussianRational::new(&a.re - &b.re, &a.im - &b.im));
gauss_binop!(Mul, mul, |a, b| GaussianRational::new(
    &a.re * &b.re - &a.im * &b.im,
    &a.re * &b.im + &a.im * &b.re
));

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

pub fn rational_from_f64(x: f64) -> Result<BigRational, PolyError> {
    BigRational::from_float(x).ok_or(PolyError::NonFinite(x))
}

/// Nearest-ish `f64` to an exact rational, robust to huge numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 1e300 && d < 1e300 {
            return n / d;
        }
    }
    // Scale both parts down to 64 significant bits and track the exponent.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (r.numer().abs() >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> ds as usize).to_f64().unwrap_or(1.0);
    let v = n / d * 2f64.powi((ns - ds) as i32);
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// Exponent vector; the derived ordering is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars > 0, "a polynomial needs at least one variable");
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::constant(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    /// The coordinate function `τ_i`.
    pub fn var(nvars: usize, i: usize) -> Result<Self, PolyError> {
        if i >= nvars {
            return Err(PolyError::IndexOutOfRange { index: i, nvars });
        }
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, i), GaussianRational::one());
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, combining repeats.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, GaussianRational)>,
    {
        if nvars == 0 {
            return Err(PolyError::NoVariables);
        }
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(PolyError::VarCountMismatch { left: nvars, right: e.len() });
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = &*existing + &c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> GaussianRational {
        self.terms.get(&Monomial(exps.to_vec())).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// `Some(c)` if the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.total_degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree_in(&self, i: usize) -> Result<u32, PolyError> {
        if i >= self.nvars {
            return Err(PolyError::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        Ok(self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_vars(other)?;
        let mut out = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    fn same_vars(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::VarCountMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    /// The exact polynomial `q(τ) = p(τ + c e_i)`.
    pub fn substitute_shift(&self, i: usize, c: &GaussianRational) -> Result<Self, PolyError> {
        if i >= self.nvars {
            return Err(PolyError::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        let maxdeg = self.degree_in(i)? as usize;
        let cpow: Vec<GaussianRational> = (0..=maxdeg as u32).map(|k| c.pow(k)).collect();
        let mut out = Self::zero(self.nvars);
        for (m, v) in &self.terms {
            let e = m.0[i];
            let mut binom = BigInt::one();
            for k in 0..=e {
                // binom = C(e, k)
                let mut mk = m.clone();
                mk.0[i] = k;
                let b = GaussianRational::new(BigRational::from_integer(binom.clone()), BigRational::zero());
                out.add_term(mk, &(v * &b) * &cpow[(e - k) as usize]);
                binom = binom * BigInt::from(e - k) / BigInt::from(k + 1);
            }
        }
        Ok(out)
    }

    /// Floating-point evaluation, summing monomials directly.
    pub fn eval(&self, x: &[Complex64]) -> Result<Complex64, PolyError> {
        self.check_point(x.len())?;
        let maxdeg: Vec<u32> = (0..self.nvars).map(|i| self.degree_in(i).unwrap()).collect();
        let powers: Vec<Vec<Complex64>> = x
            .iter()
            .zip(&maxdeg)
            .map(|(xi, &d)| {
                let mut v = Vec::with_capacity(d as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=d {
                    v.push(acc);
                    acc *= xi;
                }
                v
            })
            .collect();
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex64();
            for (i, &e) in m.0.iter().enumerate() {
                t *= powers[i][e as usize];
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Evaluates exactly at the binary value of `x` and rounds once at the end.
    pub fn eval_exact(&self, x: &[Complex64]) -> Result<Complex64, PolyError> {
        self.check_point(x.len())?;
        let pts = x.iter().map(|z| GaussianRational::from_complex64(*z)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.eval_gaussian(&pts)?.to_complex64())
    }

    /// Exact evaluation at a Gaussian-rational point.
    pub fn eval_gaussian(&self, x: &[GaussianRational]) -> Result<GaussianRational, PolyError> {
        self.check_point(x.len())?;
        let mut powers: Vec<Vec<GaussianRational>> = Vec::with_capacity(self.nvars);
        for (i, xi) in x.iter().enumerate() {
            let d = self.degree_in(i)?;
            let mut v = Vec::with_capacity(d as usize + 1);
            let mut acc = GaussianRational::one();
            for _ in 0..=d {
                v.push(acc.clone());
                acc = &acc * xi;
            }
            powers.push(v);
        }
        let mut sum = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            sum = &sum + &t;
        }
        Ok(sum)
    }

    fn check_point(&self, n: usize) -> Result<(), PolyError> {
        if n != self.nvars {
            return Err(PolyError::PointLength { got: n, expected: self.nvars });
        }
        Ok(())
    }

    fn term_list(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson { exp: m.0.clone(), re: fmt_rational(&c.re), im: fmt_rational(&c.im) })
            .collect()
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(self.term_list()).expect("polynomial serializes")
    }

    /// Compact JSON with keys in `exp, re, im` order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.term_list()).expect("polynomial serializes")
    }

    /// Parses the array form; `nvars` is required only for the empty (zero) polynomial.
    pub fn from_json_value(v: &Value, nvars: Option<usize>) -> Result<Self, PolyError> {
        let items: Vec<TermJson> =
            serde_json::from_value(v.clone()).map_err(|e| PolyError::Json(e.to_string()))?;
        let n = match (items.first(), nvars) {
            (Some(t), Some(n)) if t.exp.len() != n => {
                return Err(PolyError::VarCountMismatch { left: n, right: t.exp.len() })
            }
            (Some(t), _) => t.exp.len(),
            (None, Some(n)) => n,
            (None, None) => return Err(PolyError::Json("empty polynomial without a variable count".into())),
        };
        let mut terms = Vec::with_capacity(items.len());
        for t in items {
            let c = GaussianRational::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            terms.push((t.exp, c));
        }
        Self::from_terms(n, terms)
    }

    pub fn from_json(s: &str, nvars: Option<usize>) -> Result<Self, PolyError> {
        let v: Value = serde_json::from_str(s).map_err(|e| PolyError::Json(e.to_string()))?;
        Self::from_json_value(&v, nvars)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    re: String,
    im: String,
}

pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational, PolyError> {
    let bad = || PolyError::Json(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*t{}", i + 1)?,
                    _ => write!(f, "*t{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

// Operator forms panic on mismatched variable counts; use the `checked_*`
// methods where the inputs are not already known to agree.
impl<'a> Add for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &'a Polynomial) -> Polynomial {
        self.checked_add(o).expect("variable count mismatch")
    }
}

impl<'a> Sub for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &'a Polynomial) -> Polynomial {
        self.checked_sub(o).expect("variable count mismatch")
    }
}

impl<'a> Mul for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &'a Polynomial) -> Polynomial {
        self.checked_mul(o).expect("variable count mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&GaussianRational::from_ints(-1, 0))
    }
}
