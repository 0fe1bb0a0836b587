//! Pants decompositions, Dehn–Thurston coordinates and laminations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::holonomy::PathWord;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SurfaceError {
    #[error("invalid decomposition: {0}")]
    Decomposition(String),
    #[error("coordinate length {got} does not match {expected} pants curves")]
    Length { got: usize, expected: usize },
    #[error("no built-in surface {0:?}")]
    UnknownSurface(String),
    #[error("lamination is not admissible: {0}")]
    Inadmissible(String),
    #[error("component {0} has zero length on a pants curve")]
    ZeroLength(usize),
    #[error("could not complete link system: {0}")]
    LinkSystem(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

/// Signature `(g, n)` of a surface with `n` punctures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SurfaceSig {
    pub genus: u32,
    pub punctures: u32,
}

impl SurfaceSig {
    pub const S11: SurfaceSig = SurfaceSig { genus: 1, punctures: 1 };
    pub const S04: SurfaceSig = SurfaceSig { genus: 0, punctures: 4 };
    pub const S12: SurfaceSig = SurfaceSig { genus: 1, punctures: 2 };

    /// Number of pants curves, `ξ = 3g - 3 + n`.
    pub fn complexity(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.punctures as i64
    }

    pub fn pants_count(&self) -> i64 {
        2 * self.genus as i64 - 2 + self.punctures as i64
    }

    pub fn builtin_name(&self) -> Option<&'static str> {
        match *self {
            Self::S11 => Some("s11"),
            Self::S04 => Some("s04"),
            Self::S12 => Some("s12"),
            _ => None,
        }
    }
}

impl FromStr for SurfaceSig {
    type Err = SurfaceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "s11" => Ok(Self::S11),
            "s04" => Ok(Self::S04),
            "s12" => Ok(Self::S12),
            _ => Err(SurfaceError::UnknownSurface(s.to_string())),
        }
    }
}

/// Boundary label of a pants: the fixed point of its parabolic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "inf")]
    Inf,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Zero, Label::One, Label::Inf];
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Zero => "0",
            Label::One => "1",
            Label::Inf => "inf",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot(pub usize, pub Label);

impl Slot {
    pub fn pants(&self) -> usize {
        self.0
    }
    pub fn label(&self) -> Label {
        self.1
    }
}

/// Pants curve `curve` (1-based) joins the slots `ends[0]` and `ends[1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub curve: usize,
    pub ends: [Slot; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct DecompositionJson {
    genus: u32,
    boundary: u32,
    pants: usize,
    gluings: Vec<Gluing>,
}

/// A pants decomposition with labelled three-holed spheres.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PantsDecomposition {
    sig: SurfaceSig,
    pants: usize,
    /// Indexed by `curve - 1`.
    gluings: Vec<Gluing>,
    slot_curve: BTreeMap<Slot, usize>,
}

impl PantsDecomposition {
    pub fn new(genus: u32, boundary: u32, pants: usize, mut gluings: Vec<Gluing>) -> Result<Self, SurfaceError> {
        let err = |m: String| Err(SurfaceError::Decomposition(m));
        let sig = SurfaceSig { genus, punctures: boundary };
        if sig.complexity() < 1 {
            return err(format!("surface ({genus},{boundary}) has no pants curves"));
        }
        if sig.pants_count() != pants as i64 {
            return err(format!("expected {} pants, got {pants}", sig.pants_count()));
        }
        if gluings.len() as i64 != sig.complexity() {
            return err(format!("expected {} gluings, got {}", sig.complexity(), gluings.len()));
        }
        gluings.sort_by_key(|g| g.curve);
        let mut slot_curve = BTreeMap::new();
        for (k, g) in gluings.iter().enumerate() {
            if g.curve != k + 1 {
                return err("curves must be numbered 1..=ξ without repeats".into());
            }
            for s in g.ends {
                if s.0 >= pants {
                    return err(format!("pants index {} out of range", s.0));
                }
                if slot_curve.insert(s, g.curve).is_some() {
                    return err(format!("slot ({}, {}) glued twice", s.0, s.1));
                }
            }
        }
        // Connectedness via union-find on pants.
        let mut parent: Vec<usize> = (0..pants).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for g in &gluings {
            let a = find(&mut parent, g.ends[0].0);
            let b = find(&mut parent, g.ends[1].0);
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..pants).any(|j| find(&mut parent, j) != root) {
            return err("decomposition is disconnected".into());
        }
        Ok(Self { sig, pants, gluings, slot_curve })
    }

    /// The decompositions that ship with catalogs.
    pub fn builtin(sig: SurfaceSig) -> Result<Self, SurfaceError> {
        use Label::*;
        let g = |curve, a: Slot, b: Slot| Gluing { curve, ends: [a, b] };
        match sig {
            SurfaceSig::S11 => Self::new(1, 1, 1, vec![g(1, Slot(0, Inf), Slot(0, Zero))]),
            SurfaceSig::S04 => Self::new(0, 4, 2, vec![g(1, Slot(0, Inf), Slot(1, Inf))]),
            SurfaceSig::S12 => Self::new(
                1,
                2,
                2,
                vec![g(1, Slot(0, Inf), Slot(1, Inf)), g(2, Slot(0, Zero), Slot(1, One))],
            ),
            other => Err(SurfaceError::UnknownSurface(format!("({},{})", other.genus, other.punctures))),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, SurfaceError> {
        let j: DecompositionJson = serde_json::from_str(s).map_err(|e| SurfaceError::Json(e.to_string()))?;
        Self::new(j.genus, j.boundary, j.pants, j.gluings)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DecompositionJson {
            genus: self.sig.genus,
            boundary: self.sig.punctures,
            pants: self.pants,
            gluings: self.gluings.clone(),
        })
        .expect("decomposition serializes")
    }

    pub fn sig(&self) -> SurfaceSig {
        self.sig
    }

    pub fn xi(&self) -> usize {
        self.gluings.len()
    }

    pub fn pants_count(&self) -> usize {
        self.pants
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    /// Gluing of the 1-based curve index.
    pub fn gluing(&self, curve: usize) -> Option<&Gluing> {
        curve.checked_sub(1).and_then(|k| self.gluings.get(k))
    }

    /// 1-based curve glued into `slot`, or `None` for a puncture.
    pub fn slot_curve(&self, slot: Slot) -> Option<usize> {
        self.slot_curve.get(&slot).copied()
    }

    pub fn free_slots(&self) -> Vec<Slot> {
        (0..self.pants)
            .flat_map(|j| Label::ALL.map(|l| Slot(j, l)))
            .filter(|s| !self.slot_curve.contains_key(s))
            .collect()
    }
}

/// Dehn–Thurston coordinates `(q_i, p_i)`, one pair per pants curve.
///
/// `q` is stored signed so that malformed input can be reported by [`validate_dt`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DTCoordinates {
    pub q: Vec<i64>,
    pub p: Vec<i64>,
}

impl DTCoordinates {
    pub fn new(q: Vec<i64>, p: Vec<i64>) -> Self {
        Self { q, p }
    }

    /// From the interleaved list `q_1, p_1, q_2, p_2, ...`.
    pub fn from_interleaved(v: &[i64]) -> Result<Self, SurfaceError> {
        if v.len() % 2 != 0 {
            return Err(SurfaceError::Json(format!("odd coordinate list length {}", v.len())));
        }
        Ok(Self { q: v.iter().step_by(2).copied().collect(), p: v.iter().skip(1).step_by(2).copied().collect() })
    }

    pub fn interleaved(&self) -> Vec<i64> {
        self.q.iter().zip(&self.p).flat_map(|(&q, &p)| [q, p]).collect()
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn is_pants_curve(&self) -> bool {
        self.q.iter().all(|&q| q == 0)
    }
}

impl fmt::Display for DTCoordinates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.q.iter().zip(&self.p).map(|(q, p)| format!("({q},{p})")).collect();
        f.write_str(&parts.join(""))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DtViolation {
    Length { got: usize, expected: usize },
    NegativeLength { curve: usize, q: i64 },
    NegativeTwist { curve: usize, p: i64 },
    Parity { pants: usize, sum: i64 },
}

impl fmt::Display for DtViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DtViolation::Length { got, expected } => write!(f, "{got} pairs given, {expected} expected"),
            DtViolation::NegativeLength { curve, q } => write!(f, "q_{curve} = {q} is negative"),
            DtViolation::NegativeTwist { curve, p } => write!(f, "q_{curve} = 0 but p_{curve} = {p} < 0"),
            DtViolation::Parity { pants, sum } => write!(f, "pants {pants}: boundary lengths sum to odd {sum}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DtValidation {
    pub valid: bool,
    pub violations: Vec<DtViolation>,
}

/// Checks the two Dehn conditions. Parity is imposed only on pants whose three
/// boundary slots are all glued; a curve met twice counts twice.
pub fn validate_dt(c: &DTCoordinates, m: &PantsDecomposition) -> DtValidation {
    let xi = m.xi();
    let mut violations = Vec::new();
    if c.q.len() != xi || c.p.len() != xi {
        violations.push(DtViolation::Length { got: c.q.len().min(c.p.len()), expected: xi });
        return DtValidation { valid: false, violations };
    }
    for i in 0..xi {
        if c.q[i] < 0 {
            violations.push(DtViolation::NegativeLength { curve: i + 1, q: c.q[i] });
        } else if c.q[i] == 0 && c.p[i] < 0 {
            violations.push(DtViolation::NegativeTwist { curve: i + 1, p: c.p[i] });
        }
    }
    for j in 0..m.pants_count() {
        let curves: Vec<Option<usize>> = Label::ALL.iter().map(|&l| m.slot_curve(Slot(j, l))).collect();
        if curves.iter().all(Option::is_some) {
            let sum: i64 = curves.iter().map(|k| c.q[k.unwrap() - 1]).sum();
            if sum.rem_euclid(2) != 0 {
                violations.push(DtViolation::Parity { pants: j, sum });
            }
        }
    }
    DtValidation { valid: violations.is_empty(), violations }
}

/// `⟨a, b⟩ = Σ q_i p'_i − q'_i p_i`.
pub fn thurston_pairing(a: &DTCoordinates, b: &DTCoordinates) -> Result<i64, SurfaceError> {
    if a.len() != b.len() || a.q.len() != a.p.len() || b.q.len() != b.p.len() {
        return Err(SurfaceError::Length { got: b.len(), expected: a.len() });
    }
    Ok((0..a.len()).map(|i| a.q[i] * b.p[i] - b.q[i] * a.p[i]).sum())
}

/// Real-weighted version of the pairing.
pub fn pairing_f64(a: &LaminationCoords, b: &LaminationCoords) -> f64 {
    a.q.iter().zip(&a.p).zip(b.q.iter().zip(&b.p)).map(|((q, p), (q2, p2))| q * p2 - q2 * p).sum()
}

/// `x ↦ x*` with `(q_i, p_i)* = (p_i, −q_i)`, so that `⟨a, b⟩ = a · b*`.
pub fn star(a: &DTCoordinates) -> DTCoordinates {
    DTCoordinates { q: a.p.clone(), p: a.q.iter().map(|q| -q).collect() }
}

/// Euclidean dot product of interleaved coordinate vectors.
pub fn dot(a: &DTCoordinates, b: &DTCoordinates) -> i64 {
    a.interleaved().iter().zip(b.interleaved()).map(|(x, y)| x * y).sum()
}

/// Real Dehn–Thurston coordinates of a weighted multicurve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaminationCoords {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl LaminationCoords {
    pub fn scaled(c: &DTCoordinates, w: f64) -> Self {
        Self { q: c.q.iter().map(|&x| w * x as f64).collect(), p: c.p.iter().map(|&x| w * x as f64).collect() }
    }
}

/// `Σ a_i γ_i` with positive rational weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalLamination {
    pub components: Vec<(BigRational, PathWord)>,
}

impl RationalLamination {
    pub fn single(w: PathWord) -> Self {
        Self::weighted(vec![(BigRational::from_integer(1.into()), w)])
    }

    pub fn weighted(components: Vec<(BigRational, PathWord)>) -> Self {
        Self { components }
    }

    pub fn coords(&self) -> Result<LaminationCoords, SurfaceError> {
        let xi = self.components.first().map(|(_, w)| claimed(w).map(|c| c.len())).transpose()?.unwrap_or(0);
        let mut out = LaminationCoords { q: vec![0.0; xi], p: vec![0.0; xi] };
        for (a, w) in &self.components {
            let c = claimed(w)?;
            if c.len() != xi {
                return Err(SurfaceError::Length { got: c.len(), expected: xi });
            }
            let a = crate::exactpoly::rational_to_f64(a);
            for i in 0..xi {
                out.q[i] += a * c.q[i] as f64;
                out.p[i] += a * c.p[i] as f64;
            }
        }
        Ok(out)
    }
}

fn claimed(w: &PathWord) -> Result<&DTCoordinates, SurfaceError> {
    w.claimed.as_ref().ok_or_else(|| SurfaceError::Inadmissible(format!("word {} has no coordinates", w.name)))
}

/// Admissible: nonempty, positive weights, no component a pants curve, components
/// pairwise non-intersecting in the pairing and pairwise non-parallel.
pub fn is_admissible(l: &RationalLamination) -> Result<(), SurfaceError> {
    if l.components.is_empty() {
        return Err(SurfaceError::Inadmissible("empty lamination".into()));
    }
    let mut coords = Vec::new();
    for (a, w) in &l.components {
        if *a <= BigRational::zero() {
            return Err(SurfaceError::Inadmissible(format!("weight of {} is not positive", w.name)));
        }
        let c = claimed(w)?;
        if c.is_pants_curve() {
            return Err(SurfaceError::Inadmissible(format!("{} is a pants curve", w.name)));
        }
        coords.push((w.name.clone(), c.clone()));
    }
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            let (ni, ci) = &coords[i];
            let (nj, cj) = &coords[j];
            if thurston_pairing(ci, cj)? != 0 {
                return Err(SurfaceError::Inadmissible(format!("{ni} and {nj} intersect")));
            }
            if proportional(ci, cj) {
                return Err(SurfaceError::Inadmissible(format!("{ni} and {nj} are parallel")));
            }
        }
    }
    Ok(())
}

/// Positive proportionality of integer vectors.
pub fn proportional(a: &DTCoordinates, b: &DTCoordinates) -> bool {
    let x = a.interleaved();
    let y = b.interleaved();
    if x.len() != y.len() {
        return false;
    }
    let xx: i128 = x.iter().map(|&v| (v as i128) * v as i128).sum();
    let yy: i128 = y.iter().map(|&v| (v as i128) * v as i128).sum();
    let xy: i128 = x.iter().zip(&y).map(|(&u, &v)| u as i128 * v as i128).sum();
    xy > 0 && xy * xy == xx * yy
}

/// Line `w_i(t) = −p_i/q_i + i t q_1/q_i` approximating a pleating ray.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticLine {
    pub coords: LaminationCoords,
}

impl AsymptoticLine {
    pub fn new(coords: LaminationCoords) -> Result<Self, SurfaceError> {
        if let Some(i) = coords.q.iter().position(|&q| q <= 0.0) {
            return Err(SurfaceError::ZeroLength(i + 1));
        }
        Ok(Self { coords })
    }

    pub fn of(l: &RationalLamination) -> Result<Self, SurfaceError> {
        Self::new(l.coords()?)
    }

    pub fn point(&self, t: f64) -> Vec<Complex64> {
        let q1 = self.coords.q[0];
        self.coords.q.iter().zip(&self.coords.p).map(|(q, p)| Complex64::new(-p / q, t * q1 / q)).collect()
    }
}

pub fn line_point(l: &RationalLamination, t: f64) -> Result<Vec<Complex64>, SurfaceError> {
    Ok(AsymptoticLine::of(l)?.point(t))
}

/// A decomposition together with dual curves and a list of known simple curves.
#[derive(Debug, Clone)]
pub struct Marking {
    pub decomposition: PantsDecomposition,
    /// `duals[i]` crosses pants curve `i + 1` and no other.
    pub duals: Vec<PathWord>,
    pub candidates: Vec<PathWord>,
}

#[derive(Debug, Clone)]
pub struct LinkSystem {
    /// The completing disjoint curves `γ_{k+1}, ..., γ_ξ`.
    pub gammas: Vec<PathWord>,
    /// `duals[j]` meets `gammas[j]` and no other curve of the system.
    pub duals: Vec<PathWord>,
}

/// Completes `k` disjoint curves to `ξ`, with a dual for each added curve, drawing
/// from the marking's candidate list in order.
pub fn complete_link_system(given: &[PathWord], m: &Marking) -> Result<LinkSystem, SurfaceError> {
    let xi = m.decomposition.xi();
    let k = given.len();
    let fail = |s: String| Err(SurfaceError::LinkSystem(s));
    if k == 0 || k > xi {
        return fail(format!("need between 1 and {xi} curves, got {k}"));
    }
    let mut gs: Vec<DTCoordinates> = Vec::new();
    for w in given {
        let c = claimed(w)?.clone();
        if c.len() != xi {
            return Err(SurfaceError::Length { got: c.len(), expected: xi });
        }
        if c.is_pants_curve() {
            return fail(format!("{} is a pants curve", w.name));
        }
        gs.push(c);
    }
    for i in 0..k {
        for j in i + 1..k {
            if thurston_pairing(&gs[i], &gs[j])? != 0 {
                return fail(format!("{} and {} intersect", given[i].name, given[j].name));
            }
        }
    }
    if k == xi {
        return Ok(LinkSystem { gammas: vec![], duals: vec![] });
    }
    let cands: Vec<(&PathWord, DTCoordinates)> = m
        .candidates
        .iter()
        .filter_map(|w| w.claimed.clone().map(|c| (w, c)))
        .filter(|(_, c)| c.len() == xi && !c.is_pants_curve())
        .collect();
    let mut gammas: Vec<PathWord> = Vec::new();
    let mut all = gs.clone();
    while all.len() < xi {
        let pick = cands.iter().find(|(_, c)| {
            all.iter().all(|g| thurston_pairing(g, c) == Ok(0) && !proportional(g, c))
                && rational_rank(&[all.clone(), vec![c.clone()]].concat()) == all.len() + 1
        });
        match pick {
            Some((w, c)) => {
                gammas.push((*w).clone());
                all.push(c.clone());
            }
            None => return fail(format!("no disjoint curve extends the system of {}", all.len())),
        }
    }
    let mut duals: Vec<PathWord> = Vec::new();
    let mut rows = all.clone();
    for j in k..xi {
        let pick = cands.iter().find(|(_, c)| {
            (0..xi).all(|l| {
                let pr = thurston_pairing(&all[l], c).unwrap_or(0);
                if l == j {
                    pr != 0
                } else {
                    pr == 0
                }
            }) && rational_rank(&[rows.clone(), vec![c.clone()]].concat()) == rows.len() + 1
        });
        match pick {
            Some((w, c)) => {
                duals.push((*w).clone());
                rows.push(c.clone());
            }
            None => return fail(format!("no dual found for curve {}", j + 1)),
        }
    }
    if rational_rank(&rows) != 2 * xi - k {
        return fail("link system is degenerate".into());
    }
    Ok(LinkSystem { gammas, duals })
}

/// Rank over the rationals of interleaved coordinate vectors.
pub fn rational_rank(rows: &[DTCoordinates]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.interleaved().into_iter().map(|v| BigRational::from_integer(v.into())).collect())
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, piv);
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[rank][col];
                let base = m[rank].clone();
                for (x, b) in m[r].iter_mut().zip(base) {
                    *x -= &f * b;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dt(v: &[i64]) -> DTCoordinates {
        DTCoordinates::from_interleaved(v).unwrap()
    }

    #[test]
    fn builtins_have_expected_shape() {
        let s11 = PantsDecomposition::builtin(SurfaceSig::S11).unwrap();
        assert_eq!((s11.xi(), s11.pants_count(), s11.free_slots().len()), (1, 1, 1));
        let s04 = PantsDecomposition::builtin(SurfaceSig::S04).unwrap();
        assert_eq!((s04.xi(), s04.pants_count(), s04.free_slots().len()), (1, 2, 4));
        let s12 = PantsDecomposition::builtin(SurfaceSig::S12).unwrap();
        assert_eq!((s12.xi(), s12.pants_count(), s12.free_slots().len()), (2, 2, 2));
        assert_eq!(s12.slot_curve(Slot(1, Label::One)), Some(2));
        assert_eq!(s12.slot_curve(Slot(1, Label::Zero)), None);
    }

    #[test]
    fn json_round_trip() {
        let s12 = PantsDecomposition::builtin(SurfaceSig::S12).unwrap();
        let j = s12.to_json();
        assert!(j.contains(r#"[0,"inf"]"#));
        assert_eq!(PantsDecomposition::from_json(&j).unwrap(), s12);
    }

    #[test]
    fn rejects_bad_decompositions() {
        let bad = r#"{"genus":1,"boundary":1,"pants":1,"gluings":[{"curve":1,"ends":[[0,"0"],[0,"0"]]}]}"#;
        assert!(PantsDecomposition::from_json(bad).is_err());
        let wrong_count = r#"{"genus":1,"boundary":2,"pants":2,"gluings":[{"curve":1,"ends":[[0,"0"],[1,"0"]]}]}"#;
        assert!(PantsDecomposition::from_json(wrong_count).is_err());
        let connected = r#"{"genus":2,"boundary":0,"pants":2,"gluings":[
            {"curve":1,"ends":[[0,"0"],[0,"1"]]},{"curve":2,"ends":[[1,"0"],[1,"1"]]},
            {"curve":3,"ends":[[0,"inf"],[1,"inf"]]}]}"#;
        assert!(PantsDecomposition::from_json(connected).is_ok());
        assert!(PantsDecomposition::from_json("{").is_err());
    }

    #[test]
    fn dehn_conditions() {
        let s11 = PantsDecomposition::builtin(SurfaceSig::S11).unwrap();
        assert!(validate_dt(&dt(&[1, 0]), &s11).valid);
        assert!(validate_dt(&dt(&[0, 1]), &s11).valid);
        let v = validate_dt(&dt(&[0, -1]), &s11);
        assert!(!v.valid);
        assert_eq!(v.violations, vec![DtViolation::NegativeTwist { curve: 1, p: -1 }]);
        assert!(!validate_dt(&dt(&[-1, 0]), &s11).valid);
        assert!(!validate_dt(&dt(&[1, 0, 1, 0]), &s11).valid);
    }

    #[test]
    fn parity_on_closed_genus_two() {
        let g2 = PantsDecomposition::from_json(
            r#"{"genus":2,"boundary":0,"pants":2,"gluings":[
            {"curve":1,"ends":[[0,"0"],[1,"0"]]},{"curve":2,"ends":[[0,"1"],[1,"1"]]},
            {"curve":3,"ends":[[0,"inf"],[1,"inf"]]}]}"#,
        )
        .unwrap();
        let v = validate_dt(&DTCoordinates::new(vec![1, 0, 0], vec![0, 0, 0]), &g2);
        assert!(!v.valid);
        assert_eq!(v.violations.len(), 2);
        assert!(validate_dt(&DTCoordinates::new(vec![1, 1, 0], vec![0, 0, 0]), &g2).valid);
    }

    #[test]
    fn pairing_and_star() {
        let a = dt(&[1, 0, 1, 0]);
        let b = dt(&[1, 2, 1, -2]);
        assert_eq!(thurston_pairing(&a, &b).unwrap(), 0);
        let c = dt(&[2, 0, 0, 0]);
        assert_eq!(thurston_pairing(&b, &c).unwrap(), -4);
        assert_eq!(dot(&b, &star(&c)), -4);
        assert!(thurston_pairing(&a, &dt(&[1, 0])).is_err());
    }

    #[test]
    fn rank_and_proportionality() {
        assert!(proportional(&dt(&[2, 2]), &dt(&[1, 1])));
        assert!(!proportional(&dt(&[2, 2]), &dt(&[-1, -1])));
        assert_eq!(rational_rank(&[dt(&[1, 0, 1, 0]), dt(&[2, 0, 2, 0])]), 1);
        assert_eq!(rational_rank(&[dt(&[1, 0, 1, 0]), dt(&[1, 2, 1, -2]), dt(&[2, 0, 0, 0])]), 3);
    }

    #[test]
    fn line_points() {
        let l = AsymptoticLine::new(LaminationCoords { q: vec![2.0, 1.0], p: vec![1.0, -3.0] }).unwrap();
        let w = l.point(10.0);
        assert_eq!(w[0], Complex64::new(-0.5, 10.0));
        assert_eq!(w[1], Complex64::new(3.0, 20.0));
        assert!(AsymptoticLine::new(LaminationCoords { q: vec![1.0, 0.0], p: vec![0.0, 1.0] }).is_err());
    }
}
