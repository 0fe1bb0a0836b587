//! Command-line front end. [`run`] returns the exit code and both output
//! streams so that commands can be exercised in-process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::json;

use crate::holonomy::{builtin_marking, catalog, trace_poly, PathWord};
use crate::pleating::{deviation, trace_ray, Mode, SolverOptions};
use crate::surface::{
    proportional, thurston_pairing, validate_dt, AsymptoticLine, DTCoordinates, LaminationCoords,
    PantsDecomposition, RationalLamination, SurfaceSig,
};
use crate::traceform::verify_top_terms;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SEMANTIC: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Semantic(String),
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Semantic(_) => EXIT_SEMANTIC,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Semantic(m) | CliError::Numerical(m) => m,
        }
    }
}

fn usage(m: impl std::fmt::Display) -> CliError {
    CliError::Usage(m.to_string())
}

fn semantic(m: impl std::fmt::Display) -> CliError {
    CliError::Semantic(m.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "pleatray", version, about = "Plumbing trace polynomials and pleating rays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check Dehn–Thurston coordinates against the decomposition.
    Validate(ValidateArgs),
    /// Thurston pairing of two coordinate vectors.
    Pairing(PairingArgs),
    /// Print the symbolic trace polynomial of a word.
    TracePoly(WordArgs),
    /// Verify the top terms of catalog or supplied words.
    VerifyTop(VerifyArgs),
    /// Trace a pleating ray.
    Ray(RayArgs),
    /// Sample the asymptotic line.
    Line(LineArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exact,
    Pinned,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Decomposition JSON file or built-in name (s11, s04, s12).
    #[arg(long)]
    pub surface: String,
    /// Interleaved `q1,p1,q2,p2,...` or a JSON file `{"q":[..],"p":[..]}`.
    #[arg(long, allow_hyphen_values = true)]
    pub coords: String,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct PairingArgs {
    #[arg(long)]
    pub surface: String,
    #[arg(long, allow_hyphen_values = true)]
    pub coords: String,
    /// Second coordinate vector.
    #[arg(long = "with", allow_hyphen_values = true)]
    pub other: String,
}

#[derive(Args, Debug)]
pub struct WordArgs {
    #[arg(long)]
    pub surface: String,
    /// Catalog word name or PathWord JSON file.
    #[arg(long)]
    pub word: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub surface: String,
    /// Catalog word name or JSON file with one word or a list; the whole catalog if absent.
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RayArgs {
    #[arg(long)]
    pub surface: String,
    /// Lamination coordinates `q1,p1,...`.
    #[arg(long, allow_hyphen_values = true)]
    pub lam: String,
    /// Strictly decreasing heights.
    #[arg(long, default_value = "80,40,20,10")]
    pub schedule: String,
    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct LineArgs {
    /// Optional decomposition used to check the coordinate count.
    #[arg(long)]
    pub surface: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lam: String,
    #[arg(long, default_value = "80,40,20,10")]
    pub schedule: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Outcome of one invocation.
#[derive(Debug, Default)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut out = Output::default();
    let res = match &cli.command {
        Command::Validate(a) => cmd_validate(a, &mut out),
        Command::Pairing(a) => cmd_pairing(a, &mut out),
        Command::TracePoly(a) => cmd_trace_poly(a, &mut out),
        Command::VerifyTop(a) => cmd_verify_top(a, &mut out),
        Command::Ray(a) => cmd_ray(a, &mut out),
        Command::Line(a) => cmd_line(a, &mut out),
    };
    if let Err(e) = res {
        out.code = e.code();
        let _ = writeln!(out.stderr, "error: {}", e.message());
    }
    out
}

/// Loads a decomposition file or a built-in by name.
pub fn load_surface(s: &str) -> Result<PantsDecomposition, CliError> {
    let p = Path::new(s);
    if p.exists() {
        let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{s}: {e}")))?;
        return PantsDecomposition::from_json(&text).map_err(|e| usage(format!("{s}: {e}")));
    }
    match s.parse::<SurfaceSig>() {
        Ok(sig) => PantsDecomposition::builtin(sig).map_err(usage),
        Err(_) => Err(usage(format!("{s}: no such file or built-in surface"))),
    }
}

/// Built-in signature whose decomposition matches `m` exactly.
fn builtin_sig(m: &PantsDecomposition) -> Option<SurfaceSig> {
    let sig = m.sig();
    PantsDecomposition::builtin(sig).ok().filter(|b| b == m).map(|_| sig)
}

fn surface_catalog(m: &PantsDecomposition) -> Result<Vec<PathWord>, CliError> {
    let sig = builtin_sig(m).ok_or_else(|| semantic("no catalog for this decomposition"))?;
    catalog(sig).map_err(semantic)
}

fn parse_ints(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| usage(format!("bad integer {x:?} in {s:?}")))).collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>, CliError> {
    if s.trim().is_empty() {
        return Err(usage("empty list"));
    }
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("bad number {x:?} in {s:?}")))).collect()
}

fn load_coords(s: &str) -> Result<DTCoordinates, CliError> {
    let p = Path::new(s);
    if p.exists() {
        let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{s}: {e}")))?;
        let c: DTCoordinates = serde_json::from_str(&text).map_err(|e| usage(format!("{s}: {e}")))?;
        if c.q.len() != c.p.len() {
            return Err(usage(format!("{s}: q and p differ in length")));
        }
        return Ok(c);
    }
    DTCoordinates::from_interleaved(&parse_ints(s)?).map_err(usage)
}

fn load_words(m: &PantsDecomposition, s: &str) -> Result<Vec<PathWord>, CliError> {
    let p = Path::new(s);
    if p.exists() {
        let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{s}: {e}")))?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| usage(format!("{s}: {e}")))?;
        let words: Vec<PathWord> = if v.is_array() {
            serde_json::from_value(v).map_err(|e| usage(format!("{s}: {e}")))?
        } else {
            vec![serde_json::from_value(v).map_err(|e| usage(format!("{s}: {e}")))?]
        };
        return Ok(words);
    }
    let cat = surface_catalog(m).map_err(|_| usage(format!("{s}: no such file, and no catalog for this surface")))?;
    cat.into_iter().find(|w| w.name == s).map(|w| vec![w]).ok_or_else(|| usage(format!("unknown word {s:?}")))
}

fn emit(out: &mut Output, path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            out.stdout.push_str(text);
            Ok(())
        }
    }
}

fn pick_format(explicit: Option<Format>, out: &Option<PathBuf>) -> Format {
    explicit.unwrap_or_else(|| match out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    })
}

pub fn cmd_validate(a: &ValidateArgs, out: &mut Output) -> Result<(), CliError> {
    let m = load_surface(&a.surface)?;
    let c = load_coords(&a.coords)?;
    let v = validate_dt(&c, &m);
    if a.format == Some(Format::Json) {
        let _ = writeln!(out.stdout, "{}", serde_json::to_string(&v).expect("serializes"));
    } else if v.valid {
        let _ = writeln!(out.stdout, "valid {c}");
    } else {
        let _ = writeln!(out.stdout, "invalid {c}");
        for x in &v.violations {
            let _ = writeln!(out.stdout, "  {x}");
        }
    }
    if !v.valid {
        out.code = EXIT_SEMANTIC;
    }
    Ok(())
}

pub fn cmd_pairing(a: &PairingArgs, out: &mut Output) -> Result<(), CliError> {
    let m = load_surface(&a.surface)?;
    let x = load_coords(&a.coords)?;
    let y = load_coords(&a.other)?;
    if x.len() != m.xi() || y.len() != m.xi() {
        return Err(usage(format!("coordinates must have {} pairs", m.xi())));
    }
    let v = thurston_pairing(&x, &y).map_err(usage)?;
    let _ = writeln!(out.stdout, "{v}");
    Ok(())
}

pub fn cmd_trace_poly(a: &WordArgs, out: &mut Output) -> Result<(), CliError> {
    let m = load_surface(&a.surface)?;
    let words = load_words(&m, &a.word)?;
    let [w] = words.as_slice() else { return Err(usage("trace-poly takes exactly one word")) };
    let p = trace_poly(w, &m).map_err(semantic)?;
    emit(out, &a.out, &format!("{}\n", p.to_json()))
}

pub fn cmd_verify_top(a: &VerifyArgs, out: &mut Output) -> Result<(), CliError> {
    let m = load_surface(&a.surface)?;
    let words = match &a.word {
        Some(s) => load_words(&m, s)?,
        None => surface_catalog(&m)?,
    };
    if words.is_empty() {
        return Err(usage("no words to verify"));
    }
    let mut reports = Vec::new();
    let mut all = true;
    for w in &words {
        let r = verify_top_terms(w, &m).map_err(semantic)?;
        if !r.pass {
            all = false;
            for k in r.failing() {
                let _ = writeln!(out.stderr, "{}: clause {k} failed: {}", w.name, r.clauses[k].detail);
            }
        }
        reports.push(r.to_json_value());
    }
    emit(out, &a.out, &format!("{}\n", serde_json::to_string_pretty(&reports).expect("serializes")))?;
    if !all {
        out.code = EXIT_SEMANTIC;
    }
    Ok(())
}

/// Writes `lam` as a positive combination of disjoint catalog curves.
pub fn lamination_from_coords(
    target: &DTCoordinates,
    catalog: &[PathWord],
) -> Result<RationalLamination, CliError> {
    let curves: Vec<(&PathWord, &DTCoordinates)> =
        catalog.iter().filter_map(|w| w.claimed.as_ref().map(|c| (w, c))).filter(|(_, c)| !c.is_pants_curve()).collect();
    let tv = target.interleaved();
    for (w, c) in &curves {
        if proportional(c, target) {
            let cv = c.interleaved();
            let k = cv.iter().position(|&x| x != 0).expect("nonzero curve");
            let r = BigRational::new(BigInt::from(tv[k]), BigInt::from(cv[k]));
            return Ok(RationalLamination::weighted(vec![(r, (*w).clone())]));
        }
    }
    for (i, (wa, a)) in curves.iter().enumerate() {
        for (wb, b) in &curves[i + 1..] {
            if thurston_pairing(a, b) != Ok(0) || proportional(a, b) {
                continue;
            }
            if let Some((x, y)) = solve_pair(&a.interleaved(), &b.interleaved(), &tv) {
                if x.is_positive() && y.is_positive() {
                    return Ok(RationalLamination::weighted(vec![(x, (*wa).clone()), (y, (*wb).clone())]));
                }
            }
        }
    }
    Err(semantic(format!("no catalog curves combine to {target}")))
}

/// Exact `x a + y b = t`, if solvable.
fn solve_pair(a: &[i64], b: &[i64], t: &[i64]) -> Option<(BigRational, BigRational)> {
    let n = a.len();
    let r = |v: i64| BigRational::from_integer(v.into());
    for i in 0..n {
        for j in i + 1..n {
            let det = r(a[i] * b[j] - a[j] * b[i]);
            if det.is_zero() {
                continue;
            }
            let x = r(t[i] * b[j] - t[j] * b[i]) / &det;
            let y = r(a[i] * t[j] - a[j] * t[i]) / &det;
            let ok = (0..n).all(|k| &x * r(a[k]) + &y * r(b[k]) == r(t[k]));
            return ok.then_some((x, y));
        }
    }
    None
}

pub fn cmd_ray(a: &RayArgs, out: &mut Output) -> Result<(), CliError> {
    let m = load_surface(&a.surface)?;
    let target = DTCoordinates::from_interleaved(&parse_ints(&a.lam)?).map_err(usage)?;
    if target.len() != m.xi() {
        return Err(usage(format!("lamination must have {} pairs", m.xi())));
    }
    let schedule = parse_floats(&a.schedule)?;
    if !(a.tol > 0.0) {
        return Err(usage("tolerance must be positive"));
    }
    let sig = builtin_sig(&m).ok_or_else(|| semantic("rays need a built-in decomposition"))?;
    let marking = builtin_marking(sig).map_err(semantic)?;
    if target.q.iter().any(|&q| q <= 0) {
        return Err(semantic(format!("lamination {target} is not admissible: some q_i is not positive")));
    }
    let lam = lamination_from_coords(&target, &marking.candidates)?;
    let mode = match a.mode {
        ModeArg::Exact => Mode::ExactRay,
        ModeArg::Pinned => Mode::PinnedImaginary,
        ModeArg::Auto if lam.components.len() == 1 => Mode::ExactRay,
        ModeArg::Auto => Mode::PinnedImaginary,
    };
    let opts = SolverOptions { tol: a.tol, ..SolverOptions::default() };
    let trace = trace_ray(&lam, &marking, &schedule, mode, &opts).map_err(|e| {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else if matches!(e, crate::pleating::PleatingError::Schedule) {
            usage(e)
        } else {
            semantic(e)
        }
    })?;
    let text = match pick_format(a.format, &a.out) {
        Format::Csv => trace.to_csv(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&trace.to_json_value()).expect("serializes")),
    };
    emit(out, &a.out, &text)?;
    let _ = writeln!(out.stderr, "mode {} constraints {}", trace.mode.name(), trace.words.join(","));
    let _ = writeln!(out.stderr, "{:>10} {:>14} {:>14} {:>12}", "t", "max re dev", "max im dev", "residual");
    for s in &trace.samples {
        let d = deviation(&trace.line, s);
        let mx = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(*x));
        let _ = writeln!(out.stderr, "{:>10} {:>14.6e} {:>14.6e} {:>12.3e}", s.t, mx(&d.re), mx(&d.im), s.residual);
    }
    if let Some(why) = &trace.truncated {
        let _ = writeln!(out.stderr, "truncated: {why}");
    }
    Ok(())
}

pub fn cmd_line(a: &LineArgs, out: &mut Output) -> Result<(), CliError> {
    let c = DTCoordinates::from_interleaved(&parse_ints(&a.lam)?).map_err(usage)?;
    if let Some(s) = &a.surface {
        let m = load_surface(s)?;
        if c.len() != m.xi() {
            return Err(usage(format!("lamination must have {} pairs", m.xi())));
        }
    }
    let schedule = parse_floats(&a.schedule)?;
    let line = AsymptoticLine::new(LaminationCoords::scaled(&c, 1.0)).map_err(semantic)?;
    let text = match pick_format(a.format, &a.out) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["t".to_string()];
            for i in 1..=c.len() {
                header.push(format!("re_w_{i}"));
                header.push(format!("im_w_{i}"));
            }
            w.write_record(&header).expect("in-memory write");
            for &t in &schedule {
                let mut row = vec![t.to_string()];
                for z in line.point(t) {
                    row.push(z.re.to_string());
                    row.push(z.im.to_string());
                }
                w.write_record(&row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
        }
        Format::Json => {
            let rows: Vec<_> = schedule
                .iter()
                .map(|&t| json!({"t": t, "w": line.point(t).iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()}))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&json!({"q": c.q, "p": c.p, "samples": rows})).unwrap())
        }
    };
    emit(out, &a.out, &text)
}
