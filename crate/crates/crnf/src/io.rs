//! File formats: canonical series text, spec JSON and report JSON.
//!
//! A series file starts with a header line and lists one term per line,
//!
//! ```text
//! # crnf-series n=1 d=1 s=1 cap=8
//! 0 | 2 | 1 | 0 | 1/1 | 0/1
//! ```
//!
//! with columns `j | α | β | γ | re | im`. Multi-indices are space-separated and terms are
//! sorted graded-lexicographically by `(wt, α, β, γ)`, then by `j`. A transform file holds
//! the nonlinear parts of `f` and `g` as two such blocks under `[f]` and `[g]`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crnf_core::conditions::ConditionReport;
use crnf_core::conjugacy::{ManifoldSpec, Transform};
use crnf_core::engine::{KernelPolicy, Mode, NormalFormReport};
use crnf_core::error::Error as CoreError;
use crnf_core::quadric::HermitianFamily;
use crnf_core::rat::{fmt_rat, gr, parse_rat, GaussRat, Rat, RatParseError};
use crnf_core::series::{BigradedSeries, HoloSeries, Mono};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SPEC_VERSION: &str = "crnf-spec/1";
pub const REPORT_VERSION: &str = "crnf-report/1";
/// Cap used when a spec file does not state one.
pub const DEFAULT_CAP: u32 = 8;

const SERIES_TAG: &str = "crnf-series";
const TRANSFORM_TAG: &str = "crnf-transform";

fn parse_err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("line {line}: {msg}"))
}

fn rat_field(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| match e {
        RatParseError::Malformed => format!("malformed rational {s:?}"),
        RatParseError::ZeroDenominator => format!("zero denominator in {s:?}"),
    })
}

fn join(e: &[u8]) -> String {
    e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_terms(out: &mut String, x: &BigradedSeries) {
    let n = x.n();
    for (j, m, c) in x.terms() {
        let _ = writeln!(
            out,
            "{j} | {} | {} | {} | {} | {}",
            join(m.alpha(n)),
            join(m.beta(n)),
            join(m.gamma(n)),
            fmt_rat(&c.re),
            fmt_rat(&c.im)
        );
    }
}

pub fn series_to_string(x: &BigradedSeries) -> String {
    let mut out = format!("# {SERIES_TAG} n={} d={} s={} cap={}\n", x.n(), x.d(), x.s(), x.cap());
    write_terms(&mut out, x);
    out
}

/// Parses `key=value` pairs of a header line with the given tag.
fn parse_header(line: &str, tag: &str, keys: &[&str]) -> Result<Vec<u32>, CliError> {
    let rest = line
        .strip_prefix("# ")
        .and_then(|r| r.strip_prefix(tag))
        .ok_or_else(|| parse_err(1, format!("expected header starting with '# {tag}'")))?;
    let fields: Vec<&str> = rest.split_whitespace().collect();
    if fields.len() != keys.len() {
        return Err(parse_err(1, format!("header needs {}", keys.join(", "))));
    }
    fields
        .iter()
        .zip(keys)
        .map(|(f, k)| {
            f.strip_prefix(k)
                .and_then(|v| v.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| parse_err(1, format!("bad header field {f:?}, expected {k}=<int>")))
        })
        .collect()
}

fn parse_exps(s: &str, len: usize, line: usize, what: &str) -> Result<Vec<u8>, CliError> {
    let v: Vec<u8> = s
        .split_whitespace()
        .map(|t| t.parse::<u8>())
        .collect::<Result<_, _>>()
        .map_err(|_| parse_err(line, format!("bad exponent in {what}")))?;
    if v.len() != len {
        return Err(parse_err(line, format!("{what} needs {len} entries, found {}", v.len())));
    }
    Ok(v)
}

struct Dims {
    n: usize,
    d: usize,
    s: usize,
    cap: u32,
}

fn parse_term_lines<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    dims: &Dims,
) -> Result<BigradedSeries, CliError> {
    let mut seen = BTreeSet::new();
    let mut terms = Vec::new();
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        if cols.len() != 6 {
            return Err(parse_err(no, "expected 6 columns 'j | alpha | beta | gamma | re | im'"));
        }
        let j: usize = cols[0].parse().map_err(|_| parse_err(no, "bad component index"))?;
        if j >= dims.s {
            return Err(parse_err(no, format!("component {j} out of range (s={})", dims.s)));
        }
        let a = parse_exps(cols[1], dims.n, no, "alpha")?;
        let b = parse_exps(cols[2], dims.n, no, "beta")?;
        let g = parse_exps(cols[3], dims.d, no, "gamma")?;
        let re = rat_field(cols[4]).map_err(|e| parse_err(no, e))?;
        let im = rat_field(cols[5]).map_err(|e| parse_err(no, e))?;
        let m = Mono::new(&a, &b, &g);
        if m.wt() > dims.cap {
            return Err(parse_err(no, format!("term of quasidegree {} above cap {}", m.wt(), dims.cap)));
        }
        if !seen.insert((j, m.clone())) {
            return Err(parse_err(no, "duplicate term"));
        }
        terms.push((j, m, gr(re, im)));
    }
    Ok(BigradedSeries::from_terms(dims.n, dims.d, dims.s, dims.cap, terms))
}

pub fn parse_series(text: &str) -> Result<BigradedSeries, CliError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, head) = lines.next().ok_or_else(|| parse_err(1, "empty series file"))?;
    let h = parse_header(head, SERIES_TAG, &["n", "d", "s", "cap"])?;
    let dims = Dims { n: h[0] as usize, d: h[1] as usize, s: h[2] as usize, cap: h[3] };
    if dims.n == 0 || dims.d == 0 || dims.s == 0 {
        return Err(parse_err(1, "n, d and s must be positive"));
    }
    parse_term_lines(lines, &dims)
}

pub fn transform_to_string(t: &Transform) -> String {
    let mut out = format!("# {TRANSFORM_TAG} n={} d={} cap={}\n[f]\n", t.n(), t.d(), t.cap());
    write_terms(&mut out, t.f_rest().as_series());
    out.push_str("[g]\n");
    write_terms(&mut out, t.g_rest().as_series());
    out
}

pub fn parse_transform(text: &str) -> Result<Transform, CliError> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let head = lines.first().ok_or_else(|| parse_err(1, "empty transform file"))?.1;
    let h = parse_header(head, TRANSFORM_TAG, &["n", "d", "cap"])?;
    let (n, d, cap) = (h[0] as usize, h[1] as usize, h[2]);
    if n == 0 || d == 0 {
        return Err(parse_err(1, "n and d must be positive"));
    }
    let fpos = lines.iter().position(|(_, l)| l.trim() == "[f]");
    let gpos = lines.iter().position(|(_, l)| l.trim() == "[g]");
    let (fpos, gpos) = match (fpos, gpos) {
        (Some(f), Some(g)) if f == 1 && g > f => (f, g),
        _ => return Err(parse_err(2, "expected an [f] section followed by a [g] section")),
    };
    let f = parse_term_lines(lines[fpos + 1..gpos].iter().copied(), &Dims { n, d, s: n, cap })?;
    let g = parse_term_lines(lines[gpos + 1..].iter().copied(), &Dims { n, d, s: d, cap })?;
    let holo = |x: BigradedSeries| HoloSeries::new(x).map_err(|e| CliError::Parse(e.to_string()));
    Transform::new(holo(f)?, holo(g)?).map_err(|e| CliError::Parse(e.to_string()))
}

/// Parses a series file holding a holomorphic `C^n`-valued `f₀(w)`.
pub fn parse_holo(text: &str) -> Result<HoloSeries, CliError> {
    HoloSeries::new(parse_series(text)?).map_err(|e| CliError::Parse(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonRat2 {
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonTerm {
    pub j: usize,
    pub alpha: Vec<u8>,
    pub beta: Vec<u8>,
    pub gamma: Vec<u8>,
    pub re: String,
    pub im: String,
}

/// On-disk form of a [`ManifoldSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub version: String,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "J")]
    pub j: Vec<Vec<Vec<JsonRat2>>>,
    pub perturbation: Vec<JsonTerm>,
    #[serde(default = "default_cap")]
    pub cap: u32,
}

fn default_cap() -> u32 {
    DEFAULT_CAP
}

fn gauss(re: &str, im: &str) -> Result<GaussRat, CliError> {
    Ok(gr(rat_field(re).map_err(CliError::Parse)?, rat_field(im).map_err(CliError::Parse)?))
}

fn validation(e: CoreError) -> CliError {
    CliError::Validation(e.to_string())
}

impl SpecFile {
    pub fn from_spec(spec: &ManifoldSpec) -> Self {
        let fam = spec.family();
        let (n, d) = (spec.n(), spec.d());
        let j = fam
            .matrices()
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(|c| JsonRat2 { re: fmt_rat(&c.re), im: fmt_rat(&c.im) }).collect())
                    .collect()
            })
            .collect();
        let perturbation = spec
            .perturbation()
            .terms()
            .into_iter()
            .map(|(j, m, c)| JsonTerm {
                j,
                alpha: m.alpha(n).to_vec(),
                beta: m.beta(n).to_vec(),
                gamma: m.gamma(n).to_vec(),
                re: fmt_rat(&c.re),
                im: fmt_rat(&c.im),
            })
            .collect();
        SpecFile { version: SPEC_VERSION.into(), n, d, j, perturbation, cap: spec.cap() }
    }

    /// Converts to a validated spec. Format problems are parse errors; violations of the
    /// mathematical requirements are validation errors.
    pub fn to_spec(&self) -> Result<ManifoldSpec, CliError> {
        if self.version != SPEC_VERSION {
            return Err(CliError::Parse(format!("unsupported spec version {:?}, expected {SPEC_VERSION:?}", self.version)));
        }
        let (n, d) = (self.n, self.d);
        if n == 0 || d == 0 {
            return Err(CliError::Parse("n and d must be positive".into()));
        }
        if self.j.len() != d || self.j.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
            return Err(CliError::Parse(format!("J must hold {d} matrices of size {n}x{n}")));
        }
        let mats = self
            .j
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(|c| gauss(&c.re, &c.im)).collect()).collect())
            .collect::<Result<Vec<Vec<Vec<GaussRat>>>, CliError>>()?;
        let family = HermitianFamily::new(n, mats).map_err(validation)?;
        let mut seen = BTreeSet::new();
        let mut terms = Vec::new();
        for (i, t) in self.perturbation.iter().enumerate() {
            let bad = |msg: String| CliError::Parse(format!("perturbation term {i}: {msg}"));
            if t.j >= d {
                return Err(bad(format!("component {} out of range", t.j)));
            }
            if t.alpha.len() != n || t.beta.len() != n || t.gamma.len() != d {
                return Err(bad("alpha/beta need n entries and gamma needs d".into()));
            }
            let m = Mono::new(&t.alpha, &t.beta, &t.gamma);
            if !seen.insert((t.j, m.clone())) {
                return Err(bad("duplicate term".into()));
            }
            if m.wt() > self.cap {
                return Err(CliError::Validation(format!(
                    "perturbation term {i} has quasidegree {} above the cap {}",
                    m.wt(),
                    self.cap
                )));
            }
            terms.push((t.j, m, gauss(&t.re, &t.im).map_err(|e| bad(e.to_string()))?));
        }
        let phi = BigradedSeries::from_terms(n, d, d, self.cap, terms);
        ManifoldSpec::new(family, phi, self.cap).map_err(validation)
    }
}

fn json_parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

fn json_string<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn parse_spec_file(text: &str) -> Result<SpecFile, CliError> {
    json_parse(text)
}

pub fn parse_spec(text: &str) -> Result<ManifoldSpec, CliError> {
    parse_spec_file(text)?.to_spec()
}

pub fn spec_to_string(spec: &ManifoldSpec) -> String {
    json_string(&SpecFile::from_spec(spec))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionEntry {
    pub name: String,
    pub pass: bool,
    pub residual_terms: usize,
}

/// Flag plus residual term count for each condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionSummary {
    pub pass: bool,
    pub checked_up_to: Option<u32>,
    pub conditions: Vec<ConditionEntry>,
}

impl ConditionSummary {
    pub fn from_report(r: &ConditionReport) -> Self {
        ConditionSummary {
            pass: r.pass(),
            checked_up_to: r.checked_up_to,
            conditions: r
                .conditions
                .iter()
                .map(|c| ConditionEntry { name: c.name.clone(), pass: c.pass(), residual_terms: c.residual.num_terms() })
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let w = self.conditions.iter().map(|c| c.name.len()).max().unwrap_or(4).max(9);
        let mut out = format!("{:<w$}  {:<4}  {}\n", "condition", "pass", "residual_terms");
        for c in &self.conditions {
            let _ = writeln!(out, "{:<w$}  {:<4}  {}", c.name, if c.pass { "yes" } else { "no" }, c.residual_terms);
        }
        let _ = writeln!(
            out,
            "overall: {}{}",
            if self.pass { "pass" } else { "FAIL" },
            self.checked_up_to.map(|k| format!(" (checked through degree {k})")).unwrap_or_default()
        );
        out
    }
}

pub fn conditions_to_string(s: &ConditionSummary) -> String {
    json_string(s)
}

pub fn parse_conditions(text: &str) -> Result<ConditionSummary, CliError> {
    json_parse(text)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDim {
    pub degree: u32,
    pub dim: usize,
}

/// Convergence criterion evaluated on the output, with the sizes of `Φ₁₁` and `Φ₁₂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrucialSummary {
    pub pass: bool,
    pub residual_terms: usize,
    pub phi11_terms: usize,
    pub phi12_terms: usize,
}

/// On-disk summary of a normalization run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub version: String,
    pub mode: String,
    pub kernel_policy: String,
    pub n: usize,
    pub d: usize,
    pub cap: u32,
    pub ok: bool,
    pub conjugacy_residual_terms: usize,
    pub conditions: ConditionSummary,
    pub crucial: CrucialSummary,
    pub kernel_dims: Vec<KernelDim>,
    pub phi_terms: usize,
    pub transform_terms: usize,
    pub notes: Vec<String>,
}

pub fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Full => "full",
        Mode::Weak => "weak",
        Mode::ChernMoser => "cm",
        Mode::Prepare => "prepare",
        Mode::P1High => "p1-high",
    }
}

fn policy_name(p: KernelPolicy) -> &'static str {
    match p {
        KernelPolicy::ImageOfAdjoint => "image-of-adjoint",
        KernelPolicy::Intrinsic => "intrinsic",
    }
}

impl ReportFile {
    pub fn new(rep: &NormalFormReport, crucial: &BigradedSeries) -> Self {
        let t = &rep.transform;
        ReportFile {
            version: REPORT_VERSION.into(),
            mode: mode_name(rep.mode).into(),
            kernel_policy: policy_name(rep.policy).into(),
            n: rep.phi.n(),
            d: rep.phi.d(),
            cap: rep.phi.cap(),
            ok: rep.ok(),
            conjugacy_residual_terms: rep.conjugacy_residual.num_terms(),
            conditions: ConditionSummary::from_report(&rep.conditions),
            crucial: CrucialSummary {
                pass: crucial.is_zero(),
                residual_terms: crucial.num_terms(),
                phi11_terms: rep.phi.extract_pq(1, 1).num_terms(),
                phi12_terms: rep.phi.extract_pq(1, 2).num_terms(),
            },
            kernel_dims: rep.kernel_dims.iter().map(|&(degree, dim)| KernelDim { degree, dim }).collect(),
            phi_terms: rep.phi.num_terms(),
            transform_terms: t.f_rest().as_series().num_terms() + t.g_rest().as_series().num_terms(),
            notes: rep.notes.clone(),
        }
    }
}

pub fn report_to_string(r: &ReportFile) -> String {
    json_string(r)
}

pub fn parse_report(text: &str) -> Result<ReportFile, CliError> {
    json_parse(text)
}

pub(crate) fn to_json<T: Serialize>(x: &T) -> String {
    json_string(x)
}

pub(crate) fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    json_parse(text)
}
