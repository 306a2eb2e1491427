//! JSON input and output for the regularity probe.
//!
//! The input names the unknowns' orders, the polynomial `W` in `(x, u_{j,α})` with the
//! slots ordered as [`JetSystem::slots`], and one or two sampled jets `F_j(x)`.

use std::fmt::Write as _;

use crnf_core::diagnostics::{regularity_probe, JetSystem, RPoly, RegularityReport};
use crnf_core::rat::fmt_rat;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::io::{from_json, to_json};

pub const JETS_VERSION: &str = "crnf-jets/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub exp: Vec<u32>,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetFile {
    pub version: String,
    pub nx: usize,
    pub orders: Vec<u32>,
    pub q: u32,
    pub w: Vec<Vec<PolyTerm>>,
    pub jet: Vec<Vec<PolyTerm>>,
    #[serde(default)]
    pub other: Option<Vec<Vec<PolyTerm>>>,
}

fn to_rpoly(terms: &[PolyTerm]) -> Result<RPoly, CliError> {
    let mut out = RPoly::new();
    for t in terms {
        let c = crnf_core::rat::parse_rat(&t.c).map_err(|_| CliError::Parse(format!("bad rational {:?}", t.c)))?;
        if out.insert(t.exp.clone(), c).is_some() {
            return Err(CliError::Parse(format!("duplicate exponent {:?}", t.exp)));
        }
    }
    out.retain(|_, c| !num_traits::Zero::is_zero(c));
    Ok(out)
}

pub fn from_rpoly(p: &RPoly) -> Vec<PolyTerm> {
    p.iter().map(|(e, c)| PolyTerm { exp: e.clone(), c: fmt_rat(c) }).collect()
}

impl JetFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let f: JetFile = from_json(text)?;
        if f.version != JETS_VERSION {
            return Err(CliError::Parse(format!("unsupported jets version {:?}, expected {JETS_VERSION:?}", f.version)));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn run(&self) -> Result<RegularityReport, CliError> {
        let sys = JetSystem { nx: self.nx, orders: self.orders.clone(), w: self.w.iter().map(|p| to_rpoly(p)).collect::<Result<_, _>>()? };
        let jet: Vec<RPoly> = self.jet.iter().map(|p| to_rpoly(p)).collect::<Result<_, _>>()?;
        let other: Option<Vec<RPoly>> = match &self.other {
            Some(o) => Some(o.iter().map(|p| to_rpoly(p)).collect::<Result<_, _>>()?),
            None => None,
        };
        regularity_probe(&sys, self.q, &jet, other.as_deref()).map_err(|e| CliError::Validation(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotRow {
    pub j: usize,
    pub alpha: Vec<u8>,
    pub required: u32,
    pub actual: Option<u32>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncreaseRow {
    pub input_order: Option<i64>,
    pub output_order: Option<u32>,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularityTable {
    pub q: u32,
    pub pass: bool,
    pub slots: Vec<SlotRow>,
    pub increase: Option<IncreaseRow>,
}

impl RegularityTable {
    pub fn new(q: u32, r: &RegularityReport) -> Self {
        RegularityTable {
            q,
            pass: r.pass(),
            slots: r
                .slots
                .iter()
                .map(|s| SlotRow { j: s.j, alpha: s.alpha.clone(), required: s.required, actual: s.actual, pass: s.pass() })
                .collect(),
            increase: r.increase.as_ref().map(|i| IncreaseRow {
                input_order: i.input_order,
                output_order: i.output_order,
                strict: i.strict,
            }),
        }
    }

    pub fn to_text(&self) -> String {
        let opt = |x: Option<String>| x.unwrap_or_else(|| "inf".into());
        let mut out = format!("# regularity q={}\n{:>3} {:>12} {:>8} {:>6} {:>4}\n", self.q, "j", "alpha", "required", "actual", "pass");
        for s in &self.slots {
            let alpha = s.alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
            let _ = writeln!(
                out,
                "{:>3} {:>12} {:>8} {:>6} {:>4}",
                s.j,
                alpha,
                s.required,
                opt(s.actual.map(|a| a.to_string())),
                if s.pass { "yes" } else { "no" }
            );
        }
        if let Some(i) = &self.increase {
            let _ = writeln!(
                out,
                "# increase: input={} output={} strict={}",
                opt(i.input_order.map(|a| a.to_string())),
                opt(i.output_order.map(|a| a.to_string())),
                i.strict
            );
        }
        let _ = writeln!(out, "# overall: {}", if self.pass { "pass" } else { "FAIL" });
        out
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        from_json(text)
    }
}
