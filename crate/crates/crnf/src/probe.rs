//! Double-precision diagnostics built on exact blocks from `crnf_core`.
//!
//! Everything here is advisory. The boundedness verdict in particular is a heuristic
//! threshold, not a certificate.

use std::fmt::Write as _;

use crnf_core::conjugacy::Transform;
use crnf_core::diagnostics::{degree_norms_sq, delta_cubed_block, l1_tilde_block, ProbeBlock, ProbeConfig};
use crnf_core::fischer::weight;
use crnf_core::quadric::HermitianFamily;
use crnf_core::rat::rat_to_f64;
use crnf_core::series::BigradedSeries;
use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::io::{from_json, to_json};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-9;
/// Advisory verdict: the rescaled sequence is called bounded when its supremum stays
/// within this factor of its first value.
pub const BOUNDED_FACTOR: f64 = 10.0;

/// Smallest singular value of `K_m` for the normalized Fischer norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSigma {
    pub m: u32,
    pub sigma_min: f64,
    /// `√(m+1) · σ_min`.
    pub rescaled: f64,
}

pub fn sigma_min_k(family: &HermitianFamily, m: u32) -> Result<KSigma, CliError> {
    family.check().map_err(|e| CliError::Validation(e.to_string()))?;
    let n = family.n();
    let (mat, dom, cod) = family.k_block(m);
    let dw: Vec<f64> = dom.iter().map(|(_, mo)| rat_to_f64(&weight(mo, n, true)).sqrt()).collect();
    let cw: Vec<f64> = cod.iter().map(|(_, mo)| rat_to_f64(&weight(mo, n, true)).sqrt()).collect();
    let a = DMatrix::from_fn(mat.rows, mat.cols, |r, c| {
        let x = &mat[(r, c)];
        Complex::new(rat_to_f64(&x.re), rat_to_f64(&x.im)) * (cw[r] / dw[c])
    });
    let sv = a.singular_values();
    let sigma_min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(KSigma { m, sigma_min, rescaled: ((m + 1) as f64).sqrt() * sigma_min })
}

/// Operators with a built-in probe block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeOp {
    /// `ψ ↦ Δ³ψ`, one unknown of order 3.
    DeltaCubed,
    /// The reduced `(3, 3)` system in `A(u) z` (order 2) and `Re g̃₀` (order 3).
    L1Tilde,
}

impl ProbeOp {
    pub fn name(self) -> &'static str {
        match self {
            ProbeOp::DeltaCubed => "delta-cubed",
            ProbeOp::L1Tilde => "l1-tilde",
        }
    }

    /// Orders of the unknowns, in component order.
    pub fn orders(self) -> Vec<u32> {
        match self {
            ProbeOp::DeltaCubed => vec![3],
            ProbeOp::L1Tilde => vec![2, 3],
        }
    }

    pub fn block(self, family: &HermitianFamily, i: u32) -> ProbeBlock {
        match self {
            ProbeOp::DeltaCubed => delta_cubed_block(family, i),
            ProbeOp::L1Tilde => l1_tilde_block(family, i),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeRow {
    pub i: u32,
    pub j: usize,
    /// Operator norm of the `j`-th component of the weighted pseudo-inverse.
    pub norm: f64,
    pub rescaled: f64,
    pub rank: usize,
    pub cols: usize,
    /// The block is not injective in floating point; `norm` then uses the pseudo-inverse.
    pub singular: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub j: usize,
    pub initial: f64,
    pub sup: f64,
    pub bounded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeTable {
    pub op: String,
    pub m: Vec<u32>,
    pub q: u32,
    pub i_min: u32,
    pub i_max: u32,
    pub rows: Vec<ProbeRow>,
    /// Advisory: `sup ≤ 10 × initial` per component.
    pub verdicts: Vec<Verdict>,
}

impl ProbeTable {
    pub fn bounded(&self) -> bool {
        self.verdicts.iter().all(|v| v.bounded)
    }

    /// Rescaled values of component `j`, in increasing `i`.
    pub fn rescaled(&self, j: usize) -> Vec<f64> {
        self.rows.iter().filter(|r| r.j == j).map(|r| r.rescaled).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# {} m={:?} q={} i={}..{}\n{:>4} {:>3} {:>22} {:>22} {:>9}\n",
            self.op, self.m, self.q, self.i_min, self.i_max, "i", "j", "norm", "rescaled", "rank"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>4} {:>3} {:>22.15e} {:>22.15e} {:>9}{}",
                r.i,
                r.j,
                r.norm,
                r.rescaled,
                format!("{}/{}", r.rank, r.cols),
                if r.singular { "  singular" } else { "" }
            );
        }
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "# j={} initial={:.15e} sup={:.15e} bounded={} (advisory)",
                v.j, v.initial, v.sup, v.bounded
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        from_json(text)
    }
}

fn weighted(block: &ProbeBlock) -> DMatrix<f64> {
    let dw: Vec<f64> = block.dom_weights.iter().map(|w| rat_to_f64(w).sqrt()).collect();
    let cw: Vec<f64> = block.cod_weights.iter().map(|w| rat_to_f64(w).sqrt()).collect();
    DMatrix::from_fn(block.mat.rows, block.mat.cols, |r, c| rat_to_f64(&block.mat[(r, c)]) * cw[r] / dw[c])
}

/// Per-component operator norms of the pseudo-inverse of one weighted block, with its rank.
fn component_norms(block: &ProbeBlock, components: usize) -> (Vec<f64>, usize) {
    let a = weighted(block);
    if a.nrows() == 0 || a.ncols() == 0 {
        return (vec![0.0; components], 0);
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > RANK_TOL * smax).collect();
    let norms = (0..components)
        .map(|j| {
            let cols: Vec<usize> = (0..block.component.len()).filter(|&c| block.component[c] == j).collect();
            if cols.is_empty() || keep.is_empty() {
                return 0.0;
            }
            // Rows of V Σ⁺ belonging to component j; U does not change the norm.
            let m = DMatrix::from_fn(cols.len(), keep.len(), |r, k| v_t[(keep[k], cols[r])] / svd.singular_values[keep[k]]);
            m.singular_values().iter().copied().fold(0.0, f64::max)
        })
        .collect();
    (norms, keep.len())
}

/// Runs a probe over `cfg`'s degree range with blocks produced by `block`. The number of
/// components is `cfg.m.len()`. Degrees run in parallel.
pub fn bigdenom_probe_with<F>(name: &str, cfg: &ProbeConfig, block: F) -> Result<ProbeTable, CliError>
where
    F: Fn(u32) -> ProbeBlock + Sync,
{
    cfg.check().map_err(|e| CliError::Validation(e.to_string()))?;
    let comps = cfg.m.len();
    let per_degree: Vec<Vec<ProbeRow>> = (cfg.i_min..=cfg.i_max)
        .into_par_iter()
        .map(|i| {
            let b = block(i);
            let (norms, rank) = component_norms(&b, comps);
            let cols = b.mat.cols;
            norms
                .into_iter()
                .enumerate()
                .map(|(j, norm)| ProbeRow {
                    i,
                    j,
                    norm,
                    rescaled: norm * rat_to_f64(&cfg.rescale(i, j)),
                    rank,
                    cols,
                    singular: rank < cols,
                })
                .collect()
        })
        .collect();
    let rows: Vec<ProbeRow> = per_degree.into_iter().flatten().collect();
    let verdicts = (0..comps)
        .map(|j| {
            let vals: Vec<f64> = rows.iter().filter(|r| r.j == j).map(|r| r.rescaled).collect();
            let initial = vals.first().copied().unwrap_or(0.0);
            let sup = vals.iter().copied().fold(0.0, f64::max);
            Verdict { j, initial, sup, bounded: sup.is_finite() && sup <= BOUNDED_FACTOR * initial }
        })
        .collect();
    Ok(ProbeTable { op: name.into(), m: cfg.m.clone(), q: cfg.q, i_min: cfg.i_min, i_max: cfg.i_max, rows, verdicts })
}

/// Probe of a built-in operator. `cfg.m` must list one order per unknown of `op`.
pub fn bigdenom_probe(family: &HermitianFamily, op: ProbeOp, cfg: &ProbeConfig) -> Result<ProbeTable, CliError> {
    family.check().map_err(|e| CliError::Validation(e.to_string()))?;
    if cfg.m.len() != op.orders().len() {
        return Err(CliError::Validation(format!(
            "{} has {} unknowns but the order multi-index has {} entries",
            op.name(),
            op.orders().len(),
            cfg.m.len()
        )));
    }
    bigdenom_probe_with(op.name(), cfg, |i| op.block(family, i))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeNorm {
    pub degree: u32,
    pub norm: f64,
}

/// Normalized-Fischer norms per quasidegree and least-squares geometric ratios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthProfile {
    pub phi: Vec<DegreeNorm>,
    pub transform: Vec<DegreeNorm>,
    pub phi_ratio: Option<f64>,
    pub transform_ratio: Option<f64>,
}

fn norms_by_degree(parts: &[&BigradedSeries], from: u32, cap: u32) -> Vec<DegreeNorm> {
    let mut sq = vec![0.0; (cap + 1) as usize];
    for x in parts {
        for (k, v) in degree_norms_sq(x) {
            sq[k as usize] += rat_to_f64(&v);
        }
    }
    (from..=cap).map(|k| DegreeNorm { degree: k, norm: sq[k as usize].sqrt() }).collect()
}

/// Fits `log ‖x_k‖ = a + k log ρ` over the nonzero entries and returns `ρ`.
pub fn geometric_ratio(norms: &[DegreeNorm]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = norms.iter().filter(|e| e.norm > 0.0).map(|e| (e.degree as f64, e.norm.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

pub fn norm_growth(phi: &BigradedSeries, t: &Transform) -> GrowthProfile {
    let phi_n = norms_by_degree(&[phi], 0, phi.cap());
    let tr_n = norms_by_degree(&[t.f_rest().as_series(), t.g_rest().as_series()], 0, t.cap());
    GrowthProfile {
        phi_ratio: geometric_ratio(&phi_n),
        transform_ratio: geometric_ratio(&tr_n),
        phi: phi_n,
        transform: tr_n,
    }
}

impl GrowthProfile {
    pub fn to_text(&self) -> String {
        let mut out = format!("{:>6} {:>22} {:>22}\n", "degree", "phi", "transform");
        let top = self.phi.len().max(self.transform.len());
        for k in 0..top {
            let cell = |v: &[DegreeNorm]| v.get(k).map(|e| format!("{:.15e}", e.norm)).unwrap_or_default();
            let deg = self.phi.get(k).or(self.transform.get(k)).map(|e| e.degree).unwrap_or(0);
            let _ = writeln!(out, "{:>6} {:>22} {:>22}", deg, cell(&self.phi), cell(&self.transform));
        }
        let r = |x: Option<f64>| x.map(|v| format!("{v:.15e}")).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(out, "# ratio phi={} transform={} (advisory)", r(self.phi_ratio), r(self.transform_ratio));
        out
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        from_json(text)
    }
}
