//! Exact inputs for the convergence diagnostics: the crucial residual, per-degree norms,
//! the graded blocks behind the big-denominator probe, and the regularity probe.
//!
//! Floating point is not used here. The std crate turns the exact blocks into singular
//! values.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fischer::weight;
use crate::linalg::Mat;
use crate::quadric::HermitianFamily;
use crate::rat::{abs_sq, factorial, gr, gr_int, multi_factorial, Rat};
use crate::series::{compositions, BigradedSeries, Mono};

/// `Φ₁₁′Φ₁₂ − Φ₁₂′(Q + Φ₁₁)`. Zero through the cap iff the convergence criterion holds there.
pub fn crucial_residual(family: &HermitianFamily, phi: &BigradedSeries) -> Result<BigradedSeries> {
    if phi.n() != family.n() || phi.d() != family.d() || phi.s() != family.d() {
        return Err(Error::DimensionMismatch("phi must be C^d-valued over the family"));
    }
    let p11 = phi.extract_pq(1, 1);
    let p12 = phi.extract_pq(1, 2);
    let q = family.q_series(phi.d(), phi.cap());
    Ok(p11.du_contract(&p12).sub(&p12.du_contract(&q.add(&p11))))
}

/// Squared normalized Fischer norm of each quasidegree present in `x`, in increasing order.
pub fn degree_norms_sq(x: &BigradedSeries) -> Vec<(u32, Rat)> {
    let n = x.n();
    let mut out: BTreeMap<u32, Rat> = BTreeMap::new();
    for (_, m, c) in x.terms() {
        *out.entry(m.wt()).or_insert_with(Rat::zero) += weight(m, n, true) * abs_sq(c);
    }
    out.into_iter().collect()
}

/// Order multi-index, shift and degree range of a probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeConfig {
    pub m: Vec<u32>,
    pub q: u32,
    pub i_min: u32,
    pub i_max: u32,
}

impl ProbeConfig {
    pub fn check(&self) -> Result<()> {
        if self.i_min > self.i_max {
            return Err(Error::Precondition("empty degree range"));
        }
        Ok(())
    }

    /// `(i + m_j + q)⋯(i + q + 1)`.
    pub fn rescale(&self, i: u32, j: usize) -> Rat {
        let mut acc = Rat::one();
        for t in 1..=self.m[j] {
            acc *= Rat::from_integer((i + self.q + t).into());
        }
        acc
    }
}

/// One graded block of a real-linear operator on real coordinates.
///
/// `mat` maps domain coordinates to codomain coordinates. Squared norms are
/// `Σ w_k x_k²` with the listed weights. `component[c]` is the unknown (index into the
/// order multi-index) that domain coordinate `c` belongs to.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeBlock {
    pub mat: Mat<Rat>,
    pub dom_weights: Vec<Rat>,
    pub cod_weights: Vec<Rat>,
    pub component: Vec<usize>,
}

/// Weight used by the probes: normalized in `(z, z̄)` and in `u` separately,
/// `α!β!/(|α|+|β|)! · γ!/|γ|!`.
pub fn probe_weight(m: &Mono, n: usize) -> Rat {
    let zpart = Rat::new(
        multi_factorial(m.alpha(n)) * multi_factorial(m.beta(n)),
        factorial(m.zdeg(n) + m.zbdeg(n)),
    );
    zpart * Rat::new(multi_factorial(m.gamma(n)), factorial(m.udeg(n)))
}

/// Real coordinates on real-valued series supported on a fixed monomial set.
struct RealCoords {
    n: usize,
    entries: Vec<(usize, Mono, bool)>,
}

impl RealCoords {
    fn new(n: usize, s: usize, monos: &[Mono]) -> Self {
        let mut entries = Vec::new();
        for j in 0..s {
            for m in monos {
                let mm = m.mirror(n);
                if *m > mm {
                    continue;
                }
                entries.push((j, m.clone(), false));
                if *m != mm {
                    entries.push((j, m.clone(), true));
                }
            }
        }
        RealCoords { n, entries }
    }

    fn coords(&self, x: &BigradedSeries) -> Vec<Rat> {
        self.entries
            .iter()
            .map(|(j, m, im)| {
                let c = x.coeff(*j, m);
                if *im {
                    c.im
                } else {
                    c.re
                }
            })
            .collect()
    }

    fn weights(&self) -> Vec<Rat> {
        self.entries
            .iter()
            .map(|(_, m, _)| {
                let w = probe_weight(m, self.n);
                if m.mirror(self.n) == *m {
                    w
                } else {
                    w * Rat::from_integer(2.into())
                }
            })
            .collect()
    }
}

/// Monomials `z^α z̄^β u^γ` with `|α| = p`, `|β| = q`, `|γ| = r`.
fn monos_pqr(n: usize, d: usize, p: u32, q: u32, r: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    for a in compositions(p, n) {
        for b in compositions(q, n) {
            for g in compositions(r, d) {
                out.push(Mono::new(&a, &b, &g));
            }
        }
    }
    out
}

fn delta_pow(family: &HermitianFamily, x: &BigradedSeries, k: u32) -> BigradedSeries {
    (0..k).fold(x.clone(), |acc, _| family.delta_apply(&acc))
}

/// `ψ ↦ Δ³ψ` from real `R^d`-valued `ψ(u)` of `u`-degree `i + 3` to bidegree `(3, 3)`.
/// One unknown, of order 3.
pub fn delta_cubed_block(family: &HermitianFamily, i: u32) -> ProbeBlock {
    let (n, d) = (family.n(), family.d());
    let cap = 2 * i + 6;
    let dom: Vec<(usize, Mono)> = (0..d)
        .flat_map(|j| monos_pqr(n, d, 0, 0, i + 3).into_iter().map(move |m| (j, m)))
        .collect();
    let cod = RealCoords::new(n, d, &monos_pqr(n, d, 3, 3, i));
    let cols: Vec<Vec<Rat>> = dom
        .iter()
        .map(|(j, m)| {
            let psi = BigradedSeries::from_terms(n, d, d, cap, [(*j, m.clone(), gr_int(1))]);
            cod.coords(&delta_pow(family, &psi, 3))
        })
        .collect();
    ProbeBlock {
        mat: Mat::from_cols(&cols, cod.entries.len()),
        dom_weights: dom.iter().map(|(_, m)| probe_weight(m, n)).collect(),
        cod_weights: cod.weights(),
        component: vec![0; dom.len()],
    }
}

/// The reduced `(3, 3)` system in the unknowns `f̃₁ = A(u) z` (order 2) and `Re g̃₀` (order 3):
///
/// ```text
/// Δ³ Re g̃₀ − 2 Re Q(Δ² f̃₁, z̄)
///          − 2 Im Q(Δ² f̃₁, z̄)
/// −⅙ Δ³ Re g̃₀ + Re Q(Δ² f̃₁, z̄)
/// ```
///
/// at `u`-degrees `i + 2` for `A` and `i + 3` for `Re g̃₀`.
pub fn l1_tilde_block(family: &HermitianFamily, i: u32) -> ProbeBlock {
    let (n, d) = (family.n(), family.d());
    let cap = 2 * i + 6;
    let zb = BigradedSeries::zbar_vector(n, d, cap);
    let sixth = gr(Rat::new((-1).into(), 6.into()), Rat::zero());
    let image = |f: &BigradedSeries, g: &BigradedSeries| {
        let qf = family.eval_q(&delta_pow(family, f, 2), &zb).expect("f is C^n-valued");
        let (re, im) = (qf.real_part(), qf.imag_part());
        let d3 = delta_pow(family, g, 3);
        BigradedSeries::stack(vec![
            d3.sub(&re.scale(&gr_int(2))),
            im.scale(&gr_int(-2)),
            d3.scale(&sixth).add(&re),
        ])
    };
    let cod = RealCoords::new(n, 3 * d, &monos_pqr(n, d, 3, 3, i));
    let (mut cols, mut dom_w, mut comp) = (Vec::new(), Vec::new(), Vec::new());
    let zero_f = BigradedSeries::zero(n, d, n, cap);
    let zero_g = BigradedSeries::zero(n, d, d, cap);
    for a in 0..n {
        for b in 0..n {
            let mut e = vec![0u8; n];
            e[b] = 1;
            for g in compositions(i + 2, d) {
                let m = Mono::new(&e, &vec![0; n], &g);
                for unit in [gr_int(1), gr(Rat::zero(), Rat::one())] {
                    let f = BigradedSeries::from_terms(n, d, n, cap, [(a, m.clone(), unit)]);
                    cols.push(cod.coords(&image(&f, &zero_g)));
                    dom_w.push(probe_weight(&m, n));
                    comp.push(0);
                }
            }
        }
    }
    for j in 0..d {
        for m in monos_pqr(n, d, 0, 0, i + 3) {
            let g = BigradedSeries::from_terms(n, d, d, cap, [(j, m.clone(), gr_int(1))]);
            cols.push(cod.coords(&image(&zero_f, &g)));
            dom_w.push(probe_weight(&m, n));
            comp.push(1);
        }
    }
    ProbeBlock { mat: Mat::from_cols(&cols, cod.entries.len()), dom_weights: dom_w, cod_weights: cod.weights(), component: comp }
}

/// Polynomial with rational coefficients, keyed by exponent vectors.
pub type RPoly = BTreeMap<Vec<u32>, Rat>;

fn rpoly_add_into(acc: &mut RPoly, p: &RPoly, c: &Rat) {
    for (e, v) in p {
        let slot = acc.entry(e.clone()).or_insert_with(Rat::zero);
        *slot += v * c;
        if slot.is_zero() {
            acc.remove(e);
        }
    }
}

fn rpoly_mul(a: &RPoly, b: &RPoly) -> RPoly {
    let mut out = RPoly::new();
    for (ea, ca) in a {
        let mut prod = RPoly::new();
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            prod.insert(e, cb.clone());
        }
        rpoly_add_into(&mut out, &prod, ca);
    }
    out
}

/// Lowest total degree of a nonzero term; `None` for the zero polynomial.
pub fn rpoly_order(p: &RPoly) -> Option<u32> {
    p.keys().map(|e| e.iter().sum()).min()
}

/// Partial derivative in variable `v`.
pub fn rpoly_diff(p: &RPoly, v: usize) -> RPoly {
    let mut out = RPoly::new();
    for (e, c) in p {
        if e[v] == 0 {
            continue;
        }
        let mut e2 = e.clone();
        e2[v] -= 1;
        out.insert(e2, c * Rat::from_integer(e[v].into()));
    }
    out
}

fn rpoly_diff_multi(p: &RPoly, alpha: &[u8]) -> RPoly {
    let mut out = p.clone();
    for (v, &k) in alpha.iter().enumerate() {
        for _ in 0..k {
            out = rpoly_diff(&out, v);
        }
    }
    out
}

/// A nonlinear map `W(x, u)` of `r` unknown functions of `x ∈ R^nx`. The variables of each
/// `W_i` are `x` followed by the jet slots `u_{j,α}` (`|α| ≤ m_j`) in [`JetSystem::slots`]
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct JetSystem {
    pub nx: usize,
    pub orders: Vec<u32>,
    pub w: Vec<RPoly>,
}

/// Outcome for one jet slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotResult {
    pub j: usize,
    pub alpha: Vec<u8>,
    pub required: u32,
    /// Smallest vanishing order over the components of `W`; `None` when all vanish.
    pub actual: Option<u32>,
}

impl SlotResult {
    pub fn pass(&self) -> bool {
        self.actual.is_none_or(|a| a >= self.required)
    }
}

/// Order comparison of `W(F) − W(G)` against `F − G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncreaseResult {
    /// `min_j (ord(F_j − G_j) − m_j)`.
    pub input_order: Option<i64>,
    pub output_order: Option<u32>,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub slots: Vec<SlotResult>,
    pub increase: Option<IncreaseResult>,
}

impl RegularityReport {
    pub fn pass(&self) -> bool {
        self.slots.iter().all(SlotResult::pass) && self.increase.as_ref().is_none_or(|r| r.strict)
    }
}

impl JetSystem {
    pub fn slots(&self) -> Vec<(usize, Vec<u8>)> {
        let mut out = Vec::new();
        for (j, &m) in self.orders.iter().enumerate() {
            for k in 0..=m {
                for a in compositions(k, self.nx) {
                    out.push((j, a));
                }
            }
        }
        out
    }

    pub fn num_vars(&self) -> usize {
        self.nx + self.slots().len()
    }

    /// `p_{j,|α|} = max(0, |α| + q + 1 − m_j)`.
    pub fn required_order(&self, j: usize, alpha: &[u8], q: u32) -> u32 {
        let a: u32 = alpha.iter().map(|&x| x as u32).sum();
        (a + q + 1).saturating_sub(self.orders[j])
    }

    fn check_jet(&self, jet: &[RPoly]) -> Result<()> {
        if jet.len() != self.orders.len() || jet.iter().any(|p| p.keys().any(|e| e.len() != self.nx)) {
            return Err(Error::DimensionMismatch("jet must hold one polynomial in x per unknown"));
        }
        if self.w.iter().any(|p| p.keys().any(|e| e.len() != self.num_vars())) {
            return Err(Error::DimensionMismatch("W must be a polynomial in x and the jet slots"));
        }
        Ok(())
    }

    /// Substitutes `u_{j,α} = ∂^α F_j(x)` into `p`.
    pub fn evaluate(&self, p: &RPoly, jet: &[RPoly]) -> RPoly {
        let nx = self.nx;
        let values: Vec<RPoly> = self.slots().iter().map(|(j, a)| rpoly_diff_multi(&jet[*j], a)).collect();
        let mut out = RPoly::new();
        for (e, c) in p {
            let mut term = RPoly::new();
            term.insert(e[..nx].to_vec(), c.clone());
            for (v, &k) in e[nx..].iter().enumerate() {
                for _ in 0..k {
                    term = rpoly_mul(&term, &values[v]);
                }
            }
            rpoly_add_into(&mut out, &term, &Rat::one());
        }
        out
    }
}

/// Vanishing orders of `∂W_i/∂u_{j,α}` along `jet`, and, given a second jet, the
/// strict-increase check `ord(W(F) − W(G)) > ord(F − G) + q`.
pub fn regularity_probe(sys: &JetSystem, q: u32, jet: &[RPoly], other: Option<&[RPoly]>) -> Result<RegularityReport> {
    sys.check_jet(jet)?;
    let mut slots = Vec::new();
    for (v, (j, alpha)) in sys.slots().into_iter().enumerate() {
        let actual = sys
            .w
            .iter()
            .filter_map(|wi| rpoly_order(&sys.evaluate(&rpoly_diff(wi, sys.nx + v), jet)))
            .min();
        let required = sys.required_order(j, &alpha, q);
        slots.push(SlotResult { j, alpha, required, actual });
    }
    let increase = match other {
        None => None,
        Some(g) => {
            sys.check_jet(g)?;
            let input_order = jet
                .iter()
                .zip(g)
                .zip(&sys.orders)
                .filter_map(|((f, g), &m)| {
                    let mut diff = f.clone();
                    rpoly_add_into(&mut diff, g, &-Rat::one());
                    rpoly_order(&diff).map(|o| o as i64 - m as i64)
                })
                .min();
            let output_order = sys
                .w
                .iter()
                .filter_map(|wi| {
                    let mut diff = sys.evaluate(wi, jet);
                    rpoly_add_into(&mut diff, &sys.evaluate(wi, g), &-Rat::one());
                    rpoly_order(&diff)
                })
                .min();
            let strict = match (input_order, output_order) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(a), Some(b)) => b as i64 > a + q as i64,
            };
            Some(IncreaseResult { input_order, output_order, strict })
        }
    };
    Ok(RegularityReport { slots, increase })
}

/// Multiplies every coefficient of each jet component by `c`.
pub fn scale_jet(jet: &[RPoly], c: &Rat) -> Vec<RPoly> {
    jet.iter().map(|p| p.iter().map(|(e, v)| (e.clone(), v * c)).collect()).collect()
}

