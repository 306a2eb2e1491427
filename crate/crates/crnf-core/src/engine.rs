//! Degree-by-degree normalization.
//!
//! At quasidegree `k` the conjugacy equation reads `L x + Φ_k = T_k`, where `x` collects the
//! unknowns `(f_{k−1}, g_k)` and `T_k` depends only on lower-order data. A normal-form space
//! is cut out by linear conditions `C Φ = 0`. Whenever `ker C` is a complement of `im L`,
//! `C L x = C T_k` determines `Φ_k = T_k − L x` uniquely and `x` up to `ker L`.
//!
//! Every operator involved preserves the class `|p − q|` of a bidegree, so the system splits
//! into independent blocks. Each block is reduced once per family: the engine stores the
//! real matrix `x = S t` acting on real coordinates of `T_k`, with `Φ_k = t − L x`, and bases
//! of the free directions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::conditions::{check_n0, check_space, Condition, ConditionReport, Space};
use crate::conjugacy::{lhs_from_parts, residual_at, verify_conjugacy, ManifoldSpec, Transform};
use crate::error::{Error, Result, SplitFailure};
use crate::fischer::weight;
use crate::linalg::{min_norm_solver, weighted_inner, Mat};
use crate::quadric::HermitianFamily;
use crate::rat::{gr, gr_i, gr_int, multi_factorial, GaussRat, Rat};
use crate::series::{monomials_of_weight, BigradedSeries, HoloSeries, Mono};

/// Which normalization to perform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    /// Full normal form in `N̂_f`.
    Full,
    /// Weak normal form in `N̂_f^w` with prescribed `f_0(w)`.
    Weak,
    /// Normal coordinates only: `Φ_{p,0} = Φ_{0,p} = 0`, solved with `g` alone.
    Prepare,
    /// `K* Φ_{p,1} = K̄* Φ_{1,p} = 0` for `p ≥ 4`, solved with `f_{p}(w) z^p`, `p ≥ 4`.
    P1High,
    /// Chern–Moser normal form, `d = 1`.
    ChernMoser,
}

impl Mode {
    fn allows_f(self, zdeg: u32) -> bool {
        match self {
            Mode::Full | Mode::ChernMoser => true,
            Mode::Weak => zdeg >= 1,
            Mode::Prepare => false,
            Mode::P1High => zdeg >= 4,
        }
    }

    fn allows_g(self) -> bool {
        !matches!(self, Mode::P1High)
    }

    /// Target space checked on the final result.
    pub fn space(self) -> Option<Space> {
        match self {
            Mode::Full => Some(Space::Full),
            Mode::Weak => Some(Space::Weak),
            Mode::ChernMoser => Some(Space::ChernMoser),
            Mode::Prepare | Mode::P1High => None,
        }
    }
}

/// How the part of the unknowns lying in `ker L` is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelPolicy {
    /// Unknowns orthogonal to `ker L` in the standard Fischer product.
    ImageOfAdjoint,
    /// Kernel parameters chosen so that the first coefficient of `Φ` they influence has
    /// minimal norm. The result does not depend on the coordinates the input is given in.
    Intrinsic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Part {
    Re,
    Im,
}

fn part_unit(p: Part) -> GaussRat {
    match p {
        Part::Re => gr_int(1),
        Part::Im => gr_i(),
    }
}

fn part_of(c: &GaussRat, p: Part) -> Rat {
    match p {
        Part::Re => c.re.clone(),
        Part::Im => c.im.clone(),
    }
}

fn class_of(zdeg: u32, zbdeg: u32) -> u32 {
    zdeg.abs_diff(zbdeg)
}

/// Real coordinates on real-valued `C^s`-valued series of one quasidegree and class.
///
/// A coefficient pair `c(α,β,γ) = conj c(β,α,γ)` is represented once, at the smaller of the
/// two monomials, by its real and imaginary parts (only the real part when `α = β`).
#[derive(Clone, Debug)]
pub struct RealSeriesBasis {
    n: usize,
    d: usize,
    s: usize,
    entries: Vec<(usize, Mono, Part)>,
}

impl RealSeriesBasis {
    pub fn new(n: usize, d: usize, s: usize, k: u32, class: Option<u32>) -> Self {
        let mut entries = Vec::new();
        for m in monomials_of_weight(n, d, k, false) {
            if class.is_some_and(|c| class_of(m.zdeg(n), m.zbdeg(n)) != c) {
                continue;
            }
            let mm = m.mirror(n);
            if m > mm {
                continue;
            }
            for j in 0..s {
                entries.push((j, m.clone(), Part::Re));
                if m != mm {
                    entries.push((j, m.clone(), Part::Im));
                }
            }
        }
        RealSeriesBasis { n, d, s, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn coords(&self, x: &BigradedSeries) -> Vec<Rat> {
        self.entries.iter().map(|(j, m, p)| part_of(&x.coeff(*j, m), *p)).collect()
    }

    pub fn series(&self, v: &[Rat], cap: u32) -> BigradedSeries {
        let n = self.n;
        let mut terms = Vec::new();
        for ((j, m, p), x) in self.entries.iter().zip(v) {
            if x.is_zero() {
                continue;
            }
            let c = part_unit(*p) * gr(x.clone(), Rat::zero());
            let mm = m.mirror(n);
            if mm != *m {
                terms.push((*j, mm, c.conj()));
            }
            terms.push((*j, m.clone(), c));
        }
        BigradedSeries::from_terms(n, self.d, self.s, cap, terms)
    }

    /// Weights making `Σ w_i v_i²` the standard Fischer norm of the represented series.
    pub fn weights(&self) -> Vec<Rat> {
        let n = self.n;
        self.entries
            .iter()
            .map(|(_, m, _)| {
                let w = weight(m, n, false);
                if m.mirror(n) == *m {
                    w
                } else {
                    w * Rat::from_integer(2.into())
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    F,
    G,
}

/// Real coordinates on the degree-`k` unknowns of one class.
#[derive(Clone, Debug)]
struct UnknownBasis {
    n: usize,
    d: usize,
    entries: Vec<(Slot, usize, Mono, Part)>,
}

impl UnknownBasis {
    fn new(n: usize, d: usize, k: u32, class: u32, mode: Mode) -> Self {
        let mut entries = Vec::new();
        for m in monomials_of_weight(n, d, k - 1, true) {
            let a = m.zdeg(n);
            if class_of(a, 1) != class || !mode.allows_f(a) {
                continue;
            }
            for j in 0..n {
                entries.push((Slot::F, j, m.clone(), Part::Re));
                entries.push((Slot::F, j, m.clone(), Part::Im));
            }
        }
        if mode.allows_g() {
            for m in monomials_of_weight(n, d, k, true) {
                let a = m.zdeg(n);
                if a != class {
                    continue;
                }
                for j in 0..d {
                    if !(mode == Mode::Prepare && a == 0) {
                        entries.push((Slot::G, j, m.clone(), Part::Re));
                    }
                    entries.push((Slot::G, j, m.clone(), Part::Im));
                }
            }
        }
        UnknownBasis { n, d, entries }
    }

    fn dim(&self) -> usize {
        self.entries.len()
    }

    fn weights(&self) -> Vec<Rat> {
        let n = self.n;
        self.entries
            .iter()
            .map(|(_, _, m, _)| Rat::from_integer(multi_factorial(m.alpha(n)) * multi_factorial(m.gamma(n))))
            .collect()
    }

    /// `(ξ, η)`: the `f` and `g` parts as series.
    fn series(&self, v: &[Rat], cap: u32) -> (BigradedSeries, BigradedSeries) {
        let (n, d) = (self.n, self.d);
        let mut ft = Vec::new();
        let mut gt = Vec::new();
        for ((slot, j, m, p), x) in self.entries.iter().zip(v) {
            if x.is_zero() {
                continue;
            }
            let c = part_unit(*p) * gr(x.clone(), Rat::zero());
            match slot {
                Slot::F => ft.push((*j, m.clone(), c)),
                Slot::G => gt.push((*j, m.clone(), c)),
            }
        }
        (BigradedSeries::from_terms(n, d, n, cap, ft), BigradedSeries::from_terms(n, d, d, cap, gt))
    }
}

/// Residual series whose vanishing defines the target space of `mode`.
pub fn condition_outputs(family: &HermitianFamily, mode: Mode, phi: &BigradedSeries) -> Result<Vec<BigradedSeries>> {
    let rep = match mode {
        Mode::Full => check_space(family, phi, Space::Full)?,
        Mode::Weak => check_space(family, phi, Space::Weak)?,
        Mode::ChernMoser => check_space(family, phi, Space::ChernMoser)?,
        Mode::Prepare => check_n0(phi)?,
        Mode::P1High => {
            let mut out = Vec::new();
            let top = phi.degree().unwrap_or(0);
            for p in 4..=top.max(4) {
                out.push(family.kstar_apply(&phi.extract_pq(p, 1), false)?);
                out.push(family.kstar_apply(&phi.extract_pq(1, p), true)?);
            }
            return Ok(out);
        }
    };
    Ok(rep.conditions.into_iter().map(|c| c.residual).collect())
}

/// One reduced `(k, class)` block.
#[derive(Clone, Debug)]
struct Block {
    class: u32,
    u: UnknownBasis,
    v: RealSeriesBasis,
    l: Mat<Rat>,
    /// `x = S t`.
    solve: Mat<Rat>,
    kernel: Vec<Vec<Rat>>,
    /// Complement of `ker L` in `ker C L`.
    deficit: Vec<Vec<Rat>>,
}

impl Block {
    fn params(&self) -> impl Iterator<Item = &Vec<Rat>> {
        self.kernel.iter().chain(&self.deficit)
    }
}

fn build_block(family: &HermitianFamily, mode: Mode, k: u32, class: u32) -> Result<Block> {
    let (n, d) = (family.n(), family.d());
    let u = UnknownBasis::new(n, d, k, class, mode);
    let v = RealSeriesBasis::new(n, d, d, k, Some(class));
    // L column by column.
    let mut lcols = Vec::with_capacity(u.dim());
    for i in 0..u.dim() {
        let mut e = vec![Rat::zero(); u.dim()];
        e[i] = Rat::one();
        let (xi, eta) = u.series(&e, k);
        let img = lhs_from_parts(family, &xi, &eta, k)?;
        debug_assert!(img.terms().iter().all(|(_, m, _)| class_of(m.zdeg(n), m.zbdeg(n)) == class));
        lcols.push(v.coords(&img));
    }
    let l = Mat::from_cols(&lcols, v.dim());
    // C column by column, rows keyed by (output, component, monomial, part).
    let mut ccols: Vec<BTreeMap<(usize, usize, Mono, Part), Rat>> = Vec::with_capacity(v.dim());
    let mut keys: BTreeMap<(usize, usize, Mono, Part), usize> = BTreeMap::new();
    for i in 0..v.dim() {
        let mut e = vec![Rat::zero(); v.dim()];
        e[i] = Rat::one();
        let phi = v.series(&e, k);
        let mut col = BTreeMap::new();
        for (o, r) in condition_outputs(family, mode, &phi)?.into_iter().enumerate() {
            for (j, m, c) in r.terms() {
                for p in [Part::Re, Part::Im] {
                    let x = part_of(c, p);
                    if !x.is_zero() {
                        keys.insert((o, j, m.clone(), p), 0);
                        col.insert((o, j, m.clone(), p), x);
                    }
                }
            }
        }
        ccols.push(col);
    }
    for (idx, val) in keys.values_mut().enumerate() {
        *val = idx;
    }
    let mut c = Mat::<Rat>::zeros(keys.len(), v.dim());
    for (j, col) in ccols.into_iter().enumerate() {
        for (key, x) in col {
            c[(keys[&key], j)] = x;
        }
    }
    let cl = c.mul(&l);
    let rank_l = l.rank();
    let rank_c = c.rank();
    let sol = min_norm_solver(&cl, &u.weights());
    let rank_cl = sol.rank;
    if rank_cl < rank_c {
        return Err(Error::Split(SplitFailure::Inconsistent { degree: k, class }));
    }
    // S = X · C_P, Π = I − L S.
    let mut cp = Mat::<Rat>::zeros(sol.rows.len(), v.dim());
    for (ii, &ri) in sol.rows.iter().enumerate() {
        for j in 0..v.dim() {
            cp[(ii, j)] = c[(ri, j)].clone();
        }
    }
    let solve = sol.x.mul(&cp);
    let kernel = l.null_space();
    // Directions with C L x = 0 but L x ≠ 0 move Φ_k inside the target space.
    let mut deficit = Vec::new();
    if rank_cl < rank_l {
        let mut imgs: Vec<Vec<Rat>> = Vec::new();
        for x in cl.null_space() {
            imgs.push(l.mul_vec(&x));
            if Mat::from_cols(&imgs, v.dim()).rank() == imgs.len() {
                deficit.push(x);
            } else {
                imgs.pop();
            }
        }
    }
    Ok(Block { class, u, v, l, solve, kernel, deficit })
}

/// Free parameters per degree. At each degree the blocks are concatenated in class order,
/// each contributing its `ker L` basis followed by its deficit directions.
pub type Kappa = BTreeMap<u32, Vec<Rat>>;

/// Output of one pass of the degree loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub phi: BigradedSeries,
    pub transform: Transform,
}

/// Result of a normalization together with its exact checks.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormReport {
    pub mode: Mode,
    pub policy: KernelPolicy,
    pub phi: BigradedSeries,
    pub transform: Transform,
    pub conditions: ConditionReport,
    pub conjugacy_residual: BigradedSeries,
    /// Real dimension of `ker L_k` for each degree `k`.
    pub kernel_dims: Vec<(u32, usize)>,
    pub notes: Vec<String>,
}

impl NormalFormReport {
    /// Conjugacy holds exactly and every condition of the target space vanishes.
    pub fn ok(&self) -> bool {
        self.conjugacy_residual.is_zero() && self.conditions.pass()
    }
}

/// Precomputed blocks for one family, mode and cap.
#[derive(Clone, Debug)]
pub struct Engine {
    family: HermitianFamily,
    mode: Mode,
    cap: u32,
    /// `blocks[k - 3]` holds the classes of degree `k`.
    blocks: Vec<Vec<Block>>,
}

impl Engine {
    pub fn new(family: &HermitianFamily, mode: Mode, cap: u32) -> Result<Self> {
        family.check()?;
        if mode == Mode::ChernMoser && family.d() != 1 {
            return Err(Error::Precondition("Chern-Moser normalization needs d = 1"));
        }
        let mut blocks = Vec::new();
        for k in 3..=cap {
            let mut row = Vec::new();
            for class in 0..=k {
                row.push(build_block(family, mode, k, class)?);
            }
            blocks.push(row);
        }
        Ok(Engine { family: family.clone(), mode, cap, blocks })
    }

    pub fn family(&self) -> &HermitianFamily {
        &self.family
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Real dimension of `ker L_k` restricted to this mode's unknowns.
    pub fn kernel_dim(&self, k: u32) -> usize {
        self.degree_blocks(k).iter().map(|b| b.kernel.len()).sum()
    }

    fn degree_blocks(&self, k: u32) -> &[Block] {
        &self.blocks[(k - 3) as usize]
    }

    fn check_spec(&self, spec: &ManifoldSpec) -> Result<()> {
        if spec.family() != &self.family || spec.cap() > self.cap {
            return Err(Error::Precondition("spec does not match the engine's family or exceeds its cap"));
        }
        Ok(())
    }

    /// Degree loop through `upto` with fixed kernel parameters.
    pub fn run(&self, spec: &ManifoldSpec, f0: Option<&HoloSeries>, kappa: &Kappa, upto: u32) -> Result<Run> {
        let mut st = self.start(spec, f0)?;
        for k in 3..=upto.min(spec.cap()) {
            self.step(spec, kappa, &mut st, k)?;
        }
        Ok(st)
    }

    fn start(&self, spec: &ManifoldSpec, f0: Option<&HoloSeries>) -> Result<Run> {
        self.check_spec(spec)?;
        let (n, d, cap) = (spec.n(), spec.d(), spec.cap());
        let mut transform = Transform::identity(n, d, cap);
        if let Some(f0) = f0 {
            transform = transform.add(&Transform::new(f0.with_cap(cap), HoloSeries::zero(n, d, d, cap))?);
        }
        Ok(Run { phi: BigradedSeries::zero(n, d, d, cap), transform })
    }

    /// Solves degree `k`, given a state normalized through `k − 1`.
    fn step(&self, spec: &ManifoldSpec, kappa: &Kappa, st: &mut Run, k: u32) -> Result<()> {
        let cap = spec.cap();
        let rhs = residual_at(spec, &st.transform.with_cap(k), &st.phi.with_cap(k), k)?.extract_wt(k).neg();
        let kap = kappa.get(&k);
        let mut kidx = 0;
        for b in self.degree_blocks(k) {
            let tv = b.v.coords(&rhs);
            let mut x = b.solve.mul_vec(&tv);
            for kv in b.params() {
                if let Some(c) = kap.and_then(|kp| kp.get(kidx)) {
                    if !c.is_zero() {
                        for (xi, ki) in x.iter_mut().zip(kv) {
                            *xi = xi.clone() + c.clone() * ki.clone();
                        }
                    }
                }
                kidx += 1;
            }
            let lx = b.l.mul_vec(&x);
            let ph: Vec<Rat> = tv.iter().zip(&lx).map(|(a, b)| a.clone() - b.clone()).collect();
            st.phi = st.phi.add(&b.v.series(&ph, cap));
            let (xi, eta) = b.u.series(&x, cap);
            st.transform = st.transform.add(&Transform::new(HoloSeries::new(xi)?, HoloSeries::new(eta)?)?);
        }
        Ok(())
    }

    /// Runs the degree loop, fixes the kernel according to `policy`, and checks the result.
    pub fn normalize(&self, spec: &ManifoldSpec, f0: Option<&HoloSeries>, policy: KernelPolicy) -> Result<NormalFormReport> {
        if let Some(f0) = f0 {
            check_f0(f0, spec)?;
        }
        if f0.is_some() && !matches!(self.mode, Mode::Weak | Mode::Prepare) {
            return Err(Error::Precondition("f_0 can only be prescribed for weak normalization or preparation"));
        }
        let mut notes = Vec::new();
        let run = match policy {
            KernelPolicy::ImageOfAdjoint => self.run(spec, f0, &Kappa::new(), spec.cap())?,
            KernelPolicy::Intrinsic => self.intrinsic_run(spec, f0, &mut notes)?,
        };
        let conditions = match self.mode.space() {
            Some(space) => check_space(&self.family, &run.phi, space)?,
            None => {
                let mut rep = ConditionReport::default();
                for (i, r) in condition_outputs(&self.family, self.mode, &run.phi)?.into_iter().enumerate() {
                    rep.conditions.push(Condition { name: format!("{:?} condition {}", self.mode, i), residual: r });
                }
                rep
            }
        };
        let conjugacy_residual = verify_conjugacy(spec, &run.transform, &run.phi)?;
        let kernel_dims = (3..=spec.cap()).map(|k| (k, self.kernel_dim(k))).collect();
        Ok(NormalFormReport {
            mode: self.mode,
            policy,
            phi: run.phi,
            transform: run.transform,
            conditions,
            conjugacy_residual,
            kernel_dims,
            notes,
        })
    }

    /// Fixes the free parameters in order of the degree where they first act on `Φ`, choosing
    /// them to minimize the Fischer norm of `Φ` there. Deficit directions of degree `t` act on
    /// `Φ_t`; kernel directions of degree `k` act on `Φ_{k_0 + k − 2}`, `k_0` the order of `Φ`.
    fn intrinsic_run(&self, spec: &ManifoldSpec, f0: Option<&HoloSeries>, notes: &mut Vec<String>) -> Result<Run> {
        let cap = spec.cap();
        let mut kappa = Kappa::new();
        // states[i]: normalized through degree i + 2 under the current kappa.
        let mut states = vec![self.start(spec, f0)?];
        for t in 3..=cap {
            let mut base = states[(t - 3) as usize].clone();
            self.step(spec, &kappa, &mut base, t)?;
            let k0 = base.phi.truncate(t - 1).order();
            // (degree, index into that degree's parameter vector)
            let mut slots: Vec<(u32, usize)> = Vec::new();
            for k in 3..=t {
                let mut idx = 0;
                for b in self.degree_blocks(k) {
                    for _ in &b.kernel {
                        if k0.is_some_and(|k0| k0 + k - 2 == t) {
                            slots.push((k, idx));
                        }
                        idx += 1;
                    }
                    for _ in &b.deficit {
                        if k == t {
                            slots.push((k, idx));
                        }
                        idx += 1;
                    }
                }
            }
            if slots.is_empty() {
                states.push(base);
                continue;
            }
            let kmin = slots.iter().map(|s| s.0).min().unwrap_or(t);
            let basis = RealSeriesBasis::new(spec.n(), spec.d(), spec.d(), t, None);
            let w = basis.weights();
            let with = |kap: &Kappa, vals: &[Rat]| -> Kappa {
                let mut out = kap.clone();
                for (&(k, i), v) in slots.iter().zip(vals) {
                    let e = out.entry(k).or_insert_with(|| vec![Rat::zero(); self.param_dim(k)]);
                    e[i] = v.clone();
                }
                out
            };
            let resume = |kap: &Kappa| -> Result<Vec<Run>> {
                let mut st = states[(kmin - 3) as usize].clone();
                let mut out = Vec::new();
                for k in kmin..=t {
                    self.step(spec, kap, &mut st, k)?;
                    out.push(st.clone());
                }
                Ok(out)
            };
            let phi_at = |kap: &Kappa| -> Result<Vec<Rat>> {
                let r = resume(kap)?;
                Ok(basis.coords(&r.last().expect("kmin <= t").phi.extract_wt(t)))
            };
            let dim = slots.len();
            let p0 = basis.coords(&base.phi.extract_wt(t));
            let mut cols = Vec::with_capacity(dim);
            for j in 0..dim {
                let mut e = vec![Rat::zero(); dim];
                e[j] = Rat::one();
                let pj = phi_at(&with(&kappa, &e))?;
                cols.push(pj.iter().zip(&p0).map(|(a, b)| a.clone() - b.clone()).collect::<Vec<_>>());
            }
            // Normal equations G κ = −Mᵀ W p0.
            let mut g = Mat::<Rat>::zeros(dim, dim);
            let mut rhs = vec![Rat::zero(); dim];
            for a in 0..dim {
                for b in 0..dim {
                    g[(a, b)] = weighted_inner(&cols[a], &cols[b], &w);
                }
                rhs[a] = -weighted_inner(&cols[a], &p0, &w);
            }
            let sol = min_norm_solver(&g, &vec![Rat::one(); dim]);
            if sol.rank < dim {
                notes.push(format!(
                    "degree {t}: {dim} free parameters act on Phi_{t} with rank {}; minimal-norm choice taken",
                    sol.rank
                ));
            }
            let kv = sol.solve(&rhs);
            if kv.iter().all(|x| x.is_zero()) {
                states.push(base);
                continue;
            }
            let next = with(&kappa, &kv);
            let redo = resume(&next)?;
            let got = basis.coords(&redo.last().expect("kmin <= t").phi.extract_wt(t));
            let mut want = p0.clone();
            for (c, col) in kv.iter().zip(&cols) {
                for (x, y) in want.iter_mut().zip(col) {
                    *x = x.clone() + c.clone() * y.clone();
                }
            }
            if got != want {
                notes.push(format!("degree {t}: free parameters enter Phi_{t} non-affinely"));
            }
            states.truncate((kmin - 2) as usize);
            states.extend(redo);
            kappa = next;
        }
        Ok(states.pop().expect("one state per degree"))
    }

    /// Number of free parameters at degree `k`: `dim ker L_k` plus deficit directions.
    pub fn param_dim(&self, k: u32) -> usize {
        self.degree_blocks(k).iter().map(|b| b.kernel.len() + b.deficit.len()).sum()
    }

    /// Directions at degree `k` that move `Φ_k` inside the target space.
    pub fn deficit_dim(&self, k: u32) -> usize {
        self.degree_blocks(k).iter().map(|b| b.deficit.len()).sum()
    }

    /// Orthogonality of the degree-`k` unknowns of `t` to `ker L_k` in the Fischer product on
    /// unknowns. Holds for every output of [`KernelPolicy::ImageOfAdjoint`].
    pub fn unknowns_orthogonal_to_kernel(&self, t: &Transform, k: u32) -> bool {
        let f = t.f_rest().as_series();
        let g = t.g_rest().as_series();
        self.degree_blocks(k).iter().all(|b| {
            let x: Vec<Rat> = b
                .u
                .entries
                .iter()
                .map(|(slot, j, m, p)| {
                    let c = match slot {
                        Slot::F => f.coeff(*j, m),
                        Slot::G => g.coeff(*j, m),
                    };
                    part_of(&c, *p)
                })
                .collect();
            let w = b.u.weights();
            b.kernel.iter().all(|kv| weighted_inner(&x, kv, &w).is_zero())
        })
    }

    /// `(rank L, dim ker L, dim of the normal-form complement)` per class at degree `k`.
    pub fn block_ranks(&self, k: u32) -> Vec<(u32, usize, usize, usize)> {
        self.degree_blocks(k)
            .iter()
            .map(|b| {
                let r = b.l.rank();
                (b.class, r, b.kernel.len(), b.v.dim() - r)
            })
            .collect()
    }
}

fn check_f0(f0: &HoloSeries, spec: &ManifoldSpec) -> Result<()> {
    let s = f0.as_series();
    let n = spec.n();
    if s.n() != n || s.d() != spec.d() || s.s() != n {
        return Err(Error::DimensionMismatch("f_0 must be a C^n-valued series in w"));
    }
    if s.terms().iter().any(|(_, m, _)| m.zdeg(n) != 0) {
        return Err(Error::Precondition("f_0 may depend on w only"));
    }
    if s.order().is_some_and(|o| o < 2) {
        return Err(Error::Precondition("f_0 must vanish at 0"));
    }
    Ok(())
}

/// Full formal normal form in `N̂_f`, kernel fixed intrinsically.
pub fn normalize_formal(spec: &ManifoldSpec) -> Result<NormalFormReport> {
    Engine::new(spec.family(), Mode::Full, spec.cap())?.normalize(spec, None, KernelPolicy::Intrinsic)
}

/// Weak normal form in `N̂_f^w` with prescribed `f_0(w)`.
pub fn normalize_weak(spec: &ManifoldSpec, f0: &HoloSeries) -> Result<NormalFormReport> {
    Engine::new(spec.family(), Mode::Weak, spec.cap())?.normalize(spec, Some(f0), KernelPolicy::ImageOfAdjoint)
}

/// Normal coordinates: returns the prepared spec and the map `t0` taking it to `spec`.
pub fn prepare_normal_coordinates(spec: &ManifoldSpec, f0: Option<&HoloSeries>) -> Result<(ManifoldSpec, Transform)> {
    let rep = Engine::new(spec.family(), Mode::Prepare, spec.cap())?.normalize(spec, f0, KernelPolicy::ImageOfAdjoint)?;
    if !rep.ok() {
        return Err(Error::Precondition("preparation did not reach normal coordinates"));
    }
    Ok((spec.with_perturbation(rep.phi)?, rep.transform))
}

/// Normalizes the `(p, 1)` terms for `p ≥ 4` with `f_p(w) z^p`, `p ≥ 4`.
pub fn normalize_p1_high(spec: &ManifoldSpec) -> Result<(Transform, BigradedSeries)> {
    let rep = Engine::new(spec.family(), Mode::P1High, spec.cap())?.normalize(spec, None, KernelPolicy::ImageOfAdjoint)?;
    Ok((rep.transform, rep.phi))
}

/// Chern–Moser normal form for `d = 1`.
pub fn cm_normalize(spec: &ManifoldSpec) -> Result<NormalFormReport> {
    Engine::new(spec.family(), Mode::ChernMoser, spec.cap())?.normalize(spec, None, KernelPolicy::ImageOfAdjoint)
}
