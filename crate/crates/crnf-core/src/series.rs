//! Sparse truncated series in `(z, z̄, u)` graded by quasidegree.
//!
//! Variables `z` and `z̄` have weight 1, the real transversal variables `u` have weight 2.
//! A holomorphic series in `(z, w)` is stored in the same layout with `β = 0` and the
//! `u` slot standing for `w`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{gr_i, gr_int, gr_rat, GaussRat, Rat};

/// Exponents `(α, β, γ)` stored flat with the quasidegree in front, so the derived
/// order is graded-lex on `(wt, α, β, γ)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    wt: u32,
    e: Vec<u8>,
}

impl Mono {
    pub fn new(alpha: &[u8], beta: &[u8], gamma: &[u8]) -> Mono {
        debug_assert_eq!(alpha.len(), beta.len());
        let wt = sum(alpha) + sum(beta) + 2 * sum(gamma);
        let mut e = Vec::with_capacity(alpha.len() * 2 + gamma.len());
        e.extend_from_slice(alpha);
        e.extend_from_slice(beta);
        e.extend_from_slice(gamma);
        Mono { wt, e }
    }

    pub fn one(n: usize, d: usize) -> Mono {
        Mono { wt: 0, e: vec![0; 2 * n + d] }
    }

    pub fn wt(&self) -> u32 {
        self.wt
    }

    pub fn exps(&self) -> &[u8] {
        &self.e
    }

    pub fn alpha(&self, n: usize) -> &[u8] {
        &self.e[..n]
    }

    pub fn beta(&self, n: usize) -> &[u8] {
        &self.e[n..2 * n]
    }

    pub fn gamma(&self, n: usize) -> &[u8] {
        &self.e[2 * n..]
    }

    pub fn zdeg(&self, n: usize) -> u32 {
        sum(self.alpha(n))
    }

    pub fn zbdeg(&self, n: usize) -> u32 {
        sum(self.beta(n))
    }

    pub fn udeg(&self, n: usize) -> u32 {
        sum(self.gamma(n))
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let e = self.e.iter().zip(&other.e).map(|(a, b)| a + b).collect();
        Mono { wt: self.wt + other.wt, e }
    }

    /// Swaps `α` and `β`.
    pub fn mirror(&self, n: usize) -> Mono {
        let mut e = self.e.clone();
        e[..n].copy_from_slice(&self.e[n..2 * n]);
        e[n..2 * n].copy_from_slice(&self.e[..n]);
        Mono { wt: self.wt, e }
    }

    /// Lowers exponent `var` by one, returning the old exponent as multiplier.
    fn lower(&self, var: usize, var_wt: u32) -> Option<(Mono, u32)> {
        let k = self.e[var];
        if k == 0 {
            return None;
        }
        let mut e = self.e.clone();
        e[var] -= 1;
        Some((Mono { wt: self.wt - var_wt, e }, k as u32))
    }

    fn raise(&self, var: usize, var_wt: u32) -> Mono {
        let mut e = self.e.clone();
        e[var] += 1;
        Mono { wt: self.wt + var_wt, e }
    }
}

fn sum(e: &[u8]) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

/// One scalar component: monomial to nonzero coefficient.
pub type Poly = BTreeMap<Mono, GaussRat>;

fn add_term(p: &mut Poly, m: Mono, c: GaussRat) {
    if c.is_zero() {
        return;
    }
    use alloc::collections::btree_map::Entry;
    match p.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Gaussian-integer coefficients over one common denominator. Products in this form need no
/// gcd per term; the result is reduced once when converted back.
#[derive(Clone)]
struct IntPoly {
    den: BigInt,
    terms: Vec<(Mono, BigInt, BigInt)>,
}

/// `c = (re + i·im) / den` with integer parts.
fn gauss_int(c: &GaussRat) -> (BigInt, BigInt, BigInt) {
    let den = c.re.denom().lcm(c.im.denom());
    let re = c.re.numer() * (&den / c.re.denom());
    let im = c.im.numer() * (&den / c.im.denom());
    (re, im, den)
}

impl IntPoly {
    fn one(n: usize, d: usize) -> IntPoly {
        IntPoly { den: BigInt::one(), terms: vec![(Mono::one(n, d), BigInt::one(), BigInt::zero())] }
    }

    fn from_poly(p: &Poly) -> IntPoly {
        let mut den = BigInt::one();
        for c in p.values() {
            for r in [&c.re, &c.im] {
                if !r.denom().is_one() {
                    den = den.lcm(r.denom());
                }
            }
        }
        let scale = |r: &Rat| if r.is_zero() { BigInt::zero() } else { r.numer() * (&den / r.denom()) };
        let terms = p.iter().map(|(m, c)| (m.clone(), scale(&c.re), scale(&c.im))).collect();
        IntPoly { den, terms }
    }

    fn mul(&self, other: &IntPoly, cap: u32) -> IntPoly {
        let mut acc: BTreeMap<Mono, (BigInt, BigInt)> = BTreeMap::new();
        for (ma, ar, ai) in &self.terms {
            if ma.wt > cap {
                break;
            }
            for (mb, br, bi) in &other.terms {
                if ma.wt + mb.wt > cap {
                    break;
                }
                let e = acc.entry(ma.mul(mb)).or_insert_with(|| (BigInt::zero(), BigInt::zero()));
                if !ar.is_zero() {
                    e.0 += ar * br;
                    e.1 += ar * bi;
                }
                if !ai.is_zero() {
                    e.0 -= ai * bi;
                    e.1 += ai * br;
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, (re, im))| !(re.is_zero() && im.is_zero())).map(|(m, (re, im))| (m, re, im)).collect();
        IntPoly { den: &self.den * &other.den, terms }
    }
}

/// `Σ c_i p_i`, reduced once per output term.
fn int_lincomb<'a>(items: impl IntoIterator<Item = (&'a GaussRat, &'a IntPoly)>) -> Poly {
    let items: Vec<_> = items
        .into_iter()
        .filter(|(c, p)| !c.is_zero() && !p.terms.is_empty())
        .map(|(c, p)| {
            let (cr, ci, cd) = gauss_int(c);
            (cr, ci, cd * &p.den, p)
        })
        .collect();
    let mut den = BigInt::one();
    for (_, _, d, _) in &items {
        den = den.lcm(d);
    }
    let mut acc: BTreeMap<Mono, (BigInt, BigInt)> = BTreeMap::new();
    for (cr, ci, d, p) in &items {
        let f = &den / d;
        let (fr, fi) = (cr * &f, ci * &f);
        for (m, pr, pi) in &p.terms {
            let e = acc.entry(m.clone()).or_insert_with(|| (BigInt::zero(), BigInt::zero()));
            e.0 += &fr * pr - &fi * pi;
            e.1 += &fr * pi + &fi * pr;
        }
    }
    acc.into_iter()
        .filter(|(_, (re, im))| !(re.is_zero() && im.is_zero()))
        .map(|(m, (re, im))| (m, GaussRat::new(Rat::new(re, den.clone()), Rat::new(im, den.clone()))))
        .collect()
}

fn poly_mul(a: &Poly, b: &Poly, cap: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Poly::new();
    }
    let prod = IntPoly::from_poly(a).mul(&IntPoly::from_poly(b), cap);
    int_lincomb([(&gr_int(1), &prod)])
}

fn poly_scale(a: &Poly, c: &GaussRat) -> Poly {
    if c.is_zero() {
        return Poly::new();
    }
    a.iter().map(|(m, x)| (m.clone(), x * c)).collect()
}

fn poly_add_into(a: &mut Poly, b: &Poly) {
    for (m, c) in b {
        add_term(a, m.clone(), c.clone());
    }
}

fn poly_min_wt(a: &Poly) -> Option<u32> {
    a.keys().next().map(|m| m.wt)
}

/// Truncated vector-valued series in `(z, z̄, u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedSeries {
    n: usize,
    d: usize,
    cap: u32,
    comps: Vec<Poly>,
}

impl BigradedSeries {
    pub fn zero(n: usize, d: usize, s: usize, cap: u32) -> Self {
        BigradedSeries { n, d, cap, comps: vec![Poly::new(); s] }
    }

    /// Builds a series from `(component, monomial, coefficient)` triples, summing repeats
    /// and dropping terms above `cap`.
    pub fn from_terms<I>(n: usize, d: usize, s: usize, cap: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, Mono, GaussRat)>,
    {
        let mut out = Self::zero(n, d, s, cap);
        for (j, m, c) in terms {
            debug_assert_eq!(m.e.len(), 2 * n + d);
            if m.wt <= cap {
                add_term(&mut out.comps[j], m, c);
            }
        }
        out
    }

    pub fn from_comps(n: usize, d: usize, cap: u32, comps: Vec<Poly>) -> Self {
        let mut s = BigradedSeries { n, d, cap, comps };
        for p in &mut s.comps {
            p.retain(|m, c| m.wt <= cap && !c.is_zero());
        }
        s
    }

    /// Scalar series `c · z^α z̄^β u^γ`.
    pub fn monomial(n: usize, d: usize, cap: u32, m: Mono, c: GaussRat) -> Self {
        Self::from_terms(n, d, 1, cap, [(0, m, c)])
    }

    pub fn constant(n: usize, d: usize, cap: u32, c: GaussRat) -> Self {
        Self::monomial(n, d, cap, Mono::one(n, d), c)
    }

    fn unit(n: usize, d: usize, cap: u32, var: usize) -> Self {
        let mut e = vec![0u8; 2 * n + d];
        e[var] = 1;
        let wt = if var < 2 * n { 1 } else { 2 };
        Self::monomial(n, d, cap, Mono { wt, e }, gr_int(1))
    }

    pub fn var_z(n: usize, d: usize, cap: u32, a: usize) -> Self {
        Self::unit(n, d, cap, a)
    }

    pub fn var_zbar(n: usize, d: usize, cap: u32, a: usize) -> Self {
        Self::unit(n, d, cap, n + a)
    }

    pub fn var_u(n: usize, d: usize, cap: u32, j: usize) -> Self {
        Self::unit(n, d, cap, 2 * n + j)
    }

    /// The vector `(z_1, …, z_n)`.
    pub fn z_vector(n: usize, d: usize, cap: u32) -> Self {
        Self::stack((0..n).map(|a| Self::var_z(n, d, cap, a)).collect())
    }

    /// The vector `(z̄_1, …, z̄_n)`.
    pub fn zbar_vector(n: usize, d: usize, cap: u32) -> Self {
        Self::stack((0..n).map(|a| Self::var_zbar(n, d, cap, a)).collect())
    }

    /// The vector `(u_1, …, u_d)`.
    pub fn u_vector(n: usize, d: usize, cap: u32) -> Self {
        Self::stack((0..d).map(|j| Self::var_u(n, d, cap, j)).collect())
    }

    /// Concatenates scalar series into one vector-valued series.
    pub fn stack(parts: Vec<BigradedSeries>) -> Self {
        let first = &parts[0];
        let (n, d) = (first.n, first.d);
        let cap = parts.iter().map(|p| p.cap).min().unwrap_or(first.cap);
        let comps = parts.into_iter().flat_map(|p| p.comps).collect();
        Self::from_comps(n, d, cap, comps)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn s(&self) -> usize {
        self.comps.len()
    }
    pub fn cap(&self) -> u32 {
        self.cap
    }
    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn comp(&self, j: usize) -> BigradedSeries {
        BigradedSeries { n: self.n, d: self.d, cap: self.cap, comps: vec![self.comps[j].clone()] }
    }

    pub fn coeff(&self, j: usize, m: &Mono) -> GaussRat {
        self.comps[j].get(m).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// All stored terms in canonical order: by monomial, then component.
    pub fn terms(&self) -> Vec<(usize, &Mono, &GaussRat)> {
        let mut out: Vec<(usize, &Mono, &GaussRat)> = self
            .comps
            .iter()
            .enumerate()
            .flat_map(|(j, p)| p.iter().map(move |(m, c)| (j, m, c)))
            .collect();
        out.sort_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)));
        out
    }

    pub fn num_terms(&self) -> usize {
        self.comps.iter().map(|p| p.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|p| p.is_empty())
    }

    /// Smallest quasidegree present.
    pub fn order(&self) -> Option<u32> {
        self.comps.iter().filter_map(poly_min_wt).min()
    }

    /// Largest quasidegree present.
    pub fn degree(&self) -> Option<u32> {
        self.comps.iter().filter_map(|p| p.keys().next_back().map(|m| m.wt)).max()
    }

    pub fn with_cap(&self, cap: u32) -> Self {
        Self::from_comps(self.n, self.d, cap, self.comps.clone())
    }

    fn check_shape(&self, other: &Self, what: &'static str) -> Result<()> {
        if self.n != other.n || self.d != other.d || self.s() != other.s() {
            return Err(Error::DimensionMismatch(what));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other, "series addition")?;
        let cap = self.cap.min(other.cap);
        let mut out = self.with_cap(cap);
        for (p, q) in out.comps.iter_mut().zip(&other.comps) {
            for (m, c) in q.range(..Mono { wt: cap + 1, e: Vec::new() }) {
                add_term(p, m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Panicking addition for internal use where shapes are known to agree.
    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("series shapes agree")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("series shapes agree")
    }

    pub fn neg(&self) -> Self {
        self.scale(&gr_int(-1))
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        let comps = self.comps.iter().map(|p| poly_scale(p, c)).collect();
        BigradedSeries { n: self.n, d: self.d, cap: self.cap, comps }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&gr_rat(r.clone()))
    }

    /// Product truncated at the smaller cap. One factor must be scalar, or both must have
    /// equal value dimension (componentwise product).
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::DimensionMismatch("series product"));
        }
        let cap = self.cap.min(other.cap);
        let comps: Vec<Poly> = match (self.s(), other.s()) {
            (1, _) => other.comps.iter().map(|q| poly_mul(&self.comps[0], q, cap)).collect(),
            (_, 1) => self.comps.iter().map(|p| poly_mul(p, &other.comps[0], cap)).collect(),
            (a, b) if a == b => {
                self.comps.iter().zip(&other.comps).map(|(p, q)| poly_mul(p, q, cap)).collect()
            }
            _ => return Err(Error::DimensionMismatch("series product")),
        };
        Ok(BigradedSeries { n: self.n, d: self.d, cap, comps })
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("series shapes agree")
    }

    /// Scalar product of two vector series: `Σ_j a_j b_j` (no conjugation).
    pub fn dot(&self, other: &Self) -> Self {
        assert_eq!(self.s(), other.s());
        let cap = self.cap.min(other.cap);
        let mut acc = Poly::new();
        for (p, q) in self.comps.iter().zip(&other.comps) {
            poly_add_into(&mut acc, &poly_mul(p, q, cap));
        }
        BigradedSeries { n: self.n, d: self.d, cap, comps: vec![acc] }
    }

    /// Swaps `z ↔ z̄` and conjugates every coefficient.
    pub fn conjugate(&self) -> Self {
        let n = self.n;
        let comps = self
            .comps
            .iter()
            .map(|p| p.iter().map(|(m, c)| (m.mirror(n), c.conj())).collect())
            .collect();
        BigradedSeries { n, d: self.d, cap: self.cap, comps }
    }

    pub fn is_real_valued(&self) -> bool {
        let n = self.n;
        self.comps.iter().all(|p| p.iter().all(|(m, c)| p.get(&m.mirror(n)) == Some(&c.conj())))
    }

    /// Real part in the series sense: `(a + conjugate(a)) / 2`.
    pub fn real_part(&self) -> Self {
        self.add(&self.conjugate()).scale_rat(&Rat::new(1.into(), 2.into()))
    }

    /// Imaginary part in the series sense: `(a − conjugate(a)) / 2i`.
    pub fn imag_part(&self) -> Self {
        let half_over_i = GaussRat::new(Rat::zero(), Rat::new((-1).into(), 2.into()));
        self.sub(&self.conjugate()).scale(&half_over_i)
    }

    fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|p| p.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect())
            .collect();
        BigradedSeries { n: self.n, d: self.d, cap: self.cap, comps }
    }

    /// The bidegree `(p, q)` component: terms with `|α| = p`, `|β| = q`.
    pub fn extract_pq(&self, p: u32, q: u32) -> Self {
        let n = self.n;
        self.filter(|m| m.zdeg(n) == p && m.zbdeg(n) == q)
    }

    /// Terms of quasidegree exactly `k`.
    pub fn extract_wt(&self, k: u32) -> Self {
        self.filter(|m| m.wt == k)
    }

    /// Terms of quasidegree at most `k`.
    pub fn truncate(&self, k: u32) -> Self {
        self.filter(|m| m.wt <= k)
    }

    /// Terms whose bidegree satisfies `|p − q| = class`.
    pub fn extract_class(&self, class: u32) -> Self {
        let n = self.n;
        self.filter(|m| (m.zdeg(n) as i64 - m.zbdeg(n) as i64).unsigned_abs() as u32 == class)
    }

    pub fn filter_terms(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        self.filter(keep)
    }

    /// Bidegrees present, sorted.
    pub fn bidegrees(&self) -> Vec<(u32, u32)> {
        let n = self.n;
        let mut v: Vec<(u32, u32)> =
            self.comps.iter().flat_map(|p| p.keys().map(move |m| (m.zdeg(n), m.zbdeg(n)))).collect();
        v.sort();
        v.dedup();
        v
    }

    fn derive(&self, var: usize, var_wt: u32) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|p| {
                let mut out = Poly::new();
                for (m, c) in p {
                    if let Some((m2, k)) = m.lower(var, var_wt) {
                        add_term(&mut out, m2, c * gr_int(k as i64));
                    }
                }
                out
            })
            .collect();
        BigradedSeries { n: self.n, d: self.d, cap: self.cap, comps }
    }

    pub fn d_z(&self, a: usize) -> Self {
        self.derive(a, 1)
    }

    pub fn d_zbar(&self, a: usize) -> Self {
        self.derive(self.n + a, 1)
    }

    pub fn d_u(&self, j: usize) -> Self {
        self.derive(2 * self.n + j, 2)
    }

    /// Mixed `u`-derivative `∂^γ_u`.
    pub fn d_u_multi(&self, gamma: &[u8]) -> Self {
        let mut out = self.clone();
        for (j, &k) in gamma.iter().enumerate() {
            for _ in 0..k {
                out = out.d_u(j);
            }
        }
        out
    }

    fn times_var(&self, var: usize, var_wt: u32) -> Self {
        let cap = self.cap;
        let comps = self
            .comps
            .iter()
            .map(|p| p.iter().map(|(m, c)| (m.raise(var, var_wt), c.clone())).filter(|(m, _)| m.wt <= cap).collect())
            .collect();
        BigradedSeries { n: self.n, d: self.d, cap, comps }
    }

    pub fn times_u(&self, j: usize) -> Self {
        self.times_var(2 * self.n + j, 2)
    }

    pub fn times_z(&self, a: usize) -> Self {
        self.times_var(a, 1)
    }

    pub fn times_zbar(&self, a: usize) -> Self {
        self.times_var(self.n + a, 1)
    }

    /// `Σ_j ∂_{u_j} self · v_j`: the `u`-derivative contracted with a `d`-vector series `v`.
    pub fn du_contract(&self, v: &Self) -> Self {
        assert_eq!(v.s(), self.d);
        let mut acc = BigradedSeries::zero(self.n, self.d, self.s(), self.cap.min(v.cap));
        for j in 0..self.d {
            acc = acc.add(&self.d_u(j).mul(&v.comp(j)));
        }
        acc
    }

    /// Evaluates the series after substituting every variable by a scalar series.
    ///
    /// `images` is indexed like the exponent layout `(z, z̄, u)`. Truncation at `cap`
    /// is exact provided each image has order at least the weight of its variable.
    pub fn compose(&self, images: &[BigradedSeries], cap: u32) -> Result<Self> {
        let (n, d) = (self.n, self.d);
        if images.len() != 2 * n + d {
            return Err(Error::DimensionMismatch("substitution images"));
        }
        for (v, img) in images.iter().enumerate() {
            let vw = if v < 2 * n { 1 } else { 2 };
            if img.s() != 1 || img.n != n || img.d != d {
                return Err(Error::DimensionMismatch("substitution image"));
            }
            if let Some(o) = img.order() {
                if o < vw {
                    return Err(Error::WeightTooLow { what: "substitution image", min: vw, found: o });
                }
            }
        }
        let mut powers: Vec<Vec<IntPoly>> =
            images.iter().map(|img| vec![IntPoly::one(n, d), IntPoly::from_poly(&img.comps[0])]).collect();
        let mut out = BigradedSeries::zero(n, d, self.s(), cap);
        // Products of images for each monomial, memoised on the full exponent vector.
        let mut memo: BTreeMap<Vec<u8>, IntPoly> = BTreeMap::new();
        for p in &self.comps {
            for m in p.keys() {
                if m.wt > cap || memo.contains_key(&m.e) {
                    continue;
                }
                let mut pr = IntPoly::one(n, d);
                for (v, &k) in m.e.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    while powers[v].len() <= k as usize {
                        let next = powers[v].last().unwrap().mul(&powers[v][1], cap);
                        powers[v].push(next);
                    }
                    pr = pr.mul(&powers[v][k as usize], cap);
                }
                memo.insert(m.e.clone(), pr);
            }
        }
        for (j, p) in self.comps.iter().enumerate() {
            out.comps[j] = int_lincomb(p.iter().filter(|(m, _)| m.wt <= cap).map(|(m, c)| (c, &memo[&m.e])));
        }
        Ok(out)
    }
}

/// Truncated holomorphic series in `(z, w)`: a [`BigradedSeries`] with no `z̄` and the
/// `u` slot read as `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoloSeries(BigradedSeries);

impl HoloSeries {
    pub fn new(s: BigradedSeries) -> Result<Self> {
        let n = s.n;
        if s.comps.iter().any(|p| p.keys().any(|m| m.zbdeg(n) != 0)) {
            return Err(Error::Precondition("holomorphic series may not contain z̄"));
        }
        Ok(HoloSeries(s))
    }

    pub fn zero(n: usize, d: usize, s: usize, cap: u32) -> Self {
        HoloSeries(BigradedSeries::zero(n, d, s, cap))
    }

    /// `c · z^α w^δ` in component `j` of an `s`-vector.
    pub fn monomial(n: usize, d: usize, s: usize, cap: u32, j: usize, alpha: &[u8], delta: &[u8], c: GaussRat) -> Self {
        let m = Mono::new(alpha, &vec![0; n], delta);
        HoloSeries(BigradedSeries::from_terms(n, d, s, cap, [(j, m, c)]))
    }

    pub fn as_series(&self) -> &BigradedSeries {
        &self.0
    }

    pub fn into_series(self) -> BigradedSeries {
        self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        HoloSeries(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        HoloSeries(self.0.sub(&other.0))
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        HoloSeries(self.0.scale(c))
    }

    pub fn extract_wt(&self, k: u32) -> Self {
        HoloSeries(self.0.extract_wt(k))
    }

    pub fn truncate(&self, k: u32) -> Self {
        HoloSeries(self.0.truncate(k))
    }

    pub fn with_cap(&self, cap: u32) -> Self {
        HoloSeries(self.0.with_cap(cap))
    }

    /// Terms of `z`-degree `p`: the coefficient `f_p(w) z^p`.
    pub fn zdeg_part(&self, p: u32) -> Self {
        HoloSeries(self.0.extract_pq(p, 0))
    }

    pub fn filter_terms(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        HoloSeries(self.0.filter(keep))
    }

    /// `Σ_γ (i·sign)^{|γ|}/γ! ∂^γ_w h · v^γ`, i.e. `h(z, u + i·sign·v)`, truncated at
    /// `min(cap(h), cap(v))`.
    pub fn substitute_w(&self, v: &BigradedSeries, sign: i32) -> Result<BigradedSeries> {
        let h = &self.0;
        let (n, d) = (h.n, h.d);
        if v.s() != d || v.n != n || v.d != d {
            return Err(Error::DimensionMismatch("substitute_w: v must be d-valued"));
        }
        if !v.is_real_valued() {
            return Err(Error::NotRealValued("substitute_w argument"));
        }
        if let Some(o) = v.order() {
            if o < 2 {
                return Err(Error::WeightTooLow { what: "substitute_w argument", min: 2, found: o });
            }
        }
        let cap = h.cap.min(v.cap);
        let isg = if sign >= 0 { gr_i() } else { -gr_i() };
        let mut images: Vec<BigradedSeries> = Vec::with_capacity(2 * n + d);
        for a in 0..n {
            images.push(BigradedSeries::var_z(n, d, cap, a));
        }
        for a in 0..n {
            images.push(BigradedSeries::var_zbar(n, d, cap, a));
        }
        for j in 0..d {
            images.push(BigradedSeries::var_u(n, d, cap, j).add(&v.comp(j).with_cap(cap).scale(&isg)));
        }
        h.compose(&images, cap)
    }
}

/// `Φ(F, conj F, (G + conj G)/2)` with `F = f(z, u+iv)`, `G = g(z, u+iv)`.
///
/// `phi` is a series in `(z, z̄, u)`; `f` is `C^n`-valued and `g` is `C^d`-valued, each the
/// identity plus terms of higher quasidegree.
pub fn substitute_full(
    phi: &BigradedSeries,
    f: &HoloSeries,
    g: &HoloSeries,
    v: &BigradedSeries,
) -> Result<BigradedSeries> {
    let (n, d) = (phi.n, phi.d);
    if f.0.s() != n || g.0.s() != d {
        return Err(Error::DimensionMismatch("substitute_full: f must be C^n-, g C^d-valued"));
    }
    let cap = phi.cap.min(f.0.cap).min(g.0.cap).min(v.cap);
    let ff = f.substitute_w(v, 1)?.with_cap(cap);
    let gg = g.substitute_w(v, 1)?.with_cap(cap);
    let ffb = ff.conjugate();
    let re_g = gg.real_part();
    let mut images = Vec::with_capacity(2 * n + d);
    for a in 0..n {
        images.push(ff.comp(a));
    }
    for a in 0..n {
        images.push(ffb.comp(a));
    }
    for j in 0..d {
        images.push(re_g.comp(j));
    }
    phi.compose(&images, cap)
}

/// Number of monomials of quasidegree exactly `k` in the `(z, z̄, u)` layout,
/// optionally holomorphic. Used for sizing and tests.
pub fn monomials_of_weight(n: usize, d: usize, k: u32, holomorphic: bool) -> Vec<Mono> {
    let nz = if holomorphic { n } else { 2 * n };
    let mut out = Vec::new();
    let mut e = vec![0u8; 2 * n + d];
    for r in 0..=k / 2 {
        let zdeg = k - 2 * r;
        for gamma in compositions(r, d) {
            for zpart in compositions(zdeg, nz) {
                e.iter_mut().for_each(|x| *x = 0);
                e[..nz].copy_from_slice(&zpart);
                e[2 * n..].copy_from_slice(&gamma);
                out.push(Mono { wt: k, e: e.clone() });
            }
        }
    }
    out.sort();
    out
}

/// All exponent vectors of length `len` summing to `total`.
pub fn compositions(total: u32, len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; len];
    fn rec(i: usize, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i + 1 == cur.len() {
            cur[i] = left as u8;
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k as u8;
            rec(i + 1, left - k, cur, out);
        }
    }
    if len == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, total, &mut cur, &mut out);
    out
}

impl BigradedSeries {
    /// `Σ_{|γ|=k} (1/γ!) ∂^γ_u self · v^γ`, the `k`-th symmetric `u`-derivative evaluated on
    /// `k` copies of the `d`-vector `v`, divided by `k!`.
    pub fn taylor_term(&self, v: &Self, k: u32) -> Self {
        let mut acc = BigradedSeries::zero(self.n, self.d, self.s(), self.cap.min(v.cap));
        for gamma in compositions(k, self.d) {
            let mut term = self.d_u_multi(&gamma);
            let gf = crate::rat::multi_factorial(&gamma);
            term = term.scale_rat(&Rat::new(1.into(), gf));
            for (j, &e) in gamma.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&v.comp(j));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    pub fn one_scalar(n: usize, d: usize, cap: u32) -> Self {
        Self::constant(n, d, cap, GaussRat::one())
    }
}
