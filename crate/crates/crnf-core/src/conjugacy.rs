//! The conjugacy equation between `Im w = Q + Φ` and `Im w' = Q + Φ̃`.
//!
//! For a map `H = (f, g)` and a candidate `Φ` the residual is
//!
//! ```text
//! R(H, Φ) = (1/2i)(G − Ḡ) − Q(F, F̄) − Φ̃(F, F̄, (G + Ḡ)/2),
//! F = f(z, u + iv), G = g(z, u + iv), v = Q + Φ,
//! ```
//!
//! and `H` maps the first manifold into the second through the cap iff `R = 0`.
//! Its quasidegree-`k` part depends on the degree-`k` unknowns only through the linear
//! operator `L`: `R_k(H + x, Φ + Φ_k) = R_k(H, Φ) + L x + Φ_k`.

use crate::error::{Error, Result};
use crate::quadric::HermitianFamily;
use crate::series::{substitute_full, BigradedSeries, HoloSeries};

/// A perturbed quadric `Im w = Q(z, z̄) + Φ̃(z, z̄, Re w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSpec {
    family: HermitianFamily,
    perturbation: BigradedSeries,
    cap: u32,
}

impl ManifoldSpec {
    /// Validates the family, reality and quasiorder of `Φ̃`. Terms above `cap` are rejected.
    pub fn new(family: HermitianFamily, perturbation: BigradedSeries, cap: u32) -> Result<Self> {
        family.check()?;
        let (n, d) = (family.n(), family.d());
        if perturbation.n() != n || perturbation.d() != d || perturbation.s() != d {
            return Err(Error::DimensionMismatch("perturbation must be a C^d-valued series in (z, z̄, u)"));
        }
        if !perturbation.is_real_valued() {
            return Err(Error::NotRealValued("perturbation"));
        }
        if let Some(o) = perturbation.order() {
            if o < 3 {
                return Err(Error::WeightTooLow { what: "perturbation", min: 3, found: o });
            }
        }
        if let Some(top) = perturbation.degree() {
            if top > cap {
                return Err(Error::Precondition("perturbation has terms above the cap"));
            }
        }
        Ok(ManifoldSpec { perturbation: perturbation.with_cap(cap), family, cap })
    }

    pub fn family(&self) -> &HermitianFamily {
        &self.family
    }

    pub fn perturbation(&self) -> &BigradedSeries {
        &self.perturbation
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn d(&self) -> usize {
        self.family.d()
    }

    /// The same manifold with another perturbation.
    pub fn with_perturbation(&self, perturbation: BigradedSeries) -> Result<Self> {
        ManifoldSpec::new(self.family.clone(), perturbation, self.cap)
    }

    /// `Q(z, z̄)` at this spec's cap.
    pub fn q(&self) -> BigradedSeries {
        self.family.q_series(self.d(), self.cap)
    }
}

/// `z' = z + f_rest(z, w)`, `w' = w + g_rest(z, w)` with identity linear part.
#[derive(Clone, Debug, PartialEq)]
pub struct Transform {
    f: HoloSeries,
    g: HoloSeries,
}

impl Transform {
    pub fn identity(n: usize, d: usize, cap: u32) -> Self {
        Transform { f: HoloSeries::zero(n, d, n, cap), g: HoloSeries::zero(n, d, d, cap) }
    }

    /// Builds a transform from its nonlinear parts: `f_rest` is `C^n`-valued of quasiorder at
    /// least 2, `g_rest` is `C^d`-valued of quasiorder at least 3.
    pub fn new(f_rest: HoloSeries, g_rest: HoloSeries) -> Result<Self> {
        let fs = f_rest.as_series();
        let gs = g_rest.as_series();
        let (n, d) = (fs.n(), fs.d());
        if fs.s() != n || gs.s() != d || gs.n() != n || gs.d() != d {
            return Err(Error::DimensionMismatch("transform components"));
        }
        if fs.order().is_some_and(|o| o < 2) || gs.order().is_some_and(|o| o < 3) {
            return Err(Error::Precondition("f_rest needs quasiorder >= 2 and g_rest quasiorder >= 3"));
        }
        Ok(Transform { f: f_rest, g: g_rest })
    }

    pub fn f_rest(&self) -> &HoloSeries {
        &self.f
    }

    pub fn g_rest(&self) -> &HoloSeries {
        &self.g
    }

    pub fn n(&self) -> usize {
        self.f.as_series().n()
    }

    pub fn d(&self) -> usize {
        self.f.as_series().d()
    }

    pub fn cap(&self) -> u32 {
        self.f.as_series().cap().min(self.g.as_series().cap())
    }

    /// Full `f = z + f_rest`.
    pub fn f(&self) -> HoloSeries {
        let s = self.f.as_series();
        let z = BigradedSeries::z_vector(s.n(), s.d(), s.cap());
        HoloSeries::new(s.add(&z)).expect("holomorphic")
    }

    /// Full `g = w + g_rest`.
    pub fn g(&self) -> HoloSeries {
        let s = self.g.as_series();
        let w = BigradedSeries::u_vector(s.n(), s.d(), s.cap());
        HoloSeries::new(s.add(&w)).expect("holomorphic")
    }

    pub fn with_cap(&self, cap: u32) -> Self {
        Transform { f: self.f.with_cap(cap), g: self.g.with_cap(cap) }
    }

    /// Keeps `f` terms of quasidegree `≤ kf` and `g` terms of quasidegree `≤ kg`.
    pub fn truncate(&self, kf: u32, kg: u32) -> Self {
        Transform { f: self.f.truncate(kf), g: self.g.truncate(kg) }
    }

    pub fn add(&self, other: &Transform) -> Self {
        Transform { f: self.f.add(&other.f), g: self.g.add(&other.g) }
    }

    pub fn is_identity(&self) -> bool {
        self.f.as_series().is_zero() && self.g.as_series().is_zero()
    }

    /// Degree-`k` unknowns: `f` of quasidegree `k − 1` and `g` of quasidegree `k`.
    pub fn degree_part(&self, k: u32) -> Transform {
        Transform { f: self.f.extract_wt(k - 1), g: self.g.extract_wt(k) }
    }
}

/// `(1/2i)(a − ā)`.
fn im_part(a: &BigradedSeries) -> BigradedSeries {
    a.imag_part()
}

/// Exact residual `R(H, Φ)` of the conjugacy equation through `cap`.
pub fn residual_at(spec: &ManifoldSpec, t: &Transform, phi: &BigradedSeries, cap: u32) -> Result<BigradedSeries> {
    let fam = spec.family();
    if phi.s() != spec.d() || phi.n() != spec.n() {
        return Err(Error::DimensionMismatch("phi"));
    }
    if !phi.is_real_valued() {
        return Err(Error::NotRealValued("phi"));
    }
    let v = fam.q_series(spec.d(), cap).add(&phi.with_cap(cap));
    let f = t.f().with_cap(cap);
    let g = t.g().with_cap(cap);
    let ff = f.substitute_w(&v, 1)?;
    let gg = g.substitute_w(&v, 1)?;
    let qff = fam.eval_q(&ff, &ff.conjugate())?;
    let pert = spec.perturbation().with_cap(cap);
    let tail = if pert.is_zero() { BigradedSeries::zero(spec.n(), spec.d(), spec.d(), cap) } else { substitute_full(&pert, &f, &g, &v)? };
    Ok(im_part(&gg).sub(&qff).sub(&tail))
}

/// `R(H, Φ)` at the spec's cap. Zero iff `H` maps `Im w = Q + Φ` into the spec's manifold.
pub fn verify_conjugacy(spec: &ManifoldSpec, t: &Transform, phi: &BigradedSeries) -> Result<BigradedSeries> {
    residual_at(spec, t, phi, spec.cap())
}

/// Linear operator `L` on the degree-`k` unknowns `(f_{k−1}, g_k)` of `x`:
///
/// `L x = (1/2i)(η(z, u+iQ) − conj) − Q(ξ(z, u+iQ), z̄) − Q(z, conj ξ(z, u+iQ))`.
pub fn lhs_apply(family: &HermitianFamily, x: &Transform, k: u32) -> Result<BigradedSeries> {
    let (n, d) = (x.n(), x.d());
    let xi = x.f_rest().extract_wt(k - 1).with_cap(k);
    let eta = x.g_rest().extract_wt(k).with_cap(k);
    let q = family.q_series(d, k);
    let xiq = xi.substitute_w(&q, 1)?;
    let etaq = eta.substitute_w(&q, 1)?;
    let z = BigradedSeries::z_vector(n, d, k);
    let zb = BigradedSeries::zbar_vector(n, d, k);
    let out = im_part(&etaq)
        .sub(&family.eval_q(&xiq, &zb)?)
        .sub(&family.eval_q(&z, &xiq.conjugate())?);
    Ok(out.extract_wt(k))
}

/// `T_k = −{R(H^{<k}, Φ^{<k})}_k`, the right-hand side of `L x + Φ_k = T_k`.
///
/// Only `f` terms of quasidegree `< k − 1`, `g` terms of quasidegree `< k` and `Φ` terms of
/// quasidegree `< k` are read; higher inputs are discarded before evaluation.
pub fn rhs_degree_k(spec: &ManifoldSpec, t_partial: &Transform, phi_partial: &BigradedSeries, k: u32) -> Result<BigradedSeries> {
    if k < 3 {
        return Err(Error::Precondition("degree must be at least 3"));
    }
    let t = t_partial.truncate(k - 2, k - 1).with_cap(k);
    let phi = phi_partial.truncate(k - 1).with_cap(k);
    Ok(residual_at(spec, &t, &phi, k)?.extract_wt(k).neg())
}

/// The manifold `M'` that `P` maps into `M`: `P(M') ⊂ M` through the cap.
///
/// Solved degree by degree: `Φ'_k = −R_k(P, Φ'_{<k})`, using that `R_k` depends on `Φ'_k`
/// only through `+Φ'_k`.
pub fn transform_spec(spec: &ManifoldSpec, p: &Transform) -> Result<ManifoldSpec> {
    let (n, d, cap) = (spec.n(), spec.d(), spec.cap());
    if p.f_rest().as_series().order().is_some_and(|o| o < 2) || p.g_rest().as_series().order().is_some_and(|o| o < 3) {
        return Err(Error::Precondition("P must be the identity plus f terms of weight >= 2 and g terms of weight >= 3"));
    }
    let mut phi = BigradedSeries::zero(n, d, d, cap);
    for k in 3..=cap {
        let pk = p.truncate(k - 1, k).with_cap(k);
        let r = residual_at(spec, &pk, &phi.with_cap(k), k)?.extract_wt(k);
        phi = phi.sub(&r.with_cap(cap));
    }
    spec.with_perturbation(phi)
}

/// Applies `L` to unknowns given directly as series (used by the engine's block assembly).
pub(crate) fn lhs_from_parts(
    family: &HermitianFamily,
    xi: &BigradedSeries,
    eta: &BigradedSeries,
    k: u32,
) -> Result<BigradedSeries> {
    let t = Transform { f: HoloSeries::new(xi.with_cap(k))?, g: HoloSeries::new(eta.with_cap(k))? };
    lhs_apply(family, &t, k)
}
