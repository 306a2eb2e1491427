//! Exact membership tests for the normal-form spaces.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quadric::HermitianFamily;
use crate::rat::{gr_i, gr_int};
use crate::series::BigradedSeries;

/// One named condition and its residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub name: String,
    pub residual: BigradedSeries,
}

impl Condition {
    pub fn pass(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Residuals of a family of conditions. Passing means every residual is exactly zero.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConditionReport {
    pub conditions: Vec<Condition>,
    /// Largest `p` for which the `(p, 1)` conditions were checked, when applicable.
    pub checked_up_to: Option<u32>,
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.conditions.iter().all(Condition::pass)
    }

    pub fn merge(mut self, other: ConditionReport) -> Self {
        self.conditions.extend(other.conditions);
        self.checked_up_to = match (self.checked_up_to, other.checked_up_to) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self
    }

    fn push(&mut self, name: impl Into<String>, residual: BigradedSeries) {
        self.conditions.push(Condition { name: name.into(), residual });
    }

    pub fn failing(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.pass())
    }
}

/// Target space of a normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    /// `N⁰ ∩ N¹ ∩ N^d ∩ N^off`.
    Full,
    /// `N⁰ ∩ N¹ ∩ N^d`.
    Weak,
    /// Chern–Moser conditions, `d = 1`.
    ChernMoser,
}

fn real_check(phi: &BigradedSeries) -> Result<()> {
    if phi.is_real_valued() {
        Ok(())
    } else {
        Err(Error::NotRealValued("normal-form candidate"))
    }
}

fn zdeg_max(phi: &BigradedSeries) -> u32 {
    phi.degree().unwrap_or(0).max(phi.cap())
}

/// `Φ_{p,0} = Φ_{0,p} = 0` for all `p`.
pub fn check_n0(phi: &BigradedSeries) -> Result<ConditionReport> {
    real_check(phi)?;
    let n = phi.n();
    let mut r = ConditionReport::default();
    r.push("N0", phi.filter_terms(|m| m.zdeg(n) == 0 || m.zbdeg(n) == 0));
    Ok(r)
}

/// `K* Φ_{p,1} = K̄* Φ_{1,p} = 0` for `1 < p ≤ min(k_max, cap)`.
pub fn check_n1(family: &HermitianFamily, phi: &BigradedSeries, k_max: Option<u32>) -> Result<ConditionReport> {
    real_check(phi)?;
    let top = k_max.unwrap_or(u32::MAX).min(zdeg_max(phi));
    let mut r = ConditionReport { checked_up_to: Some(top), ..Default::default() };
    let mut kst = BigradedSeries::zero(phi.n(), phi.d(), phi.n(), phi.cap());
    let mut kbst = kst.clone();
    for p in 2..=top {
        kst = kst.add(&family.kstar_apply(&phi.extract_pq(p, 1), false)?);
        kbst = kbst.add(&family.kstar_apply(&phi.extract_pq(1, p), true)?);
    }
    r.push("N1: K* Phi_{p,1}", kst);
    r.push("N1: conj K* Phi_{1,p}", kbst);
    Ok(r)
}

fn ds_pow(family: &HermitianFamily, x: &BigradedSeries, k: u32) -> BigradedSeries {
    let mut out = x.clone();
    for _ in 0..k {
        out = family.deltastar_apply(&out);
    }
    out
}

/// The diagonal conditions on `Φ_{1,1}`, `Φ_{2,2}`, `Φ_{3,3}`.
pub fn check_nd(family: &HermitianFamily, phi: &BigradedSeries) -> Result<ConditionReport> {
    real_check(phi)?;
    let mut r = ConditionReport::default();
    let (r1, r2) = nd_residuals(family, phi)?;
    r.push("Nd: -6 D* Phi11 + D*^3 Phi33", r1);
    r.push("Nd: K*(Phi11 - i D* Phi22 - D*^2 Phi33)", r2);
    Ok(r)
}

fn nd_residuals(family: &HermitianFamily, phi: &BigradedSeries) -> Result<(BigradedSeries, BigradedSeries)> {
    let p11 = phi.extract_pq(1, 1);
    let p22 = phi.extract_pq(2, 2);
    let p33 = phi.extract_pq(3, 3);
    let r1 = family.deltastar_apply(&p11).scale(&gr_int(-6)).add(&ds_pow(family, &p33, 3));
    let inner = p11
        .sub(&family.deltastar_apply(&p22).scale(&gr_i()))
        .sub(&ds_pow(family, &p33, 2));
    let r2 = family.kstar_apply(&inner, false)?;
    Ok((r1, r2))
}

/// The off-diagonal conditions on `Φ_{2,3}`, `Φ_{3,2}`.
pub fn check_noff(family: &HermitianFamily, phi: &BigradedSeries) -> Result<ConditionReport> {
    real_check(phi)?;
    let mut r = ConditionReport::default();
    let (a, b) = noff_residuals(family, phi)?;
    r.push("Noff: K* D*^2 (Phi23 + i D Phi12)", a);
    r.push("Noff: conj K* D*^2 (Phi32 - i D Phi21)", b);
    Ok(r)
}

fn noff_residuals(family: &HermitianFamily, phi: &BigradedSeries) -> Result<(BigradedSeries, BigradedSeries)> {
    let a = phi.extract_pq(2, 3).add(&family.delta_apply(&phi.extract_pq(1, 2)).scale(&gr_i()));
    let b = phi.extract_pq(3, 2).sub(&family.delta_apply(&phi.extract_pq(2, 1)).scale(&gr_i()));
    Ok((
        family.kstar_apply(&ds_pow(family, &a, 2), false)?,
        family.kstar_apply(&ds_pow(family, &b, 2), true)?,
    ))
}

/// Chern–Moser conditions for `d = 1`.
pub fn check_cm(family: &HermitianFamily, phi: &BigradedSeries) -> Result<ConditionReport> {
    if family.d() != 1 {
        return Err(Error::Precondition("Chern-Moser conditions need d = 1"));
    }
    real_check(phi)?;
    let n = phi.n();
    let mut r = ConditionReport::default();
    r.push("CM: Phi_{j,0}, Phi_{0,j}", phi.filter_terms(|m| m.zdeg(n) == 0 || m.zbdeg(n) == 0));
    r.push(
        "CM: Phi_{j,1}, Phi_{1,j}",
        phi.filter_terms(|m| (m.zdeg(n) == 1 && m.zbdeg(n) >= 1) || (m.zbdeg(n) == 1 && m.zdeg(n) >= 1)),
    );
    r.push("CM: T Phi22", family.cm_trace(&phi.extract_pq(2, 2), 1)?);
    r.push("CM: T^2 Phi23", family.cm_trace(&phi.extract_pq(2, 3), 2)?);
    r.push("CM: T^2 Phi32", family.cm_trace(&phi.extract_pq(3, 2), 2)?);
    r.push("CM: T^3 Phi33", family.cm_trace(&phi.extract_pq(3, 3), 3)?);
    Ok(r)
}

/// All conditions of the requested space. `N¹` is checked through the series cap.
pub fn check_space(family: &HermitianFamily, phi: &BigradedSeries, space: Space) -> Result<ConditionReport> {
    match space {
        Space::Full => Ok(check_n0(phi)?
            .merge(check_n1(family, phi, None)?)
            .merge(check_nd(family, phi)?)
            .merge(check_noff(family, phi)?)),
        Space::Weak => Ok(check_n0(phi)?.merge(check_n1(family, phi, None)?).merge(check_nd(family, phi)?)),
        Space::ChernMoser => check_cm(family, phi),
    }
}
