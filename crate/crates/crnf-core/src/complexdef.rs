//! Complex defining equations `w = θ(z, χ, τ)`, `χ = z̄`, `τ = w̄`.
//!
//! A series in `(z, χ, τ)` is stored as a [`BigradedSeries`] with `χ` in the `z̄` slot and
//! `τ` in the `u` slot. With that layout `θ̄(χ, z, τ)` is [`BigradedSeries::conjugate`].
//! A prime is the `τ`-derivative contracted with the following `d`-vector argument.

use alloc::vec::Vec;

use crate::conditions::{Condition, ConditionReport};
use crate::conjugacy::ManifoldSpec;
use crate::error::{Error, Result};
use crate::quadric::HermitianFamily;
use crate::rat::{gr, gr_i, gr_int, GaussRat, Rat};
use crate::series::BigradedSeries;

/// `θ = τ + 2iQ(z, χ) + S(z, χ, τ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexDefining {
    family: HermitianFamily,
    theta: BigradedSeries,
}

fn half() -> GaussRat {
    gr(Rat::new(1.into(), 2.into()), Rat::from_integer(0.into()))
}

/// `1/(c·i)` for an integer `c`.
fn inv_i(c: i64) -> GaussRat {
    gr(Rat::from_integer(0.into()), Rat::new((-1).into(), c.into()))
}

impl ComplexDefining {
    /// Wraps a `C^d`-valued series in `(z, χ, τ)`. No reality check is performed.
    pub fn new(family: HermitianFamily, theta: BigradedSeries) -> Result<Self> {
        if theta.n() != family.n() || theta.d() != family.d() || theta.s() != family.d() {
            return Err(Error::DimensionMismatch("theta must be C^d-valued in (z, chi, tau)"));
        }
        Ok(ComplexDefining { family, theta })
    }

    pub fn theta(&self) -> &BigradedSeries {
        &self.theta
    }

    pub fn family(&self) -> &HermitianFamily {
        &self.family
    }

    fn two_i_q(&self) -> BigradedSeries {
        self.family.q_series(self.family.d(), self.theta.cap()).scale(&(gr_int(2) * gr_i()))
    }

    /// `S = θ − τ − 2iQ`.
    pub fn s(&self) -> BigradedSeries {
        let (n, d, cap) = (self.theta.n(), self.theta.d(), self.theta.cap());
        self.theta.sub(&BigradedSeries::u_vector(n, d, cap)).sub(&self.two_i_q())
    }

    /// `S_{j,k}`, homogeneous of degree `j` in `z` and `k` in `χ`.
    pub fn s_jk(&self, j: u32, k: u32) -> BigradedSeries {
        self.s().extract_pq(j, k)
    }

    /// `θ(z, 0, τ) = θ(0, χ, τ) = τ`.
    pub fn is_normal(&self) -> bool {
        let n = self.theta.n();
        self.s().filter_terms(|m| m.zdeg(n) == 0 || m.zbdeg(n) == 0).is_zero()
    }
}

/// Solves `(w − τ)/2i = φ(z, χ, (w + τ)/2)` for `w = θ(z, χ, τ)` by fixed-point iteration;
/// each pass fixes at least one more quasidegree.
pub fn real_to_complex(spec: &ManifoldSpec) -> Result<ComplexDefining> {
    let (n, d, cap) = (spec.n(), spec.d(), spec.cap());
    let phi = spec.q().add(spec.perturbation());
    let tau = BigradedSeries::u_vector(n, d, cap);
    let two_i = gr_int(2) * gr_i();
    let mut theta = tau.clone();
    for _ in 0..cap {
        let arg = theta.add(&tau).scale(&half());
        let mut images = Vec::with_capacity(2 * n + d);
        for a in 0..n {
            images.push(BigradedSeries::var_z(n, d, cap, a));
        }
        for a in 0..n {
            images.push(BigradedSeries::var_zbar(n, d, cap, a));
        }
        for j in 0..d {
            images.push(arg.comp(j));
        }
        let next = tau.add(&phi.compose(&images, cap)?.scale(&two_i));
        if next == theta {
            break;
        }
        theta = next;
    }
    ComplexDefining::new(spec.family().clone(), theta)
}

/// `τ − θ(z, χ, θ̄(χ, z, τ))` through the cap.
pub fn reality_check(cd: &ComplexDefining) -> Result<BigradedSeries> {
    let th = cd.theta();
    let (n, d, cap) = (th.n(), th.d(), th.cap());
    let bar = th.conjugate();
    let mut images = Vec::with_capacity(2 * n + d);
    for a in 0..n {
        images.push(BigradedSeries::var_z(n, d, cap, a));
    }
    for a in 0..n {
        images.push(BigradedSeries::var_zbar(n, d, cap, a));
    }
    for j in 0..d {
        images.push(bar.comp(j));
    }
    Ok(BigradedSeries::u_vector(n, d, cap).sub(&th.compose(&images, cap)?))
}

/// The low-order relations between `S_{j,k}` and `S̄` implied by the reality relation.
/// `S̄_{j,k}` denotes the conjugate of `S_{j,k}` with `z` and `χ` exchanged, of bidegree `(k, j)`.
pub fn reality_relations(cd: &ComplexDefining) -> ConditionReport {
    let s = cd.s();
    let sb = s.conjugate();
    let tq = cd.two_i_q();
    let top = s.cap();
    let mut r1 = BigradedSeries::zero(s.n(), s.d(), s.s(), top);
    for l in 1..=top {
        r1 = r1.add(&s.extract_pq(1, l)).add(&sb.extract_pq(1, l));
    }
    let s11 = s.extract_pq(1, 1);
    let sb11 = sb.extract_pq(1, 1);
    let r2 = s
        .extract_pq(2, 2)
        .sub(&s11.du_contract(&tq.sub(&sb11)))
        .add(&sb.extract_pq(2, 2));
    let r3 = s
        .extract_pq(2, 3)
        .sub(&s.extract_pq(1, 2).du_contract(&tq.sub(&sb11)))
        .add(&s11.du_contract(&sb.extract_pq(1, 2)))
        .add(&sb.extract_pq(2, 3));
    let mut rep = ConditionReport::default();
    for (name, residual) in [
        ("S_{1,l} + conj S_{l,1}", r1),
        ("S_{2,2} - S_{1,1}'(2iQ - conj S_{1,1}) + conj S_{2,2}", r2),
        ("S_{2,3} - S_{1,2}'(2iQ - conj S_{1,1}) + S_{1,1}' conj S_{2,1} + conj S_{3,2}", r3),
    ] {
        rep.conditions.push(Condition { name: name.into(), residual });
    }
    rep
}

/// `Φ_{p,q}` for `1 ≤ p, q ≤ 3` from the closed forms in `S`. Assumes normal coordinates.
pub fn phi_from_s(cd: &ComplexDefining) -> Result<BigradedSeries> {
    if !cd.is_normal() {
        return Err(Error::Precondition("closed forms need normal coordinates"));
    }
    let s = cd.s();
    let sp = |p, q| s.extract_pq(p, q);
    let (s11, s12, s21, s22) = (sp(1, 1), sp(1, 2), sp(2, 1), sp(2, 2));
    // P = 2iQ + S_{1,1}
    let p = cd.two_i_q().add(&s11);
    let h = inv_i(2);
    let q4 = inv_i(4);
    let mut phi = BigradedSeries::zero(s.n(), s.d(), s.s(), s.cap());
    for (a, b) in [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1)] {
        phi = phi.add(&sp(a, b).scale(&h));
    }
    let phi22 = s22.scale(&h).sub(&s11.du_contract(&p).scale(&q4));
    let phi23 = sp(2, 3)
        .scale(&h)
        .sub(&s11.du_contract(&s12).scale(&q4))
        .sub(&s12.du_contract(&p).scale(&q4));
    let phi32 = sp(3, 2)
        .scale(&h)
        .sub(&s11.du_contract(&s21).scale(&q4))
        .sub(&s21.du_contract(&p).scale(&q4));
    // Second derivative S_{1,1}''(P, P) = Σ_{jk} ∂_j ∂_k S_{1,1} P_j P_k.
    let mut s11pp = BigradedSeries::zero(s.n(), s.d(), s.s(), s.cap());
    for j in 0..s.d() {
        s11pp = s11pp.add(&s11.d_u(j).du_contract(&p).mul(&p.comp(j)));
    }
    let phi33 = sp(3, 3)
        .scale(&h)
        .sub(&s22.du_contract(&p).scale(&q4))
        .sub(&s11.du_contract(&s22).scale(&q4))
        .add(&s11.du_contract(&s11.du_contract(&p)).scale(&inv_i(8)))
        .sub(&s12.du_contract(&s21).scale(&q4))
        .sub(&s21.du_contract(&s12).scale(&q4))
        .add(&s11pp.scale(&inv_i(16)));
    let out = phi.add(&phi22).add(&phi23).add(&phi32).add(&phi33);
    Ok(out.filter_terms(|m| m.zdeg(s.n()) <= 3 && m.zbdeg(s.n()) <= 3))
}
