//! Closed-form low-bidegree expansions of the conjugacy equation, checked against the
//! generic substitution engine.
//!
//! For a holomorphic `h = Σ_j h_j(w) z^j` and `V = Q + Φ` with `Φ_{p,0} = Φ_{0,p} = 0`, the
//! bidegree pieces of `h(z, u + iV)` are
//!
//! ```text
//! {h(z, u + iV)}_{a,b} = Σ_k Σ_j (i^k / k!) D^k h_j (V^k)_{a−j, b}.
//! ```
//!
//! The three compared quantities are `g(z, u+iV) − g(z, u+iQ)`, `Q(f(z, u+iV) − f(z, u+iQ), z̄)`
//! and `Q(F, F̄)` with `F = f(z, u+iV)`, where `f`, `g` are the nonlinear parts of a transform.

use alloc::format;

use crate::conditions::check_n0;
use crate::conjugacy::{ManifoldSpec, Transform};
use crate::error::{Error, Result};
use crate::rat::{gr, gr_i, Rat};
use crate::series::BigradedSeries;

/// Bidegrees with a closed form: `(p, 0)`, `(p, 1)`, `(2, 2)`, `(3, 2)`, `(3, 3)`.
pub fn supported(p: u32, q: u32) -> bool {
    q <= 1 || matches!((p, q), (2, 2) | (3, 2) | (3, 3))
}

struct Pieces<'a> {
    h: &'a BigradedSeries,
    v: &'a BigradedSeries,
}

fn frac(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

impl Pieces<'_> {
    fn hj(&self, j: u32) -> BigradedSeries {
        self.h.extract_pq(j, 0)
    }

    fn zero(&self) -> BigradedSeries {
        BigradedSeries::zero(self.h.n(), self.h.d(), self.h.s(), self.h.cap())
    }

    fn vv(&self, a: u32, b: u32) -> BigradedSeries {
        self.v.extract_pq(a, b)
    }

    /// `D h (x)`.
    fn d1(&self, j: u32, x: &BigradedSeries) -> BigradedSeries {
        self.hj(j).du_contract(x)
    }

    /// `D² h (x, y)`.
    fn d2(&self, j: u32, x: &BigradedSeries, y: &BigradedSeries) -> BigradedSeries {
        let h = self.hj(j);
        let mut acc = BigradedSeries::zero(h.n(), h.d(), h.s(), h.cap());
        for l in 0..h.d() {
            acc = acc.add(&h.d_u(l).du_contract(y).mul(&x.comp(l)));
        }
        acc
    }

    /// `D³ h (x, x, x)`.
    fn d3(&self, j: u32, x: &BigradedSeries) -> BigradedSeries {
        let h = self.hj(j);
        let mut acc = BigradedSeries::zero(h.n(), h.d(), h.s(), h.cap());
        for l in 0..h.d() {
            for m in 0..h.d() {
                acc = acc.add(&h.d_u(l).d_u(m).du_contract(x).mul(&x.comp(l)).mul(&x.comp(m)));
            }
        }
        acc
    }

    /// `{h(z, u + iV)}_{a,b}`.
    fn piece(&self, a: u32, b: u32) -> Result<BigradedSeries> {
        let i = gr_i();
        let neg_half = gr(frac(-1, 2), frac(0, 1));
        let v11 = self.vv(1, 1);
        let out = match (a, b) {
            (_, 0) => self.hj(a),
            (0, _) => self.zero(),
            (_, 1) => {
                let mut acc = self.zero();
                for j in 0..a {
                    acc = acc.add(&self.d1(j, &self.vv(a - j, 1)).scale(&i));
                }
                acc
            }
            (1, _) => self.d1(0, &self.vv(1, b)).scale(&i),
            (2, 2) => self
                .d1(0, &self.vv(2, 2))
                .add(&self.d1(1, &self.vv(1, 2)))
                .scale(&i)
                .add(&self.d2(0, &v11, &v11).scale(&neg_half)),
            (3, 2) => self
                .d1(0, &self.vv(3, 2))
                .add(&self.d1(1, &self.vv(2, 2)))
                .add(&self.d1(2, &self.vv(1, 2)))
                .scale(&i)
                .sub(&self.d2(0, &v11, &self.vv(2, 1)))
                .add(&self.d2(1, &v11, &v11).scale(&neg_half)),
            (2, 3) => self
                .d1(0, &self.vv(2, 3))
                .add(&self.d1(1, &self.vv(1, 3)))
                .scale(&i)
                .sub(&self.d2(0, &v11, &self.vv(1, 2))),
            (3, 3) => self
                .d1(0, &self.vv(3, 3))
                .add(&self.d1(1, &self.vv(2, 3)))
                .add(&self.d1(2, &self.vv(1, 3)))
                .scale(&i)
                .sub(&self.d2(0, &v11, &self.vv(2, 2)))
                .sub(&self.d2(0, &self.vv(1, 2), &self.vv(2, 1)))
                .sub(&self.d2(1, &v11, &self.vv(1, 2)))
                .sub(&self.d3(0, &v11).scale(&gr(frac(0, 1), frac(1, 6)))),
            _ => return Err(Error::Unsupported(format!("closed form for the ({a},{b}) piece"))),
        };
        Ok(out)
    }
}

/// `Σ_{a+c=p, b+d=q} Q(F_{a,b}, conj F_{d,c})`.
fn qff_closed(spec: &ManifoldSpec, f: &Pieces<'_>, p: u32, q: u32) -> Result<BigradedSeries> {
    let fam = spec.family();
    let s = f.h;
    let mut acc = BigradedSeries::zero(s.n(), s.d(), spec.d(), s.cap());
    for a in 0..=p {
        for b in 0..=q {
            let (c, d) = (p - a, q - b);
            let x = f.piece(a, b)?;
            let y = f.piece(d, c)?;
            if x.is_zero() || y.is_zero() {
                continue;
            }
            acc = acc.add(&fam.eval_q(&x, &y.conjugate())?);
        }
    }
    Ok(acc)
}

/// Generic and closed-form values of one bidegree, stacked as `[g part; Q f part; Q(F, F̄)]`
/// (`3d` components). The two agree exactly.
pub fn appendix_crosscheck(
    spec: &ManifoldSpec,
    t: &Transform,
    phi: &BigradedSeries,
    pq: (u32, u32),
) -> Result<(BigradedSeries, BigradedSeries)> {
    let (p, q) = pq;
    if !supported(p, q) {
        return Err(Error::Unsupported(format!("no closed form for bidegree ({p},{q})")));
    }
    if !check_n0(phi)?.pass() {
        return Err(Error::Precondition("Phi must satisfy Phi_{p,0} = Phi_{0,p} = 0"));
    }
    let (n, d) = (spec.n(), spec.d());
    let cap = spec.cap().min(t.cap()).min(phi.cap());
    let fam = spec.family();
    let qs = spec.q().with_cap(cap);
    let v = qs.add(&phi.with_cap(cap));
    let f = t.f_rest().with_cap(cap);
    let g = t.g_rest().with_cap(cap);
    let zb = BigradedSeries::zbar_vector(n, d, cap);

    // Generic path: full substitution.
    let gv = g.substitute_w(&v, 1)?;
    let gq = g.substitute_w(&qs, 1)?;
    let fv = f.substitute_w(&v, 1)?;
    let fq = f.substitute_w(&qs, 1)?;
    let generic = BigradedSeries::stack(alloc::vec![
        gv.sub(&gq).extract_pq(p, q),
        fam.eval_q(&fv.sub(&fq), &zb)?.extract_pq(p, q),
        fam.eval_q(&fv, &fv.conjugate())?.extract_pq(p, q),
    ]);

    // Closed forms from the bidegree pieces.
    let (gs, fs) = (g.as_series(), f.as_series());
    let gpv = Pieces { h: gs, v: &v };
    let gpq = Pieces { h: gs, v: &qs };
    let fpv = Pieces { h: fs, v: &v };
    let fpq = Pieces { h: fs, v: &qs };
    let g_part = gpv.piece(p, q)?.sub(&gpq.piece(p, q)?);
    let qf_part = if q == 0 {
        BigradedSeries::zero(n, d, d, cap)
    } else {
        fam.eval_q(&fpv.piece(p, q - 1)?.sub(&fpq.piece(p, q - 1)?), &zb)?
    };
    let qff_part = qff_closed(spec, &fpv, p, q)?;
    let closed = BigradedSeries::stack(alloc::vec![g_part, qf_part, qff_part]);
    Ok((generic, closed))
}
